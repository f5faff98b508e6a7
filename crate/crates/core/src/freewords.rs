//! Reduced words in a free group of finite rank, cyclic words, and exact
//! pattern-copy counting along geodesics of the Cayley tree.
//!
//! Letters are nonzero signed integers: `+i` is the `i`-th generator, `-i`
//! its inverse. In text form generator `i` is the `i`-th lowercase letter
//! and its inverse the matching uppercase letter, so `"abA"` is
//! a·b·a⁻¹ and the empty string is the identity.

use crate::{ClassifiedError, FailureClass, Rational};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet rank must be at least 1")]
    ZeroRank,
    #[error("letter {letter} is outside the alphabet of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("character {ch:?} at position {position} is not a word letter (a-z or A-Z)")]
    BadCharacter { ch: char, position: usize },
    #[error("{op} requires a nontrivial word")]
    IdentityInput { op: &'static str },
    #[error("pattern must be a nonempty word")]
    EmptyPattern,
    #[error("letter {letter} has no text form; text words cover rank <= 26")]
    TextFormUnsupported { letter: i32 },
    #[error("ball of radius {radius} holds {size} words, over the cap of {cap}")]
    BallCapExceeded { radius: usize, size: u128, cap: usize },
}

impl ClassifiedError for WordError {
    fn class(&self) -> FailureClass {
        FailureClass::InvalidInput
    }
}

/// A free generating set of fixed finite rank. Validates letters and
/// enumerates balls; the words themselves do not carry their alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn check_letter(&self, letter: i32) -> Result<(), WordError> {
        if letter == 0 || letter.unsigned_abs() as usize > self.rank {
            return Err(WordError::LetterOutOfRange {
                letter,
                rank: self.rank,
            });
        }
        Ok(())
    }

    /// Freely reduces a letter sequence into a [`FreeWord`].
    pub fn reduce(&self, letters: &[i32]) -> Result<FreeWord, WordError> {
        for &l in letters {
            self.check_letter(l)?;
        }
        Ok(FreeWord {
            letters: reduce_letters(letters),
        })
    }

    /// Parses text form (`'a'..'z'` generators, `'A'..'Z'` inverses) and
    /// freely reduces the result. The empty string is the identity.
    pub fn parse_word(&self, text: &str) -> Result<FreeWord, WordError> {
        let mut letters = Vec::with_capacity(text.len());
        for (position, ch) in text.chars().enumerate() {
            let letter = match ch {
                'a'..='z' => ch as i32 - 'a' as i32 + 1,
                'A'..='Z' => -(ch as i32 - 'A' as i32 + 1),
                _ => return Err(WordError::BadCharacter { ch, position }),
            };
            self.check_letter(letter)?;
            letters.push(letter);
        }
        Ok(FreeWord {
            letters: reduce_letters(&letters),
        })
    }

    /// Number of reduced words of length at most `radius`.
    pub fn ball_size(&self, radius: usize) -> u128 {
        let deg = 2 * self.rank as u128;
        let mut total = 1u128;
        let mut layer = 1u128;
        for length in 1..=radius {
            layer *= if length == 1 { deg } else { deg - 1 };
            total += layer;
        }
        total
    }

    /// All reduced words of length at most `radius`, in length-then-lex
    /// order (letters compared as signed integers). Guarded by `cap` so a
    /// typo cannot ask for an astronomically large enumeration.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<Vec<FreeWord>, WordError> {
        let size = self.ball_size(radius);
        if size > cap as u128 {
            return Err(WordError::BallCapExceeded {
                radius,
                size,
                cap,
            });
        }
        let rank = self.rank as i32;
        let letters: Vec<i32> = (-rank..=rank).filter(|&l| l != 0).collect();
        let mut all = Vec::with_capacity(size as usize);
        all.push(FreeWord::identity());
        let mut layer = vec![FreeWord::identity()];
        for _ in 1..=radius {
            let mut next = Vec::with_capacity(layer.len() * (2 * self.rank));
            for word in &layer {
                for &l in &letters {
                    if word.letters.last() == Some(&-l) {
                        continue;
                    }
                    let mut extended = word.letters.clone();
                    extended.push(l);
                    next.push(FreeWord { letters: extended });
                }
            }
            all.extend_from_slice(&next);
            layer = next;
        }
        Ok(all)
    }
}

fn reduce_letters(letters: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A freely reduced word. The reduced spelling of a free-group element is
/// unique, so equality of `FreeWord`s is equality in the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord {
            letters: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Product in the free group (concatenate, then cancel at the seam).
    pub fn multiply(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn power(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &FreeWord) -> FreeWord {
        c.multiply(self).multiply(&c.inverse())
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &FreeWord, y: &FreeWord) -> FreeWord {
        x.multiply(y).multiply(&x.inverse()).multiply(&y.inverse())
    }

    /// Exponent sum of one generator (1-based). Conjugation-invariant, and
    /// zero for every generator exactly when the word lies in the
    /// commutator subgroup.
    pub fn exponent_sum(&self, generator: usize) -> i64 {
        let g = generator as i32;
        self.letters
            .iter()
            .map(|&l| {
                if l == g {
                    1
                } else if l == -g {
                    -1
                } else {
                    0
                }
            })
            .sum()
    }

    pub fn has_zero_exponent_sums(&self, rank: usize) -> bool {
        (1..=rank).all(|g| self.exponent_sum(g) == 0)
    }

    /// Splits a nontrivial word as `conjugator · core · conjugator⁻¹` with
    /// `core` cyclically reduced. The core of a nontrivial reduced word is
    /// never empty: full cancellation would force an inverse pair in the
    /// middle of an already reduced word.
    pub fn cyclic_reduce(&self) -> Result<(CyclicWord, FreeWord), WordError> {
        if self.is_empty() {
            return Err(WordError::IdentityInput {
                op: "cyclic reduction",
            });
        }
        let ls = &self.letters;
        let mut i = 0;
        let mut j = ls.len();
        while j - i >= 2 && ls[i] == -ls[j - 1] {
            i += 1;
            j -= 1;
        }
        let mid = &ls[i..j];
        let rot = least_rotation(mid);
        let mut conj = ls[..i].to_vec();
        conj.extend_from_slice(&mid[..rot]);
        let mut rep = mid[rot..].to_vec();
        rep.extend_from_slice(&mid[..rot]);
        Ok((
            CyclicWord {
                word: FreeWord { letters: rep },
            },
            FreeWord { letters: conj },
        ))
    }

    /// Stable translation length on the Cayley tree: the length of the
    /// cyclic core, i.e. `lim |uⁿ|/n`; zero only for the identity.
    pub fn translation_length(&self) -> usize {
        match self.cyclic_reduce() {
            Ok((core, _)) => core.period(),
            Err(_) => 0,
        }
    }

    /// Conjugacy test: nontrivial words are conjugate exactly when their
    /// cyclic cores are rotations of one another.
    pub fn are_conjugate(&self, other: &FreeWord) -> bool {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => true,
            (true, false) | (false, true) => false,
            (false, false) => {
                let (a, _) = self.cyclic_reduce().expect("nontrivial");
                let (b, _) = other.cyclic_reduce().expect("nontrivial");
                a == b
            }
        }
    }

    /// Whether some `b` and `n > 0` give `b uⁿ b⁻¹ = u⁻ⁿ`. Roots are unique
    /// in a free group, so this reduces to `u` being conjugate to `u⁻¹` —
    /// which never happens for nontrivial `u` (free groups are bi-orderable),
    /// making the check a guard rather than a live code path.
    pub fn mirror_condition(&self) -> Result<bool, WordError> {
        if self.is_empty() {
            return Err(WordError::IdentityInput {
                op: "mirror condition",
            });
        }
        Ok(self.are_conjugate(&self.inverse()))
    }

    /// The unique `root` and maximal `exponent` with `self = root^exponent`.
    pub fn primitive_root(&self) -> Result<(FreeWord, u32), WordError> {
        if self.is_empty() {
            return Err(WordError::IdentityInput {
                op: "primitive root",
            });
        }
        let (core, conj) = self.cyclic_reduce()?;
        let rep = core.representative().letters();
        let p = rep.len();
        for d in 1..=p {
            if p % d != 0 {
                continue;
            }
            if (d..p).all(|k| rep[k] == rep[k % d]) {
                let root_core = FreeWord {
                    letters: rep[..d].to_vec(),
                };
                let root = root_core.conjugate_by(&conj);
                return Ok((root, (p / d) as u32));
            }
        }
        unreachable!("a word is its own 1st power");
    }

    /// Maximum number of pairwise disjoint copies of `pattern` occurring as
    /// consecutive subwords of `self`. All occurrences have the same length,
    /// so the greedy leftmost scan picks a maximum disjoint family
    /// (earliest-finishing-interval argument).
    pub fn count_copies(&self, pattern: &FreeWord) -> Result<usize, WordError> {
        if pattern.is_empty() {
            return Err(WordError::EmptyPattern);
        }
        let host = &self.letters;
        let pat = &pattern.letters;
        let m = pat.len();
        let mut count = 0;
        let mut i = 0;
        while i + m <= host.len() {
            if host[i..i + m] == pat[..] {
                count += 1;
                i += m;
            } else {
                i += 1;
            }
        }
        Ok(count)
    }

    /// Text form; fails above rank 26.
    pub fn to_text(&self) -> Result<String, WordError> {
        let mut out = String::with_capacity(self.letters.len());
        for &l in &self.letters {
            if l.unsigned_abs() > 26 {
                return Err(WordError::TextFormUnsupported { letter: l });
            }
            let ch = if l > 0 {
                (b'a' + (l - 1) as u8) as char
            } else {
                (b'A' + (-l - 1) as u8) as char
            };
            out.push(ch);
        }
        Ok(out)
    }
}

impl std::fmt::Display for FreeWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &l in &self.letters {
            if l.unsigned_abs() <= 26 {
                let ch = if l > 0 {
                    (b'a' + (l - 1) as u8) as char
                } else {
                    (b'A' + (-l - 1) as u8) as char
                };
                write!(f, "{ch}")?;
            } else {
                write!(f, "<{l}>")?;
            }
        }
        Ok(())
    }
}

/// Length-then-lex order (letters compared as signed integers); used for
/// deterministic enumeration and tie-breaking.
impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn least_rotation(letters: &[i32]) -> usize {
    let n = letters.len();
    let mut best = 0;
    for cand in 1..n {
        for k in 0..n {
            let a = letters[(cand + k) % n];
            let b = letters[(best + k) % n];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    best = cand;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    best
}

/// A conjugacy class of nontrivial elements: a cyclically reduced word up
/// to rotation, stored as its lexicographically least rotation so that
/// derived equality and hashing are rotation-invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    word: FreeWord,
}

impl CyclicWord {
    pub fn representative(&self) -> &FreeWord {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// The class of the inverse element.
    pub fn inverse(&self) -> CyclicWord {
        let inv = self.word.inverse();
        let rot = least_rotation(inv.letters());
        let mut rep = inv.letters()[rot..].to_vec();
        rep.extend_from_slice(&inv.letters()[..rot]);
        CyclicWord {
            word: FreeWord { letters: rep },
        }
    }

    /// Letter of the associated periodic bi-infinite word at `position`.
    pub fn letter_at(&self, position: usize) -> i32 {
        self.word.letters()[position % self.period()]
    }

    /// `representative^n` as a reduced word (cyclic reducedness makes the
    /// concatenation already reduced).
    pub fn power_word(&self, n: usize) -> FreeWord {
        let rep = self.word.letters();
        let mut letters = Vec::with_capacity(rep.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(rep);
        }
        FreeWord { letters }
    }

    /// Window of the periodic word: `len` letters starting at `start`.
    /// Windows are reduced because the periodic word is.
    pub fn window(&self, start: usize, len: usize) -> FreeWord {
        let letters = (0..len).map(|k| self.letter_at(start + k)).collect();
        FreeWord { letters }
    }
}

/// Exact value of `lim count_copies(coreⁿ, pattern) / n`.
///
/// Copies of the pattern in a power of the core correspond to walks in a
/// finite automaton whose states are (position mod period, letters of a
/// partially matched copy): unit-advance edges carry reward 0, and the edge
/// completing a copy carries reward 1. The limit equals `period` times the
/// maximum mean reward per letter over directed cycles, computed exactly by
/// Karp's dynamic program over walk lengths.
pub fn cyclic_copy_density(core: &CyclicWord, pattern: &FreeWord) -> Result<Rational, WordError> {
    if pattern.is_empty() {
        return Err(WordError::EmptyPattern);
    }
    let p = core.period();
    let m = pattern.len();
    let pat = pattern.letters();
    let matches: Vec<bool> = (0..p)
        .map(|i| (0..m).all(|k| core.letter_at(i + k) == pat[k]))
        .collect();

    // State indices: ring state (i, 0) -> i; copy-progress states are
    // allocated on demand. A progress state (pos, j) with j >= 1 belongs to
    // the unique copy started at pos - j (mod p).
    let mut index = vec![vec![usize::MAX; m.max(1)]; p];
    for (i, slot) in index.iter_mut().enumerate() {
        slot[0] = i;
    }
    let mut n_states = p;
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for i in 0..p {
        edges.push((i, (i + 1) % p, 0));
    }
    for start in 0..p {
        if !matches[start] {
            continue;
        }
        if m == 1 {
            edges.push((start, (start + 1) % p, 1));
            continue;
        }
        for j in 1..m {
            let pos = (start + j) % p;
            if index[pos][j] == usize::MAX {
                index[pos][j] = n_states;
                n_states += 1;
            }
        }
        edges.push((start, index[(start + 1) % p][1], 0));
        for j in 1..m - 1 {
            edges.push((index[(start + j) % p][j], index[(start + j + 1) % p][j + 1], 0));
        }
        edges.push((index[(start + m - 1) % p][m - 1], (start + m) % p, 1));
    }

    // Karp: F[k][v] = best reward over walks of exactly k edges from the
    // source; every cycle passes through the ring, so all cycles are
    // reachable from ring state 0.
    const NEG: i64 = i64::MIN / 2;
    let mut table = vec![vec![NEG; n_states]; n_states + 1];
    table[0][0] = 0;
    for k in 1..=n_states {
        for &(from, to, reward) in &edges {
            if table[k - 1][from] > NEG {
                let cand = table[k - 1][from] + reward;
                if cand > table[k][to] {
                    table[k][to] = cand;
                }
            }
        }
    }
    let mut best: Option<Rational> = None;
    for v in 0..n_states {
        if table[n_states][v] <= NEG {
            continue;
        }
        let mut v_min: Option<Rational> = None;
        for k in 0..n_states {
            if table[k][v] <= NEG {
                continue;
            }
            let mean = Rational::new(
                table[n_states][v] - table[k][v],
                (n_states - k) as i64,
            );
            if v_min.map_or(true, |cur| mean < cur) {
                v_min = Some(mean);
            }
        }
        if let Some(mean) = v_min {
            if best.map_or(true, |cur| mean > cur) {
                best = Some(mean);
            }
        }
    }
    let mu = best.expect("ring walk always reaches length n_states");
    Ok(Rational::from_integer(p as i64) * mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(text: &str) -> FreeWord {
        ab().parse_word(text).unwrap()
    }

    #[test]
    fn parse_reduces_and_round_trips() {
        assert_eq!(w("abB"), w("a"));
        assert_eq!(w(""), FreeWord::identity());
        assert_eq!(w("aA"), FreeWord::identity());
        assert_eq!(w("abAB").to_text().unwrap(), "abAB");
        assert!(matches!(
            ab().parse_word("ab1"),
            Err(WordError::BadCharacter { position: 2, .. })
        ));
        assert!(matches!(
            ab().parse_word("abc"),
            Err(WordError::LetterOutOfRange { letter: 3, .. })
        ));
    }

    #[test]
    fn reduce_cancels_nested_pairs() {
        let alphabet = ab();
        let word = alphabet.reduce(&[1, 2, -2, -1, 1]).unwrap();
        assert_eq!(word, w("a"));
        assert!(matches!(
            alphabet.reduce(&[0]),
            Err(WordError::LetterOutOfRange { letter: 0, .. })
        ));
    }

    #[test]
    fn group_laws_on_samples() {
        let samples = ["", "a", "ab", "abAB", "aabbAB", "BAba"];
        for s in samples {
            for t in samples {
                let u = w(s);
                let v = w(t);
                let prod = u.multiply(&v);
                assert_eq!(
                    prod.inverse(),
                    v.inverse().multiply(&u.inverse()),
                    "inverse anti-homomorphism on {s} {t}"
                );
                assert_eq!(u.multiply(&u.inverse()), FreeWord::identity());
            }
        }
        assert_eq!(w("ab").power(3), w("ababab"));
        assert_eq!(w("ab").power(-2), w("BABA"));
        assert_eq!(w("ab").power(0), FreeWord::identity());
    }

    #[test]
    fn cyclic_reduce_reconstructs_input() {
        for text in ["a", "ab", "abA", "aBAbA", "abAB", "bbaBB"] {
            let u = w(text);
            let (core, conj) = u.cyclic_reduce().unwrap();
            let rebuilt = core.representative().conjugate_by(&conj);
            assert_eq!(rebuilt, u, "failed on {text}");
            let rep = core.representative().letters();
            assert!(rep.first().unwrap() != &-rep.last().unwrap());
        }
        assert!(FreeWord::identity().cyclic_reduce().is_err());
    }

    #[test]
    fn cyclic_words_are_rotation_invariant() {
        let (c1, _) = w("ab").cyclic_reduce().unwrap();
        let (c2, _) = w("ba").cyclic_reduce().unwrap();
        assert_eq!(c1, c2);
        assert!(w("ab").are_conjugate(&w("Aaba")));
        assert!(!w("ab").are_conjugate(&w("aB")));
        assert!(FreeWord::identity().are_conjugate(&FreeWord::identity()));
        assert!(!w("a").are_conjugate(&FreeWord::identity()));
    }

    #[test]
    fn translation_length_is_core_length() {
        assert_eq!(FreeWord::identity().translation_length(), 0);
        assert_eq!(w("a").translation_length(), 1);
        assert_eq!(w("abA").translation_length(), 1);
        assert_eq!(w("aabAA").translation_length(), 1);
        assert_eq!(w("aab").translation_length(), 3);
    }

    #[test]
    fn primitive_roots() {
        let (root, e) = w("abab").primitive_root().unwrap();
        assert_eq!((root, e), (w("ab"), 2));
        let (root, e) = w("ab").primitive_root().unwrap();
        assert_eq!((root, e), (w("ab"), 1));
        // Conjugate power: (aba⁻¹)³ seen through its reduced spelling.
        let u = w("ab").power(3).conjugate_by(&w("b"));
        let (root, e) = u.primitive_root().unwrap();
        assert_eq!(e, 3);
        assert_eq!(root.power(3), u);
    }

    #[test]
    fn copy_counts_match_hand_values() {
        // With x = a, y = b: |xyxyx|_{xy} = 2, |xyxyx|_{xyx} = 1,
        // |xxyxy|_{yx} = 1.
        assert_eq!(w("ababa").count_copies(&w("ab")).unwrap(), 2);
        assert_eq!(w("ababa").count_copies(&w("aba")).unwrap(), 1);
        assert_eq!(w("aabab").count_copies(&w("ba")).unwrap(), 1);
        assert_eq!(w("ababa").count_copies(&w("BA")).unwrap(), 0);
        assert!(w("ab").count_copies(&FreeWord::identity()).is_err());
    }

    #[test]
    fn density_of_square_pattern_is_one_half() {
        let (core, _) = w("ab").cyclic_reduce().unwrap();
        assert_eq!(
            cyclic_copy_density(&core, &w("abab")).unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            cyclic_copy_density(&core, &w("ab")).unwrap(),
            Rational::from_integer(1)
        );
        assert_eq!(
            cyclic_copy_density(&core, &w("BA")).unwrap(),
            Rational::from_integer(0)
        );
    }

    #[test]
    fn density_handles_patterns_longer_than_period() {
        let (core, _) = w("a").cyclic_reduce().unwrap();
        assert_eq!(
            cyclic_copy_density(&core, &w("aaa")).unwrap(),
            Rational::new(1, 3)
        );
    }

    #[test]
    fn ball_enumeration_is_ordered_and_sized() {
        let alphabet = ab();
        assert_eq!(alphabet.ball_size(2), 17);
        let ball = alphabet.ball(2, 100).unwrap();
        assert_eq!(ball.len(), 17);
        let mut sorted = ball.clone();
        sorted.sort();
        assert_eq!(ball, sorted, "ball is emitted in length-lex order");
        assert!(alphabet.ball(12, 100).is_err());
    }

    #[test]
    fn mirror_condition_needs_nontrivial_input() {
        assert!(FreeWord::identity().mirror_condition().is_err());
        assert!(!w("ab").mirror_condition().unwrap());
    }

    #[test]
    fn exponent_sums() {
        let u = w("aabAB");
        assert_eq!(u.exponent_sum(1), 1);
        assert_eq!(u.exponent_sum(2), 0);
        assert!(!u.has_zero_exponent_sums(2));
        assert!(w("abAB").has_zero_exponent_sums(2));
    }
}
