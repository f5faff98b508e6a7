//! Reduced syllable words and Britton normal forms.
//!
//! Elements of `A ∗_C B` are written as alternating products of factor
//! elements. Two spellings of the same element differ by sliding edge
//! subgroup elements across syllable boundaries, so equality goes through a
//! canonical form: `g = t₁ t₂ ⋯ t_k · embed(head)` where each `tᵢ` is the
//! lowest-index representative of a nontrivial left coset of the edge
//! subgroup, sides alternate, and `head` lives in the edge subgroup. The
//! form is unique, and right multiplication updates it in constant time,
//! which keeps products and inverses linear in syllable length.

use super::{AmalgamError, AmalgamSpec};
use std::fmt;

/// Which free factor a syllable lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// One factor-group element tagged with its side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub side: Side,
    pub element: usize,
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.element)
    }
}

/// A reduced word: alternating sides, no identity syllables, and — except
/// for one-syllable words, which may name an edge-subgroup element directly
/// — no syllable inside the image of the edge subgroup. The empty word is
/// the identity. Reduced words of a given element all have the same length,
/// though not the same spelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmalgamWord {
    syllables: Vec<Syllable>,
}

impl AmalgamWord {
    pub fn identity() -> Self {
        AmalgamWord {
            syllables: Vec::new(),
        }
    }

    pub fn new(spec: &AmalgamSpec, syllables: Vec<Syllable>) -> Result<Self, AmalgamError> {
        let singleton = syllables.len() == 1;
        for (position, syllable) in syllables.iter().enumerate() {
            let factor = spec.factor(syllable.side);
            if syllable.element >= factor.order() {
                return Err(AmalgamError::SyllableOutOfRange {
                    position,
                    side: syllable.side,
                    element: syllable.element,
                    order: factor.order(),
                });
            }
            if syllable.element == factor.identity() {
                return Err(AmalgamError::IdentitySyllable { position });
            }
            if position > 0 && syllables[position - 1].side == syllable.side {
                return Err(AmalgamError::NotAlternating { position });
            }
            if !singleton && spec.edge_preimage(syllable.side, syllable.element).is_some() {
                return Err(AmalgamError::SyllableInEdgeSubgroup { position });
            }
        }
        Ok(AmalgamWord { syllables })
    }

    /// Builds from syllables already known to satisfy the reduced-word
    /// invariants, e.g. a rotation of a validated word.
    pub(super) fn from_reduced(syllables: Vec<Syllable>) -> Self {
        AmalgamWord { syllables }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Parses whitespace-separated `A:3 B:1` tokens; `1` or an empty string
    /// is the identity.
    pub fn parse_str(spec: &AmalgamSpec, text: &str) -> Result<Self, AmalgamError> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(AmalgamWord::identity());
        }
        let mut syllables = Vec::new();
        for (token, piece) in trimmed.split_whitespace().enumerate() {
            let bad = |message: String| AmalgamError::WordText { token, message };
            let (side_text, element_text) = piece
                .split_once(':')
                .ok_or_else(|| bad(format!("expected `A:n` or `B:n`, got {piece:?}")))?;
            let side = match side_text {
                "A" | "a" => Side::A,
                "B" | "b" => Side::B,
                other => return Err(bad(format!("unknown factor {other:?}"))),
            };
            let element = element_text
                .parse()
                .map_err(|_| bad(format!("bad element index {element_text:?}")))?;
            syllables.push(Syllable { side, element });
        }
        AmalgamWord::new(spec, syllables)
    }

    /// The inverse reduced word: syllables reversed and inverted within
    /// their factors. Reducedness is preserved because the image of the
    /// edge subgroup is closed under inversion.
    pub fn inverse(&self, spec: &AmalgamSpec) -> Self {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable {
                side: s.side,
                element: spec.factor(s.side).inverse(s.element),
            })
            .collect();
        AmalgamWord { syllables }
    }

    /// Whether first and last syllables lie in different factors, so that
    /// powers concatenate without merging. Words of length at most one
    /// count as cyclically reduced.
    pub fn is_cyclically_reduced(&self) -> bool {
        match self.syllables.len() {
            0 | 1 => true,
            n => self.syllables[0].side != self.syllables[n - 1].side,
        }
    }

    /// Guards the operations that walk cyclic structure: at least two
    /// syllables, ends in different factors (hence even length).
    pub fn require_cyclically_reduced(&self) -> Result<(), AmalgamError> {
        if self.len() < 2 {
            return Err(AmalgamError::WordTooShort { len: self.len() });
        }
        if !self.is_cyclically_reduced() {
            return Err(AmalgamError::NotCyclicallyReduced);
        }
        Ok(())
    }

    /// `n`-fold concatenation. Requires a cyclically reduced word so the
    /// copies abut without cancellation.
    pub fn power(&self, n: usize) -> Result<Self, AmalgamError> {
        self.require_cyclically_reduced()?;
        let mut syllables = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            syllables.extend_from_slice(&self.syllables);
        }
        Ok(AmalgamWord { syllables })
    }

    /// All cyclic rotations, starting with the word itself. Each rotation
    /// of a cyclically reduced word is again cyclically reduced.
    pub fn rotations(&self) -> Result<Vec<Self>, AmalgamError> {
        self.require_cyclically_reduced()?;
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            let mut syllables = Vec::with_capacity(n);
            syllables.extend_from_slice(&self.syllables[r..]);
            syllables.extend_from_slice(&self.syllables[..r]);
            out.push(AmalgamWord { syllables });
        }
        Ok(out)
    }
}

impl fmt::Display for AmalgamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, syllable) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{syllable}")?;
        }
        Ok(())
    }
}

/// The canonical form `t₁ ⋯ t_k · embed(head)`. Built only through the
/// append machine, so the invariants (alternating nontrivial coset
/// representatives, head in the edge subgroup) always hold, and structural
/// equality decides equality in the group — for words over the same
/// amalgam, which the form does not carry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    syllables: Vec<Syllable>,
    head: usize,
}

impl NormalForm {
    pub fn identity(spec: &AmalgamSpec) -> Self {
        NormalForm {
            syllables: Vec::new(),
            head: spec.edge().identity(),
        }
    }

    pub fn from_word(spec: &AmalgamSpec, word: &AmalgamWord) -> Self {
        let mut nf = NormalForm::identity(spec);
        for syllable in word.syllables() {
            nf.append(spec, syllable.side, syllable.element);
        }
        nf
    }

    /// Coset-representative syllables, left to right.
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Britton length: the number of coset-representative syllables. Every
    /// reduced word of the element whose syllables avoid the edge subgroup
    /// has exactly this many syllables.
    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    /// Trailing edge-subgroup element, as an index into the edge table.
    pub fn head(&self) -> usize {
        self.head
    }

    pub fn is_identity(&self, spec: &AmalgamSpec) -> bool {
        self.syllables.is_empty() && self.head == spec.edge().identity()
    }

    /// Right-multiplies by a factor element. At most one representative
    /// merges, so this is constant-time and never cascades.
    pub fn append(&mut self, spec: &AmalgamSpec, side: Side, element: usize) {
        let factor = spec.factor(side);
        let head_image = spec.embed(side, self.head);
        let pushed = factor.product(head_image, element);
        let merged = match self.syllables.last() {
            Some(last) if last.side == side => {
                let last = self.syllables.pop().expect("nonempty");
                factor.product(last.element, pushed)
            }
            _ => pushed,
        };
        match spec.edge_preimage(side, merged) {
            Some(c) => self.head = c,
            None => {
                self.syllables.push(Syllable {
                    side,
                    element: spec.coset_rep(side, merged),
                });
                self.head = spec.coset_tail(side, merged);
            }
        }
    }

    /// Right-multiplies by an edge-subgroup element.
    pub fn append_edge(&mut self, spec: &AmalgamSpec, c: usize) {
        self.head = spec.edge().product(self.head, c);
    }

    pub fn multiply(&self, spec: &AmalgamSpec, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for syllable in &other.syllables {
            out.append(spec, syllable.side, syllable.element);
        }
        out.append_edge(spec, other.head);
        out
    }

    pub fn inverse(&self, spec: &AmalgamSpec) -> NormalForm {
        let mut out = NormalForm {
            syllables: Vec::new(),
            head: spec.edge().inverse(self.head),
        };
        for syllable in self.syllables.iter().rev() {
            out.append(
                spec,
                syllable.side,
                spec.factor(syllable.side).inverse(syllable.element),
            );
        }
        out
    }

    /// The canonical reduced word: the head is absorbed into the last
    /// representative (staying inside its coset, hence outside the edge
    /// subgroup), a bare edge element is spelled as a single `A`-side
    /// syllable, and the identity is the empty word.
    pub fn to_word(&self, spec: &AmalgamSpec) -> AmalgamWord {
        let edge_identity = spec.edge().identity();
        if self.syllables.is_empty() {
            if self.head == edge_identity {
                return AmalgamWord::identity();
            }
            return AmalgamWord::from_reduced(vec![Syllable {
                side: Side::A,
                element: spec.embed(Side::A, self.head),
            }]);
        }
        let mut syllables = self.syllables.clone();
        if self.head != edge_identity {
            let last = syllables.last_mut().expect("nonempty");
            let factor = spec.factor(last.side);
            last.element = factor.product(last.element, spec.embed(last.side, self.head));
        }
        AmalgamWord::from_reduced(syllables)
    }
}

/// Whether two reduced words name the same group element.
pub fn words_equal(spec: &AmalgamSpec, x: &AmalgamWord, y: &AmalgamWord) -> bool {
    NormalForm::from_word(spec, x) == NormalForm::from_word(spec, y)
}

/// Evidence that `c · w · c′` equals a cyclic rotation of `w⁻¹`, which
/// collapses the separation between a word and its inverse that the
/// counting construction needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrittonWitness {
    pub c: usize,
    pub c_prime: usize,
    pub conjugate: AmalgamWord,
}

impl fmt::Display for BrittonWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "c = {}, c' = {}, rotation = {}",
            self.c, self.c_prime, self.conjugate
        )
    }
}

/// Outcome of [`double_coset_condition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DoubleCosetCheck {
    Holds,
    Fails(BrittonWitness),
}

impl DoubleCosetCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DoubleCosetCheck::Holds)
    }
}

/// Checks that no `c · w · c′` with `c, c′` in the edge subgroup equals a
/// cyclic rotation of `w⁻¹`. When the condition holds, no spelling of any
/// power of `w` contains a copy of `w⁻¹`, so the counting function on `w`
/// grows linearly along powers while its mirror term stays at zero.
pub fn double_coset_condition(
    spec: &AmalgamSpec,
    word: &AmalgamWord,
) -> Result<DoubleCosetCheck, AmalgamError> {
    word.require_cyclically_reduced()?;
    let order = spec.edge().order();
    let rotations = word.inverse(spec).rotations()?;
    for conjugate in rotations {
        let target = NormalForm::from_word(spec, &conjugate);
        for c in 0..order {
            for c_prime in 0..order {
                let mut lhs = NormalForm::identity(spec);
                lhs.append_edge(spec, c);
                for syllable in word.syllables() {
                    lhs.append(spec, syllable.side, syllable.element);
                }
                lhs.append_edge(spec, c_prime);
                if lhs == target {
                    return Ok(DoubleCosetCheck::Fails(BrittonWitness {
                        c,
                        c_prime,
                        conjugate,
                    }));
                }
            }
        }
    }
    Ok(DoubleCosetCheck::Holds)
}

/// Evidence that `w` is conjugate to `w⁻¹`: an edge-subgroup element `c`
/// and a rotation `v` of `w⁻¹` with `c · v · c⁻¹ = w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorWitness {
    pub c: usize,
    pub conjugate: AmalgamWord,
}

impl fmt::Display for MirrorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c = {}, rotation = {}", self.c, self.conjugate)
    }
}

/// Decides whether a cyclically reduced word is conjugate to its inverse.
/// Conjugacy between cyclically reduced words of length at least two is
/// realized by a cyclic rotation followed by an edge-subgroup conjugation,
/// so the finite scan is exhaustive. A positive answer forces every
/// homogeneous quasimorphism to vanish on the word.
pub fn is_mirror_conjugate(
    spec: &AmalgamSpec,
    word: &AmalgamWord,
) -> Result<Option<MirrorWitness>, AmalgamError> {
    word.require_cyclically_reduced()?;
    let target = NormalForm::from_word(spec, word);
    let order = spec.edge().order();
    for conjugate in word.inverse(spec).rotations()? {
        let middle = NormalForm::from_word(spec, &conjugate);
        for c in 0..order {
            let mut lhs = NormalForm::identity(spec);
            lhs.append_edge(spec, c);
            let lhs = lhs.multiply(spec, &middle);
            let mut rhs_tail = NormalForm::identity(spec);
            rhs_tail.append_edge(spec, spec.edge().inverse(c));
            let lhs = lhs.multiply(spec, &rhs_tail);
            if lhs == target {
                return Ok(Some(MirrorWitness { c, conjugate }));
            }
        }
    }
    Ok(None)
}
