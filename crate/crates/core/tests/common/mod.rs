//! Reference oracles shared by the integration suites.
//!
//! Everything here recomputes library answers along an independent route —
//! iterated rewriting instead of stack reduction, exhaustive subset search
//! instead of greedy matching, explicit path enumeration instead of the
//! geodesic shortcut, literal twist enumeration instead of the counting DP,
//! and an integer matrix representation instead of normal forms. The suites
//! assert agreement; none of these helpers call the code paths they check.

#![allow(dead_code)]

use rand::Rng;
use sclcert_core::amalgam::{Side, Syllable};
use sclcert_core::{AmalgamSpec, AmalgamWord, FreeWord};
use std::collections::HashMap;

// ---------------------------------------------------------------------------
// Free-word oracles
// ---------------------------------------------------------------------------

/// Free reduction by repeatedly deleting adjacent inverse pairs until no
/// rewrite applies, instead of the single-pass stack the library uses.
pub fn oracle_reduce(letters: &[i32]) -> Vec<i32> {
    let mut current = letters.to_vec();
    loop {
        let mut next = Vec::with_capacity(current.len());
        let mut changed = false;
        let mut i = 0;
        while i < current.len() {
            if i + 1 < current.len() && current[i] == -current[i + 1] {
                i += 2;
                changed = true;
            } else {
                next.push(current[i]);
                i += 1;
            }
        }
        current = next;
        if !changed {
            return current;
        }
    }
}

/// Maximum number of pairwise disjoint occurrences of `pattern` in `host`,
/// found by branching on every occurrence (take it and jump past it, or skip
/// it), which walks every disjoint occurrence set.
pub fn oracle_max_disjoint(host: &[i32], pattern: &[i32]) -> usize {
    fn go(host: &[i32], pattern: &[i32], pos: usize) -> usize {
        if pos + pattern.len() > host.len() {
            return 0;
        }
        let skip = go(host, pattern, pos + 1);
        if host[pos..pos + pattern.len()] == *pattern {
            skip.max(1 + go(host, pattern, pos + pattern.len()))
        } else {
            skip
        }
    }
    go(host, pattern, 0)
}

/// Iterative form of [`oracle_max_disjoint`] for bulk sweeps: the Bellman
/// recurrence `best(i) = max(best(i+1), matched(i) ? 1 + best(i+m) : 0)`
/// over suffixes, with a caller-provided buffer to keep the hot loop
/// allocation-free.
pub fn oracle_max_disjoint_dp(host: &[i32], pattern: &[i32], dp: &mut Vec<i64>) -> i64 {
    let h = host.len();
    let m = pattern.len();
    if m == 0 || m > h {
        return 0;
    }
    dp.clear();
    dp.resize(h + 1, 0);
    let first = pattern[0];
    for i in (0..=h - m).rev() {
        let mut best = dp[i + 1];
        if host[i] == first && host[i + 1..i + m] == pattern[1..] {
            let taken = 1 + dp[i + m];
            if taken > best {
                best = taken;
            }
        }
        dp[i] = best;
    }
    dp[0]
}

/// Calls `visit` with every reduced word over the given rank of length at
/// most `max_len`, including the empty word, in depth-first order.
pub fn for_each_reduced_word(rank: usize, max_len: usize, visit: &mut impl FnMut(&[i32])) {
    fn go(
        letters: &[i32],
        max_len: usize,
        stack: &mut Vec<i32>,
        visit: &mut impl FnMut(&[i32]),
    ) {
        visit(stack);
        if stack.len() == max_len {
            return;
        }
        for &letter in letters {
            if stack.last() == Some(&-letter) {
                continue;
            }
            stack.push(letter);
            go(letters, max_len, stack, visit);
            stack.pop();
        }
    }
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    go(&letters, max_len, &mut Vec::with_capacity(max_len), visit);
}

/// Distance between two reduced words in the Cayley tree: both geodesics
/// from the identity share a common prefix and then diverge.
pub fn tree_distance(u: &[i32], v: &[i32]) -> usize {
    let lcp = u.iter().zip(v).take_while(|(a, b)| a == b).count();
    (u.len() - lcp) + (v.len() - lcp)
}

/// Leftmost-greedy disjoint matcher with proper fallback on mismatch, used
/// as the per-path copy counter inside [`oracle_path_infimum`].
pub struct Matcher {
    pattern: Vec<i32>,
    fail: Vec<usize>,
}

impl Matcher {
    pub fn new(pattern: &[i32]) -> Matcher {
        assert!(!pattern.is_empty());
        let mut fail = vec![0; pattern.len() + 1];
        let mut k = 0;
        for j in 1..pattern.len() {
            while k > 0 && pattern[j] != pattern[k] {
                k = fail[k];
            }
            if pattern[j] == pattern[k] {
                k += 1;
            }
            fail[j + 1] = k;
        }
        Matcher {
            pattern: pattern.to_vec(),
            fail,
        }
    }

    pub fn states(&self) -> usize {
        self.pattern.len()
    }

    /// Advances the matched-prefix length by one letter; `true` means a copy
    /// just completed, after which the state restarts (disjointness).
    pub fn step(&self, state: usize, letter: i32) -> (usize, bool) {
        let mut j = state;
        while j > 0 && self.pattern[j] != letter {
            j = self.fail[j];
        }
        if self.pattern[j] == letter {
            j += 1;
        }
        if j == self.pattern.len() {
            (0, true)
        } else {
            (j, false)
        }
    }
}

/// The vertices a bounded path around one target can visit, with their
/// adjacency, built once per target and shared across patterns.
///
/// A path from the identity to `g` of length at most `cap` can only pass
/// through vertices `u` with `|u| + d(u, g) ≤ cap`, since the two geodesic
/// halves already cost that much. Conversely every such vertex is on some
/// admissible path, so restricting to them loses nothing.
pub struct PathArena {
    letters: Vec<i32>,
    /// `next[vid * letters.len() + li]`: neighbor along a letter, or MAX if
    /// the neighbor is inadmissible.
    next: Vec<usize>,
    vertex_count: usize,
    target_id: usize,
    cap: usize,
}

impl PathArena {
    pub fn new(rank: usize, g: &FreeWord, slack: usize) -> PathArena {
        let target = g.letters().to_vec();
        let cap = target.len() + slack;
        let letters: Vec<i32> = (1..=rank as i32).flat_map(|gen| [gen, -gen]).collect();
        let deg = letters.len();

        let mut vertices: Vec<Vec<i32>> = vec![Vec::new()];
        let mut index: HashMap<Vec<i32>, usize> = HashMap::new();
        index.insert(Vec::new(), 0);
        let mut next: Vec<usize> = Vec::new();
        let mut frontier = vec![0usize];
        let mut scratch: Vec<i32> = Vec::with_capacity(cap + 1);
        while let Some(vid) = frontier.pop() {
            if next.len() < (vid + 1) * deg {
                next.resize((vid + 1) * deg, usize::MAX);
            }
            for (li, &letter) in letters.iter().enumerate() {
                scratch.clear();
                scratch.extend_from_slice(&vertices[vid]);
                if scratch.last() == Some(&-letter) {
                    scratch.pop();
                } else {
                    scratch.push(letter);
                }
                if scratch.len() + tree_distance(&scratch, &target) > cap {
                    continue;
                }
                let nid = match index.get(&scratch) {
                    Some(&nid) => nid,
                    None => {
                        let nid = vertices.len();
                        vertices.push(scratch.clone());
                        index.insert(scratch.clone(), nid);
                        frontier.push(nid);
                        nid
                    }
                };
                next[vid * deg + li] = nid;
            }
        }
        let target_id = *index.get(&target).expect("target is admissible");
        next.resize(vertices.len() * deg, usize::MAX);
        PathArena {
            letters,
            next,
            vertex_count: vertices.len(),
            target_id,
            cap,
        }
    }
}

/// Minimum of `length − copies` over every path from the identity to the
/// arena's target of length at most `|g| + slack`, where `copies` is the
/// number of disjoint pattern occurrences along the path's edge labels and
/// each copy is worth exactly one unit (the unit-weight convention: a
/// detour of `2d` extra letters buys at most `2d/|pattern| ≤ d` extra
/// copies, so it can never pay for itself and geodesics realize the
/// infimum). Dynamic programming over (vertex, matcher state) layers walks
/// every admissible path; none of the library's counting code is involved.
pub fn oracle_path_infimum(arena: &PathArena, pattern: &[i32]) -> i64 {
    let matcher = Matcher::new(pattern);
    let m = matcher.states();
    let weight = 1i64;
    let deg = arena.letters.len();

    const INF: i64 = i64::MAX / 4;
    let mut cur = vec![INF; arena.vertex_count * m];
    let mut next = vec![INF; arena.vertex_count * m];
    cur[0] = 0;
    let mut best = if arena.target_id == 0 { 0 } else { INF };
    for _ in 1..=arena.cap {
        next.iter_mut().for_each(|slot| *slot = INF);
        for vid in 0..arena.vertex_count {
            for state in 0..m {
                let cost = cur[vid * m + state];
                if cost >= INF {
                    continue;
                }
                for li in 0..deg {
                    let nid = arena.next[vid * deg + li];
                    if nid == usize::MAX {
                        continue;
                    }
                    let (nstate, completed) = matcher.step(state, arena.letters[li]);
                    let ncost = cost + 1 - if completed { weight } else { 0 };
                    let slot = nid * m + nstate;
                    if ncost < next[slot] {
                        next[slot] = ncost;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        for state in 0..m {
            let cost = cur[arena.target_id * m + state];
            if cost < best {
                best = cost;
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Amalgam oracles
// ---------------------------------------------------------------------------

/// Maximal disjoint literal occurrences of `pattern` over every spelling of
/// `host`, by enumerating all interior edge-subgroup twists explicitly:
/// spellings of a reduced word differ exactly by replacing each syllable
/// `sᵢ` with `embed(cᵢ₋₁)⁻¹ · sᵢ · embed(cᵢ)` for interior twists `cᵢ`.
pub fn oracle_amalgam_count(
    spec: &AmalgamSpec,
    host: &AmalgamWord,
    pattern: &AmalgamWord,
) -> i64 {
    let hs = host.syllables();
    let ps = pattern.syllables();
    assert!(!ps.is_empty());
    if hs.len() < ps.len() {
        return 0;
    }
    let c_order = spec.edge().order();
    let identity = spec.edge().identity();
    let interior = hs.len() - 1;
    let assignments = (c_order as u64).pow(interior as u32);

    let mut twists = vec![identity; hs.len() + 1];
    let mut spelled: Vec<Syllable> = Vec::with_capacity(hs.len());
    let mut best = 0usize;
    for code in 0..assignments {
        let mut rest = code;
        for slot in twists.iter_mut().skip(1).take(interior) {
            *slot = (rest % c_order as u64) as usize;
            rest /= c_order as u64;
        }
        spelled.clear();
        for (i, syllable) in hs.iter().enumerate() {
            let factor = spec.factor(syllable.side);
            let left = spec.embed(syllable.side, twists[i]);
            let right = spec.embed(syllable.side, twists[i + 1]);
            let element =
                factor.product(factor.product(factor.inverse(left), syllable.element), right);
            spelled.push(Syllable {
                side: syllable.side,
                element,
            });
        }
        best = best.max(max_disjoint_syllables(&spelled, ps));
        if best == hs.len() / ps.len() {
            break;
        }
    }
    best as i64
}

fn max_disjoint_syllables(host: &[Syllable], pattern: &[Syllable]) -> usize {
    fn go(host: &[Syllable], pattern: &[Syllable], pos: usize) -> usize {
        if pos + pattern.len() > host.len() {
            return 0;
        }
        let skip = go(host, pattern, pos + 1);
        if host[pos..pos + pattern.len()] == *pattern {
            skip.max(1 + go(host, pattern, pos + pattern.len()))
        } else {
            skip
        }
    }
    go(host, pattern, 0)
}

/// 2×2 integer matrices, the representation oracle for the modular-group
/// fixture: `A:1 ↦ S`, `B:1 ↦ U` with `S⁴ = U⁶ = 1` and `S² = U³`, which
/// identifies `Z4 ∗_{Z2} Z6` with `SL(2, ℤ)` — faithfully, so matrix
/// equality decides group equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);
    pub const S: Mat2 = Mat2([[0, -1], [1, 0]]);
    pub const U: Mat2 = Mat2([[0, -1], [1, 1]]);

    pub fn mul(self, other: Mat2) -> Mat2 {
        let a = self.0;
        let b = other.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn pow(self, n: usize) -> Mat2 {
        let mut out = Mat2::IDENTITY;
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

/// Image of a word under the modular-group representation.
pub fn modular_matrix(word: &AmalgamWord) -> Mat2 {
    word.syllables().iter().fold(Mat2::IDENTITY, |acc, syl| {
        let factor = match syl.side {
            Side::A => Mat2::S,
            Side::B => Mat2::U,
        };
        acc.mul(factor.pow(syl.element))
    })
}

// ---------------------------------------------------------------------------
// Seeded sampling
// ---------------------------------------------------------------------------

/// A random reduced letter sequence of exactly the requested length.
pub fn random_reduced_letters(rng: &mut impl Rng, rank: usize, len: usize) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(len);
    while out.len() < len {
        let magnitude = rng.gen_range(1..=rank as i32);
        let letter = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
        if out.last() == Some(&-letter) {
            continue;
        }
        out.push(letter);
    }
    out
}

/// A random reduced amalgam word of exactly `len` syllables: sides
/// alternate from a random start and every element avoids the embedded edge
/// subgroup.
pub fn random_amalgam_word(
    rng: &mut impl Rng,
    spec: &AmalgamSpec,
    len: usize,
) -> AmalgamWord {
    let mut side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
    let mut syllables = Vec::with_capacity(len);
    for _ in 0..len {
        let order = spec.factor(side).order();
        let element = loop {
            let candidate = rng.gen_range(0..order);
            if spec.edge_preimage(side, candidate).is_none() {
                break candidate;
            }
        };
        syllables.push(Syllable { side, element });
        side = side.other();
    }
    AmalgamWord::new(spec, syllables).expect("sampled syllables satisfy the invariants")
}

/// A cyclically reduced random amalgam word of even syllable length.
pub fn random_cyclic_amalgam_word(
    rng: &mut impl Rng,
    spec: &AmalgamSpec,
    half_len: usize,
) -> AmalgamWord {
    random_amalgam_word(rng, spec, 2 * half_len.max(1))
}

/// Respells `word` with random interior edge twists; the result is a
/// different syllable sequence for the same group element.
pub fn random_respelling(
    rng: &mut impl Rng,
    spec: &AmalgamSpec,
    word: &AmalgamWord,
) -> AmalgamWord {
    let syllables = word.syllables();
    if syllables.len() < 2 {
        return word.clone();
    }
    let order = spec.edge().order();
    let mut twists = vec![spec.edge().identity(); syllables.len() + 1];
    for slot in twists.iter_mut().skip(1).take(syllables.len() - 1) {
        *slot = rng.gen_range(0..order);
    }
    let spelled: Vec<Syllable> = syllables
        .iter()
        .enumerate()
        .map(|(i, syl)| {
            let factor = spec.factor(syl.side);
            let left = spec.embed(syl.side, twists[i]);
            let right = spec.embed(syl.side, twists[i + 1]);
            Syllable {
                side: syl.side,
                element: factor.product(factor.product(factor.inverse(left), syl.element), right),
            }
        })
        .collect();
    AmalgamWord::new(spec, spelled).expect("twisting never enters the edge subgroup")
}
