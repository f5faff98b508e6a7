//! Stable commutator length reports.
//!
//! Lower bounds come from the elementary direction of Bavard duality: a
//! homogeneous quasimorphism `φ` with defect `D(φ)` forces
//! `scl(g) ≥ |φ(g)| / (2 D(φ))`. Upper bounds come from explicit
//! commutator expressions, which are verified by multiplying them out.
//! Reports carry every number as an exact integer ratio so they serialize
//! byte-for-byte reproducibly.

use crate::amalgam::{
    double_coset_condition, is_mirror_conjugate, scl_certificate, AmalgamError, AmalgamSpec,
    AmalgamWord, DoubleCosetCheck, Side,
};
use crate::brooks::{gap_qm, homogeneous_value, homogenized_defect_upper, BrooksError, BrooksPattern};
use crate::freewords::{Alphabet, FreeWord, WordError};
use crate::{ClassifiedError, FailureClass, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SclError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Brooks(#[from] BrooksError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error("defect bound {defect} must be positive")]
    NonpositiveDefect { defect: Rational },
    #[error("a commutator expression needs a positive exponent and at least one pair")]
    MalformedExpression,
    #[error("internal: commutator expression does not multiply out to {target}")]
    ExpressionInvalid { target: String },
    #[error("internal: certified lower bound {lower} exceeds the verified upper bound {upper}")]
    BoundsInverted { lower: Rational, upper: Rational },
}

impl ClassifiedError for SclError {
    fn class(&self) -> FailureClass {
        match self {
            SclError::Word(e) => e.class(),
            SclError::Brooks(e) => e.class(),
            SclError::Amalgam(e) => e.class(),
            SclError::NonpositiveDefect { .. } | SclError::MalformedExpression => {
                FailureClass::InvalidInput
            }
            SclError::ExpressionInvalid { .. } | SclError::BoundsInverted { .. } => {
                FailureClass::InternalAssertion
            }
        }
    }
}

fn abs(value: Rational) -> Rational {
    if value < Rational::from_integer(0) {
        -value
    } else {
        value
    }
}

fn display_word(word: &FreeWord) -> String {
    if word.is_empty() {
        "1".to_string()
    } else {
        word.to_string()
    }
}

/// A verified identity `targetⁿ = ∏ [xᵢ, yᵢ]`, witnessing
/// `cl(targetⁿ) ≤ genus` and hence an upper bound for scl.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorExpression {
    target: FreeWord,
    exponent: u32,
    pairs: Vec<(FreeWord, FreeWord)>,
}

impl CommutatorExpression {
    pub fn new(
        target: FreeWord,
        exponent: u32,
        pairs: Vec<(FreeWord, FreeWord)>,
    ) -> Result<Self, SclError> {
        if exponent == 0 || pairs.is_empty() {
            return Err(SclError::MalformedExpression);
        }
        let expression = CommutatorExpression {
            target,
            exponent,
            pairs,
        };
        if !expression.holds() {
            return Err(SclError::ExpressionInvalid {
                target: display_word(&expression.target),
            });
        }
        Ok(expression)
    }

    pub fn target(&self) -> &FreeWord {
        &self.target
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn pairs(&self) -> &[(FreeWord, FreeWord)] {
        &self.pairs
    }

    pub fn genus(&self) -> usize {
        self.pairs.len()
    }

    /// Multiplies the expression out and compares with the target power.
    pub fn holds(&self) -> bool {
        let mut product = FreeWord::identity();
        for (x, y) in &self.pairs {
            product = product.multiply(&FreeWord::commutator(x, y));
        }
        product == self.target.power(self.exponent as i64)
    }

    /// `scl(target) ≤ (2·genus − 1) / (2·exponent)`: filling the expression
    /// gives a surface of that genus bounding the `exponent`-th power.
    pub fn scl_upper_bound(&self) -> Rational {
        Rational::new(
            2 * self.genus() as i64 - 1,
            2 * i64::from(self.exponent),
        )
    }

    /// The same identity conjugated: `(c t c⁻¹)ⁿ = ∏ [c xᵢ c⁻¹, c yᵢ c⁻¹]`.
    pub fn conjugate_by(&self, c: &FreeWord) -> CommutatorExpression {
        CommutatorExpression {
            target: self.target.conjugate_by(c),
            exponent: self.exponent,
            pairs: self
                .pairs
                .iter()
                .map(|(x, y)| (x.conjugate_by(c), y.conjugate_by(c)))
                .collect(),
        }
    }
}

/// Searches the radius ball for a single commutator equal to `target`,
/// scanning in length-then-lex order so the result is deterministic.
/// Elements with a nonzero exponent sum are rejected immediately — they
/// are not products of commutators at all.
pub fn genus1_search(
    alphabet: &Alphabet,
    target: &FreeWord,
    radius: usize,
    cap: usize,
) -> Result<Option<CommutatorExpression>, SclError> {
    if !target.has_zero_exponent_sums(alphabet.rank()) {
        return Ok(None);
    }
    if target.is_empty() {
        return Ok(Some(CommutatorExpression::new(
            FreeWord::identity(),
            1,
            vec![(FreeWord::identity(), FreeWord::identity())],
        )?));
    }
    let ball = alphabet.ball(radius, cap)?;
    for x in &ball {
        if x.is_empty() {
            continue;
        }
        for y in &ball {
            // A commutator of x and y has at most 2(|x| + |y|) letters.
            if y.is_empty() || 2 * (x.len() + y.len()) < target.len() {
                continue;
            }
            if &FreeWord::commutator(x, y) == target {
                return Ok(Some(CommutatorExpression::new(
                    target.clone(),
                    1,
                    vec![(x.clone(), y.clone())],
                )?));
            }
        }
    }
    Ok(None)
}

/// The elementary direction of Bavard duality:
/// `scl(g) ≥ |value| / (2 · defect_upper)`.
pub fn bavard_lower(value: Rational, defect_upper: Rational) -> Result<Rational, SclError> {
    if defect_upper <= Rational::from_integer(0) {
        return Err(SclError::NonpositiveDefect {
            defect: defect_upper,
        });
    }
    Ok(abs(value) / (Rational::from_integer(2) * defect_upper))
}

/// An exact ratio in serialized reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RatioRecord {
    fn from(value: Rational) -> Self {
        RatioRecord {
            num: *value.numer(),
            den: *value.denom(),
        }
    }
}

impl RatioRecord {
    pub fn to_rational(self) -> Rational {
        Rational::new(self.num, self.den)
    }
}

impl fmt::Display for RatioRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// One candidate quasimorphism and the lower bound it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternBound {
    pub pattern: String,
    pub homogeneous_value: RatioRecord,
    pub defect_upper: RatioRecord,
    pub lower_bound: RatioRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorRecord {
    pub x: String,
    pub y: String,
}

/// A verified commutator expression in report form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundRecord {
    pub exponent: u32,
    pub commutators: Vec<CommutatorRecord>,
    pub bound: RatioRecord,
}

/// Everything the library can certify about one free-group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SclReport {
    pub group: String,
    pub word: String,
    pub core: String,
    pub exponent_sums: Vec<i64>,
    /// Some exponent sum is nonzero: no power lies in the commutator
    /// subgroup and scl is infinite.
    pub infinite: bool,
    /// The element is conjugate to its inverse, which silences every
    /// counting bound. Never set for nontrivial free-group elements.
    pub mirror: bool,
    pub exact: Option<RatioRecord>,
    pub candidates: Vec<PatternBound>,
    pub best: Option<PatternBound>,
    pub upper: Option<UpperBoundRecord>,
}

/// Tuning for [`scl_report`].
#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Radius for the genus-one search; derived from the core length when
    /// absent.
    pub genus1_radius: Option<usize>,
    /// Guard on enumerated ball sizes.
    pub ball_cap: usize,
    /// Longest cyclic window offered as a candidate pattern.
    pub max_window: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            genus1_radius: None,
            ball_cap: 2_000_000,
            max_window: 6,
        }
    }
}

/// Builds the full certified report for a free-group element: exponent
/// sums, candidate counting quasimorphisms read off cyclic windows of the
/// core (plus the normalized gap witness), the best Bavard lower bound,
/// and a genus-one upper bound when the ball search finds one.
///
/// All certified quantities are conjugation-invariant: homogeneous values
/// are computed on the cyclic core, and the upper-bound search runs on the
/// canonical core with the resulting expression conjugated back.
pub fn scl_report(
    alphabet: &Alphabet,
    word: &FreeWord,
    options: &ReportOptions,
) -> Result<SclReport, SclError> {
    // Revalidates the letters against this alphabet.
    let word = alphabet.reduce(word.letters())?;
    let group = format!("free:{}", alphabet.rank());
    let exponent_sums: Vec<i64> = (1..=alphabet.rank())
        .map(|g| word.exponent_sum(g))
        .collect();
    let mut report = SclReport {
        group,
        word: display_word(&word),
        core: "1".to_string(),
        exponent_sums,
        infinite: false,
        mirror: false,
        exact: None,
        candidates: Vec::new(),
        best: None,
        upper: None,
    };
    if word.is_empty() {
        report.exact = Some(Rational::from_integer(0).into());
        return Ok(report);
    }
    let (core, conjugator) = word.cyclic_reduce()?;
    report.core = display_word(core.representative());
    if report.exponent_sums.iter().any(|&s| s != 0) {
        report.infinite = true;
        return Ok(report);
    }
    report.mirror = word.mirror_condition()?;

    let mut ranked: Vec<(FreeWord, PatternBound)> = Vec::new();
    if !report.mirror {
        let period = core.period();
        let mut seen = BTreeSet::new();
        for len in 2..=period.min(options.max_window) {
            for start in 0..period {
                let window = core.window(start, len);
                if !seen.insert(window.clone()) {
                    continue;
                }
                let pattern = BrooksPattern::new(window.clone())?;
                let value = homogeneous_value(&pattern, &word);
                let defect = homogenized_defect_upper(&pattern);
                ranked.push((
                    window,
                    PatternBound {
                        pattern: display_word(pattern.word()),
                        homogeneous_value: value.into(),
                        defect_upper: defect.into(),
                        lower_bound: bavard_lower(value, defect)?.into(),
                    },
                ));
            }
        }
        let descriptor = gap_qm(&word)?;
        let value = descriptor.evaluate(&word);
        let defect = descriptor.defect_upper();
        ranked.push((
            descriptor.pattern().word().clone(),
            PatternBound {
                pattern: display_word(descriptor.pattern().word()),
                homogeneous_value: value.into(),
                defect_upper: defect.into(),
                lower_bound: bavard_lower(value, defect)?.into(),
            },
        ));
    }
    // Highest certified bound wins; equal bounds go to the least pattern.
    let mut best: Option<&(FreeWord, PatternBound)> = None;
    for entry in &ranked {
        let better = match best {
            None => true,
            Some(current) => {
                let new_bound = entry.1.lower_bound.to_rational();
                let old_bound = current.1.lower_bound.to_rational();
                new_bound > old_bound || (new_bound == old_bound && entry.0 < current.0)
            }
        };
        if better {
            best = Some(entry);
        }
    }
    report.best = best
        .filter(|entry| entry.1.lower_bound.to_rational() > Rational::from_integer(0))
        .map(|entry| entry.1.clone());
    report.candidates = ranked.into_iter().map(|(_, bound)| bound).collect();

    let radius = options
        .genus1_radius
        .unwrap_or_else(|| (core.period() / 2 + 2).max(2));
    let found = match genus1_search(alphabet, core.representative(), radius, options.ball_cap) {
        Ok(found) => found,
        // The search is best-effort; an oversized ball just means no
        // verified upper bound, not a failed report.
        Err(SclError::Word(WordError::BallCapExceeded { .. })) => None,
        Err(other) => return Err(other),
    };
    if let Some(expression) = found {
        let conjugated = expression.conjugate_by(&conjugator);
        if !conjugated.holds() || conjugated.target() != &word {
            return Err(SclError::ExpressionInvalid {
                target: display_word(&word),
            });
        }
        report.upper = Some(UpperBoundRecord {
            exponent: conjugated.exponent(),
            commutators: conjugated
                .pairs()
                .iter()
                .map(|(x, y)| CommutatorRecord {
                    x: display_word(x),
                    y: display_word(y),
                })
                .collect(),
            bound: conjugated.scl_upper_bound().into(),
        });
    }
    if let (Some(best), Some(upper)) = (&report.best, &report.upper) {
        let lower = best.lower_bound.to_rational();
        let upper = upper.bound.to_rational();
        if lower > upper {
            return Err(SclError::BoundsInverted { lower, upper });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorRecord {
    pub c: usize,
    pub rotation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrittonRecord {
    pub c: usize,
    pub c_prime: usize,
    pub rotation: String,
}

/// Report form of an [`crate::amalgam::AmalgamSclCertificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub word: String,
    pub tiling_values: Vec<i64>,
    pub homogeneous_lower: RatioRecord,
    pub defect_upper: RatioRecord,
    pub scl_lower: RatioRecord,
}

/// Everything the library can certify about one element of an amalgam.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSclReport {
    pub group: String,
    pub word: String,
    /// The element is conjugate into a factor group; scl is exactly zero.
    pub torsion: bool,
    /// Conjugate to its own inverse: even powers are single commutators,
    /// so scl is exactly zero.
    pub mirror: Option<MirrorRecord>,
    pub double_coset_failure: Option<BrittonRecord>,
    pub certificate: Option<CertificateRecord>,
    pub exact: Option<RatioRecord>,
    pub lower: Option<RatioRecord>,
}

/// Builds the certified report for a cyclically reduced amalgam word.
///
/// Short words are conjugate into a factor, hence torsion with scl zero —
/// the factors are finite, so no element has infinite scl. A word
/// conjugate to its inverse has scl zero exactly: a conjugator `b` with
/// `b w b⁻¹ = w⁻¹` makes `w^{2k} = [w^k, b⁻¹]` a single commutator for
/// every `k`. Otherwise the double-coset condition is checked and, when it
/// holds, the tiling certificate pins a positive lower bound.
pub fn scl_report_amalgam(
    spec: &AmalgamSpec,
    word: &AmalgamWord,
    n_max: usize,
) -> Result<AmalgamSclReport, SclError> {
    let group = format!(
        "amalgam(|A| = {}, |B| = {}, |C| = {})",
        spec.factor(Side::A).order(),
        spec.factor(Side::B).order(),
        spec.edge().order()
    );
    let zero: RatioRecord = Rational::from_integer(0).into();
    let mut report = AmalgamSclReport {
        group,
        word: word.to_string(),
        torsion: false,
        mirror: None,
        double_coset_failure: None,
        certificate: None,
        exact: None,
        lower: None,
    };
    if word.len() < 2 {
        report.torsion = true;
        report.exact = Some(zero);
        report.lower = Some(zero);
        return Ok(report);
    }
    word.require_cyclically_reduced()
        .map_err(SclError::Amalgam)?;
    if let DoubleCosetCheck::Fails(witness) = double_coset_condition(spec, word)? {
        report.double_coset_failure = Some(BrittonRecord {
            c: witness.c,
            c_prime: witness.c_prime,
            rotation: witness.conjugate.to_string(),
        });
    }
    if let Some(witness) = is_mirror_conjugate(spec, word)? {
        report.mirror = Some(MirrorRecord {
            c: witness.c,
            rotation: witness.conjugate.to_string(),
        });
        report.exact = Some(zero);
        report.lower = Some(zero);
        return Ok(report);
    }
    if report.double_coset_failure.is_none() {
        let certificate = scl_certificate(spec, word, n_max)?;
        report.lower = Some(certificate.scl_lower.into());
        report.certificate = Some(CertificateRecord {
            word: certificate.word.to_string(),
            tiling_values: certificate.tiling_values,
            homogeneous_lower: certificate.homogeneous_lower.into(),
            defect_upper: certificate.defect_upper.into(),
            scl_lower: certificate.scl_lower.into(),
        });
    }
    Ok(report)
}
