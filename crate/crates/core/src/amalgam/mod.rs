//! Amalgamated free products `A ∗_C B` of finite groups over a proper
//! common subgroup, with exact word arithmetic (Britton normal forms),
//! counting quasimorphisms over reduced syllable words, and certified
//! stable-commutator-length lower bounds.

mod counting;
mod table;
mod words;

pub use counting::{
    amalgam_homogeneous, amalgam_qm, ball_enumerate, ball_size, counting_value_amalgam,
    defect_lower_bound_amalgam, scl_certificate, AmalgamSclCertificate, HomogeneousBracket,
    AMALGAM_DEFECT_BASE, AMALGAM_DEFECT_HOMOGENIZED,
};
pub use table::FiniteGroupTable;
pub use words::{
    double_coset_condition, is_mirror_conjugate, words_equal, AmalgamWord, BrittonWitness,
    DoubleCosetCheck, MirrorWitness, NormalForm, Side, Syllable,
};

use crate::{ClassifiedError, FailureClass};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("spec line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("word text at token {token}: {message}")]
    WordText { token: usize, message: String },
    #[error("group table is empty")]
    EmptyTable,
    #[error("table of order {order} has a row {row} of width {width}")]
    TableNotSquare {
        order: usize,
        row: usize,
        width: usize,
    },
    #[error("table entry {value} at row {row}, column {col} is outside 0..{order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("product is not associative at ({i}, {j}, {k})")]
    NotAssociative { i: usize, j: usize, k: usize },
    #[error("embedding into factor {side} lists {got} images for a subgroup of order {expected}")]
    EmbeddingWrongLength {
        side: Side,
        expected: usize,
        got: usize,
    },
    #[error("embedding into factor {side} maps {element} to out-of-range image {image}")]
    EmbeddingImageOutOfRange {
        side: Side,
        element: usize,
        image: usize,
    },
    #[error("embedding into factor {side} is not injective: {x} and {y} share an image")]
    EmbeddingNotInjective { side: Side, x: usize, y: usize },
    #[error("embedding into factor {side} is not a homomorphism at ({x}, {y})")]
    EmbeddingNotHomomorphic { side: Side, x: usize, y: usize },
    #[error("edge subgroup is not proper in factor {side}; the product would collapse")]
    SubgroupNotProper { side: Side },
    #[error("syllable {position} uses element {element}, outside factor {side} of order {order}")]
    SyllableOutOfRange {
        position: usize,
        side: Side,
        element: usize,
        order: usize,
    },
    #[error("syllable {position} is the identity; reduced words drop identity syllables")]
    IdentitySyllable { position: usize },
    #[error("syllables {} and {position} lie in the same factor; reduced words alternate", position - 1)]
    NotAlternating { position: usize },
    #[error("syllable {position} lies in the edge subgroup; absorb it into a neighbour")]
    SyllableInEdgeSubgroup { position: usize },
    #[error("word has {len} syllables; this operation needs more than one")]
    WordTooShort { len: usize },
    #[error("word is not cyclically reduced: first and last syllables share a factor")]
    NotCyclicallyReduced,
    #[error("double-coset condition fails: {witness}")]
    DoubleCosetFailed { witness: BrittonWitness },
    #[error("ball of radius {radius} holds {size} elements, over the cap of {cap}")]
    BallCapExceeded { radius: usize, size: u128, cap: usize },
    #[error("internal: counting value {value} at power {n} of the base word falls below the tiling bound {n}")]
    TilingFailed { n: usize, value: i64 },
}

impl ClassifiedError for AmalgamError {
    fn class(&self) -> FailureClass {
        match self {
            AmalgamError::DoubleCosetFailed { .. } => FailureClass::HypothesisViolation,
            AmalgamError::TilingFailed { .. } => FailureClass::InternalAssertion,
            _ => FailureClass::InvalidInput,
        }
    }
}

/// Coset bookkeeping for one factor group: which elements lie in the image
/// of the edge subgroup, and the canonical (lowest-index) representative of
/// each left coset `x · embed(C)` together with the tail factor.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SideData {
    /// element -> preimage in C, when the element lies in `embed(C)`.
    preimage: Vec<Option<usize>>,
    /// element -> lowest-index member of its left coset.
    coset_rep: Vec<usize>,
    /// element -> the `t` in C with `x = rep(x) · embed(t)`.
    coset_tail: Vec<usize>,
    /// Sorted nontrivial coset representatives (the C-coset excluded).
    transversal: Vec<usize>,
}

/// A validated amalgamated free product `A ∗_C B`: both factor tables, the
/// edge subgroup table, and injective homomorphisms embedding it into each
/// factor. Properness of both embeddings is enforced, so the product is a
/// genuine amalgam acting on its Bass–Serre tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamSpec {
    factor_a: FiniteGroupTable,
    factor_b: FiniteGroupTable,
    edge: FiniteGroupTable,
    embed_a: Vec<usize>,
    embed_b: Vec<usize>,
    side_a: SideData,
    side_b: SideData,
}

impl AmalgamSpec {
    pub fn new(
        factor_a: FiniteGroupTable,
        factor_b: FiniteGroupTable,
        edge: FiniteGroupTable,
        embed_a: Vec<usize>,
        embed_b: Vec<usize>,
    ) -> Result<Self, AmalgamError> {
        let side_a = validate_embedding(Side::A, &factor_a, &edge, &embed_a)?;
        let side_b = validate_embedding(Side::B, &factor_b, &edge, &embed_b)?;
        Ok(AmalgamSpec {
            factor_a,
            factor_b,
            edge,
            embed_a,
            embed_b,
            side_a,
            side_b,
        })
    }

    pub fn factor(&self, side: Side) -> &FiniteGroupTable {
        match side {
            Side::A => &self.factor_a,
            Side::B => &self.factor_b,
        }
    }

    pub fn edge(&self) -> &FiniteGroupTable {
        &self.edge
    }

    /// Image of edge-subgroup element `c` inside the chosen factor.
    pub fn embed(&self, side: Side, c: usize) -> usize {
        match side {
            Side::A => self.embed_a[c],
            Side::B => self.embed_b[c],
        }
    }

    /// Preimage in the edge subgroup, when `x` lies in its image.
    pub fn edge_preimage(&self, side: Side, x: usize) -> Option<usize> {
        self.side(side).preimage[x]
    }

    fn side(&self, side: Side) -> &SideData {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub(super) fn coset_rep(&self, side: Side, x: usize) -> usize {
        self.side(side).coset_rep[x]
    }

    pub(super) fn coset_tail(&self, side: Side, x: usize) -> usize {
        self.side(side).coset_tail[x]
    }

    /// Sorted nontrivial left-coset representatives for one factor.
    pub fn transversal(&self, side: Side) -> &[usize] {
        &self.side(side).transversal
    }

    /// Parses the textual spec format:
    ///
    /// ```text
    /// [group A]
    /// order = 4
    /// table =
    /// 0 1 2 3
    /// 1 2 3 0
    /// 2 3 0 1
    /// 3 0 1 2
    /// [group B] ... [group C] ...
    /// [embed A]
    /// 0 2
    /// [embed B]
    /// 0 3
    /// ```
    ///
    /// `#` starts a comment; blank lines are ignored. The `[embed …]`
    /// sections list the image of every edge-subgroup element in order.
    pub fn parse_str(text: &str) -> Result<Self, AmalgamError> {
        let parsed = parse_sections(text)?;
        let order_of =
            |section: &ParsedSection| -> Result<FiniteGroupTable, AmalgamError> {
                FiniteGroupTable::new(section.rows.clone())
            };
        let table_a = order_of(parsed.require("group A")?)?;
        let table_b = order_of(parsed.require("group B")?)?;
        let table_c = order_of(parsed.require("group C")?)?;
        let embed_a = parsed.require("embed A")?.flat();
        let embed_b = parsed.require("embed B")?.flat();
        AmalgamSpec::new(table_a, table_b, table_c, embed_a, embed_b)
    }
}

fn validate_embedding(
    side: Side,
    factor: &FiniteGroupTable,
    edge: &FiniteGroupTable,
    embed: &[usize],
) -> Result<SideData, AmalgamError> {
    let c_order = edge.order();
    let n = factor.order();
    if embed.len() != c_order {
        return Err(AmalgamError::EmbeddingWrongLength {
            side,
            expected: c_order,
            got: embed.len(),
        });
    }
    for (element, &image) in embed.iter().enumerate() {
        if image >= n {
            return Err(AmalgamError::EmbeddingImageOutOfRange {
                side,
                element,
                image,
            });
        }
    }
    for x in 0..c_order {
        for y in 0..c_order {
            if x < y && embed[x] == embed[y] {
                return Err(AmalgamError::EmbeddingNotInjective { side, x, y });
            }
            if embed[edge.product(x, y)] != factor.product(embed[x], embed[y]) {
                return Err(AmalgamError::EmbeddingNotHomomorphic { side, x, y });
            }
        }
    }
    if c_order >= n {
        return Err(AmalgamError::SubgroupNotProper { side });
    }

    let mut preimage = vec![None; n];
    for (c, &image) in embed.iter().enumerate() {
        preimage[image] = Some(c);
    }
    let mut coset_rep = vec![0usize; n];
    let mut coset_tail = vec![0usize; n];
    for x in 0..n {
        let rep = (0..c_order)
            .map(|c| factor.product(x, embed[c]))
            .min()
            .expect("edge subgroup is nonempty");
        coset_rep[x] = rep;
        // x = rep · embed(tail) with tail = preimage(rep⁻¹ · x).
        let tail_image = factor.product(factor.inverse(rep), x);
        coset_tail[x] = preimage[tail_image]
            .expect("rep was chosen inside the coset x·embed(C)");
    }
    let transversal = (0..n)
        .filter(|&x| coset_rep[x] == x && preimage[x].is_none())
        .collect();
    Ok(SideData {
        preimage,
        coset_rep,
        coset_tail,
        transversal,
    })
}

struct ParsedSection {
    line: usize,
    order: Option<usize>,
    rows: Vec<Vec<usize>>,
}

impl ParsedSection {
    fn flat(&self) -> Vec<usize> {
        self.rows.iter().flatten().copied().collect()
    }
}

struct ParsedSections {
    sections: Vec<(String, ParsedSection)>,
}

impl ParsedSections {
    fn require(&self, name: &str) -> Result<&ParsedSection, AmalgamError> {
        let section = self
            .sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| AmalgamError::Parse {
                line: 0,
                message: format!("missing section [{name}]"),
            })?;
        if name.starts_with("group") {
            match section.order {
                None => {
                    return Err(AmalgamError::Parse {
                        line: section.line,
                        message: format!("section [{name}] has no `order = n` line"),
                    })
                }
                Some(order) if order != section.rows.len() => {
                    return Err(AmalgamError::Parse {
                        line: section.line,
                        message: format!(
                            "section [{name}] declares order {order} but lists {} table rows",
                            section.rows.len()
                        ),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(section)
    }
}

fn parse_sections(text: &str) -> Result<ParsedSections, AmalgamError> {
    let mut sections: Vec<(String, ParsedSection)> = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line
            .split('#')
            .next()
            .unwrap_or("")
            .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            sections.push((
                name.trim().to_string(),
                ParsedSection {
                    line: line_no,
                    order: None,
                    rows: Vec::new(),
                },
            ));
            continue;
        }
        let Some((_, section)) = sections.last_mut() else {
            return Err(AmalgamError::Parse {
                line: line_no,
                message: "content before the first [section] header".to_string(),
            });
        };
        if let Some(rest) = line.strip_prefix("order") {
            let rest = rest.trim_start();
            let Some(value) = rest.strip_prefix('=') else {
                return Err(AmalgamError::Parse {
                    line: line_no,
                    message: "expected `order = n`".to_string(),
                });
            };
            section.order = Some(value.trim().parse().map_err(|_| AmalgamError::Parse {
                line: line_no,
                message: format!("bad order value {:?}", value.trim()),
            })?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("table") {
            let rest = rest.trim_start();
            if rest.strip_prefix('=').map(str::trim) != Some("") {
                return Err(AmalgamError::Parse {
                    line: line_no,
                    message: "expected bare `table =` followed by index rows".to_string(),
                });
            }
            continue;
        }
        let row: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        match row {
            Ok(row) => section.rows.push(row),
            Err(_) => {
                return Err(AmalgamError::Parse {
                    line: line_no,
                    message: format!("expected whitespace-separated indices, got {line:?}"),
                })
            }
        }
    }
    Ok(ParsedSections { sections })
}

/// The modular group fixture `Z4 ∗_{Z2} Z6`: cyclic factors with the order-2
/// subgroup embedded as the unique involution of each. Used across the test
/// suite because the product is isomorphic to SL(2, Z), so word arithmetic
/// can be cross-checked by integer matrices.
pub fn modular_group_spec() -> AmalgamSpec {
    AmalgamSpec::new(
        FiniteGroupTable::cyclic(4),
        FiniteGroupTable::cyclic(6),
        FiniteGroupTable::cyclic(2),
        vec![0, 2],
        vec![0, 3],
    )
    .expect("the modular group data is a valid amalgam")
}

/// The infinite dihedral group `Z2 ∗_1 Z2`: the smallest amalgam, used as a
/// negative control — its alternating two-syllable word is conjugate to its
/// own inverse, so every homogeneous quasimorphism vanishes on it.
pub fn infinite_dihedral_spec() -> AmalgamSpec {
    AmalgamSpec::new(
        FiniteGroupTable::cyclic(2),
        FiniteGroupTable::cyclic(2),
        FiniteGroupTable::cyclic(1),
        vec![0],
        vec![0],
    )
    .expect("the infinite dihedral data is a valid amalgam")
}
