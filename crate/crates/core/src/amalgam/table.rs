//! Finite groups given by explicit multiplication tables.

use super::AmalgamError;

/// A finite group presented as a full multiplication table over element
/// indices `0..order`. Construction checks every group axiom, so a value of
/// this type is a genuine group, with identity and inverses precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    product: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, AmalgamError> {
        let order = rows.len();
        if order == 0 {
            return Err(AmalgamError::EmptyTable);
        }
        let mut product = Vec::with_capacity(order * order);
        for (row_index, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(AmalgamError::TableNotSquare {
                    order,
                    row: row_index,
                    width: row.len(),
                });
            }
            for (col, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(AmalgamError::EntryOutOfRange {
                        row: row_index,
                        col,
                        value,
                        order,
                    });
                }
                product.push(value);
            }
        }
        let at = |x: usize, y: usize| product[x * order + y];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(AmalgamError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(order);
        for x in 0..order {
            let inv = (0..order)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or(AmalgamError::NoInverse { element: x })?;
            inverse.push(inv);
        }
        for i in 0..order {
            for j in 0..order {
                for k in 0..order {
                    if at(at(i, j), k) != at(i, at(j, k)) {
                        return Err(AmalgamError::NotAssociative { i, j, k });
                    }
                }
            }
        }
        Ok(FiniteGroupTable {
            order,
            product,
            identity,
            inverse,
        })
    }

    /// The cyclic group of order `n` on indices `0..n` with `i·j = i+j mod n`.
    pub fn cyclic(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        Self::new(rows).expect("cyclic tables satisfy the group axioms")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn product(&self, x: usize, y: usize) -> usize {
        self.product[x * self.order + y]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }
}
