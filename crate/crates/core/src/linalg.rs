//! Sparse Gaussian elimination over exact rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::series::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Outcome of inserting an equation into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    Pivot(usize),
    Redundant,
    Inconsistent,
}

/// Incrementally built row-echelon form of `A x = b`.
///
/// Every stored row has coefficient 1 at its pivot and only larger columns besides,
/// so back substitution in decreasing pivot order is always possible.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, (SparseRow, Rational)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `row` (with right-hand side `rhs`) against the stored pivots.
    pub fn reduce(&self, mut row: SparseRow, mut rhs: Rational) -> (SparseRow, Rational) {
        let mut cursor = 0;
        loop {
            let next = row.range(cursor..).find(|(k, _)| self.pivots.contains_key(k)).map(|(k, v)| (*k, v.clone()));
            let Some((k, f)) = next else { break };
            let (prow, prhs) = &self.pivots[&k];
            for (c, v) in prow {
                let e = row.entry(*c).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &f * prhs;
            cursor = k + 1;
        }
        (row, rhs)
    }

    pub fn insert(&mut self, row: SparseRow, rhs: Rational) -> Insert {
        let (mut row, mut rhs) = self.reduce(row, rhs);
        let Some((&p, lead)) = row.iter().next() else {
            return if rhs.is_zero() { Insert::Redundant } else { Insert::Inconsistent };
        };
        let inv = lead.recip();
        if !inv.is_one() {
            for v in row.values_mut() {
                *v *= &inv;
            }
            rhs *= &inv;
        }
        self.pivots.insert(p, (row, rhs));
        Insert::Pivot(p)
    }

    pub fn insert_homogeneous(&mut self, row: SparseRow) -> bool {
        matches!(self.insert(row, Rational::zero()), Insert::Pivot(_))
    }

    /// True when `row` lies in the span of the stored rows.
    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row.clone(), Rational::zero()).0.is_empty()
    }

    fn back_substitute(&self, mut x: Vec<Rational>, homogeneous: bool) -> Vec<Rational> {
        for (p, (row, rhs)) in self.pivots.iter().rev() {
            let mut v = if homogeneous { Rational::zero() } else { rhs.clone() };
            for (c, a) in row.range((p + 1)..) {
                if !x[*c].is_zero() {
                    v -= a * &x[*c];
                }
            }
            x[*p] = v;
        }
        x
    }

    /// A particular solution with every free variable set to zero.
    pub fn solve(&self) -> Vec<Rational> {
        self.back_substitute(vec![Rational::zero(); self.ncols], false)
    }

    /// Kernel basis of the homogeneous system, one vector per free column (ascending).
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| {
                let mut x = vec![Rational::zero(); self.ncols];
                x[f] = Rational::one();
                self.back_substitute(x, true)
            })
            .collect()
    }

    /// The stored row space in reduced row-echelon form, pivots ascending.
    pub fn reduced_rows(&self) -> Vec<SparseRow> {
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (p, (row, _)) in self.pivots.iter().rev() {
            let mut r = row.clone();
            for (q, qrow) in &done {
                if let Some(f) = r.get(q).cloned() {
                    for (c, v) in qrow {
                        let e = r.entry(*c).or_insert_with(Rational::zero);
                        *e -= &f * v;
                        if e.is_zero() {
                            r.remove(c);
                        }
                    }
                }
            }
            done.insert(*p, r);
        }
        done.into_values().collect()
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert_homogeneous(r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::int;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, int(v))).collect()
    }

    #[test]
    fn solves_and_detects_inconsistency() {
        let mut e = Echelon::new(3);
        assert_eq!(e.insert(row(&[(0, 1), (1, 1)]), int(3)), Insert::Pivot(0));
        assert_eq!(e.insert(row(&[(1, 1), (2, -1)]), int(1)), Insert::Pivot(1));
        assert_eq!(e.insert(row(&[(0, 1), (2, 1)]), int(2)), Insert::Redundant);
        let x = e.solve();
        assert_eq!(x, vec![int(2), int(1), int(0)]);
        assert_eq!(e.insert(row(&[(0, 1), (2, 1)]), int(5)), Insert::Inconsistent);
        let k = e.kernel();
        assert_eq!(k, vec![vec![int(-1), int(1), int(1)]]);
    }

    #[test]
    fn reduced_rows_are_canonical() {
        let mut e = Echelon::new(3);
        e.insert_homogeneous(row(&[(1, 2), (2, 2)]));
        e.insert_homogeneous(row(&[(0, 1), (1, 1)]));
        let r = e.reduced_rows();
        assert_eq!(r, vec![row(&[(0, 1), (2, -1)]), row(&[(1, 1), (2, 1)])]);
    }
}
