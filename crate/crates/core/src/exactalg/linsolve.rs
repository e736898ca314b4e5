//! Exact sparse Gaussian elimination over the rationals.
//!
//! Columns are eliminated left to right and a column becomes a pivot exactly when it is
//! not in the span of the columns to its left. Free columns are set to zero, so the
//! returned solution depends only on the column order and never on which row was
//! picked as pivot (rows are chosen by sparsity to limit fill-in).

use std::collections::{BTreeMap, BTreeSet};

use super::Rational;

/// Outcome of an exact solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// Underdetermined; free columns were set to zero.
    Particular {
        values: Vec<Rational>,
        free_columns: Vec<usize>,
    },
    Inconsistent,
}

impl Solution {
    pub fn values(&self) -> Option<&[Rational]> {
        match self {
            Solution::Unique(v) => Some(v),
            Solution::Particular { values, .. } => Some(values),
            Solution::Inconsistent => None,
        }
    }

    pub fn into_values(self) -> Option<Vec<Rational>> {
        match self {
            Solution::Unique(v) => Some(v),
            Solution::Particular { values, .. } => Some(values),
            Solution::Inconsistent => None,
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self, Solution::Inconsistent)
    }
}

/// Row-oriented sparse system `A x = b`.
#[derive(Clone, Debug, Default)]
pub struct SparseSystem {
    ncols: usize,
    rows: Vec<BTreeMap<usize, Rational>>,
    rhs: Vec<Rational>,
}

impl SparseSystem {
    pub fn new(ncols: usize) -> Self {
        SparseSystem {
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, entries: BTreeMap<usize, Rational>, rhs: Rational) {
        debug_assert!(entries.keys().all(|c| *c < self.ncols));
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.rows.push(entries);
        self.rhs.push(rhs);
    }

    pub fn from_dense(a: &[Vec<Rational>], b: &[Rational]) -> Self {
        assert_eq!(a.len(), b.len(), "row count mismatch");
        let ncols = a.first().map_or(0, Vec::len);
        let mut sys = SparseSystem::new(ncols);
        for (row, rhs) in a.iter().zip(b) {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let entries = row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect();
            sys.push_row(entries, rhs.clone());
        }
        sys
    }

    /// Exact residual `A x - b`.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let ax: Rational = row.iter().map(|(j, a)| a * &x[*j]).sum();
                ax - b
            })
            .collect()
    }

    pub fn solve(&self) -> Solution {
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        let mut by_col: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.ncols];
        for (r, row) in rows.iter().enumerate() {
            for c in row.keys() {
                by_col[*c].insert(r);
            }
        }
        let mut used = vec![false; rows.len()];
        let mut pivots: Vec<(usize, usize)> = Vec::new();

        for col in 0..self.ncols {
            let candidates: Vec<usize> = by_col[col].iter().copied().filter(|r| !used[*r]).collect();
            let Some(&pivot_row) = candidates.iter().min_by_key(|r| (rows[**r].len(), **r)) else {
                continue;
            };
            used[pivot_row] = true;
            pivots.push((col, pivot_row));
            let pivot_entries: Vec<(usize, Rational)> = rows[pivot_row]
                .iter()
                .map(|(c, v)| (*c, v.clone()))
                .collect();
            let pivot_val = rows[pivot_row][&col].clone();
            let pivot_rhs = rhs[pivot_row].clone();
            for r in candidates {
                if r == pivot_row {
                    continue;
                }
                let factor = &rows[r][&col] / &pivot_val;
                for (c, v) in &pivot_entries {
                    let delta = v * &factor;
                    let row = &mut rows[r];
                    let now_zero = match row.get_mut(c) {
                        Some(e) => {
                            *e -= &delta;
                            e.is_zero()
                        }
                        None => {
                            row.insert(*c, -delta);
                            by_col[*c].insert(r);
                            false
                        }
                    };
                    if now_zero {
                        row.remove(c);
                        by_col[*c].remove(&r);
                    }
                }
                let d = &pivot_rhs * &factor;
                rhs[r] -= &d;
            }
        }

        if rows
            .iter()
            .zip(&rhs)
            .zip(&used)
            .any(|((row, b), u)| !*u && row.is_empty() && !b.is_zero())
        {
            return Solution::Inconsistent;
        }

        let mut x = vec![Rational::zero(); self.ncols];
        for &(col, r) in pivots.iter().rev() {
            let row = &rows[r];
            let mut acc = rhs[r].clone();
            for (c, v) in row.range(col + 1..) {
                if !x[*c].is_zero() {
                    acc -= &(v * &x[*c]);
                }
            }
            x[col] = acc / &row[&col];
        }

        debug_assert!(self.residual(&x).iter().all(Rational::is_zero));
        if pivots.len() == self.ncols {
            Solution::Unique(x)
        } else {
            let pivot_cols: BTreeSet<usize> = pivots.iter().map(|(c, _)| *c).collect();
            let free_columns = (0..self.ncols).filter(|c| !pivot_cols.contains(c)).collect();
            Solution::Particular {
                values: x,
                free_columns,
            }
        }
    }
}

/// Dense front end: solves `A x = b` exactly and re-checks the residual.
pub fn solve_linear_exact(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let sys = SparseSystem::from_dense(a, b);
    let sol = sys.solve();
    if let Some(x) = sol.values() {
        assert!(
            sys.residual(x).iter().all(Rational::is_zero),
            "exact solve produced a nonzero residual"
        );
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q;
    use proptest::prelude::*;

    #[test]
    fn identity_returns_rhs() {
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let b = vec![q(12, 7), q(-3, 7)];
        assert_eq!(solve_linear_exact(&a, &b), Solution::Unique(b.clone()));
    }

    #[test]
    fn underdetermined_prefers_leftmost_pivot() {
        let a = vec![vec![q(1, 1), q(1, 1)]];
        let sol = solve_linear_exact(&a, &[q(1, 1)]);
        assert_eq!(
            sol,
            Solution::Particular {
                values: vec![q(1, 1), q(0, 1)],
                free_columns: vec![1]
            }
        );
    }

    #[test]
    fn overdetermined_contradiction_is_flagged() {
        let a = vec![vec![q(1, 1)], vec![q(2, 1)]];
        assert!(solve_linear_exact(&a, &[q(1, 1), q(3, 1)]).is_inconsistent());
    }

    #[test]
    fn consistent_redundant_rows() {
        let a = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        let sol = solve_linear_exact(&a, &[q(3, 1), q(6, 1)]);
        assert_eq!(sol.values().unwrap(), &[q(3, 1), q(0, 1)]);
    }

    #[test]
    fn dependent_left_column_is_free() {
        // column 0 is zero, column 2 = column 1
        let a = vec![
            vec![q(0, 1), q(1, 1), q(1, 1)],
            vec![q(0, 1), q(2, 1), q(2, 1)],
        ];
        let sol = solve_linear_exact(&a, &[q(5, 1), q(10, 1)]);
        assert_eq!(
            sol,
            Solution::Particular {
                values: vec![q(0, 1), q(5, 1), q(0, 1)],
                free_columns: vec![0, 2]
            }
        );
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn solutions_have_exact_zero_residual(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in proptest::collection::vec(small_rational(), 36),
            xs in proptest::collection::vec(small_rational(), 6),
        ) {
            let a: Vec<Vec<Rational>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[i * 6 + j].clone()).collect())
                .collect();
            // consistent by construction
            let b: Vec<Rational> = a
                .iter()
                .map(|row| row.iter().zip(&xs).map(|(a, x)| a * x).sum())
                .collect();
            let sys = SparseSystem::from_dense(&a, &b);
            let sol = sys.solve();
            let x = sol.values().expect("consistent system");
            prop_assert!(sys.residual(x).iter().all(Rational::is_zero));
        }
    }
}
