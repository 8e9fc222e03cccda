//! Exact two-phase simplex method over ℚ (Bland's rule), for small LPs
//! `min cᵀx  s.t.  A x = b, x ≥ 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
}

struct Tableau {
    /// m rows of length `cols + 1`; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in &mut self.rows[r] {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimises `cost · x` over columns with `allowed[col]`.
    fn optimise(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<()> {
        for _ in 0..1_000_000 {
            // reduced cost of column j: c_j − Σ_i c_{B_i} a_ij
            let entering = (0..self.cols).filter(|&j| allowed[j] && !self.basis.contains(&j)).find(|&j| {
                let mut red = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        red -= &cost[self.basis[i]] * &row[j];
                    }
                }
                red.is_negative()
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Numerical("linear program is unbounded".into()));
            };
            self.pivot(r, c);
        }
        Err(Error::Numerical("simplex iteration limit reached".into()))
    }
}

/// Solves `min cᵀx, A x = b, x ≥ 0` exactly.
pub fn minimize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch("LP dimensions disagree".into()));
    }
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rational> = a[i].iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..cols).collect(), cols };
    let phase1: Vec<Rational> = (0..cols).map(|j| if j >= n { Rational::one() } else { Rational::zero() }).collect();
    t.optimise(&phase1, &vec![true; cols])?;
    let infeasibility: Rational = t.rows.iter().zip(&t.basis).filter(|(_, &bi)| bi >= n).map(|(r, _)| r[cols].clone()).sum();
    if infeasibility.is_positive() {
        return Err(Error::Numerical("linear program is infeasible".into()));
    }
    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    let allowed: Vec<bool> = (0..cols).map(|j| j < n).collect();
    t.optimise(&cost, &allowed)?;
    let mut x = vec![Rational::zero(); n];
    for (row, &bi) in t.rows.iter().zip(&t.basis) {
        if bi < n {
            x[bi] = row[cols].clone();
        }
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn small_program() {
        // min x + y  s.t. x + 2y = 4, x - y = 1  → x = 2, y = 1
        let a = vec![vec![q(1), q(2)], vec![q(1), q(-1)]];
        let s = minimize(&[q(1), q(1)], &a, &[q(4), q(1)]).unwrap();
        assert_eq!(s.x, vec![q(2), q(1)]);
        assert_eq!(s.objective, q(3));
    }

    #[test]
    fn picks_cheaper_column() {
        // min 3a + b  s.t. a + b = 2
        let s = minimize(&[q(3), q(1)], &[vec![q(1), q(1)]], &[q(2)]).unwrap();
        assert_eq!(s.x, vec![q(0), q(2)]);
    }

    #[test]
    fn infeasible_and_redundant() {
        assert!(minimize(&[q(1)], &[vec![q(1)]], &[q(-1)]).is_err());
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        let s = minimize(&[q(1), q(2)], &a, &[q(1), q(2)]).unwrap();
        assert_eq!(s.objective, q(1));
    }
}
