//! Integral homology through the Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::{SimplicialComplex, SparseIntMatrix};
use crate::error::{Error, Result};

type IMat = Vec<Vec<BigInt>>;

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// `A = U · D · V` with U, V unimodular and D diagonal, d₁ | d₂ | ….
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
    /// Inverse of `v`; its trailing columns span the integer kernel of A.
    pub v_inv: IMat,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        diagonal(&self.d)
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn diagonal(d: &IMat) -> Vec<BigInt> {
    let k = d.len().min(d.first().map_or(0, Vec::len));
    (0..k).map(|i| d[i][i].clone()).take_while(|x| !x.is_zero()).collect()
}

struct Reducer {
    d: IMat,
    track: bool,
    u: IMat,
    v: IMat,
    v_inv: IMat,
}

impl Reducer {
    fn new(a: IMat, cols: usize, track: bool) -> Self {
        let rows = a.len();
        let (u, v, v_inv) = if track { (identity(rows), identity(cols), identity(cols)) } else { (vec![], vec![], vec![]) };
        Self { d: a, track, u, v, v_inv }
    }

    fn rows(&self) -> usize {
        self.d.len()
    }

    fn cols(&self) -> usize {
        self.d.first().map_or(0, Vec::len)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.d.swap(i, j);
        if self.track {
            for row in &mut self.u {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.d {
            row.swap(i, j);
        }
        if self.track {
            self.v.swap(i, j);
            for row in &mut self.v_inv {
                row.swap(i, j);
            }
        }
    }

    /// row_i += k · row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols() {
            let t = &self.d[j][c] * k;
            if !t.is_zero() {
                self.d[i][c] += t;
            }
        }
        if self.track {
            for row in &mut self.u {
                let t = &row[i] * k;
                row[j] -= t;
            }
        }
    }

    /// col_i += k · col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for row in &mut self.d {
            let t = &row[j] * k;
            if !t.is_zero() {
                row[i] += t;
            }
        }
        if self.track {
            let vi = self.v[i].clone();
            for (c, x) in vi.iter().enumerate() {
                let t = x * k;
                self.v[j][c] -= t;
            }
            for row in &mut self.v_inv {
                let t = &row[j] * k;
                row[i] += t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.d[i] {
            *x = -x.clone();
        }
        if self.track {
            for row in &mut self.u {
                row[i] = -row[i].clone();
            }
        }
    }

    fn smallest_in(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.d[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let limit = self.rows().min(self.cols());
        for t in 0..limit {
            let Some((pi, pj)) = self.smallest_in(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows() {
                    if self.d[i][t].is_zero() {
                        continue;
                    }
                    let q = self.d[i][t].div_floor(&self.d[t][t]);
                    self.add_row(i, t, &-q);
                    if !self.d[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..self.cols() {
                    if self.d[t][j].is_zero() {
                        continue;
                    }
                    let q = self.d[t][j].div_floor(&self.d[t][t]);
                    self.add_col(j, t, &-q);
                    if !self.d[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // bring the smallest remainder in row/column t to the pivot
                    let mut best = (t, t);
                    for i in t + 1..self.rows() {
                        if !self.d[i][t].is_zero() && self.d[i][t].abs() < self.d[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.cols() {
                        if !self.d[t][j].is_zero() && self.d[t][j].abs() < self.d[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // divisibility: every remaining entry must be a multiple of the pivot
                let p = self.d[t][t].clone();
                let bad = (t + 1..self.rows())
                    .find(|&i| (t + 1..self.cols()).any(|j| !self.d[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.d[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn to_big(a: &SparseIntMatrix) -> IMat {
    a.to_bigint_rows()
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(a: &SparseIntMatrix) -> SmithDecomposition {
    smith_normal_form_big(to_big(a), a.cols())
}

pub fn smith_normal_form_big(a: IMat, cols: usize) -> SmithDecomposition {
    let mut r = Reducer::new(a, cols, true);
    r.run();
    SmithDecomposition { u: r.u, d: r.d, v: r.v, v_inv: r.v_inv }
}

/// Invariant factors only (no transforms tracked).
pub fn invariant_factors(a: &SparseIntMatrix) -> Vec<BigInt> {
    let mut r = Reducer::new(to_big(a), a.cols(), false);
    r.run();
    diagonal(&r.d)
}

pub fn integer_rank(a: &SparseIntMatrix) -> usize {
    invariant_factors(a).len()
}

/// Betti numbers b₀..b_dim.
pub fn betti_numbers(k: &SimplicialComplex) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=k.dim() + 1).map(|q| integer_rank(&k.boundary_or_zero(q))).collect();
    (0..=k.dim()).map(|q| k.num_cells(q) - ranks[q] - ranks[q + 1]).collect()
}

/// A ℤ-basis (as columns) of the kernel of `a`, saturated in ℤⁿ.
pub fn integer_kernel_basis(a: &SparseIntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let n = a.cols();
    (r..n).map(|c| (0..n).map(|i| snf.v_inv[i][c].clone()).collect()).collect()
}

/// Invariant factors > 1 of the torsion subgroup of H_q(K; ℤ).
///
/// The image of ∂_{q+1} is rewritten in a lattice basis of ker ∂_q before the
/// Smith form is taken.
pub fn torsion_invariants(k: &SimplicialComplex, q: usize) -> Result<Vec<BigInt>> {
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let dq = k.boundary_or_zero(q);
    let up = k.boundary_or_zero(q + 1);
    if up.cols() == 0 {
        return Ok(Vec::new());
    }
    let snf = smith_normal_form(&dq);
    let r = snf.rank();
    let n = dq.cols();
    let up_big = to_big(&up);
    // coordinates of each column of ∂_{q+1} in the basis given by columns of v_inv
    let coords: IMat = (0..n)
        .map(|i| {
            (0..up.cols())
                .map(|c| (0..n).fold(BigInt::zero(), |acc, k| acc + &snf.v[i][k] * &up_big[k][c]))
                .collect()
        })
        .collect();
    if coords[..r].iter().flatten().any(|x| !x.is_zero()) {
        return Err(Error::Numerical("image of the boundary leaves the cycle lattice".into()));
    }
    let x: IMat = coords[r..].to_vec();
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let cols = up.cols();
    let mut red = Reducer::new(x, cols, false);
    red.run();
    Ok(diagonal(&red.d).into_iter().filter(|f| !f.is_one()).collect())
}

/// One row of a homology table.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HomologyRow {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<String>,
    pub torsion_order: String,
}

pub fn homology_table(k: &SimplicialComplex) -> Result<Vec<HomologyRow>> {
    let betti = betti_numbers(k);
    (0..=k.dim())
        .map(|q| {
            let t = torsion_invariants(k, q)?;
            let order = t.iter().fold(BigInt::one(), |acc, x| acc * x);
            Ok(HomologyRow {
                degree: q,
                betti: betti[q],
                torsion: t.iter().map(ToString::to_string).collect(),
                torsion_order: order.to_string(),
            })
        })
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulations;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_smith_forms() {
        let a = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(invariant_factors(&a), big(&[1, 6]));
        let b = SparseIntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&b);
        assert_eq!(s.invariant_factors(), big(&[2, 4]));
        assert_eq!(mat_mul(&mat_mul(&s.u, &s.d), &s.v), b.to_bigint_rows());
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(2));
        let id = SparseIntMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(invariant_factors(&id), big(&[1, 1, 1]));
    }

    #[test]
    fn fixture_homology() {
        assert_eq!(betti_numbers(&triangulations::tetrahedron_boundary()), vec![1, 0, 1]);
        assert_eq!(betti_numbers(&triangulations::torus7()), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&triangulations::rp2_6()), vec![1, 0, 0]);
        assert_eq!(torsion_invariants(&triangulations::rp2_6(), 1).unwrap(), big(&[2]));
        assert!(torsion_invariants(&triangulations::torus7(), 1).unwrap().is_empty());
        assert_eq!(torsion_invariants(&triangulations::klein8(), 1).unwrap(), big(&[2]));
    }

    #[test]
    fn kernel_basis_is_in_kernel() {
        let k = triangulations::torus7();
        let d1 = k.boundary_matrix(1).unwrap();
        let basis = integer_kernel_basis(&d1);
        assert_eq!(basis.len(), 21 - 6);
        let rows = d1.to_bigint_rows();
        for v in basis {
            for row in &rows {
                let s = row.iter().zip(&v).fold(BigInt::zero(), |a, (x, y)| a + x * y);
                assert!(s.is_zero());
            }
        }
    }
}
