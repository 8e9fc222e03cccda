//! Whitney-form mass matrices, cochain and chain norms, and empirical
//! comparison constants between combinatorial and Whitney norms.
//!
//! Each simplex carries the flat metric determined by its edge lengths.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::covers::Cover;
use crate::error::{Error, Result};
use crate::hyperbolic::{simplex_gram, simplex_volume, SimplexMetric};

const LENGTH_TOL: f64 = 1e-9;

/// Edge lengths of a complex, keyed by sorted vertex pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    lengths: BTreeMap<(usize, usize), f64>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Geometry {
    pub fn uniform(k: &SimplicialComplex, length: f64) -> Result<Self> {
        Self::from_edge_lengths(k, k.cells(1).iter().map(|e| ((e[0], e[1]), length)).collect())
    }

    /// Lengths for every edge of `k`; extra or missing edges are errors.
    pub fn from_edge_lengths(k: &SimplicialComplex, lengths: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let lengths: BTreeMap<_, _> = lengths.into_iter().map(|((a, b), l)| (key(a, b), l)).collect();
        for (&(a, b), &l) in &lengths {
            if k.index_of(&[a, b]).is_none() {
                return Err(Error::Geometry(format!("{a}-{b} is not an edge")));
            }
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Geometry(format!("edge {a}-{b} has length {l}")));
            }
        }
        for e in k.cells(1) {
            if !lengths.contains_key(&(e[0], e[1])) {
                return Err(Error::Geometry(format!("edge {e:?} has no length")));
            }
        }
        let g = Self { lengths };
        for s in k.top_cells() {
            simplex_gram(&g.metric(s)?)?;
        }
        Ok(g)
    }

    /// Per-top-simplex length tables (local vertex order = sorted simplex).
    /// Shared edges must agree within 1e−9.
    pub fn from_simplex_tables(k: &SimplicialComplex, tables: &[(Vec<usize>, Vec<Vec<f64>>)]) -> Result<Self> {
        let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (simplex, table) in tables {
            let mut s = simplex.clone();
            s.sort_unstable();
            if s != *simplex {
                return Err(Error::Geometry(format!("simplex {simplex:?} must be listed in increasing order")));
            }
            if k.index_of(&s).is_none() || s.len() != k.dim() + 1 {
                return Err(Error::Geometry(format!("{s:?} is not a top simplex")));
            }
            let m = SimplexMetric::new(table)?;
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    let l = m.length(i, j);
                    match lengths.get(&(s[i], s[j])) {
                        Some(&prev) if (prev - l).abs() > LENGTH_TOL * prev.max(1.0) => {
                            return Err(Error::Geometry(format!(
                                "edge {}-{} has inconsistent lengths {prev} and {l}",
                                s[i], s[j]
                            )))
                        }
                        Some(_) => {}
                        None => {
                            lengths.insert((s[i], s[j]), l);
                        }
                    }
                }
            }
        }
        Self::from_edge_lengths(k, lengths)
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.lengths.get(&key(a, b)).copied()
    }

    pub fn lengths(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.lengths
    }

    pub fn metric(&self, simplex: &[usize]) -> Result<SimplexMetric> {
        let n = simplex.len();
        let mut t = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                t[i][j] = self
                    .edge_length(simplex[i], simplex[j])
                    .ok_or_else(|| Error::Geometry(format!("no length for {}-{}", simplex[i], simplex[j])))?;
            }
        }
        SimplexMetric::new(&t)
    }

    /// Total volume of the top simplices.
    pub fn volume(&self, k: &SimplicialComplex) -> Result<f64> {
        k.top_cells().iter().map(|s| simplex_volume(&self.metric(s)?)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.lengths.values().fold(0.0, |m, &l| m.max(l))
    }

    /// Lengths of a cover pulled back along its projection.
    pub fn pullback(&self, cover: &Cover) -> Result<Self> {
        let base = cover.spec.base();
        let lengths = cover
            .complex
            .cells(1)
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let b = &base.cells(1)[cover.projection[1][i]];
                ((e[0], e[1]), self.lengths[&(b[0], b[1])])
            })
            .collect();
        Self::from_edge_lengths(&cover.complex, lengths)
    }
}

/// Symmetric positive-definite Gram matrix on C^q.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    pub degree: usize,
    pub gram: DMatrix<f64>,
    pub combinatorial: bool,
}

impl InnerProduct {
    pub fn identity(degree: usize, n: usize) -> Self {
        Self { degree, gram: DMatrix::identity(n, n), combinatorial: true }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (v.transpose() * &self.gram * &v)[(0, 0)]
    }

    /// Solves `M y = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.combinatorial {
            return Ok(b.to_vec());
        }
        let ch = self.gram.clone().cholesky().ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
        Ok(ch.solve(&DVector::from_column_slice(b)).iter().copied().collect())
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let ch = self.gram.clone().cholesky().ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
        Ok(ch.inverse())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Subsets of `0..m` of size `k`, lexicographic.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// ⟨dλ_i, dλ_j⟩ for all barycentric coordinates i, j ∈ 0..=n.
pub fn barycentric_gradient_gram(m: &SimplexMetric) -> Result<DMatrix<f64>> {
    let g = simplex_gram(m)?;
    let n = m.dim();
    let ginv = g.cholesky().ok_or_else(|| Error::Geometry("degenerate simplex".into()))?.inverse();
    let mut p = DMatrix::zeros(n, n + 1);
    for k in 0..n {
        p[(k, 0)] = -1.0;
        p[(k, k + 1)] = 1.0;
    }
    Ok(p.transpose() * ginv * p)
}

fn minor_det(g: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])]).determinant()
}

fn without(a: &[usize], k: usize) -> Vec<usize> {
    let mut v = a.to_vec();
    v.remove(k);
    v
}

/// Local mass matrix of Whitney q-forms on one simplex, indexed by the
/// lexicographic q-faces (local vertex subsets) of the simplex.
pub fn local_mass_matrix(m: &SimplexMetric, q: usize) -> Result<DMatrix<f64>> {
    let n = m.dim();
    if q > n {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: n });
    }
    let g = barycentric_gradient_gram(m)?;
    let vol = simplex_volume(m)?;
    let faces = subsets(n + 1, q + 1);
    // ∫ λ_i λ_j = vol · n! (1 + δ_ij) / (n + 2)!
    let pair = vol * factorial(n) / factorial(n + 2);
    let qf = factorial(q);
    let mut out = DMatrix::zeros(faces.len(), faces.len());
    for (ia, a) in faces.iter().enumerate() {
        for (ib, b) in faces.iter().enumerate().skip(ia) {
            let mut s = 0.0;
            for k in 0..a.len() {
                for l in 0..b.len() {
                    let integral = if a[k] == b[l] { 2.0 * pair } else { pair };
                    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
                    s += sign * integral * minor_det(&g, &without(a, k), &without(b, l));
                }
            }
            out[(ia, ib)] = qf * qf * s;
            out[(ib, ia)] = qf * qf * s;
        }
    }
    Ok(out)
}

/// Assembled Whitney mass matrix on C^q.
pub fn whitney_mass_matrix(k: &SimplicialComplex, geom: &Geometry, q: usize) -> Result<InnerProduct> {
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let nq = k.num_cells(q);
    let mut gram = DMatrix::zeros(nq, nq);
    for s in k.top_cells() {
        let local = local_mass_matrix(&geom.metric(s)?, q)?;
        let idx: Vec<usize> = subsets(s.len(), q + 1)
            .iter()
            .map(|f| k.index_of(&f.iter().map(|&i| s[i]).collect::<Vec<_>>()).expect("face"))
            .collect();
        for (a, &ga) in idx.iter().enumerate() {
            for (b, &gb) in idx.iter().enumerate() {
                gram[(ga, gb)] += local[(a, b)];
            }
        }
    }
    if gram.clone().cholesky().is_none() {
        return Err(Error::Numerical("Whitney mass matrix is not positive definite".into()));
    }
    Ok(InnerProduct { degree: q, gram, combinatorial: false })
}

/// Inner product of the requested kind for degree q.
pub fn inner_product(k: &SimplicialComplex, geom: Option<&Geometry>, q: usize) -> Result<InnerProduct> {
    match geom {
        None => Ok(InnerProduct::identity(q, k.num_cells(q))),
        Some(g) => whitney_mass_matrix(k, g, q),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormFamily {
    Comb,
    Whitney,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum P {
    One,
    Two,
    Inf,
}

impl P {
    pub fn dual(self) -> P {
        match self {
            P::One => P::Inf,
            P::Two => P::Two,
            P::Inf => P::One,
        }
    }

    pub fn parse(s: &str) -> Result<P> {
        match s {
            "1" => Ok(P::One),
            "2" => Ok(P::Two),
            "inf" | "∞" => Ok(P::Inf),
            _ => Err(Error::InvalidParameter(format!("p must be 1, 2 or inf, got {s}"))),
        }
    }
}

pub fn comb_norm(x: &[f64], p: P) -> f64 {
    match p {
        P::One => x.iter().map(|v| v.abs()).sum(),
        P::Two => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        P::Inf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

/// √(xᵀ M x).
pub fn whitney_l2(x: &[f64], ip: &InnerProduct) -> Result<f64> {
    if x.len() != ip.dim() {
        return Err(Error::ShapeMismatch(format!("cochain of length {} for Gram of size {}", x.len(), ip.dim())));
    }
    Ok(ip.quadratic(x).max(0.0).sqrt())
}

/// Dual norm of a chain: comb p′ norm, or √(cᵀ M⁻¹ c) for the Whitney L² norm.
pub fn chain_dual_norm(c: &[f64], family: NormFamily, p: P, ip: Option<&InnerProduct>) -> Result<f64> {
    match (family, p) {
        (NormFamily::Comb, p) => Ok(comb_norm(c, p.dual())),
        (NormFamily::Whitney, P::Two) => {
            let ip = ip.ok_or_else(|| Error::MissingParameter("Whitney Gram matrix".into()))?;
            if c.len() != ip.dim() {
                return Err(Error::ShapeMismatch("chain length differs from Gram size".into()));
            }
            let y = ip.solve(c)?;
            Ok(c.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
        }
        (NormFamily::Whitney, p) => {
            Err(Error::InvalidParameter(format!("dual Whitney norm is only available for p = 2, not {p:?}")))
        }
    }
}

/// Barycentric sample points with denominator `den` on an n-simplex.
pub fn barycentric_grid(n: usize, den: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(den, n + 1, &mut Vec::new(), &mut raw);
    raw.into_iter().map(|v| v.into_iter().map(|k| k as f64 / den as f64).collect()).collect()
}

/// Coefficients on the redundant basis {dλ_J : J ⊂ 0..=n, |J| = q} of the
/// Whitney form Σ_a x_a W_a at the barycentric point `lam`.
fn pointwise_coefficients(n: usize, q: usize, x_local: &[f64], lam: &[f64]) -> Vec<f64> {
    let faces = subsets(n + 1, q + 1);
    let basis = subsets(n + 1, q);
    let qf = factorial(q);
    let mut c = vec![0.0; basis.len()];
    for (a, face) in faces.iter().enumerate() {
        if x_local[a] == 0.0 {
            continue;
        }
        for k in 0..face.len() {
            let rest = without(face, k);
            let j = basis.binary_search(&rest).expect("subset");
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[j] += qf * sign * lam[face[k]] * x_local[a];
        }
    }
    c
}

fn basis_gram(g: &DMatrix<f64>, n: usize, q: usize) -> DMatrix<f64> {
    let basis = subsets(n + 1, q);
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| minor_det(g, &basis[i], &basis[j]))
}

/// Pointwise length of the Whitney form of a local cochain at `lam`.
pub fn pointwise_norm(m: &SimplexMetric, q: usize, x_local: &[f64], lam: &[f64]) -> Result<f64> {
    let n = m.dim();
    let g = barycentric_gradient_gram(m)?;
    let gb = basis_gram(&g, n, q);
    let c = DVector::from_vec(pointwise_coefficients(n, q, x_local, lam));
    Ok((c.transpose() * gb * &c)[(0, 0)].max(0.0).sqrt())
}

fn local_indices(k: &SimplicialComplex, s: &[usize], q: usize) -> Vec<usize> {
    subsets(s.len(), q + 1)
        .iter()
        .map(|f| k.index_of(&f.iter().map(|&i| s[i]).collect::<Vec<_>>()).expect("face"))
        .collect()
}

/// Sampled estimate (from below) of the sup norm of the Whitney form of `x`.
pub fn whitney_sup_estimate(k: &SimplicialComplex, geom: &Geometry, q: usize, x: &[f64], den: usize) -> Result<f64> {
    if x.len() != k.num_cells(q) {
        return Err(Error::ShapeMismatch("cochain length differs from cell count".into()));
    }
    if den == 0 {
        return Err(Error::InvalidParameter("sample denominator must be positive".into()));
    }
    let n = k.dim();
    let grid = barycentric_grid(n, den);
    let mut best: f64 = 0.0;
    for s in k.top_cells() {
        let m = geom.metric(s)?;
        let g = barycentric_gradient_gram(&m)?;
        let gb = basis_gram(&g, n, q);
        let xl: Vec<f64> = local_indices(k, s, q).iter().map(|&i| x[i]).collect();
        for lam in &grid {
            let c = DVector::from_vec(pointwise_coefficients(n, q, &xl, lam));
            best = best.max((c.transpose() * &gb * &c)[(0, 0)].max(0.0).sqrt());
        }
    }
    Ok(best)
}

/// Extreme constants with √λ_min‖x‖ ≤ ‖x‖_M ≤ √λ_max‖x‖.
pub fn norm_equivalence_constants(ip: &InnerProduct) -> Result<(f64, f64)> {
    if ip.dim() == 0 {
        return Err(Error::Degenerate("empty cochain space".into()));
    }
    let eig = SymmetricEigen::new(ip.gram.clone());
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) {
        return Err(Error::Numerical("Gram matrix is not positive definite".into()));
    }
    Ok((lo.sqrt(), hi.sqrt()))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EmpiricalConstants {
    pub degree: usize,
    /// Lower estimate of sup ‖x‖_{∞,M} / ‖x‖_{2,M}.
    pub sup_over_l2: f64,
    /// Lower estimate of sup ‖x‖_{∞,M} / ‖x‖_{∞,comb}.
    pub sup_over_comb_sup: f64,
    pub sample_denominator: usize,
    pub estimate: bool,
}

/// Sampled versions of the constants bounding the Whitney sup norm by the
/// Whitney L² norm and by the combinatorial sup norm.
pub fn empirical_sup_constants(k: &SimplicialComplex, geom: &Geometry, q: usize, den: usize) -> Result<EmpiricalConstants> {
    let ip = whitney_mass_matrix(k, geom, q)?;
    let minv = ip.inverse()?;
    let n = k.dim();
    let grid = barycentric_grid(n, den);
    let mut c_l2: f64 = 0.0;
    let mut c_comb: f64 = 0.0;
    for s in k.top_cells() {
        let m = geom.metric(s)?;
        let g = barycentric_gradient_gram(&m)?;
        let gb = basis_gram(&g, n, q);
        let sqrt_gb = {
            let e = SymmetricEigen::new(gb.clone());
            let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()));
            &e.eigenvectors * d * e.eigenvectors.transpose()
        };
        let idx = local_indices(k, s, q);
        let nl = idx.len();
        let minv_local = DMatrix::from_fn(nl, nl, |i, j| minv[(idx[i], idx[j])]);
        for lam in &grid {
            // B maps local cochains to pointwise coefficients
            let mut b = DMatrix::zeros(gb.nrows(), nl);
            for a in 0..nl {
                let mut e = vec![0.0; nl];
                e[a] = 1.0;
                let col = pointwise_coefficients(n, q, &e, lam);
                for (r, v) in col.into_iter().enumerate() {
                    b[(r, a)] = v;
                }
            }
            let t = &sqrt_gb * &b * &minv_local * b.transpose() * &sqrt_gb;
            let top = SymmetricEigen::new(t).eigenvalues.iter().copied().fold(0.0, f64::max);
            c_l2 = c_l2.max(top.max(0.0).sqrt());
            for mask in 0..(1u64 << nl) {
                let x: Vec<f64> = (0..nl).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect();
                let c = DVector::from_vec(pointwise_coefficients(n, q, &x, lam));
                c_comb = c_comb.max((c.transpose() * &gb * &c)[(0, 0)].max(0.0).sqrt());
            }
        }
    }
    Ok(EmpiricalConstants { degree: q, sup_over_l2: c_l2, sup_over_comb_sup: c_comb, sample_denominator: den, estimate: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulations;

    #[test]
    fn triangle_vertex_mass() {
        let m = SimplexMetric::uniform(2, 1.0).unwrap();
        let area = 3f64.sqrt() / 4.0;
        let local = local_mass_matrix(&m, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((local[(i, j)] - want).abs() < 1e-14);
            }
        }
        let top = local_mass_matrix(&m, 2).unwrap();
        assert!((top[(0, 0)] - 1.0 / area).abs() < 1e-12);
    }

    #[test]
    fn constant_function_norm_is_sqrt_area() {
        let k = triangulations::triangle();
        let g = Geometry::uniform(&k, 1.0).unwrap();
        let ip = whitney_mass_matrix(&k, &g, 0).unwrap();
        let area = 3f64.sqrt() / 4.0;
        assert!((whitney_l2(&[1.0, 1.0, 1.0], &ip).unwrap() - area.sqrt()).abs() < 1e-14);
        let (lo, hi) = norm_equivalence_constants(&ip).unwrap();
        assert!((lo - (area / 12.0).sqrt()).abs() < 1e-12);
        assert!((hi - (area * 4.0 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn comb_norms() {
        assert_eq!(comb_norm(&[3.0, 4.0], P::Two), 5.0);
        assert_eq!(chain_dual_norm(&[1.0, -1.0, 1.0], NormFamily::Comb, P::Inf, None).unwrap(), 3.0);
        assert!(chain_dual_norm(&[1.0], NormFamily::Whitney, P::Two, None).is_err());
        let ip = InnerProduct::identity(0, 2);
        assert_eq!(norm_equivalence_constants(&ip).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn inconsistent_tables_rejected() {
        let k = triangulations::two_triangle_disc();
        let t1 = vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0], vec![0.0; 3]];
        let t2 = vec![vec![0.0, 1.5, 1.0], vec![0.0, 0.0, 1.0], vec![0.0; 3]];
        assert!(Geometry::from_simplex_tables(&k, &[(vec![0, 1, 2], t1.clone()), (vec![1, 2, 3], t2)]).is_err());
        assert!(Geometry::from_simplex_tables(&k, &[(vec![0, 1, 2], t1.clone()), (vec![1, 2, 3], t1)]).is_ok());
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(barycentric_grid(2, 4).len(), 15);
        assert_eq!(barycentric_grid(3, 2).len(), 10);
    }
}
