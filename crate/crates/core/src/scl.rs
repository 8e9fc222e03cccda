//! Filling pipeline: closed edge paths from adjacency words, rational
//! null-homology, least-norm bounding 2-chains and the resulting Euler
//! characteristic bounds.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::covers::Cover;
use crate::error::{Error, Result};
use crate::exact::{bareiss_det, lcm_of_denominators, to_f64, QMatrix, Rational};
use crate::lp;
use crate::spectra::lambda1_split;
use crate::whitney::{inner_product, Geometry};

fn rz() -> Rational {
    Rational::zero()
}

fn ri(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Checks that an integer 1-chain is a cycle.
pub fn check_cycle(k: &SimplicialComplex, f: &[i64]) -> Result<()> {
    if f.len() != k.num_cells(1) {
        return Err(Error::ShapeMismatch(format!("chain of length {} for {} edges", f.len(), k.num_cells(1))));
    }
    if k.boundary_or_zero(1).mul_vec_i64(f).iter().any(|&v| v != 0) {
        return Err(Error::NotACycle);
    }
    Ok(())
}

fn add_edge(k: &SimplicialComplex, chain: &mut [i64], from: usize, to: usize) {
    if from == to {
        return;
    }
    let (a, b, s) = if from < to { (from, to, 1) } else { (to, from, -1) };
    let e = k.index_of(&[a, b]).expect("vertices of one tile span an edge");
    chain[e] += s;
}

/// Closed edge path following a word of adjacency labels through the tiles of
/// a cover, starting at the lift of `base_vertex` in tile (first cell, `sheet`).
/// At most one edge is used inside each traversed tile.
pub fn cycle_from_word(cover: &Cover, word: &[usize], base_vertex: usize, sheet: usize) -> Result<Vec<i64>> {
    let k = &cover.complex;
    let mut chain = vec![0i64; k.num_cells(1)];
    let Some(&first) = word.first() else {
        return Ok(chain);
    };
    let spec = &cover.spec;
    if sheet >= spec.degree() {
        return Err(Error::InvalidParameter(format!("sheet {sheet} out of range")));
    }
    let (cell, _) = spec.label_endpoints(first).ok_or(Error::BadLabel { label: first, tile: 0 })?;
    let start = spec.tile(cell, sheet);
    let base_cell = &spec.base().top_cells()[cell];
    if !base_cell.contains(&base_vertex) {
        return Err(Error::InvalidParameter(format!("vertex {base_vertex} is not in top cell {base_cell:?}")));
    }
    let p0 = cover.lift_in_tile(&[base_vertex], start)[0];
    let mut p = p0;
    let mut tile = start;
    for &label in word {
        let facet = cover.crossing_facet(tile, label)?;
        if !facet.contains(&p) {
            let target = facet[0];
            add_edge(k, &mut chain, p, target);
            p = target;
        }
        tile = spec.apply_label(tile, label)?;
    }
    if tile != start {
        return Err(Error::OpenPath { start, end: tile });
    }
    add_edge(k, &mut chain, p, p0);
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq)]
pub enum NullWitness {
    /// Rational 2-chain x with ∂x = f.
    Filling(Vec<Rational>),
    /// Functional y with yᵀ∂ = 0 and y·f ≠ 0.
    Obstruction(Vec<Rational>),
}

/// Decides whether `f` bounds over ℚ and returns a witness either way.
pub fn rationally_null(k: &SimplicialComplex, f: &[i64]) -> Result<(bool, NullWitness)> {
    check_cycle(k, f)?;
    let d2 = k.boundary_or_zero(2).to_qmatrix();
    let rhs: Vec<Rational> = f.iter().map(|&v| ri(v)).collect();
    if d2.cols() == 0 {
        if f.iter().all(|&v| v == 0) {
            return Ok((true, NullWitness::Filling(Vec::new())));
        }
    } else if let Some(x) = d2.solve(&rhs) {
        return Ok((true, NullWitness::Filling(x)));
    }
    let left = if d2.cols() == 0 {
        (0..f.len()).map(|i| (0..f.len()).map(|j| if i == j { Rational::one() } else { rz() }).collect()).collect()
    } else {
        d2.transpose().kernel()
    };
    let y = left
        .into_iter()
        .find(|y: &Vec<Rational>| y.iter().zip(&rhs).map(|(a, b)| a * b).sum::<Rational>() != rz())
        .ok_or_else(|| Error::Numerical("no obstruction found for a non-bounding cycle".into()))?;
    Ok((false, NullWitness::Obstruction(y)))
}

/// Solves `A n = b` for unimodular integer `A` by Cramer's rule.
pub fn free_part_coefficients(a: &[Vec<i64>], b: &[i64]) -> Result<Vec<BigInt>> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(Error::ShapeMismatch("intersection matrix must be square and match b".into()));
    }
    let big: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let det = bareiss_det(&big);
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular(det));
    }
    Ok((0..n)
        .map(|r| {
            let mut ar = big.clone();
            for (row, &bi) in ar.iter_mut().zip(b) {
                row[r] = BigInt::from(bi);
            }
            bareiss_det(&ar) * &det
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FillingCertificate {
    pub f: Vec<i64>,
    pub g: Vec<Rational>,
    pub m: BigInt,
    /// ‖m·g‖₁ (combinatorial).
    pub one_norm: BigInt,
    pub chi_bound: BigInt,
    /// Squared norm of g in the chain norm of the inner product used.
    pub g_norm_sq: f64,
    pub f_norm_sq: f64,
    /// Σ |f_i|·length(e_i), with unit lengths when no geometry is given.
    pub length: f64,
    pub inner: String,
    pub method: String,
    pub delta: f64,
    /// Denominator used to round the Whitney minimiser (none for exact fills).
    pub rounding_denominator: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub inner: String,
    pub method: String,
    pub f: Vec<i64>,
    pub g: Vec<String>,
    pub m: String,
    pub one_norm: String,
    pub chi_bound: String,
    pub g_norm_sq: f64,
    pub f_norm_sq: f64,
    pub length: f64,
    pub chi_over_m_over_length: f64,
    pub delta: f64,
    pub rounding_denominator: Option<u64>,
    pub boundary_exact: bool,
}

impl FillingCertificate {
    pub fn report(&self, k: &SimplicialComplex) -> CertificateReport {
        CertificateReport {
            inner: self.inner.clone(),
            method: self.method.clone(),
            f: self.f.clone(),
            g: self.g.iter().map(ToString::to_string).collect(),
            m: self.m.to_string(),
            one_norm: self.one_norm.to_string(),
            chi_bound: self.chi_bound.to_string(),
            g_norm_sq: self.g_norm_sq,
            f_norm_sq: self.f_norm_sq,
            length: self.length,
            chi_over_m_over_length: self.ratio(),
            delta: self.delta,
            rounding_denominator: self.rounding_denominator,
            boundary_exact: self.verify_boundary(k),
        }
    }

    /// (chi_bound / m) / length(f).
    pub fn ratio(&self) -> f64 {
        let c = BigRational::new(self.chi_bound.clone(), self.m.clone());
        to_f64(&c) / self.length
    }

    /// ∂g = f in exact arithmetic.
    pub fn verify_boundary(&self, k: &SimplicialComplex) -> bool {
        let bg = k.boundary_or_zero(2).mul_vec_rational(&self.g);
        bg.iter().zip(&self.f).all(|(a, &b)| *a == ri(b))
    }
}

fn chain_length(k: &SimplicialComplex, f: &[i64], geom: Option<&Geometry>) -> f64 {
    k.cells(1)
        .iter()
        .zip(f)
        .map(|(e, &c)| c.unsigned_abs() as f64 * geom.and_then(|g| g.edge_length(e[0], e[1])).unwrap_or(1.0))
        .sum()
}

fn finish(
    k: &SimplicialComplex,
    f: &[i64],
    g: Vec<Rational>,
    geom: Option<&Geometry>,
    method: &str,
    delta: f64,
    rounding: Option<u64>,
) -> Result<FillingCertificate> {
    let m = lcm_of_denominators(&g);
    let one_norm: BigInt = g.iter().map(|x| (x * Rational::from_integer(m.clone())).to_integer().abs()).sum();
    let chi_bound = &one_norm * BigInt::from(4);
    let gf: Vec<f64> = g.iter().map(to_f64).collect();
    let ff: Vec<f64> = f.iter().map(|&v| v as f64).collect();
    let (g_norm_sq, f_norm_sq) = match geom {
        None => (gf.iter().map(|v| v * v).sum(), ff.iter().map(|v| v * v).sum()),
        Some(geo) => {
            let m2 = inner_product(k, Some(geo), 2)?;
            let m1 = inner_product(k, Some(geo), 1)?;
            (dual_sq(&m2.gram, &gf)?, dual_sq(&m1.gram, &ff)?)
        }
    };
    Ok(FillingCertificate {
        f: f.to_vec(),
        g,
        m,
        one_norm,
        chi_bound,
        g_norm_sq,
        f_norm_sq,
        length: chain_length(k, f, geom),
        inner: if geom.is_some() { "whitney".into() } else { "comb".into() },
        method: method.into(),
        delta,
        rounding_denominator: rounding,
    })
}

/// cᵀ M⁻¹ c.
fn dual_sq(m: &DMatrix<f64>, c: &[f64]) -> Result<f64> {
    let ch = m.clone().cholesky().ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
    let v = DVector::from_column_slice(c);
    Ok(v.dot(&ch.solve(&v)))
}

/// Least-norm 2-chain bounding `f`. Combinatorially the minimiser
/// g = ∂ᵀy, (∂∂ᵀ)y = f is exact. For the Whitney inner product the floating
/// minimiser g = M₂∂ᵀy is projected to a rational chain with ∂g′ = f exactly
/// and ‖g′‖ ≤ (1+δ)‖g‖.
pub fn least_norm_filling(k: &SimplicialComplex, f: &[i64], geom: Option<&Geometry>, delta: f64) -> Result<FillingCertificate> {
    let (null, _) = rationally_null(k, f)?;
    if !null {
        return Err(Error::NotNullHomologous);
    }
    let d2 = k.boundary_or_zero(2);
    let Some(geo) = geom else {
        let dq = d2.to_qmatrix();
        let s = dq.mul(&dq.transpose())?;
        let rhs: Vec<Rational> = f.iter().map(|&v| ri(v)).collect();
        let y = s.solve(&rhs).ok_or(Error::NotNullHomologous)?;
        let g = dq.transpose().mul_vec(&y);
        return finish(k, f, g, None, "l2", 0.0, None);
    };
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    let m2 = inner_product(k, Some(geo), 2)?.gram;
    let d = d2.to_f64();
    let s = &d * &m2 * d.transpose();
    let ff = DVector::from_iterator(f.len(), f.iter().map(|&v| v as f64));
    let y = s.svd(true, true).solve(&ff, 1e-12).map_err(|e| Error::Numerical(e.to_string()))?;
    let g_float = &m2 * d.transpose() * y;
    let gf: Vec<f64> = g_float.iter().copied().collect();
    let target = dual_sq(&m2, &gf)?.sqrt();
    // rational particular solution plus kernel correction
    let dq = d2.to_qmatrix();
    let rhs: Vec<Rational> = f.iter().map(|&v| ri(v)).collect();
    let gp = dq.solve(&rhs).ok_or(Error::NotNullHomologous)?;
    let kernel = dq.kernel();
    let kf = DMatrix::from_fn(gp.len(), kernel.len(), |i, j| to_f64(&kernel[j][i]));
    let resid = DVector::from_iterator(gp.len(), gp.iter().zip(&gf).map(|(p, g)| g - to_f64(p)));
    let coef: Vec<f64> = if kernel.is_empty() {
        Vec::new()
    } else {
        kf.clone().svd(true, true).solve(&resid, 1e-14).map_err(|e| Error::Numerical(e.to_string()))?.iter().copied().collect()
    };
    for den in [1_000_000u64, 1_000_000_000, 1_000_000_000_000] {
        let mut g = gp.clone();
        for (z, &c) in kernel.iter().zip(&coef) {
            let r = Rational::new(BigInt::from((c * den as f64).round() as i64), BigInt::from(den));
            if r.is_zero() {
                continue;
            }
            for (gi, zi) in g.iter_mut().zip(z) {
                *gi += &r * zi;
            }
        }
        let norm = dual_sq(&m2, &g.iter().map(to_f64).collect::<Vec<_>>())?.sqrt();
        if norm <= (1.0 + delta) * target + 1e-15 * target.max(1.0) {
            return finish(k, f, g, Some(geo), "l2", delta, Some(den));
        }
    }
    Err(Error::Numerical(format!("rounded filling exceeds (1+δ) times the optimal norm for δ = {delta}")))
}

/// Filling minimising the combinatorial ℓ¹ norm, by exact linear programming.
pub fn l1_filling(k: &SimplicialComplex, f: &[i64], geom: Option<&Geometry>) -> Result<FillingCertificate> {
    let (null, _) = rationally_null(k, f)?;
    if !null {
        return Err(Error::NotNullHomologous);
    }
    let d = k.boundary_or_zero(2).to_qmatrix();
    let n = d.cols();
    let a: Vec<Vec<Rational>> = (0..d.rows())
        .map(|i| {
            let row = d.row(i);
            row.iter().cloned().chain(row.iter().map(|v| -v.clone())).collect()
        })
        .collect();
    let c = vec![Rational::one(); 2 * n];
    let rhs: Vec<Rational> = f.iter().map(|&v| ri(v)).collect();
    let sol = lp::minimize(&c, &a, &rhs)?;
    let g: Vec<Rational> = (0..n).map(|i| &sol.x[i] - &sol.x[n + i]).collect();
    finish(k, f, g, geom, "l1", 0.0, None)
}

/// Euler characteristic V − E + F of the surface carried by an integral
/// 2-chain with coefficients ±1 on its support.
pub fn support_euler_characteristic(k: &SimplicialComplex, g: &[BigInt]) -> Option<i64> {
    if g.iter().any(|x| !x.is_zero() && x.abs() != BigInt::one()) {
        return None;
    }
    let faces: Vec<&Vec<usize>> = k.cells(2).iter().zip(g).filter(|(_, x)| !x.is_zero()).map(|(c, _)| c).collect();
    let mut edges = std::collections::BTreeSet::new();
    let mut verts = std::collections::BTreeSet::new();
    for f in &faces {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            edges.insert((f[i], f[j]));
        }
        verts.extend(f.iter().copied());
    }
    Some(verts.len() as i64 - edges.len() as i64 + faces.len() as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SclReport {
    pub certificate: CertificateReport,
    pub volume: f64,
    pub volume_source: String,
    pub lambda1_dstar: f64,
    /// ((χ bound / m) / length)².
    pub lhs: f64,
    /// vol / λ₁(d*), without the unquantified constant.
    pub rhs_without_constant: f64,
    /// lhs / rhs_without_constant: the constant this instance needs.
    pub empirical_constant: f64,
}

/// Compares the filling bound with vol/λ₁ in degree 1 and reports the
/// empirical constant relating them.
pub fn scl_report(k: &SimplicialComplex, geom: Option<&Geometry>, f: &[i64], delta: f64, l1: bool) -> Result<SclReport> {
    let cert = if l1 { l1_filling(k, f, geom)? } else { least_norm_filling(k, f, geom, delta)? };
    if f.iter().all(|&v| v == 0) {
        return Err(Error::Degenerate("zero cycle has no length".into()));
    }
    let split = lambda1_split(k, 1, geom, false)?;
    let lambda = split.lambda1_dstar.ok_or_else(|| Error::Degenerate("no coexact spectrum in degree 1".into()))?;
    let (volume, volume_source) = match geom {
        Some(g) => (g.volume(k)?, "geometry".to_string()),
        None => (k.num_cells(k.dim()) as f64, "top-cell count".to_string()),
    };
    let lhs = cert.ratio().powi(2);
    let rhs = volume / lambda;
    Ok(SclReport {
        certificate: cert.report(k),
        volume,
        volume_source,
        lambda1_dstar: lambda,
        lhs,
        rhs_without_constant: rhs,
        empirical_constant: lhs / rhs,
    })
}

/// Integer entries of m·g.
pub fn scaled_integral(cert: &FillingCertificate) -> Vec<BigInt> {
    cert.g.iter().map(|x| (x * Rational::from_integer(cert.m.clone())).to_integer()).collect()
}

/// gcd of the entries of an integer chain (0 for the zero chain).
pub fn content(f: &[i64]) -> i64 {
    f.iter().fold(0i64, |a, &b| a.gcd(&b))
}

/// Rational basis of ker ∂₂ (2-cycles).
pub fn boundary_kernel(k: &SimplicialComplex) -> Vec<Vec<Rational>> {
    let d = k.boundary_or_zero(2).to_qmatrix();
    if d.cols() == 0 {
        return Vec::new();
    }
    d.kernel()
}

/// Exact product ∂₂ g.
pub fn boundary_of(k: &SimplicialComplex, g: &[Rational]) -> Vec<Rational> {
    k.boundary_or_zero(2).mul_vec_rational(g)
}

/// Dense rational matrix of ∂₂.
pub fn boundary2(k: &SimplicialComplex) -> QMatrix {
    k.boundary_or_zero(2).to_qmatrix()
}
