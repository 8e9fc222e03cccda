//! Up, down and Hodge Laplacians in a chosen inner product, with the
//! exact/coexact splitting of the smallest positive eigenvalue.
//!
//! Kernel dimensions always come from exact ranks; the numerical eigensolve
//! is only asked for the eigenvalue just past the kernel.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::exact::{charpoly, fraction_free_rank, to_f64, Rational};
use crate::whitney::{inner_product, Geometry, InnerProduct};

/// Above this size the eigensolver switches from a dense decomposition to
/// shift-invert subspace iteration.
pub const DENSE_LIMIT: usize = 2000;

/// Symmetric generalized eigenproblem `A x = λ M x`.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub a: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

fn coboundary_f64(k: &SimplicialComplex, q: usize) -> DMatrix<f64> {
    k.coboundary(q).to_f64()
}

/// `A = dᵀ M_{q+1} d` on C^q with `d` the degree-q coboundary.
pub fn up_laplacian(k: &SimplicialComplex, q: usize, ip_q: &InnerProduct, ip_q1: Option<&InnerProduct>) -> Result<Pencil> {
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let n = k.num_cells(q);
    if ip_q.dim() != n {
        return Err(Error::ShapeMismatch(format!("Gram of size {} on C^{q} of dimension {n}", ip_q.dim())));
    }
    if q == k.dim() {
        return Ok(Pencil { a: DMatrix::zeros(n, n), m: ip_q.gram.clone() });
    }
    let ip_q1 = ip_q1.ok_or_else(|| Error::MissingParameter(format!("inner product on C^{}", q + 1)))?;
    let d = coboundary_f64(k, q);
    if ip_q1.dim() != d.nrows() {
        return Err(Error::ShapeMismatch(format!("Gram of size {} on C^{}", ip_q1.dim(), q + 1)));
    }
    let a = d.transpose() * &ip_q1.gram * &d;
    Ok(Pencil { a: symmetrize(a), m: ip_q.gram.clone() })
}

/// `A = M_q d M_{q−1}⁻¹ dᵀ M_q` on C^q with `d` the degree-(q−1) coboundary.
pub fn down_laplacian(k: &SimplicialComplex, q: usize, ip_qm1: Option<&InnerProduct>, ip_q: &InnerProduct) -> Result<Pencil> {
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let n = k.num_cells(q);
    if ip_q.dim() != n {
        return Err(Error::ShapeMismatch(format!("Gram of size {} on C^{q} of dimension {n}", ip_q.dim())));
    }
    if q == 0 {
        return Ok(Pencil { a: DMatrix::zeros(n, n), m: ip_q.gram.clone() });
    }
    let ip_qm1 = ip_qm1.ok_or_else(|| Error::MissingParameter(format!("inner product on C^{}", q - 1)))?;
    let d = coboundary_f64(k, q - 1);
    let minv = if ip_qm1.combinatorial { DMatrix::identity(d.ncols(), d.ncols()) } else { ip_qm1.inverse()? };
    let md = &ip_q.gram * &d;
    let a = &md * minv * md.transpose();
    Ok(Pencil { a: symmetrize(a), m: ip_q.gram.clone() })
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}

/// Eigenvalues (ascending) and M-orthonormal eigenvectors of a pencil.
pub fn generalized_eigen(p: &Pencil) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = p.a.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let chol = p.m.clone().cholesky().ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = symmetrize(&linv * &p.a * linv.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, linv.transpose() * y))
}

/// The `count` smallest eigenpairs by shift-invert subspace iteration.
pub fn smallest_eigen_iterative(p: &Pencil, count: usize, tol: f64) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = p.a.nrows();
    let count = count.min(n);
    if count == 0 {
        return Ok((Vec::new(), DMatrix::zeros(n, 0)));
    }
    let block = (2 * count).max(count + 4).min(n);
    let scale = p.a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mscale = p.m.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let sigma = 1e-3 * scale / mscale;
    let shifted = &p.a + &p.m * sigma;
    let chol = shifted.cholesky().ok_or_else(|| Error::Numerical("shifted pencil is not positive definite".into()))?;
    let mut x = DMatrix::from_fn(n, block, |i, j| (((i * 7919 + j * 104_729) % 1009) as f64 / 1009.0) - 0.5);
    let mut prev: Vec<f64> = vec![f64::INFINITY; count];
    for _ in 0..10_000 {
        let y = chol.solve(&(&p.m * &x));
        // Rayleigh–Ritz on span(y)
        let qr = y.qr();
        let basis = qr.q();
        let small = Pencil { a: symmetrize(basis.transpose() * &p.a * &basis), m: symmetrize(basis.transpose() * &p.m * &basis) };
        let (vals, vecs) = generalized_eigen(&small)?;
        x = &basis * vecs;
        let cur: Vec<f64> = vals[..count].to_vec();
        let done = cur.iter().zip(&prev).all(|(a, b)| (a - b).abs() <= tol * scale);
        prev = cur;
        if done {
            return Ok((prev, x.columns(0, count).into_owned()));
        }
    }
    Err(Error::Numerical("subspace iteration did not converge".into()))
}

fn eigen_auto(p: &Pencil, needed: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if p.a.nrows() <= DENSE_LIMIT {
        generalized_eigen(p)
    } else {
        smallest_eigen_iterative(p, needed, 1e-12)
    }
}

/// Exact rank of an integer sparse matrix (fraction-free elimination).
pub fn exact_rank(m: &crate::complex::SparseIntMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    fraction_free_rank(&m.to_bigint_rows())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub residual: f64,
    /// ‖Ax − λMx‖ ≤ 1e−8·‖A‖·‖x‖.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpectralSplit {
    pub degree: usize,
    pub inner: String,
    /// Smallest positive eigenvalue on exact cochains (down Laplacian).
    pub lambda1_d: Option<f64>,
    /// Smallest positive eigenvalue on coexact cochains (up Laplacian).
    pub lambda1_dstar: Option<f64>,
    pub lambda1: Option<f64>,
    /// Dimension of the harmonic space, b_q.
    pub kernel_dim: usize,
    pub up_kernel_dim: usize,
    pub down_kernel_dim: usize,
    pub up_pair: Option<Eigenpair>,
    pub down_pair: Option<Eigenpair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
}

fn certify(p: &Pencil, value: f64, x: &DVector<f64>) -> Eigenpair {
    let r = &p.a * x - &p.m * x * value;
    let residual = r.norm();
    let anorm = p.a.norm();
    Eigenpair { value, residual, certified: residual <= 1e-8 * anorm.max(f64::MIN_POSITIVE) * x.norm() }
}

fn pick(p: &Pencil, index: usize) -> Result<Option<(Eigenpair, Vec<f64>)>> {
    if index >= p.a.nrows() {
        return Ok(None);
    }
    let (vals, vecs) = eigen_auto(p, index + 1)?;
    let x = vecs.column(index).into_owned();
    Ok(Some((certify(p, vals[index], &x), vals)))
}

/// Both Laplacian pieces in degree q for the chosen inner product
/// (combinatorial when `geom` is `None`).
pub fn lambda1_split(k: &SimplicialComplex, q: usize, geom: Option<&Geometry>, full: bool) -> Result<SpectralSplit> {
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let ip_q = inner_product(k, geom, q)?;
    let ip_up = if q < k.dim() { Some(inner_product(k, geom, q + 1)?) } else { None };
    let ip_down = if q > 0 { Some(inner_product(k, geom, q - 1)?) } else { None };
    let up = up_laplacian(k, q, &ip_q, ip_up.as_ref())?;
    let down = down_laplacian(k, q, ip_down.as_ref(), &ip_q)?;
    let n = k.num_cells(q);
    let rank_up = exact_rank(&k.boundary_or_zero(q + 1));
    let rank_down = exact_rank(&k.boundary_or_zero(q));
    let up_kernel_dim = n - rank_up;
    let down_kernel_dim = n - rank_down;
    let kernel_dim = n - rank_up - rank_down;
    let up_res = pick(&up, up_kernel_dim)?;
    let down_res = pick(&down, down_kernel_dim)?;
    let lambda1_dstar = up_res.as_ref().map(|(e, _)| e.value);
    let lambda1_d = down_res.as_ref().map(|(e, _)| e.value);
    let lambda1 = match (lambda1_d, lambda1_dstar) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let spectrum = if full {
        let hodge = Pencil { a: &up.a + &down.a, m: ip_q.gram.clone() };
        Some(generalized_eigen(&hodge)?.0)
    } else {
        None
    };
    Ok(SpectralSplit {
        degree: q,
        inner: if geom.is_some() { "whitney".into() } else { "comb".into() },
        lambda1_d,
        lambda1_dstar,
        lambda1,
        kernel_dim,
        up_kernel_dim,
        down_kernel_dim,
        up_pair: up_res.map(|(e, _)| e),
        down_pair: down_res.map(|(e, _)| e),
        spectrum,
    })
}

/// Sorted nonzero eigenvalues of a pencil given its exact kernel dimension.
pub fn nonzero_spectrum(p: &Pencil, kernel_dim: usize) -> Result<Vec<f64>> {
    let (vals, _) = generalized_eigen(p)?;
    Ok(vals[kernel_dim.min(vals.len())..].to_vec())
}

/// M-orthogonal projection of `x` onto the harmonic q-cochains.
pub fn harmonic_projection(k: &SimplicialComplex, q: usize, x: &[f64], geom: Option<&Geometry>) -> Result<Vec<f64>> {
    let n = k.num_cells(q);
    if x.len() != n {
        return Err(Error::ShapeMismatch(format!("cochain of length {} in degree {q} ({n} cells)", x.len())));
    }
    let h = harmonic_basis(k, q, geom)?;
    if h.ncols() == 0 {
        return Ok(vec![0.0; n]);
    }
    let ip = inner_product(k, geom, q)?;
    let mh = &ip.gram * &h;
    let gram_h = h.transpose() * &mh;
    let rhs = mh.transpose() * DVector::from_column_slice(x);
    let coef = gram_h.cholesky().ok_or_else(|| Error::Numerical("harmonic basis is degenerate".into()))?.solve(&rhs);
    Ok((h * coef).iter().copied().collect())
}

/// Columns spanning the harmonic q-cochains: cocycles annihilated by d*.
pub fn harmonic_basis(k: &SimplicialComplex, q: usize, geom: Option<&Geometry>) -> Result<DMatrix<f64>> {
    let n = k.num_cells(q);
    let d = k.coboundary(q).to_qmatrix();
    let z: Vec<Vec<Rational>> = if d.rows() == 0 {
        (0..n).map(|i| (0..n).map(|j| Rational::from_integer(BigInt::from(i32::from(i == j)))).collect()).collect()
    } else {
        d.kernel()
    };
    let zf = DMatrix::from_fn(n, z.len(), |i, j| to_f64(&z[j][i]));
    let b = n - exact_rank(&k.boundary_or_zero(q + 1)) - exact_rank(&k.boundary_or_zero(q));
    if q == 0 || b == 0 {
        return if b == zf.ncols() { Ok(orthonormalize(zf)) } else { Ok(DMatrix::zeros(n, 0)) };
    }
    let ip = inner_product(k, geom, q)?;
    let dm = coboundary_f64(k, q - 1);
    let constraint = dm.transpose() * &ip.gram * &zf;
    // null space of the constraint, whose dimension is b exactly
    let svd = (constraint.transpose() * &constraint).symmetric_eigen();
    let mut order: Vec<usize> = (0..svd.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| svd.eigenvalues[i].total_cmp(&svd.eigenvalues[j]));
    let null = DMatrix::from_fn(zf.ncols(), b, |r, c| svd.eigenvectors[(r, order[c])]);
    Ok(orthonormalize(zf * null))
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m;
    }
    m.qr().q()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GapBound {
    pub degree: usize,
    /// Characteristic polynomial coefficients of the integer up-Laplacian, ascending.
    pub coefficients: Vec<String>,
    /// Index of the lowest nonzero coefficient (= kernel dimension).
    pub k: usize,
    /// Σ_{λ≠0} 1/λ = |a_{k+1}/a_k| as an exact fraction.
    pub inverse_sum: String,
    pub inverse_sum_f64: f64,
    /// Numerical smallest positive eigenvalue, for the certificate 1/λ₁ ≤ Σ 1/λ.
    pub lambda1: f64,
    pub certified: bool,
}

/// Exact bound 1/λ₁ ≤ Σ_{λ≠0} 1/λ from the integer characteristic polynomial
/// of ∂_{q+1}∂_{q+1}ᵀ.
pub fn charpoly_gap_bound(k: &SimplicialComplex, q: usize) -> Result<(Rational, GapBound)> {
    const MAX_CELLS: usize = 60;
    if q > k.dim() {
        return Err(Error::DegreeOutOfRange { q, lo: 0, hi: k.dim() });
    }
    let n = k.num_cells(q);
    if n > MAX_CELLS {
        return Err(Error::SizeLimit(format!("{n} cells in degree {q}; exact characteristic polynomial limited to {MAX_CELLS}")));
    }
    let b = k.boundary_or_zero(q + 1);
    let l = b.mul(&b.transpose())?;
    if l.is_zero() {
        return Err(Error::Degenerate(format!("up-Laplacian in degree {q} is zero")));
    }
    let coeffs = charpoly(&l.to_bigint_rows());
    let kk = coeffs.iter().position(|c| !c.is_zero()).expect("monic");
    let ak = &coeffs[kk];
    let ak1 = &coeffs[kk + 1];
    let bound = Rational::new(ak1.abs(), ak.abs());
    let dense = l.to_f64();
    let eig = SymmetricEigen::new(dense);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    let lambda1 = vals[kk];
    let bf = to_f64(&bound);
    Ok((
        bound.clone(),
        GapBound {
            degree: q,
            coefficients: coeffs.iter().map(ToString::to_string).collect(),
            k: kk,
            inverse_sum: bound.to_string(),
            inverse_sum_f64: bf,
            lambda1,
            certified: 1.0 / lambda1 <= bf * (1.0 + 1e-12),
        },
    ))
}
