//! Hyperbolic-space numerics: hyperboloid distances, triangle areas, ball
//! volumes, the Sobolev constant κ_n and the Moser iteration constant.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Point on the hyperboloid ⟨x,x⟩ = −1, x₀ > 0, in ℝ^{n+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct HypPoint {
    coords: Vec<f64>,
}

pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

impl HypPoint {
    /// Accepts coordinates within 1e−9 of the hyperboloid and renormalises.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidParameter("hyperboloid point needs at least 2 coordinates".into()));
        }
        let q = minkowski(&coords, &coords);
        if coords[0] <= 0.0 || (q + 1.0).abs() > 1e-9 * coords[0] * coords[0] {
            return Err(Error::InvalidParameter(format!("{coords:?} is not on the upper hyperboloid")));
        }
        let s = (-q).sqrt();
        Ok(Self { coords: coords.into_iter().map(|c| c / s).collect() })
    }

    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    /// Point at distance `t` from the origin in the unit direction `u ∈ ℝⁿ`.
    pub fn exp_origin(u: &[f64], t: f64) -> Result<Self> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("direction must be nonzero".into()));
        }
        let mut coords = vec![t.cosh()];
        coords.extend(u.iter().map(|x| x / norm * t.sinh()));
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

pub fn hyp_distance(x: &HypPoint, y: &HypPoint) -> f64 {
    let c = (-minkowski(&x.coords, &y.coords)).max(1.0);
    c.acosh()
}

/// Area of a hyperbolic right triangle with legs a, b:
/// 2·arctan(tanh(a/2)·tanh(b/2)), tending to ab/2 for small legs.
pub fn right_triangle_area(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidParameter(format!("leg lengths must be non-negative, got {a}, {b}")));
    }
    Ok(2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atan())
}

/// Γ(m/2) for a positive integer m.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m > 0);
    if m % 2 == 0 {
        (1..m / 2).map(|k| k as f64).product()
    } else {
        // Γ(k + 1/2) = (2k−1)!! / 2^k · √π
        let k = m / 2;
        (1..=k).map(|j| (2 * j - 1) as f64 / 2.0).product::<f64>() * PI.sqrt()
    }
}

/// Volume of the unit sphere Sᵐ ⊂ ℝ^{m+1}.
pub fn sphere_volume(m: usize) -> f64 {
    2.0 * PI.powf((m + 1) as f64 / 2.0) / gamma_half(m + 1)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to relative tolerance `rel_tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, _) = gk15(f, a, b);
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    let width = b - a;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi);
        let allowed = rel_tol * whole.abs().max(f64::MIN_POSITIVE) * (hi - lo) / width;
        if err <= allowed || depth >= 50 {
            if depth >= 50 && err > allowed {
                return Err(Error::Numerical("quadrature did not converge".into()));
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    if !total.is_finite() {
        return Err(Error::Numerical("quadrature produced a non-finite value".into()));
    }
    Ok(total)
}

/// Volume of a geodesic ball of radius `r` in n-dimensional hyperbolic
/// space of curvature −K.
pub fn ball_volume(n: usize, r: f64, k: f64) -> Result<f64> {
    if n < 2 || !(r >= 0.0) || !(k > 0.0) || !r.is_finite() || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("ball_volume needs n ≥ 2, r ≥ 0, K > 0 (got {n}, {r}, {k})")));
    }
    let sk = k.sqrt();
    let f = move |t: f64| ((sk * t).sinh() / sk).powi(n as i32 - 1);
    Ok(sphere_volume(n - 1) * integrate(&f, 0.0, r, 1e-12)?)
}

/// Sharp Sobolev constant κ_n = n(n−2)·vol(Sⁿ)^{2/n}/4.
pub fn kappa(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("kappa needs n ≥ 3, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * (nf - 2.0) * sphere_volume(n).powf(2.0 / nf) / 4.0)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MoserConstant {
    pub value: f64,
    pub log_value: f64,
    /// Number of factors multiplied.
    pub terms: usize,
    /// Bound on |C − value| from the discarded factors.
    pub tail_bound: f64,
}

/// Moser iteration constant C(n,q,L,λ) = ∏_{k≥0} κ_n^{−1/γ^k}
/// [(q(n−q)+λ)γ^k + 4^{k+1}/L²]^{1/γ^k}, γ = n/(n−2).
pub fn moser_constant(n: usize, q: usize, l: f64, lambda: f64) -> Result<MoserConstant> {
    moser_constant_with(n, q, l, lambda, 1e-12, None)
}

/// As [`moser_constant`] with an explicit multiplicative tail tolerance, or a
/// fixed number of factors when `fixed_terms` is set.
pub fn moser_constant_with(
    n: usize,
    q: usize,
    l: f64,
    lambda: f64,
    tol: f64,
    fixed_terms: Option<usize>,
) -> Result<MoserConstant> {
    if q > n || !(l > 0.0) || !(lambda >= 0.0) || !l.is_finite() || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "moser_constant needs 0 ≤ q ≤ n, L > 0, λ ≥ 0 (got q={q}, L={l}, λ={lambda})"
        )));
    }
    let kap = kappa(n)?;
    let nf = n as f64;
    let gamma = nf / (nf - 2.0);
    let r = 1.0 / gamma;
    let a = (q * (n - q)) as f64 + lambda;
    let b = 1.0 / (l * l);
    let log4 = 4f64.ln();
    let c_prime = ((a + 4.0 * b).ln().abs()).max((log4 - 2.0 * l.ln()).abs()) + kap.ln().abs();
    let tail = |k: usize| -> f64 {
        let rk = r.powi(k as i32);
        let kf = k as f64;
        log4 * rk * (kf * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r)) + c_prime * rk / (1.0 - r)
    };
    // compensated summation of the log-factors
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut k = 0usize;
    loop {
        let done = match fixed_terms {
            Some(m) => k >= m,
            None => tail(k).exp_m1() < tol,
        };
        if done {
            break;
        }
        if k > 100_000 {
            return Err(Error::Numerical("Moser product did not converge".into()));
        }
        let gk = gamma.powi(k as i32);
        let bracket = a * gk + 4f64.powi(k as i32 + 1) * b;
        if !(bracket > 0.0) || !bracket.is_finite() {
            // 4^{k+1} overflows long after the tail is negligible
            return Err(Error::Numerical(format!("Moser factor {k} is not positive and finite")));
        }
        let term = (bracket.ln() - kap.ln()) / gk;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        k += 1;
    }
    let value = sum.exp();
    Ok(MoserConstant { value, log_value: sum, terms: k, tail_bound: value * tail(k).exp_m1() })
}

/// Edge lengths of a Euclidean simplex, indexed by local vertex pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexMetric {
    n: usize,
    lengths: DMatrix<f64>,
}

impl SimplexMetric {
    /// `lengths[i][j]` for local vertices 0..=n; only i < j entries are read.
    pub fn new(lengths: &[Vec<f64>]) -> Result<Self> {
        let m = lengths.len();
        if m < 2 {
            return Err(Error::Geometry("simplex needs at least two vertices".into()));
        }
        let mut l = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let v = *lengths[i].get(j).ok_or_else(|| Error::Geometry("length table is too short".into()))?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Geometry(format!("edge length {v} must be positive")));
                }
                l[(i, j)] = v;
                l[(j, i)] = v;
            }
        }
        Ok(Self { n: m - 1, lengths: l })
    }

    pub fn uniform(n: usize, length: f64) -> Result<Self> {
        Self::new(&vec![vec![length; n + 1]; n + 1])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn length(&self, i: usize, j: usize) -> f64 {
        self.lengths[(i, j)]
    }
}

/// Gram matrix of the edge vectors from vertex 0, G_ij = (l₀ᵢ² + l₀ⱼ² − lᵢⱼ²)/2,
/// checked positive definite.
pub fn simplex_gram(m: &SimplexMetric) -> Result<DMatrix<f64>> {
    let n = m.n;
    let g = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (m.length(0, i + 1), m.length(0, j + 1));
        let c = if i == j { 0.0 } else { m.length(i + 1, j + 1) };
        0.5 * (a * a + b * b - c * c)
    });
    let scale = g.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    match g.clone().cholesky() {
        Some(ch) if ch.l().diagonal().iter().all(|&d| d > 1e-12 * scale.sqrt()) => Ok(g),
        _ => Err(Error::Geometry("edge lengths do not span a nondegenerate Euclidean simplex".into())),
    }
}

/// Euclidean volume √det(G)/n!.
pub fn simplex_volume(m: &SimplexMetric) -> Result<f64> {
    let g = simplex_gram(m)?;
    let fact: f64 = (1..=m.n).map(|k| k as f64).product();
    Ok(g.determinant().max(0.0).sqrt() / fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let o = HypPoint::origin(2);
        assert_eq!(hyp_distance(&o, &o), 0.0);
        let p = HypPoint::exp_origin(&[0.6, 0.8], 1.7).unwrap();
        assert!((hyp_distance(&o, &p) - 1.7).abs() < 1e-12);
        // boost by log 3: cosh = 5/3, sinh = 4/3
        let q = HypPoint::new(vec![5.0 / 3.0, 4.0 / 3.0, 0.0]).unwrap();
        assert!((hyp_distance(&o, &q) - 3f64.ln()).abs() < 1e-10);
        assert!(HypPoint::new(vec![1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn triangle_area_limits() {
        assert_eq!(right_triangle_area(0.0, 2.0).unwrap(), 0.0);
        assert!((right_triangle_area(60.0, 60.0).unwrap() - PI / 2.0).abs() < 1e-12);
        let small = right_triangle_area(0.01, 0.02).unwrap();
        assert!((small / (0.01 * 0.02 / 2.0) - 1.0).abs() < 1e-3);
        assert!(right_triangle_area(-1.0, 1.0).is_err());
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ball_volume_closed_forms() {
        assert_eq!(ball_volume(3, 0.0, 1.0).unwrap(), 0.0);
        for r in [0.5, 1.0, 2.0] {
            let v2 = ball_volume(2, r, 1.0).unwrap();
            assert!((v2 - 2.0 * PI * (r.cosh() - 1.0)).abs() < 1e-10 * v2);
            let v3 = ball_volume(3, r, 1.0).unwrap();
            let exact = PI * ((2.0 * r).sinh() - 2.0 * r);
            assert!((v3 - exact).abs() < 1e-10 * exact);
        }
        assert!(ball_volume(1, 1.0, 1.0).is_err());
        assert!(ball_volume(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn kappa_values() {
        let k3 = kappa(3).unwrap();
        assert!((k3 - 0.75 * (2.0 * PI * PI).powf(2.0 / 3.0)).abs() < 1e-12);
        let k4 = kappa(4).unwrap();
        assert!((k4 - 2.0 * (8.0 * PI * PI / 3.0f64).sqrt()).abs() < 1e-12);
        assert!(k4 > k3);
        assert!(kappa(2).is_err());
    }

    #[test]
    fn grams() {
        let eq = SimplexMetric::uniform(2, 1.0).unwrap();
        let g = simplex_gram(&eq).unwrap();
        assert!((g[(0, 1)] - 0.5).abs() < 1e-15 && (g[(0, 0)] - 1.0).abs() < 1e-15);
        let rt = SimplexMetric::new(&[vec![0.0, 3.0, 4.0], vec![0.0, 0.0, 5.0], vec![0.0; 3]]).unwrap();
        let g = simplex_gram(&rt).unwrap();
        assert_eq!((g[(0, 0)], g[(0, 1)], g[(1, 1)]), (9.0, 0.0, 16.0));
        let tet = simplex_gram(&SimplexMetric::uniform(3, 1.0).unwrap()).unwrap();
        assert!((tet.determinant() - 0.5).abs() < 1e-14);
        let flat = SimplexMetric::new(&[vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0], vec![0.0; 3]]).unwrap();
        assert!(simplex_gram(&flat).is_err());
    }
}
