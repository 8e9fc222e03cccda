#![allow(dead_code)]

use hypspec::covers::{compose, invert, random_cyclic_cover, PermutationCoverSpec};
use hypspec::exact::Rational;
use hypspec::triangulations;
use hypspec::SimplicialComplex;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn surfaces() -> Vec<(&'static str, SimplicialComplex)> {
    triangulations::surface_fixtures()
}

/// Random permutation cover of `base`: a random ℤ/d cover whose sheets are
/// then relabelled independently on every tile, so the adjacency
/// permutations are no longer all powers of one cycle.
pub fn random_cover_spec<R: Rng>(base: &SimplicialComplex, d: usize, rng: &mut R) -> PermutationCoverSpec {
    let cyclic = random_cyclic_cover(base, d, rng).unwrap();
    let gauges: Vec<Vec<usize>> = (0..base.num_cells(base.dim()))
        .map(|_| {
            let mut g: Vec<usize> = (0..d).collect();
            g.shuffle(rng);
            g
        })
        .collect();
    PermutationCoverSpec::from_fn(d, base.clone(), |lo, hi| {
        let p = cyclic.label_perm(cyclic.label_of(lo, hi).unwrap());
        compose(&gauges[hi], &compose(&p, &invert(&gauges[lo])))
    })
    .unwrap()
}

/// Breadth-first orbit of sheet 0 under a set of permutations.
pub fn orbit_size(gens: &[Vec<usize>], d: usize) -> usize {
    let mut seen = vec![false; d];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(s) = stack.pop() {
        for g in gens {
            for t in [g[s], g.iter().position(|&x| x == s).unwrap()] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.iter().filter(|&&b| b).count()
}

/// Floyd–Warshall all-pairs hop distances on an adjacency list.
pub fn all_pairs(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn ri(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Dense integer matrix product.
pub fn int_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect()
        })
        .collect()
}

/// Random unimodular matrix from elementary operations on the identity.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            if rng.random_bool(0.3) {
                for x in &mut a[i] {
                    *x = -*x;
                }
            }
            continue;
        }
        let c = rng.random_range(-2..=2);
        for k in 0..n {
            let v = a[j][k];
            a[i][k] += c * v;
        }
    }
    a
}

/// Integer 2-chain with small random coefficients; its boundary is a null cycle.
pub fn random_null_cycle<R: Rng>(k: &SimplicialComplex, rng: &mut R) -> Vec<i64> {
    let nf = k.num_cells(2);
    loop {
        let x: Vec<i64> = (0..nf).map(|_| if rng.random_bool(0.3) { rng.random_range(-2..=2) } else { 0 }).collect();
        let f = k.boundary_matrix(2).unwrap().mul_vec_i64(&x);
        if f.iter().any(|&v| v != 0) {
            return f;
        }
    }
}

/// Boundary of the star of a vertex: a disc made of the faces containing it.
pub fn star_boundary(k: &SimplicialComplex, v: usize) -> Vec<i64> {
    let x: Vec<i64> = k.cells(2).iter().map(|f| i64::from(f.contains(&v))).collect();
    // orient coherently: flip faces so the boundary cancels on spokes
    let d = k.boundary_matrix(2).unwrap();
    let mut signs = vec![0i64; x.len()];
    let faces: Vec<usize> = (0..x.len()).filter(|&i| x[i] == 1).collect();
    signs[faces[0]] = 1;
    let mut changed = true;
    while changed {
        changed = false;
        for &f in &faces {
            if signs[f] != 0 {
                continue;
            }
            for &g in &faces {
                if signs[g] == 0 {
                    continue;
                }
                // shared spoke edge containing v: coefficients must cancel
                for e in 0..k.num_cells(1) {
                    let edge = &k.cells(1)[e];
                    if !edge.contains(&v) {
                        continue;
                    }
                    let (a, b) = (d.get(e, f), d.get(e, g));
                    if a != 0 && b != 0 {
                        signs[f] = -signs[g] * a * b;
                        changed = true;
                    }
                }
                if signs[f] != 0 {
                    break;
                }
            }
        }
    }
    d.mul_vec_i64(&signs)
}

/// Exact checks on a combinatorial least-norm filling of `f`: ∂g = f,
/// g ⟂ ker ∂₂, ‖g‖²·λ ≤ ‖f‖² with exact norms and λ the coexact gap in
/// degree 1 lowered by its residual, and chi_bound = 4‖mg‖₁. Equality is
/// attained when f is an eigenvector, so λ is enclosed from below.
pub fn check_comb_filling(k: &SimplicialComplex, f: &[i64]) -> Result<(), String> {
    use hypspec::exact::from_f64;
    use hypspec::scl::{boundary_kernel, least_norm_filling, scaled_integral};
    use hypspec::spectra::lambda1_split;
    use num_traits::Signed;

    let cert = least_norm_filling(k, f, None, 0.0).map_err(|e| e.to_string())?;
    if !cert.verify_boundary(k) {
        return Err("boundary of g differs from f".into());
    }
    for z in boundary_kernel(k) {
        let dot: Rational = z.iter().zip(&cert.g).map(|(a, b)| a * b).sum();
        if dot != ri(0) {
            return Err("g is not orthogonal to the 2-cycles".into());
        }
    }
    let pair = lambda1_split(k, 1, None, false).map_err(|e| e.to_string())?.up_pair.ok_or("no coexact spectrum")?;
    // an eigenvalue lies within the residual of the computed one
    let lambda_lo = from_f64(pair.value * (1.0 - 1e-12) - pair.residual).ok_or("non-finite eigenvalue")?;
    let g_sq: Rational = cert.g.iter().map(|x| x * x).sum();
    let f_sq = ri(f.iter().map(|v| v * v).sum());
    if g_sq * lambda_lo > f_sq {
        return Err("filling norm exceeds |f|^2 / lambda_1".into());
    }
    let one: BigInt = scaled_integral(&cert).iter().map(|x| x.abs()).sum();
    if one != cert.one_norm || cert.chi_bound != one * 4 {
        return Err("chi_bound differs from 4 |m g|_1".into());
    }
    Ok(())
}
