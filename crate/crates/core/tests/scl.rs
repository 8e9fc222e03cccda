mod common;

use std::path::Path;

use common::ri;
use hypspec::bounds::{verify_filling_chain, Verdict};
use hypspec::exact::Rational;
use hypspec::io::{cycle_from_value, read_json};
use hypspec::scl::{
    boundary_kernel, free_part_coefficients, l1_filling, least_norm_filling, scaled_integral, support_euler_characteristic,
};
use hypspec::spectra::lambda1_split;
use hypspec::triangulations;
use hypspec::whitney::Geometry;
use hypspec::Error;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus_disc_cycle() -> Vec<i64> {
    let k = triangulations::torus7();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    cycle_from_value(&read_json(&dir.join("torus_disc_cycle.json")).unwrap(), &k, None).unwrap()
}

#[test]
fn comb_fillings_are_exact() {
    let k = triangulations::torus7();
    common::check_comb_filling(&k, &torus_disc_cycle()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, k) in common::surfaces() {
        for v in 0..3 {
            common::check_comb_filling(&k, &common::star_boundary(&k, v)).unwrap_or_else(|e| panic!("{name} star {v}: {e}"));
        }
        for _ in 0..3 {
            let f = common::random_null_cycle(&k, &mut rng);
            common::check_comb_filling(&k, &f).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn kernel_perturbations_never_shrink_the_norm() {
    let k = triangulations::torus7();
    let cert = least_norm_filling(&k, &torus_disc_cycle(), None, 0.0).unwrap();
    let z = boundary_kernel(&k);
    assert_eq!(z.len(), 1);
    let norm = |g: &[Rational]| -> Rational { g.iter().map(|x| x * x).sum() };
    let base = norm(&cert.g);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let t = Rational::new(BigInt::from(rng.random_range(-50..=50)), BigInt::from(rng.random_range(1..=20)));
        let g: Vec<Rational> = cert.g.iter().zip(&z[0]).map(|(a, b)| a + &t * b).collect();
        assert!(norm(&g) >= base);
    }
}

#[test]
fn filling_scales_linearly() {
    let k = triangulations::torus7();
    let f = torus_disc_cycle();
    let g1 = least_norm_filling(&k, &f, None, 0.0).unwrap();
    let f3: Vec<i64> = f.iter().map(|v| 3 * v).collect();
    let g3 = least_norm_filling(&k, &f3, None, 0.0).unwrap();
    for (a, b) in g1.g.iter().zip(&g3.g) {
        assert_eq!(a * ri(3), *b);
    }
    assert_eq!(g1.m, BigInt::from(7));
}

#[test]
fn star_fillings_are_discs() {
    for (name, k) in common::surfaces() {
        let f = common::star_boundary(&k, 0);
        let cert = l1_filling(&k, &f, None).unwrap();
        let g = scaled_integral(&cert);
        assert_eq!(cert.m, BigInt::from(1), "{name}");
        assert_eq!(support_euler_characteristic(&k, &g), Some(1), "{name}");
        // the ℓ¹ optimum never beats the least-squares filling's ℓ¹ norm
        let l2 = least_norm_filling(&k, &f, None, 0.0).unwrap();
        let l2_one: Rational = l2.g.iter().map(|x| if *x < ri(0) { -x } else { x.clone() }).sum();
        assert!(ri(cert.one_norm.clone().try_into().unwrap()) <= l2_one, "{name}");
    }
}

#[test]
fn cramer_on_unimodular_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let a = common::random_unimodular(n, &mut rng);
        let b: Vec<i64> = (0..n).map(|_| rng.random_range(-20..=20)).collect();
        let x = free_part_coefficients(&a, &b).unwrap();
        for (row, bi) in a.iter().zip(&b) {
            let s: BigInt = row.iter().zip(&x).map(|(&r, xi)| BigInt::from(r) * xi).sum();
            assert_eq!(s, BigInt::from(*bi));
        }
    }
    assert!(matches!(free_part_coefficients(&[vec![2, 0], vec![0, 1]], &[1, 1]), Err(Error::NotUnimodular(_))));
    assert!(matches!(free_part_coefficients(&[vec![1, 2], vec![2, 4]], &[1, 1]), Err(Error::NotUnimodular(_))));
}

#[test]
fn filling_chain_verdicts() {
    let k = triangulations::torus7();
    let f = torus_disc_cycle();
    let split = lambda1_split(&k, 1, None, false).unwrap();
    let cert = least_norm_filling(&k, &f, None, 0.0).unwrap();
    assert_eq!(verify_filling_chain(&cert, &split).unwrap().verdict, Verdict::Holds);

    let mut bad = cert.clone();
    bad.chi_bound += 1;
    assert_eq!(verify_filling_chain(&bad, &split).unwrap().verdict, Verdict::Fails);
    let mut heavy = cert.clone();
    heavy.g_norm_sq *= 100.0;
    assert_eq!(verify_filling_chain(&heavy, &split).unwrap().verdict, Verdict::Fails);

    let zero = least_norm_filling(&k, &vec![0; f.len()], None, 0.0).unwrap();
    assert_eq!(verify_filling_chain(&zero, &split).unwrap().verdict, Verdict::NotApplicable);

    let geo = Geometry::uniform(&k, 1.0).unwrap();
    let wsplit = lambda1_split(&k, 1, Some(&geo), false).unwrap();
    assert!(verify_filling_chain(&cert, &wsplit).is_err());
    let wcert = least_norm_filling(&k, &f, Some(&geo), 1e-6).unwrap();
    assert!(wcert.verify_boundary(&k));
    assert_eq!(verify_filling_chain(&wcert, &wsplit).unwrap().verdict, Verdict::Holds);
}

#[test]
fn non_null_cycles_are_refused() {
    // the torus 1-skeleton is K₇; some of its non-face triangles wrap around
    let t = triangulations::torus7();
    let edge = |a: usize, b: usize| t.cells(1).iter().position(|e| *e == vec![a, b]).unwrap();
    let mut refused = 0;
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let mut f = vec![0i64; t.num_cells(1)];
                f[edge(a, b)] = 1;
                f[edge(b, c)] = 1;
                f[edge(a, c)] = -1;
                let null = hypspec::scl::rationally_null(&t, &f).unwrap().0;
                let filled = least_norm_filling(&t, &f, None, 0.0);
                assert_eq!(filled.is_ok(), null);
                if !null {
                    assert!(matches!(filled, Err(Error::NotNullHomologous)));
                    refused += 1;
                }
            }
        }
    }
    assert!(refused > 0);
}
