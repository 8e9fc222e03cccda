mod common;

use hypspec::complex::load_complex;
use hypspec::homology::{betti_numbers, homology_table, smith_normal_form, torsion_invariants};
use hypspec::triangulations;
use hypspec::{Error, SimplicialComplex, SparseIntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn dense_big(a: &SparseIntMatrix) -> Vec<Vec<BigInt>> {
    a.to_dense().iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

#[test]
fn boundary_squares_to_zero_on_fixtures() {
    for (name, k) in common::surfaces() {
        let d1 = k.boundary_matrix(1).unwrap();
        let d2 = k.boundary_matrix(2).unwrap();
        assert!(d1.mul(&d2).unwrap().is_zero(), "{name}");
    }
}

#[test]
fn betti_and_torsion_oracles() {
    assert_eq!(betti_numbers(&triangulations::tetrahedron_boundary()), vec![1, 0, 1]);
    assert_eq!(betti_numbers(&triangulations::torus7()), vec![1, 2, 1]);
    assert_eq!(betti_numbers(&triangulations::genus2()), vec![1, 4, 1]);
    assert_eq!(betti_numbers(&triangulations::rp2_6()), vec![1, 0, 0]);
    assert_eq!(betti_numbers(&triangulations::klein8()), vec![1, 1, 0]);
    let two = vec![BigInt::from(2)];
    assert_eq!(torsion_invariants(&triangulations::rp2_6(), 1).unwrap(), two);
    assert_eq!(torsion_invariants(&triangulations::klein8(), 1).unwrap(), two);
    assert!(torsion_invariants(&triangulations::torus7(), 1).unwrap().is_empty());
    assert!(torsion_invariants(&triangulations::rp2_6(), 2).unwrap().is_empty());
}

#[test]
fn homology_table_for_rp2() {
    let rows = homology_table(&triangulations::rp2_6()).unwrap();
    assert_eq!(rows[1].torsion, vec!["2".to_string()]);
    assert_eq!(rows[1].betti, 0);
    assert_eq!(rows[2].torsion_order, "1");
}

#[test]
fn loader_errors_and_closure() {
    let report = load_complex(None, vec![vec![], vec![], vec![vec![2, 0, 1]]], BTreeMap::new()).unwrap();
    assert_eq!(report.complex.cell_counts(), vec![3, 3, 1]);
    assert_eq!(report.added_faces.len(), 6);
    assert!(matches!(
        load_complex(None, vec![vec![vec![0], vec![0]]], BTreeMap::new()),
        Err(Error::DuplicateCell(_))
    ));
    assert!(matches!(
        load_complex(None, vec![vec![], vec![vec![1, 1]]], BTreeMap::new()),
        Err(Error::RepeatedVertex(_))
    ));
    assert!(matches!(
        load_complex(Some(3), vec![vec![], vec![vec![0, 1]]], BTreeMap::new()),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        load_complex(None, vec![vec![vec![0, 1]]], BTreeMap::new()),
        Err(Error::MisplacedCell { .. })
    ));
}

#[test]
fn euler_characteristic_is_alternating_betti_sum() {
    for (name, k) in common::surfaces() {
        let b = betti_numbers(&k);
        let chi: i64 = b.iter().enumerate().map(|(q, &x)| if q % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        assert_eq!(chi, k.euler_characteristic(), "{name}");
    }
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_reconstructs(rows in small_matrix()) {
        let a = SparseIntMatrix::from_dense(&rows);
        let s = smith_normal_form(&a);
        let udv = common::int_mul(&common::int_mul(&s.u, &s.d), &s.v);
        prop_assert_eq!(udv, dense_big(&a));
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        prop_assert!(f.iter().all(|x| *x > BigInt::from(0)));
    }

    #[test]
    fn random_subcomplex_of_simplex_is_a_chain_complex(mask in prop::collection::vec(any::<bool>(), 10)) {
        // top cells: triangles of the 5-vertex full 2-skeleton, chosen by mask
        let tris: Vec<Vec<usize>> = (0..5).flat_map(|a| (a + 1..5).flat_map(move |b| (b + 1..5).map(move |c| vec![a, b, c]))).collect();
        let chosen: Vec<Vec<usize>> = tris.into_iter().zip(&mask).filter(|(_, &m)| m).map(|(t, _)| t).collect();
        prop_assume!(!chosen.is_empty());
        let k = SimplicialComplex::from_simplices(&chosen).unwrap();
        let d1 = k.boundary_matrix(1).unwrap();
        let d2 = k.boundary_matrix(2).unwrap();
        prop_assert!(d1.mul(&d2).unwrap().is_zero());
        let b = betti_numbers(&k);
        prop_assert_eq!(b[0], 1);
    }
}
