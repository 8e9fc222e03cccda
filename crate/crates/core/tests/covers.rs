mod common;

use hypspec::covers::{build_cover, cyclic_cover_from_cocycle, tree_fundamental_domain, PermutationCoverSpec};
use hypspec::graph::{random_connected_graph, shortest_path_tree, Graph};
use hypspec::homology::betti_numbers;
use hypspec::scl::{check_cycle, cycle_from_word, rationally_null};
use hypspec::triangulations;
use hypspec::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn euler_characteristic_multiplies() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, base) in common::surfaces() {
        for d in 1..=4 {
            let spec = common::random_cover_spec(&base, d, &mut rng);
            let cover = build_cover(&spec).unwrap();
            assert_eq!(cover.complex.euler_characteristic(), d as i64 * base.euler_characteristic(), "{name} d={d}");
            let d1 = cover.complex.boundary_matrix(1).unwrap();
            assert!(d1.mul(&cover.complex.boundary_matrix(2).unwrap()).unwrap().is_zero());
        }
    }
}

#[test]
fn connectivity_matches_monodromy() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = triangulations::torus7();
    let mut connected = 0;
    for _ in 0..20 {
        let d = rng.random_range(2..=5);
        let spec = common::random_cover_spec(&base, d, &mut rng);
        let cover = build_cover(&spec).unwrap();
        let gens = spec.monodromy_generators().unwrap();
        let transitive = common::orbit_size(&gens, d) == d;
        assert_eq!(cover.is_connected(), transitive);
        assert_eq!(betti_numbers(&cover.complex)[0], cover.components);
        connected += usize::from(transitive);
    }
    assert!(connected > 0);
}

#[test]
fn disconnected_cyclic_cover() {
    // the zero cocycle gives four disjoint copies of the base
    let base = triangulations::torus7();
    let phi = vec![0i64; base.num_cells(1)];
    let spec = cyclic_cover_from_cocycle(&base, 4, &phi).unwrap();
    let cover = build_cover(&spec).unwrap();
    assert_eq!(cover.components, 4);
    assert!(!spec.monodromy_transitive().unwrap());
}

#[test]
fn tree_domain_pairings_close_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base = triangulations::torus7();
    let spec = loop {
        let s = common::random_cover_spec(&base, 3, &mut rng);
        if s.monodromy_transitive().unwrap() {
            break s;
        }
    };
    let cover = build_cover(&spec).unwrap();
    let tree = shortest_path_tree(&spec.schreier_graph(), 0).unwrap();
    let fd = tree_fundamental_domain(&cover, &tree).unwrap();
    fd.verify_words(&spec).unwrap();
    assert_eq!(fd.tiles.len(), 3 * base.num_cells(2));
    // every pairing word is a closed loop at the root through source then target
    assert!(!fd.pairings.is_empty());
    for p in &fd.pairings {
        let walk = spec.walk(fd.root, &p.word).unwrap();
        let k = fd.tiles[p.source_tile].access_word.len();
        assert_eq!((walk[k], walk[k + 1]), (p.source_tile, p.target_tile));
        assert_eq!(*walk.last().unwrap(), fd.root);
        assert!(cover.complex.index_of(&p.facet).is_some());
    }
}

#[test]
fn contractible_tile_loop_gives_null_cycle() {
    // walking once around vertex 0 of the torus crosses its six spokes
    let base = triangulations::torus7();
    let spec = PermutationCoverSpec::trivial(base.clone(), 2);
    let cover = build_cover(&spec).unwrap();
    let top = base.top_cells();
    let star: Vec<usize> = (0..top.len()).filter(|&i| top[i].contains(&0)).collect();
    // order the star cyclically by adjacency
    let mut order = vec![star[0]];
    while order.len() < star.len() {
        let last = *order.last().unwrap();
        let next = star
            .iter()
            .copied()
            .find(|&t| !order.contains(&t) && spec.label_of(last, t).is_some())
            .unwrap();
        order.push(next);
    }
    order.push(order[0]);
    let word: Vec<usize> = order.windows(2).map(|w| spec.label_of(w[0], w[1]).unwrap()).collect();
    let f = cycle_from_word(&cover, &word, top[order[0]].iter().copied().find(|&v| v != 0).unwrap(), 1).unwrap();
    check_cycle(&cover.complex, &f).unwrap();
    assert!(rationally_null(&cover.complex, &f).unwrap().0);
}

#[test]
fn open_words_are_reported() {
    // a 4-cycle with one swap: going once around does not close up
    let base = triangulations::cycle(4);
    let dual = hypspec::covers::base_dual_edges(&base);
    let flipped = (dual[0].lo, dual[0].hi);
    let spec = PermutationCoverSpec::from_fn(2, base.clone(), |lo, hi| if (lo, hi) == flipped { vec![1, 0] } else { vec![0, 1] }).unwrap();
    let cover = build_cover(&spec).unwrap();
    let mut order = vec![0usize];
    while order.len() < 4 {
        let last = *order.last().unwrap();
        let prev = if order.len() > 1 { Some(order[order.len() - 2]) } else { None };
        let next = (0..4).find(|&t| t != last && Some(t) != prev && spec.label_of(last, t).is_some()).unwrap();
        order.push(next);
    }
    order.push(0);
    let around: Vec<usize> = order.windows(2).map(|w| spec.label_of(w[0], w[1]).unwrap()).collect();
    let v = base.top_cells()[0][0];
    assert!(matches!(cycle_from_word(&cover, &around, v, 0), Err(Error::OpenPath { .. })));
    let twice: Vec<usize> = around.iter().chain(&around).copied().collect();
    let f = cycle_from_word(&cover, &twice, v, 0).unwrap();
    check_cycle(&cover.complex, &f).unwrap();
    assert_eq!(f.iter().map(|x| x.abs()).sum::<i64>(), 8);
    let there_and_back = [around[0], around[0] ^ 1];
    assert!(cycle_from_word(&cover, &there_and_back, v, 0).unwrap().iter().all(|&x| x == 0));
}

fn tree_diameter_law(g: &Graph) {
    let n = g.num_vertices();
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.a, e.b)).collect();
    let apsp = common::all_pairs(n, &edges);
    let diam_g = apsp.iter().flatten().copied().max().unwrap();
    for root in [0, n / 2, n - 1] {
        let t = shortest_path_tree(g, root).unwrap();
        let tree_edges: Vec<(usize, usize)> = t.tree_edges().iter().map(|&e| (g.edges()[e].a, g.edges()[e].b)).collect();
        assert_eq!(tree_edges.len(), n - 1);
        let tp = common::all_pairs(n, &tree_edges);
        let diam_t = tp.iter().flatten().copied().max().unwrap();
        assert_eq!(diam_t, t.diameter());
        assert!(diam_t <= 2 * diam_g);
        for v in 0..n {
            assert_eq!(tp[root][v], apsp[root][v]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn shortest_path_trees(seed in any::<u64>(), n in 2usize..=40, extra in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_graph(n, extra, &mut rng);
        tree_diameter_law(&g);
    }

    #[test]
    fn cover_of_circle_counts(seed in any::<u64>(), n in 3usize..8, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = triangulations::cycle(n);
        let spec = hypspec::covers::random_graph_cover(&base, d, &mut rng).unwrap();
        let cover = build_cover(&spec).unwrap();
        prop_assert_eq!(cover.complex.num_cells(0), n * d);
        prop_assert_eq!(cover.complex.num_cells(1), n * d);
        let gens = spec.monodromy_generators().unwrap();
        prop_assert_eq!(cover.is_connected(), common::orbit_size(&gens, d) == d);
    }
}
