use graphcoreset::eval::error_metric;
use graphcoreset::eval::experiment::run_selection;
use graphcoreset::eval::WeightedVertices;
use graphcoreset::graph::*;
use graphcoreset::spectral::{eigendecomposition, GraphFunction};
use graphcoreset::*;
use proptest::prelude::*;

fn any_graph() -> impl Strategy<Value = Graph> {
    prop_oneof![
        (5usize..40, 5usize..40, any::<u64>())
            .prop_map(|(a, b, s)| generate_sbm(&[a, b], 0.4, 0.05, s).unwrap().largest_component().unwrap().0),
        (2usize..80, any::<u64>()).prop_map(|(n, s)| generate_powerlaw_tree(n, 3.0, s).unwrap()),
        (5usize..60, any::<u64>()).prop_map(|(n, s)| generate_random_graph(n, 0.2, s, 20).unwrap()),
    ]
}

fn costs_for(n: usize, seed: u64) -> CostVector {
    sample_costs_uniform(n, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn selection_invariants(g in any_graph(), kappa in prop::sample::select(vec![0.2, 0.5, 0.8, 1.0]),
                            k in 1usize..15, ell in 1usize..4, seed in any::<u64>()) {
        let cols = normalized_columns(&lazy_walk_matrix(&g).unwrap(), ell).unwrap();
        let run = run_selection(&cols, &costs_for(g.n(), seed), kappa, &[k]).unwrap();
        let inv = run.invariants;
        prop_assert!(inv.max_residual_increase <= 1e-12);
        prop_assert!(inv.max_identity_gap <= 1e-10);
        prop_assert!(inv.max_sphere_error <= 1e-10);
        prop_assert_eq!(inv.slack_violations, 0);
        prop_assert!(inv.max_support <= k);
        let cs = &run.snapshots[0].1;
        prop_assert!(cs.indices.len() <= k);
        prop_assert!(cs.weights.iter().all(|&a| a >= 0.0));
        prop_assert!((cs.total_weight() - (1.0 - cs.residual)).abs() < 1e-9);
    }

    #[test]
    fn kappa_one_ignores_costs(g in any_graph(), k in 1usize..12, seed in any::<u64>()) {
        let cols = normalized_columns(&lazy_walk_matrix(&g).unwrap(), 2).unwrap();
        let cfg = SelectionConfig::new(k, 1.0, 2);
        let free = select_coreset(&cols, &CostVector::zeros(g.n()), &cfg).unwrap();
        let paid = select_coreset(&cols, &costs_for(g.n(), seed), &cfg).unwrap();
        prop_assert_eq!(free.indices, paid.indices);
        prop_assert_eq!(free.weights, paid.weights);
    }

    #[test]
    fn cost_scale_leaves_selection_unchanged(g in any_graph(), k in 1usize..12, seed in any::<u64>(),
                                             factor in 0.01f64..100.0) {
        let cols = normalized_columns(&lazy_walk_matrix(&g).unwrap(), 2).unwrap();
        let cfg = SelectionConfig::new(k, 0.5, 2);
        let costs = costs_for(g.n(), seed);
        let a = select_coreset(&cols, &costs, &cfg).unwrap();
        let b = select_coreset(&cols, &costs.scaled(factor).unwrap(), &cfg).unwrap();
        let seq = |c: &Coreset| c.trajectory.iter().map(|r| r.vertex).collect::<Vec<_>>();
        prop_assert_eq!(seq(&a), seq(&b));
    }

    #[test]
    fn error_metric_ignores_entry_order(f in prop::collection::vec(-5.0f64..5.0, 12),
                                        w in prop::collection::vec(0.0f64..1.0, 6),
                                        rot in 0usize..6) {
        let f = GraphFunction::from_values(f);
        let vertices: Vec<usize> = (0..6).map(|i| i * 2).collect();
        let a = WeightedVertices { vertices: vertices.clone(), weights: w.clone() };
        let mut v2 = vertices;
        let mut w2 = w;
        v2.rotate_left(rot);
        w2.rotate_left(rot);
        let b = WeightedVertices { vertices: v2, weights: w2 };
        prop_assert!((error_metric(&f, &a).abs_err - error_metric(&f, &b).abs_err).abs() < 1e-12);
        let exact = error_metric(&f, &WeightedVertices::uniform(12));
        prop_assert!(exact.abs_err < 1e-12);
    }

    #[test]
    fn edge_list_round_trip(g in any_graph()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, write_edge_list(&g)).unwrap();
        let back = load_edge_list(&path, true).unwrap().graph;
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn walk_matrix_is_stochastic(g in any_graph(), ell in 1usize..=8) {
        let p = lazy_walk_matrix(&g).unwrap();
        for s in p.row_sums() {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        let ones = p.apply_power(&vec![1.0; g.n()], ell);
        prop_assert!(ones.iter().all(|x| (x - 1.0).abs() < 1e-10));
        for (i, j, w) in g.edges().iter().copied() {
            prop_assert!(w > 0.0);
            prop_assert_eq!(p.get(i, j), p.get(j, i));
        }
    }

    #[test]
    fn spectrum_lies_in_unit_interval(g in any_graph()) {
        let s = eigendecomposition(&lazy_walk_matrix(&g).unwrap()).unwrap();
        prop_assert!(s.values.iter().all(|&l| (-1.0 - 1e-9..=1.0 + 1e-9).contains(&l)));
        prop_assert!((s.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trees_are_connected_and_acyclic(n in 2usize..1000, seed in any::<u64>()) {
        let t = generate_powerlaw_tree(n, 3.0, seed).unwrap();
        prop_assert_eq!(t.num_edges(), n - 1);
        prop_assert!(t.is_connected());
    }

    #[test]
    fn knn_weights_in_unit_interval(coords in prop::collection::vec(-3.0f64..3.0, 20..80), k in 1usize..5) {
        let cloud = PointCloud::new(2, coords[..coords.len() / 2 * 2].to_vec(), None).unwrap();
        prop_assume!(cloud.n() > k);
        let g = build_knn_kernel_graph(&cloud, k, 1.0).unwrap();
        prop_assert!(g.edges().iter().all(|&(_, _, w)| w > 0.0 && w <= 1.0));
    }
}
