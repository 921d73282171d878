use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tssgeo::embed::{compute_embedding, validate_embedding, EmbedOptions};
use tssgeo::gen;
use tssgeo::geometry::grid_disks;
use tssgeo::harness::{verify_equivalence, EquivalenceConfig, Target};
use tssgeo::polysolve::{
    max_independent_set_bb, max_independent_set_bruteforce, min_vertex_cover_bruteforce, min_vertex_cover_grid,
    min_vertex_cover_interval, unanimous_tss_to_vc, vc_to_unanimous_tss,
};
use tssgeo::reduce::{
    majority_lift_witness, majority_project_witness, majority_transform, planar_tss_to_grid_tss,
};
use tssgeo::tss::{is_majority, normalize_seed};
use tssgeo::{
    intersection_graph_disks, intersection_graph_intervals, is_target_set, min_target_set_bruteforce,
    preprocess_cap_thresholds, simulate, validate_grid_graph, DiskRepresentation, GeoPoint, Graph, Rational,
    TssInstance,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_instance(seed: u64, max_n: usize, slack: u32) -> TssInstance {
    let mut r = rng(seed);
    let n = 1 + (seed as usize % max_n);
    gen::random_tss(n, 0.4, slack, &mut r)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..6).prop_map(|(p, q)| Rational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disk_graph_invariant_under_translation_and_scaling(
        pts in prop::collection::vec((rational(), rational()), 1..9),
        dx in rational(),
        dy in rational(),
        s in (1i64..5, 1i64..5).prop_map(|(p, q)| Rational::new(p, q)),
    ) {
        let d = Rational::new(3, 2);
        let base: Vec<GeoPoint> = pts.iter().map(|(x, y)| GeoPoint::new(x.clone(), y.clone())).collect();
        let g = intersection_graph_disks(&DiskRepresentation::new(d.clone(), base.clone()).unwrap());
        let moved = base.iter().map(|p| GeoPoint::new(&p.x + &dx, &p.y + &dy)).collect();
        prop_assert_eq!(&intersection_graph_disks(&DiskRepresentation::new(d.clone(), moved).unwrap()), &g);
        let scaled = base.iter().map(|p| GeoPoint::new(&p.x * &s, &p.y * &s)).collect();
        prop_assert_eq!(&intersection_graph_disks(&DiskRepresentation::new(&d * &s, scaled).unwrap()), &g);
    }

    #[test]
    fn grid_graphs_are_unit_disk_graphs(seed in any::<u64>(), n in 1usize..16) {
        let (g, coords) = gen::random_grid_subgraph(4, 4, n, &mut rng(seed));
        prop_assert!(validate_grid_graph(&g, &coords).is_ok());
        prop_assert_eq!(intersection_graph_disks(&grid_disks(&coords)), g);
    }

    #[test]
    fn graph_construction(n in 1usize..10, raw in prop::collection::vec((0usize..10, 0usize..10), 0..20)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().filter(|&(u, v)| u < n && v < n).collect();
        match Graph::new(n, edges.iter().copied()) {
            Ok(g) => {
                prop_assert!(edges.iter().all(|&(u, v)| u != v));
                prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
                prop_assert_eq!(g.edge_count(), edges.len());
            }
            Err(_) => {
                let mut seen = std::collections::HashSet::new();
                let bad = edges.iter().any(|&(u, v)| u == v || !seen.insert((u.min(v), u.max(v))));
                prop_assert!(bad);
            }
        }
    }

    #[test]
    fn traces_are_monotone_and_short(seed in any::<u64>(), mask in any::<u16>()) {
        let inst = small_instance(seed, 10, 1);
        let s: Vec<usize> = (0..inst.n()).filter(|&v| mask & (1 << v) != 0).collect();
        let trace = simulate(&inst, &s).unwrap();
        prop_assert!(trace.rounds.windows(2).all(|w| w[0].iter().all(|v| w[1].contains(v))));
        prop_assert!(trace.round_count() <= inst.n());
        prop_assert_eq!(simulate(&inst, &s).unwrap(), trace);
    }

    #[test]
    fn seed_monotonicity(seed in any::<u64>(), a in any::<u16>(), b in any::<u16>()) {
        let inst = small_instance(seed, 10, 0);
        let n = inst.n();
        let s: Vec<usize> = (0..n).filter(|&v| a & (1 << v) != 0).collect();
        let sup: Vec<usize> = (0..n).filter(|&v| (a | b) & (1 << v) != 0).collect();
        if is_target_set(&inst, &s).unwrap() {
            prop_assert!(is_target_set(&inst, &sup).unwrap());
        }
    }

    #[test]
    fn capping_preserves_k_min(seed in any::<u64>()) {
        let inst = small_instance(seed, 8, 2);
        let pre = preprocess_cap_thresholds(&inst);
        let (k, _) = min_target_set_bruteforce(&inst, inst.n()).unwrap();
        let (k2, _) = min_target_set_bruteforce(&pre.instance, pre.instance.n()).unwrap();
        prop_assert_eq!(k as u64, k2 as u64 + pre.budget_spent);
    }

    #[test]
    fn normalized_seeds_stay_target_sets(seed in any::<u64>()) {
        let inst = small_instance(seed, 9, 0);
        let (_, w) = min_target_set_bruteforce(&inst, inst.n()).unwrap();
        let mut padded = w.clone();
        padded.extend((0..inst.n()).filter(|v| !w.contains(v)).take(2));
        for s in [w, padded] {
            let norm = normalize_seed(&inst, &s).unwrap();
            prop_assert_eq!(norm.len(), s.len());
            prop_assert!(is_target_set(&inst, &norm).unwrap());
        }
    }

    #[test]
    fn cover_plus_independent_set(seed in any::<u64>(), n in 1usize..14) {
        let g = gen::erdos_renyi(n, 0.35, &mut rng(seed));
        let vc = min_vertex_cover_bruteforce(&g);
        let is = max_independent_set_bruteforce(&g);
        prop_assert!(g.is_vertex_cover(&vc));
        prop_assert_eq!(vc.len() + is.len(), n);
    }

    #[test]
    fn branch_and_bound_matches_enumeration(seed in any::<u64>(), n in 1usize..=18, p in 0.1f64..0.6) {
        let g = gen::erdos_renyi(n, p, &mut rng(seed));
        let bb = max_independent_set_bb(&g);
        prop_assert!(g.is_independent(&bb));
        prop_assert_eq!(bb.len(), max_independent_set_bruteforce(&g).len());
    }

    #[test]
    fn interval_cover_matches_target_set_oracle(seed in any::<u64>(), n in 1usize..10) {
        let model = gen::random_intervals(n, 8, &mut rng(seed));
        let g = intersection_graph_intervals(&model);
        let cover = min_vertex_cover_interval(&model);
        prop_assert!(g.is_vertex_cover(&cover));
        let inst = TssInstance::unanimous(g, n as u64);
        prop_assert_eq!(cover.len(), min_target_set_bruteforce(&inst, n).unwrap().0);
    }

    #[test]
    fn grid_cover_matches_target_set_oracle(seed in any::<u64>(), n in 1usize..12) {
        let (g, coords) = gen::random_grid_subgraph(4, 4, n, &mut rng(seed));
        let cover = min_vertex_cover_grid(&g, &coords).unwrap();
        prop_assert!(g.is_vertex_cover(&cover));
        let inst = TssInstance::unanimous(g, n as u64);
        prop_assert_eq!(cover.len(), min_target_set_bruteforce(&inst, n).unwrap().0);
    }

    #[test]
    fn unanimous_vc_round_trip(seed in any::<u64>(), n in 1usize..10, k in 0u64..10) {
        let inst = TssInstance::unanimous(gen::erdos_renyi(n, 0.4, &mut rng(seed)), k);
        prop_assert_eq!(vc_to_unanimous_tss(&unanimous_tss_to_vc(&inst).unwrap()), inst);
    }

    #[test]
    fn majority_transform_budget_and_witnesses(seed in any::<u64>()) {
        let inst = small_instance(seed, 6, 0);
        let (k, w) = min_target_set_bruteforce(&inst, inst.n()).unwrap();
        let inst = inst.with_budget(k as u64);
        let art = majority_transform(&inst).unwrap();
        let out = art.output_tss().unwrap();
        prop_assert!(is_majority(out));
        prop_assert!(art.budget_consistent());
        prop_assert!(art.provenance_injective());
        let lifted = majority_lift_witness(&art, &w).unwrap();
        prop_assert!(is_target_set(out, &lifted).unwrap());
        prop_assert_eq!(lifted.len() as u64, out.budget());
        let back = majority_project_witness(&art, &lifted).unwrap();
        prop_assert!(back.len() <= k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn embeddings_validate_and_subdivide_to_grids(seed in any::<u64>(), n in 2usize..14) {
        let g = gen::random_planar_bounded(n, &mut rng(seed));
        let emb = compute_embedding(&g, &EmbedOptions { seed, ..EmbedOptions::default() }).unwrap();
        prop_assert!(validate_embedding(&g, &emb).is_valid());
        let art = planar_tss_to_grid_tss(&TssInstance::majority(g, 1), &emb).unwrap();
        let out = art.output_tss().unwrap();
        prop_assert!(validate_grid_graph(out.graph(), art.coords.as_ref().unwrap()).is_ok());
        prop_assert!(is_majority(out));
    }

    #[test]
    fn reports_depend_only_on_the_seed(seed in any::<u64>()) {
        let cfg = EquivalenceConfig::new(Target::Subdivide, seed, 6);
        let mut a = verify_equivalence(&cfg);
        let mut b = verify_equivalence(&cfg);
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        prop_assert_eq!(a, b);
    }
}
