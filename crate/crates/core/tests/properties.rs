//! Property tests for the structural invariants: closed-disc adjacency,
//! replacement-free slot sampling, graph transpose consistency, decoder
//! dominance, and the unit-interval behaviour of the degree polynomials.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aloha_sic_core::analysis::AsymptoticParams;
use aloha_sic_core::decoders::{
    decode_noncooperative, decode_spatial, decode_spatiotemporal,
    decode_spatiotemporal_graph_cleaning, decode_temporal,
};
use aloha_sic_core::geometry::{build_deployment, Deployment, Point2D};
use aloha_sic_core::graph::build_graph;
use aloha_sic_core::traffic::{sample_frame_plan, TemporalDegreeDistribution};

fn point() -> impl Strategy<Value = Point2D> {
    (-0.5f64..=0.5, -0.5f64..=0.5).prop_map(|(x, y)| Point2D::new(x, y))
}

proptest! {
    #[test]
    fn adjacency_matches_closed_disc_rule(
        users in prop::collection::vec(point(), 1..20),
        stations in prop::collection::vec(point(), 1..10),
        radius in 0.01f64..0.49,
    ) {
        let dep = Deployment::with_positions(users.clone(), stations.clone(), radius).unwrap();
        for (i, u) in users.iter().enumerate() {
            for (l, b) in stations.iter().enumerate() {
                let adjacent = dep.adjacency(i).contains(&l);
                prop_assert_eq!(adjacent, u.distance(b) <= radius);
            }
            let adj = dep.adjacency(i);
            prop_assert!(adj.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn frame_plans_have_distinct_slots_within_range(
        seed in any::<u64>(),
        n in 1usize..60,
        tau in 3usize..12,
    ) {
        let dist = TemporalDegreeDistribution::from_pairs(&[(1, 0.2), (2, 0.5), (3, 0.3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plan = sample_frame_plan(&dist, n, tau, &mut rng).unwrap();
        for i in 0..n {
            let slots = plan.activation(i);
            prop_assert!(!slots.is_empty());
            prop_assert!(slots.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(slots[0] >= 1 && *slots.last().unwrap() <= tau);
            prop_assert!(dist.support().iter().any(|&(q, _)| q == slots.len()));
        }
    }

    #[test]
    fn graph_is_a_consistent_transpose(
        seed in any::<u64>(),
        n in 1usize..50,
        m in 1usize..8,
        tau in 2usize..8,
    ) {
        let dist = TemporalDegreeDistribution::single(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dep = build_deployment(n, m, 0.2, &mut rng).unwrap();
        let plan = sample_frame_plan(&dist, n, tau, &mut rng).unwrap();
        let g = build_graph(&dep, &plan).unwrap();
        let user_sum: usize = (0..n).map(|i| g.user_degree(i)).sum();
        let check_sum: usize = (0..g.num_checks()).map(|c| g.check_degree(c)).sum();
        prop_assert_eq!(user_sum, check_sum);
        for i in 0..n {
            prop_assert_eq!(g.user_degree(i), dep.spatial_degree(i) * plan.temporal_degree(i));
        }
        for c in 0..g.num_checks() {
            for &u in g.check_users(c) {
                prop_assert!(g.user_checks(u).contains(&c));
            }
        }
    }

    #[test]
    fn decoder_dominance_and_coverage_bound(
        seed in any::<u64>(),
        n in 1usize..40,
        m in 1usize..6,
        tau in 1usize..6,
    ) {
        let dist = TemporalDegreeDistribution::single(tau.min(2));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dep = build_deployment(n, m, 0.25, &mut rng).unwrap();
        let plan = sample_frame_plan(&dist, n, tau, &mut rng).unwrap();
        let g = build_graph(&dep, &plan).unwrap();
        let nc = decode_noncooperative(&g).collected;
        let tm = decode_temporal(&g).collected;
        let sp = decode_spatial(&g).collected;
        let st = decode_spatiotemporal(&g).collected;
        let gc = decode_spatiotemporal_graph_cleaning(&g).collected;
        for i in 0..n {
            prop_assert!(!nc[i] || tm[i]);
            prop_assert!(!nc[i] || sp[i]);
            prop_assert!(!tm[i] || st[i]);
            prop_assert!(!sp[i] || st[i]);
            prop_assert!(!st[i] || !dep.adjacency(i).is_empty());
            prop_assert_eq!(st[i], gc[i]);
        }
    }

    #[test]
    fn degree_polynomials_stay_in_unit_interval(
        delta in 0.1f64..12.0,
        load in 0.0f64..2.0,
        x in 0.0f64..=1.0,
    ) {
        let dist = TemporalDegreeDistribution::from_pairs(&[(1, 0.25), (2, 0.5), (4, 0.25)]).unwrap();
        let params = AsymptoticParams::new(delta, load, dist).unwrap();
        for v in [
            params.node_poly(x).unwrap(),
            params.edge_poly(x).unwrap(),
            params.check_poly(x).unwrap(),
        ] {
            prop_assert!((0.0..=1.0).contains(&v), "value {} for x={}", v, x);
        }
    }
}
