//! Shared setup for the criterion benchmarks.

use aloha_sic_core::geometry::{build_deployment, radius_for_mean_degree};
use aloha_sic_core::graph::{build_graph, SystemGraph};
use aloha_sic_core::traffic::{sample_frame_plan, TemporalDegreeDistribution};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Benchmark system at the reference scale m = tau = 40, delta = 3,
/// Lambda_2 = 1.
pub fn standard_graph(load: f64, seed: u64) -> SystemGraph {
    let (m, tau, delta) = (40, 40, 3.0);
    let n = (load * (m * tau) as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = TemporalDegreeDistribution::single(2);
    let r = radius_for_mean_degree(delta, m).unwrap();
    let dep = build_deployment(n, m, r, &mut rng).unwrap();
    let plan = sample_frame_plan(&dist, n, tau, &mut rng).unwrap();
    build_graph(&dep, &plan).unwrap()
}
