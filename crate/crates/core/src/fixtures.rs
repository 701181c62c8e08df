//! Hand-verified decoding fixtures, small enough to peel by hand.
//!
//! - **F1**: one station, two users, two slots. U0 transmits at slots 1 and
//!   2, U1 at slot 1 only. Temporal SIC collects both; without cancellation
//!   only U0 is decodable.
//! - **F2**: two stations, two users, one slot. U0 is heard by both
//!   stations, U1 only by station 0. Spatial cancellation is required to
//!   recover U1.
//! - **F3**: two stations, two users, two slots. U0 is heard by both
//!   stations and transmits twice; U1 is heard by station 0 at slot 1.

use crate::decoders::{
    count_metrics, decode_noncooperative, decode_spatial, decode_spatiotemporal_traced,
    decode_temporal, DecodingResult,
};
use crate::graph::SystemGraph;

/// F1: 1 station, 2 users, tau = 2; U0 active {1,2}, U1 active {1}.
pub fn f1() -> SystemGraph {
    SystemGraph::from_user_incidence(1, 2, &[vec![0], vec![0]], &[vec![1, 2], vec![1]])
        .expect("fixture F1 is well-formed")
}

/// F2: 2 stations, 2 users, tau = 1; U0 adjacent to both stations, U1 to
/// station 0 only; both active at slot 1.
pub fn f2() -> SystemGraph {
    SystemGraph::from_user_incidence(2, 1, &[vec![0, 1], vec![0]], &[vec![1], vec![1]])
        .expect("fixture F2 is well-formed")
}

/// F3: 2 stations, 2 users, tau = 2; U0 adjacent to both, active {1,2};
/// U1 adjacent to station 0, active {1}.
pub fn f3() -> SystemGraph {
    SystemGraph::from_user_incidence(2, 2, &[vec![0, 1], vec![0]], &[vec![1, 2], vec![1]])
        .expect("fixture F3 is well-formed")
}

fn users(res: &DecodingResult) -> String {
    let set = res.collected_set();
    if set.is_empty() {
        "none".to_string()
    } else {
        set.iter()
            .map(|u| format!("U{u}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Runs all four decoders on every fixture and formats the results plus the
/// spatio-temporal trace; backs the `fixtures` CLI subcommand.
pub fn report() -> String {
    let mut out = String::new();
    for (name, desc, g) in [
        ("F1", "1 station, 2 users, tau=2; U0 active {1,2}, U1 active {1}", f1()),
        ("F2", "2 stations, 2 users, tau=1; U0 heard by both, U1 by B0 only", f2()),
        ("F3", "2 stations, 2 users, tau=2; U0 ~ {B0,B1} active {1,2}, U1 ~ {B0} active {1}", f3()),
    ] {
        out.push_str(&format!("fixture {name}: {desc}\n"));
        let nc = decode_noncooperative(&g);
        let tm = decode_temporal(&g);
        let sp = decode_spatial(&g);
        let (st, trace) = decode_spatiotemporal_traced(&g);
        out.push_str(&format!("  noncoop        collected: {}\n", users(&nc)));
        out.push_str(&format!("  temporal       collected: {}\n", users(&tm)));
        out.push_str(&format!("  spatial        collected: {}\n", users(&sp)));
        let metrics = count_metrics(&st, &g);
        out.push_str(&format!(
            "  spatiotemporal collected: {} (T contribution {:.3})\n",
            users(&st),
            metrics.throughput_contribution
        ));
        out.push_str("  spatiotemporal trace:\n");
        for event in &trace {
            out.push_str(&format!("    {event}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_covers_all_fixtures() {
        let text = report();
        for needle in ["fixture F1", "fixture F2", "fixture F3", "temporal-collect"] {
            assert!(text.contains(needle), "missing {needle:?} in report");
        }
    }
}
