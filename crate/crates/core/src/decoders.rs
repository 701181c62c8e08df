//! Peeling decoders over the system graph.
//!
//! Four algorithms are implemented, all as symbolic interference
//! cancellation (each check node holds the set of users superposed in it;
//! subtracting a decoded user just removes it from the set):
//!
//! - **Non-cooperative**: a station decodes a user at a slot only when the
//!   received signal is already clean, with no cancellation at all.
//! - **Temporal SIC**: each station runs standard successive interference
//!   cancellation across its own slots, in isolation from other stations.
//! - **Spatial SIC**: decoding is decoupled across slots; a decoded user is
//!   cancelled at neighbouring stations within the same slot only.
//! - **Spatio-temporal SIC**: the iterative cooperative algorithm. Each
//!   iteration, every station peels its local slots to a fixpoint
//!   (temporal SIC), broadcasts the users it collected to all stations
//!   adjacent to them, then the receiving stations cancel those users from
//!   their local slots (spatial IC). Stations leave once all their checks
//!   are resolved, and the whole process is capped at `tau * m` iterations.
//!
//! A user is *collected* when at least one station decodes it. Every decoder
//! is a peeling process, so the final collected set does not depend on the
//! order in which stations or slots are scanned; [`ScanOrder`] exists so
//! tests can exercise that confluence property.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SystemGraph;

/// Outcome of one decode call.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingResult {
    /// Per user: was it decoded by at least one station?
    pub collected: Vec<bool>,
    /// Per check node: did its residual reach degree 0 under this decoder's
    /// cancellation rules? Degree-0 checks count as resolved from the start.
    pub resolved_checks: Vec<bool>,
    /// Number of peeling passes that ran; at most `tau * m` for the
    /// spatio-temporal decoder.
    pub iterations_used: usize,
    /// Per user: the station that first decoded it. Determined by the scan
    /// order; informational only, never semantic.
    pub collector: Vec<Option<usize>>,
}

impl DecodingResult {
    pub fn collected_count(&self) -> usize {
        self.collected.iter().filter(|&&c| c).count()
    }

    /// Ascending ids of collected users.
    pub fn collected_set(&self) -> Vec<usize> {
        self.collected
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }
}

/// Station and slot processing order; permutations of `0..m` and `0..tau`
/// (slot positions 0-based here). The default is ascending, which makes
/// traces reproducible; the collected set is the same for any order.
#[derive(Debug, Clone)]
pub struct ScanOrder {
    stations: Vec<usize>,
    slots: Vec<usize>,
}

impl ScanOrder {
    pub fn identity(m: usize, tau: usize) -> Self {
        Self {
            stations: (0..m).collect(),
            slots: (0..tau).collect(),
        }
    }

    pub fn new(stations: Vec<usize>, slots: Vec<usize>) -> Result<Self> {
        if !is_permutation(&stations) || !is_permutation(&slots) {
            return Err(Error::invalid("scan order must be a pair of permutations"));
        }
        Ok(Self { stations, slots })
    }

    pub fn shuffled<R: Rng + ?Sized>(m: usize, tau: usize, rng: &mut R) -> Self {
        let mut order = Self::identity(m, tau);
        order.stations.shuffle(rng);
        order.slots.shuffle(rng);
        order
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&x| {
        if x < seen.len() && !seen[x] {
            seen[x] = true;
            true
        } else {
            false
        }
    })
}

/// Trace entry for the spatio-temporal decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub iteration: usize,
    pub station: usize,
    pub kind: TraceKind,
    pub user: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    TemporalCollect,
    SpatialCancel,
    Exit,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TraceKind::TemporalCollect => "temporal-collect",
            TraceKind::SpatialCancel => "spatial-cancel",
            TraceKind::Exit => "exit",
        };
        match self.user {
            Some(u) => write!(f, "s={} station={} {kind} user={u}", self.iteration, self.station),
            None => write!(f, "s={} station={} {kind}", self.iteration, self.station),
        }
    }
}

/// Finds the single remaining user of a degree-1 residual check.
fn lone_user(g: &SystemGraph, check: usize, removed: &HashSet<usize>) -> usize {
    g.check_users(check)
        .iter()
        .copied()
        .find(|u| !removed.contains(u))
        .expect("degree-1 check must have one remaining user")
}

/// Non-cooperative decoding: user `i` is collected iff some check node's
/// only incident user is `i`, evaluated on the original graph.
pub fn decode_noncooperative(g: &SystemGraph) -> DecodingResult {
    decode_noncooperative_ordered(g, &ScanOrder::identity(g.m_stations(), g.tau()))
}

pub fn decode_noncooperative_ordered(g: &SystemGraph, order: &ScanOrder) -> DecodingResult {
    let mut collected = vec![false; g.n_users()];
    let mut collector = vec![None; g.n_users()];
    let mut resolved = vec![false; g.num_checks()];
    for &l in &order.stations {
        for &k in &order.slots {
            let c = l * g.tau() + k;
            match g.check_degree(c) {
                0 => resolved[c] = true,
                1 => {
                    let u = g.check_users(c)[0];
                    if !collected[u] {
                        collected[u] = true;
                        collector[u] = Some(l);
                    }
                    resolved[c] = true;
                }
                _ => {}
            }
        }
    }
    let iterations_used = usize::from(collected.iter().any(|&c| c));
    DecodingResult {
        collected,
        resolved_checks: resolved,
        iterations_used,
        collector,
    }
}

/// Temporal SIC: every station independently peels its own `tau` slots to a
/// fixpoint; a user is collected if any station collects it.
pub fn decode_temporal(g: &SystemGraph) -> DecodingResult {
    decode_temporal_ordered(g, &ScanOrder::identity(g.m_stations(), g.tau()))
}

pub fn decode_temporal_ordered(g: &SystemGraph, order: &ScanOrder) -> DecodingResult {
    let tau = g.tau();
    let mut collected = vec![false; g.n_users()];
    let mut collector = vec![None; g.n_users()];
    let mut resolved = vec![false; g.num_checks()];
    let mut max_rounds = 0usize;
    for &l in &order.stations {
        let base = l * tau;
        let mut deg: Vec<usize> = (0..tau).map(|k| g.check_degree(base + k)).collect();
        let mut removed: HashSet<usize> = HashSet::new();
        let mut rounds = 0usize;
        loop {
            let mut progress = false;
            for &k in &order.slots {
                if deg[k] == 1 {
                    let u = lone_user(g, base + k, &removed);
                    if !collected[u] {
                        collected[u] = true;
                        collector[u] = Some(l);
                    }
                    removed.insert(u);
                    for &c in g.user_checks(u) {
                        if g.station_of(c) == l {
                            deg[c - base] -= 1;
                        }
                    }
                    progress = true;
                }
            }
            if progress {
                rounds += 1;
            } else {
                break;
            }
        }
        for k in 0..tau {
            resolved[base + k] = deg[k] == 0;
        }
        max_rounds = max_rounds.max(rounds);
    }
    DecodingResult {
        collected,
        resolved_checks: resolved,
        iterations_used: max_rounds,
        collector,
    }
}

/// Spatial SIC: decoding is decoupled across slots. Within each slot, a
/// decoded user is cancelled from the checks of its adjacent stations at
/// that slot only; peeling repeats to a per-slot fixpoint.
pub fn decode_spatial(g: &SystemGraph) -> DecodingResult {
    decode_spatial_ordered(g, &ScanOrder::identity(g.m_stations(), g.tau()))
}

pub fn decode_spatial_ordered(g: &SystemGraph, order: &ScanOrder) -> DecodingResult {
    let tau = g.tau();
    let m = g.m_stations();
    let mut collected = vec![false; g.n_users()];
    let mut collector = vec![None; g.n_users()];
    let mut resolved = vec![false; g.num_checks()];
    let mut max_rounds = 0usize;
    for &k in &order.slots {
        // residual degrees of the m checks at this slot, indexed by station
        let mut deg: Vec<usize> = (0..m).map(|l| g.check_degree(l * tau + k)).collect();
        let mut removed: HashSet<usize> = HashSet::new();
        let mut rounds = 0usize;
        loop {
            let mut progress = false;
            for &l in &order.stations {
                if deg[l] == 1 {
                    let u = lone_user(g, l * tau + k, &removed);
                    if !collected[u] {
                        collected[u] = true;
                        collector[u] = Some(l);
                    }
                    removed.insert(u);
                    // same-slot cancellation at every adjacent station
                    for &c in g.user_checks(u) {
                        if c % tau == k {
                            deg[g.station_of(c)] -= 1;
                        }
                    }
                    progress = true;
                }
            }
            if progress {
                rounds += 1;
            } else {
                break;
            }
        }
        for l in 0..m {
            resolved[l * tau + k] = deg[l] == 0;
        }
        max_rounds = max_rounds.max(rounds);
    }
    DecodingResult {
        collected,
        resolved_checks: resolved,
        iterations_used: max_rounds,
        collector,
    }
}

/// Spatio-temporal SIC with the default iteration cap `tau * m` and
/// ascending processing order.
pub fn decode_spatiotemporal(g: &SystemGraph) -> DecodingResult {
    decode_spatiotemporal_with(
        g,
        &ScanOrder::identity(g.m_stations(), g.tau()),
        g.num_checks(),
        None,
    )
}

/// Spatio-temporal SIC collecting a per-iteration trace.
pub fn decode_spatiotemporal_traced(g: &SystemGraph) -> (DecodingResult, Vec<TraceEvent>) {
    let mut trace = Vec::new();
    let res = decode_spatiotemporal_with(
        g,
        &ScanOrder::identity(g.m_stations(), g.tau()),
        g.num_checks(),
        Some(&mut trace),
    );
    (res, trace)
}

/// Full-control variant of the spatio-temporal decoder.
///
/// Runs iterations `s = 1..=cap`. Each iteration has three steps per
/// station: (1) temporal SIC to a local fixpoint plus broadcast of newly
/// collected users to all stations adjacent to them, (2) exit when all
/// local checks are resolved or `s` hit the cap, (3) cancellation of
/// received users that the station did not collect itself. Broadcasts are
/// delivered within the same iteration. The loop ends early as soon as an
/// iteration collects nothing anywhere, which cannot change the outcome.
pub fn decode_spatiotemporal_with(
    g: &SystemGraph,
    order: &ScanOrder,
    cap: usize,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> DecodingResult {
    let tau = g.tau();
    let m = g.m_stations();
    let mut collected = vec![false; g.n_users()];
    let mut collector = vec![None; g.n_users()];
    // residual degree of every check at its owning station
    let mut deg: Vec<usize> = (0..g.num_checks()).map(|c| g.check_degree(c)).collect();
    // users whose contribution has been removed at station l
    let mut removed: Vec<HashSet<usize>> = vec![HashSet::new(); m];
    let mut exited = vec![false; m];
    let mut inbox: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut outbox: Vec<usize> = Vec::new();
    let mut out_this_iter: Vec<Vec<usize>> = vec![Vec::new(); m];

    let mut iterations_used = 0usize;
    for s in 1..=cap {
        iterations_used = s;
        let mut any_collected = false;

        // Step 1: temporal SIC at every active station, then broadcast.
        for &l in &order.stations {
            if exited[l] {
                continue;
            }
            let base = l * tau;
            outbox.clear();
            loop {
                let mut progress = false;
                for &k in &order.slots {
                    if deg[base + k] == 1 {
                        let u = lone_user(g, base + k, &removed[l]);
                        if !collected[u] {
                            collected[u] = true;
                            collector[u] = Some(l);
                        }
                        if let Some(t) = trace.as_deref_mut() {
                            t.push(TraceEvent {
                                iteration: s,
                                station: l,
                                kind: TraceKind::TemporalCollect,
                                user: Some(u),
                            });
                        }
                        removed[l].insert(u);
                        for &c in g.user_checks(u) {
                            if g.station_of(c) == l {
                                deg[c] -= 1;
                            }
                        }
                        outbox.push(u);
                        progress = true;
                        any_collected = true;
                    }
                }
                if !progress {
                    break;
                }
            }
            out_this_iter[l].clear();
            out_this_iter[l].extend_from_slice(&outbox);
            for &u in &outbox {
                for l2 in g.user_stations(u) {
                    inbox[l2].push(u);
                }
            }
        }

        // Steps 2 and 3: exit checks, then spatial cancellations.
        let mut all_exited = true;
        for &l in &order.stations {
            if exited[l] {
                inbox[l].clear();
                continue;
            }
            let base = l * tau;
            let done = (0..tau).all(|k| deg[base + k] == 0);
            if done || s == cap {
                exited[l] = true;
                inbox[l].clear();
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent {
                        iteration: s,
                        station: l,
                        kind: TraceKind::Exit,
                        user: None,
                    });
                }
                continue;
            }
            all_exited = false;
            for u in std::mem::take(&mut inbox[l]) {
                // skips users this station collected itself or already
                // cancelled; removal is idempotent
                if removed[l].contains(&u) {
                    continue;
                }
                removed[l].insert(u);
                for &c in g.user_checks(u) {
                    if g.station_of(c) == l {
                        deg[c] -= 1;
                    }
                }
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent {
                        iteration: s,
                        station: l,
                        kind: TraceKind::SpatialCancel,
                        user: Some(u),
                    });
                }
            }
        }

        if all_exited || !any_collected {
            break;
        }
    }

    let resolved_checks = deg.iter().map(|&d| d == 0).collect();
    DecodingResult {
        collected,
        resolved_checks,
        iterations_used,
        collector,
    }
}

/// Graph-cleaning formulation of spatio-temporal SIC: repeatedly collect
/// any user adjacent to a degree-1 check and delete it together with all
/// its edges. Reaches the same collected set as the message-passing
/// algorithm; kept as an independent reference implementation.
pub fn decode_spatiotemporal_graph_cleaning(g: &SystemGraph) -> DecodingResult {
    let mut collected = vec![false; g.n_users()];
    let mut collector = vec![None; g.n_users()];
    let mut deg: Vec<usize> = (0..g.num_checks()).map(|c| g.check_degree(c)).collect();
    let mut alive: Vec<bool> = vec![true; g.n_users()];
    let mut sweeps = 0usize;
    loop {
        let mut progress = false;
        for c in 0..g.num_checks() {
            if deg[c] == 1 {
                let u = g
                    .check_users(c)
                    .iter()
                    .copied()
                    .find(|&u| alive[u])
                    .expect("degree-1 check must have a live user");
                collected[u] = true;
                collector[u] = Some(g.station_of(c));
                alive[u] = false;
                for &c2 in g.user_checks(u) {
                    deg[c2] -= 1;
                }
                progress = true;
            }
        }
        if progress {
            sweeps += 1;
        } else {
            break;
        }
    }
    let resolved_checks = deg.iter().map(|&d| d == 0).collect();
    DecodingResult {
        collected,
        resolved_checks,
        iterations_used: sweeps,
        collector,
    }
}

/// Throughput bookkeeping for one decode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Collected users divided by `n` (0 for an empty user set).
    pub fraction_collected: f64,
    /// Collected users divided by `tau * m`: this run's contribution to the
    /// normalized throughput estimate.
    pub throughput_contribution: f64,
}

pub fn count_metrics(res: &DecodingResult, g: &SystemGraph) -> Metrics {
    let collected = res.collected_count() as f64;
    let n = g.n_users();
    Metrics {
        fraction_collected: if n == 0 { 0.0 } else { collected / n as f64 },
        throughput_contribution: collected / g.num_checks() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::SystemGraph;

    fn collected(res: &DecodingResult) -> Vec<usize> {
        res.collected_set()
    }

    #[test]
    fn noncoop_single_clean_user() {
        let g = SystemGraph::from_user_incidence(1, 1, &[vec![0]], &[vec![1]]).unwrap();
        let res = decode_noncooperative(&g);
        assert_eq!(collected(&res), vec![0]);
    }

    #[test]
    fn noncoop_two_way_collision() {
        let g =
            SystemGraph::from_user_incidence(1, 1, &[vec![0], vec![0]], &[vec![1], vec![1]])
                .unwrap();
        let res = decode_noncooperative(&g);
        assert!(collected(&res).is_empty());
        assert!(!res.resolved_checks[0]);
    }

    #[test]
    fn fixture_f1_per_decoder() {
        let g = fixtures::f1();
        assert_eq!(collected(&decode_noncooperative(&g)), vec![0]);
        assert_eq!(collected(&decode_temporal(&g)), vec![0, 1]);
        assert_eq!(collected(&decode_spatial(&g)), vec![0]);
        assert_eq!(collected(&decode_spatiotemporal(&g)), vec![0, 1]);
        let m = count_metrics(&decode_temporal(&g), &g);
        assert_eq!(m.fraction_collected, 1.0);
        assert_eq!(m.throughput_contribution, 1.0);
    }

    #[test]
    fn fixture_f2_per_decoder() {
        let g = fixtures::f2();
        assert_eq!(collected(&decode_noncooperative(&g)), vec![0]);
        assert_eq!(collected(&decode_temporal(&g)), vec![0]);
        assert_eq!(collected(&decode_spatial(&g)), vec![0, 1]);
        let res = decode_spatiotemporal(&g);
        assert_eq!(collected(&res), vec![0, 1]);
        assert_eq!(res.collector[0], Some(1));
        assert_eq!(res.collector[1], Some(0));
    }

    #[test]
    fn fixture_f3_per_decoder() {
        let g = fixtures::f3();
        assert_eq!(collected(&decode_noncooperative(&g)), vec![0]);
        assert_eq!(collected(&decode_temporal(&g)), vec![0, 1]);
        assert_eq!(collected(&decode_spatial(&g)), vec![0, 1]);
        assert_eq!(collected(&decode_spatiotemporal(&g)), vec![0, 1]);
    }

    #[test]
    fn f3_trace_narrative() {
        let (_, trace) = decode_spatiotemporal_traced(&fixtures::f3());
        let lines: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
        assert!(lines.contains(&"s=1 station=0 temporal-collect user=0".to_string()));
        assert!(lines.contains(&"s=1 station=0 temporal-collect user=1".to_string()));
        assert!(lines.contains(&"s=1 station=0 exit".to_string()));
    }

    #[test]
    fn f2_trace_shows_spatial_cancel() {
        let (_, trace) = decode_spatiotemporal_traced(&fixtures::f2());
        let lines: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
        assert!(lines.contains(&"s=1 station=1 temporal-collect user=0".to_string()));
        assert!(lines.contains(&"s=1 station=0 spatial-cancel user=0".to_string()));
        assert!(lines.contains(&"s=2 station=0 temporal-collect user=1".to_string()));
    }

    #[test]
    fn temporal_stopping_set() {
        // two users fully colliding in both slots of one station
        let g = SystemGraph::from_user_incidence(
            1,
            2,
            &[vec![0], vec![0]],
            &[vec![1, 2], vec![1, 2]],
        )
        .unwrap();
        assert!(collected(&decode_temporal(&g)).is_empty());
        assert!(collected(&decode_spatiotemporal(&g)).is_empty());
    }

    #[test]
    fn empty_graph_collects_nothing_in_zero_iterations() {
        let g = SystemGraph::from_user_incidence(2, 3, &[], &[]).unwrap();
        let res = decode_spatial(&g);
        assert_eq!(res.collected_count(), 0);
        assert_eq!(res.iterations_used, 0);
        assert!(res.resolved_checks.iter().all(|&r| r));
        let st = decode_spatiotemporal(&g);
        assert_eq!(st.collected_count(), 0);
    }

    #[test]
    fn spatiotemporal_iterations_respect_cap() {
        let g = fixtures::f2();
        let res = decode_spatiotemporal(&g);
        assert!(res.iterations_used <= g.num_checks());
        assert_eq!(res.iterations_used, 2);
    }

    #[test]
    fn degree_zero_user_never_collected() {
        let g = SystemGraph::from_user_incidence(1, 1, &[vec![], vec![0]], &[vec![1], vec![1]])
            .unwrap();
        for res in [
            decode_noncooperative(&g),
            decode_temporal(&g),
            decode_spatial(&g),
            decode_spatiotemporal(&g),
            decode_spatiotemporal_graph_cleaning(&g),
        ] {
            assert!(!res.collected[0]);
            assert!(res.collected[1]);
        }
    }

    #[test]
    fn graph_cleaning_matches_message_passing_on_fixtures() {
        for g in [fixtures::f1(), fixtures::f2(), fixtures::f3()] {
            let a = decode_spatiotemporal(&g);
            let b = decode_spatiotemporal_graph_cleaning(&g);
            assert_eq!(a.collected, b.collected);
            assert_eq!(a.resolved_checks, b.resolved_checks);
        }
    }

    #[test]
    fn count_metrics_on_empty_result() {
        let g = SystemGraph::from_user_incidence(
            1,
            1,
            &[vec![0], vec![0]],
            &[vec![1], vec![1]],
        )
        .unwrap();
        let m = count_metrics(&decode_noncooperative(&g), &g);
        assert_eq!(m.fraction_collected, 0.0);
        assert_eq!(m.throughput_contribution, 0.0);
    }

    #[test]
    fn scan_order_validation() {
        assert!(ScanOrder::new(vec![0, 1], vec![0]).is_ok());
        assert!(ScanOrder::new(vec![0, 0], vec![0]).is_err());
        assert!(ScanOrder::new(vec![0, 2], vec![0]).is_err());
    }
}
