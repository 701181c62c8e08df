//! The bipartite decoding graph: user nodes on one side, (station, slot)
//! check nodes on the other.
//!
//! An edge `(i, (l, t))` exists exactly when station `l` is adjacent to user
//! `i` and user `i` is active at slot `t`, so the signal heard at check
//! `(l, t)` is the superposition of the users on its edge list. Check nodes
//! are flattened to ids `l * tau + (t - 1)`, giving ids in `[0, tau * m)`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::Deployment;
use crate::traffic::FramePlan;

/// Immutable bipartite system graph for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGraph {
    n_users: usize,
    m_stations: usize,
    tau: usize,
    /// Per user, ascending check-node ids.
    user_edges: Vec<Vec<usize>>,
    /// Per check node, ascending user ids.
    check_edges: Vec<Vec<usize>>,
}

impl SystemGraph {
    /// Builds a graph from per-user station adjacency and activation slots
    /// (slots 1-based). Lists must be strictly ascending.
    pub fn from_user_incidence(
        m: usize,
        tau: usize,
        adjacency: &[Vec<usize>],
        activation: &[Vec<usize>],
    ) -> Result<Self> {
        if m == 0 || tau == 0 {
            return Err(Error::invalid("m and tau must be at least 1"));
        }
        if adjacency.len() != activation.len() {
            return Err(Error::invalid(format!(
                "adjacency covers {} users but activation covers {}",
                adjacency.len(),
                activation.len()
            )));
        }
        let n = adjacency.len();
        let mut user_edges = vec![Vec::new(); n];
        let mut check_edges = vec![Vec::new(); tau * m];
        for i in 0..n {
            for list in [&adjacency[i], &activation[i]] {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(format!(
                        "incidence lists for user {i} must be strictly ascending"
                    )));
                }
            }
            if adjacency[i].last().is_some_and(|&l| l >= m) {
                return Err(Error::invalid(format!("user {i} adjacent to station >= m")));
            }
            if activation[i].first().is_some_and(|&t| t < 1)
                || activation[i].last().is_some_and(|&t| t > tau)
            {
                return Err(Error::invalid(format!(
                    "user {i} active outside slots 1..={tau}"
                )));
            }
            for &l in &adjacency[i] {
                for &t in &activation[i] {
                    let c = l * tau + (t - 1);
                    user_edges[i].push(c);
                    check_edges[c].push(i);
                }
            }
        }
        Ok(Self {
            n_users: n,
            m_stations: m,
            tau,
            user_edges,
            check_edges,
        })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn m_stations(&self) -> usize {
        self.m_stations
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Total number of check nodes, `tau * m`.
    pub fn num_checks(&self) -> usize {
        self.tau * self.m_stations
    }

    /// Flat id of check node `(station, slot)`; `slot` is 1-based.
    pub fn check_id(&self, station: usize, slot: usize) -> usize {
        debug_assert!(station < self.m_stations && (1..=self.tau).contains(&slot));
        station * self.tau + (slot - 1)
    }

    pub fn station_of(&self, check: usize) -> usize {
        check / self.tau
    }

    /// 1-based slot of a check id.
    pub fn slot_of(&self, check: usize) -> usize {
        check % self.tau + 1
    }

    /// Check ids incident to `user`, ascending.
    pub fn user_checks(&self, user: usize) -> &[usize] {
        &self.user_edges[user]
    }

    /// User ids incident to `check`, ascending.
    pub fn check_users(&self, check: usize) -> &[usize] {
        &self.check_edges[check]
    }

    pub fn user_degree(&self, user: usize) -> usize {
        self.user_edges[user].len()
    }

    pub fn check_degree(&self, check: usize) -> usize {
        self.check_edges[check].len()
    }

    pub fn total_edges(&self) -> usize {
        self.user_edges.iter().map(|e| e.len()).sum()
    }

    /// Distinct stations adjacent to `user`, ascending (derived from its
    /// edges; empty for degree-0 users).
    pub fn user_stations(&self, user: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &c in &self.user_edges[user] {
            let l = self.station_of(c);
            if out.last() != Some(&l) {
                out.push(l);
            }
        }
        out
    }

    /// Debug dump, one line per check node: `l t: u1 u2 ...`.
    pub fn dump_checks<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for c in 0..self.num_checks() {
            write!(w, "{} {}:", self.station_of(c), self.slot_of(c))?;
            for &u in self.check_users(c) {
                write!(w, " {u}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Builds the decoding graph for a deployment and frame plan covering the
/// same users.
pub fn build_graph(dep: &Deployment, plan: &FramePlan) -> Result<SystemGraph> {
    if dep.n_users() != plan.n_users() {
        return Err(Error::invalid(format!(
            "deployment has {} users but the frame plan has {}",
            dep.n_users(),
            plan.n_users()
        )));
    }
    let adjacency: Vec<Vec<usize>> = (0..dep.n_users())
        .map(|i| dep.adjacency(i).to_vec())
        .collect();
    let activation: Vec<Vec<usize>> = (0..plan.n_users())
        .map(|i| plan.activation(i).to_vec())
        .collect();
    SystemGraph::from_user_incidence(dep.m_stations(), plan.tau(), &adjacency, &activation)
}

/// Summary statistics of check-node degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckDegreeStats {
    pub mean: f64,
    /// Population variance over all check nodes.
    pub variance: f64,
    /// `histogram[d]` = number of checks with degree `d`.
    pub histogram: Vec<usize>,
}

/// Degree statistics over all `tau * m` check nodes.
pub fn empirical_check_degree_stats(g: &SystemGraph) -> CheckDegreeStats {
    let k = g.num_checks();
    let degrees: Vec<usize> = (0..k).map(|c| g.check_degree(c)).collect();
    let max_d = degrees.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0usize; max_d + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    let mean = if k == 0 {
        0.0
    } else {
        degrees.iter().sum::<usize>() as f64 / k as f64
    };
    let variance = if k == 0 {
        0.0
    } else {
        degrees
            .iter()
            .map(|&d| (d as f64 - mean).powi(2))
            .sum::<f64>()
            / k as f64
    };
    CheckDegreeStats {
        mean,
        variance,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{self, Point2D};
    use crate::traffic::{self, TemporalDegreeDistribution};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn user_degree_is_product_of_spatial_and_temporal() {
        // one user adjacent to 2 stations, active at 3 slots -> degree 6
        let g = SystemGraph::from_user_incidence(3, 4, &[vec![0, 2]], &[vec![1, 2, 4]]).unwrap();
        assert_eq!(g.user_degree(0), 6);
        // uncovered user -> degree 0
        let g0 = SystemGraph::from_user_incidence(3, 4, &[vec![]], &[vec![1]]).unwrap();
        assert_eq!(g0.user_degree(0), 0);
    }

    #[test]
    fn rejects_mismatched_user_counts() {
        let users = vec![Point2D::new(0.0, 0.0)];
        let stations = vec![Point2D::new(0.0, 0.05)];
        let dep = Deployment::with_positions(users, stations, 0.1).unwrap();
        let plan = crate::traffic::FramePlan::from_activation(2, vec![vec![1], vec![2]]).unwrap();
        assert!(build_graph(&dep, &plan).is_err());
    }

    #[test]
    fn figure_style_fixture_matches_hand_enumeration() {
        // 4 users, 3 stations, tau = 3, positions chosen by hand.
        let users = vec![
            Point2D::new(-0.30, 0.00),
            Point2D::new(-0.15, 0.05),
            Point2D::new(0.15, 0.00),
            Point2D::new(0.30, -0.05),
        ];
        let stations = vec![
            Point2D::new(-0.25, 0.00),
            Point2D::new(0.05, 0.00),
            Point2D::new(0.25, 0.00),
        ];
        // r = 0.12: U0 ~ {B0}, U1 ~ {B0}, U2 ~ {B1, B2}, U3 ~ {B2}
        let dep = Deployment::with_positions(users, stations, 0.12).unwrap();
        assert_eq!(dep.adjacency(0), &[0]);
        assert_eq!(dep.adjacency(1), &[0]);
        assert_eq!(dep.adjacency(2), &[1, 2]);
        assert_eq!(dep.adjacency(3), &[2]);
        let plan = traffic::FramePlan::from_activation(
            3,
            vec![vec![1, 3], vec![1], vec![2, 3], vec![2]],
        )
        .unwrap();
        let g = build_graph(&dep, &plan).unwrap();
        // manual enumeration of the edge set, check id = l * 3 + (t - 1)
        let expected: Vec<Vec<usize>> = vec![
            vec![0, 2],       // U0 -> (B0,1), (B0,3)
            vec![0],          // U1 -> (B0,1)
            vec![4, 5, 7, 8], // U2 -> (B1,2), (B1,3), (B2,2), (B2,3)
            vec![7],          // U3 -> (B2,2)
        ];
        for (i, exp) in expected.iter().enumerate() {
            assert_eq!(g.user_checks(i), exp.as_slice(), "user {i}");
        }
        assert_eq!(g.check_users(0), &[0, 1]);
        assert_eq!(g.check_users(7), &[2, 3]);
        assert_eq!(g.check_users(1), &[] as &[usize]);
    }

    #[test]
    fn handshake_and_transpose_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dist = TemporalDegreeDistribution::single(2);
        let dep = geometry::build_deployment(400, 12, 0.15, &mut rng).unwrap();
        let plan = traffic::sample_frame_plan(&dist, 400, 10, &mut rng).unwrap();
        let g = build_graph(&dep, &plan).unwrap();
        let user_sum: usize = (0..g.n_users()).map(|i| g.user_degree(i)).sum();
        let check_sum: usize = (0..g.num_checks()).map(|c| g.check_degree(c)).sum();
        assert_eq!(user_sum, check_sum);
        for i in 0..g.n_users() {
            assert_eq!(g.user_degree(i), dep.spatial_degree(i) * plan.temporal_degree(i));
            for &c in g.user_checks(i) {
                assert!(g.check_users(c).contains(&i));
            }
        }
    }

    #[test]
    fn empty_graph_stats() {
        let g = SystemGraph::from_user_incidence(2, 3, &[], &[]).unwrap();
        let stats = empirical_check_degree_stats(&g);
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.histogram, vec![6]);
    }

    #[test]
    fn saturated_single_user_gives_unit_degrees() {
        // single user active in every slot and adjacent to every station
        let g = SystemGraph::from_user_incidence(3, 4, &[vec![0, 1, 2]], &[vec![1, 2, 3, 4]])
            .unwrap();
        let stats = empirical_check_degree_stats(&g);
        assert_eq!(stats.mean, 1.0);
        assert_eq!(stats.variance, 0.0);
        assert_eq!(stats.histogram, vec![0, 12]);
    }

    #[test]
    fn check_id_flattening_roundtrip() {
        let g = SystemGraph::from_user_incidence(4, 5, &[], &[]).unwrap();
        for l in 0..4 {
            for t in 1..=5 {
                let c = g.check_id(l, t);
                assert_eq!(g.station_of(c), l);
                assert_eq!(g.slot_of(c), t);
            }
        }
    }

    #[test]
    fn nominal_station_mean_check_degree_matches_load() {
        // m=100, tau=50, delta=3, Lambda_2=1, G=0.3: checks at full-disc
        // stations have mean degree n * (delta/m) * (lambda/tau) = G delta
        // lambda = 1.8. Boundary stations hear truncated discs, so the test
        // filters to nominal station placements.
        let m = 100;
        let tau = 50;
        let n = 1500; // G = n/(tau m) = 0.3
        let r = geometry::radius_for_mean_degree(3.0, m).unwrap();
        let dist = TemporalDegreeDistribution::single(2);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut sum = 0usize;
        let mut count = 0usize;
        for _ in 0..4 {
            let dep = geometry::build_deployment(n, m, r, &mut rng).unwrap();
            let plan = traffic::sample_frame_plan(&dist, n, tau, &mut rng).unwrap();
            let g = build_graph(&dep, &plan).unwrap();
            for l in 0..m {
                if geometry::is_nominal(dep.station_positions[l], r) {
                    for t in 1..=tau {
                        sum += g.check_degree(g.check_id(l, t));
                        count += 1;
                    }
                }
            }
        }
        let mean = sum as f64 / count as f64;
        assert!(
            (mean - 1.8).abs() < 0.05 * 1.8,
            "nominal mean check degree {mean} not within 5% of 1.8 ({count} checks)"
        );
    }

    #[test]
    fn dump_checks_format() {
        let g = SystemGraph::from_user_incidence(2, 2, &[vec![0, 1]], &[vec![2]]).unwrap();
        let mut buf = Vec::new();
        g.dump_checks(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "0 1:\n0 2: 0\n1 1:\n1 2: 0\n");
    }
}
