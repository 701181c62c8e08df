//! Asymptotic analysis: degree-distribution polynomials, the and-or-tree
//! estimate of the collection probability, single-station density
//! evolution with threshold search, and the cooperative threshold bound.
//!
//! In the asymptotic regime (n, m, tau large, radius shrinking so that the
//! mean spatial degree `delta = m r^2 pi` and the load `G = n/(tau m)` stay
//! fixed), the decoding graph has user degrees distributed as
//!
//! ```text
//! node_poly(x)  = sum_q Lambda_q exp(-delta (1 - x^q))
//! edge_poly(x)  = sum_q (q Lambda_q / lambda) x^(q-1) exp(-delta (1 - x^q))
//! check_poly(x) = exp(-G delta lambda (1 - x))
//! ```
//!
//! where `lambda` is the mean temporal degree. The and-or-tree iteration
//! `q_s = edge_poly(p_{s-1})`, `p_s = 1 - check_poly(1 - q_s)` from
//! `p_0 = q_0 = 1` estimates the collection probability as
//! `1 - node_poly(p_S)`. The estimate is a heuristic: the geometric graph
//! is not a uniformly random bipartite graph, so no exactness guarantee
//! exists, but it tracks the simulated system closely at low load.

use crate::error::{Error, Result};
use crate::traffic::TemporalDegreeDistribution;

/// Convergence tolerance for fixed-point iterations.
const FIXPOINT_TOL: f64 = 1e-12;
/// Iteration budget for density evolution inside the threshold search.
const DE_ITERATIONS: usize = 10_000;
/// A load counts as below threshold when density evolution reaches at
/// least this collection probability.
const DE_SUCCESS_PROB: f64 = 1.0 - 1e-4;

/// Parameters of the asymptotic regime.
#[derive(Debug, Clone)]
pub struct AsymptoticParams {
    delta: f64,
    load: f64,
    dist: TemporalDegreeDistribution,
}

impl AsymptoticParams {
    pub fn new(delta: f64, load: f64, dist: TemporalDegreeDistribution) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        if !(load >= 0.0) {
            return Err(Error::invalid(format!("load must be >= 0, got {load}")));
        }
        Ok(Self { delta, load, dist })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn load(&self) -> f64 {
        self.load
    }

    pub fn dist(&self) -> &TemporalDegreeDistribution {
        &self.dist
    }

    fn check_domain(x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("x must lie in [0, 1], got {x}")));
        }
        Ok(())
    }

    /// Node-oriented user degree polynomial
    /// `sum_q Lambda_q exp(-delta (1 - x^q))`.
    pub fn node_poly(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        Ok(self
            .dist
            .support()
            .iter()
            .map(|&(q, p)| p * (-self.delta * (1.0 - x.powi(q as i32))).exp())
            .sum())
    }

    /// Edge-oriented user degree polynomial, the derivative of
    /// [`node_poly`](Self::node_poly) normalized to 1 at `x = 1`:
    /// `sum_q (q Lambda_q / lambda) x^(q-1) exp(-delta (1 - x^q))`.
    pub fn edge_poly(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        let lambda = self.dist.mean_degree();
        Ok(self
            .dist
            .support()
            .iter()
            .map(|&(q, p)| {
                q as f64 * p / lambda
                    * x.powi(q as i32 - 1)
                    * (-self.delta * (1.0 - x.powi(q as i32))).exp()
            })
            .sum())
    }

    /// Edge-oriented check degree polynomial
    /// `exp(-G delta lambda (1 - x))`.
    pub fn check_poly(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        let lambda = self.dist.mean_degree();
        Ok((-self.load * self.delta * lambda * (1.0 - x)).exp())
    }
}

/// Result of the and-or-tree iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndOrOutcome {
    /// Final erasure probability on a check-to-user edge.
    pub p: f64,
    /// Final erasure probability on a user-to-check edge.
    pub q: f64,
    /// Iterations actually run (early stop once `p` moves less than 1e-12).
    pub iterations: usize,
    /// Estimated collection probability `1 - node_poly(p)`.
    pub collect_probability: f64,
}

/// Runs the and-or-tree iteration for at most `max_iterations` steps from
/// `p = q = 1`.
pub fn and_or_tree(params: &AsymptoticParams, max_iterations: usize) -> Result<AndOrOutcome> {
    if max_iterations == 0 {
        return Err(Error::invalid("iteration cap must be at least 1"));
    }
    let mut p = 1.0f64;
    let mut q = 1.0f64;
    let mut iterations = 0;
    for s in 1..=max_iterations {
        q = params.edge_poly(p)?;
        let next = 1.0 - params.check_poly(1.0 - q)?;
        iterations = s;
        let step = (next - p).abs();
        p = next;
        if step < FIXPOINT_TOL {
            break;
        }
    }
    Ok(AndOrOutcome {
        p,
        q,
        iterations,
        collect_probability: 1.0 - params.node_poly(p)?,
    })
}

/// Density evolution for the single-station benchmark system: one receiver
/// hears every user at load `H` users per slot. Iterates
/// `q_s = edge(p_{s-1})`, `p_s = 1 - exp(-H lambda q_s)` and returns the
/// collection probability `1 - node(p_S)`.
pub fn single_station_density_evolution(
    dist: &TemporalDegreeDistribution,
    load: f64,
    max_iterations: usize,
) -> Result<f64> {
    if !(load >= 0.0) {
        return Err(Error::invalid(format!("load must be >= 0, got {load}")));
    }
    if max_iterations == 0 {
        return Err(Error::invalid("iteration cap must be at least 1"));
    }
    let lambda = dist.mean_degree();
    let mut p = 1.0f64;
    for _ in 1..=max_iterations {
        let q = dist.edge_poly(p);
        let next = 1.0 - (-load * lambda * q).exp();
        let step = (next - p).abs();
        p = next;
        if step < FIXPOINT_TOL {
            break;
        }
    }
    Ok(1.0 - dist.node_poly(p))
}

/// Threshold load of the single-station system: the supremum of loads `H`
/// for which density evolution still reaches collection probability
/// `1 - 1e-4` within 10^4 iterations, located by bisection on `[0, 1]` to
/// within `tol`.
pub fn single_station_threshold(dist: &TemporalDegreeDistribution, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let below = |h: f64| -> Result<bool> {
        Ok(single_station_density_evolution(dist, h, DE_ITERATIONS)? >= DE_SUCCESS_PROB)
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if below(hi)? {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Asymptotic probability that a user has at least one adjacent station:
/// `1 - exp(-delta)`.
pub fn coverage_probability(delta: f64) -> f64 {
    1.0 - (-delta).exp()
}

/// Lower bound on the cooperative load threshold in terms of the
/// single-station threshold: `H* / (8 e delta)`. Loads below this value
/// asymptotically reach the full coverage probability.
pub fn load_threshold_lower_bound(delta: f64, single_threshold: f64) -> f64 {
    single_threshold / (8.0 * std::f64::consts::E * delta)
}

/// Lower bound on the peak normalized throughput:
/// `(H* / (8 e)) (1 - exp(-delta)) / delta`.
pub fn peak_throughput_lower_bound(delta: f64, single_threshold: f64) -> f64 {
    single_threshold / (8.0 * std::f64::consts::E) * coverage_probability(delta) / delta
}
