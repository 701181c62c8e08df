//! Temporal-degree sampling: how many slots each user transmits in within a
//! frame, and which slots.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};

/// Probability distribution of the temporal degree `q` (number of packet
/// replicas per frame), with finite support.
///
/// Probabilities must be non-negative and sum to 1 within `1e-9`; inputs
/// inside that tolerance are renormalized, anything sloppier is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalDegreeDistribution {
    /// `(q, probability)` pairs, ascending in `q`, zero-probability entries
    /// dropped.
    support: Vec<(usize, f64)>,
    mean: f64,
}

impl TemporalDegreeDistribution {
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("degree distribution must not be empty"));
        }
        let mut support: Vec<(usize, f64)> = Vec::new();
        for &(q, p) in pairs {
            if q == 0 {
                return Err(Error::invalid("temporal degree q = 0 is not allowed"));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::invalid(format!(
                    "probability for q = {q} must be a finite non-negative number, got {p}"
                )));
            }
            if p > 0.0 {
                support.push((q, p));
            }
        }
        support.sort_unstable_by_key(|&(q, _)| q);
        if support.is_empty() {
            return Err(Error::invalid("degree distribution has no positive mass"));
        }
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("duplicate degree in distribution"));
        }
        let sum: f64 = support.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "degree probabilities sum to {sum}, expected 1 within 1e-9"
            )));
        }
        for entry in support.iter_mut() {
            entry.1 /= sum;
        }
        let mean = support.iter().map(|&(q, p)| q as f64 * p).sum();
        Ok(Self { support, mean })
    }

    /// Degenerate distribution with all mass on a single degree `q`.
    pub fn single(q: usize) -> Self {
        Self::from_pairs(&[(q, 1.0)]).expect("single-degree distribution is valid")
    }

    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }

    /// Largest degree with positive probability.
    pub fn q_max(&self) -> usize {
        self.support.last().map(|&(q, _)| q).unwrap_or(0)
    }

    /// Expected temporal degree.
    pub fn mean_degree(&self) -> f64 {
        self.mean
    }

    /// Node-oriented polynomial `sum_q Lambda_q x^q`.
    pub fn node_poly(&self, x: f64) -> f64 {
        self.support
            .iter()
            .map(|&(q, p)| p * x.powi(q as i32))
            .sum()
    }

    /// Edge-oriented polynomial `sum_q (q Lambda_q / lambda) x^(q-1)`.
    pub fn edge_poly(&self, x: f64) -> f64 {
        self.support
            .iter()
            .map(|&(q, p)| q as f64 * p / self.mean * x.powi(q as i32 - 1))
            .sum()
    }

    /// Draws one temporal degree.
    pub fn sample_degree<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(q, p) in &self.support {
            acc += p;
            if u < acc {
                return q;
            }
        }
        self.support.last().unwrap().0
    }
}

/// Activation slots for every user in one frame of `tau` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    tau: usize,
    /// Per user, the ascending set of slots in `1..=tau` where it transmits.
    activation: Vec<Vec<usize>>,
}

impl FramePlan {
    /// Builds a plan from explicit activation sets (each ascending,
    /// duplicate-free, non-empty, within `1..=tau`).
    pub fn from_activation(tau: usize, activation: Vec<Vec<usize>>) -> Result<Self> {
        if tau == 0 {
            return Err(Error::invalid("tau must be at least 1"));
        }
        for (i, slots) in activation.iter().enumerate() {
            if slots.is_empty() {
                return Err(Error::invalid(format!("user {i} has no activation slots")));
            }
            for w in slots.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!(
                        "activation slots for user {i} must be strictly ascending"
                    )));
                }
            }
            if slots[0] < 1 || *slots.last().unwrap() > tau {
                return Err(Error::invalid(format!(
                    "activation slots for user {i} out of range 1..={tau}"
                )));
            }
        }
        Ok(Self { tau, activation })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn n_users(&self) -> usize {
        self.activation.len()
    }

    /// Slots where `user` transmits, ascending, 1-based.
    pub fn activation(&self, user: usize) -> &[usize] {
        &self.activation[user]
    }

    /// Number of slots in which `user` transmits.
    pub fn temporal_degree(&self, user: usize) -> usize {
        self.activation[user].len()
    }
}

/// Samples a frame plan: each user independently draws `q` from `dist` and
/// then a uniformly random `q`-subset of `{1..tau}` without replacement.
pub fn sample_frame_plan<R: Rng + ?Sized>(
    dist: &TemporalDegreeDistribution,
    n: usize,
    tau: usize,
    rng: &mut R,
) -> Result<FramePlan> {
    if tau == 0 {
        return Err(Error::invalid("tau must be at least 1"));
    }
    if dist.q_max() > tau {
        return Err(Error::invalid(format!(
            "degree support reaches q = {} > tau = {tau}",
            dist.q_max()
        )));
    }
    let activation = (0..n)
        .map(|_| {
            let q = dist.sample_degree(rng);
            let mut slots = sample_subset(q, tau, rng);
            slots.sort_unstable();
            slots
        })
        .collect();
    FramePlan::from_activation(tau, activation)
}

/// Uniform `q`-subset of `{1..tau}` via a sparse partial Fisher-Yates
/// shuffle; O(q) time and memory.
fn sample_subset<R: Rng + ?Sized>(q: usize, tau: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(q >= 1 && q <= tau);
    let mut swapped: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(q);
    for i in 0..q {
        let j = rng.gen_range(i..tau);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(vj + 1); // 1-based slots
    }
    out
}
