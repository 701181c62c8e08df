//! Monte Carlo experiment runner: load sweeps over the four decoders,
//! aggregation, CSV output, and the single-station benchmark simulation.
//!
//! Runs are paired: for each load point and run index one graph is built
//! and every enabled decoder runs on that same graph. Each run draws its
//! randomness from a dedicated stream derived from
//! `(master_seed, point_index, run_index)`, so results do not depend on
//! execution order or on how many worker threads are used.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{and_or_tree, AsymptoticParams};
use crate::decoders::{
    decode_noncooperative, decode_spatial, decode_spatiotemporal, decode_temporal,
};
use crate::error::{Error, Result};
use crate::geometry::{build_deployment, radius_for_mean_degree};
use crate::graph::{build_graph, SystemGraph};
use crate::traffic::{sample_frame_plan, TemporalDegreeDistribution};

/// The four decoding algorithms, in their canonical (alphabetical) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecoderKind {
    #[serde(rename = "noncoop")]
    Noncoop,
    #[serde(rename = "spatial")]
    Spatial,
    #[serde(rename = "spatiotemporal")]
    Spatiotemporal,
    #[serde(rename = "temporal")]
    Temporal,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [
        DecoderKind::Noncoop,
        DecoderKind::Spatial,
        DecoderKind::Spatiotemporal,
        DecoderKind::Temporal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Noncoop => "noncoop",
            DecoderKind::Spatial => "spatial",
            DecoderKind::Spatiotemporal => "spatiotemporal",
            DecoderKind::Temporal => "temporal",
        }
    }

    pub fn decode(&self, g: &SystemGraph) -> crate::decoders::DecodingResult {
        match self {
            DecoderKind::Noncoop => decode_noncooperative(g),
            DecoderKind::Spatial => decode_spatial(g),
            DecoderKind::Spatiotemporal => decode_spatiotemporal(g),
            DecoderKind::Temporal => decode_temporal(g),
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown decoder '{s}'")))
    }
}

fn default_runs() -> usize {
    30
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_decoders() -> Vec<DecoderKind> {
    DecoderKind::ALL.to_vec()
}

/// Default load grid 0.05..=1.00 in steps of 0.05.
fn default_load_grid() -> Vec<f64> {
    (1..=20).map(|k| k as f64 * 0.05).collect()
}

/// One sweep configuration; the JSON schema follows the field names, with
/// the load grid under the key `G_values`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub tau: usize,
    pub delta: f64,
    /// `(q, probability)` pairs of the temporal degree distribution.
    pub dist: Vec<(usize, f64)>,
    #[serde(rename = "G_values", default = "default_load_grid")]
    pub load_grid: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs_per_point: usize,
    /// Quality-of-service slack for the maximal reliable load.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub master_seed: u64,
    #[serde(default = "default_decoders")]
    pub decoders: Vec<DecoderKind>,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn distribution(&self) -> Result<TemporalDegreeDistribution> {
        TemporalDegreeDistribution::from_pairs(&self.dist)
            .map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.tau == 0 {
            return Err(Error::config("m and tau must be at least 1"));
        }
        let dist = self.distribution()?;
        if dist.q_max() > self.tau {
            return Err(Error::config(format!(
                "degree support reaches q = {} > tau = {}",
                dist.q_max(),
                self.tau
            )));
        }
        radius_for_mean_degree(self.delta, self.m).map_err(|e| Error::config(e.to_string()))?;
        if self.load_grid.is_empty() || self.load_grid.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::config("G_values must be non-empty with G >= 0"));
        }
        if self.runs_per_point == 0 {
            return Err(Error::config("runs_per_point must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon must lie in (0, 1)"));
        }
        if self.decoders.is_empty() {
            return Err(Error::config("at least one decoder must be enabled"));
        }
        let mut sorted = self.decoders.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.decoders.len() {
            return Err(Error::config("duplicate decoder in config"));
        }
        Ok(())
    }

    /// Number of users realizing load `g`: `round(g * tau * m)`.
    pub fn users_for_load(&self, g: f64) -> usize {
        (g * (self.tau * self.m) as f64).round() as usize
    }
}

/// Aggregated results for one (load, decoder) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSweepRecord {
    /// Requested grid load.
    pub load: f64,
    /// Realized number of users, `round(load * tau * m)`.
    pub n: usize,
    pub decoder: DecoderKind,
    pub mean_t: f64,
    pub std_t: f64,
    pub mean_p_coll: f64,
    pub std_p_coll: f64,
    pub runs: usize,
    /// And-or-tree estimate of the collection probability at the realized
    /// load; attached to spatio-temporal rows only.
    pub heuristic_p_coll: Option<f64>,
}

/// Random stream for one Monte Carlo run. Streams are independent across
/// `(point, run)` pairs under a fixed master seed.
pub fn run_rng(master_seed: u64, point: usize, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((point as u64) << 32) | run as u64);
    rng
}

/// Collected-user counts of one run, aligned with the enabled decoders.
struct RunCounts {
    collected: Vec<usize>,
}

fn run_once(
    cfg: &ExperimentConfig,
    dist: &TemporalDegreeDistribution,
    radius: f64,
    n: usize,
    point: usize,
    run: usize,
) -> Result<RunCounts> {
    if n == 0 {
        return Ok(RunCounts {
            collected: vec![0; cfg.decoders.len()],
        });
    }
    let mut rng = run_rng(cfg.master_seed, point, run);
    let dep = build_deployment(n, cfg.m, radius, &mut rng)?;
    let plan = sample_frame_plan(dist, n, cfg.tau, &mut rng)?;
    let graph = build_graph(&dep, &plan)?;
    let collected = cfg
        .decoders
        .iter()
        .map(|d| d.decode(&graph).collected_count())
        .collect();
    Ok(RunCounts { collected })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the configured sweep and returns one record per (load, decoder),
/// sorted by load then decoder name. Runs execute on the rayon pool; the
/// output is identical for any worker count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<LoadSweepRecord>> {
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let radius = radius_for_mean_degree(cfg.delta, cfg.m)?;
    let checks = (cfg.tau * cfg.m) as f64;

    let jobs: Vec<(usize, usize)> = (0..cfg.load_grid.len())
        .flat_map(|p| (0..cfg.runs_per_point).map(move |r| (p, r)))
        .collect();
    let outcomes: Vec<Result<RunCounts>> = jobs
        .par_iter()
        .map(|&(point, run)| {
            let n = cfg.users_for_load(cfg.load_grid[point]);
            run_once(cfg, &dist, radius, n, point, run)
        })
        .collect();

    let mut records = Vec::with_capacity(cfg.load_grid.len() * cfg.decoders.len());
    for (point, &g) in cfg.load_grid.iter().enumerate() {
        let n = cfg.users_for_load(g);
        let g_effective = n as f64 / checks;
        // heuristic at the realized load, iteration cap tau * m
        let params = AsymptoticParams::new(cfg.delta, g_effective, dist.clone())?;
        let heuristic = and_or_tree(&params, cfg.tau * cfg.m)?.collect_probability;
        for (di, &decoder) in cfg.decoders.iter().enumerate() {
            let mut ts = Vec::with_capacity(cfg.runs_per_point);
            let mut ps = Vec::with_capacity(cfg.runs_per_point);
            for run in 0..cfg.runs_per_point {
                let counts = match &outcomes[point * cfg.runs_per_point + run] {
                    Ok(c) => c,
                    Err(e) => return Err(Error::config(e.to_string())),
                };
                let c = counts.collected[di] as f64;
                ts.push(c / checks);
                ps.push(if n == 0 { 0.0 } else { c / n as f64 });
            }
            let (mean_t, std_t) = mean_and_std(&ts);
            let (mean_p_coll, std_p_coll) = mean_and_std(&ps);
            records.push(LoadSweepRecord {
                load: g,
                n,
                decoder,
                mean_t,
                std_t,
                mean_p_coll,
                std_p_coll,
                runs: cfg.runs_per_point,
                heuristic_p_coll: (decoder == DecoderKind::Spatiotemporal).then_some(heuristic),
            });
        }
    }
    records.sort_by(|a, b| {
        a.load
            .partial_cmp(&b.load)
            .unwrap()
            .then_with(|| a.decoder.name().cmp(b.decoder.name()))
    });
    Ok(records)
}

/// Largest load at which the mean collection probability still reaches
/// `1 - epsilon`, refined by linear interpolation toward the first failing
/// grid point. `None` when no swept load qualifies, which callers report
/// as 0. Records must belong to one decoder and be sorted by load.
pub fn max_reliable_load(records: &[LoadSweepRecord], epsilon: f64) -> Result<Option<f64>> {
    if records.is_empty() {
        return Err(Error::invalid("record list must not be empty"));
    }
    if records.windows(2).any(|w| w[0].load > w[1].load) {
        return Err(Error::invalid("records must be sorted by load"));
    }
    let target = 1.0 - epsilon;
    let last_ok = records.iter().rposition(|r| r.mean_p_coll >= target);
    let Some(i) = last_ok else {
        return Ok(None);
    };
    if i + 1 >= records.len() {
        return Ok(Some(records[i].load));
    }
    let (a, b) = (&records[i], &records[i + 1]);
    let t = (a.mean_p_coll - target) / (a.mean_p_coll - b.mean_p_coll);
    Ok(Some(a.load + (b.load - a.load) * t))
}

/// Writes records as CSV: header
/// `G,n,decoder,mean_T,std_T,mean_P_coll,std_P_coll,runs,heuristic_P_coll`,
/// floats with six decimals, rows ordered by load then decoder name. The
/// same records always produce byte-identical output.
pub fn emit_csv(records: &[LoadSweepRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut order: Vec<&LoadSweepRecord> = records.iter().collect();
    order.sort_by(|a, b| {
        a.load
            .partial_cmp(&b.load)
            .unwrap()
            .then_with(|| a.decoder.name().cmp(b.decoder.name()))
    });
    let write = || -> std::io::Result<()> {
        writeln!(
            w,
            "G,n,decoder,mean_T,std_T,mean_P_coll,std_P_coll,runs,heuristic_P_coll"
        )?;
        for r in order {
            let heuristic = r
                .heuristic_p_coll
                .map(|h| format!("{h:.6}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{:.6},{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
                r.load, r.n, r.decoder, r.mean_t, r.std_t, r.mean_p_coll, r.std_p_coll, r.runs,
                heuristic
            )?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Graph of the single-station benchmark: one receiver hears all `n`
/// users; slots are drawn from `dist` as usual.
pub fn single_station_graph<R: rand::Rng + ?Sized>(
    dist: &TemporalDegreeDistribution,
    n: usize,
    tau: usize,
    rng: &mut R,
) -> Result<SystemGraph> {
    let plan = sample_frame_plan(dist, n, tau, rng)?;
    let adjacency = vec![vec![0usize]; n];
    let activation: Vec<Vec<usize>> = (0..n).map(|i| plan.activation(i).to_vec()).collect();
    SystemGraph::from_user_incidence(1, tau, &adjacency, &activation)
}

/// Aggregate result of the single-station simulation at one load.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleStationRecord {
    /// Requested load (users per slot).
    pub load: f64,
    pub n: usize,
    pub mean_throughput: f64,
    pub mean_collect_probability: f64,
    pub runs: usize,
}

/// Simulates the single-station system with temporal SIC across the given
/// loads (`n = round(load * tau)` users per run).
pub fn simulate_single_station(
    dist: &TemporalDegreeDistribution,
    loads: &[f64],
    tau: usize,
    runs: usize,
    master_seed: u64,
) -> Result<Vec<SingleStationRecord>> {
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    loads
        .par_iter()
        .enumerate()
        .map(|(point, &h)| {
            if !(h >= 0.0) {
                return Err(Error::invalid(format!("load must be >= 0, got {h}")));
            }
            let n = (h * tau as f64).round() as usize;
            let mut t_sum = 0.0;
            let mut p_sum = 0.0;
            for run in 0..runs {
                let collected = if n == 0 {
                    0
                } else {
                    let mut rng = run_rng(master_seed, point, run);
                    let g = single_station_graph(dist, n, tau, &mut rng)?;
                    decode_temporal(&g).collected_count()
                };
                t_sum += collected as f64 / tau as f64;
                p_sum += if n == 0 { 0.0 } else { collected as f64 / n as f64 };
            }
            Ok(SingleStationRecord {
                load: h,
                n,
                mean_throughput: t_sum / runs as f64,
                mean_collect_probability: p_sum / runs as f64,
                runs,
            })
        })
        .collect()
}
