use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::HopSampler;
use super::ring::{step_gtasep, RingState};
use super::stats::{jackknife, mean_stderr};
use super::replica_rng;
use crate::error::{Error, Result};
use crate::{Geometry, ModelParams};

pub const CHI_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Total steps per replica, warmup included.
    pub steps: u64,
    pub warmup: u64,
    pub replicas: usize,
    pub seed: u64,
    pub lags: Vec<usize>,
    /// Steps between configuration snapshots.
    pub snapshot_every: u64,
    /// Disjoint windows for the batch-means variance.
    pub batches: usize,
    /// Keep replica 0's per-step jump counts.
    pub trace: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { steps: 100_000, warmup: 10_000, replicas: 4, seed: 1, lags: vec![1, 2, 4, 8], snapshot_every: 100, batches: 64, trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaTrace {
    pub replica: usize,
    /// Jumps in each measured step.
    pub increments: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub geometry: Geometry,
    pub config: EnsembleConfig,
    /// Mean jumps per step.
    pub j_hat: Estimate,
    /// `Var(Y_t)/(M² t)`.
    pub delta_hat: Estimate,
    pub replica_j: Vec<f64>,
    /// Counts of cluster sizes over snapshots; index is the size.
    pub cluster_counts: Vec<u64>,
    /// Counts of zero-range occupations over snapshots; index is `n`.
    pub occ_counts: Vec<u64>,
    /// Counts of `n/M` over occupied zero-range sites in `CHI_BINS` equal
    /// bins of `(0, 1]`.
    pub chi_counts: Vec<u64>,
    /// Counts of per-step jump totals; index is the total.
    pub hop_counts: Vec<u64>,
    pub two_point: Vec<(usize, Estimate)>,
    pub width_sq: Estimate,
    pub mean_cluster: Estimate,
    pub snapshots: u64,
    pub trace: Option<ReplicaTrace>,
}

impl ObservableReport {
    pub fn cluster_hist(&self) -> Vec<f64> {
        super::stats::normalize(&self.cluster_counts)
    }

    pub fn occ_hist(&self) -> Vec<f64> {
        super::stats::normalize(&self.occ_counts)
    }

    pub fn chi_hist(&self) -> Vec<f64> {
        super::stats::normalize(&self.chi_counts)
    }

    pub fn hop_hist(&self) -> Vec<f64> {
        super::stats::normalize(&self.hop_counts)
    }
}

struct ReplicaResult {
    j: f64,
    delta: f64,
    batch_means: Vec<f64>,
    cluster_counts: Vec<u64>,
    occ_counts: Vec<u64>,
    chi_counts: Vec<u64>,
    hop_counts: Vec<u64>,
    two_point: Vec<f64>,
    two_point_snap: Vec<Vec<f64>>,
    width: Vec<f64>,
    mean_cluster: Vec<f64>,
    snapshots: u64,
    trace: Option<Vec<u32>>,
}

fn run_replica(geometry: &Geometry, kernel: &HopSampler, cfg: &EnsembleConfig, replica: usize) -> Result<ReplicaResult> {
    let (l, m) = (geometry.l, geometry.m);
    let mut rng = replica_rng(cfg.seed, replica as u64);
    let mut state = RingState::random(l, m, &mut rng)?;
    for _ in 0..cfg.warmup {
        step_gtasep(&mut state, kernel, &mut rng)?;
    }
    let measured = cfg.steps - cfg.warmup;
    let batch_len = measured / cfg.batches as u64;
    let mut batch_sums = vec![0.0; cfg.batches];
    let mut hop_counts = vec![0u64; m + 1];
    let mut cluster_counts = vec![0u64; m + 1];
    let mut occ_counts = vec![0u64; m + 1];
    let mut chi_counts = vec![0u64; CHI_BINS];
    let mut two_point_snap = vec![Vec::new(); cfg.lags.len()];
    let mut width = Vec::new();
    let mut mean_cluster = Vec::new();
    let mut trace = (cfg.trace && replica == 0).then(|| Vec::with_capacity(measured as usize));
    let c = m as f64 / l as f64;
    let y0 = state.y_total;
    for t in 0..measured {
        let jumps = step_gtasep(&mut state, kernel, &mut rng)?;
        hop_counts[jumps as usize] += 1;
        let b = (t / batch_len.max(1)) as usize;
        if b < cfg.batches {
            batch_sums[b] += jumps as f64;
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(jumps as u32);
        }
        if (t + 1) % cfg.snapshot_every == 0 {
            let occ = state.occupancy();
            let mut n_cl = 0usize;
            for n in state.to_zrp()?.occupation() {
                let n = *n as usize;
                occ_counts[n] += 1;
                if n > 0 {
                    cluster_counts[n] += 1;
                    n_cl += 1;
                    let bin = ((n as f64 / m as f64) * CHI_BINS as f64).ceil() as usize;
                    chi_counts[bin.clamp(1, CHI_BINS) - 1] += 1;
                }
            }
            mean_cluster.push(m as f64 / n_cl.max(1) as f64);
            for (slot, &k) in two_point_snap.iter_mut().zip(&cfg.lags) {
                let s = (0..l).filter(|&i| occ[i] && occ[(i + k) % l]).count();
                slot.push(s as f64 / l as f64 - c * c);
            }
            let h = state.height_bridge();
            let hb = h.iter().sum::<f64>() / l as f64;
            width.push(h.iter().map(|x| (x - hb).powi(2)).sum::<f64>() / (l as f64 * l as f64));
        }
    }
    let j = (state.y_total - y0) as f64 / measured as f64;
    let used = batch_len as f64;
    let batch_means: Vec<f64> = batch_sums.iter().map(|s| s / used).collect();
    let mb = batch_sums.iter().sum::<f64>() / cfg.batches as f64;
    let var = batch_sums.iter().map(|s| (s - mb).powi(2)).sum::<f64>() / (cfg.batches as f64 - 1.0);
    let delta = var / used / (m as f64 * m as f64);
    let two_point = two_point_snap.iter().map(|v| v.iter().sum::<f64>() / v.len().max(1) as f64).collect();
    Ok(ReplicaResult {
        j,
        delta,
        batch_means,
        cluster_counts,
        occ_counts,
        chi_counts,
        hop_counts,
        two_point,
        two_point_snap,
        width,
        mean_cluster,
        snapshots: measured / cfg.snapshot_every,
        trace,
    })
}

fn add_counts(acc: &mut [u64], x: &[u64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

/// Estimate from per-replica values, or from within-replica samples when a
/// single replica is run.
fn across(per_replica: &[f64], single: &[f64]) -> Estimate {
    if per_replica.len() >= 2 {
        let (value, stderr) = mean_stderr(per_replica);
        Estimate { value, stderr }
    } else {
        let (_, stderr) = mean_stderr(single);
        Estimate { value: per_replica[0], stderr }
    }
}

/// Runs independent replicas from uniformly random initial configurations.
/// `Δ̂` uses batch means within each replica and a jackknife over replicas.
pub fn run_ensemble(geometry: Geometry, params: &ModelParams, cfg: &EnsembleConfig) -> Result<ObservableReport> {
    if cfg.steps <= cfg.warmup {
        return Err(Error::InvalidParameter(format!("steps ({}) must exceed warmup ({})", cfg.steps, cfg.warmup)));
    }
    if cfg.replicas == 0 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    if cfg.batches < 2 || (cfg.steps - cfg.warmup) < cfg.batches as u64 {
        return Err(Error::InvalidParameter("need at least two batches of at least one step".into()));
    }
    if cfg.snapshot_every == 0 {
        return Err(Error::InvalidParameter("snapshot_every must be positive".into()));
    }
    if geometry.m == 0 || geometry.n == 0 {
        return Err(Error::DegenerateConfiguration(format!("{} particles on {} sites", geometry.m, geometry.l)));
    }
    let kernel = HopSampler::new(params)?;
    let results: Vec<ReplicaResult> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_replica(&geometry, &kernel, cfg, r))
        .collect::<Result<_>>()?;

    let m = geometry.m;
    let replica_j: Vec<f64> = results.iter().map(|r| r.j).collect();
    let j_hat = across(&replica_j, &results[0].batch_means);
    let deltas: Vec<f64> = results.iter().map(|r| r.delta).collect();
    let delta_hat = if deltas.len() >= 2 {
        let (value, stderr) = jackknife(&deltas, |v| v.iter().sum::<f64>() / v.len() as f64);
        Estimate { value, stderr }
    } else {
        // Relative error of a variance from B batches.
        Estimate { value: deltas[0], stderr: deltas[0] * (2.0 / (cfg.batches as f64 - 1.0)).sqrt() }
    };

    let mut cluster_counts = vec![0u64; m + 1];
    let mut occ_counts = vec![0u64; m + 1];
    let mut chi_counts = vec![0u64; CHI_BINS];
    let mut hop_counts = vec![0u64; m + 1];
    for r in &results {
        add_counts(&mut cluster_counts, &r.cluster_counts);
        add_counts(&mut occ_counts, &r.occ_counts);
        add_counts(&mut chi_counts, &r.chi_counts);
        add_counts(&mut hop_counts, &r.hop_counts);
    }
    let two_point = cfg
        .lags
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let per: Vec<f64> = results.iter().map(|r| r.two_point[i]).collect();
            (k, across(&per, &results[0].two_point_snap[i]))
        })
        .collect();
    let widths: Vec<f64> = results.iter().map(|r| r.width.iter().sum::<f64>() / r.width.len().max(1) as f64).collect();
    let width_sq = across(&widths, &results[0].width);
    let mcl: Vec<f64> = results.iter().map(|r| r.mean_cluster.iter().sum::<f64>() / r.mean_cluster.len().max(1) as f64).collect();
    let mean_cluster = across(&mcl, &results[0].mean_cluster);
    let snapshots = results.iter().map(|r| r.snapshots).sum();
    let trace = results[0].trace.clone().map(|increments| ReplicaTrace { replica: 0, increments });

    Ok(ObservableReport {
        geometry,
        config: cfg.clone(),
        j_hat,
        delta_hat,
        replica_j,
        cluster_counts,
        occ_counts,
        chi_counts,
        hop_counts,
        two_point,
        width_sq,
        mean_cluster,
        snapshots,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density_map;

    #[test]
    fn single_walker() {
        let g = Geometry::from_ring(7, 1).unwrap();
        let p = ModelParams::new(0.3, 0.6).unwrap();
        let cfg = EnsembleConfig { steps: 400_000, warmup: 0, replicas: 4, seed: 3, ..Default::default() };
        let r = run_ensemble(g, &p, &cfg).unwrap();
        assert!(r.j_hat.z_score(0.3) < 3.0, "{:?}", r.j_hat);
        assert!(r.delta_hat.z_score(0.21) < 3.0, "{:?}", r.delta_hat);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = density_map(4, 6).unwrap();
        let p = ModelParams::new(0.5, 0.2).unwrap();
        let cfg = EnsembleConfig { steps: 5_000, warmup: 100, replicas: 3, seed: 42, trace: true, ..Default::default() };
        let a = run_ensemble(g, &p, &cfg).unwrap();
        let b = run_ensemble(g, &p, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn histograms_normalize() {
        let g = density_map(5, 7).unwrap();
        let p = ModelParams::new(0.6, 0.7).unwrap();
        let cfg = EnsembleConfig { steps: 20_000, warmup: 1000, replicas: 2, seed: 9, ..Default::default() };
        let r = run_ensemble(g, &p, &cfg).unwrap();
        for h in [r.cluster_hist(), r.occ_hist(), r.chi_hist(), r.hop_hist()] {
            assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let total: usize = r.cluster_counts.iter().enumerate().map(|(k, &c)| k * c as usize).sum();
        assert_eq!(total as u64, 5 * r.snapshots);
    }

    #[test]
    fn config_checks() {
        let g = density_map(2, 2).unwrap();
        let p = ModelParams::new(0.5, 0.5).unwrap();
        let bad = EnsembleConfig { steps: 10, warmup: 10, ..Default::default() };
        assert!(run_ensemble(g, &p, &bad).is_err());
        let g0 = density_map(0, 3).unwrap();
        assert!(matches!(run_ensemble(g0, &p, &EnsembleConfig::default()), Err(Error::DegenerateConfiguration(_))));
    }
}
