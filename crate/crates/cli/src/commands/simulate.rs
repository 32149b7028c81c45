use gtasep::sim::{run_ensemble, EnsembleConfig, CHI_BINS};
use gtasep::{Geometry, ModelParams};
use serde::Serialize;

use super::{Job, SummaryRow};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::Output;

pub struct Simulate {
    geometry: Geometry,
    params: ModelParams,
    ensemble: EnsembleConfig,
}

#[derive(Serialize)]
struct CountRow {
    size: usize,
    count: u64,
    freq: f64,
}

#[derive(Serialize)]
struct ChiRow {
    lo: f64,
    hi: f64,
    count: u64,
}

#[derive(Serialize)]
struct LagRow {
    lag: usize,
    value: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct IncrementRow {
    step: usize,
    jumps: u32,
}

fn counts(c: &[u64]) -> Vec<CountRow> {
    let total: u64 = c.iter().sum();
    c.iter()
        .enumerate()
        .map(|(size, &count)| CountRow { size, count, freq: count as f64 / total.max(1) as f64 })
        .collect()
}

impl Simulate {
    pub fn from_config(cfg: &mut RunConfig) -> Result<Self> {
        let l: usize = cfg.get("l", "100")?;
        let m: usize = cfg.get("m", "50")?;
        let geometry = Geometry::from_ring(l, m)?;
        let params = ModelParams::new(cfg.get("p", "0.5")?, cfg.get("mu", "0.5")?)?;
        let ensemble = EnsembleConfig {
            steps: cfg.get("steps", "100000")?,
            warmup: cfg.get("warmup", "10000")?,
            replicas: cfg.get("replicas", "4")?,
            seed: cfg.get("seed", "1")?,
            lags: cfg.list("lags", "1,2,4,8")?,
            snapshot_every: cfg.get("snapshot_every", "100")?,
            batches: cfg.get("batches", "64")?,
            trace: cfg.get("trace", "true")?,
        };
        Ok(Self { geometry, params, ensemble })
    }
}

impl Job for Simulate {
    fn seed(&self) -> Option<u64> {
        Some(self.ensemble.seed)
    }

    fn run(&self, out: &mut Output) -> Result<()> {
        let r = run_ensemble(self.geometry, &self.params, &self.ensemble)?;
        let summary = [
            SummaryRow { quantity: "j_hat", value: r.j_hat.value, stderr: r.j_hat.stderr },
            SummaryRow { quantity: "delta_hat", value: r.delta_hat.value, stderr: r.delta_hat.stderr },
            SummaryRow { quantity: "width_sq", value: r.width_sq.value, stderr: r.width_sq.stderr },
            SummaryRow { quantity: "mean_cluster", value: r.mean_cluster.value, stderr: r.mean_cluster.stderr },
            SummaryRow { quantity: "snapshots", value: r.snapshots as f64, stderr: 0.0 },
        ];
        out.table("summary", &summary)?;
        out.table("clusters", &counts(&r.cluster_counts))?;
        out.table("occupation", &counts(&r.occ_counts))?;
        out.table("hops", &counts(&r.hop_counts))?;
        let w = 1.0 / CHI_BINS as f64;
        let chi: Vec<ChiRow> =
            r.chi_counts.iter().enumerate().map(|(i, &count)| ChiRow { lo: i as f64 * w, hi: (i + 1) as f64 * w, count }).collect();
        out.table("chi", &chi)?;
        let lags: Vec<LagRow> =
            r.two_point.iter().map(|(lag, e)| LagRow { lag: *lag, value: e.value, stderr: e.stderr }).collect();
        out.table("two_point", &lags)?;
        if let Some(t) = &r.trace {
            let rows: Vec<IncrementRow> =
                t.increments.iter().enumerate().map(|(step, &jumps)| IncrementRow { step, jumps }).collect();
            out.table("increments", &rows)?;
        }
        out.json("report", &r)
    }
}
