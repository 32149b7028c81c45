use gtasep::asymptotics::{amplitude, covariance_finite, density_finite, width_finite, z_star};
use gtasep::sim::stats::mean_stderr;
use gtasep::sim::{replica_rng, StationarySampler};
use gtasep::ModelParams;
use rayon::prelude::*;
use serde::Serialize;

use super::Job;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Output;

/// Fixed chunking keeps results independent of the thread count.
const CHUNKS: usize = 64;

pub struct Sample {
    l: usize,
    params: ModelParams,
    c: f64,
    samples: usize,
    lags: Vec<usize>,
    seed: u64,
}

#[derive(Serialize)]
struct CovRow {
    lag: usize,
    empirical: f64,
    stderr: f64,
    exact: f64,
}

#[derive(Serialize)]
struct SampleSummaryRow {
    quantity: &'static str,
    empirical: f64,
    stderr: f64,
    exact: f64,
}

/// Per-sample density, pair densities at each lag and bridge width.
struct Draw {
    density: f64,
    pairs: Vec<f64>,
    width: f64,
}

impl Sample {
    pub fn from_config(cfg: &mut RunConfig) -> Result<Self> {
        let l = cfg.get("l", "512")?;
        let params = ModelParams::new(cfg.get("p", "0.5")?, cfg.get("mu", "0.5")?)?;
        let c = cfg.get("c", "0.5")?;
        let samples: usize = cfg.get("samples", "2000")?;
        let lags: Vec<usize> = cfg.list("lags", "1,2,4,8,16")?;
        let seed = cfg.get("seed", "1")?;
        if samples < 2 {
            return Err(CliError::Usage("samples must be at least 2".into()));
        }
        if let Some(&k) = lags.iter().find(|&&k| k >= l) {
            return Err(CliError::Usage(format!("lag {k} must be below L = {l}")));
        }
        Ok(Self { l, params, c, samples, lags, seed })
    }

    fn draws(&self) -> Result<Vec<Draw>> {
        let nu = *self.params.nu();
        let sampler = StationarySampler::new(self.l, &self.params, z_star(nu, self.c)?)?;
        let l = self.l;
        let chunks: Vec<Vec<Draw>> = (0..CHUNKS)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = replica_rng(self.seed, chunk as u64);
                let count = self.samples / CHUNKS + usize::from(chunk < self.samples % CHUNKS);
                (0..count)
                    .map(|_| {
                        let s = sampler.sample(&mut rng);
                        let occ = s.occupancy();
                        let pairs = self
                            .lags
                            .iter()
                            .map(|&k| (0..l).filter(|&i| occ[i] && occ[(i + k) % l]).count() as f64 / l as f64)
                            .collect();
                        let h = s.height_bridge();
                        let hm = h.iter().sum::<f64>() / l as f64;
                        let width = h.iter().map(|x| (x - hm).powi(2)).sum::<f64>() / (l * l) as f64;
                        Draw { density: s.particles() as f64 / l as f64, pairs, width }
                    })
                    .collect()
            })
            .collect();
        Ok(chunks.into_iter().flatten().collect())
    }
}

impl Job for Sample {
    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn run(&self, out: &mut Output) -> Result<()> {
        let nu = *self.params.nu();
        let draws = self.draws()?;
        let dens: Vec<f64> = draws.iter().map(|d| d.density).collect();
        let (d_mean, d_err) = mean_stderr(&dens);
        let exact = covariance_finite(nu, self.c, self.l, &self.lags)?;
        let rows: Vec<CovRow> = self
            .lags
            .iter()
            .enumerate()
            .map(|(j, &lag)| {
                // E[a] - E[d]^2, error by the delta method
                let a: Vec<f64> = draws.iter().map(|d| d.pairs[j]).collect();
                let y: Vec<f64> = draws.iter().map(|d| d.pairs[j] - 2.0 * d_mean * d.density).collect();
                let (a_mean, _) = mean_stderr(&a);
                let (_, stderr) = mean_stderr(&y);
                CovRow { lag, empirical: a_mean - d_mean * d_mean, stderr, exact: exact[j] }
            })
            .collect();
        out.table("covariance", &rows)?;
        let widths: Vec<f64> = draws.iter().map(|d| d.width).collect();
        let (w, w_err) = mean_stderr(&widths);
        let summary = [
            SampleSummaryRow {
                quantity: "density",
                empirical: d_mean,
                stderr: d_err,
                exact: density_finite(nu, self.c, self.l)?,
            },
            SampleSummaryRow { quantity: "width_sq", empirical: w, stderr: w_err, exact: width_finite(nu, self.c, self.l)? },
            SampleSummaryRow { quantity: "amplitude_over_12", empirical: f64::NAN, stderr: f64::NAN, exact: amplitude(nu, self.c)? / 12.0 },
        ];
        out.table("summary", &summary)
    }
}
