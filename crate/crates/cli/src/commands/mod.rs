mod asymptotics;
mod bethe;
mod exact;
mod sample;
mod simulate;
mod validate;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Output;

pub use asymptotics::Table;

/// A parsed, ready-to-run command. Parsing reads every key first so unknown
/// keys are rejected before any work starts.
pub trait Job {
    fn seed(&self) -> Option<u64> {
        None
    }
    fn run(&self, out: &mut Output) -> Result<()>;
}

pub enum Kind {
    Simulate,
    Exact,
    Bethe,
    Asymptotics(Table),
    Sample,
    Validate,
}

impl Kind {
    pub fn name(&self) -> String {
        match self {
            Self::Simulate => "simulate".into(),
            Self::Exact => "exact".into(),
            Self::Bethe => "bethe".into(),
            Self::Asymptotics(t) => format!("asymptotics {}", t.name()),
            Self::Sample => "sample".into(),
            Self::Validate => "validate".into(),
        }
    }
}

pub fn build(kind: &Kind, cfg: &mut RunConfig) -> Result<Box<dyn Job>> {
    Ok(match kind {
        Kind::Simulate => Box::new(simulate::Simulate::from_config(cfg)?),
        Kind::Exact => Box::new(exact::Exact::from_config(cfg)?),
        Kind::Bethe => Box::new(bethe::Bethe::from_config(cfg)?),
        Kind::Asymptotics(t) => asymptotics::from_config(*t, cfg)?,
        Kind::Sample => Box::new(sample::Sample::from_config(cfg)?),
        Kind::Validate => Box::new(validate::Validate::from_config(cfg)?),
    })
}

/// One row of a `quantity, value, stderr` summary table.
#[derive(Debug, Serialize)]
pub struct SummaryRow {
    pub quantity: &'static str,
    pub value: f64,
    pub stderr: f64,
}

/// `points` values from `lo` to `hi`, log-spaced when `log`.
pub fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 || !(lo <= hi) || (log && !(lo > 0.0)) {
        return Err(CliError::Usage(format!("bad grid [{lo}, {hi}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if log { lo * (hi / lo).powf(step(i)) } else { lo + (hi - lo) * step(i) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_endpoints() {
        let g = grid(0.1, 1000.0, 5, true).unwrap();
        assert!((g[2] - 10.0).abs() < 1e-12 && (g[4] - 1000.0).abs() < 1e-9);
        assert_eq!(grid(-1.0, 1.0, 3, false).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(grid(0.0, 1.0, 3, true).is_err());
        assert!(grid(2.0, 1.0, 3, false).is_err());
    }
}
