use clap::ValueEnum;
use gtasep::asymptotics::{
    cumulant_ratio, delta_theta, dl_function, dl_slope, dl_support, kpz_ratio_closed_form, legendre_dl,
    scaling_constants, transition_cgf, transition_cgf_range, transition_cumulants,
};
use gtasep::ModelParams;
use rayon::prelude::*;
use serde::Serialize;

use super::{grid, Job};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    /// Cumulant ratio and rescaled cumulants over a theta grid.
    RTheta,
    /// Flow diagram and scaling constants over a density grid.
    Flow,
    /// KPZ scaling function and its convex conjugate.
    Ldf,
    /// Transition-regime generating function at one theta.
    Transition,
}

impl Table {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RTheta => "r-theta",
            Self::Flow => "flow",
            Self::Ldf => "ldf",
            Self::Transition => "transition",
        }
    }
}

pub fn from_config(table: Table, cfg: &mut RunConfig) -> Result<Box<dyn Job>> {
    Ok(match table {
        Table::RTheta => Box::new(RTheta {
            thetas: grid(cfg.get("theta_min", "0.1")?, cfg.get("theta_max", "500")?, cfg.get("points", "40")?, true)?,
            p: cfg.get("p", "0.5")?,
        }),
        Table::Flow => Box::new(Flow {
            params: ModelParams::new(cfg.get("p", "0.5")?, cfg.get("mu", "0.5")?)?,
            densities: grid(cfg.get("c_min", "0.02")?, cfg.get("c_max", "0.98")?, cfg.get("points", "49")?, false)?,
        }),
        Table::Ldf => {
            let (lo, _) = dl_support();
            let z_min: f64 = cfg.get("z_min", "-2")?;
            if z_min <= lo {
                return Err(CliError::Usage(format!("z_min must exceed {lo}")));
            }
            Box::new(Ldf {
                zs: grid(z_min, cfg.get("z_max", "4")?, cfg.get("points", "61")?, false)?,
                ys: grid(cfg.get("y_min", "0.1")?, cfg.get("y_max", "3")?, cfg.get("y_points", "30")?, false)?,
            })
        }
        Table::Transition => Box::new(Transition { theta: cfg.get("theta", "5")?, points: cfg.get("points", "41")? }),
    })
}

struct RTheta {
    thetas: Vec<f64>,
    p: f64,
}

#[derive(Serialize)]
struct RThetaRow {
    theta: f64,
    r: f64,
    r_kpz: f64,
    /// `Delta / p(1-p)`.
    delta_rescaled: f64,
    c2: f64,
    c3: f64,
    c4: f64,
}

impl Job for RTheta {
    fn run(&self, out: &mut Output) -> Result<()> {
        let r_kpz = kpz_ratio_closed_form();
        let pp = self.p * (1.0 - self.p);
        let rows: Vec<RThetaRow> = self
            .thetas
            .par_iter()
            .map(|&theta| {
                let c = transition_cumulants(theta)?;
                Ok(RThetaRow {
                    theta,
                    r: cumulant_ratio(theta)?,
                    r_kpz,
                    delta_rescaled: delta_theta(theta, self.p)? / pp,
                    c2: c[2],
                    c3: c[3],
                    c4: c[4],
                })
            })
            .collect::<gtasep::Result<_>>()?;
        out.table("r_theta", &rows)
    }
}

struct Flow {
    params: ModelParams,
    densities: Vec<f64>,
}

#[derive(Serialize)]
struct FlowRow {
    c: f64,
    j: f64,
    z_minus: f64,
    a: f64,
    b: f64,
    correction: f64,
    amplitude: f64,
    lambda_tilde: f64,
    xi: f64,
    z_star: f64,
}

impl Job for Flow {
    fn run(&self, out: &mut Output) -> Result<()> {
        let rows: Vec<FlowRow> = self
            .densities
            .iter()
            .map(|&c| {
                scaling_constants(&self.params, c).map(|s| FlowRow {
                    c,
                    j: s.j_inf,
                    z_minus: s.z_minus,
                    a: s.a,
                    b: s.b,
                    correction: s.correction,
                    amplitude: s.amplitude,
                    lambda_tilde: s.lambda_tilde,
                    xi: s.xi,
                    z_star: s.z_star,
                })
            })
            .collect::<gtasep::Result<_>>()?;
        out.table("flow", &rows)
    }
}

struct Ldf {
    zs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Serialize)]
struct LdfRow {
    z: f64,
    g: f64,
    slope: f64,
}

#[derive(Serialize)]
struct RateRow {
    y: f64,
    rate: f64,
}

impl Job for Ldf {
    fn run(&self, out: &mut Output) -> Result<()> {
        let rows: Vec<LdfRow> = self
            .zs
            .iter()
            .map(|&z| Ok(LdfRow { z, g: dl_function(z)?, slope: dl_slope(z)? }))
            .collect::<gtasep::Result<_>>()?;
        out.table("ldf", &rows)?;
        let rate: Vec<RateRow> =
            self.ys.iter().map(|&y| Ok(RateRow { y, rate: legendre_dl(y)? })).collect::<gtasep::Result<_>>()?;
        out.table("rate", &rate)
    }
}

struct Transition {
    theta: f64,
    points: usize,
}

#[derive(Serialize)]
struct TransitionRow {
    t: f64,
    g: f64,
}

impl Job for Transition {
    fn run(&self, out: &mut Output) -> Result<()> {
        let (lo, hi) = transition_cgf_range(self.theta)?;
        // stay off the edges, where the parametrization is singular
        let pad = 1e-6 * (hi - lo);
        let rows: Vec<TransitionRow> = grid(lo + pad, hi - pad, self.points, false)?
            .into_iter()
            .map(|t| Ok(TransitionRow { t, g: transition_cgf(self.theta, t)? }))
            .collect::<gtasep::Result<_>>()?;
        out.table("transition", &rows)
    }
}
