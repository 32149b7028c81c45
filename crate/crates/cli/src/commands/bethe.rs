use gtasep::bethe::{cgf_parametric, cumulants_from_series, series_coeffs, CgfSeries};
use gtasep::{format_rational, ExactParams, Scalar};
use serde::Serialize;

use super::{grid, Job};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::Output;

pub struct Bethe {
    m: usize,
    n: usize,
    params: ExactParams,
    order: usize,
    n_max: usize,
    b_max: f64,
    points: usize,
}

#[derive(Serialize)]
struct CumulantRow {
    k: usize,
    value: String,
    value_f64: f64,
}

#[derive(Serialize)]
struct SeriesRow {
    k: usize,
    lambda_coeff: String,
    gamma_coeff: String,
}

#[derive(Serialize)]
struct CurveRow {
    b: f64,
    gamma: f64,
    ln_lambda: f64,
    gamma_err: f64,
    ln_lambda_err: f64,
    slope: f64,
}

impl Bethe {
    pub fn from_config(cfg: &mut RunConfig) -> Result<Self> {
        let m = cfg.get("m", "3")?;
        let n = cfg.get("n", "3")?;
        let params = ExactParams::new(cfg.rational("p", "1/2")?, cfg.rational("mu", "1/2")?)?;
        let order = cfg.get("order", "4")?;
        let n_max = cfg.get("n_max", "12")?;
        let b_max = cfg.get("b_max", "0.001")?;
        let points = cfg.get("points", "21")?;
        Ok(Self { m, n, params, order, n_max, b_max, points })
    }
}

fn series_rows(s: &CgfSeries) -> Vec<SeriesRow> {
    (1..=s.n_max)
        .map(|k| SeriesRow {
            k,
            lambda_coeff: format_rational(&s.lambda_coeffs[k]),
            gamma_coeff: format_rational(&s.gamma_coeffs[k]),
        })
        .collect()
}

impl Job for Bethe {
    fn run(&self, out: &mut Output) -> Result<()> {
        let s = series_coeffs(self.m, self.n, &self.params, self.n_max.max(self.order))?;
        let c = cumulants_from_series(&s, self.order)?;
        let rows: Vec<CumulantRow> = c
            .iter()
            .enumerate()
            .map(|(i, x)| CumulantRow { k: i + 1, value: format_rational(x), value_f64: x.to_f64_lossy() })
            .collect();
        out.table("cumulants", &rows)?;
        out.table("series", &series_rows(&s))?;
        let curve: Vec<CurveRow> = grid(-self.b_max, self.b_max, self.points, false)?
            .into_iter()
            .map(|b| {
                cgf_parametric(&s, b).map(|p| CurveRow {
                    b,
                    gamma: p.gamma,
                    ln_lambda: p.ln_lambda,
                    gamma_err: p.gamma_err,
                    ln_lambda_err: p.ln_lambda_err,
                    slope: p.slope,
                })
            })
            .collect::<gtasep::Result<_>>()?;
        out.table("cgf", &curve)
    }
}
