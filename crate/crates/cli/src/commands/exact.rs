use gtasep::exact::{exact_report, ExactReport};
use gtasep::{format_rational, ExactParams, Scalar};
use rayon::prelude::*;
use serde::Serialize;

use super::Job;
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::Output;

pub struct Exact {
    ms: Vec<usize>,
    ns: Vec<usize>,
    params: ExactParams,
}

#[derive(Serialize)]
struct OccupationRow {
    m: usize,
    n: usize,
    k: usize,
    p: String,
    p_f64: f64,
}

impl Exact {
    pub fn from_config(cfg: &mut RunConfig) -> Result<Self> {
        let ms = cfg.index_list("m", "1..6")?;
        let ns = cfg.index_list("n", "1..6")?;
        let params = ExactParams::new(cfg.rational("p", "1/2")?, cfg.rational("mu", "1/2")?)?;
        Ok(Self { ms, ns, params })
    }
}

impl Job for Exact {
    fn run(&self, out: &mut Output) -> Result<()> {
        let pairs: Vec<(usize, usize)> = self.ms.iter().flat_map(|&m| self.ns.iter().map(move |&n| (m, n))).collect();
        let reports: Vec<ExactReport> =
            pairs.par_iter().map(|&(m, n)| exact_report(m, n, &self.params)).collect::<gtasep::Result<_>>()?;
        let rows: Vec<_> = reports.iter().map(ExactReport::row).collect();
        out.table("exact", &rows)?;
        let occ: Vec<OccupationRow> = reports
            .iter()
            .flat_map(|r| {
                r.occupation.iter().enumerate().map(move |(k, p)| OccupationRow {
                    m: r.m,
                    n: r.n,
                    k,
                    p: format_rational(p),
                    p_f64: p.to_f64_lossy(),
                })
            })
            .collect();
        out.table("occupation", &occ)
    }
}
