//! Desk-scale cross-validation suite: exact identities in rational mode, a
//! few floating-point identities, and short Monte Carlo checks.

use gtasep::asymptotics::{
    amplitude, b_from_amplitude, constant_a, constant_b, covariance_finite, cumulant_ratio, current_correction,
    dl_curvature, kpz_ratio_closed_form, saddle_points, z_star, z_star_from_saddle,
};
use gtasep::bethe::{cumulants_from_series, series_coeffs};
use gtasep::exact::{diffusion_exact, gauss_2f1_terminating, mean_jumps, partition_function};
use gtasep::oracle::{stationary_current, JumpResolvedChain, DEFAULT_STATE_CAP};
use gtasep::scalar::{int, ratio, Rational};
use gtasep::sim::stats::mean_stderr;
use gtasep::sim::{replica_rng, run_ensemble, EnsembleConfig, StationarySampler};
use gtasep::{density_map, ExactParams, ModelParams, Scalar};
use serde::Serialize;

use super::Job;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Output;

pub struct Validate {
    seed: u64,
    mc_steps: u64,
    replicas: usize,
    samples: usize,
    /// Mutation switch: the product measure is built with `-nu`.
    inject_nu_sign_flip: bool,
}

#[derive(Debug, Serialize)]
struct CheckRow {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    passed: bool,
    checks: Vec<CheckRow>,
}

type Outcome = gtasep::Result<std::result::Result<(), String>>;

fn grid() -> Vec<ExactParams> {
    let mut out = Vec::new();
    for p in [ratio(1, 3), ratio(1, 2)] {
        for mu in [int(0), ratio(1, 4), ratio(2, 3)] {
            out.push(ExactParams::new(p.clone(), mu).expect("grid values are probabilities"));
        }
    }
    out
}

fn first_failure(fails: Vec<String>) -> std::result::Result<(), String> {
    match fails.len() {
        0 => Ok(()),
        k => Err(format!("{k} failures, first: {}", fails[0])),
    }
}

fn enumerate_z(left: usize, sites: usize, nu: &Rational) -> Rational {
    if sites == 0 {
        return if left == 0 { int(1) } else { int(0) };
    }
    (0..=left)
        .map(|k| if k == 0 { int(1) } else { int(1) - nu } * enumerate_z(left - k, sites - 1, nu))
        .sum()
}

fn partition_enumeration() -> Outcome {
    let mut fails = Vec::new();
    for nu in [int(0), ratio(1, 2), ratio(-1, 2)] {
        for m in 1..10usize {
            for n in 1..=10 - m {
                if partition_function(m, n, &nu)? != enumerate_z(m, n, &nu) {
                    fails.push(format!("Z({m},{n}) at nu = {nu}"));
                }
            }
        }
    }
    Ok(first_failure(fails))
}

/// The chain's exact stationary vector is the product measure `prod f(n_i)`.
fn phi_factorization(flip: bool) -> Outcome {
    let mut fails = Vec::new();
    for q in grid() {
        let nu = if flip { -q.nu().clone() } else { q.nu().clone() };
        for (m, n) in [(2, 3), (3, 3)] {
            let chain = JumpResolvedChain::build(m, n, &q, DEFAULT_STATE_CAP)?;
            let pi = chain.stationary_exact()?;
            let weights: Vec<Rational> = chain
                .index()
                .states()
                .iter()
                .map(|s| s.iter().map(|&k| if k == 0 { int(1) } else { int(1) - &nu }).product())
                .collect();
            let z: Rational = weights.iter().sum();
            if z == int(0) || weights.iter().zip(&pi).any(|(w, p)| w / &z != *p) {
                fails.push(format!("({m},{n}) p={} mu={}", q.p(), q.mu()));
            }
        }
    }
    Ok(first_failure(fails))
}

fn current_triangle() -> Outcome {
    let mut fails = Vec::new();
    for q in grid() {
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let j = mean_jumps(m, n, &q)?;
            let c1 = cumulants_from_series(&series_coeffs(m, n, &q, 2)?, 1)?.remove(0);
            if j != stationary_current(m, n, &q)? || j != c1 {
                fails.push(format!("({m},{n}) p={} mu={}", q.p(), q.mu()));
            }
        }
    }
    Ok(first_failure(fails))
}

fn diffusion_bethe() -> Outcome {
    let mut fails = Vec::new();
    for q in grid() {
        for (m, n) in [(2, 2), (3, 3)] {
            let c2 = cumulants_from_series(&series_coeffs(m, n, &q, 3)?, 2)?.remove(1);
            if diffusion_exact(m, n, &q)? != c2 / int((m * m) as i64) {
                fails.push(format!("({m},{n}) p={} mu={}", q.p(), q.mu()));
            }
        }
    }
    Ok(first_failure(fails))
}

fn special_cases() -> Outcome {
    let mut fails = Vec::new();
    for p in [ratio(1, 3), ratio(3, 4)] {
        for (m, n) in [(2, 3), (5, 4)] {
            let (mi, ni, l) = (m as i64, n as i64, (m + n) as i64);
            let x = -(&p / (int(1) - &p));
            let pu = &p / (int(1) - &p) * int(mi * ni) / int(l - 1) * gauss_2f1_terminating(1 - mi, 1 - ni, 2 - l, &x)?
                / gauss_2f1_terminating(-mi, -ni, 1 - l, &x)?;
            if mean_jumps(m, n, &ExactParams::new(p.clone(), int(0))?)? != pu {
                fails.push(format!("mu = 0 at ({m},{n}) p={p}"));
            }
            let bsu = &p * int(mi * ni) / int(l - 1) * gauss_2f1_terminating(1 - mi, 1, 2 - l, &p)?;
            if mean_jumps(m, n, &ExactParams::from_p_nu(p.clone(), int(0))?)? != bsu {
                fails.push(format!("nu = 0 at ({m},{n}) p={p}"));
            }
        }
    }
    Ok(first_failure(fails))
}

fn scaling_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for nu in [-0.5, 0.0, 0.3, 0.9] {
        let params = ModelParams::from_p_nu(0.5, nu)?;
        let mu = *params.mu();
        for c in [0.1, 0.3, 0.5, 0.8] {
            let (zm, _) = saddle_points(&params, c)?;
            let (a, b) = (constant_a(mu, nu, zm), constant_b(nu, zm));
            let corr = current_correction(mu, nu, zm);
            let bb = b_from_amplitude(amplitude(nu, c)?, c);
            let zs = z_star(nu, c)?;
            worst = worst
                .max((a * b - corr).abs() / corr.abs().max(1.0))
                .max((b - bb).abs() / bb)
                .max((z_star_from_saddle(nu, zm) - zs).abs() / zs);
        }
    }
    Ok(if worst < 1e-12 { Ok(()) } else { Err(format!("worst relative residual {worst:e}")) })
}

fn kpz_curvature() -> Outcome {
    let g = dl_curvature(0.0)?;
    let want = 2f64.powf(-1.5);
    Ok(if (g - want).abs() < 1e-8 { Ok(()) } else { Err(format!("G''(0) = {g}, want {want}")) })
}

fn ratio_limit() -> Outcome {
    let (r, want) = (cumulant_ratio(500.0)?, kpz_ratio_closed_form());
    Ok(if (r - want).abs() < 1e-3 { Ok(()) } else { Err(format!("R(500) = {r}, limit {want}")) })
}

impl Validate {
    pub fn from_config(cfg: &mut RunConfig) -> Result<Self> {
        Ok(Self {
            seed: cfg.get("seed", "1")?,
            mc_steps: cfg.get("mc_steps", "200000")?,
            replicas: cfg.get("replicas", "4")?,
            samples: cfg.get("samples", "4000")?,
            inject_nu_sign_flip: cfg.get("inject_nu_sign_flip", "false")?,
        })
    }

    fn monte_carlo(&self) -> Outcome {
        let q = ExactParams::new(ratio(1, 2), ratio(2, 3))?;
        let exact = mean_jumps(5, 5, &q)?.to_f64_lossy();
        let cfg = EnsembleConfig {
            steps: self.mc_steps,
            warmup: self.mc_steps / 20,
            replicas: self.replicas,
            seed: self.seed,
            ..Default::default()
        };
        let r = run_ensemble(density_map(5, 5)?, &q.to_f64(), &cfg)?;
        let z = r.j_hat.z_score(exact);
        Ok(if z < 4.0 { Ok(()) } else { Err(format!("j_hat {} vs {exact} ({z:.1} stderr)", r.j_hat.value)) })
    }

    fn stationary_sampler(&self) -> Outcome {
        let (nu, c, l) = (0.5, 0.3, 64usize);
        let params = ModelParams::from_p_nu(0.5, nu)?;
        let sampler = StationarySampler::new(l, &params, z_star(nu, c)?)?;
        let mut rng = replica_rng(self.seed, 0);
        let (mut d, mut a) = (Vec::new(), Vec::new());
        for _ in 0..self.samples {
            let s = sampler.sample(&mut rng);
            let occ = s.occupancy();
            d.push(s.particles() as f64 / l as f64);
            a.push((0..l).filter(|&i| occ[i] && occ[(i + 1) % l]).count() as f64 / l as f64);
        }
        let (dm, _) = mean_stderr(&d);
        let (am, _) = mean_stderr(&a);
        let y: Vec<f64> = a.iter().zip(&d).map(|(a, d)| a - 2.0 * dm * d).collect();
        let (_, err) = mean_stderr(&y);
        let exact = covariance_finite(nu, c, l, &[1])?[0];
        let z = (am - dm * dm - exact).abs() / err;
        Ok(if z < 4.0 { Ok(()) } else { Err(format!("C(1) {} vs {exact} ({z:.1} stderr)", am - dm * dm)) })
    }
}

impl Job for Validate {
    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn run(&self, out: &mut Output) -> Result<()> {
        let runs: Vec<(&'static str, Outcome)> = vec![
            ("partition_enumeration", partition_enumeration()),
            ("phi_factorization", phi_factorization(self.inject_nu_sign_flip)),
            ("current_triangle", current_triangle()),
            ("diffusion_bethe", diffusion_bethe()),
            ("special_cases", special_cases()),
            ("scaling_identities", scaling_identities()),
            ("kpz_curvature", kpz_curvature()),
            ("ratio_limit", ratio_limit()),
            ("monte_carlo_current", self.monte_carlo()),
            ("stationary_covariance", self.stationary_sampler()),
        ];
        let checks: Vec<CheckRow> = runs
            .into_iter()
            .map(|(name, o)| match o {
                Ok(Ok(())) => CheckRow { name, passed: true, detail: String::new() },
                Ok(Err(detail)) => CheckRow { name, passed: false, detail },
                Err(e) => CheckRow { name, passed: false, detail: format!("error: {e}") },
            })
            .collect();
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        for c in &checks {
            eprintln!("{:5} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out.table("checks", &checks)?;
        let report = Report { passed: failed.is_empty(), checks };
        out.json("report", &report)?;
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(failed.join(", ")))
        }
    }
}
