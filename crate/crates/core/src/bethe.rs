//! Bethe-ansatz cumulant generating function of the total current.
//!
//! The largest eigenvalue of the deformed matrix is known parametrically
//! through an auxiliary variable `B`:
//!
//! ```text
//! ln Λ₀ = -(μ-ν)     Σ_n B^n/n  C(Ln-2, Mn-1) F₁(1-nM; 1-nN, 1; 2-nL; ν, μ)
//! γ     = -(1-ν)/M   Σ_n B^n/n  C(Ln-1, Mn-1) ₂F₁(1-Mn, 1-Nn; 1-nL; ν)
//! ```
//!
//! Eliminating `B` order by order gives the scaled cumulants exactly.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::finite::{gamma_kernel_closed, jump_kernel_closed};
use crate::params::ExactParams;
use crate::scalar::{factorial, int, Rational, Scalar};
use crate::series::Series;

pub const DEFAULT_ORDER: usize = 6;

/// Cap on `(n_max M)(n_max N)`, the size of the largest double sum.
pub const DEFAULT_TERM_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CgfSeries {
    pub m: usize,
    pub n: usize,
    /// Index `k` holds the coefficient of `B^k` in `ln Λ₀`; index 0 is zero.
    pub lambda_coeffs: Vec<Rational>,
    /// Index `k` holds the coefficient of `B^k` in `γ`; index 0 is zero.
    pub gamma_coeffs: Vec<Rational>,
    pub n_max: usize,
}

pub fn series_coeffs(m: usize, n: usize, params: &ExactParams, n_max: usize) -> Result<CgfSeries> {
    series_coeffs_capped(m, n, params, n_max, DEFAULT_TERM_CAP)
}

pub fn series_coeffs_capped(m: usize, n: usize, params: &ExactParams, n_max: usize, cap: usize) -> Result<CgfSeries> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("series order must be at least 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("needs M >= 1 particles and N >= 1 sites".into()));
    }
    let terms = (n_max * m).saturating_mul(n_max * n);
    if terms > cap {
        return Err(Error::Resource(format!("order {n_max} at M={m}, N={n} needs {terms} terms, above the cap {cap}")));
    }
    let (mu, nu) = (params.mu(), params.nu());
    let one_minus_nu = int(1) - nu;
    let mu_minus_nu = mu - nu;
    let pairs: Vec<(Rational, Rational)> = (1..=n_max)
        .into_par_iter()
        .map(|k| {
            let kk = int(k as i64);
            let l = -(&mu_minus_nu) / &kk * jump_kernel_closed(m, n, k, nu, mu)?;
            let g = -(&one_minus_nu) / (int(m as i64) * &kk) * gamma_kernel_closed(m, n, k, nu)?;
            Ok((l, g))
        })
        .collect::<Result<_>>()?;
    let mut lambda_coeffs = vec![Rational::zero()];
    let mut gamma_coeffs = vec![Rational::zero()];
    for (l, g) in pairs {
        lambda_coeffs.push(l);
        gamma_coeffs.push(g);
    }
    Ok(CgfSeries { m, n, lambda_coeffs, gamma_coeffs, n_max })
}

impl CgfSeries {
    /// `ln Λ₀` as a power series in `γ`, to order `n_max`.
    pub fn log_lambda_in_gamma(&self) -> Result<Series<Rational>> {
        let gamma = Series::new(self.gamma_coeffs.clone());
        let b_of_gamma = gamma.revert()?;
        Series::new(self.lambda_coeffs.clone()).compose(&b_of_gamma)
    }
}

/// Exact scaled cumulants `c_1..=c_order`.
pub fn cumulants_from_series(series: &CgfSeries, order: usize) -> Result<Vec<Rational>> {
    if order == 0 || order > series.n_max {
        return Err(Error::InvalidParameter(format!(
            "cumulant order {order} must lie in 1..={}",
            series.n_max
        )));
    }
    let ll = series.log_lambda_in_gamma()?;
    Ok((1..=order)
        .map(|k| ll.coeffs()[k].clone() * Rational::from_integer(factorial(k)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricPoint {
    pub b: f64,
    pub gamma: f64,
    pub ln_lambda: f64,
    /// Remainder estimates from the ratio of the last two terms.
    pub gamma_err: f64,
    pub ln_lambda_err: f64,
    /// `d ln Λ₀/dγ` along the curve.
    pub slope: f64,
}

fn to_f64(c: &[Rational]) -> Vec<f64> {
    c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Partial sum with a geometric tail estimate; fails when the last terms do
/// not decrease.
fn sum_with_remainder(coeffs: &[f64], b: f64) -> Result<(f64, f64, f64)> {
    let mut sum = 0.0;
    let mut deriv = 0.0;
    let mut terms = Vec::with_capacity(coeffs.len());
    let mut pw = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            deriv += k as f64 * c * pw;
            pw *= b;
        }
        let t = c * pw;
        sum += t;
        terms.push(t.abs());
    }
    if b == 0.0 {
        return Ok((sum, 0.0, deriv));
    }
    let nz: Vec<f64> = terms.iter().copied().skip(1).filter(|t| *t > 0.0).collect();
    if nz.len() < 2 {
        return Ok((sum, 0.0, deriv));
    }
    let last = nz[nz.len() - 1];
    let prev = nz[nz.len() - 2];
    let r = last / prev;
    if r >= 1.0 {
        return Err(Error::OutOfRadius(format!("|B| = {} : series terms stop decreasing (ratio {r:.3})", b.abs())));
    }
    Ok((sum, last * r / (1.0 - r), deriv))
}

/// `(γ(B), ln Λ₀(B))` from the truncated series.
pub fn cgf_parametric(series: &CgfSeries, b: f64) -> Result<ParametricPoint> {
    let (gamma, gamma_err, dg) = sum_with_remainder(&to_f64(&series.gamma_coeffs), b)?;
    let (ln_lambda, ln_lambda_err, dl) = sum_with_remainder(&to_f64(&series.lambda_coeffs), b)?;
    Ok(ParametricPoint { b, gamma, ln_lambda, gamma_err, ln_lambda_err, slope: dl / dg })
}

/// Solves `γ(B) = gamma` by safeguarded Newton iteration on the truncated
/// series and returns the corresponding parametric point.
pub fn cgf_at_gamma(series: &CgfSeries, gamma: f64) -> Result<ParametricPoint> {
    let g1 = series.gamma_coeffs[1].to_f64_lossy();
    if g1 == 0.0 {
        return Err(Error::DegenerateSeries("zero linear coefficient in gamma(B)".into()));
    }
    let mut b = gamma / g1;
    for _ in 0..200 {
        let pt = cgf_parametric(series, b)?;
        let dg = {
            let c = to_f64(&series.gamma_coeffs);
            c.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c * b.powi(k as i32 - 1)).sum::<f64>()
        };
        let step = (pt.gamma - gamma) / dg;
        b -= step;
        if step.abs() <= 1e-16 * b.abs().max(1e-300) {
            return cgf_parametric(series, b);
        }
    }
    Err(Error::IterationLimit(format!("Newton solve for B at gamma = {gamma} did not converge")))
}

/// Legendre transform along the parametric curve: returns `(y, I(y))` with
/// `y = d ln Λ₀/dγ` and `I = γ y - ln Λ₀`.
pub fn legendre_point(series: &CgfSeries, b: f64) -> Result<(f64, f64)> {
    let pt = cgf_parametric(series, b)?;
    Ok((pt.slope, pt.gamma * pt.slope - pt.ln_lambda))
}

/// Ground state of the Bethe equations: the `M` roots of
/// `P(u) = B(1-νu)^N - (1-u)^N u^M` that start at the origin when `B = 0`.
/// Unlike the series this continues past the ratio-test radius.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub b: f64,
    pub gamma: f64,
    pub ln_lambda: f64,
    pub roots: Vec<Complex64>,
}

/// `P(u) = B(1-νu)^N - (1-u)^N u^M` and `P'(u)`, evaluated in factored form so
/// the root cluster near `u = 1` stays well conditioned.
#[derive(Debug, Clone, Copy)]
struct BethePoly {
    m: i32,
    n: i32,
    nu: f64,
    b: f64,
}

impl BethePoly {
    fn eval(&self, u: Complex64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let a = one - self.nu * u;
        let c = one - u;
        let (nf, mf) = (self.n as f64, self.m as f64);
        let cn1 = c.powi(self.n - 1);
        let um1 = u.powi(self.m - 1);
        let p = self.b * a.powi(self.n) - cn1 * c * um1 * u;
        let dp = -self.b * nf * self.nu * a.powi(self.n - 1) + nf * cn1 * um1 * u - cn1 * c * mf * um1;
        (p, dp)
    }
}

/// Aberth-Ehrlich refinement of all roots, keeping their order.
fn aberth(poly: &BethePoly, roots: &mut [Complex64]) -> bool {
    let n = roots.len();
    let mut best = f64::INFINITY;
    for it in 0..400 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = poly.eval(roots[k]);
            let w = p / dp;
            let rep: Complex64 = (0..n).filter(|&j| j != k).map(|j| (roots[k] - roots[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * rep);
            if !step.re.is_finite() || !step.im.is_finite() {
                return false;
            }
            roots[k] -= step;
            worst = worst.max(step.norm() / roots[k].norm().max(1e-300));
        }
        if worst < 1e-15 || (it > 30 && worst < 1e-12 && worst >= best) {
            return true;
        }
        best = best.min(worst);
    }
    false
}

fn min_separation(tracked: &[Complex64], others: &[Complex64]) -> f64 {
    tracked
        .iter()
        .flat_map(|a| others.iter().map(move |b| (a - b).norm()))
        .fold(f64::INFINITY, f64::min)
}

pub fn ground_state_at_b(m: usize, n: usize, params: &crate::ModelParams, b: f64) -> Result<GroundState> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("needs M >= 1 particles and N >= 1 sites".into()));
    }
    if b == 0.0 {
        return Ok(GroundState { b, gamma: 0.0, ln_lambda: 0.0, roots: vec![Complex64::new(0.0, 0.0); m] });
    }
    let (mu, nu) = (*params.mu(), *params.nu());
    let (mf, nf) = (m as f64, n as f64);
    let tau = std::f64::consts::TAU;
    // Path uniform in s = |B|^{1/M}, along which the small roots move smoothly.
    let s_end = b.abs().powf(1.0 / mf);
    let s0 = s_end.min(1e-3);
    let b_of = |s: f64| b.signum() * s.powf(mf);
    let b0 = b_of(s0);
    let phase = if b > 0.0 { 0.0 } else { std::f64::consts::PI };
    // Small roots solve u^M ≈ B; the others solve (1-u)^N ≈ B(1-ν)^N.
    let mut roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(s0, (phase + tau * k as f64) / mf))
        .chain((0..n).map(|k| {
            let r = b0.abs().powf(1.0 / nf) * (1.0 - nu).abs();
            Complex64::new(1.0, 0.0) - Complex64::from_polar(r, (phase + tau * k as f64) / nf + 0.1 / nf)
        }))
        .collect();
    if !aberth(&BethePoly { m: m as i32, n: n as i32, nu, b: b0 }, &mut roots) {
        return Err(Error::IterationLimit("initial Bethe roots did not converge".into()));
    }
    let mut s = s0;
    let mut ds = (s_end - s0) / 100.0;
    while s < s_end {
        let next = (s + ds).min(s_end);
        let mut trial = roots.clone();
        let ok = aberth(&BethePoly { m: m as i32, n: n as i32, nu, b: b_of(next) }, &mut trial);
        let moved = trial.iter().zip(&roots).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let sep = min_separation(&roots[..m], &roots[m..]);
        if ok && moved < 0.2 * sep {
            roots = trial;
            s = next;
            ds *= 1.25;
        } else {
            ds *= 0.5;
            if ds < 1e-13 * s_end {
                return Err(Error::OutOfRadius(format!(
                    "ground-state Bethe root meets an excited one near B = {}",
                    b_of(s)
                )));
            }
        }
    }
    roots.truncate(m);
    let one = Complex64::new(1.0, 0.0);
    let prod: Complex64 = roots.iter().product();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let gamma = (Complex64::new(sign * b, 0.0) / prod).ln().re / n as f64;
    let ln_lambda: f64 = roots.iter().map(|&u| ((one - mu * u) / (one - nu * u)).ln()).sum::<Complex64>().re;
    Ok(GroundState { b, gamma, ln_lambda, roots })
}

fn solve_dense(mut a: Vec<Vec<Complex64>>, mut rhs: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / a[r][r];
    }
    Some(x)
}

/// Newton on `P(u_i; B) = 0` for all `i` and `ln((-1)^{M-1} B / Π u_j) = Nγ`.
/// The fold of `γ(B)` where a ground-state root meets an excited one is a
/// regular point of this system.
fn newton_at_gamma(m: usize, n: usize, nu: f64, gamma: f64, roots: &mut [Complex64], b: &mut Complex64) -> bool {
    let one = Complex64::new(1.0, 0.0);
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let ng = Complex64::new(gamma * n as f64, 0.0);
    let mut prev = f64::INFINITY;
    for it in 0..60 {
        let poly = BethePoly { m: m as i32, n: n as i32, nu, b: 0.0 };
        let prod: Complex64 = roots.iter().product();
        let ratio = sign * *b / prod;
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); m + 1]; m + 1];
        let mut f = vec![Complex64::new(0.0, 0.0); m + 1];
        for i in 0..m {
            let u = roots[i];
            let (p0, dp0) = poly.eval(u);
            let a = (one - nu * u).powi(n as i32);
            let da = -(n as f64) * nu * (one - nu * u).powi(n as i32 - 1);
            f[i] = p0 + *b * a;
            jac[i][i] = dp0 + *b * da;
            jac[i][m] = a;
        }
        // Log form keeps the row conditioned as B -> 0, where B ≈ (-1)^{M-1} Π u.
        f[m] = ratio.ln() - ng;
        for (j, r) in roots.iter().enumerate() {
            jac[m][j] = -r.inv();
        }
        jac[m][m] = b.inv();
        let Some(dx) = solve_dense(jac, f.iter().map(|v| -v).collect()) else {
            return false;
        };
        let mut worst = 0.0f64;
        for i in 0..m {
            roots[i] += dx[i];
            worst = worst.max(dx[i].norm() / roots[i].norm().max(1e-300));
        }
        *b += dx[m];
        worst = worst.max(dx[m].norm() / b.norm().max(1e-300));
        if !worst.is_finite() {
            return false;
        }
        if worst < 1e-14 || (it > 4 && worst < 1e-9 && worst >= prev) {
            return true;
        }
        prev = worst;
    }
    false
}

fn finish(m: usize, params: &crate::ModelParams, gamma: f64, b: Complex64, mut roots: Vec<Complex64>) -> GroundState {
    let one = Complex64::new(1.0, 0.0);
    let (mu, nu) = (*params.mu(), *params.nu());
    roots.truncate(m);
    let ln_lambda = roots.iter().map(|&u| ((one - mu * u) / (one - nu * u)).ln()).sum::<Complex64>().re;
    GroundState { b: b.re, gamma, ln_lambda, roots }
}

/// Ground state at a given `γ` by continuation in `γ` from the small-`B`
/// start. Passes the fold of `γ(B)` that bounds the `B` series.
pub fn ground_state_at_gamma(m: usize, n: usize, params: &crate::ModelParams, gamma: f64) -> Result<GroundState> {
    if gamma == 0.0 {
        return ground_state_at_b(m, n, params, 0.0);
    }
    let nu = *params.nu();
    let start = ground_state_at_b(m, n, params, -gamma.signum() * 1e-4)?;
    let mut g = start.gamma;
    let mut roots = start.roots;
    let mut b = Complex64::new(start.b, 0.0);
    let mut dg = (gamma - g) / 50.0;
    while g != gamma {
        let next = if (gamma - g).abs() <= dg.abs() { gamma } else { g + dg };
        let (mut r, mut bb) = (roots.clone(), b);
        let moved_ok = newton_at_gamma(m, n, nu, next, &mut r, &mut bb)
            && r.iter().zip(&roots).all(|(a, o)| (a - o).norm() < 0.1 * o.norm())
            && (bb - b).norm() < 0.5 * b.norm();
        if moved_ok {
            roots = r;
            b = bb;
            g = next;
            dg *= 1.5;
        } else {
            dg *= 0.5;
            if dg.abs() < 1e-12 {
                return Err(Error::IterationLimit(format!("Bethe continuation stalled at gamma = {g}")));
            }
        }
    }
    Ok(finish(m, params, gamma, b, roots))
}
