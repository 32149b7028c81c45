//! Saddle-point regime: `z_-`, the expansion coefficients there, the flow
//! diagram and the finite-size constants `a`, `b`.
//!
//! Coefficient arrays hold the real derivatives `(z d/dz)^k f` at `z_-` for
//! `k = 0..=4`. The complex expansion coefficients along the steepest-descent
//! circle are these times `i^k`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{rho_from_c, ModelParams};

pub type Coefficients = [f64; 5];

pub(crate) fn check_density(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("density c = {c} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

pub(crate) fn check_nu(nu: f64) -> Result<()> {
    if !(nu < 1.0) {
        return Err(Error::Domain(format!("saddle-point forms need nu < 1, got {nu}")));
    }
    Ok(())
}

/// Roots of `h'(z) = 0` for `h(z) = ln(1 - nu z) - ln(1 - z) - rho ln z`.
///
/// `z_minus` is in `(0, 1)`. `z_plus` exceeds 1 only for `0 < nu < 1`; it is
/// `+inf` at `nu = 0` and the negative root beyond the pole `1/nu` for
/// `nu < 0`.
pub fn saddle_points(params: &ModelParams, c: f64) -> Result<(f64, f64)> {
    check_density(c)?;
    let nu = *params.nu();
    check_nu(nu)?;
    Ok(saddle_pair(nu, rho_from_c(c)))
}

// rho nu z^2 - (1 - nu + rho (1 + nu)) z + rho = 0, roots in cancellation-free form.
fn saddle_pair(nu: f64, rho: f64) -> (f64, f64) {
    let b = 1.0 - nu + rho * (1.0 + nu);
    let root = (b * b - 4.0 * rho * rho * nu).sqrt();
    let z_minus = 2.0 * rho / (b + root);
    let z_plus = if nu == 0.0 { f64::INFINITY } else { (b + root) / (2.0 * rho * nu) };
    (z_minus, z_plus)
}

pub(crate) fn z_minus(nu: f64, c: f64) -> f64 {
    saddle_pair(nu, rho_from_c(c)).0
}

/// Density reached at a given saddle point, the inverse of `z_-(c)`.
pub fn density_from_saddle(nu: f64, z: f64) -> f64 {
    (1.0 - nu) * z / (1.0 - nu * (2.0 - z) * z)
}

/// `Li_{1-k}(x)` for `k = 1..=4`: `(x d/dx)^k` of `-ln(1 - x)`.
fn rational_polylog(k: usize, x: f64) -> f64 {
    let d = 1.0 - x;
    match k {
        1 => x / d,
        2 => x / (d * d),
        3 => x * (1.0 + x) / d.powi(3),
        4 => x * (1.0 + 4.0 * x + x * x) / d.powi(4),
        _ => unreachable!("order {k} not tabulated"),
    }
}

/// `f(z) = z^power * prod (1 - x_i z)^{e_i}`.
struct LogForm {
    power: f64,
    factors: Vec<(f64, f64)>,
}

impl LogForm {
    fn value(&self, z: f64) -> f64 {
        self.factors.iter().fold(z.powf(self.power), |acc, &(x, e)| acc * (1.0 - x * z).powf(e))
    }

    fn log_derivative(&self, k: usize, z: f64) -> f64 {
        let lead = if k == 1 { self.power } else { 0.0 };
        lead - self.factors.iter().map(|&(x, e)| e * rational_polylog(k, x * z)).sum::<f64>()
    }

    /// `(z d/dz)^k f` from the log-derivatives through complete Bell polynomials.
    fn derivatives(&self, z: f64) -> Coefficients {
        let f = self.value(z);
        let l: Vec<f64> = (1..=4).map(|k| self.log_derivative(k, z)).collect();
        let (l1, l2, l3, l4) = (l[0], l[1], l[2], l[3]);
        [
            f,
            f * l1,
            f * (l2 + l1 * l1),
            f * (l3 + 3.0 * l1 * l2 + l1.powi(3)),
            f * (l4 + 4.0 * l1 * l3 + 3.0 * l2 * l2 + 6.0 * l1 * l1 * l2 + l1.powi(4)),
        ]
    }
}

/// `h` and its derivatives; `h[1]` vanishes at the saddle and `h[2] > 0`.
pub fn h_coefficients(nu: f64, rho: f64, z: f64) -> Coefficients {
    let mut out = [0.0; 5];
    out[0] = (1.0 - nu * z).ln() - (1.0 - z).ln() - rho * z.ln();
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let rho_term = if k == 1 { rho } else { 0.0 };
        *slot = rational_polylog(k, z) - rational_polylog(k, nu * z) - rho_term;
    }
    out
}

/// `r(z) = z / ((1 - mu z)(1 - nu z))`.
pub fn r_coefficients(mu: f64, nu: f64, z: f64) -> Coefficients {
    LogForm { power: 1.0, factors: vec![(mu, -1.0), (nu, -1.0)] }.derivatives(z)
}

/// `s(z) = z / ((1 - z)(1 - nu z))`.
pub fn s_coefficients(nu: f64, z: f64) -> Coefficients {
    LogForm { power: 1.0, factors: vec![(1.0, -1.0), (nu, -1.0)] }.derivatives(z)
}

/// Two-term steepest-descent value of `oint g e^{N h} dz/(2 pi i z)`.
pub fn contour_integral(n: f64, h: &Coefficients, g: &Coefficients) -> f64 {
    let h2 = h[2];
    let lead = (n * h[0]).exp() / (2.0 * PI * n * h2).sqrt();
    let corr = -g[2] / h2
        + g[1] * h[3] / (h2 * h2)
        + 0.25 * g[0] * (h[4] / (h2 * h2) - 5.0 * h[3] * h[3] / (3.0 * h2.powi(3)));
    lead * (g[0] + corr / (2.0 * n))
}

/// Leading saddle-point estimate `e^{N h0}/sqrt(2 pi N h2)` of `Z(M, N)`.
pub fn partition_function_saddle(m: usize, n: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if m == 0 || n == 0 {
        return Err(Error::Domain("saddle form needs M, N >= 1".into()));
    }
    let rho = m as f64 / n as f64;
    let z = saddle_pair(nu, rho).0;
    let h = h_coefficients(nu, rho, z);
    Ok((n as f64 * h[0]).exp() / (2.0 * PI * n as f64 * h[2]).sqrt())
}

/// Same with the `1/N` correction of the contour expansion.
pub fn partition_function_saddle_corrected(m: usize, n: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if m == 0 || n == 0 {
        return Err(Error::Domain("saddle form needs M, N >= 1".into()));
    }
    let rho = m as f64 / n as f64;
    let z = saddle_pair(nu, rho).0;
    let h = h_coefficients(nu, rho, z);
    Ok(contour_integral(n as f64, &h, &[1.0, 0.0, 0.0, 0.0, 0.0]))
}

/// Thermodynamic occupation law `f(n) z_-^n / F(z_-)` with
/// `F(z) = (1 - nu z)/(1 - z)`.
pub fn occupation_saddle(nu: f64, c: f64, n: usize) -> Result<f64> {
    check_density(c)?;
    check_nu(nu)?;
    let z = z_minus(nu, c);
    let weight = if n == 0 { 1.0 } else { 1.0 - nu };
    Ok(weight * z.powi(n as i32) * (1.0 - z) / (1.0 - nu * z))
}

/// Cluster-length law `(1 - z) z^{n-1}`, `n >= 1`.
pub fn cluster_length_law(z_minus: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (1.0 - z_minus) * z_minus.powi(n as i32 - 1)
}

/// Stationary current per site `j(c)` in closed form, with the exact
/// collapses at `mu = 0`, `mu = p` and `mu = 1`.
pub fn flow_diagram(params: &ModelParams, c: f64) -> Result<f64> {
    check_density(c)?;
    let p = *params.p();
    let mu = *params.mu();
    Ok(if mu == 0.0 {
        0.5 * (1.0 - (1.0 - 4.0 * p * c * (1.0 - c)).sqrt())
    } else if mu == p {
        (1.0 - c) * c * p / (1.0 - c * p)
    } else if mu == 1.0 {
        c * p
    } else {
        let num = c * p * (1.0 + (1.0 - 2.0 * c) * mu)
            - c * p * ((1.0 - mu) * (1.0 - 4.0 * (1.0 - c) * c * (p - mu) - mu)).sqrt();
        num / (2.0 * mu + 2.0 * c * (p * (1.0 - mu) - mu))
    })
}

/// The same current written through `z_-`.
pub fn current_from_saddle(mu: f64, nu: f64, z: f64) -> f64 {
    (mu - nu) * (1.0 - z) * z / ((1.0 - mu * z) * (1.0 - nu * (2.0 - z) * z))
}

/// `L (j_L - j_inf)`, the leading finite-size correction of the current.
pub fn current_correction(mu: f64, nu: f64, z: f64) -> f64 {
    (1.0 - mu) * (mu - nu) / (1.0 - nu) * (1.0 - z) * z * (1.0 - nu * z) * (1.0 - mu * nu * z.powi(3))
        / ((1.0 - mu * z).powi(3) * (1.0 - nu * z * z).powi(2))
}

pub fn constant_a(mu: f64, nu: f64, z: f64) -> f64 {
    (1.0 - mu) * (mu - nu) / ((2.0 * PI).sqrt() * (1.0 - nu).powf(1.5)) * z.sqrt()
        * (1.0 - z).powi(2)
        * (1.0 - nu * z).powi(2)
        * (1.0 - mu * nu * z.powi(3))
        / ((1.0 - mu * z).powi(3) * (1.0 - nu * z * z).powf(2.5))
}

pub fn constant_b(nu: f64, z: f64) -> f64 {
    (2.0 * PI * (1.0 - nu) * z * (1.0 - nu * z * z)).sqrt() / ((1.0 - z) * (1.0 - nu * z))
}

/// `a` assembled from the `h`, `r`, `s` coefficients; agrees with
/// [`constant_a`].
pub fn constant_a_from_coefficients(mu: f64, nu: f64, h: &Coefficients, r: &Coefficients, s: &Coefficients) -> f64 {
    // i^k factors folded in: r_2 -> -r[2], r_1 h_3 -> r[1] h[3].
    let x2 = -r[2] + s[2] / s[0];
    let x1 = r[1] - s[1] / s[0];
    (mu - nu) / (2.0 * (2.0 * PI * h[2]).sqrt()) * (x2 / h[2] + x1 * h[3] / (h[2] * h[2]))
}

/// `b = sqrt(2 pi |h_2|)`, equal to [`constant_b`].
pub fn constant_b_from_coefficients(h: &Coefficients) -> f64 {
    (2.0 * PI * h[2]).sqrt()
}

/// Finite-`N` saddle estimate of the mean number of jumps `J(M, N)` per step,
/// `N j_inf`-like leading term plus the `1/L` correction.
pub fn mean_jumps_saddle(params: &ModelParams, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("saddle form needs M, N >= 1".into()));
    }
    let nu = *params.nu();
    let mu = *params.mu();
    check_nu(nu)?;
    let z = saddle_pair(nu, m as f64 / n as f64).0;
    let lead = n as f64 * z * (mu - nu) / ((1.0 - mu * z) * (1.0 - nu * z));
    Ok(lead + current_correction(mu, nu, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, mu: f64) -> ModelParams {
        ModelParams::new(p, mu).unwrap()
    }

    #[test]
    fn nu_zero_saddle_is_density() {
        let mp = params(0.5, 0.5);
        for c in [0.1, 0.5, 0.83] {
            let (zm, zp) = saddle_points(&mp, c).unwrap();
            assert!((zm - c).abs() < 1e-15);
            assert!(zp.is_infinite());
        }
    }

    #[test]
    fn roots_solve_stationarity() {
        for (p, mu) in [(0.5, 0.8), (0.3, 0.1), (0.6, 0.95)] {
            let mp = params(p, mu);
            let nu = *mp.nu();
            for c in [0.2, 0.5, 0.7] {
                let rho = rho_from_c(c);
                let (zm, zp) = saddle_points(&mp, c).unwrap();
                let hp = |z: f64| -nu / (1.0 - nu * z) + 1.0 / (1.0 - z) - rho / z;
                assert!(hp(zm).abs() < 1e-10);
                assert!(hp(zp).abs() < 1e-9 * (1.0 + zp.abs()));
                assert!(zm > 0.0 && zm < 1.0);
                if nu > 0.0 {
                    assert!(zp > 1.0);
                }
                assert!(h_coefficients(nu, rho, zm)[1].abs() < 1e-12);
                assert!((density_from_saddle(nu, zm) - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_density_rejected() {
        let mp = params(0.5, 0.7);
        assert!(saddle_points(&mp, 0.0).is_err());
        assert!(saddle_points(&mp, 1.0).is_err());
        assert!(flow_diagram(&mp, 1.0).is_err());
    }

    #[test]
    fn large_lambda_saddles() {
        let lambda: f64 = 1e8;
        let mp = ModelParams::from_p_nu(0.5, 1.0 - 1.0 / lambda).unwrap();
        let c: f64 = 0.4;
        let rho = rho_from_c(c);
        let (zm, zp) = saddle_points(&mp, c).unwrap();
        let d = (1.0 / (rho * lambda)).sqrt();
        assert!((zm - (1.0 - d)).abs() < 5.0 * d * d);
        assert!((zp - (1.0 + d)).abs() < 5.0 * d * d);
    }

    #[test]
    fn log_form_derivatives_match_finite_differences() {
        let (mu, nu, z0) = (0.7, 0.4, 0.35);
        let r = r_coefficients(mu, nu, z0);
        let f = |s: f64| {
            let z = s.exp();
            z / ((1.0 - mu * z) * (1.0 - nu * z))
        };
        let s0 = z0.ln();
        let e = 1e-3;
        let d1 = (f(s0 + e) - f(s0 - e)) / (2.0 * e);
        let d2 = (f(s0 + e) - 2.0 * f(s0) + f(s0 - e)) / (e * e);
        assert!((r[0] - f(s0)).abs() < 1e-14);
        assert!((r[1] - d1).abs() < 1e-5);
        assert!((r[2] - d2).abs() < 1e-5);
    }

    #[test]
    fn flow_diagram_special_cases() {
        let tasep = params(1.0 - 1e-15, 0.0);
        for c in [0.2, 0.5, 0.9] {
            let j = flow_diagram(&tasep, c).unwrap();
            assert!((j - c.min(1.0 - c)).abs() < 1e-7);
        }
        let bsu = params(0.3, 0.3);
        assert!((flow_diagram(&bsu, 0.4).unwrap() - 0.6 * 0.4 * 0.3 / (1.0 - 0.12)).abs() < 1e-15);
        let da = params(0.3, 1.0);
        assert_eq!(flow_diagram(&da, 0.4).unwrap(), 0.4 * 0.3);
    }

    #[test]
    fn flow_diagram_matches_saddle_current() {
        for (p, mu) in [(0.5, 0.0), (0.5, 0.3), (0.5, 0.5), (0.2, 0.9), (0.8, 0.1), (0.5, 0.999)] {
            let mp = params(p, mu);
            let nu = *mp.nu();
            for c in [0.05, 0.3, 0.5, 0.77] {
                let z = z_minus(nu, c);
                let a = flow_diagram(&mp, c).unwrap();
                let b = current_from_saddle(mu, nu, z);
                assert!((a - b).abs() < 1e-12, "p={p} mu={mu} c={c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn constants_from_coefficients_agree() {
        for (p, mu) in [(0.5, 0.7), (0.3, 0.9), (0.7, 0.2), (0.5, 0.0)] {
            let mp = params(p, mu);
            let nu = *mp.nu();
            for c in [0.3, 0.6] {
                let rho = rho_from_c(c);
                let z = z_minus(nu, c);
                let h = h_coefficients(nu, rho, z);
                let r = r_coefficients(mu, nu, z);
                let s = s_coefficients(nu, z);
                let a1 = constant_a(mu, nu, z);
                let a2 = constant_a_from_coefficients(mu, nu, &h, &r, &s);
                assert!((a1 - a2).abs() < 1e-12 * a1.abs().max(1e-3), "{a1} vs {a2}");
                let b1 = constant_b(nu, z);
                let b2 = constant_b_from_coefficients(&h);
                assert!((b1 - b2).abs() < 1e-12 * b1);
                // infinite-volume current through r0/s0
                let j = current_from_saddle(mu, nu, z);
                assert!((c * p * r[0] / s[0] - j).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_of_constants_is_correction() {
        for (p, mu) in [(0.5, 0.7), (0.3, 0.9), (0.7, 0.2)] {
            let mp = params(p, mu);
            let nu = *mp.nu();
            let z = z_minus(nu, 0.45);
            let ab = constant_a(mu, nu, z) * constant_b(nu, z);
            assert!((ab - current_correction(mu, nu, z)).abs() < 1e-13);
        }
    }

    #[test]
    fn occupation_law_is_normalized_with_mean_rho() {
        let (nu, c) = (0.6, 0.4);
        let p: Vec<f64> = (0..2000).map(|n| occupation_saddle(nu, c, n).unwrap()).collect();
        let total: f64 = p.iter().sum();
        let mean: f64 = p.iter().enumerate().map(|(n, v)| n as f64 * v).sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert!((mean - rho_from_c(c)).abs() < 1e-12);
        let z = z_minus(nu, c);
        for n in 1..5 {
            assert!((p[n] / (1.0 - p[0]) - cluster_length_law(z, n)).abs() < 1e-14);
        }
    }

    #[test]
    fn cluster_law_normalized() {
        let z = 0.6;
        let total: f64 = (1..400).map(|n| cluster_length_law(z, n)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(cluster_length_law(z, 0), 0.0);
    }
}
