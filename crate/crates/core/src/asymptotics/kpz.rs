//! KPZ invariants of the height interface and their relations to the
//! finite-size constants `a`, `b`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::params::ModelParams;

use super::saddle::{check_density, check_nu, constant_a, constant_b, z_minus};
use super::transfer::amplitude;

/// `lambda~ = (1/2) d^2 j / dc^2` written through `z_-`.
pub fn lambda_tilde_from_saddle(mu: f64, nu: f64, z: f64) -> f64 {
    -(1.0 - mu) * (mu - nu) / (1.0 - nu).powi(2) * (1.0 - nu * (2.0 - z) * z).powi(3) * (1.0 - mu * nu * z.powi(3))
        / ((1.0 - mu * z).powi(3) * (1.0 - nu * z * z).powi(3))
}

pub fn lambda_tilde(params: &ModelParams, c: f64) -> Result<f64> {
    check_density(c)?;
    let nu = *params.nu();
    check_nu(nu)?;
    Ok(lambda_tilde_from_saddle(*params.mu(), nu, z_minus(nu, c)))
}

/// Residuals of the exact relations between `a`, `b`, `A` and `lambda~`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `lambda~ A + 2 b_v`, with `b_v = 2ab`.
    pub lambda_a_vs_bv: f64,
    /// `a - sqrt(2A) |lambda~| (1-c)^{3/2} / (4 sqrt(pi))`.
    pub a_from_invariants: f64,
    /// `b + sgn(lambda~) sqrt(pi A / 2) / (1-c)^{3/2}`.
    pub b_from_invariants: f64,
}

impl IdentityReport {
    pub fn max_abs(&self) -> f64 {
        self.lambda_a_vs_bv.abs().max(self.a_from_invariants.abs()).max(self.b_from_invariants.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpzInvariants {
    pub lambda_tilde: f64,
    pub amplitude: f64,
    /// Tilt response of the interface velocity, `2ab`.
    pub b_v: f64,
    pub identities: IdentityReport,
}

pub fn kpz_invariants(params: &ModelParams, c: f64) -> Result<KpzInvariants> {
    let lt = lambda_tilde(params, c)?;
    let nu = *params.nu();
    let big_a = amplitude(nu, c)?;
    let z = z_minus(nu, c);
    let a = constant_a(*params.mu(), nu, z);
    let b = constant_b(nu, z);
    let b_v = 2.0 * a * b;
    let w = (1.0 - c).powf(1.5);
    let identities = IdentityReport {
        lambda_a_vs_bv: lt * big_a + 2.0 * b_v,
        a_from_invariants: a - (2.0 * big_a).sqrt() * lt.abs() * w / (4.0 * PI.sqrt()),
        b_from_invariants: b + lt.signum() * (PI * big_a / 2.0).sqrt() / w,
    };
    Ok(KpzInvariants { lambda_tilde: lt, amplitude: big_a, b_v, identities })
}

/// `b` from the correlator amplitude alone.
pub fn b_from_amplitude(big_a: f64, c: f64) -> f64 {
    (PI * big_a / 2.0).sqrt() / (1.0 - c).powf(1.5)
}

/// Diffusion coefficient of a tagged particle at size `L` implied by the
/// scaling form of the generating function.
pub fn delta_kpz(c: f64, a: f64, b: f64, l: usize) -> f64 {
    (1.0 - c).powf(1.5) / (c * c) * b * b * a / (2.0 * (2.0 * l as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::saddle::flow_diagram;

    #[test]
    fn nonlinearity_is_half_the_curvature() {
        for (p, mu) in [(0.5, 0.7), (0.3, 0.0), (0.6, 0.6), (0.4, 0.95)] {
            let mp = ModelParams::new(p, mu).unwrap();
            for c in [0.2, 0.5, 0.8] {
                let e = 1e-4;
                let j = |x: f64| flow_diagram(&mp, x).unwrap();
                let fd = (j(c + e) - 2.0 * j(c) + j(c - e)) / (e * e) / 2.0;
                let lt = lambda_tilde(&mp, c).unwrap();
                assert!((lt - fd).abs() < 1e-5 * lt.abs().max(1.0), "p={p} mu={mu} c={c}: {lt} vs {fd}");
            }
        }
    }

    #[test]
    fn identities_hold() {
        for (p, mu) in [(0.5, 0.7), (0.3, 0.0), (0.6, 0.6), (0.4, 0.95), (0.8, 0.1)] {
            let mp = ModelParams::new(p, mu).unwrap();
            for c in [0.1, 0.5, 0.9] {
                let k = kpz_invariants(&mp, c).unwrap();
                assert!(k.identities.max_abs() < 1e-12, "{:?}", k.identities);
            }
        }
    }

    #[test]
    fn large_lambda_asymptotics() {
        let (p, c): (f64, f64) = (0.5, 0.3);
        let lambda: f64 = 1e8;
        let mp = ModelParams::from_p_nu(p, 1.0 - 1.0 / lambda).unwrap();
        let k = kpz_invariants(&mp, c).unwrap();
        let a_lim = 8.0 * lambda.sqrt() * (c * (1.0 - c)).powf(1.5);
        let l_lim = -3.0 * p * (1.0 - p) / (8.0 * (1.0 - c).powf(2.5) * c.sqrt() * lambda.sqrt());
        assert!((k.amplitude / a_lim - 1.0).abs() < 1e-3);
        assert!((k.lambda_tilde / l_lim - 1.0).abs() < 1e-3);
        let product = k.lambda_tilde * k.amplitude;
        let limit = a_lim * l_lim;
        assert!((product / limit - 1.0).abs() < 1e-3);
    }
}
