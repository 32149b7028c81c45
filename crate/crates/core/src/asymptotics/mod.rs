//! Thermodynamic-limit formulas: the saddle-point (KPZ) regime, transfer
//! matrix correlations, the transition regime and the special functions they
//! need.

mod bessel;
mod dl;
mod kpz;
mod polylog;
pub mod quad;
mod saddle;
mod special;
mod transfer;
mod transition;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{rho_from_c, ModelParams};

pub use bessel::{bessel_i, bessel_i_scaled};
pub use dl::{
    dl_cumulant_ratio, dl_curvature, dl_function, dl_parameter, dl_point, dl_slope, dl_support, dl_taylor,
    kpz_ratio_closed_form, legendre_dl,
};
pub use kpz::{b_from_amplitude, delta_kpz, kpz_invariants, lambda_tilde, IdentityReport, KpzInvariants};
pub use polylog::polylog;
pub use saddle::{
    cluster_length_law, constant_a, constant_a_from_coefficients, constant_b, constant_b_from_coefficients,
    contour_integral, current_correction, current_from_saddle, density_from_saddle, flow_diagram, h_coefficients,
    mean_jumps_saddle, occupation_saddle, partition_function_saddle, partition_function_saddle_corrected,
    r_coefficients, s_coefficients, saddle_points, Coefficients,
};
pub use special::{gamma, zeta};
pub use transfer::{
    amplitude, amplitude_from_fugacity, correlation_length, covariance_finite, covariance_system_scale,
    density_at_fugacity, density_finite, transfer_eigenvalues, width_finite, xi_tilde, z_star, z_star_from_saddle,
};
pub use transition::{
    chi_atom, cumulant_ratio, delta_theta, lambda_for_theta, legendre_transition, mean_jumps_transition,
    partition_function_transition, theta, transition_cgf, transition_cgf_range, transition_cluster_dist,
    transition_cumulants, transition_parametric, TransitionClusterLaw,
};

/// Everything the saddle-point regime fixes at one `(p, mu, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingBundle {
    pub c: f64,
    pub z_minus: f64,
    pub z_plus: f64,
    pub h: Coefficients,
    pub g: Coefficients,
    pub r: Coefficients,
    pub s: Coefficients,
    pub j_inf: f64,
    /// `L (j_L - j_inf)`.
    pub correction: f64,
    pub a: f64,
    pub b: f64,
    pub z_star: f64,
    pub xi: f64,
    pub amplitude: f64,
    pub lambda_tilde: f64,
    /// Decay length of the occupation law, `-1/ln z_-`.
    pub n_star: f64,
}

/// Builds the bundle and checks `a b = L (j_L - j_inf)`.
pub fn scaling_constants(params: &ModelParams, c: f64) -> Result<ScalingBundle> {
    let (z_minus, z_plus) = saddle_points(params, c)?;
    let (mu, nu) = (*params.mu(), *params.nu());
    let a = constant_a(mu, nu, z_minus);
    let b = constant_b(nu, z_minus);
    let correction = current_correction(mu, nu, z_minus);
    if (a * b - correction).abs() > 1e-12 * correction.abs().max(1.0) {
        return Err(Error::CrossCheck(format!("a b = {} but L (j_L - j_inf) = {correction}", a * b)));
    }
    Ok(ScalingBundle {
        c,
        z_minus,
        z_plus,
        h: h_coefficients(nu, rho_from_c(c), z_minus),
        g: [1.0, 0.0, 0.0, 0.0, 0.0],
        r: r_coefficients(mu, nu, z_minus),
        s: s_coefficients(nu, z_minus),
        j_inf: current_from_saddle(mu, nu, z_minus),
        correction,
        a,
        b,
        z_star: z_star(nu, c)?,
        xi: correlation_length(nu, c)?,
        amplitude: amplitude(nu, c)?,
        lambda_tilde: lambda_tilde(params, c)?,
        n_star: -1.0 / z_minus.ln(),
    })
}
