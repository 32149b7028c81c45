//! Transition regime `lambda ~ N^2`, controlled by `theta = 2 N sqrt(rho/lambda)`.
//!
//! The cumulant generating function is parametric in `B~ = B e^theta`:
//!
//! ```text
//! G_theta = (theta^2/4) sum_k e^{-k theta} I_2(k theta) B~^k / k
//! t       = -(theta/2)  sum_k e^{-k theta} I_1(k theta) B~^k / k
//! ```
//!
//! which converges for `|B~| <= 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::Series;

use super::bessel::bessel_i_scaled;
use super::quad::integrate;

/// `theta = 2 N sqrt(rho / lambda)`.
pub fn theta(m: usize, n: usize, lambda: f64) -> Result<f64> {
    if n == 0 || !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("theta needs N >= 1 and lambda > 0, got N = {n}, lambda = {lambda}")));
    }
    let rho = m as f64 / n as f64;
    Ok(2.0 * n as f64 * (rho / lambda).sqrt())
}

/// `lambda` giving a prescribed `theta`.
pub fn lambda_for_theta(m: usize, n: usize, theta: f64) -> f64 {
    let rho = m as f64 / n as f64;
    rho * (2.0 * n as f64 / theta).powi(2)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta = {theta} must be positive")));
    }
    Ok(())
}

/// `e^{-theta} I_1(u)/u` at `u = theta s`, finite as `s -> 0`.
fn scaled_i1_over(theta: f64, s: f64) -> f64 {
    let u = theta * s;
    if u < 1e-6 {
        return 0.5 * (-theta).exp() * (1.0 + u * u / 8.0);
    }
    bessel_i_scaled(1, u) * (u - theta).exp() / u
}

/// `(theta / 2M) I_1(theta)`, the transition-regime estimate of `Z(M, N)`.
pub fn partition_function_transition(theta: f64, m: usize) -> Result<f64> {
    check_theta(theta)?;
    Ok(theta / (2.0 * m as f64) * bessel_i_scaled(1, theta) * theta.exp())
}

/// Occupation and cluster laws of the transition regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionClusterLaw {
    pub theta: f64,
    pub m: usize,
    pub n: usize,
}

/// Builds the law; `theta <= 0` is rejected (see [`chi_atom`] for the limit).
pub fn transition_cluster_dist(theta: f64, m: usize, n: usize) -> Result<TransitionClusterLaw> {
    check_theta(theta)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("transition laws need M, N >= 1".into()));
    }
    Ok(TransitionClusterLaw { theta, m, n })
}

/// Probability that the whole system is one cluster, `1/I_0(theta)`; 1 at
/// `theta = 0`.
pub fn chi_atom(theta: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(1.0);
    }
    check_theta(theta)?;
    Ok((-theta).exp() / bessel_i_scaled(0, theta))
}

impl TransitionClusterLaw {
    fn ratio10(&self) -> f64 {
        bessel_i_scaled(1, self.theta) / bessel_i_scaled(0, self.theta)
    }

    /// `P(0) = 1 - (theta/2N) I_0/I_1`.
    pub fn p_empty(&self) -> f64 {
        1.0 - self.theta / (2.0 * self.n as f64) / self.ratio10()
    }

    /// `P(n)` for `0 < n < M`.
    pub fn p_occupied(&self, k: usize) -> Result<f64> {
        if k == 0 || k >= self.m {
            return Err(Error::Domain(format!("occupied-site law covers 0 < n < M = {}, got {k}", self.m)));
        }
        let th = self.theta;
        let s = (1.0 - k as f64 / self.m as f64).sqrt();
        let num = scaled_i1_over(th, s) * th;
        Ok(th * th / (4.0 * (self.n * self.m) as f64) * num / bessel_i_scaled(1, th))
    }

    /// `P(M) = (theta/2N) / I_1(theta)`.
    pub fn p_full(&self) -> f64 {
        self.theta / (2.0 * self.n as f64) * (-self.theta).exp() / bessel_i_scaled(1, self.theta)
    }

    /// `P(n)` over `0..=M`.
    pub fn p(&self, k: usize) -> Result<f64> {
        match k {
            0 => Ok(self.p_empty()),
            k if k == self.m => Ok(self.p_full()),
            k => self.p_occupied(k),
        }
    }

    pub fn chi_atom(&self) -> f64 {
        (-self.theta).exp() / bessel_i_scaled(0, self.theta)
    }

    /// Density of the cluster fraction `chi = n/M` on `[0, 1)`.
    pub fn chi_density(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("chi density lives on [0, 1), got {x}")));
        }
        let th = self.theta;
        let s = (1.0 - x).sqrt();
        Ok(th * th / 2.0 * scaled_i1_over(th, s) / bessel_i_scaled(0, th))
    }

    /// `Prob(chi < x)` by quadrature.
    pub fn chi_cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let top = x.min(1.0);
        let f = |y: f64| self.chi_density(y.min(1.0 - 1e-300)).unwrap_or(0.0);
        let (v, _) = integrate(f, 0.0, top, 1e-300, 1e-14)?;
        Ok(if x > 1.0 { v + self.chi_atom() } else { v })
    }

    /// Atom plus continuous part; 1 by `int_0^theta I_1 = I_0(theta) - 1`.
    pub fn chi_mass(&self) -> Result<f64> {
        Ok(self.chi_atom() + self.chi_cdf(1.0)?)
    }

    /// `<l_cl> = 2 M I_1 / (theta I_0)`.
    pub fn mean_cluster(&self) -> f64 {
        2.0 * self.m as f64 * self.ratio10() / self.theta
    }

    /// Expected number of clusters `theta I_0 / (2 I_1)`.
    pub fn expected_cluster_count(&self) -> f64 {
        self.theta / (2.0 * self.ratio10())
    }
}

/// `sum_{k >= 1} e^{-k theta} I_nu(k theta) B^k / k`, or without the `1/k`
/// when `derivative` is set, summed under the integral representation
/// `e^{-x} I_nu(x) = (1/pi) int_0^pi e^{-x (1 - cos phi)} cos(nu phi) dphi`.
fn bessel_series(order: u32, theta: f64, b: f64, derivative: bool) -> Result<f64> {
    let limit = if derivative { b.abs() < 1.0 } else { b.abs() <= 1.0 };
    if !limit {
        return Err(Error::OutOfRadius(format!("|B~| = {} outside the convergence disc", b.abs())));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let nu = order as f64;
    let f = |phi: f64| {
        let x = 2.0 * theta * (0.5 * phi).sin().powi(2);
        // 1 - b e^{-x} without cancellation
        let gap = (1.0 - b) - b * (-x).exp_m1();
        let w = if derivative { b * (-x).exp() / gap } else { -gap.ln() };
        w * (nu * phi).cos()
    };
    let (v, _) = integrate(f, 0.0, PI, 1e-15, 1e-14)?;
    Ok(v / PI)
}

/// `(t, G_theta)` at parameter `B~`, `|B~| <= 1`.
pub fn transition_parametric(theta: f64, b: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    let t = -0.5 * theta * bessel_series(1, theta, b, false)?;
    let g = 0.25 * theta * theta * bessel_series(2, theta, b, false)?;
    Ok((t, g))
}

/// Interval of `t` covered by `|B~| <= 1`.
pub fn transition_cgf_range(theta: f64) -> Result<(f64, f64)> {
    Ok((transition_parametric(theta, 1.0)?.0, transition_parametric(theta, -1.0)?.0))
}

fn parameter_for(theta: f64, t: f64) -> Result<f64> {
    let (lo_t, hi_t) = transition_cgf_range(theta)?;
    if !(t >= lo_t && t <= hi_t) {
        return Err(Error::OutOfRadius(format!("t = {t} outside [{lo_t}, {hi_t}] reached for theta = {theta}")));
    }
    // t(B~) decreases.
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if transition_parametric(theta, mid)?.0 > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `G_theta(t)`.
pub fn transition_cgf(theta: f64, t: f64) -> Result<f64> {
    check_theta(theta)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(transition_parametric(theta, parameter_for(theta, t)?)?.1)
}

/// `G_theta^{(n)}(0)` for `n = 0..=4` by reverting the `t(B~)` series.
pub fn transition_cumulants(theta: f64) -> Result<[f64; 5]> {
    check_theta(theta)?;
    let mut tc = vec![0.0];
    let mut gc = vec![0.0];
    for k in 1..=4 {
        let kt = k as f64 * theta;
        tc.push(-0.5 * theta * bessel_i_scaled(1, kt) / k as f64);
        gc.push(0.25 * theta * theta * bessel_i_scaled(2, kt) / k as f64);
    }
    let b_of_t = Series::new(tc).revert()?;
    let g = Series::new(gc).compose(&b_of_t)?.into_coeffs();
    let mut out = [0.0; 5];
    let mut fact = 1.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        *slot = g[n] * fact;
    }
    Ok(out)
}

/// Diffusion coefficient `p(1-p) G_theta''(0)`; `p(1-p)` at `theta = 0`.
pub fn delta_theta(theta: f64, p: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(p * (1.0 - p));
    }
    check_theta(theta)?;
    let i1 = bessel_i_scaled(1, theta);
    let i2 = bessel_i_scaled(2, theta);
    let j1 = bessel_i_scaled(1, 2.0 * theta);
    let j2 = bessel_i_scaled(2, 2.0 * theta);
    Ok(p * (1.0 - p) * j1 / (i1 * i1) * (j2 / j1 - i2 / i1))
}

/// `c3^2 / (c2 c4)`; 0 at `theta = 0`.
pub fn cumulant_ratio(theta: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(0.0);
    }
    let c = transition_cumulants(theta)?;
    Ok(c[3] * c[3] / (c[2] * c[4]))
}

/// Mean jumps per step `M p - p(1-p) rho (theta/2) I_2/I_1`.
pub fn mean_jumps_transition(theta: f64, p: f64, m: usize, n: usize) -> Result<f64> {
    check_theta(theta)?;
    let rho = m as f64 / n as f64;
    Ok(m as f64 * p - p * (1.0 - p) * rho * 0.5 * theta * bessel_i_scaled(2, theta) / bessel_i_scaled(1, theta))
}

// G_theta'(t) at parameter B~, |B~| < 1.
fn slope_at(theta: f64, b: f64) -> Result<f64> {
    let d = |order: u32| -> Result<f64> {
        if b == 0.0 {
            Ok(bessel_i_scaled(order, theta))
        } else {
            Ok(bessel_series(order, theta, b, true)? / b)
        }
    };
    Ok(-0.5 * theta * d(2)? / d(1)?)
}

/// Convex conjugate `sup_t (x t - G_theta(t))` by matching `G_theta'(t) = x`.
pub fn legendre_transition(theta: f64, x: f64) -> Result<f64> {
    check_theta(theta)?;
    let edge = 1.0 - 1e-12;
    let (s_hi, s_lo) = (slope_at(theta, -edge)?, slope_at(theta, edge)?);
    if !(x > s_lo && x < s_hi) {
        return Err(Error::OutOfRadius(format!("slope {x} outside ({s_lo}, {s_hi}) for theta = {theta}")));
    }
    let (mut lo, mut hi) = (-edge, edge);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope_at(theta, mid)? > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (t, g) = transition_parametric(theta, 0.5 * (lo + hi))?;
    Ok(x * t - g)
}
