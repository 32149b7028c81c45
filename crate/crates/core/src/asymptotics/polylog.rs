//! Real polylogarithm `Li_s(t)` for `t < 1` and non-integer `s > -1`.

use crate::error::{Error, Result};

use super::quad::integrate;
use super::special::{gamma, zeta};

const SERIES_RADIUS: f64 = 0.5;

fn check_order(s: f64) -> Result<()> {
    if !(s > -1.0) || s == s.floor() || !s.is_finite() {
        return Err(Error::Domain(format!("polylog order {s} must be a non-integer above -1")));
    }
    Ok(())
}

fn direct_series(s: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut tk = 1.0;
    for k in 1..200 {
        tk *= t;
        let term = tk * (k as f64).powf(-s);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

// 1/(e^y + 1) without overflow.
fn fermi(y: f64) -> f64 {
    if y > 0.0 {
        let e = (-y).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + y.exp())
    }
}

/// `t <= -1/2`: Fermi–Dirac integral in `x = u^2`. For `s <= 0` the kernel
/// is differentiated once in the chemical potential.
fn fermi_dirac(s: f64, t: f64) -> Result<f64> {
    let mu = (-t).ln();
    let top = (mu.max(0.0) + 50.0).sqrt();
    let (pref, f): (f64, Box<dyn Fn(f64) -> f64>) = if s > 0.0 {
        (2.0 / gamma(s), Box::new(move |u: f64| u.powf(2.0 * s - 1.0) * fermi(u * u - mu)))
    } else {
        (
            2.0 / gamma(s + 1.0),
            Box::new(move |u: f64| {
                let f = fermi(u * u - mu);
                u.powf(2.0 * s + 1.0) * f * (1.0 - f)
            }),
        )
    };
    let mut total = 0.0;
    let mut lo = 0.0;
    let edges = if mu > 0.0 { vec![mu.sqrt(), top] } else { vec![top] };
    for hi in edges {
        total += integrate(&f, lo, hi, 1e-300, 1e-14)?.0;
        lo = hi;
    }
    Ok(-pref * total)
}

/// `1/2 < t < 1`: expansion in `ln t` about the branch point.
fn near_one(s: f64, t: f64) -> Result<f64> {
    let mu = t.ln();
    let mut sum = gamma(1.0 - s) * (-mu).powf(s - 1.0);
    let mut muk = 1.0;
    let mut small = 0;
    for k in 0..80 {
        if k > 0 {
            muk *= mu / k as f64;
        }
        let term = zeta(s - k as f64)? * muk;
        sum += term;
        small = if term.abs() <= 1e-18 * sum.abs() { small + 1 } else { 0 };
        if small >= 2 {
            return Ok(sum);
        }
    }
    Err(Error::IterationLimit(format!("polylog({s}, {t}) expansion did not settle")))
}

/// `Li_s(t)` to about `1e-13` relative.
pub fn polylog(s: f64, t: f64) -> Result<f64> {
    check_order(s)?;
    if !(t < 1.0) {
        return Err(Error::Domain(format!("polylog argument {t} must be below 1")));
    }
    if t.abs() <= SERIES_RADIUS {
        Ok(direct_series(s, t))
    } else if t < 0.0 {
        fermi_dirac(s, t)
    } else {
        near_one(s, t)
    }
}
