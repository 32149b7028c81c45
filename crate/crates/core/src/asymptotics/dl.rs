//! Scaling function of the current large deviations, parametrized by
//! polylogarithms: `G = -Li_{5/2}(t)`, `z = -Li_{3/2}(t)`, `t < 1`.

use crate::error::{Error, Result};
use crate::series::Series;

use super::polylog::polylog;
use super::special::zeta;

/// Open interval `(-zeta(3/2), inf)` of admissible `z`.
pub fn dl_support() -> (f64, f64) {
    (-zeta(1.5).expect("zeta(3/2) is finite"), f64::INFINITY)
}

/// `(z, G)` at parameter `t < 1`.
pub fn dl_point(t: f64) -> Result<(f64, f64)> {
    Ok((-polylog(1.5, t)?, -polylog(2.5, t)?))
}

fn z_of(t: f64) -> Result<f64> {
    Ok(if t == 0.0 { 0.0 } else { -polylog(1.5, t)? })
}

// dz/dt = -Li_{1/2}(t)/t
fn dz_dt(t: f64) -> Result<f64> {
    Ok(if t == 0.0 { -1.0 } else { -polylog(0.5, t)? / t })
}

/// Parameter `t` with `-Li_{3/2}(t) = z`, by bracketed Newton.
pub fn dl_parameter(z: f64) -> Result<f64> {
    let (lo_z, _) = dl_support();
    if !(z > lo_z) || !z.is_finite() {
        return Err(Error::Domain(format!("z = {z} outside the supported interval ({lo_z}, inf)")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    // z(t) decreases; keep z(lo) >= target >= z(hi).
    let (mut lo, mut hi) = if z < 0.0 {
        let mut hi = 0.5;
        let mut k = 1;
        while z_of(hi)? > z {
            k += 1;
            if k > 52 {
                return Err(Error::Domain(format!("z = {z} too close to the branch point {lo_z}")));
            }
            hi = 1.0 - 0.5f64.powi(k);
        }
        (0.0, hi)
    } else {
        let mut lo = -1.0;
        while z_of(lo)? < z {
            lo *= 2.0;
        }
        (lo, 0.0)
    };
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = z_of(t)? - z;
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - f / dz_dt(t)?;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

pub fn dl_function(z: f64) -> Result<f64> {
    let t = dl_parameter(z)?;
    Ok(if t == 0.0 { 0.0 } else { -polylog(2.5, t)? })
}

fn slope_at(t: f64) -> Result<f64> {
    Ok(if t == 0.0 { 1.0 } else { polylog(1.5, t)? / polylog(0.5, t)? })
}

fn curvature_at(t: f64) -> Result<f64> {
    let l12 = polylog(0.5, t)?;
    let l32 = polylog(1.5, t)?;
    let lm12 = polylog(-0.5, t)?;
    Ok(-(l12 * l12 - l32 * lm12) / l12.powi(3))
}

/// `G'(z)`.
pub fn dl_slope(z: f64) -> Result<f64> {
    slope_at(dl_parameter(z)?)
}

/// `G''(z)`; at `z = 0` the 0/0 of the parametric form is resolved by
/// symmetric Richardson extrapolation in `t`.
pub fn dl_curvature(z: f64) -> Result<f64> {
    let t = dl_parameter(z)?;
    if t.abs() > 1e-3 {
        return curvature_at(t);
    }
    let h = 0.02;
    let sym = |d: f64| -> Result<f64> { Ok(0.5 * (curvature_at(t + d)? + curvature_at(t - d)?)) };
    let (g1, g2, g3) = (sym(h)?, sym(h / 2.0)?, sym(h / 4.0)?);
    let r1 = (4.0 * g2 - g1) / 3.0;
    let r2 = (4.0 * g3 - g2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Taylor coefficients of `G(z)` about 0 by series reversion of `z(t)`.
pub fn dl_taylor(order: usize) -> Result<Vec<f64>> {
    let mut zc = vec![0.0];
    let mut gc = vec![0.0];
    for k in 1..=order {
        let k = k as f64;
        zc.push(-k.powf(-1.5));
        gc.push(-k.powf(-2.5));
    }
    let t_of_z = Series::new(zc).revert()?;
    Ok(Series::new(gc).compose(&t_of_z)?.into_coeffs())
}

/// `c3^2/(c2 c4)` of the scaling function, from its Taylor coefficients.
pub fn dl_cumulant_ratio() -> Result<f64> {
    let g = dl_taylor(4)?;
    let (d2, d3, d4) = (2.0 * g[2], 6.0 * g[3], 24.0 * g[4]);
    Ok(d3 * d3 / (d2 * d4))
}

/// Closed form of the same ratio.
pub fn kpz_ratio_closed_form() -> f64 {
    let s3 = 3f64.sqrt();
    2.0 * (1.5 - 8.0 / (3.0 * s3)).powi(2) / (7.5 - 24.0 / s3 + 9.0 / 2f64.sqrt())
}

/// Convex conjugate `sup_z (x z - G(z))`, for `x > 0`.
pub fn legendre_dl(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} outside the supported interval (0, inf)")));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    // G'(t) decreases in t; bracket slope(lo) >= x >= slope(hi).
    let (mut lo, mut hi) = if x < 1.0 {
        let mut hi = 0.5;
        let mut k = 1;
        while slope_at(hi)? > x {
            k += 1;
            if k > 52 {
                return Err(Error::Domain(format!("x = {x} too close to 0")));
            }
            hi = 1.0 - 0.5f64.powi(k);
        }
        (0.0, hi)
    } else {
        let mut lo = -1.0;
        while slope_at(lo)? < x {
            lo *= 2.0;
        }
        (lo, 0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope_at(mid)? > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let (z, g) = dl_point(t)?;
    Ok(x * z - g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        assert_eq!(dl_function(0.0).unwrap(), 0.0);
        assert_eq!(dl_slope(0.0).unwrap(), 1.0);
        let g = dl_taylor(3).unwrap();
        assert!(g[0].abs() < 1e-16);
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert!((g[2] - 2f64.powf(-2.5)).abs() < 1e-15);
    }

    #[test]
    fn curvature_at_origin() {
        let want = 2f64.powf(-1.5);
        assert!((dl_curvature(0.0).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn round_trip() {
        for z in [-2.6, -2.0, -0.7, -1e-3, 1e-3, 0.5, 3.0, 40.0, 1e3] {
            let t = dl_parameter(z).unwrap();
            assert!((z_of(t).unwrap() - z).abs() < 1e-12 * z.abs().max(1.0), "z = {z}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for z in [-2.0, -0.5, 0.7, 5.0] {
            let e = 1e-4;
            let fd1 = (dl_function(z + e).unwrap() - dl_function(z - e).unwrap()) / (2.0 * e);
            assert!((dl_slope(z).unwrap() - fd1).abs() < 1e-7);
            let fd2 = (dl_slope(z + e).unwrap() - dl_slope(z - e).unwrap()) / (2.0 * e);
            assert!((dl_curvature(z).unwrap() - fd2).abs() < 1e-6);
        }
    }

    #[test]
    fn domain_reported() {
        let err = dl_function(-3.0).unwrap_err();
        assert!(format!("{err}").contains("supported interval"));
        assert!(legendre_dl(0.0).is_err());
    }

    #[test]
    fn ratio_limits_agree() {
        let a = dl_cumulant_ratio().unwrap();
        let b = kpz_ratio_closed_form();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert!((b - 0.41517).abs() < 1e-5);
    }

    #[test]
    fn legendre_is_convex_and_vanishes_at_one() {
        assert_eq!(legendre_dl(1.0).unwrap(), 0.0);
        let xs: Vec<f64> = (1..60).map(|i| 0.05 * i as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| legendre_dl(x).unwrap()).collect();
        for (x, g) in xs.iter().zip(&v) {
            assert!(*g >= -1e-14, "x = {x}: {g}");
        }
        for w in v.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12);
        }
        assert!(legendre_dl(1.001).unwrap() < 1e-5);
    }
}
