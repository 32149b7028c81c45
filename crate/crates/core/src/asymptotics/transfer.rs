//! Grand-canonical transfer matrix of the exclusion ring: fugacity, spectrum,
//! correlation length and pair covariance.

use crate::error::{Error, Result};

use super::saddle::{check_density, check_nu};

/// Eigenvalues `lambda_1 > |lambda_2|` at fugacity `z`; `lambda_2 < 0` for `nu < 0`.
pub fn transfer_eigenvalues(nu: f64, z: f64) -> (f64, f64) {
    let disc = ((1.0 + z).powi(2) - 4.0 * nu * z).sqrt();
    let l1 = 0.5 * (1.0 + z + disc);
    (l1, nu * z / l1)
}

/// Fugacity reaching density `c`; exactly 1 at half filling.
pub fn z_star(nu: f64, c: f64) -> Result<f64> {
    check_density(c)?;
    check_nu(nu)?;
    let w = ((1.0 - nu) * (1.0 - nu * (1.0 - 2.0 * c).powi(2))).sqrt();
    let d = (1.0 - 2.0 * c) * (1.0 - nu);
    Ok((w - d) / (w + d))
}

/// Density `<tau>` at fugacity `z`.
pub fn density_at_fugacity(nu: f64, z: f64) -> f64 {
    let root = ((1.0 + z).powi(2) - 4.0 * nu * z).sqrt();
    (root + z - 1.0) / (2.0 * root)
}

/// Fugacity from the saddle point of the zero-range image.
pub fn z_star_from_saddle(nu: f64, z_minus: f64) -> f64 {
    z_minus * (1.0 - nu * z_minus) / (1.0 - z_minus)
}

/// `1/ln|lambda_1/lambda_2|`; zero for the product measure `nu = 0`.
pub fn correlation_length(nu: f64, c: f64) -> Result<f64> {
    let z = z_star(nu, c)?;
    let (l1, l2) = transfer_eigenvalues(nu, z);
    if l2 == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (l1 / l2.abs()).ln())
}

/// Stationary correlator amplitude `A = 4 sum_k C(k)`.
pub fn amplitude(nu: f64, c: f64) -> Result<f64> {
    let z = z_star(nu, c)?;
    let (l1, l2) = transfer_eigenvalues(nu, z);
    Ok(4.0 * c * (1.0 - c) * (l1 + l2) / (l1 - l2))
}

/// `A` written through the fugacity alone.
pub fn amplitude_from_fugacity(nu: f64, z: f64) -> f64 {
    4.0 * (1.0 - nu) * z * (z + 1.0) / ((z + 1.0).powi(2) - 4.0 * nu * z).powf(1.5)
}

/// Exact covariance `<tau_i tau_{i+k}> - <tau>^2` of the grand-canonical
/// ring of `L` sites at the fugacity of density `c`, for each lag.
pub fn covariance_finite(nu: f64, c: f64, l: usize, lags: &[usize]) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::InvalidParameter("ring needs L >= 1".into()));
    }
    let z = z_star(nu, c)?;
    let (l1, l2) = transfer_eigenvalues(nu, z);
    let r = l2 / l1;
    let q = r.powi(l as i32);
    let base = q * (1.0 - 2.0 * c).powi(2) / (1.0 + q).powi(2);
    lags.iter()
        .map(|&k| {
            if k > l {
                return Err(Error::Domain(format!("lag {k} exceeds ring length {l}")));
            }
            Ok(base + c * (1.0 - c) * (r.powi(k as i32) + r.powi((l - k) as i32)) / (1.0 + q))
        })
        .collect()
}

/// Mean density of the same finite grand-canonical ring.
pub fn density_finite(nu: f64, c: f64, l: usize) -> Result<f64> {
    let z = z_star(nu, c)?;
    let (l1, l2) = transfer_eigenvalues(nu, z);
    let q = (l2 / l1).powi(l as i32);
    Ok((c + (1.0 - c) * q) / (1.0 + q))
}

/// Expected `(1/L^2) sum_i (h_i - mean h)^2` of the height bridge
/// `h_i = sum_{j<i} (1 - 2 tau_j) - i (L - 2M)/L` on the grand-canonical ring.
/// Tends to `A/12` with an `O(xi/L)` gap.
pub fn width_finite(nu: f64, c: f64, l: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter("width needs L >= 2".into()));
    }
    let z = z_star(nu, c)?;
    let (l1, l2) = transfer_eigenvalues(nu, z);
    let r = l2 / l1;
    let q = r.powi(l as i32);
    let amp = 4.0 * c * (1.0 - c) * (1.0 - q) / (1.0 + q) * (1.0 - r * r);
    let lf = l as f64;
    let total: f64 = (1..l)
        .map(|m| {
            let k = 2.0 * std::f64::consts::PI * m as f64 / lf;
            let spectrum = amp / (1.0 - 2.0 * r * k.cos() + r * r);
            spectrum / (4.0 * (0.5 * k).sin().powi(2))
        })
        .sum();
    Ok(total / (lf * lf))
}

/// Scaled correlation length `xi / L` in the transition regime.
pub fn xi_tilde(c: f64, theta: f64) -> f64 {
    2.0 * c * (1.0 - c) / theta
}

/// Covariance at lag `r L` when `xi ~ L`, `0 <= r <= 1`.
pub fn covariance_system_scale(c: f64, xi_tilde: f64, r: f64) -> f64 {
    let q = (-1.0 / xi_tilde).exp();
    (1.0 - 2.0 * c).powi(2) * q / (1.0 + q).powi(2)
        + c * (1.0 - c) * ((-r / xi_tilde).exp() + (-(1.0 - r) / xi_tilde).exp()) / (1.0 + q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_measure_limits() {
        for c in [0.1, 0.5, 0.8] {
            assert!((z_star(0.0, c).unwrap() - c / (1.0 - c)).abs() < 1e-14);
            assert_eq!(correlation_length(0.0, c).unwrap(), 0.0);
            assert!((amplitude(0.0, c).unwrap() - 4.0 * c * (1.0 - c)).abs() < 1e-15);
        }
    }

    #[test]
    fn fugacity_reproduces_density() {
        for nu in [-0.5, 0.0, 0.3, 0.9, 0.9999] {
            for c in [0.05, 0.3, 0.5, 0.71] {
                let z = z_star(nu, c).unwrap();
                assert!((density_at_fugacity(nu, z) - c).abs() < 1e-12);
                let a1 = amplitude(nu, c).unwrap();
                let a2 = amplitude_from_fugacity(nu, z);
                assert!((a1 - a2).abs() < 1e-10 * a1, "nu={nu} c={c}: {a1} vs {a2}");
            }
        }
        assert_eq!(z_star(0.6, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn divergent_correlation_length() {
        let c: f64 = 0.3;
        for lambda in [1e4, 1e6] {
            let nu = 1.0 - 1.0 / lambda;
            let xi = correlation_length(nu, c).unwrap();
            let approx = (lambda * c * (1.0 - c)).sqrt();
            assert!((xi / approx - 1.0).abs() < 2.0 / lambda.sqrt());
        }
    }

    #[test]
    fn closed_form_correlation_length() {
        for nu in [0.2, 0.9] {
            for c in [0.2, 0.5] {
                let xi = correlation_length(nu, c).unwrap();
                let x: f64 = (1.0 - (1.0 - 2.0 * c).powi(2) * nu) / (1.0 - nu);
                let alt = -1.0 / (1.0 - 2.0 / (1.0 + x.sqrt())).ln();
                assert!((xi - alt).abs() < 1e-12 * xi);
            }
        }
    }

    #[test]
    fn covariance_decays_and_matches_amplitude() {
        let (nu, c) = (0.8, 0.35);
        let l = 4000;
        let lags: Vec<usize> = (0..=l).collect();
        let cov = covariance_finite(nu, c, l, &lags).unwrap();
        assert!((cov[0] - c * (1.0 - c)).abs() < 1e-12);
        let total: f64 = cov[..l].iter().sum();
        assert!((4.0 * total - amplitude(nu, c).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn width_matches_direct_quadratic_form() {
        for (nu, c, l) in [(0.0, 0.5, 16usize), (0.7, 0.3, 24), (-0.4, 0.6, 13), (0.99, 0.5, 40)] {
            let lags: Vec<usize> = (0..l).collect();
            let cov = covariance_finite(nu, c, l, &lags).unwrap();
            // centered bridge coefficients t[i][j]
            let mut t = vec![vec![0.0; l]; l];
            for (i, row) in t.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if j < i { 1.0 } else { 0.0 } - i as f64 / l as f64;
                }
            }
            for j in 0..l {
                let mean = (0..l).map(|i| t[i][j]).sum::<f64>() / l as f64;
                for row in t.iter_mut() {
                    row[j] -= mean;
                }
            }
            let mut ew = 0.0;
            for row in &t {
                for j in 0..l {
                    for k in 0..l {
                        ew += row[j] * row[k] * 4.0 * cov[(j + l - k) % l];
                    }
                }
            }
            let want = ew / (l * l) as f64;
            let got = width_finite(nu, c, l).unwrap();
            assert!((got - want).abs() < 1e-12, "nu={nu}: {got} vs {want}");
        }
    }

    #[test]
    fn width_tends_to_a_over_12() {
        let (nu, c) = (0.99, 0.5);
        let a12 = amplitude(nu, c).unwrap() / 12.0;
        let gaps: Vec<f64> = [512, 2048, 8192].iter().map(|&l| (width_finite(nu, c, l).unwrap() - a12) * l as f64).collect();
        // gap * L settles
        assert!((gaps[2] - gaps[1]).abs() < 0.05 * gaps[2].abs());
        assert!((width_finite(0.0, 0.5, 100).unwrap() - (1.0 - 1e-4) / 12.0).abs() < 1e-14);
    }

    #[test]
    fn system_scale_form_matches_finite_ring() {
        // lambda ~ L^2 so that xi ~ L
        let l = 2000;
        let c: f64 = 0.4;
        let nu = 1.0 - 1.0 / (0.5 * (l * l) as f64);
        let xi = correlation_length(nu, c).unwrap();
        let xt = xi / l as f64;
        let cov = covariance_finite(nu, c, l, &[0, 500, 1000]).unwrap();
        for (i, r) in [0.0, 0.25, 0.5].iter().enumerate() {
            let s = covariance_system_scale(c, xt, *r);
            assert!((cov[i] - s).abs() < 1e-3 * c * (1.0 - c), "{} vs {s}", cov[i]);
        }
    }
}
