//! Partition function, occupation law, current and diffusion coefficient of a
//! finite ring, each with a closed hypergeometric form and a coefficient
//! extraction form that is free of singular Pochhammer symbols.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::hypergeometric::{appell_f1_terminating, gauss_2f1_terminating, product_coefficient};
use crate::params::{ExactParams, Lambda};
use crate::scalar::{binomial, format_rational, int, Rational};

fn rational_binomial(n: i64, k: i64) -> Rational {
    Rational::from_integer(binomial(n, k))
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("the zero-range lattice needs N >= 1 sites".into()));
    }
    Ok(())
}

/// `Z(M, N) = C(L-1, M) ₂F₁(-M, -N; 1-L; ν)`.
pub fn partition_function(m: usize, n: usize, nu: &Rational) -> Result<Rational> {
    check_sites(n)?;
    if m == 0 {
        return Ok(Rational::one());
    }
    let (mi, ni) = (m as i64, n as i64);
    let l = mi + ni;
    Ok(rational_binomial(l - 1, mi) * gauss_2f1_terminating(-mi, -ni, 1 - l, nu)?)
}

/// `[z^M] F(z)^N` with `F(z) = (1 - νz)/(1 - z)`.
pub fn partition_function_coefficients(m: usize, n: usize, nu: &Rational) -> Result<Rational> {
    check_sites(n)?;
    let ni = n as i64;
    Ok(product_coefficient(&[(ni, nu.clone()), (-ni, int(1))], m))
}

/// `[z^{aM-1}] (1-νz)^{aN-1} (1-z)^{-aN} (1-μz)^{-1}`, which equals
/// `C(aL-2, aM-1) F₁(1-aM; 1-aN, 1; 2-aL; ν, μ)`.
pub fn jump_kernel(m: usize, n: usize, scale: usize, nu: &Rational, mu: &Rational) -> Rational {
    let (am, an) = ((scale * m) as i64, (scale * n) as i64);
    if am == 0 {
        return Rational::zero();
    }
    product_coefficient(&[(an - 1, nu.clone()), (-an, int(1)), (-1, mu.clone())], (am - 1) as usize)
}

/// `[z^{aM-1}] (1-νz)^{aN-1} (1-z)^{-aN-1}`, which equals
/// `C(aL-1, aM-1) ₂F₁(1-aM, 1-aN; 1-aL; ν)`.
pub fn gamma_kernel(m: usize, n: usize, scale: usize, nu: &Rational) -> Rational {
    let (am, an) = ((scale * m) as i64, (scale * n) as i64);
    if am == 0 {
        return Rational::zero();
    }
    product_coefficient(&[(an - 1, nu.clone()), (-an - 1, int(1))], (am - 1) as usize)
}

/// `C(aL-2, aM-1) F₁(1-aM; 1-aN, 1; 2-aL; ν, μ)`, rerouted through
/// [`jump_kernel`] when the F₁ lower parameter is singular (`aN = 1`).
pub(crate) fn jump_kernel_closed(m: usize, n: usize, scale: usize, nu: &Rational, mu: &Rational) -> Result<Rational> {
    let (am, an) = ((scale * m) as i64, (scale * n) as i64);
    let al = am + an;
    match appell_f1_terminating(1 - am, 1 - an, 1, 2 - al, nu, mu) {
        Ok(f1) => Ok(rational_binomial(al - 2, am - 1) * f1),
        Err(Error::SingularParameter(_)) => Ok(jump_kernel(m, n, scale, nu, mu)),
        Err(e) => Err(e),
    }
}

/// `C(aL-1, aM-1) ₂F₁(1-aM, 1-aN; 1-aL; ν)`; never singular for `N >= 1`.
pub(crate) fn gamma_kernel_closed(m: usize, n: usize, scale: usize, nu: &Rational) -> Result<Rational> {
    let (am, an) = ((scale * m) as i64, (scale * n) as i64);
    let al = am + an;
    Ok(rational_binomial(al - 1, am - 1) * gauss_2f1_terminating(1 - am, 1 - an, 1 - al, nu)?)
}

/// Stationary occupation law of one zero-range site,
/// `P(k) = f(k) Z(M-k, N-1) / Z(M, N)` for `k = 0..=M`; at `ν = 1` the
/// `ν → 1` limit.
pub fn occupation_distribution(m: usize, n: usize, nu: &Rational) -> Result<Vec<Rational>> {
    check_sites(n)?;
    if n == 1 {
        let mut p = vec![Rational::zero(); m + 1];
        p[m] = Rational::one();
        return Ok(p);
    }
    if nu.is_one() && m > 0 {
        // Limit ν → 1: one site holds everything.
        let mut p = vec![Rational::zero(); m + 1];
        p[0] = Rational::new(((n - 1) as i64).into(), (n as i64).into());
        p[m] = Rational::new(1.into(), (n as i64).into());
        return Ok(p);
    }
    let z = partition_function(m, n, nu)?;
    if z.is_zero() {
        return Err(Error::Domain(format!("Z({m},{n}) vanishes at nu = {nu}")));
    }
    let one_minus_nu = Rational::one() - nu;
    (0..=m)
        .map(|k| {
            let f = if k == 0 { Rational::one() } else { one_minus_nu.clone() };
            Ok(f * partition_function(m - k, n - 1, nu)? / &z)
        })
        .collect()
}

fn require_particles(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("needs at least one particle".into()));
    }
    Ok(())
}

/// At `ν = 1` every configuration decays into a single cluster that moves as
/// a whole with probability `p`.
fn aggregated_current(m: usize, params: &ExactParams) -> Option<Rational> {
    params.lambda().is_infinite().then(|| int(m as i64) * params.p())
}

/// Mean number of jumps per time step,
/// `J = (μ-ν) N M/(L-1) F₁(1-M; 1-N, 1; 2-L; ν, μ) / ₂F₁(-M, -N; 1-L; ν)`.
/// A singular F₁ falls back to the coefficient form; `ν = 1` returns the
/// aggregated limit `Mp`.
pub fn mean_jumps(m: usize, n: usize, params: &ExactParams) -> Result<Rational> {
    require_particles(m)?;
    check_sites(n)?;
    if let Some(j) = aggregated_current(m, params) {
        return Ok(j);
    }
    let (mi, ni) = (m as i64, n as i64);
    let l = mi + ni;
    let (mu, nu) = (params.mu(), params.nu());
    match appell_f1_terminating(1 - mi, 1 - ni, 1, 2 - l, nu, mu) {
        Ok(f1) => {
            let den = gauss_2f1_terminating(-mi, -ni, 1 - l, nu)?;
            Ok((mu - nu) * int(ni * mi) / int(l - 1) * f1 / den)
        }
        Err(Error::SingularParameter(_)) => mean_jumps_coefficients(m, n, params),
        Err(e) => Err(e),
    }
}

/// `J = N (μ-ν) [z^{M-1}] (1-νz)^{N-1} (1-z)^{-N} (1-μz)^{-1} / Z(M, N)`.
pub fn mean_jumps_coefficients(m: usize, n: usize, params: &ExactParams) -> Result<Rational> {
    require_particles(m)?;
    check_sites(n)?;
    if let Some(j) = aggregated_current(m, params) {
        return Ok(j);
    }
    let (mu, nu) = (params.mu(), params.nu());
    let z = partition_function_coefficients(m, n, nu)?;
    Ok(int(n as i64) * (mu - nu) * jump_kernel(m, n, 1, nu, mu) / z)
}

fn finite_lambda(params: &ExactParams) -> Result<Rational> {
    match params.lambda() {
        Lambda::Finite(l) => Ok(l.clone()),
        Lambda::Infinite => Err(Error::Domain("the diffusion coefficient needs nu < 1".into())),
    }
}

/// Single-particle diffusion coefficient `Δ = c₂/M²`, in the closed form
/// built from F₁ and ₂F₁ at single and doubled arguments.
pub fn diffusion_exact(m: usize, n: usize, params: &ExactParams) -> Result<Rational> {
    require_particles(m)?;
    check_sites(n)?;
    let lambda = finite_lambda(params)?;
    let (mi, ni) = (m as i64, n as i64);
    let l = mi + ni;
    let (mu, nu) = (params.mu(), params.nu());
    let f1_single = match appell_f1_terminating(1 - mi, 1 - ni, 1, 2 - l, nu, mu) {
        Ok(v) => v,
        Err(Error::SingularParameter(_)) => return diffusion_exact_coefficients(m, n, params),
        Err(e) => return Err(e),
    };
    let f1_double = appell_f1_terminating(1 - 2 * mi, 1 - 2 * ni, 1, 2 - 2 * l, nu, mu)?;
    let h_single = gauss_2f1_terminating(1 - mi, 1 - ni, 1 - l, nu)?;
    let h_double = gauss_2f1_terminating(1 - 2 * mi, 1 - 2 * ni, 1 - 2 * l, nu)?;
    let c_single = rational_binomial(l - 1, mi - 1);
    let pref = lambda * params.p() * rational_binomial(2 * l - 2, 2 * mi - 1) / (&c_single * &c_single);
    let h2 = &h_single * &h_single;
    let first = Rational::new((2 * l - 1).into(), (2 * (l - 1)).into()) * f1_single * h_double / (&h2 * &h_single);
    let second = f1_double / h2;
    Ok(pref * (first - second))
}

/// `Δ = pλ [Φ₁Γ₂/Γ₁³ - Φ₂/Γ₁²]` with `Φ_a` = [`jump_kernel`] and
/// `Γ_a` = [`gamma_kernel`] at scale `a`.
pub fn diffusion_exact_coefficients(m: usize, n: usize, params: &ExactParams) -> Result<Rational> {
    require_particles(m)?;
    check_sites(n)?;
    let lambda = finite_lambda(params)?;
    let (mu, nu) = (params.mu(), params.nu());
    let phi1 = jump_kernel(m, n, 1, nu, mu);
    let phi2 = jump_kernel(m, n, 2, nu, mu);
    let g1 = gamma_kernel(m, n, 1, nu);
    let g2 = gamma_kernel(m, n, 2, nu);
    let g1sq = &g1 * &g1;
    Ok(lambda * params.p() * (phi1 * g2 / (&g1sq * &g1) - phi2 / g1sq))
}

/// Exact finite-size summary for one `(M, N, p, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport {
    pub m: usize,
    pub n: usize,
    pub z: Rational,
    pub occupation: Vec<Rational>,
    pub current: Rational,
    /// `None` when `ν = 1`.
    pub delta: Option<Rational>,
}

pub fn exact_report(m: usize, n: usize, params: &ExactParams) -> Result<ExactReport> {
    let nu = params.nu();
    let z = partition_function(m, n, nu)?;
    let occupation = occupation_distribution(m, n, nu)?;
    let current = if m == 0 { Rational::zero() } else { mean_jumps(m, n, params)? };
    let delta = match params.lambda() {
        Lambda::Finite(_) if m > 0 => Some(diffusion_exact(m, n, params)?),
        _ => None,
    };
    Ok(ExactReport { m, n, z, occupation, current, delta })
}

/// Flattened, display-ready view of an [`ExactReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ExactRow {
    pub m: usize,
    pub n: usize,
    pub z: String,
    pub z_f64: f64,
    pub j: String,
    pub j_f64: f64,
    pub delta: String,
    pub delta_f64: f64,
}

impl ExactReport {
    pub fn row(&self) -> ExactRow {
        use crate::scalar::Scalar;
        let (delta, delta_f64) = match &self.delta {
            Some(d) => (format_rational(d), d.to_f64_lossy()),
            None => (String::new(), f64::NAN),
        };
        ExactRow {
            m: self.m,
            n: self.n,
            z: format_rational(&self.z),
            z_f64: self.z.to_f64_lossy(),
            j: format_rational(&self.current),
            j_f64: self.current.to_f64_lossy(),
            delta,
            delta_f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn nus() -> Vec<Rational> {
        vec![int(0), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(-1, 2), ratio(-7, 3)]
    }

    fn param_grid() -> Vec<ExactParams> {
        let mut out = Vec::new();
        for p in [ratio(1, 3), ratio(1, 2), ratio(4, 5)] {
            for mu in [int(0), ratio(1, 5), ratio(1, 2), ratio(9, 10), int(1)] {
                out.push(ExactParams::new(p.clone(), mu).unwrap());
            }
        }
        out
    }

    #[test]
    fn two_by_two_partition_function() {
        for nu in nus() {
            let want = (int(1) - &nu) * (int(3) - &nu);
            assert_eq!(partition_function(2, 2, &nu).unwrap(), want);
        }
    }

    #[test]
    fn trivial_partition_functions() {
        for n in 1..10usize {
            for nu in nus() {
                assert_eq!(partition_function(1, n, &nu).unwrap(), int(n as i64) * (int(1) - &nu));
                assert_eq!(partition_function(0, n, &nu).unwrap(), int(1));
            }
            for m in 0..10usize {
                let l = (m + n) as i64;
                assert_eq!(partition_function(m, n, &int(0)).unwrap(), rational_binomial(l - 1, m as i64));
            }
        }
        assert!(partition_function(3, 0, &int(0)).is_err());
    }

    #[test]
    fn closed_form_matches_coefficients() {
        for l in 2..=14usize {
            for m in 0..l {
                for nu in nus() {
                    assert_eq!(
                        partition_function(m, l - m, &nu).unwrap(),
                        partition_function_coefficients(m, l - m, &nu).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn occupation_normalizes() {
        for m in 0..=12usize {
            for n in 1..=12usize {
                for nu in [ratio(1, 2), ratio(-1, 3)] {
                    let p = occupation_distribution(m, n, &nu).unwrap();
                    assert_eq!(p.iter().sum::<Rational>(), int(1), "M={m} N={n}");
                }
            }
        }
        assert_eq!(occupation_distribution(4, 1, &ratio(1, 2)).unwrap()[4], int(1));
    }

    #[test]
    fn occupation_two_by_two_by_enumeration() {
        // Configurations (2,0), (0,2), (1,1) with weights (1-ν), (1-ν), (1-ν)².
        let nu = ratio(1, 2);
        let w = int(1) - &nu;
        let z = &w + &w + &w * &w;
        let p0 = w.clone() / &z;
        let p1 = (&w * &w) * int(2) / (&z * int(2));
        let p2 = w.clone() / &z;
        assert_eq!(occupation_distribution(2, 2, &nu).unwrap(), vec![p0, p1, p2]);
    }

    #[test]
    fn single_free_particle_current_is_p() {
        for q in param_grid() {
            for n in 1..6 {
                assert_eq!(mean_jumps(1, n, &q).unwrap(), q.p().clone());
            }
        }
    }

    #[test]
    fn current_routes_agree() {
        for q in param_grid() {
            for m in 1..=6usize {
                for n in 1..=6usize {
                    assert_eq!(mean_jumps(m, n, &q).unwrap(), mean_jumps_coefficients(m, n, &q).unwrap());
                }
            }
        }
    }

    #[test]
    fn single_site_current_is_mean_kernel() {
        // One ZRP site: every step moves m of the M particles with law φ(m|M).
        for q in param_grid() {
            for m in 1..6usize {
                let want: Rational = (0..=m).map(|k| int(k as i64) * q.hop_kernel(k, m).unwrap()).sum();
                assert_eq!(mean_jumps(m, 1, &q).unwrap(), want);
            }
        }
    }

    #[test]
    fn diffusion_routes_agree() {
        for q in param_grid().into_iter().filter(|q| !q.lambda().is_infinite()) {
            for m in 1..=5usize {
                for n in 1..=5usize {
                    assert_eq!(
                        diffusion_exact(m, n, &q).unwrap(),
                        diffusion_exact_coefficients(m, n, &q).unwrap(),
                        "M={m} N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn single_particle_diffusion_is_bernoulli() {
        for q in param_grid().into_iter().filter(|q| !q.lambda().is_infinite()) {
            for n in 1..6 {
                let p = q.p().clone();
                assert_eq!(diffusion_exact(1, n, &q).unwrap(), &p * (int(1) - &p));
            }
        }
    }

    #[test]
    fn single_site_diffusion_is_kernel_variance() {
        // N = 1: steps are i.i.d. draws from φ(·|M), so c₂ is their variance.
        for q in param_grid().into_iter().filter(|q| !q.lambda().is_infinite()) {
            for m in 1..6usize {
                let mean: Rational = (0..=m).map(|k| int(k as i64) * q.hop_kernel(k, m).unwrap()).sum();
                let second: Rational = (0..=m).map(|k| int((k * k) as i64) * q.hop_kernel(k, m).unwrap()).sum();
                let var = second - &mean * &mean;
                assert_eq!(diffusion_exact(m, 1, &q).unwrap(), var / int((m * m) as i64));
            }
        }
    }

    #[test]
    fn aggregated_limit() {
        let q = ExactParams::new(ratio(2, 7), int(1)).unwrap();
        assert_eq!(mean_jumps(4, 3, &q).unwrap(), ratio(8, 7));
        assert_eq!(mean_jumps_coefficients(4, 3, &q).unwrap(), ratio(8, 7));
        let p = occupation_distribution(4, 3, &int(1)).unwrap();
        assert_eq!(p, vec![ratio(2, 3), int(0), int(0), int(0), ratio(1, 3)]);
    }

    #[test]
    fn diffusion_rejects_infinite_lambda() {
        let q = ExactParams::new(ratio(1, 2), int(1)).unwrap();
        assert!(diffusion_exact(2, 2, &q).is_err());
        let r = exact_report(2, 2, &q).unwrap();
        assert!(r.delta.is_none());
    }
}
