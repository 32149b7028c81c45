//! Hopping parameters, the one-step kernel, stationary one-site weights and
//! the exclusion-ring / zero-range dictionaries.
//!
//! Two probabilities drive the dynamics: `p`, the hop probability of the head
//! of a cluster, and `mu`, the probability that each follower goes along once
//! the particle in front of it has moved. Everything else is derived:
//!
//! ```text
//! nu     = (mu - p) / (1 - p)
//! lambda = 1 / (1 - nu)
//! ```
//!
//! `Params<T>` is generic so the same code serves the exact big-rational
//! modules (`ExactParams`) and the floating point simulator and asymptotics
//! (`ModelParams`).

use num_traits::pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// `lambda = 1/(1 - nu)`, which diverges in the deterministic-aggregation
/// limit `nu = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Lambda<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Lambda<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Lambda::Infinite)
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Lambda::Finite(v) => Some(v),
            Lambda::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    p: T,
    mu: T,
    nu: T,
    lambda: Lambda<T>,
}

pub type ModelParams = Params<f64>;
pub type ExactParams = Params<Rational>;

fn check_probability<T: Scalar>(name: &str, x: &T) -> Result<()> {
    // NaN fails both comparisons.
    if !(*x >= T::zero() && *x <= T::one()) {
        return Err(Error::InvalidParameter(format!("{name} = {x:?} is not a probability")));
    }
    Ok(())
}

impl<T: Scalar> Params<T> {
    /// Derives `nu` and `lambda` from the two hop probabilities. `p = 1` is
    /// rejected because `nu` is undefined there.
    pub fn new(p: T, mu: T) -> Result<Self> {
        check_probability("p", &p)?;
        check_probability("mu", &mu)?;
        if p == T::one() {
            return Err(Error::InvalidParameter("p = 1 leaves nu undefined".into()));
        }
        let one = T::one();
        let nu = (mu.clone() - p.clone()) / (one.clone() - p.clone());
        let lambda = if nu == one {
            Lambda::Infinite
        } else {
            Lambda::Finite(one.clone() / (one - nu.clone()))
        };
        Ok(Self { p, mu, nu, lambda })
    }

    /// Builds parameters from `p` and `nu` (`mu = p + nu (1 - p)`).
    pub fn from_p_nu(p: T, nu: T) -> Result<Self> {
        let mu = p.clone() + nu * (T::one() - p.clone());
        Self::new(p, mu)
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn mu(&self) -> &T {
        &self.mu
    }

    pub fn nu(&self) -> &T {
        &self.nu
    }

    pub fn lambda(&self) -> &Lambda<T> {
        &self.lambda
    }

    /// Probability `phi(m|n)` that `m` of the `n` particles of a ZRP site (or
    /// the `m` front particles of an `n`-cluster) move in one step.
    pub fn hop_kernel(&self, m: usize, n: usize) -> Result<T> {
        if m > n {
            return Err(Error::Domain(format!("phi({m}|{n}) needs m <= n")));
        }
        let one = T::one();
        Ok(if n == 0 {
            one
        } else if m == 0 {
            one - self.p.clone()
        } else if m < n {
            self.p.clone() * pow(self.mu.clone(), m - 1) * (one - self.mu.clone())
        } else {
            self.p.clone() * pow(self.mu.clone(), n - 1)
        })
    }

    /// One-site stationary weight: `f(0) = 1`, `f(n) = 1 - nu`.
    pub fn site_weight(&self, n: usize) -> T {
        if n == 0 {
            T::one()
        } else {
            T::one() - self.nu.clone()
        }
    }

    /// `v(0) = 1`, `v(k) = mu^(k-1) (mu - nu)`; the `mu^k (1 - nu/mu)` form
    /// without the division, so `mu = 0` is fine.
    pub fn v(&self, k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            pow(self.mu.clone(), k - 1) * (self.mu.clone() - self.nu.clone())
        }
    }

    /// `w(0) = 1`, `w(k) = 1 - mu`.
    pub fn w(&self, k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            T::one() - self.mu.clone()
        }
    }
}

impl ExactParams {
    pub fn to_f64(&self) -> ModelParams {
        ModelParams::new(self.p.to_f64_lossy(), self.mu.to_f64_lossy())
            .expect("exact parameters are valid probabilities")
    }
}

impl ModelParams {
    /// `V(t) = (1 - nu t)/(1 - mu t)`.
    pub fn gen_v(&self, t: f64) -> f64 {
        (1.0 - self.nu * t) / (1.0 - self.mu * t)
    }

    /// `W(t) = (1 - mu t)/(1 - t)`.
    pub fn gen_w(&self, t: f64) -> f64 {
        (1.0 - self.mu * t) / (1.0 - t)
    }

    /// `F(t) = V(t) W(t) = (1 - nu t)/(1 - t)`.
    pub fn gen_f(&self, t: f64) -> f64 {
        (1.0 - self.nu * t) / (1.0 - t)
    }

    pub fn lambda_f64(&self) -> f64 {
        match self.lambda {
            Lambda::Finite(l) => l,
            Lambda::Infinite => f64::INFINITY,
        }
    }
}

/// Sizes and densities of an `L`-site exclusion ring holding `M` particles
/// and of its `N = L - M` site zero-range image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    /// Exclusion density `M/L`.
    pub c: f64,
    /// Zero-range density `M/N`.
    pub rho: f64,
}

pub fn density_map(m: usize, n: usize) -> Result<Geometry> {
    if n == 0 {
        return Err(Error::InvalidParameter("the zero-range lattice needs N >= 1 sites".into()));
    }
    let l = m + n;
    Ok(Geometry {
        l,
        m,
        n,
        c: m as f64 / l as f64,
        rho: m as f64 / n as f64,
    })
}

impl Geometry {
    pub fn from_ring(l: usize, m: usize) -> Result<Self> {
        if m >= l {
            return Err(Error::InvalidParameter(format!("ring of {l} sites cannot hold {m} particles with a hole")));
        }
        density_map(m, l - m)
    }
}

/// `c = rho / (1 + rho)`.
pub fn c_from_rho(rho: f64) -> f64 {
    rho / (1.0 + rho)
}

/// `rho = c / (1 - c)`.
pub fn rho_from_c(c: f64) -> f64 {
    c / (1.0 - c)
}
