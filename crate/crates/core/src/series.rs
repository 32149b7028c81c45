//! Truncated formal power series over a [`Scalar`] field.
//!
//! Coefficients are stored lowest order first; every operation truncates to
//! the order of its shortest operand.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Series<T> {
    /// `coeffs[k]` is the coefficient of `x^k`; the series is known to order
    /// `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Highest known order.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![T::zero(); order + 1];
        c[0] = T::one();
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::DegenerateSeries("series with zero constant term has no inverse".into()));
        }
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(T::one() / a0.clone());
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-acc / a0.clone());
        }
        Ok(Self::new(out))
    }

    pub fn powi(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self(inner(x))`; `inner` must have no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::DegenerateSeries("inner series of a composition must vanish at 0".into()));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut out = vec![T::zero(); n + 1];
        out[0] = self.coeffs[0].clone();
        let mut power = Self::one(n);
        for k in 1..=n {
            power = power.mul(&inner);
            let a = &self.coeffs[k];
            if a.is_zero() {
                continue;
            }
            for (slot, c) in out.iter_mut().zip(power.coeffs.iter()).skip(k) {
                *slot = slot.clone() + a.clone() * c.clone();
            }
        }
        Ok(Self::new(out))
    }

    /// Compositional inverse of `f(x) = a1 x + a2 x^2 + ...` by Lagrange
    /// inversion: `[y^k] f^{-1}(y) = (1/k) [x^{k-1}] (x/f(x))^k`.
    pub fn revert(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::DegenerateSeries("series to revert must vanish at 0".into()));
        }
        let n = self.order();
        if n == 0 {
            return Ok(Self::new(vec![T::zero()]));
        }
        if self.coeffs[1].is_zero() {
            return Err(Error::DegenerateSeries("zero linear coefficient: series is not invertible".into()));
        }
        // f(x)/x to order n-1, then its reciprocal.
        let shifted = Self::new(self.coeffs[1..].to_vec());
        let phi = shifted.inverse()?;
        let mut out = vec![T::zero(); n + 1];
        let mut power = Self::one(n - 1);
        for k in 1..=n {
            power = power.mul(&phi);
            let kk = T::from_usize(k).expect("order fits the scalar type");
            out[k] = power.coeffs[k - 1].clone() / kk;
        }
        Ok(Self::new(out))
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}
