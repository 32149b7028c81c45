//! Modified Bessel functions of the first kind, integer order.

use std::f64::consts::PI;

/// Switch from the power series to the large-argument expansion.
const ASYMPTOTIC_FROM: f64 = 30.0;

fn power_series(k: u32, x: f64) -> f64 {
    let mut term = 1.0;
    for j in 1..=k {
        term *= 0.5 * x / j as f64;
    }
    let q = 0.25 * x * x;
    let mut sum = term;
    for j in 1..2000 {
        term *= q / (j as f64 * (j + k as usize) as f64);
        sum += term;
        if term <= 1e-18 * sum {
            break;
        }
    }
    sum
}

fn asymptotic_scaled(k: u32, x: f64) -> f64 {
    let four_k2 = 4.0 * (k as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..60 {
        let odd = (2 * j - 1) as f64;
        let next = -term * (four_k2 - odd * odd) / (8.0 * j as f64 * x);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `e^{-|x|} I_k(x)`.
pub fn bessel_i_scaled(k: u32, x: f64) -> f64 {
    let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let v = if ax < ASYMPTOTIC_FROM {
        power_series(k, ax) * (-ax).exp()
    } else {
        asymptotic_scaled(k, ax)
    };
    sign * v
}

/// `I_k(x)`; overflows to infinity beyond `x ~ 700`.
pub fn bessel_i(k: u32, x: f64) -> f64 {
    if x.abs() < ASYMPTOTIC_FROM {
        let v = power_series(k, x.abs());
        if x < 0.0 && k % 2 == 1 {
            -v
        } else {
            v
        }
    } else {
        bessel_i_scaled(k, x) * x.abs().exp()
    }
}
