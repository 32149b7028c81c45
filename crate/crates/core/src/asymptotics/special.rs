//! Gamma and Riemann zeta on the real line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::{binomial, int, Rational};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments; poles return NaN.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

const BERNOULLI_COUNT: usize = 24;

/// `B_{2j}` for `j = 1..=BERNOULLI_COUNT`, from the exact recurrence.
fn even_bernoulli() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let top = 2 * BERNOULLI_COUNT;
        let mut b: Vec<Rational> = vec![int(1)];
        for m in 1..=top {
            let mut acc = int(0);
            for (k, bk) in b.iter().enumerate() {
                acc += Rational::from_integer(binomial(m as i64 + 1, k as i64)) * bk;
            }
            b.push(-acc / int(m as i64 + 1));
        }
        (1..=BERNOULLI_COUNT).map(|j| b[2 * j].to_f64().unwrap_or(f64::NAN)).collect()
    })
}

fn zeta_euler_maclaurin(s: f64) -> f64 {
    const N: usize = 24;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for (j, b) in even_bernoulli().iter().enumerate() {
        let term = b / fact * poch * npow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k = 2.0 * (j as f64 + 1.0);
        poch *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        npow /= n * n;
    }
    sum
}

/// Riemann zeta for real `s != 1`. Negative arguments go through the
/// functional equation so the direct sum never cancels.
pub fn zeta(s: f64) -> Result<f64> {
    if s == 1.0 || !s.is_finite() {
        return Err(Error::Domain(format!("zeta({s})")));
    }
    if s == 0.0 {
        return Ok(-0.5);
    }
    if s < 0.0 {
        if (0.5 * s) == (0.5 * s).floor() {
            return Ok(0.0);
        }
        let t = 1.0 - s;
        let v = 2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(t) * zeta_euler_maclaurin(t);
        return Ok(v);
    }
    Ok(zeta_euler_maclaurin(s))
}
