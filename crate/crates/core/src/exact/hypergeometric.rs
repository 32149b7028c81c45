//! Terminating Gauss ₂F₁ and Appell F₁ series in exact rational arithmetic,
//! plus coefficient extraction from products of binomial factors, which is
//! the generating-function form of the same numbers.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{factorial, int, pochhammer_int, Rational};
use crate::series::Series;

/// Above this termination order the F₁ generating-function cross-check is
/// skipped; it roughly doubles the cost and the routes are tested exhaustively
/// below it.
pub const F1_CROSS_CHECK_MAX_ORDER: usize = 256;

fn upper_order(a: i64) -> Result<usize> {
    if a > 0 {
        return Err(Error::Domain(format!("terminating series needs a nonpositive upper parameter, got {a}")));
    }
    Ok((-a) as usize)
}

fn termination_order(a: i64, b: i64) -> Result<usize> {
    let n = upper_order(a)?;
    Ok(if b <= 0 { n.min((-b) as usize) } else { n })
}

fn guard_pochhammer(c: i64, order: usize, what: &str) -> Result<()> {
    // (c)_k = c (c+1) ... (c+k-1) vanishes iff -c in [0, k-1].
    if c <= 0 && ((-c) as usize) < order {
        return Err(Error::SingularParameter(format!(
            "{what}: lower parameter {c} gives a zero Pochhammer symbol before the series terminates at order {order}"
        )));
    }
    Ok(())
}

/// Coefficients `t_k = (a)_k (b)_k / ((c)_k k!) x^k` for `k = 0..=order`.
fn gauss_terms(a: i64, b: i64, c: i64, x: &Rational, order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut t = Rational::one();
    out.push(t.clone());
    for k in 0..order as i64 {
        if t.is_zero() {
            out.push(Rational::zero());
            continue;
        }
        t = t * Rational::new((a + k).into(), ((c + k) * (k + 1)).into()) * int(b + k) * x;
        out.push(t.clone());
    }
    out
}

/// `₂F₁(a, b; c; x)` for a nonpositive integer `a` (or `b`).
pub fn gauss_2f1_terminating(a: i64, b: i64, c: i64, x: &Rational) -> Result<Rational> {
    let (a, b) = if a > 0 && b <= 0 { (b, a) } else { (a, b) };
    let order = termination_order(a, b)?;
    guard_pochhammer(c, order, "2F1")?;
    Ok(gauss_terms(a, b, c, x, order).into_iter().sum())
}

/// Largest `m + n` with a nonzero term.
fn f1_order(alpha: i64, beta: i64, betap: i64) -> Result<usize> {
    let mut order = upper_order(alpha)?;
    if beta <= 0 && betap <= 0 {
        order = order.min((-beta - betap) as usize);
    }
    Ok(order)
}

/// `F₁(α; β, β'; γ; x, y)` for a nonpositive integer `α`, by the double sum
/// `Σ_m (α)_m (β)_m / ((γ)_m m!) x^m ₂F₁(α+m, β'; γ+m; y)`.
pub fn appell_f1_double_sum(alpha: i64, beta: i64, betap: i64, gamma: i64, x: &Rational, y: &Rational) -> Result<Rational> {
    let order = f1_order(alpha, beta, betap)?;
    guard_pochhammer(gamma, order, "F1")?;
    let outer = gauss_terms(alpha, beta, gamma, x, order);
    let mut acc = Rational::zero();
    for (m, coeff) in outer.into_iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let m = m as i64;
        let inner_order = (order as i64 - m) as usize;
        let inner: Rational = gauss_terms(alpha + m, betap, gamma + m, y, inner_order).into_iter().sum();
        acc += coeff * inner;
    }
    Ok(acc)
}

/// Series of `(1 - x z)^e` to the given order, for any integer `e`.
pub fn binomial_factor(e: i64, x: &Rational, order: usize) -> Series<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut c = Rational::one();
    out.push(c.clone());
    let mx = -x.clone();
    for k in 0..order as i64 {
        c = c * Rational::new((e - k).into(), (k + 1).into()) * &mx;
        out.push(c.clone());
    }
    Series::new(out)
}

/// `[z^order] Π (1 - x_i z)^{e_i}`.
pub fn product_coefficient(factors: &[(i64, Rational)], order: usize) -> Rational {
    let mut acc = Series::one(order);
    for (e, x) in factors {
        if *e == 0 || x.is_zero() {
            continue;
        }
        acc = acc.mul(&binomial_factor(*e, x, order));
    }
    acc.into_coeffs().pop().expect("non-empty series")
}

/// The same F₁ value from the generating function
/// `(1-z)^{α_G} (1-xz)^{-β} (1-yz)^{-β'} = Σ_n (-α_G)_n / n! F₁(-n; β, β'; α_G-n+1; x, y) z^n`.
pub fn appell_f1_generating(alpha: i64, beta: i64, betap: i64, gamma: i64, x: &Rational, y: &Rational) -> Result<Rational> {
    let n = upper_order(alpha)?;
    guard_pochhammer(gamma, n, "F1")?;
    let alpha_g = gamma + n as i64 - 1;
    let coeff = product_coefficient(&[(alpha_g, int(1)), (-beta, x.clone()), (-betap, y.clone())], n);
    let norm = Rational::new(factorial(n), pochhammer_int(-alpha_g, n));
    Ok(coeff * norm)
}

/// `F₁(α; β, β'; γ; x, y)` for a nonpositive integer `α`. The double sum is
/// checked against the generating-function route up to
/// [`F1_CROSS_CHECK_MAX_ORDER`].
pub fn appell_f1_terminating(alpha: i64, beta: i64, betap: i64, gamma: i64, x: &Rational, y: &Rational) -> Result<Rational> {
    let direct = appell_f1_double_sum(alpha, beta, betap, gamma, x, y)?;
    if (-alpha) as usize <= F1_CROSS_CHECK_MAX_ORDER {
        let gf = match appell_f1_generating(alpha, beta, betap, gamma, x, y) {
            Ok(v) => v,
            // The generating function normalizes by (γ)_{|α|}, which can vanish
            // after the double sum has already terminated through β and β'.
            Err(Error::SingularParameter(_)) => return Ok(direct),
            Err(e) => return Err(e),
        };
        if gf != direct {
            return Err(Error::CrossCheck(format!(
                "F1({alpha}; {beta}, {betap}; {gamma}; {x}, {y}): double sum {direct} != generating function {gf}"
            )));
        }
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::pow;
    use proptest::prelude::*;

    fn poch(a: i64, n: usize) -> Rational {
        Rational::from_integer(pochhammer_int(a, n))
    }

    #[test]
    fn three_term_example() {
        // ₂F₁(-2,-2;-3;ν) = 1 - 4ν/3 + ν²/3
        for nu in [ratio(1, 2), ratio(-3, 7), ratio(0, 1), ratio(5, 4)] {
            let want = int(1) - ratio(4, 3) * &nu + ratio(1, 3) * &nu * &nu;
            assert_eq!(gauss_2f1_terminating(-2, -2, -3, &nu).unwrap(), want);
        }
    }

    #[test]
    fn singular_lower_parameter_is_reported() {
        assert!(matches!(gauss_2f1_terminating(-3, 1, -1, &ratio(1, 2)), Err(Error::SingularParameter(_))));
        assert!(matches!(
            appell_f1_terminating(-3, 1, 1, -1, &ratio(1, 2), &ratio(1, 3)),
            Err(Error::SingularParameter(_))
        ));
        // Terminates through b before reaching the zero.
        assert!(gauss_2f1_terminating(-3, -1, -1, &ratio(1, 2)).is_ok());
    }

    #[test]
    fn chu_vandermonde() {
        // ₂F₁(-n, -α; -β-n+1; 1) = (β-α)_n / (β)_n
        for n in 0..=12usize {
            for alpha in -6i64..=12 {
                for beta in 1i64..=12 {
                    let lhs = gauss_2f1_terminating(-(n as i64), -alpha, -beta - n as i64 + 1, &int(1)).unwrap();
                    assert_eq!(lhs, poch(beta - alpha, n) / poch(beta, n), "n={n} α={alpha} β={beta}");
                }
            }
        }
    }

    #[test]
    fn euler_transformation_terminating() {
        // With c > 0 and b = c + j both sides are terminating polynomials.
        for z in [ratio(2, 7), ratio(-5, 3), int(3)] {
            for a in -6i64..=0 {
                for c in 1i64..=5 {
                    for j in 0i64..=5 {
                        let b = c + j;
                        let lhs = gauss_2f1_terminating(a, b, c, &z).unwrap();
                        let e = c - a - b;
                        let pref = num_traits::pow(int(1) - &z, e.unsigned_abs() as usize);
                        let pref = if e >= 0 { pref } else { pref.recip() };
                        let rhs = pref * gauss_2f1_terminating(c - b, c - a, c, &z).unwrap();
                        assert_eq!(lhs, rhs, "a={a} b={b} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn generating_function_of_gauss() {
        // (1-xt)^α / (1-t)^β = Σ (β)_n/n! ₂F₁(-n,-α;-β-n+1;x) t^n
        let x = ratio(3, 5);
        for alpha in -3i64..=6 {
            for beta in 1i64..=5 {
                let s = binomial_factor(alpha, &x, 10).mul(&binomial_factor(-beta, &int(1), 10));
                for n in 0..=10usize {
                    let f = gauss_2f1_terminating(-(n as i64), -alpha, -beta - n as i64 + 1, &x).unwrap();
                    assert_eq!(s.coeffs()[n], poch(beta, n) / Rational::from_integer(factorial(n)) * f);
                }
            }
        }
    }

    #[test]
    fn f1_trivial_and_reduction() {
        let (x, y) = (ratio(1, 3), ratio(-2, 5));
        assert_eq!(appell_f1_terminating(0, 4, -2, 7, &x, &y).unwrap(), int(1));
        for alpha in -8i64..=0 {
            for beta in -3i64..=4 {
                for gamma in [-20i64, -11, 1, 3] {
                    let f1 = appell_f1_terminating(alpha, beta, 5, gamma, &x, &int(0)).unwrap();
                    assert_eq!(f1, gauss_2f1_terminating(alpha, beta, gamma, &x).unwrap());
                    let f1 = appell_f1_terminating(alpha, beta, 0, gamma, &x, &y).unwrap();
                    assert_eq!(f1, gauss_2f1_terminating(alpha, beta, gamma, &x).unwrap());
                }
            }
        }
    }

    #[test]
    fn generalized_chu_vandermonde() {
        // F₁(-n; β, β'; α-n+1; x, 1) = (β'-α)_n/(-α)_n ₂F₁(-n, β; α-β'-n+1; x)
        for x in [ratio(1, 2), ratio(-3, 4), int(2)] {
            for n in 0..=10i64 {
                for alpha in [-7i64, -3, -1, 11, 14] {
                    for beta in -2i64..=3 {
                        for betap in -2i64..=3 {
                            let gamma = alpha - n + 1;
                            let c2 = alpha - betap - n + 1;
                            if (gamma <= 0 && -gamma < n) || (c2 <= 0 && -c2 < n) || (-alpha <= 0 && alpha < n) {
                                continue;
                            }
                            let lhs = appell_f1_terminating(-n, beta, betap, gamma, &x, &int(1)).unwrap();
                            let rhs = poch(betap - alpha, n as usize) / poch(-alpha, n as usize)
                                * gauss_2f1_terminating(-n, beta, c2, &x).unwrap();
                            assert_eq!(lhs, rhs, "n={n} α={alpha} β={beta} β'={betap}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_coefficient_matches_binomials() {
        // [z^k] (1-z)^{-n} = C(n+k-1, k)
        for n in 1..8i64 {
            for k in 0..10usize {
                let c = product_coefficient(&[(-n, int(1))], k);
                assert_eq!(c, Rational::from_integer(crate::scalar::binomial(n + k as i64 - 1, k as i64)));
            }
        }
        assert_eq!(product_coefficient(&[(3, ratio(1, 2))], 3), -pow(ratio(1, 2), 3));
    }

    proptest! {
        #[test]
        fn f1_routes_agree(alpha in -14i64..=0, beta in -6i64..6, betap in -6i64..6, gamma in prop_oneof![-40i64..-14, 1i64..9],
                           xn in -9i64..9, xd in 1i64..9, yn in -9i64..9, yd in 1i64..9) {
            let (x, y) = (ratio(xn, xd), ratio(yn, yd));
            let a = appell_f1_double_sum(alpha, beta, betap, gamma, &x, &y).unwrap();
            let b = appell_f1_generating(alpha, beta, betap, gamma, &x, &y).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn f1_symmetric_in_variable_pairs(alpha in -10i64..=0, beta in -4i64..5, betap in -4i64..5, gamma in 1i64..6,
                                          xn in -5i64..5, yn in -5i64..5) {
            let (x, y) = (ratio(xn, 3), ratio(yn, 4));
            prop_assert_eq!(
                appell_f1_terminating(alpha, beta, betap, gamma, &x, &y).unwrap(),
                appell_f1_terminating(alpha, betap, beta, gamma, &y, &x).unwrap()
            );
        }
    }
}
