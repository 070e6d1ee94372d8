//! The ratios conjecture: the zeta skeleton Y_U, the arithmetic factor A_U, and the
//! one-shift predictions for the ratio sum and the log-derivative sum over I_{g+1}.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::euler::{euler_product_complex, euler_sum_complex, EulerProductValue};
use super::moments::family_size;
use super::zeta::{inv_zeta_a, x_factor, zeta_a, zeta_a_logderiv};
use crate::error::{Error, Result};
use crate::family::FamilyKind;
use crate::num::{cexp_m1, cln_1p, Real};

fn xpow<T: Real>(x: T, s: Complex<T>) -> Complex<T> {
    (-s * x.ln()).exp()
}

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Y_U = prod_{j<=k} zeta(1+a_j+a_k) prod_{q<r} zeta(1+g_q+g_r) / prod_{k,q} zeta(1+a_k+g_q).
pub fn ratios_y<T: Real>(alpha: &[Complex<T>], gamma: &[Complex<T>], q: T) -> Result<Complex<T>> {
    let one = Complex::<T>::one();
    let mut y = one;
    for j in 0..alpha.len() {
        for k in j..alpha.len() {
            y = y * zeta_a(one + alpha[j] + alpha[k], q)?;
        }
    }
    for a in 0..gamma.len() {
        for b in a + 1..gamma.len() {
            y = y * zeta_a(one + gamma[a] + gamma[b], q)?;
        }
    }
    for &a in alpha {
        for &g in gamma {
            y = y * inv_zeta_a(one + a + g, q);
        }
    }
    Ok(y)
}

/// log of the per-prime factor of A_U at norm x, in the closed form of the corollary:
/// the zeta cancellation factors times (half-sum of the two rational products + 1/x)/(1 + 1/x).
pub fn ratios_a_log_factor<T: Real>(alpha: &[Complex<T>], gamma: &[Complex<T>], x: T) -> Complex<T> {
    let one = Complex::<T>::one();
    let mut log = Complex::<T>::zero();
    for j in 0..alpha.len() {
        for k in j..alpha.len() {
            log = log + cln_1p(-xpow(x, one + alpha[j] + alpha[k]));
        }
    }
    for a in 0..gamma.len() {
        for b in a + 1..gamma.len() {
            log = log + cln_1p(-xpow(x, one + gamma[a] + gamma[b]));
        }
    }
    for &a in alpha {
        for &g in gamma {
            log = log - cln_1p(-xpow(x, one + a + g));
        }
    }
    let half = c(T::lit(0.5));
    let mut lm = Complex::<T>::zero();
    let mut lp = Complex::<T>::zero();
    for &g in gamma {
        let v = xpow(x, half + g);
        lm = lm + cln_1p(-v);
        lp = lp + cln_1p(v);
    }
    for &a in alpha {
        let u = xpow(x, half + a);
        lm = lm - cln_1p(-u);
        lp = lp - cln_1p(u);
    }
    let rx = x.recip();
    let bracket_m1 = (cexp_m1(lm) + cexp_m1(lp)) * T::lit(0.5) + rx;
    log + cln_1p(bracket_m1) - rx.ln_1p()
}

/// The raw per-prime factor of G_U: 1 + (1+1/x)^{-1} sum over a_k >= 0, c_q in {0,1} with
/// a positive even total of mu(P^c) x^{-sum a_k(1/2+alpha_k) - sum c_q(1/2+gamma_q)}.
/// The a_k are cut off at `a_max`; this is for checking the closed form, not for production.
pub fn g_u_raw_factor<T: Real>(alpha: &[Complex<T>], gamma: &[Complex<T>], x: T, a_max: usize) -> Complex<T> {
    let half = c(T::lit(0.5));
    let kk = alpha.len();
    let mut sum = Complex::<T>::zero();
    let mut a = vec![0usize; kk];
    loop {
        let asum: usize = a.iter().sum();
        let mut exp_a = Complex::<T>::zero();
        for (ak, &al) in a.iter().zip(alpha) {
            exp_a = exp_a + (half + al) * T::from_usize_exact(*ak);
        }
        for mask in 0..(1usize << gamma.len()) {
            let csum = mask.count_ones() as usize;
            let total = asum + csum;
            if total == 0 || total % 2 == 1 {
                continue;
            }
            let mut e = exp_a;
            for (qi, &g) in gamma.iter().enumerate() {
                if mask >> qi & 1 == 1 {
                    e = e + half + g;
                }
            }
            let sign = if csum % 2 == 0 { T::one() } else { -T::one() };
            sum = sum + xpow(x, e) * sign;
        }
        // odometer over a in [0, a_max]^K
        let mut v = 0;
        while v < kk {
            a[v] += 1;
            if a[v] <= a_max {
                break;
            }
            a[v] = 0;
            v += 1;
        }
        if v == kk {
            break;
        }
    }
    Complex::<T>::one() + sum / (T::one() + x.recip())
}

fn check_a_domain<T: Real>(alpha: &[Complex<T>], gamma: &[Complex<T>]) -> Result<()> {
    let quarter = T::lit(0.25);
    for s in alpha.iter().chain(gamma) {
        if s.re.abs() >= quarter {
            return Err(Error::Domain(format!("A_U needs |Re shift| < 1/4, got {s}")));
        }
    }
    Ok(())
}

/// A_U(alpha; gamma) over primes of degree <= D.
pub fn ratios_a<T: Real>(
    alpha: &[Complex<T>],
    gamma: &[Complex<T>],
    q: u64,
    max_degree: usize,
) -> Result<EulerProductValue<T, Complex<T>>> {
    check_a_domain(alpha, gamma)?;
    Ok(euler_product_complex(
        q,
        max_degree,
        |x: T| ratios_a_log_factor(alpha, gamma, x),
        |x: T| cexp_m1(ratios_a_log_factor(alpha, gamma, x)).norm(),
    ))
}

/// log of the K = Q = 1 factor, 1 + (x^{-1-a-g} - x^{-1-2a}) / ((x+1)(1 - x^{-1-a-g})).
/// The numerator vanishes identically at a = g, so A_U(r;r) = 1 exactly.
fn a_u_log_factor<T: Real>(alpha: Complex<T>, gamma: Complex<T>, x: T) -> Complex<T> {
    let one = Complex::<T>::one();
    let w = xpow(x, one + (alpha + gamma));
    let num = w - xpow(x, one + alpha * T::lit(2.0));
    cln_1p(num / ((one - w) * (x + T::one())))
}

/// A_U(alpha; gamma) for one shift each.
pub fn a_u<T: Real>(alpha: Complex<T>, gamma: Complex<T>, q: u64, max_degree: usize) -> Result<EulerProductValue<T, Complex<T>>> {
    check_a_domain(&[alpha], &[gamma])?;
    Ok(a_u_unchecked(alpha, gamma, q, max_degree))
}

fn a_u_unchecked<T: Real>(alpha: Complex<T>, gamma: Complex<T>, q: u64, max_degree: usize) -> EulerProductValue<T, Complex<T>> {
    euler_product_complex(
        q,
        max_degree,
        |x: T| a_u_log_factor(alpha, gamma, x),
        |x: T| cexp_m1(a_u_log_factor(alpha, gamma, x)).norm(),
    )
}

/// d/d alpha A_U(alpha; gamma) at alpha = gamma = r: sum_P log|P| / ((|P|^{1+2r} - 1)(|P| + 1)).
pub fn a_u_prime<T: Real>(r: Complex<T>, q: u64, max_degree: usize) -> EulerProductValue<T, Complex<T>> {
    euler_sum_complex(q, max_degree, |x: T| {
        let p = (r * T::lit(2.0) + T::one()) * x.ln();
        c(x.ln()) / (cexp_m1(p) * (x + T::one()))
    })
}

fn check_ratio_domain<T: Real>(alpha: Complex<T>, gamma: Complex<T>) -> Result<()> {
    let quarter = T::lit(0.25);
    if alpha.re.abs() >= quarter {
        return Err(Error::Domain(format!("ratios need -1/4 < Re alpha < 1/4, got {alpha}")));
    }
    if gamma.re <= T::zero() || gamma.re >= quarter {
        return Err(Error::Domain(format!("ratios need 0 < Re gamma < 1/4, got {gamma}")));
    }
    Ok(())
}

/// #I_{g+1} [A_U(a;g) zeta(1+2a)/zeta(1+a+g) + q^{-(2g+1)a} X(1/2+a) A_U(-a;g) zeta(1-2a)/zeta(1-a+g)].
pub fn ratio_prediction<T: Real>(
    alpha: Complex<T>,
    gamma: Complex<T>,
    q: u64,
    g: usize,
    max_degree: usize,
) -> Result<Complex<T>> {
    check_ratio_domain(alpha, gamma)?;
    let qf = T::from_u64(q).expect("q representable");
    let one = Complex::<T>::one();
    let two = T::lit(2.0);
    let first = a_u_unchecked(alpha, gamma, q, max_degree).value * inv_zeta_a(one + (alpha + gamma), qf)
        / inv_zeta_a(one + alpha * two, qf);
    // the second term carries 1/zeta(1-a+g), which vanishes at a = g
    let kill = inv_zeta_a(one + (gamma - alpha), qf);
    let second = if kill.is_zero() {
        Complex::zero()
    } else {
        let n = T::from_usize_exact(2 * g + 1);
        xpow(qf, alpha * n)
            * x_factor(c(T::lit(0.5)) + alpha, qf)
            * a_u_unchecked(-alpha, gamma, q, max_degree).value
            * zeta_a(one - alpha * two, qf)?
            * kill
    };
    Ok((first + second) * family_size::<T>(FamilyKind::I, q, g))
}

/// #I_{g+1} [zeta'/zeta(1+2r) + A_U'(r;r) - log q q^{-(2g+1)r} X(1/2+r) zeta(1-2r) A_U(-r;r)].
pub fn logderiv_prediction<T: Real>(r: Complex<T>, q: u64, g: usize, max_degree: usize) -> Result<Complex<T>> {
    if r.re <= T::zero() || r.re >= T::lit(0.25) {
        return Err(Error::Domain(format!("log-derivative needs 0 < Re r < 1/4, got {r}")));
    }
    Ok(logderiv_bracket(r, q, g, max_degree)? * family_size::<T>(FamilyKind::I, q, g))
}

/// The bracket of the log-derivative prediction, per family member, without domain checks.
/// Valid wherever the Euler products converge (|Re r| < 1/4) away from the zeta poles.
pub fn logderiv_bracket<T: Real>(r: Complex<T>, q: u64, g: usize, max_degree: usize) -> Result<Complex<T>> {
    let qf = T::from_u64(q).expect("q representable");
    let one = Complex::<T>::one();
    let two = T::lit(2.0);
    let l = qf.ln();
    let n = T::from_usize_exact(2 * g + 1);
    let zl = zeta_a_logderiv(one + r * two, qf)?;
    let ap = a_u_prime(r, q, max_degree).value;
    let tail = xpow(qf, r * n)
        * x_factor(c(T::lit(0.5)) + r, qf)
        * zeta_a(one - r * two, qf)?
        * a_u_unchecked(-r, r, q, max_degree).value
        * l;
    Ok(zl + ap - tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cc(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn a_u_on_the_diagonal_is_one() {
        for &r in &[cc(0.1, 0.0), cc(0.05, 1.3), cc(-0.2, 0.4)] {
            let v = a_u(r, r, 4, 16).unwrap();
            assert_eq!(v.value, Complex::one());
            let general = ratios_a(&[r], &[r], 4, 16).unwrap();
            assert!((general.value - 1.0).norm() < 1e-13, "r={r}");
        }
    }

    #[test]
    fn general_closed_form_reduces_to_single_shift_form() {
        for &q in &[2u64, 4] {
            let (a, g) = (cc(0.13, 0.2), cc(0.07, -0.5));
            let v1 = a_u(a, g, q, 14).unwrap().value;
            let v2 = ratios_a(&[a], &[g], q, 14).unwrap().value;
            assert!((v1 - v2).norm() < 1e-13 * v1.norm());
        }
    }

    #[test]
    fn a_u_minus_r_matches_quoted_product() {
        // prod_P (1 - 1/|P|)^{-1} (1 - 1/((|P|+1)|P|^{1-2r}) - 1/(|P|+1))
        let q = 4u64;
        let r = cc(0.11, 0.0);
        let d: usize = 8;
        let mut log_direct = 0.0f64;
        for deg in 1..=d {
            let x = 4f64.powi(deg as i32);
            let n = crate::algebra::irreducible_count(q, deg as u32) as f64;
            // factor - 1, written out so the log keeps its digits
            let dev = (1.0 / x - 1.0 / ((x + 1.0) * x.powf(1.0 - 2.0 * r.re)) - 1.0 / (x + 1.0)) / (1.0 - 1.0 / x);
            log_direct += n * dev.ln_1p();
        }
        let direct = log_direct.exp();
        let v = a_u(-r, r, q, d).unwrap().value;
        assert!((v.re - direct).abs() < 1e-13 && v.im.abs() < 1e-15, "{v} {direct}");
    }

    #[test]
    fn factorization_matches_raw_sum_prime_by_prime() {
        // G_U factor times the zeta cancellations equals the A_U factor, deg P <= 3
        let q = 2u64;
        let cases: [(Vec<Complex<f64>>, Vec<Complex<f64>>); 3] = [
            (vec![cc(0.1, 0.0)], vec![cc(0.2, 0.0)]),
            (vec![cc(0.1, 0.3), cc(0.15, -0.1)], vec![cc(0.2, 0.05)]),
            (vec![cc(0.12, 0.0), cc(0.08, 0.0)], vec![cc(0.2, 0.0), cc(0.05, 0.1)]),
        ];
        for (alpha, gamma) in &cases {
            for d in 1..=3 {
                let x = (q as f64).powi(d);
                let raw = g_u_raw_factor(alpha, gamma, x, 120);
                let mut cancel = Complex::<f64>::one();
                let one = Complex::<f64>::one();
                for j in 0..alpha.len() {
                    for k in j..alpha.len() {
                        cancel *= one - xpow(x, one + alpha[j] + alpha[k]);
                    }
                }
                for a in 0..gamma.len() {
                    for b in a + 1..gamma.len() {
                        cancel *= one - xpow(x, one + gamma[a] + gamma[b]);
                    }
                }
                for &a in alpha {
                    for &g in gamma {
                        cancel /= one - xpow(x, one + a + g);
                    }
                }
                let closed = ratios_a_log_factor(alpha, gamma, x).exp();
                assert!((raw * cancel - closed).norm() < 1e-8, "d={d}");
            }
        }
    }

    #[test]
    fn a_u_prime_is_derivative_in_alpha() {
        let q = 4u64;
        let d = 14;
        for &r in &[cc(0.1, 0.0), cc(0.08, 0.9)] {
            let h = 1e-5;
            let up = a_u(r + h, r, q, d).unwrap().value;
            let dn = a_u(r - h, r, q, d).unwrap().value;
            let fd = (up - dn) / (2.0 * h);
            let got = a_u_prime(r, q, d).value;
            assert!((fd - got).norm() < 1e-8, "r={r} fd={fd} got={got}");
        }
    }

    #[test]
    fn y_is_zeta_ratio() {
        let q = 2.0;
        let (a, g) = (cc(0.1, 0.0), cc(0.2, 0.0));
        let y = ratios_y(&[a], &[g], q).unwrap();
        // zeta(1.2) / zeta(1.3) with zeta_A(s) = 1/(1 - 2^{1-s})
        let want = (1.0 - 2f64.powf(-0.3)) / (1.0 - 2f64.powf(-0.2));
        assert!((y.re - want).abs() < 1e-12);
        assert!(matches!(ratios_y(&[cc(0.0, 0.0)], &[], q), Err(Error::Pole(_))));
    }

    #[test]
    fn diagonal_ratio_is_family_size() {
        for &g in &[2usize, 3, 5] {
            let r = cc(0.2, 0.0);
            let v = ratio_prediction(r, r, 4, g, 16).unwrap();
            assert_eq!(v, c(family_size::<f64>(FamilyKind::I, 4, g)));
        }
    }

    #[test]
    fn ratio_domain_is_enforced() {
        assert!(ratio_prediction(cc(0.3, 0.0), cc(0.1, 0.0), 4, 2, 8).is_err());
        assert!(ratio_prediction(cc(0.1, 0.0), cc(0.0, 0.0), 4, 2, 8).is_err());
        assert!(logderiv_prediction(cc(0.0, 1.0), 4, 2, 8).is_err());
    }

    #[test]
    fn logderiv_is_alpha_derivative_of_ratio() {
        // d/d alpha R(alpha; r) at alpha = r
        let (q, g, d) = (4u64, 3usize, 14);
        for &r in &[cc(0.12, 0.0), cc(0.1, 0.4)] {
            let h = 1e-5;
            let up = ratio_prediction(r + h, r, q, g, d).unwrap();
            let dn = ratio_prediction(r - h, r, q, g, d).unwrap();
            let fd = (up - dn) / (2.0 * h);
            let got = logderiv_prediction(r, q, g, d).unwrap();
            assert!((fd - got).norm() < 1e-6 * got.norm(), "r={r} fd={fd} got={got}");
        }
    }

    #[test]
    fn logderiv_finite_near_quarter() {
        let v = logderiv_prediction(cc(0.2499, 0.0), 4, 3, 14).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}
