//! The zeta function of A = F_q[T] and the gamma-like factor X(s).

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::num::Real;

fn q_pow<T: Real>(q: T, s: Complex<T>) -> Complex<T> {
    (s * q.ln()).exp()
}

/// 1/zeta_A(s) = 1 - q^{1-s}; entire, zero at the poles of zeta_A.
pub fn inv_zeta_a<T: Real>(s: Complex<T>, q: T) -> Complex<T> {
    Complex::<T>::one() - q_pow(q, Complex::<T>::one() - s)
}

/// zeta_A(s) = (1 - q^{1-s})^{-1}.
pub fn zeta_a<T: Real>(s: Complex<T>, q: T) -> Result<Complex<T>> {
    let d = inv_zeta_a(s, q);
    if d.is_zero() {
        return Err(Error::Pole(format!("zeta_A at s = {s}")));
    }
    Ok(d.inv())
}

/// Real-argument convenience.
pub fn zeta_a_real<T: Real>(s: T, q: T) -> Result<T> {
    zeta_a(Complex::new(s, T::zero()), q).map(|z| z.re)
}

/// zeta_A'/zeta_A(s) = -log q * q^{1-s} / (1 - q^{1-s}).
pub fn zeta_a_logderiv<T: Real>(s: Complex<T>, q: T) -> Result<Complex<T>> {
    let w = q_pow(q, Complex::<T>::one() - s);
    let d = Complex::<T>::one() - w;
    if d.is_zero() {
        return Err(Error::Pole(format!("zeta_A'/zeta_A at s = {s}")));
    }
    Ok(-w * q.ln() / d)
}

/// X(s) = q^{s - 1/2}.
pub fn x_factor<T: Real>(s: Complex<T>, q: T) -> Complex<T> {
    q_pow(q, s - T::lit(0.5))
}

/// X'/X is the constant log q.
pub fn x_logderiv<T: Real>(q: T) -> T {
    q.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn closed_form_values() {
        assert!((zeta_a_real(2.0f64, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((zeta_a_real(2.0f64, 4.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(inv_zeta_a(c(1.0), 4.0), c(0.0));
        assert!(matches!(zeta_a(c(1.0), 2.0), Err(Error::Pole(_))));
        // the pole repeats with period 2 pi i / log q
        let s = Complex::new(1.0, 2.0 * std::f64::consts::PI / 2f64.ln());
        assert!(inv_zeta_a(s, 2.0).norm() < 1e-14);
    }

    #[test]
    fn logderiv_matches_finite_differences() {
        for &q in &[2.0, 4.0, 8.0] {
            for &s in &[Complex::new(1.3, 0.0), Complex::new(1.1, 0.7), Complex::new(0.6, -2.0)] {
                let h = 1e-5;
                let hc = c(h);
                let num = (zeta_a(s + hc, q).unwrap() - zeta_a(s - hc, q).unwrap()) / (2.0 * h);
                let want = num / zeta_a(s, q).unwrap();
                let got = zeta_a_logderiv(s, q).unwrap();
                assert!((got - want).norm() < 1e-8 * want.norm().max(1.0), "q={q} s={s}");
            }
        }
    }

    #[test]
    fn laurent_expansion_at_one() {
        // zeta_A(1+s) = 1/(s log q) + 1/2 + (log q) s / 12 + O(s^2)
        let q = 4.0f64;
        let l = q.ln();
        let s = 1e-3;
        let v = zeta_a_real(1.0 + s, q).unwrap();
        let approx = 1.0 / (s * l) + 0.5 + l * s / 12.0;
        assert!((v - approx).abs() < 1e-8);
    }

    #[test]
    fn x_factor_values() {
        let x = x_factor(c(0.5), 4.0);
        assert!((x - c(1.0)).norm() < 1e-15);
        assert!((x_factor(c(1.0), 4.0) - c(2.0)).norm() < 1e-14);
        assert_eq!(x_logderiv(4.0f64), 4f64.ln());
        assert!((x_factor(Complex::new(1.0f32, 0.0), 4.0f32) - Complex::new(2.0f32, 0.0)).norm() < 1e-6);
    }
}
