//! Direct evaluation of the shifted-moment contour integral and of the signed sum it equals.
//!
//! The integrand is analytic outside the poles at +-alpha_j and the origin, so the
//! trapezoid rule on circles converges geometrically. Variable j uses radius r(1 - j/10)
//! so that z_i + z_j never lands on the (cancelled) pole of zeta_A(1 + z_i + z_j).
//! The truncated A stays well behaved only for Re z > -1/4, which bounds r.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::jet::{a_value, factorial};
use super::zeta::{x_factor, zeta_a};
use crate::error::{Error, Result};
use crate::num::Real;

fn qpow<T: Real>(q: T, s: Complex<T>) -> Complex<T> {
    (s * q.ln()).exp()
}

/// G(z) = prod_j X(1/2+z_j)^{-1/2} A(1/2;z) prod_{i<=j} zeta_A(1+z_i+z_j).
pub fn g_value<T: Real>(z: &[Complex<T>], q: u64, max_degree: usize) -> Result<Complex<T>> {
    let qf = T::from_u64(q).expect("q representable");
    let one = Complex::<T>::one();
    let mut g = a_value(z, q, max_degree);
    for &zj in z {
        // X(1/2+z)^{-1/2} = q^{-z/2}
        g = g / x_factor(Complex::new(T::lit(0.5), T::zero()) + zj, qf).sqrt();
    }
    for i in 0..z.len() {
        for j in i..z.len() {
            g = g * zeta_a(one + z[i] + z[j], qf)?;
        }
    }
    Ok(g)
}

/// sum over eps in {+-1}^k of q^{(x/2) sum eps_j a_j} G(eps_1 a_1, ..., eps_k a_k).
pub fn sign_sum<T: Real>(alpha: &[Complex<T>], x: T, q: u64, max_degree: usize) -> Result<Complex<T>> {
    let k = alpha.len();
    let qf = T::from_u64(q).expect("q representable");
    let mut acc = Complex::<T>::zero();
    for mask in 0..(1usize << k) {
        let z: Vec<Complex<T>> =
            (0..k).map(|j| if mask >> j & 1 == 1 { -alpha[j] } else { alpha[j] }).collect();
        let total: Complex<T> = z.iter().fold(Complex::zero(), |a, &b| a + b);
        acc = acc + qpow(qf, total * (x / T::lit(2.0))) * g_value(&z, q, max_degree)?;
    }
    Ok(acc)
}

/// Trapezoid settings for [`contour_value`].
#[derive(Clone, Copy, Debug)]
pub struct ContourGrid<T> {
    pub radius: T,
    pub points: usize,
}

impl<T: Real> Default for ContourGrid<T> {
    fn default() -> Self {
        ContourGrid { radius: T::lit(0.12), points: 96 }
    }
}

/// (-1)^{k(k-1)/2} 2^k / k! (2 pi i)^{-k} oint G(z) q^{(x/2) sum z} Delta(z^2)^2 prod z_j
///   / prod_{i,j} (z_i - a_j)(z_i + a_j) dz.
pub fn contour_value<T: Real>(
    alpha: &[Complex<T>],
    x: T,
    q: u64,
    max_degree: usize,
    grid: ContourGrid<T>,
) -> Result<Complex<T>> {
    let k = alpha.len();
    if k == 0 {
        return Ok(Complex::one());
    }
    let radii: Vec<T> =
        (0..k).map(|j| grid.radius * (T::one() - T::lit(0.1) * T::from_usize_exact(j))).collect();
    if grid.radius >= T::lit(0.25) || alpha.iter().any(|a| a.norm() >= radii[k - 1]) {
        return Err(Error::Domain(format!(
            "contour radii {radii:?} must lie below 1/4 and enclose every shift"
        )));
    }
    let n = grid.points;
    let qf = T::from_u64(q).expect("q representable");
    let tau = T::lit(2.0) * T::PI() / T::from_usize_exact(n);
    let nodes: Vec<Vec<Complex<T>>> = radii
        .iter()
        .map(|&r| (0..n).map(|m| Complex::from_polar(r, tau * T::from_usize_exact(m))).collect())
        .collect();

    let total = n.pow(k as u32);
    let terms: Vec<Result<Complex<T>>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut z = Vec::with_capacity(k);
            for node in &nodes {
                z.push(node[idx % n]);
                idx /= n;
            }
            integrand(&z, alpha, x, qf, q, max_degree)
        })
        .collect();
    let mut acc = Complex::<T>::zero();
    for t in terms {
        acc = acc + t?;
    }
    // (1/2 pi i) oint f dz on a circle is the mean of f(z) z
    let mean = acc / T::from_usize_exact(total);
    let sign = if (k * (k - 1) / 2) % 2 == 0 { T::one() } else { -T::one() };
    let pre = sign * T::lit(2.0).powi(k as i32) / factorial::<T>(k);
    Ok(mean * pre)
}

fn integrand<T: Real>(
    z: &[Complex<T>],
    alpha: &[Complex<T>],
    x: T,
    qf: T,
    q: u64,
    max_degree: usize,
) -> Result<Complex<T>> {
    let k = z.len();
    let total: Complex<T> = z.iter().fold(Complex::zero(), |a, &b| a + b);
    let mut f = g_value(z, q, max_degree)? * qpow(qf, total * (x / T::lit(2.0)));
    for i in 0..k {
        for j in i + 1..k {
            let d = z[j] * z[j] - z[i] * z[i];
            f = f * d * d;
        }
    }
    for &zi in z {
        // prod z_j from the integrand, and one more z_j from dz = i z dtheta
        f = f * zi * zi;
        for &a in alpha {
            f = f / ((zi - a) * (zi + a));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prediction::moments::q_k;

    #[test]
    fn k1_contour_is_q1() {
        let q = 4;
        let d = 12;
        let qk = q_k::<f64>(1, q, d).unwrap();
        for &x in &[3.0, 7.0] {
            let v = contour_value(&[Complex::new(0.0, 0.0)], x, q, d, ContourGrid::default()).unwrap();
            assert!((v.re / qk.eval(x) - 1.0).abs() < 1e-10, "x={x}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn k2_contour_at_zero_shift_is_q2() {
        let q = 4;
        let d = 10;
        let qk = q_k::<f64>(2, q, d).unwrap();
        let zero = Complex::new(0.0, 0.0);
        let v = contour_value(&[zero, zero], 5.0, q, d, ContourGrid::default()).unwrap();
        assert!((v.re / qk.eval(5.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn k1_sign_sum_is_contour_at_shift() {
        let q = 4;
        let a = [Complex::new(0.05 / 4f64.ln(), 0.0)];
        let s = sign_sum(&a, 5.0, q, 10).unwrap();
        let c = contour_value(&a, 5.0, q, 10, ContourGrid::default()).unwrap();
        assert!((s - c).norm() / s.norm() < 1e-9);
    }

    #[test]
    fn k2_sign_sum_is_contour_at_shift() {
        for &q in &[2u64, 4] {
            let l = (q as f64).ln();
            let a = [Complex::new(0.05 / l, 0.0), Complex::new(0.03 / l, 0.0)];
            let s = sign_sum(&a, 7.0, q, 12).unwrap();
            let c = contour_value(&a, 7.0, q, 12, ContourGrid::default()).unwrap();
            assert!((s - c).norm() / s.norm() < 1e-7, "q={q} s={s} c={c}");
        }
    }

    #[test]
    fn contour_rejects_bad_radius() {
        let a = [Complex::new(0.2, 0.0)];
        assert!(contour_value(&a, 1.0, 4, 5, ContourGrid::default()).is_err());
        let big = ContourGrid { radius: 0.3, points: 16 };
        assert!(contour_value(&[Complex::new(0.0, 0.0)], 1.0, 4, 5, big).is_err());
    }
}
