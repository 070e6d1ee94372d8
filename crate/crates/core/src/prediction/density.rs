//! One-level density: the ratios-conjecture prediction for sum_u sum_gamma h(gamma) over
//! I_{g+1}, and the scaled symplectic limit.
//!
//! Test functions are even trigonometric polynomials in L t (L = log q), which are exactly
//! the 2 pi / L periodic even functions the density formula can integrate termwise.

use num_complex::Complex;
use num_traits::Zero;

use super::moments::family_size;
use super::ratios::logderiv_bracket;
use crate::error::{Error, Result};
use crate::family::FamilyKind;
use crate::num::Real;

/// An even, 2 pi / log q periodic test function h(t) = sum_m a_m cos(m L t).
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction<T = f64> {
    /// Coefficients a_0, a_1, ..., a_M.
    Cosine(Vec<T>),
    /// Fejer kernel of order M: a_0 = 1, a_m = 2(1 - m/(M+1)); non-negative.
    Fejer(usize),
}

impl<T: Real> TestFunction<T> {
    pub fn coeffs(&self) -> Vec<T> {
        match self {
            TestFunction::Cosine(a) => a.clone(),
            TestFunction::Fejer(m) => {
                let mp1 = T::from_usize_exact(m + 1);
                (0..=*m)
                    .map(|j| {
                        if j == 0 {
                            T::one()
                        } else {
                            T::lit(2.0) * (T::one() - T::from_usize_exact(j) / mp1)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            TestFunction::Cosine(a) => format!("cos{}", a.len().saturating_sub(1)),
            TestFunction::Fejer(m) => format!("fejer{m}"),
        }
    }

    pub fn eval(&self, t: T, log_q: T) -> T {
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(m, &a)| a * (T::from_usize_exact(m) * log_q * t).cos())
            .sum()
    }
}

/// W(t) per family member: log(q^{2g+1}) - X'/X(1/2+it) plus twice the log-derivative
/// bracket at r = it. Evaluated at complex t for the circle means.
/// Poles at t in (pi/L) Z cancel; use [`density_kernel`] there.
pub fn density_bracket<T: Real>(t: Complex<T>, q: u64, g: usize, max_degree: usize) -> Result<Complex<T>> {
    let l = T::from_u64(q).expect("q representable").ln();
    let r = Complex::new(-t.im, t.re);
    let bracket = logderiv_bracket(r, q, g, max_degree)?;
    Ok(Complex::new(T::from_usize_exact(2 * g) * l, T::zero()) + bracket * T::lit(2.0))
}

/// Radius of the circle used to evaluate the kernel near its removable poles.
const POLE_RADIUS: f64 = 0.05;
const POLE_POINTS: usize = 32;

/// The density kernel W(t); near t in (pi/L) Z it is the mean over a small circle,
/// which equals the value for an analytic function and avoids the cancelling poles.
pub fn density_kernel<T: Real>(t: T, q: u64, g: usize, max_degree: usize) -> Result<T> {
    let l = T::from_u64(q).expect("q representable").ln();
    let period = T::PI() / l;
    let nearest = (t / period).round() * period;
    let rho = T::lit(POLE_RADIUS);
    if (t - nearest).abs() >= rho / T::lit(2.0) {
        return Ok(density_bracket(Complex::new(t, T::zero()), q, g, max_degree)?.re);
    }
    let n = POLE_POINTS;
    let mut acc = Complex::<T>::zero();
    for j in 0..n {
        let theta = T::lit(2.0) * T::PI() * (T::from_usize_exact(j) + T::lit(0.5)) / T::from_usize_exact(n);
        let z = Complex::new(t, T::zero()) + Complex::from_polar(rho, theta);
        acc = acc + density_bracket(z, q, g, max_degree)?;
    }
    Ok((acc / T::from_usize_exact(n)).re)
}

/// #I_{g+1} / (2 pi) * integral over one period of h(t) W(t), by the trapezoid rule on
/// `points` midpoints (spectrally accurate for periodic analytic integrands).
pub fn density_prediction<T: Real>(
    h: &TestFunction<T>,
    q: u64,
    g: usize,
    max_degree: usize,
    points: usize,
) -> Result<T> {
    if points < 8 {
        return Err(Error::Domain(format!("density quadrature needs at least 8 points, got {points}")));
    }
    let l = T::from_u64(q).expect("q representable").ln();
    let step = T::lit(2.0) * T::PI() / (l * T::from_usize_exact(points));
    let mut acc = T::zero();
    for j in 0..points {
        let t = -T::PI() / l + step * (T::from_usize_exact(j) + T::lit(0.5));
        acc += h.eval(t, l) * density_kernel(t, q, g, max_degree)?;
    }
    Ok(family_size::<T>(FamilyKind::I, q, g) * acc * step / (T::lit(2.0) * T::PI()))
}

/// Fourier cosine modes of W: the prediction for sum_u sum_gamma cos(m L gamma), m = 0..=max_mode.
pub fn density_modes<T: Real>(q: u64, g: usize, max_degree: usize, max_mode: usize, points: usize) -> Result<Vec<T>> {
    (0..=max_mode)
        .map(|m| {
            let mut a = vec![T::zero(); m + 1];
            a[m] = T::one();
            density_prediction(&TestFunction::Cosine(a), q, g, max_degree, points)
        })
        .collect()
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let c = (a + b) / T::lit(2.0);
    let h = (b - a) / T::lit(2.0);
    let fc = f(c);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        kron += s * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += s * T::lit(WG[j / 2]);
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod on [a, b] to absolute tolerance `tol`.
pub fn integrate<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T) -> Result<T> {
    fn rec<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: usize) -> Result<T> {
        let (v, err) = gk15(f, a, b);
        if err <= tol || (b - a).abs() <= T::epsilon() * T::lit(64.0) * (a.abs() + b.abs()) {
            return Ok(v);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!("quadrature did not converge on [{a}, {b}]")));
        }
        let m = (a + b) / T::lit(2.0);
        let half = tol / T::lit(2.0);
        Ok(rec(f, a, m, half, depth - 1)? + rec(f, m, b, half, depth - 1)?)
    }
    rec(f, a, b, tol, 40)
}

/// 1 - sin(2 pi tau)/(2 pi tau), with its series near 0.
pub fn symplectic_kernel<T: Real>(tau: T) -> T {
    let x = T::lit(2.0) * T::PI() * tau;
    if x.abs() < T::lit(1e-4) {
        x * x / T::lit(6.0)
    } else {
        T::one() - x.sin() / x
    }
}

/// integral over R of h(tau)(1 - sin(2 pi tau)/(2 pi tau)).
///
/// Only the even part of h contributes. The integral over [-N, N] is taken on unit
/// intervals and the cutoff removed by Richardson extrapolation in 1/N over N = 64, 128, 256,
/// which suits test functions whose tails decay like tau^{-2} or faster.
pub fn scaled_density_limit<T: Real>(h: impl Fn(T) -> T) -> Result<T> {
    let even = |tau: T| (h(tau) + h(-tau)) / T::lit(2.0) * symplectic_kernel(tau);
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(100.0));
    let cut = [64usize, 128, 256];
    let mut partial = Vec::with_capacity(cut.len());
    let mut acc = T::zero();
    let mut n0 = 0;
    for &n in &cut {
        for i in n0..n {
            acc += integrate(&even, T::from_usize_exact(i), T::from_usize_exact(i + 1), tol)?;
        }
        n0 = n;
        partial.push(T::lit(2.0) * acc);
    }
    // I(N) = I + c1/N + c2/N^2 + ...
    let r1: Vec<T> = partial.windows(2).map(|w| T::lit(2.0) * w[1] - w[0]).collect();
    Ok((T::lit(4.0) * r1[1] - r1[0]) / T::lit(3.0))
}
