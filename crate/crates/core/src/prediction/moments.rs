//! Moment polynomials Q_k(x) from the k-fold residue, and the closed-form first moments.
//!
//! With zeta_A(1+s) = h(s)/s the integrand of the residue is
//!   N(z) / prod_j z_j^{2k},   N = A(1/2;z) prod_j q^{-z_j/2} q^{x/2 sum z} prod_{i<=j} h(z_i+z_j)
//!                              * prod_{i<j} (z_j - z_i)^2 (z_j + z_i),
//! after the Vandermonde factor has cancelled every off-diagonal pole and the diagonal
//! poles have contributed 1/(2 z_j) each. The 2^k from the contour lemma cancels those
//! halves, leaving Q_k(x) = (-1)^{k(k-1)/2} / k! * [prod z_j^{2k-1}] N.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::euler::{euler_p1, euler_p_logderiv, EulerProductValue};
use super::jet::{a_log_jet, factorial, univariate_log};
use super::zeta::zeta_a_real;
use crate::error::{Error, Result};
use crate::family::FamilyKind;
use crate::num::Real;
use crate::series::{compose_sum, zeta_shift_jet, MultiSeries, XPoly};

/// Q_k as a polynomial in x, with the truncation it was computed at.
#[derive(Clone, Debug, PartialEq)]
pub struct QkPolynomial<T = f64> {
    pub k: usize,
    pub poly: XPoly<T>,
    /// Euler-product truncation degree.
    pub degree: usize,
    /// Per-variable series order.
    pub order: usize,
}

impl<T: Real> QkPolynomial<T> {
    pub fn eval(&self, x: T) -> T {
        self.poly.eval(x)
    }

    pub fn coeffs(&self) -> &[T] {
        self.poly.coeffs()
    }
}

/// The smallest series order the residue needs.
pub fn required_order(k: usize) -> usize {
    (2 * k).saturating_sub(1)
}

/// Q_k(x) at the minimal order.
pub fn q_k<T: Real>(k: usize, q: u64, max_degree: usize) -> Result<QkPolynomial<T>> {
    q_k_with_order(k, q, max_degree, required_order(k))
}

/// The analytic part of the residue integrand without the x-dependent exponential:
/// A(1/2;z) prod_{i<=j} h(z_i+z_j) prod_{i<j}(z_j-z_i)^2(z_j+z_i).
pub fn residue_numerator<T: Real>(k: usize, q: u64, max_degree: usize, order: usize) -> Result<MultiSeries<T>> {
    let log_a = a_log_jet::<T>(k, q, max_degree, order)?;
    numerator_from_log(log_a, q)
}

/// Same numerator for an arbitrary A given as a series (used to test formulas term by term).
pub fn residue_numerator_with<T: Real>(a: &MultiSeries<T>, q: u64) -> Result<MultiSeries<T>> {
    let h = numerator_from_log(MultiSeries::zeros(a.nvars(), a.order()), q)?;
    a.mul(&h)
}

fn numerator_from_log<T: Real>(mut log: MultiSeries<T>, q: u64) -> Result<MultiSeries<T>> {
    let (k, order) = (log.nvars(), log.order());
    let qf = T::from_u64(q).expect("q representable");
    let l = qf.ln();
    // log(L h(s)), normalized so the constant term vanishes
    let h: Vec<T> = zeta_shift_jet(2 * order, qf).into_iter().map(|c| c * l).collect();
    let log_h = univariate_log(&h)?;
    for i in 0..k {
        for j in i..k {
            log = log.add(&compose_sum(&log_h, i, j, k, order)?)?;
        }
    }
    let c = *log.constant_term();
    log.set(&vec![0; k], T::zero())?;
    let pairs = k * (k + 1) / 2;
    let mut s = log.exp_series()?.scale(c.exp() / l.powi(pairs as i32));
    for i in 0..k {
        for j in i + 1..k {
            let mut diff = vec![T::zero(); k];
            diff[j] = T::one();
            diff[i] = -T::one();
            let mut sum = vec![T::zero(); k];
            sum[j] = T::one();
            sum[i] = T::one();
            s = s.mul_linear(&diff)?.mul_linear(&diff)?.mul_linear(&sum)?;
        }
    }
    Ok(s)
}

/// Q_k(x) with an explicit per-variable series order; errors if the order cannot reach the residue.
pub fn q_k_with_order<T: Real>(k: usize, q: u64, max_degree: usize, order: usize) -> Result<QkPolynomial<T>> {
    if k == 0 {
        return Ok(QkPolynomial { k, poly: XPoly::constant(T::one()), degree: max_degree, order });
    }
    let need = required_order(k);
    if order < need {
        return Err(Error::Truncation { required: need, got: order });
    }
    let s = residue_numerator::<T>(k, q, max_degree, order)?;
    let poly = residue_from_numerator(&s, q)?;
    let expected = k * (k + 1) / 2;
    if poly.degree() != Some(expected) {
        return Err(Error::Consistency(format!("Q_{k} has degree {:?}, expected {expected}", poly.degree())));
    }
    Ok(QkPolynomial { k, poly, degree: max_degree, order })
}

/// (-1)^{k(k-1)/2}/k! [prod z^{2k-1}] of numerator * prod_j exp((L/2)(x-1)z_j), as a polynomial in x.
pub fn residue_from_numerator<T: Real>(s: &MultiSeries<T>, q: u64) -> Result<XPoly<T>> {
    let (k, order) = (s.nvars(), s.order());
    let need = required_order(k);
    if order < need {
        return Err(Error::Truncation { required: need, got: order });
    }
    let qf = T::from_u64(q).expect("q representable");
    let half_l = qf.ln() * T::lit(0.5);
    // exp((L/2)(x - 1) z) per variable, coefficients polynomial in x
    let shift = XPoly::from_coeffs(vec![-half_l, half_l]);
    let mut e_coeffs: Vec<XPoly<T>> = Vec::with_capacity(order + 1);
    let mut term = XPoly::constant(T::one());
    for n in 0..=order {
        e_coeffs.push(term.clone());
        term = crate::series::Coeff::mul(&term, &shift);
        term = crate::series::Coeff::scale(&term, T::from_usize_exact(n + 1).recip());
    }
    let mut e = MultiSeries::<XPoly<T>>::one(k, order);
    for v in 0..k {
        e = e.mul_univariate(v, &e_coeffs);
    }
    let lifted = s.map(|&c| XPoly::constant(c));
    let coef = lifted.product_coeff(&e, &vec![need; k])?;
    let sign = if (k * (k - 1) / 2) % 2 == 0 { T::one() } else { -T::one() };
    Ok(crate::series::Coeff::scale(&coef, sign / factorial::<T>(k)))
}

/// 2^{k(k+1)/2+1} prod_{j<=k} j!/(2j)!, exactly.
pub fn leading_constant(k: usize) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(2u32)).pow((k * (k + 1) / 2 + 1) as i32);
    for j in 1..=k {
        let num: BigInt = (1..=j).map(BigInt::from).product();
        let den: BigInt = (1..=2 * j).map(BigInt::from).product();
        acc *= BigRational::new(num, den);
    }
    acc
}

/// The size of a family of discriminant degree 2n = 2g+2 as a float.
pub fn family_size<T: Real>(kind: FamilyKind, q: u64, g: usize) -> T {
    let qf = T::from_u64(q).expect("q representable");
    let n = (g + 1) as i32;
    let c = T::one() - qf.recip();
    match kind {
        FamilyKind::B => qf.powi(n),
        FamilyKind::F | FamilyKind::Fprime => c * qf.powi(2 * n),
        FamilyKind::I => T::lit(2.0) * c * qf.powi(2 * n - 1),
        FamilyKind::G => T::lit(2.0) * c * qf.powi(n),
    }
}

/// #I_{g+1} * Q_k(2g+1).
pub fn moment_prediction<T: Real>(k: usize, q: u64, g: usize, max_degree: usize) -> Result<T> {
    let qk = q_k::<T>(k, q, max_degree)?;
    Ok(moment_from_qk(&qk, q, g))
}

pub fn moment_from_qk<T: Real>(qk: &QkPolynomial<T>, q: u64, g: usize) -> T {
    family_size::<T>(FamilyKind::I, q, g) * qk.eval(T::from_usize_exact(2 * g + 1))
}

/// The leading-order asymptotic leading_constant(k) * q^{2g+1}/zeta_A(2) * g^{k(k+1)/2} * A(1/2;0..0).
pub fn leading_asymptotic<T: Real>(k: usize, q: u64, g: usize, a0: T) -> Result<T> {
    use num_traits::ToPrimitive;
    let c = leading_constant(k).to_f64().ok_or_else(|| Error::Numerical("leading constant".into()))?;
    let qf = T::from_u64(q).expect("q representable");
    let inv_zeta2 = T::one() - qf.recip();
    Ok(T::lit(c) * qf.powi(2 * g as i32 + 1) * inv_zeta2 * T::from_usize_exact(g).powi((k * (k + 1) / 2) as i32) * a0)
}

/// Q_1 from the closed form (1/2) P(1) (x + 1 + (4/log q)(P'/P)(1)), as [c0, c1].
pub fn q1_closed<T: Real>(q: u64, max_degree: usize) -> [T; 2] {
    let p1: EulerProductValue<T> = euler_p1(q, max_degree);
    let ld: EulerProductValue<T> = euler_p_logderiv(q, max_degree);
    let l = T::from_u64(q).expect("q representable").ln();
    let half = T::lit(0.5) * p1.value;
    [half * (T::one() + T::lit(4.0) / l * ld.value), half]
}

/// Main terms of the first moments over I, F and F' (the Bae-Jung formulas), at genus g.
pub fn first_moment_main_term<T: Real>(kind: FamilyKind, q: u64, g: usize, max_degree: usize) -> Result<T> {
    let p1: EulerProductValue<T> = euler_p1(q, max_degree);
    let ld: EulerProductValue<T> = euler_p_logderiv(q, max_degree);
    let qf = T::from_u64(q).expect("q representable");
    let l = qf.ln();
    let inv_zeta2 = T::one() - qf.recip();
    let base = T::from_usize_exact(g + 1) + T::lit(2.0) / l * ld.value;
    let half = T::lit(0.5);
    Ok(match kind {
        FamilyKind::I => T::lit(2.0) * p1.value * inv_zeta2 * qf.powi(2 * g as i32 + 1) * base,
        FamilyKind::F => p1.value * inv_zeta2 * qf.powi(2 * g as i32 + 2) * (base + zeta_a_real(half, qf)?),
        FamilyKind::Fprime => {
            let extra = zeta_a_real(T::zero(), qf)? / zeta_a_real(half, qf)?;
            p1.value * inv_zeta2 * qf.powi(2 * g as i32 + 2) * (base + extra)
        }
        other => return Err(Error::Unsupported(format!("first-moment main term for family {}", other.name()))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prediction::euler::a_closed;
    use num_traits::ToPrimitive;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn leading_constants() {
        let want = [ratio(2, 1), ratio(2, 3), ratio(2, 45), ratio(2, 4725), ratio(2, 4465125)];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(&leading_constant(k + 1), w, "k={}", k + 1);
        }
    }

    #[test]
    fn q1_matches_closed_form() {
        for &q in &[2u64, 4] {
            let d = 16;
            let qk: QkPolynomial<f64> = q_k(1, q, d).unwrap();
            let want = q1_closed::<f64>(q, d);
            for i in 0..2 {
                assert!((qk.coeffs()[i] - want[i]).abs() < 1e-12, "q={q} i={i}");
            }
        }
    }

    #[test]
    fn q0_is_one() {
        let qk: QkPolynomial<f64> = q_k(0, 4, 10).unwrap();
        assert_eq!(qk.eval(7.0), 1.0);
        let m: f64 = moment_prediction(0, 4, 2, 10).unwrap();
        assert_eq!(m, family_size::<f64>(FamilyKind::I, 4, 2));
    }

    #[test]
    fn truncation_error_names_required_order() {
        let e = q_k_with_order::<f64>(3, 2, 10, 4).unwrap_err();
        assert!(matches!(e, Error::Truncation { required: 5, got: 4 }));
        // a larger order gives the same polynomial
        let a: QkPolynomial<f64> = q_k_with_order(2, 4, 10, 3).unwrap();
        let b: QkPolynomial<f64> = q_k_with_order(2, 4, 10, 5).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn leading_coefficient_matches_theorem_constant() {
        for &q in &[2u64, 4] {
            for k in 1..=4 {
                let d = 10;
                let qk: QkPolynomial<f64> = q_k(k, q, d).unwrap();
                let a0 = a_closed::<f64>(k, q, d).unwrap().value;
                let m = k * (k + 1) / 2;
                // leading x-coefficient = A(1/2;0..0) prod j!/(2j)! = A * leading_constant / 2^{m+1}
                use num_traits::ToPrimitive;
                let c = leading_constant(k).to_f64().unwrap() / 2f64.powi(m as i32 + 1);
                let lead = qk.coeffs()[m];
                assert!((lead / (a0 * c) - 1.0).abs() < 1e-10, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn moment_ratio_tends_to_one() {
        // moment_prediction / leading asymptotic approaches 1 as g grows
        for k in 2..=3 {
            let q = 4;
            let d = 12;
            let a0 = a_closed::<f64>(k, q, d).unwrap().value;
            let qk: QkPolynomial<f64> = q_k(k, q, d).unwrap();
            let mut last = f64::INFINITY;
            for g in [10usize, 100, 1000, 10000, 100_000, 1_000_000] {
                // #I = 2 q^{2g+1}/zeta_A(2), so the family size cancels up to the 2
                let c = leading_constant(k).to_f64().unwrap();
                let r = 2.0 * qk.eval(2.0 * g as f64 + 1.0) / (c * (g as f64).powi((k * (k + 1) / 2) as i32) * a0);
                if g <= 100 {
                    let full = moment_from_qk(&qk, q, g) / leading_asymptotic(k, q, g, a0).unwrap();
                    assert!((full / r - 1.0).abs() < 1e-12);
                }
                let dev = (r - 1.0).abs();
                assert!(dev < last, "k={k} g={g}");
                last = dev;
            }
            assert!(last < 1e-4);
        }
    }

    #[test]
    fn k1_moment_is_theorem_main_term() {
        for &q in &[2u64, 4] {
            for g in 1..5 {
                let m: f64 = moment_prediction(1, q, g, 16).unwrap();
                let t: f64 = first_moment_main_term(FamilyKind::I, q, g, 16).unwrap();
                assert!((m / t - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_sizes() {
        assert_eq!(family_size::<f64>(FamilyKind::I, 2, 1), 8.0);
        assert_eq!(family_size::<f64>(FamilyKind::F, 4, 1), 192.0);
        assert_eq!(family_size::<f64>(FamilyKind::B, 4, 2), 64.0);
        for kind in [FamilyKind::B, FamilyKind::F, FamilyKind::Fprime, FamilyKind::G, FamilyKind::I] {
            for g in 0..4 {
                let spec = crate::family::FamilySpec::new(crate::algebra::FieldSpec::from_q(4).unwrap(), g + 1, kind).unwrap();
                assert_eq!(family_size::<f64>(kind, 4, g), spec.expected_size() as f64, "{kind:?} g={g}");
            }
        }
    }
}
