//! Dirichlet coefficients, the completed L-polynomial, central values and zeros.

mod roots;
mod sweep;

pub use roots::{zeros, Zeros};
pub use sweep::{FamilyLData, FamilySweep, MemberChars};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{monic_polys, FqContext};
use crate::character::CharacterEvaluator;
use crate::error::{Error, Result};
use crate::family::{Discriminant, UKind};

/// Coefficients of L*(z, chi_u), degree 2g, with the functional equation
/// c_n = q^{n-g} c_{2g-n}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LPolynomial {
    pub coeffs: Vec<i64>,
    pub genus: usize,
    pub kind: UKind,
    pub q: u64,
    pub key: String,
}

impl LPolynomial {
    /// The factor removed by completion: 1 for ramified, (1 - z) for real, (1 + z) for inert.
    pub fn trivial_sign(&self) -> i64 {
        trivial_sign(self.kind)
    }

    /// Coefficients of the non-completed polynomial (trivial factor multiplied back in).
    pub fn full_coeffs(&self) -> Vec<i64> {
        let sign = self.trivial_sign();
        if sign == 0 {
            return self.coeffs.clone();
        }
        let mut out = self.coeffs.clone();
        out.push(0);
        for n in (1..out.len()).rev() {
            out[n] -= sign * out[n - 1];
        }
        out
    }

    /// L*(z)
    pub fn eval_completed(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c as f64)
    }

    /// The non-completed polynomial at z.
    pub fn eval_full(&self, z: Complex64) -> Complex64 {
        let factor = Complex64::new(1.0, 0.0) - z * self.trivial_sign() as f64;
        factor * self.eval_completed(z)
    }

    /// Exact check of c_n = q^{n-g} c_{2g-n}.
    pub fn satisfies_functional_equation(&self) -> bool {
        let g = self.genus;
        self.coeffs.len() == 2 * g + 1
            && (g..=2 * g).all(|n| {
                (self.q as i128).pow((n - g) as u32) * self.coeffs[2 * g - n] as i128 == self.coeffs[n] as i128
            })
    }
}

/// -1 for inert (factor 1 + z), +1 for real (factor 1 - z), 0 for ramified.
pub fn trivial_sign(kind: UKind) -> i64 {
    match kind {
        UKind::RamifiedImaginary => 0,
        UKind::Real => 1,
        UKind::InertImaginary => -1,
    }
}

/// c_n = sum over monic f of degree n of chi_u(f), for n = 0..=max_degree.
pub fn dirichlet_coeffs(u: &Discriminant, max_degree: usize, ctx: &FqContext) -> Result<Vec<i64>> {
    let mut ev = CharacterEvaluator::new(u, ctx);
    (0..=max_degree)
        .map(|n| {
            monic_polys(ctx.field(), n).try_fold(0i64, |acc, f| Ok(acc + ev.chi(&f)?.value()))
        })
        .collect()
}

/// Turn raw Dirichlet coefficients (degrees 0..=g+1) into the completed polynomial:
/// divide out the trivial factor, keep degrees <= g, fill the rest from the functional
/// equation and check the overlap at degree g+1.
pub fn complete(raw: &[i64], kind: UKind, g: usize, q: u64) -> Result<Vec<i64>> {
    if raw.len() < g + 2 {
        return Err(Error::Truncation { required: g + 2, got: raw.len() });
    }
    let sign = trivial_sign(kind);
    let mut star = vec![0i64; g + 2];
    for n in 0..g + 2 {
        // divide by (1 - sign z)
        star[n] = raw[n] + if n > 0 { sign * star[n - 1] } else { 0 };
    }
    let mut coeffs = vec![0i64; 2 * g + 1];
    coeffs[..=g].copy_from_slice(&star[..=g]);
    for n in g + 1..=2 * g {
        coeffs[n] = (q as i64).pow((n - g) as u32) * coeffs[2 * g - n];
    }
    let expected = if g >= 1 { q as i64 * coeffs[g - 1] } else { 0 };
    if star[g + 1] != expected {
        return Err(Error::Consistency(format!(
            "functional equation fails at degree {}: computed {}, symmetry predicts {expected} (raw {:?})",
            g + 1,
            star[g + 1],
            raw
        )));
    }
    Ok(coeffs)
}

/// The completed L-polynomial of u from direct character sums.
pub fn l_star(u: &Discriminant, ctx: &FqContext) -> Result<LPolynomial> {
    let g = u.genus();
    let raw = dirichlet_coeffs(u, g + 1, ctx)?;
    let coeffs = complete(&raw, u.kind(), g, ctx.field().q())?;
    Ok(LPolynomial { coeffs, genus: g, kind: u.kind(), q: ctx.field().q(), key: u.key(ctx.field()) })
}

/// L(s, chi_u) = non-completed polynomial at z = q^{-s}.
pub fn evaluate(lp: &LPolynomial, s: Complex64) -> Complex64 {
    lp.eval_full(z_of_s(s, lp.q))
}

pub fn z_of_s(s: Complex64, q: u64) -> Complex64 {
    (-s * (q as f64).ln()).exp()
}

/// An exact number a + b q^{-1/2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralValue {
    pub a: BigRational,
    pub b: BigRational,
    pub q: u64,
}

impl CentralValue {
    pub fn zero(q: u64) -> Self {
        CentralValue { a: BigRational::zero(), b: BigRational::zero(), q }
    }

    pub fn from_integer(n: i64, q: u64) -> Self {
        CentralValue { a: BigRational::from_integer(BigInt::from(n)), b: BigRational::zero(), q }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) / (self.q as f64).sqrt()
    }

    pub fn add(&self, other: &CentralValue) -> CentralValue {
        CentralValue { a: &self.a + &other.a, b: &self.b + &other.b, q: self.q }
    }

    /// (a + b s)(c + d s) with s^2 = 1/q.
    pub fn mul(&self, other: &CentralValue) -> CentralValue {
        let q = BigRational::from_integer(BigInt::from(self.q));
        CentralValue {
            a: &self.a * &other.a + &self.b * &other.b / q,
            b: &self.a * &other.b + &self.b * &other.a,
            q: self.q,
        }
    }

    pub fn pow(&self, k: u32) -> CentralValue {
        (0..k).fold(CentralValue::from_integer(1, self.q), |acc, _| acc.mul(self))
    }
}

/// Exact L(1/2, chi_u): the coefficients are split by parity of the degree.
pub fn central_value(lp: &LPolynomial) -> CentralValue {
    let full = lp.full_coeffs();
    let q = BigInt::from(lp.q);
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for (n, &c) in full.iter().enumerate() {
        let denom = num_traits::pow(q.clone(), n / 2);
        let term = BigRational::new(BigInt::from(c), denom);
        if n % 2 == 0 {
            a += term;
        } else {
            b += term;
        }
    }
    CentralValue { a, b, q: lp.q }
}

/// The approximate functional equation, an exact identity for ramified u:
/// sum_{deg f <= g} chi(f)|f|^{-s} + q^{(1-2s)g} sum_{deg f <= g-1} chi(f)|f|^{s-1}.
pub fn afe_evaluate(u: &Discriminant, s: Complex64, ctx: &FqContext) -> Result<Complex64> {
    if u.kind() != UKind::RamifiedImaginary {
        return Err(Error::Domain("the approximate functional equation is stated for ramified u".into()));
    }
    let g = u.genus();
    let c = dirichlet_coeffs(u, g, ctx)?;
    let q = ctx.field().q() as f64;
    let ln_q = Complex64::new(q.ln(), 0.0);
    let mut first = Complex64::zero();
    for (n, &cn) in c.iter().enumerate() {
        first += (-s * ln_q * n as f64).exp() * cn as f64;
    }
    let mut second = Complex64::zero();
    for (n, &cn) in c.iter().enumerate().take(g) {
        second += ((s - 1.0) * ln_q * n as f64).exp() * cn as f64;
    }
    Ok(first + cal_x(s, g, q) * second)
}

/// The root-number factor q^{(1-2s)g}.
pub fn cal_x(s: Complex64, g: usize, q: f64) -> Complex64 {
    ((Complex64::new(1.0, 0.0) - s * 2.0) * (g as f64) * q.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;
    use crate::family::{enumerate_f, enumerate_fprime, enumerate_i};

    fn t3() -> Discriminant {
        Discriminant { finite_part: Vec::new(), alpha: 0, odd_coeffs: vec![0, 1] }
    }

    fn ctx2() -> FqContext {
        FqContext::new(FieldSpec::from_q(2).unwrap(), 4)
    }

    #[test]
    fn t_cubed_examples() {
        let ctx = ctx2();
        let u = t3();
        let c = dirichlet_coeffs(&u, 3, &ctx).unwrap();
        assert_eq!(c[0], 1);
        assert_eq!(c[1], 0);
        let lp = l_star(&u, &ctx).unwrap();
        assert_eq!(lp.coeffs, vec![1, 0, 2]);
        let cv = central_value(&lp);
        assert_eq!(cv, CentralValue::from_integer(2, 2));
        let half = Complex64::new(0.5, 0.0);
        assert!((afe_evaluate(&u, half, &ctx).unwrap() - 2.0).norm() < 1e-14);
        assert!((cal_x(half, 7, 4.0) - 1.0).norm() < 1e-15);
        // z = 0 gives c_0
        assert_eq!(lp.eval_full(Complex64::zero()), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cal_x_exponent_algebra() {
        let (g, q) = (3usize, 4.0f64);
        for s in [Complex64::new(0.7, 0.3), Complex64::new(0.5, -2.0)] {
            let big_x = (s - 0.5) * q.ln();
            let lhs = cal_x(s, g, q);
            let rhs = ((Complex64::new(0.5, 0.0) - s) * (2 * g + 1) as f64 * q.ln()).exp() * big_x.exp();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_zeros_and_degree() {
        let ctx = ctx2();
        for n in 1..=3 {
            for u in enumerate_f(&ctx, n).unwrap() {
                let lp = l_star(&u, &ctx).unwrap();
                assert_eq!(lp.coeffs.len(), 2 * u.genus() + 1);
                assert_eq!(lp.full_coeffs().iter().sum::<i64>(), 0);
                let raw = dirichlet_coeffs(&u, 2 * u.genus() + 1, &ctx).unwrap();
                assert_eq!(raw, lp.full_coeffs());
            }
            for u in enumerate_fprime(&ctx, n).unwrap() {
                let lp = l_star(&u, &ctx).unwrap();
                let alt: i64 = lp.full_coeffs().iter().enumerate().map(|(i, c)| if i % 2 == 0 { *c } else { -c }).sum();
                assert_eq!(alt, 0);
            }
        }
    }

    #[test]
    fn afe_matches_polynomial_evaluation() {
        let ctx = ctx2();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let members: Vec<Discriminant> = enumerate_i(&ctx, 4).unwrap().collect();
        for i in 0..20 {
            let u = &members[(i * 37) % members.len()];
            let s = Complex64::new(0.5 + 2.0 * next(), 10.0 * (next() - 0.5));
            let lp = l_star(u, &ctx).unwrap();
            let direct = evaluate(&lp, s);
            let afe = afe_evaluate(u, s, &ctx).unwrap();
            assert!((direct - afe).norm() < 1e-10 * direct.norm().max(1.0), "{direct} vs {afe}");
        }
    }

    #[test]
    fn central_value_float_view() {
        let ctx = ctx2();
        for u in enumerate_f(&ctx, 3).unwrap().take(20) {
            let lp = l_star(&u, &ctx).unwrap();
            let exact = central_value(&lp).to_f64();
            let float = evaluate(&lp, Complex64::new(0.5, 0.0)).re;
            assert!((exact - float).abs() < 1e-12);
        }
        let v = CentralValue { a: BigRational::from_integer(1.into()), b: BigRational::from_integer(1.into()), q: 4 };
        assert_eq!(v.pow(2).to_f64(), (1.5f64).powi(2));
    }

    #[test]
    fn completion_rejects_broken_symmetry() {
        assert_eq!(complete(&[1, 0, 2], UKind::RamifiedImaginary, 1, 2).unwrap(), vec![1, 0, 2]);
        assert!(matches!(complete(&[1, 0, 3], UKind::RamifiedImaginary, 1, 2), Err(Error::Consistency(_))));
        assert!(complete(&[1, 0], UKind::RamifiedImaginary, 1, 2).is_err());
    }
}
