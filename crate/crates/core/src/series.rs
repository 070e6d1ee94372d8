//! Truncated multivariate power series with coefficients in a ring `C`:
//! plain scalars, or polynomials in a formal variable x (`XPoly`).
//!
//! Every variable is truncated at the same inclusive order t, so exponents
//! live in the box [0, t]^k. Storage is dense with variable 0 contiguous.

use std::fmt::Debug;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::num::Real;

/// Polynomial in x with floating coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoly<T = f64> {
    coeffs: Vec<T>,
}

impl<T: Real> XPoly<T> {
    pub fn zero() -> Self {
        XPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The formal variable x.
    pub fn x() -> Self {
        Self::from_coeffs(vec![T::zero(), T::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// Rescale the variable: p(x) -> p(c x).
    pub fn rescale_var(&self, c: T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            out.push(a * pow);
            pow = pow * c;
        }
        Self::from_coeffs(out)
    }
}

/// Coefficient ring for `MultiSeries`.
pub trait Coeff: Clone + Debug + Send + Sync {
    type Scalar: Real;

    fn zero() -> Self;
    fn from_scalar(s: Self::Scalar) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: Self::Scalar) -> Self;
    /// self += a * b
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.add_assign(&a.mul(b));
    }
    /// The value if this coefficient is a plain scalar (degree 0 in x).
    fn as_scalar(&self) -> Option<Self::Scalar>;
    /// Largest absolute scalar entry, for convergence tests.
    fn magnitude(&self) -> Self::Scalar;

    fn one() -> Self {
        Self::from_scalar(<Self::Scalar as num_traits::One>::one())
    }
}

impl<T: Real> Coeff for T {
    type Scalar = T;
    fn zero() -> Self {
        T::zero()
    }
    fn from_scalar(s: T) -> Self {
        s
    }
    fn is_zero(&self) -> bool {
        *self == T::zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= *other;
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn scale(&self, s: T) -> Self {
        *self * s
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += *a * *b;
    }
    fn as_scalar(&self) -> Option<T> {
        Some(*self)
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> Coeff for XPoly<T> {
    type Scalar = T;

    fn zero() -> Self {
        XPoly::zero()
    }
    fn from_scalar(s: T) -> Self {
        XPoly::constant(s)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), T::zero());
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        *self = XPoly::from_coeffs(std::mem::take(&mut self.coeffs));
    }
    fn sub_assign(&mut self, other: &Self) {
        self.add_assign(&other.scale(-T::one()));
    }
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return XPoly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        XPoly::from_coeffs(out)
    }
    fn scale(&self, s: T) -> Self {
        XPoly::from_coeffs(self.coeffs.iter().map(|&a| a * s).collect())
    }
    fn as_scalar(&self) -> Option<T> {
        match self.coeffs.len() {
            0 => Some(T::zero()),
            1 => Some(self.coeffs[0]),
            _ => None,
        }
    }
    fn magnitude(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// Dense truncated power series in `nvars` variables, each exponent in 0..=order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries<C> {
    nvars: usize,
    order: usize,
    data: Vec<C>,
}

impl<C: Coeff> MultiSeries<C> {
    pub fn zeros(nvars: usize, order: usize) -> Self {
        let size = (order + 1).pow(nvars as u32);
        MultiSeries { nvars, order, data: vec![C::zero(); size] }
    }

    pub fn constant(nvars: usize, order: usize, c: C) -> Self {
        let mut s = Self::zeros(nvars, order);
        s.data[0] = c;
        s
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        Self::constant(nvars, order, C::one())
    }

    /// The variable z_var.
    pub fn variable(nvars: usize, order: usize, var: usize) -> Self {
        let mut s = Self::zeros(nvars, order);
        if order >= 1 {
            let st = s.stride(var);
            s.data[st] = C::one();
        }
        s
    }

    /// f(z_var) from univariate coefficients (extra coefficients are dropped).
    pub fn from_univariate(nvars: usize, order: usize, var: usize, f: &[C]) -> Self {
        let mut s = Self::zeros(nvars, order);
        let stride = s.stride(var);
        for (n, c) in f.iter().enumerate().take(order + 1) {
            s.data[n * stride] = c.clone();
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    fn stride(&self, var: usize) -> usize {
        (self.order + 1).pow(var as u32)
    }

    fn index(&self, exps: &[usize]) -> Result<usize> {
        if exps.len() != self.nvars {
            return Err(Error::Shape(format!("{} exponents for {} variables", exps.len(), self.nvars)));
        }
        let mut idx = 0;
        for (v, &e) in exps.iter().enumerate() {
            if e > self.order {
                return Err(Error::Truncation { required: e, got: self.order });
            }
            idx += e * self.stride(v);
        }
        Ok(idx)
    }

    pub fn exponents(&self, mut idx: usize) -> Vec<usize> {
        let base = self.order + 1;
        (0..self.nvars)
            .map(|_| {
                let e = idx % base;
                idx /= base;
                e
            })
            .collect()
    }

    /// The stored coefficient of prod z_i^{exps[i]}.
    pub fn extract_coeff(&self, exps: &[usize]) -> Result<C> {
        Ok(self.data[self.index(exps)?].clone())
    }

    pub fn set(&mut self, exps: &[usize], c: C) -> Result<()> {
        let idx = self.index(exps)?;
        self.data[idx] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> &C {
        &self.data[0]
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(Error::Shape(format!(
                "({} vars, order {}) vs ({} vars, order {})",
                self.nvars, self.order, other.nvars, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.add_assign(b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.sub_assign(b);
        }
        Ok(out)
    }

    pub fn scale(&self, s: C::Scalar) -> Self {
        MultiSeries { nvars: self.nvars, order: self.order, data: self.data.iter().map(|c| c.scale(s)).collect() }
    }

    /// Multiply every coefficient by a ring element (for example x).
    pub fn scale_coeff(&self, c: &C) -> Self {
        MultiSeries { nvars: self.nvars, order: self.order, data: self.data.iter().map(|a| a.mul(c)).collect() }
    }

    /// Visit every exponent in the box [0, bound] as (index, exponent vector).
    fn for_box(nvars: usize, order: usize, bound: &[usize], mut visit: impl FnMut(usize)) {
        let base = order + 1;
        let mut e = vec![0usize; nvars];
        loop {
            let mut idx = 0;
            let mut stride = 1;
            for &ev in &e {
                idx += ev * stride;
                stride *= base;
            }
            // variable 0 is contiguous
            for k in 0..=bound.first().copied().unwrap_or(0) {
                visit(idx + k);
            }
            if nvars <= 1 {
                return;
            }
            let mut v = 1;
            loop {
                if v == nvars {
                    return;
                }
                if e[v] < bound[v] {
                    e[v] += 1;
                    break;
                }
                e[v] = 0;
                v += 1;
            }
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = Self::zeros(self.nvars, self.order);
        let t = self.order;
        let mut bound = vec![0; self.nvars];
        for (i, a) in self.data.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = self.exponents(i);
            for (b, e) in bound.iter_mut().zip(&ei) {
                *b = t - e;
            }
            Self::for_box(self.nvars, t, &bound, |j| {
                out.data[i + j].mul_add_assign(a, &other.data[j]);
            });
        }
        Ok(out)
    }

    /// Multiply by a univariate series in z_var; cheaper than a full product.
    pub fn mul_univariate(&self, var: usize, f: &[C]) -> Self {
        let mut out = Self::zeros(self.nvars, self.order);
        let stride = self.stride(var);
        for (i, a) in self.data.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = (i / stride) % (self.order + 1);
            for (n, c) in f.iter().enumerate().take(self.order - e + 1) {
                out.data[i + n * stride].mul_add_assign(a, c);
            }
        }
        out
    }

    /// Multiply by the linear form sum_v w[v] z_v.
    pub fn mul_linear(&self, w: &[C::Scalar]) -> Result<Self> {
        if w.len() != self.nvars {
            return Err(Error::Shape(format!("{} weights for {} variables", w.len(), self.nvars)));
        }
        let mut out = Self::zeros(self.nvars, self.order);
        for (i, a) in self.data.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = self.exponents(i);
            for v in 0..self.nvars {
                if e[v] < self.order && !num_traits::Zero::is_zero(&w[v]) {
                    out.data[i + self.stride(v)].add_assign(&a.scale(w[v]));
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of prod z^exps in self * other, without forming the product.
    pub fn product_coeff(&self, other: &Self, exps: &[usize]) -> Result<C> {
        self.check_shape(other)?;
        let target = self.index(exps)?;
        let mut acc = C::zero();
        Self::for_box(self.nvars, self.order, exps, |j| {
            acc.mul_add_assign(&self.data[j], &other.data[target - j]);
        });
        Ok(acc)
    }

    /// Total degree |e| of every stored exponent, as scalars.
    fn total_degrees(&self) -> Vec<C::Scalar> {
        (0..self.data.len())
            .map(|i| C::Scalar::from_usize_exact(self.exponents(i).iter().sum()))
            .collect()
    }

    /// exp(a) for a with zero constant term, via the Euler-operator recursion
    /// |e| b_e = sum_{0 < e' <= e} |e'| a_{e'} b_{e - e'}.
    pub fn exp_series(&self) -> Result<Self> {
        if !self.data[0].is_zero() {
            return Err(Error::Domain("exp_series needs a zero constant term".into()));
        }
        let deg = self.total_degrees();
        let weighted: Vec<C> = self.data.iter().zip(&deg).map(|(a, &d)| a.scale(d)).collect();
        let mut b = Self::zeros(self.nvars, self.order);
        b.data[0] = C::one();
        for idx in 1..b.data.len() {
            let e = b.exponents(idx);
            let mut acc = C::zero();
            Self::for_box(self.nvars, self.order, &e, |j| {
                if j != 0 && !weighted[j].is_zero() {
                    acc.mul_add_assign(&weighted[j], &b.data[idx - j]);
                }
            });
            b.data[idx] = acc.scale(deg[idx].recip());
        }
        Ok(b)
    }

    /// 1/a for a with an invertible scalar constant term.
    pub fn recip_series(&self) -> Result<Self> {
        let a0 = self.data[0]
            .as_scalar()
            .filter(|s| !num_traits::Zero::is_zero(s))
            .ok_or_else(|| Error::Domain("recip_series needs an invertible scalar constant term".into()))?;
        let inv = a0.recip();
        let mut c = Self::zeros(self.nvars, self.order);
        c.data[0] = C::from_scalar(inv);
        for idx in 1..c.data.len() {
            let e = c.exponents(idx);
            let mut acc = C::zero();
            Self::for_box(self.nvars, self.order, &e, |j| {
                if j != 0 && !self.data[j].is_zero() {
                    acc.mul_add_assign(&self.data[j], &c.data[idx - j]);
                }
            });
            c.data[idx] = acc.scale(-inv);
        }
        Ok(c)
    }

    /// log(b) for b with constant term 1, via |e| b_e = sum_{e' <= e} |e'| a_{e'} b_{e - e'}.
    pub fn log_series(&self) -> Result<Self> {
        if self.data[0].as_scalar() != Some(<C::Scalar as num_traits::One>::one()) {
            return Err(Error::Domain("log_series needs constant term 1".into()));
        }
        let deg = self.total_degrees();
        let mut a = Self::zeros(self.nvars, self.order);
        // weighted[e] = |e| a_e, filled as we go
        let mut weighted: Vec<C> = vec![C::zero(); self.data.len()];
        for idx in 1..a.data.len() {
            let e = a.exponents(idx);
            let mut acc = self.data[idx].scale(deg[idx]);
            Self::for_box(self.nvars, self.order, &e, |j| {
                if j != 0 && j != idx && !weighted[j].is_zero() {
                    acc.sub_assign(&weighted[j].mul(&self.data[idx - j]));
                }
            });
            weighted[idx] = acc.clone();
            a.data[idx] = acc.scale(deg[idx].recip());
        }
        Ok(a)
    }

    /// Lift scalar coefficients into another coefficient ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiSeries<D> {
        MultiSeries { nvars: self.nvars, order: self.order, data: self.data.iter().map(f).collect() }
    }

    /// Largest coefficient magnitude.
    pub fn magnitude(&self) -> C::Scalar {
        self.data.iter().fold(<C::Scalar as num_traits::Zero>::zero(), |m, c| m.max(c.magnitude()))
    }
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_usize_exact(n - i) / T::from_usize_exact(i + 1);
    }
    acc
}

/// f(z_i + z_j) for a univariate series f; with i == j this is f(2 z_i).
pub fn compose_sum<C: Coeff>(f: &[C], i: usize, j: usize, nvars: usize, order: usize) -> Result<MultiSeries<C>> {
    if i >= nvars || j >= nvars {
        return Err(Error::Shape(format!("variable index out of range for {nvars} variables")));
    }
    let mut out = MultiSeries::<C>::zeros(nvars, order);
    let si = out.stride(i);
    let sj = out.stride(j);
    let max_n = if i == j { order } else { 2 * order };
    for (n, c) in f.iter().enumerate().take(max_n + 1) {
        if c.is_zero() {
            continue;
        }
        if i == j {
            let two_n = C::Scalar::lit(2.0).powi(n as i32);
            out.data[n * si].add_assign(&c.scale(two_n));
            continue;
        }
        for a in n.saturating_sub(order)..=n.min(order) {
            let b = n - a;
            out.data[a * si + b * sj].add_assign(&c.scale(binomial(n, a)));
        }
    }
    Ok(out)
}

/// Taylor coefficients of s / (1 - q^{-s}) = s zeta_A(1+s) up to s^t,
/// by dividing the series (1 - q^{-s})/s exactly.
pub fn zeta_shift_jet<T: Real>(t: usize, q: T) -> Vec<T> {
    let l = q.ln();
    // (1 - e^{-Ls})/s = sum_n (-1)^n L^{n+1} s^n / (n+1)!
    let mut e = Vec::with_capacity(t + 1);
    let mut term = l;
    for n in 0..=t {
        e.push(term);
        term = -term * l / T::from_usize_exact(n + 2);
    }
    univariate_recip(&e)
}

/// Reciprocal of a univariate series with nonzero constant term.
pub fn univariate_recip<T: Real>(a: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(a.len());
    let inv = a[0].recip();
    for n in 0..a.len() {
        let mut acc = if n == 0 { T::one() } else { T::zero() };
        for k in 1..=n {
            acc -= a[k] * out[n - k];
        }
        out.push(acc * inv);
    }
    out
}

/// Taylor coefficients of exp(c s) up to s^t.
pub fn exp_linear<T: Real>(c: T, t: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(t + 1);
    let mut term = T::one();
    for n in 0..=t {
        out.push(term);
        term = term * c / T::from_usize_exact(n + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type S = MultiSeries<f64>;
    type X = MultiSeries<XPoly<f64>>;

    fn close(a: &S, b: &S, tol: f64) -> bool {
        let scale = a.magnitude().max(b.magnitude()).max(1.0);
        a.data().iter().zip(b.data()).all(|(x, y)| (x - y).abs() <= tol * scale)
    }

    #[test]
    fn product_examples() {
        let one = S::one(2, 3);
        let a = one.add(&S::variable(2, 3, 0)).unwrap();
        let b = one.add(&S::variable(2, 3, 1)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.extract_coeff(&[0, 0]).unwrap(), 1.0);
        assert_eq!(p.extract_coeff(&[1, 0]).unwrap(), 1.0);
        assert_eq!(p.extract_coeff(&[0, 1]).unwrap(), 1.0);
        assert_eq!(p.extract_coeff(&[1, 1]).unwrap(), 1.0);
        assert_eq!(p.extract_coeff(&[2, 0]).unwrap(), 0.0);

        let mut z3 = S::zeros(1, 3);
        z3.set(&[3], 1.0).unwrap();
        assert!(z3.mul(&S::variable(1, 3, 0)).unwrap().data().iter().all(|c| *c == 0.0));
        assert!(z3.extract_coeff(&[4]).is_err());
        assert!(z3.mul(&S::one(2, 3)).is_err());
    }

    #[test]
    fn scale_by_x_shifts_degree() {
        let s = X::constant(1, 2, XPoly::constant(3.0));
        let sx = s.scale_coeff(&XPoly::x());
        assert_eq!(sx.extract_coeff(&[0]).unwrap(), XPoly::from_coeffs(vec![0.0, 3.0]));
    }

    #[test]
    fn exp_example_with_formal_x() {
        let l = 4f64.ln();
        let c = XPoly::x().scale(l / 2.0);
        let arg = X::variable(2, 3, 0).add(&X::variable(2, 3, 1)).unwrap().scale_coeff(&c);
        let e = arg.exp_series().unwrap();
        let z1z2 = e.extract_coeff(&[1, 1]).unwrap();
        let expected = c.mul(&c);
        assert_eq!(z1z2.degree(), Some(2));
        assert!((z1z2.coeff(2) - expected.coeff(2)).abs() < 1e-15);
        assert_eq!(X::zeros(2, 3).exp_series().unwrap(), X::one(2, 3));
    }

    #[test]
    fn recip_geometric() {
        let a = S::one(1, 6).sub(&S::variable(1, 6, 0)).unwrap();
        let r = a.recip_series().unwrap();
        assert!(r.data().iter().all(|c| (*c - 1.0).abs() < 1e-15));
        assert!(S::zeros(1, 3).recip_series().is_err());
    }

    #[test]
    fn compose_sum_examples() {
        let s = compose_sum(&[0.0, 1.0], 0, 1, 2, 3).unwrap();
        assert_eq!(s, S::variable(2, 3, 0).add(&S::variable(2, 3, 1)).unwrap());
        let sq = compose_sum(&[0.0, 0.0, 1.0], 0, 1, 2, 3).unwrap();
        assert_eq!(sq.extract_coeff(&[2, 0]).unwrap(), 1.0);
        assert_eq!(sq.extract_coeff(&[1, 1]).unwrap(), 2.0);
        assert_eq!(sq.extract_coeff(&[0, 2]).unwrap(), 1.0);
        assert_eq!(compose_sum(&[5.0], 0, 1, 2, 3).unwrap(), S::constant(2, 3, 5.0));
        let diag = compose_sum(&[0.0, 1.0, 1.0], 1, 1, 2, 3).unwrap();
        assert_eq!(diag.extract_coeff(&[0, 2]).unwrap(), 4.0);
    }

    #[test]
    fn zeta_shift_jet_examples() {
        for q in [2.0f64, 4.0, 16.0] {
            let l = q.ln();
            let h = zeta_shift_jet(6, q);
            assert!((h[0] - 1.0 / l).abs() < 1e-15);
            assert!((h[1] - 0.5).abs() < 1e-15);
            assert!((h[2] - l / 12.0).abs() < 1e-15);
            assert!(h[3].abs() < 1e-15);
            assert!((h[4] + l.powi(3) / 720.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zeta_shift_jet_matches_numerical_derivatives() {
        // central differences of g(s) = s/(1-q^{-s}) on a small circle via Cauchy's formula
        let q = 4.0f64;
        let h = zeta_shift_jet(5, q);
        let radius = 0.5;
        let m = 256;
        for (n, hn) in h.iter().enumerate() {
            let mut acc = 0.0;
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let s = num_complex::Complex64::from_polar(radius, th);
                let g = s / (1.0 - (-s * q.ln()).exp());
                acc += (g * num_complex::Complex64::from_polar(radius.powi(-(n as i32)), -(n as f64) * th)).re;
            }
            acc /= m as f64;
            assert!((acc - hn).abs() < 1e-9, "n={n}: {acc} vs {hn}");
        }
    }

    #[test]
    fn generic_over_f32() {
        let a = MultiSeries::<f32>::variable(2, 4, 0).add(&MultiSeries::variable(2, 4, 1)).unwrap();
        let e = a.exp_series().unwrap();
        let back = e.log_series().unwrap();
        assert!(back.sub(&a).unwrap().magnitude() < 1e-6);
        let h = zeta_shift_jet(3, 2.0f32);
        assert!((h[1] - 0.5).abs() < 1e-6);
    }

    fn series_strategy(nvars: usize, order: usize) -> impl Strategy<Value = S> {
        let size = (order + 1).pow(nvars as u32);
        prop::collection::vec(-1.0f64..1.0, size).prop_map(move |v| {
            let mut s = S::zeros(nvars, order);
            for (i, c) in v.into_iter().enumerate() {
                let e = s.exponents(i);
                s.set(&e, c).unwrap();
            }
            s
        })
    }

    fn zero_constant(mut s: S) -> S {
        let z = vec![0; s.nvars()];
        s.set(&z, 0.0).unwrap();
        s
    }

    proptest! {
        #[test]
        fn associativity(a in series_strategy(3, 3), b in series_strategy(3, 3), c in series_strategy(3, 3)) {
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(close(&l, &r, 1e-12));
        }

        #[test]
        fn exp_is_a_homomorphism(a in series_strategy(2, 4), b in series_strategy(2, 4)) {
            let (a, b) = (zero_constant(a), zero_constant(b));
            let l = a.add(&b).unwrap().exp_series().unwrap();
            let r = a.exp_series().unwrap().mul(&b.exp_series().unwrap()).unwrap();
            prop_assert!(close(&l, &r, 1e-10));
        }

        #[test]
        fn recip_inverts(a in series_strategy(3, 3)) {
            let z = vec![0; 3];
            let mut a = a;
            a.set(&z, 1.5).unwrap();
            let prod = a.mul(&a.recip_series().unwrap()).unwrap();
            prop_assert!(close(&prod, &S::one(3, 3), 1e-12));
        }

        #[test]
        fn log_inverts_exp(a in series_strategy(2, 5)) {
            let a = zero_constant(a);
            let back = a.exp_series().unwrap().log_series().unwrap();
            prop_assert!(close(&back, &a, 1e-10));
        }

        #[test]
        fn product_coeff_matches_product(a in series_strategy(2, 3), b in series_strategy(2, 3), e0 in 0usize..4, e1 in 0usize..4) {
            let full = a.mul(&b).unwrap().extract_coeff(&[e0, e1]).unwrap();
            let direct = a.product_coeff(&b, &[e0, e1]).unwrap();
            prop_assert!((full - direct).abs() < 1e-12);
        }

        #[test]
        fn fast_paths_match_general_product(a in series_strategy(3, 3), f in prop::collection::vec(-1.0f64..1.0, 4), w in prop::collection::vec(-1.0f64..1.0, 3)) {
            let uni = S::from_univariate(3, 3, 1, &f);
            prop_assert!(close(&a.mul_univariate(1, &f), &a.mul(&uni).unwrap(), 1e-13));
            let mut lin = S::zeros(3, 3);
            for (v, wv) in w.iter().enumerate() {
                lin = lin.add(&S::variable(3, 3, v).scale(*wv)).unwrap();
            }
            prop_assert!(close(&a.mul_linear(&w).unwrap(), &a.mul(&lin).unwrap(), 1e-13));
        }
    }
}
