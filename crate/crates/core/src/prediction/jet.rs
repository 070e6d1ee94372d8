//! Taylor jets of A(1/2; z_1, ..., z_k) from its per-prime closed form.
//!
//! Per prime of norm x the factor is
//!   prod_{i<=j} (1 - x^{-1-z_i-z_j}) * (half-sum of prod (1 -+ x^{-1/2-z_j})^{-1} + 1/x) / (1 + 1/x).
//! We build its logarithm as a series, scale by the Gauss count and sum over degrees,
//! so the whole product costs one exponential at the end.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::euler::gauss_count;
use crate::error::Result;
use crate::num::{cexp_m1, cln_1p, Real};
use crate::series::{compose_sum, univariate_recip, MultiSeries};

/// Series of log(f) for a univariate f with f(0) > 0, to the length of f.
pub fn univariate_log<T: Real>(f: &[T]) -> Result<Vec<T>> {
    let f0 = f[0];
    let mut normalized: Vec<T> = f.iter().map(|&c| c / f0).collect();
    normalized[0] = T::one();
    let s = MultiSeries::from_univariate(1, f.len() - 1, 0, &normalized);
    let mut out: Vec<T> = s.log_series()?.data().to_vec();
    out[0] = f0.ln();
    Ok(out)
}

/// Coefficients of c * x^{-s} = c * exp(-s log x) up to s^len-1.
fn decaying_exp<T: Real>(c: T, log_x: T, len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    let mut term = c;
    for n in 0..len {
        out.push(term);
        term = term * (-log_x) / T::from_usize_exact(n + 1);
    }
    out
}

/// log of the per-prime factor at norm x, as a k-variable series of the given order.
fn log_factor_jet<T: Real>(k: usize, x: T, order: usize) -> Result<MultiSeries<T>> {
    let lx = x.ln();
    let len = 2 * order + 1;
    let rx = x.recip();
    // log(1 - x^{-1} x^{-s}), in the single variable s = z_i + z_j
    let mut one_minus = decaying_exp(-rx, lx, len);
    one_minus[0] += T::one();
    let mut off = univariate_log(&one_minus)?;
    off[0] = (-rx).ln_1p();

    let mut total = MultiSeries::zeros(k, order);
    for i in 0..k {
        for j in i..k {
            total = total.add(&compose_sum(&off, i, j, k, order)?)?;
        }
    }

    // (1 -+ x^{-1/2 - z})^{-1}
    let u = decaying_exp(rx.sqrt(), lx, order + 1);
    let minus: Vec<T> = univariate_recip(&u.iter().enumerate().map(|(n, &c)| if n == 0 { T::one() - c } else { -c }).collect::<Vec<_>>());
    let plus: Vec<T> = univariate_recip(&u.iter().enumerate().map(|(n, &c)| if n == 0 { T::one() + c } else { c }).collect::<Vec<_>>());
    let mut pm = MultiSeries::one(k, order);
    let mut pp = MultiSeries::one(k, order);
    for v in 0..k {
        pm = pm.mul_univariate(v, &minus);
        pp = pp.mul_univariate(v, &plus);
    }
    let half = T::lit(0.5);
    let mut bracket = pm.add(&pp)?.scale(half);
    let b0 = *bracket.constant_term() + rx;
    // b0 - 1 without cancellation: (1 -+ u)^{-k} - 1 = expm1(-k log1p(-+u))
    let kk = T::from_usize_exact(k);
    let b0_m1 = half * ((-kk * (-u[0]).ln_1p()).exp_m1() + (-kk * u[0].ln_1p()).exp_m1()) + rx;
    bracket.set(&vec![0; k], b0)?;
    let mut normalized = bracket.scale(b0.recip());
    normalized.set(&vec![0; k], T::one())?;
    let log_bracket = normalized.log_series()?;
    total = total.add(&log_bracket)?;

    // constants: log b0 - log(1 + 1/x)
    let c0 = *total.constant_term() + b0_m1.ln_1p() - rx.ln_1p();
    total.set(&vec![0; k], c0)?;
    Ok(total)
}

/// log A(1/2; z_1..z_k) over primes of degree <= D, as a series of the given order per variable.
pub fn a_log_jet<T: Real>(k: usize, q: u64, max_degree: usize, order: usize) -> Result<MultiSeries<T>> {
    let per_degree: Vec<Result<MultiSeries<T>>> = (1..=max_degree)
        .into_par_iter()
        .map(|d| {
            let x = T::from_u64(q).expect("q representable").powi(d as i32);
            Ok(log_factor_jet(k, x, order)?.scale(gauss_count::<T>(q, d)))
        })
        .collect();
    let mut acc = MultiSeries::zeros(k, order);
    for s in per_degree {
        acc = acc.add(&s?)?;
    }
    Ok(acc)
}

/// A(1/2; z_1..z_k) as a truncated series; the constant term is A(1/2; 0,...,0).
pub fn a_jet<T: Real>(k: usize, q: u64, max_degree: usize, order: usize) -> Result<MultiSeries<T>> {
    let log = a_log_jet::<T>(k, q, max_degree, order)?;
    let c = *log.constant_term();
    let mut shifted = log;
    shifted.set(&vec![0; k], T::zero())?;
    Ok(shifted.exp_series()?.scale(c.exp()))
}

/// Partial derivative of A at the origin: indices are 1-based variable labels, as in A_{112}.
pub fn a_partial<T: Real>(jet: &MultiSeries<T>, indices: &[usize]) -> Result<T> {
    let mut exps = vec![0; jet.nvars()];
    for &i in indices {
        exps[i - 1] += 1;
    }
    let fact: T = exps.iter().fold(T::one(), |acc, &e| acc * factorial::<T>(e));
    Ok(jet.extract_coeff(&exps)? * fact)
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_usize_exact(i))
}

/// A(1/2; z) at a complex point, prime by prime (degree-grouped) from the same closed form.
pub fn a_value<T: Real>(z: &[Complex<T>], q: u64, max_degree: usize) -> Complex<T> {
    let mut log = Complex::<T>::zero();
    for d in 1..=max_degree {
        let x = T::from_u64(q).expect("q representable").powi(d as i32);
        let lx = x.ln();
        let pw = |s: Complex<T>| (-s * lx).exp();
        let one = Complex::<T>::one();
        // log of the factor, each piece through log1p / expm1 so tiny 1/x survives
        let mut lf = Complex::<T>::zero();
        for i in 0..z.len() {
            for j in i..z.len() {
                lf = lf + cln_1p(-pw(one + z[i] + z[j]));
            }
        }
        let mut lm = Complex::<T>::zero();
        let mut lp = Complex::<T>::zero();
        for &zj in z {
            let u = pw(Complex::new(T::lit(0.5), T::zero()) + zj);
            lm = lm - cln_1p(-u);
            lp = lp - cln_1p(u);
        }
        let rx = x.recip();
        let bracket_m1 = (cexp_m1(lm) + cexp_m1(lp)) * T::lit(0.5) + rx;
        lf = lf + cln_1p(bracket_m1) - rx.ln_1p();
        log = log + lf * gauss_count::<T>(q, d);
    }
    log.exp()
}
