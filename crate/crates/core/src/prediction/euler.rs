//! Euler products over monic irreducibles, grouped by degree.
//!
//! Every product used here has a factor depending on P only through |P| = q^d, so
//! a product over deg P <= D is a sum over d of N_d log(factor(q^d)), with N_d the
//! Gauss count. Degrees are evaluated in parallel and summed strictly in
//! increasing order, which makes values reproducible bit-for-bit.

use std::fs;
use std::io::Write;
use std::ops::{Add, Mul};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{default_cache_dir, irreducible_count};
use crate::error::{Error, Result};
use crate::num::Real;

/// A truncated Euler product (or Euler sum) with its truncation data.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProductValue<T, V = T> {
    /// The product, or the sum for additive quantities such as log-derivatives.
    pub value: V,
    pub degree: usize,
    /// Bound on the neglected log-sum (or sum) over degrees > D.
    pub tail_estimate: T,
    /// Cumulative log-sums (or partial sums) after degrees 1..=D.
    pub partial_log_sums: Vec<V>,
}

/// Default truncation degree per q; chosen so the P(1) tail is below 1e-10.
pub fn default_truncation(q: u64) -> usize {
    match q {
        2 => 32,
        4 => 16,
        8 => 11,
        16 => 8,
        _ => {
            // about 33 bits worth of norm
            let bits = (q as f64).log2().max(1.0);
            (33.0 / bits).ceil() as usize
        }
    }
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree d, exact while q^d fits comfortably in 64 bits.
pub fn gauss_count<T: Real>(q: u64, d: usize) -> T {
    let bits = (q as f64).log2() * d as f64;
    if bits < 62.0 {
        return T::from_u64(irreducible_count(q, d as u32)).expect("count representable");
    }
    let qf = q as f64;
    let total: f64 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mobius(e) as f64 * qf.powi((d / e) as i32))
        .sum();
    T::lit(total / d as f64)
}

fn norm<T: Real>(q: u64, d: usize) -> T {
    T::from_u64(q).expect("q representable").powi(d as i32)
}

/// Cumulative sums of N_d * term(q^d) over d = 1..=max_degree.
pub fn accumulate<T, V>(q: u64, max_degree: usize, term: impl Fn(T) -> V + Sync) -> Vec<V>
where
    T: Real,
    V: Copy + Zero + Add<Output = V> + Mul<T, Output = V> + Send,
{
    let per_degree: Vec<V> = (1..=max_degree)
        .into_par_iter()
        .map(|d| term(norm::<T>(q, d)) * gauss_count::<T>(q, d))
        .collect();
    let mut acc = V::zero();
    per_degree
        .into_iter()
        .map(|v| {
            acc = acc + v;
            acc
        })
        .collect()
}

/// Tail bound sum_{d > D} (q^d / d) * bound(q^d), using N_d <= q^d / d.
/// `bound` should dominate |log factor| (or |summand|) at norm x.
pub fn tail_bound<T: Real>(q: u64, max_degree: usize, bound: impl Fn(T) -> T) -> T {
    let mut total = T::zero();
    for d in max_degree + 1..max_degree + 400 {
        let x = norm::<T>(q, d);
        if !x.is_finite() {
            break;
        }
        let term = x / T::from_usize_exact(d) * bound(x);
        if !term.is_finite() {
            break;
        }
        total += term;
        if term <= total * T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    total
}

/// The bound |log(1 + e)| <= 2|e| for |e| <= 1/2, applied to the deviation of a factor from 1.
pub fn log_bound<T: Real>(eps: T) -> T {
    if eps <= T::lit(0.5) {
        T::lit(2.0) * eps
    } else {
        T::infinity()
    }
}

/// prod over deg P <= D of factor(|P|), given log(factor) and |factor - 1|.
pub fn euler_product<T: Real>(
    q: u64,
    max_degree: usize,
    log_factor: impl Fn(T) -> T + Sync,
    deviation: impl Fn(T) -> T,
) -> EulerProductValue<T> {
    let partial = accumulate(q, max_degree, log_factor);
    let total = partial.last().copied().unwrap_or_else(T::zero);
    EulerProductValue {
        value: total.exp(),
        degree: max_degree,
        tail_estimate: tail_bound(q, max_degree, |x| log_bound(deviation(x))),
        partial_log_sums: partial,
    }
}

/// sum over deg P <= D of summand(|P|).
pub fn euler_sum<T: Real>(q: u64, max_degree: usize, summand: impl Fn(T) -> T + Sync) -> EulerProductValue<T> {
    let partial = accumulate(q, max_degree, &summand);
    let total = partial.last().copied().unwrap_or_else(T::zero);
    EulerProductValue {
        value: total,
        degree: max_degree,
        tail_estimate: tail_bound(q, max_degree, |x| summand(x).abs()),
        partial_log_sums: partial,
    }
}

pub fn euler_product_complex<T: Real>(
    q: u64,
    max_degree: usize,
    log_factor: impl Fn(T) -> Complex<T> + Sync,
    deviation: impl Fn(T) -> T,
) -> EulerProductValue<T, Complex<T>> {
    let partial = accumulate(q, max_degree, log_factor);
    let total = partial.last().copied().unwrap_or_else(Complex::zero);
    EulerProductValue {
        value: total.exp(),
        degree: max_degree,
        tail_estimate: tail_bound(q, max_degree, |x| log_bound(deviation(x))),
        partial_log_sums: partial,
    }
}

pub fn euler_sum_complex<T: Real>(
    q: u64,
    max_degree: usize,
    summand: impl Fn(T) -> Complex<T> + Sync,
) -> EulerProductValue<T, Complex<T>> {
    let partial = accumulate(q, max_degree, &summand);
    let total = partial.last().copied().unwrap_or_else(Complex::zero);
    EulerProductValue {
        value: total,
        degree: max_degree,
        tail_estimate: tail_bound(q, max_degree, |x| summand(x).norm()),
        partial_log_sums: partial,
    }
}

/// Numerators h_k of the closed forms A(1/2;0,...,0) = prod_P (1 - h_k(|P|)/(|P|^{k(k+1)/2}(|P|+1))),
/// highest degree first. k = 1 gives P(1).
pub fn h_coeffs(k: usize) -> Result<&'static [i64]> {
    const H1: &[i64] = &[1];
    const H2: &[i64] = &[4, -3, 1];
    const H3: &[i64] = &[12, -23, 23, -15, 6, -1];
    const H4: &[i64] = &[30, -109, 210, -274, 272, -210, 119, -45, 10, -1];
    const H5: &[i64] = &[65, -385, 1220, -2613, 4263, -5725, 6540, -6275, 4879, -2963, 1360, -455, 105, -15, 1];
    match k {
        1 => Ok(H1),
        2 => Ok(H2),
        3 => Ok(H3),
        4 => Ok(H4),
        5 => Ok(H5),
        _ => Err(Error::Unsupported(format!("closed-form A for k = {k}; available for k = 1..5"))),
    }
}

/// h_k(x) / (x^{k(k+1)/2} (x + 1)), evaluated in powers of 1/x for stability.
fn closed_deviation<T: Real>(h: &[i64], x: T) -> T {
    let y = x.recip();
    // deg h = m - 1 with m = k(k+1)/2, so h(x)/x^m = sum_i h_i y^{i+1}, h_0 leading
    let mut acc = T::zero();
    for &c in h.iter().rev() {
        acc = (acc + T::lit(c as f64)) * y;
    }
    // 1/(x+1) = y/(1+y)
    acc / (T::one() + y) * y
}

/// The Euler products the crate knows by name; these are the ones that can be cached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedProduct {
    /// P(1) = prod (1 - 1/(|P|(|P|+1)))
    P1,
    /// (P'/P)(1) = sum log|P| / (|P|(|P|+1) - 1)
    PLogDeriv,
    /// A(1/2; 0,...,0) with k zeros, from the closed numerators h_k
    AClosed(usize),
}

impl NamedProduct {
    pub fn id(&self) -> String {
        match self {
            NamedProduct::P1 => "P1".into(),
            NamedProduct::PLogDeriv => "Plogderiv".into(),
            NamedProduct::AClosed(k) => format!("Aclosed{k}"),
        }
    }

    fn is_sum(&self) -> bool {
        matches!(self, NamedProduct::PLogDeriv)
    }

    pub fn compute<T: Real>(&self, q: u64, max_degree: usize) -> Result<EulerProductValue<T>> {
        match *self {
            NamedProduct::P1 => Ok(euler_p1(q, max_degree)),
            NamedProduct::PLogDeriv => Ok(euler_p_logderiv(q, max_degree)),
            NamedProduct::AClosed(k) => a_closed(k, q, max_degree),
        }
    }

    fn tail<T: Real>(&self, q: u64, max_degree: usize) -> Result<T> {
        Ok(match *self {
            NamedProduct::P1 => tail_bound(q, max_degree, |x: T| log_bound((x * (x + T::one())).recip())),
            NamedProduct::PLogDeriv => tail_bound(q, max_degree, p_logderiv_summand),
            NamedProduct::AClosed(k) => {
                let h = h_coeffs(k)?;
                tail_bound(q, max_degree, |x: T| log_bound(closed_deviation(h, x).abs()))
            }
        })
    }
}

fn p_logderiv_summand<T: Real>(x: T) -> T {
    x.ln() / (x * (x + T::one()) - T::one())
}

/// P(1) over irreducibles of degree <= D.
pub fn euler_p1<T: Real>(q: u64, max_degree: usize) -> EulerProductValue<T> {
    euler_product(
        q,
        max_degree,
        |x: T| (-(x * (x + T::one())).recip()).ln_1p(),
        |x: T| (x * (x + T::one())).recip(),
    )
}

/// (P'/P)(1), the term-wise log-derivative of P(s) at s = 1.
pub fn euler_p_logderiv<T: Real>(q: u64, max_degree: usize) -> EulerProductValue<T> {
    euler_sum(q, max_degree, p_logderiv_summand)
}

/// Both P(1) and (P'/P)(1).
pub fn euler_p<T: Real>(q: u64, max_degree: usize) -> (EulerProductValue<T>, EulerProductValue<T>) {
    (euler_p1(q, max_degree), euler_p_logderiv(q, max_degree))
}

/// A(1/2; 0,...,0) from the explicit numerators h_k, k = 1..5.
pub fn a_closed<T: Real>(k: usize, q: u64, max_degree: usize) -> Result<EulerProductValue<T>> {
    let h = h_coeffs(k)?;
    Ok(euler_product(
        q,
        max_degree,
        |x: T| (-closed_deviation(h, x)).ln_1p(),
        |x: T| closed_deviation(h, x).abs(),
    ))
}

/// On-disk cache of cumulative log-sums, one file per (q, product, D), one line per degree.
#[derive(Clone, Debug)]
pub struct EulerCache {
    dir: PathBuf,
}

impl EulerCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EulerCache { dir: dir.into() }
    }

    /// The cache named by the environment, if set.
    pub fn from_env() -> Option<Self> {
        default_cache_dir().map(EulerCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, q: u64, product: NamedProduct, max_degree: usize) -> PathBuf {
        self.dir.join(format!("euler_q{q}_{}_D{max_degree}.txt", product.id()))
    }

    pub fn load(&self, q: u64, product: NamedProduct, max_degree: usize) -> Option<Vec<f64>> {
        let text = fs::read_to_string(self.path(q, product, max_degree)).ok()?;
        let mut out = Vec::with_capacity(max_degree);
        for (i, line) in text.lines().enumerate() {
            let (d, v) = line.split_once(' ')?;
            if d.parse::<usize>().ok()? != i + 1 {
                return None;
            }
            out.push(v.parse::<f64>().ok()?);
        }
        (out.len() == max_degree).then_some(out)
    }

    pub fn store(&self, q: u64, product: NamedProduct, partial: &[f64]) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(q, product, partial.len());
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            for (i, v) in partial.iter().enumerate() {
                // Debug formatting of f64 round-trips exactly
                writeln!(f, "{} {:?}", i + 1, v)?;
            }
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Load the named product, computing and storing it on a miss.
    pub fn get(&self, product: NamedProduct, q: u64, max_degree: usize) -> Result<EulerProductValue<f64>> {
        if let Some(partial) = self.load(q, product, max_degree) {
            let total = partial.last().copied().unwrap_or(0.0);
            return Ok(EulerProductValue {
                value: if product.is_sum() { total } else { total.exp() },
                degree: max_degree,
                tail_estimate: product.tail(q, max_degree)?,
                partial_log_sums: partial,
            });
        }
        let v = product.compute::<f64>(q, max_degree)?;
        self.store(q, product, &v.partial_log_sums)?;
        Ok(v)
    }
}

/// Named product through the cache when one is given.
pub fn named_product(
    product: NamedProduct,
    q: u64,
    max_degree: usize,
    cache: Option<&EulerCache>,
) -> Result<EulerProductValue<f64>> {
    match cache {
        Some(c) => c.get(product, q, max_degree),
        None => product.compute(q, max_degree),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn p1_first_degree() {
        let v: EulerProductValue<f64> = euler_p1(2, 1);
        assert!((v.value - 25.0 / 36.0).abs() < 1e-15);
        assert_eq!(v.partial_log_sums.len(), 1);
    }

    #[test]
    fn p1_decreases_and_tail_decays() {
        for &q in &[2u64, 4, 8] {
            let mut last = 1.0;
            let mut last_tail = f64::INFINITY;
            for d in 1..12 {
                let v: EulerProductValue<f64> = euler_p1(q, d);
                assert!(v.value < last);
                assert!(v.tail_estimate < last_tail);
                // the estimate must cover the true remaining log-sum
                let far: EulerProductValue<f64> = euler_p1(q, 40);
                let true_tail = (far.partial_log_sums.last().unwrap() - v.partial_log_sums.last().unwrap()).abs();
                assert!(true_tail <= v.tail_estimate, "q={q} d={d}");
                last = v.value;
                last_tail = v.tail_estimate;
            }
        }
        let v: EulerProductValue<f64> = euler_p1(4, default_truncation(4));
        assert!(v.tail_estimate < 1e-10);
        let v: EulerProductValue<f64> = euler_p1(2, default_truncation(2));
        assert!(v.tail_estimate < 1e-10);
    }

    #[test]
    fn p1_matches_prime_by_prime_product() {
        // independent route: explicit list of degree <= 3 norms over F_2 (2, 2, 1*4, 2*8)
        let mut direct = 1.0f64;
        for (d, count) in [(1, 2), (2, 1), (3, 2)] {
            let x = 2f64.powi(d);
            for _ in 0..count {
                direct *= 1.0 - 1.0 / (x * (x + 1.0));
            }
        }
        let v: EulerProductValue<f64> = euler_p1(2, 3);
        assert!((v.value - direct).abs() < 1e-15);
    }

    #[test]
    fn logderiv_matches_finite_difference_of_p() {
        // d/ds log prod (1 - |P|^{-s}/(|P|+1)) at s = 1
        let q = 4u64;
        let d = 6;
        let logp = |s: f64| -> f64 {
            accumulate(q, d, |x: f64| (-(x.powf(-s)) / (x + 1.0)).ln_1p()).last().copied().unwrap()
        };
        let h = 1e-5;
        let fd = (logp(1.0 + h) - logp(1.0 - h)) / (2.0 * h);
        let v: EulerProductValue<f64> = euler_p_logderiv(q, d);
        assert!((v.value - fd).abs() < 1e-9);
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let a: EulerProductValue<f64> = a_closed(3, 2, 20).unwrap();
        let b: EulerProductValue<f64> = a_closed(3, 2, 20).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn h_values_at_one() {
        assert_eq!(h_coeffs(1).unwrap().iter().sum::<i64>(), 1);
        for k in 2..=5 {
            let s: i64 = h_coeffs(k).unwrap().iter().sum();
            assert_eq!(s, 2, "k={k}");
        }
        assert!(h_coeffs(6).is_err());
        let h4 = h_coeffs(4).unwrap();
        assert_eq!(h4.len(), 10);
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// The per-prime factor of A(1/2;0,...,0) straight from its definition, at |P| = t^2.
    fn exact_factor(k: usize, t: i64) -> BigRational {
        let x = rat(t * t);
        let y = rat(1) / rat(t); // |P|^{-1/2}
        let one = BigRational::one();
        let m = k * (k + 1) / 2;
        let mut lead = one.clone();
        for _ in 0..m {
            lead *= &one - &one / &x;
        }
        let mut minus = one.clone();
        let mut plus = one.clone();
        for _ in 0..k {
            minus /= &one - &y;
            plus /= &one + &y;
        }
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        lead * (half * (minus + plus) + &one / &x) / (&one + &one / &x)
    }

    #[test]
    fn closed_numerators_agree_with_definition_exactly() {
        // a rational identity of bounded degree checked at more points than its degree
        for k in 1..=5 {
            let h = h_coeffs(k).unwrap();
            let m = k * (k + 1) / 2;
            for t in 2..40 {
                let x = rat(t * t);
                let mut hx = rat(0);
                for &c in h {
                    hx = hx * &x + rat(c);
                }
                let mut denom = x.clone() + rat(1);
                for _ in 0..m {
                    denom *= &x;
                }
                let want = rat(1) - hx / denom;
                assert_eq!(exact_factor(k, t), want, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn closed_deviation_matches_direct() {
        let h = h_coeffs(3).unwrap();
        let x = 8.0f64;
        let hx: f64 = h.iter().fold(0.0, |acc, &c| acc * x + c as f64);
        let want = hx / (x.powi(6) * (x + 1.0));
        assert!((closed_deviation(h, x) - want).abs() < 1e-15 * want.abs());
    }

    #[test]
    fn cache_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = EulerCache::new(dir.path());
        let fresh = cache.get(NamedProduct::AClosed(2), 4, 9).unwrap();
        assert!(cache.path(4, NamedProduct::AClosed(2), 9).exists());
        let again = cache.get(NamedProduct::AClosed(2), 4, 9).unwrap();
        assert_eq!(fresh, again);
        let sum = cache.get(NamedProduct::PLogDeriv, 2, 10).unwrap();
        let sum2 = cache.get(NamedProduct::PLogDeriv, 2, 10).unwrap();
        assert_eq!(sum, sum2);
        assert_eq!(sum.value, euler_p_logderiv::<f64>(2, 10).value);
    }

    #[test]
    fn gauss_count_float_path() {
        assert_eq!(gauss_count::<f64>(2, 10), 99.0);
        let big: f64 = gauss_count(16, 20);
        assert!((big / (16f64.powi(20) / 20.0) - 1.0).abs() < 1e-9);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
    }

    #[test]
    fn works_in_f32() {
        let v: EulerProductValue<f32> = euler_p1(2, 10);
        let w: EulerProductValue<f64> = euler_p1(2, 10);
        assert!((v.value as f64 - w.value).abs() < 1e-6);
    }
}
