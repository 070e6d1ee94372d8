//! Brute-force quantities over enumerated families, and their comparison with predictions.
//!
//! Every family is swept once into its completed L-polynomials; everything below works on
//! those integer coefficients. Integer sums are exact and so independent of the worker
//! count; float sums run in member order.

mod report;

pub use report::{compare, relative_deviation, scenario, scenario_names, CompareParams, Quantity, Report, Scenario};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{FieldSpec, FqContext, Poly};
use crate::character::CharacterEvaluator;
use crate::error::{Error, Result};
use crate::family::{enumerate_i, FamilyKind, FamilySpec};
use crate::lfunction::{trivial_sign, zeros, CentralValue, FamilyLData};
use crate::prediction::density::TestFunction;

/// Completed L-polynomials of I_n, F_n or F'_n.
pub fn family_data(q: u64, n: usize, kind: FamilyKind) -> Result<FamilyLData> {
    let ctx = FqContext::new(FieldSpec::from_q(q)?, n);
    FamilyLData::compute(&ctx, FamilySpec::new(ctx.field(), n, kind)?)
}

/// Coefficients of the non-completed polynomial (trivial factor restored).
fn full_coeffs(c: &[i64], sign: i64) -> Vec<i64> {
    let mut out = c.to_vec();
    if sign != 0 {
        out.push(0);
        for j in (1..out.len()).rev() {
            out[j] -= sign * out[j - 1];
        }
    }
    out
}

/// q^e L(1/2) = a + b sqrt(q) in integers, with e = ceil(deg / 2).
fn scaled_central(full: &[i64], q: u64) -> (i128, i128, u32) {
    let e = (full.len() as u32).div_ceil(2);
    let q = q as i128;
    let (mut a, mut b) = (0i128, 0i128);
    for (j, &c) in full.iter().enumerate() {
        let j = j as u32;
        if j % 2 == 0 {
            a += c as i128 * q.pow(e - j / 2);
        } else {
            b += c as i128 * q.pow(e - j.div_ceil(2));
        }
    }
    (a, b, e)
}

/// An exact sum over a family together with its float value.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSum {
    pub exact: CentralValue,
    pub value: f64,
}

/// sum over the family of L(1/2, chi_u)^k, exactly, as a + b q^{-1/2}.
/// For F and F' the L-value is that of the non-completed L-function (trivial factor kept).
pub fn empirical_moment_of(data: &FamilyLData, k: u32) -> Result<ExactSum> {
    let q = data.q;
    let qi = q as i128;
    let sign = trivial_sign(data.kind);
    let overflow = || Error::Numerical(format!("exact moment k = {k} overflows 128-bit integers"));
    let mut e_scale = 0u32;
    let (mut sa, mut sb) = (0i128, 0i128);
    for c in data.members() {
        let (a, b, e) = scaled_central(&full_coeffs(c, sign), q);
        e_scale = e;
        // (a + b sqrt q)^k
        let (mut pa, mut pb) = (1i128, 0i128);
        for _ in 0..k {
            let na = pa.checked_mul(a).and_then(|x| x.checked_add(pb.checked_mul(b)?.checked_mul(qi)?));
            let nb = pa.checked_mul(b).and_then(|x| x.checked_add(pb.checked_mul(a)?));
            (pa, pb) = (na.ok_or_else(overflow)?, nb.ok_or_else(overflow)?);
        }
        sa = sa.checked_add(pa).ok_or_else(overflow)?;
        sb = sb.checked_add(pb).ok_or_else(overflow)?;
    }
    // (sa + sb sqrt q) / q^{ek} = sa/q^{ek} + (sb q / q^{ek}) q^{-1/2}
    let den = num_traits::pow(BigInt::from(q), (e_scale * k) as usize);
    let exact = CentralValue {
        a: BigRational::new(BigInt::from(sa), den.clone()),
        b: BigRational::new(BigInt::from(sb) * BigInt::from(q), den),
        q,
    };
    let value = exact.to_f64();
    Ok(ExactSum { exact, value })
}

/// sum over I_n of L(1/2, chi_u)^k.
pub fn empirical_moment(k: u32, q: u64, n: usize) -> Result<ExactSum> {
    empirical_moment_of(&family_data(q, n, FamilyKind::I)?, k)
}

/// The same over F_n or F'_n.
pub fn empirical_moment_ffprime(k: u32, q: u64, n: usize, which: FamilyKind) -> Result<ExactSum> {
    if !matches!(which, FamilyKind::F | FamilyKind::Fprime) {
        return Err(Error::Domain(format!("expected family F or Fprime, got {}", which.name())));
    }
    empirical_moment_of(&family_data(q, n, which)?, k)
}

/// (1/#I_n) sum_u chi_u(m), exactly.
pub fn empirical_char_average(m: &Poly, q: u64, n: usize) -> Result<BigRational> {
    let ctx = FqContext::new(FieldSpec::from_q(q)?, n.max(m.deg()));
    if !m.is_monic() {
        return Err(Error::Domain(format!("character average needs monic m, got {m}")));
    }
    let members: Vec<_> = enumerate_i(&ctx, n)?.collect();
    let values: Vec<i64> = members
        .par_iter()
        .map(|u| Ok(CharacterEvaluator::new(u, &ctx).chi(m)?.value()))
        .collect::<Result<_>>()?;
    let total: i64 = values.iter().sum();
    Ok(BigRational::new(BigInt::from(total), BigInt::from(members.len())))
}

/// The limit a_m: prod_{P | m} (1 + 1/|P|)^{-1} when m is a square, else 0.
pub fn char_average_limit(m: &Poly, q: u64) -> Result<BigRational> {
    let ctx = FqContext::new(FieldSpec::from_q(q)?, m.deg().max(1));
    let fac = ctx.factorize(m)?;
    if fac.factors.iter().any(|(_, e)| e % 2 == 1) {
        return Ok(BigRational::zero());
    }
    Ok(fac.factors.iter().fold(BigRational::one(), |acc, (p, _)| {
        let norm = BigInt::from(p.norm(ctx.field()));
        acc * BigRational::new(norm.clone(), norm + 1)
    }))
}

/// A float sum that skipped some members.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioSum {
    pub value: Complex64,
    pub excluded: usize,
}

/// Members whose |L(1/2 + gamma)| falls below this are excluded from ratio sums.
pub const RATIO_DENOMINATOR_FLOOR: f64 = 1e-12;

/// sum over the family of L(1/2 + alpha) / L(1/2 + gamma).
pub fn empirical_ratio_of(data: &FamilyLData, alpha: Complex64, gamma: Complex64) -> RatioSum {
    let sign = trivial_sign(data.kind);
    let q = data.q as f64;
    let z_a = (-(alpha + 0.5) * q.ln()).exp();
    let z_g = (-(gamma + 0.5) * q.ln()).exp();
    let eval = |c: &[i64], z: Complex64| -> Complex64 {
        c.iter().rev().fold(Complex64::zero(), |acc, &x| acc * z + x as f64)
    };
    let mut value = Complex64::zero();
    let mut excluded = 0;
    for c in data.members() {
        let full = full_coeffs(c, sign);
        let den = eval(&full, z_g);
        if den.norm() < RATIO_DENOMINATOR_FLOOR {
            excluded += 1;
            continue;
        }
        value += eval(&full, z_a) / den;
    }
    RatioSum { value, excluded }
}

pub fn empirical_ratio(alpha: Complex64, gamma: Complex64, q: u64, n: usize) -> Result<RatioSum> {
    Ok(empirical_ratio_of(&family_data(q, n, FamilyKind::I)?, alpha, gamma))
}

/// Power sums p_1..=p_max of the inverse roots of sum_j c_j z^j (c_0 = 1), by Newton's identities.
pub fn power_sums(c: &[i64], max: usize) -> Result<Vec<i128>> {
    let mut p = vec![0i128; max + 1];
    p[0] = (c.len() - 1) as i128;
    let overflow = || Error::Numerical("power sum overflows 128-bit integers".into());
    for m in 1..=max {
        let mut v = -(m as i128) * c.get(m).copied().unwrap_or(0) as i128;
        for i in 1..m.min(c.len()) {
            v = v.checked_sub((c[i] as i128).checked_mul(p[m - i]).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        p[m] = v;
    }
    Ok(p)
}

/// sum_u sum_gamma h(gamma) with the mode sums S_m = sum_u sum_gamma e^{i m L gamma}
/// (S_m q^{m/2} is an integer, stored in `scaled_modes`).
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySum {
    pub value: f64,
    pub scaled_modes: Vec<i128>,
}

/// Sum of h over all ordinates of the completed L-functions, via power sums:
/// sum_gamma e^{i m L gamma} = p_m q^{-m/2} for the inverse roots q^{1/2} e^{i L gamma}.
pub fn empirical_density_of(data: &FamilyLData, h: &TestFunction<f64>) -> Result<DensitySum> {
    let a = h.coeffs();
    let max = a.len().saturating_sub(1);
    let mut modes = vec![0i128; max + 1];
    for c in data.members() {
        for (s, p) in modes.iter_mut().zip(power_sums(c, max)?) {
            *s += p;
        }
    }
    let q = data.q as f64;
    let value = a.iter().zip(&modes).enumerate().map(|(m, (&am, &s))| am * s as f64 * q.powf(-(m as f64) / 2.0)).sum();
    Ok(DensitySum { value, scaled_modes: modes })
}

pub fn empirical_density(h: &TestFunction<f64>, q: u64, n: usize) -> Result<DensitySum> {
    empirical_density_of(&family_data(q, n, FamilyKind::I)?, h)
}

/// The same sum taken over numerically computed zeros.
pub fn empirical_density_from_zeros(data: &FamilyLData, h: &TestFunction<f64>) -> Result<f64> {
    let l = (data.q as f64).ln();
    let per: Vec<f64> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let z = zeros(&data.l_polynomial(i, format!("member {i}")))?;
            Ok(z.ordinates.iter().map(|&g| h.eval(g, l)).sum())
        })
        .collect::<Result<_>>()?;
    Ok(per.iter().sum())
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct HistogramBin {
    pub bin_center: f64,
    pub count: u64,
    /// count / (#family * bin width); the uniform density is 1.
    pub normalized_density: f64,
}

/// Histogram of tau = gamma (2g log q) / (2 pi) over [-g, g], mirror-symmetric in its binning.
pub fn scaled_histogram(q: u64, n: usize, bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 || n < 2 {
        return Err(Error::Domain(format!("histogram needs bins >= 1 and n >= 2, got bins = {bins}, n = {n}")));
    }
    let data = family_data(q, n, FamilyKind::I)?;
    let g = data.genus as f64;
    let l = (q as f64).ln();
    let width = 2.0 * g / bins as f64;
    let per: Vec<Vec<u64>> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let z = zeros(&data.l_polynomial(i, format!("member {i}")))?;
            let mut counts = vec![0u64; bins];
            for &gamma in &z.ordinates {
                let tau = gamma * 2.0 * g * l / (2.0 * std::f64::consts::PI);
                // bin |tau| and reflect, so that gamma and -gamma land in mirrored bins even
                // when they sit on a bin edge (zeros at z = +-i q^{-1/2} often do)
                let up = (((tau.abs() + g) / width).floor() as usize).min(bins - 1);
                let b = if tau < 0.0 { bins - 1 - up } else { up };
                counts[b] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let size = data.len() as f64;
    Ok((0..bins)
        .map(|b| {
            let count = per.iter().map(|c| c[b]).sum();
            HistogramBin {
                bin_center: -g + width * (b as f64 + 0.5),
                count,
                normalized_density: count as f64 / (size * width),
            }
        })
        .collect())
}

/// Largest ||z| - q^{-1/2}| over all zeros of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleCheck {
    pub members: usize,
    pub zeros: usize,
    pub max_deviation: f64,
}

pub fn rh_check(q: u64, n: usize, kind: FamilyKind) -> Result<CircleCheck> {
    let data = family_data(q, n, kind)?;
    let r = (q as f64).powf(-0.5);
    let dev: Vec<(usize, f64)> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let z = zeros(&data.l_polynomial(i, format!("member {i}")))?;
            Ok((z.roots.len(), z.roots.iter().map(|w| (w.norm() - r).abs()).fold(0.0, f64::max)))
        })
        .collect::<Result<_>>()?;
    Ok(CircleCheck {
        members: data.len(),
        zeros: dev.iter().map(|d| d.0).sum(),
        max_deviation: dev.iter().map(|d| d.1).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::enumerate;
    use crate::lfunction::{central_value, l_star};

    #[test]
    fn moment_k0_is_family_size() {
        let m = empirical_moment(0, 2, 3).unwrap();
        assert_eq!(m.exact, CentralValue::from_integer(32, 2));
    }

    #[test]
    fn first_moment_matches_direct_character_sums() {
        // independent path: per-member character sums and BigRational central values
        for (q, n) in [(2u64, 2usize), (2, 3), (4, 2)] {
            let ctx = FqContext::new(FieldSpec::from_q(q).unwrap(), n);
            for kind in [FamilyKind::I, FamilyKind::F, FamilyKind::Fprime] {
                let spec = FamilySpec::new(ctx.field(), n, kind).unwrap();
                let mut direct = CentralValue::zero(q);
                let mut square = CentralValue::zero(q);
                for u in enumerate(&spec, &ctx).unwrap() {
                    let v = central_value(&l_star(&u, &ctx).unwrap());
                    square = square.add(&v.mul(&v));
                    direct = direct.add(&v);
                }
                let data = FamilyLData::compute(&ctx, spec).unwrap();
                assert_eq!(empirical_moment_of(&data, 1).unwrap().exact, direct, "q={q} n={n} {kind:?}");
                assert_eq!(empirical_moment_of(&data, 2).unwrap().exact, square);
            }
        }
    }

    #[test]
    fn q2_n2_first_moment_contains_t_cubed() {
        let data = family_data(2, 2, FamilyKind::I).unwrap();
        assert_eq!(data.len(), 8);
        // L* of u = T^3 is 1 + 2z^2, with central value exactly 2
        assert!(data.members().any(|c| c == [1, 0, 2]));
        let m = empirical_moment_of(&data, 1).unwrap();
        let float: f64 =
            data.members().map(|c| c.iter().enumerate().map(|(j, &x)| x as f64 * 0.5f64.powf(j as f64 / 2.0)).sum::<f64>()).sum();
        assert!((m.value - float).abs() < 1e-12);
    }

    #[test]
    fn char_average_examples() {
        let t = Poly::t();
        let t2 = Poly::from_coeffs(vec![0, 0, 1]);
        assert_eq!(empirical_char_average(&Poly::one(), 2, 3).unwrap(), BigRational::one());
        assert_eq!(char_average_limit(&t2, 2).unwrap(), BigRational::new(2.into(), 3.into()));
        assert_eq!(char_average_limit(&t, 2).unwrap(), BigRational::zero());
        // (T(T+1))^2: (2/3)^2
        let sq = Poly::from_coeffs(vec![0, 0, 1, 0, 1]);
        assert_eq!(char_average_limit(&sq, 2).unwrap(), BigRational::new(4.into(), 9.into()));
    }

    #[test]
    fn diagonal_ratio_is_family_size() {
        let data = family_data(4, 3, FamilyKind::I).unwrap();
        let r = Complex64::new(0.2, 0.1);
        let s = empirical_ratio_of(&data, r, r);
        assert_eq!(s.value, Complex64::new(data.len() as f64, 0.0));
        assert_eq!(s.excluded, 0);
    }

    #[test]
    fn power_sums_of_known_roots() {
        // (1 - 2z)(1 - 3z) = 1 - 5z + 6z^2
        let p = power_sums(&[1, -5, 6], 4).unwrap();
        assert_eq!(p, vec![2, 5, 13, 35, 97]);
    }

    #[test]
    fn density_by_power_sums_matches_zeros() {
        let h = TestFunction::Fejer(5);
        for (q, n) in [(2u64, 4usize), (4, 3)] {
            let data = family_data(q, n, FamilyKind::I).unwrap();
            let a = empirical_density_of(&data, &h).unwrap().value;
            let b = empirical_density_from_zeros(&data, &h).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs(), "q={q} n={n} {a} {b}");
            // the constant mode counts all 2g zeros
            let s = empirical_density_of(&data, &TestFunction::Cosine(vec![1.0])).unwrap();
            assert_eq!(s.scaled_modes[0], (2 * data.genus * data.len()) as i128);
        }
    }

    #[test]
    fn histogram_counts_and_symmetry() {
        let h = scaled_histogram(4, 3, 20).unwrap();
        let data = family_data(4, 3, FamilyKind::I).unwrap();
        let total: u64 = h.iter().map(|b| b.count).sum();
        assert_eq!(total as usize, 2 * data.genus * data.len());
        // conjugate zeros pair gamma with -gamma; only the self-conjugate zeros at tau = 0
        // and tau = g (bins 10 and 19) have no partner
        for i in 1..9 {
            assert_eq!(h[i].count, h[19 - i].count, "bin {i}");
        }
        // repulsion at the origin
        assert!(h[9].normalized_density < 1.0 && h[10].normalized_density < 1.0);
    }
}
