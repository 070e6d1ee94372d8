//! Zeros of integer L-polynomials: exact square-free decomposition, then
//! eigenvalues of a balanced companion matrix polished by Newton steps.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::LPolynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Zeros {
    /// Roots in z with multiplicity, sorted by angle.
    pub roots: Vec<Complex64>,
    /// theta with z = |z| e^{i theta}, in (-pi, pi].
    pub angles: Vec<f64>,
    /// gamma = -theta / log q mapped into (-pi/log q, pi/log q].
    pub ordinates: Vec<f64>,
}

type IntPoly = Vec<BigInt>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn derivative(p: &IntPoly) -> IntPoly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
}

/// Divide out the content and make the leading coefficient positive.
fn primitive(p: IntPoly) -> IntPoly {
    let p = trim(p);
    let Some(lead) = p.last() else { return p };
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let content = if lead.is_negative() { -content } else { content };
    p.into_iter().map(|c| c / &content).collect()
}

/// Pseudo-remainder of a by b.
fn prem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        r = r.iter().map(|c| c * &lb).collect();
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        r = trim(r);
    }
    r
}

fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let (mut x, mut y) = (primitive(a.clone()), primitive(b.clone()));
    while !y.is_empty() {
        let r = primitive(prem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Exact quotient a / b over Z (b must divide a).
fn exact_div(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    if r.len() <= db {
        return Vec::new();
    }
    let mut quo = vec![BigInt::zero(); r.len() - db];
    for i in (0..quo.len()).rev() {
        let c = &r[i + db] / &b[db];
        for (j, bc) in b.iter().enumerate() {
            r[i + j] -= &c * bc;
        }
        quo[i] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()), "inexact division");
    trim(quo)
}

fn sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()).collect())
}

/// Yun's algorithm: (factor, multiplicity) with a = content * prod factor^multiplicity.
fn squarefree_decomposition(a: &IntPoly) -> Vec<(IntPoly, usize)> {
    let a = primitive(a.clone());
    if a.len() <= 1 {
        return Vec::new();
    }
    let da = derivative(&a);
    let c = gcd(&a, &da);
    let mut w = exact_div(&a, &c);
    let mut y = exact_div(&da, &c);
    let mut z = sub(&y, &derivative(&w));
    let mut out = Vec::new();
    let mut mult = 1;
    while w.len() > 1 {
        let g = if z.is_empty() { w.clone() } else { gcd(&w, &z) };
        if g.len() > 1 {
            out.push((g.clone(), mult));
        }
        w = exact_div(&w, &g);
        y = exact_div(&z, &g);
        z = sub(&y, &derivative(&w));
        mult += 1;
    }
    out
}

fn horner(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::zero();
    let mut der = Complex64::zero();
    for &c in p.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// Parlett-Reinsch balancing, in place.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                cc *= radix;
                f *= radix;
            }
            while cc >= r * radix {
                cc /= radix;
                f /= radix;
            }
            if (cc + r / f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Roots of a square-free real polynomial (lowest coefficient first).
fn squarefree_roots(p: &[f64]) -> Result<Vec<Complex64>> {
    let d = p.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = p[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -p[i] / lead;
    }
    balance(&mut m);
    // the unshifted QR can stall on companion matrices of even polynomials
    let start: Vec<Complex64> = match nalgebra::Schur::try_new(m, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => aberth(p)?,
    };
    let mut roots = Vec::with_capacity(d);
    for z0 in start {
        let mut z = z0;
        for _ in 0..50 {
            let (v, dv) = horner(p, z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            z -= step;
            if step.norm() <= 1e-17 * z.norm().max(1e-300) {
                break;
            }
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Numerical(format!("root finder diverged on {p:?}")));
        }
        roots.push(z);
    }
    Ok(roots)
}

/// Aberth-Ehrlich simultaneous iteration from points on a circle of the Cauchy-bound radius.
fn aberth(p: &[f64]) -> Result<Vec<Complex64>> {
    let d = p.len() - 1;
    let lead = p[d].abs();
    let radius = p[..d].iter().map(|c| (c.abs() / lead).powf(1.0 / d as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, (2.0 * std::f64::consts::PI * k as f64 + 0.4) / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = horner(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    Err(Error::Numerical(format!("Aberth iteration did not converge on {p:?}")))
}

/// All 2g zeros of L*(z) with multiplicity.
pub fn zeros(lp: &LPolynomial) -> Result<Zeros> {
    let ip: IntPoly = lp.coeffs.iter().map(|&c| BigInt::from(c)).collect();
    let mut roots = Vec::with_capacity(2 * lp.genus);
    for (factor, mult) in squarefree_decomposition(&ip) {
        let fp: Vec<f64> = factor
            .iter()
            .map(|c| c.to_f64().ok_or_else(|| Error::Numerical(format!("coefficient overflow in {:?}", lp.coeffs))))
            .collect::<Result<_>>()?;
        let rs = squarefree_roots(&fp)
            .map_err(|e| Error::Numerical(format!("{e} (L-polynomial {:?})", lp.coeffs)))?;
        for r in rs {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    if roots.len() != 2 * lp.genus {
        return Err(Error::Numerical(format!(
            "found {} roots for degree {} polynomial {:?}",
            roots.len(),
            2 * lp.genus,
            lp.coeffs
        )));
    }
    roots.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let ln_q = (lp.q as f64).ln();
    let period = std::f64::consts::PI / ln_q;
    let angles: Vec<f64> = roots.iter().map(|z| z.arg()).collect();
    let ordinates = angles
        .iter()
        .map(|th| {
            let gamma = -th / ln_q;
            if gamma <= -period {
                gamma + 2.0 * period
            } else {
                gamma
            }
        })
        .collect();
    Ok(Zeros { roots, angles, ordinates })
}
