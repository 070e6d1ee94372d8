//! Dense polynomials over F_q, coefficients lowest degree first.

use std::cmp::Ordering;
use std::fmt;

use super::field::{FieldSpec, FqElement};
use crate::error::{Error, Result};

/// A polynomial in F_q[T]. The coefficient vector never has a trailing zero,
/// so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FqElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    /// The generator T.
    pub fn t() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: FqElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// c T^d
    pub fn monomial(c: FqElement, d: usize) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FqElement>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FqElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElement {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// sgn(f), the leading coefficient (0 for the zero polynomial).
    pub fn leading(&self) -> FqElement {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// |f| = q^deg f
    pub fn norm(&self, field: FieldSpec) -> u64 {
        field.q().pow(self.deg() as u32)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) ^ other.coeff(i)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: FqElement, field: FieldSpec) -> Poly {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= field.mul(a, b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u32, field: FieldSpec) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, field);
            }
        }
        acc
    }

    /// Euclidean division. Errors on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly, field: FieldSpec) -> Result<(Poly, Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
        let lead_inv = field.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![0; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = field.mul(c, lead_inv);
            quot[i - dd] = factor;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] ^= field.mul(factor, b);
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, field: FieldSpec) -> Result<Poly> {
        Ok(self.div_rem(divisor, field)?.1)
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn divides(divisor: &Poly, f: &Poly, field: FieldSpec) -> bool {
        matches!(f.rem(divisor, field), Ok(r) if r.is_zero())
    }

    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self, field: FieldSpec) -> Poly {
        match field.inv(self.leading()) {
            Some(inv) => self.scale(inv, field),
            None => Poly::zero(),
        }
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly, field: FieldSpec) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y, field).expect("y nonzero");
            x = y;
            y = r;
        }
        x.monic(field)
    }

    /// One base-q digit per coefficient, lowest degree first (hex digits, so q <= 16).
    /// The zero polynomial encodes as "0".
    pub fn encode(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|&c| std::char::from_digit(c as u32, 16).expect("q <= 16"))
            .collect()
    }

    pub fn decode(s: &str, field: FieldSpec) -> Result<Poly> {
        let coeffs = s
            .chars()
            .map(|ch| match ch.to_digit(16) {
                Some(d) if (d as u64) < field.q() => Ok(d as u8),
                _ => Err(Error::Parse(format!("bad coefficient digit {ch:?} in {s:?} for q = {}", field.q()))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// Bit m*j + b holds bit b of coefficient j.
    pub fn pack(&self, field: FieldSpec) -> u64 {
        let m = field.m();
        assert!(self.coeffs.len() as u32 * m <= 64, "polynomial too long to pack");
        self.coeffs
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &c)| acc | ((c as u64) << (m * j as u32)))
    }

    pub fn unpack(bits: u64, len: usize, field: FieldSpec) -> Poly {
        let m = field.m();
        let mask = (1u64 << m) - 1;
        Self::from_coeffs((0..len).map(|j| ((bits >> (m * j as u32)) & mask) as u8).collect())
    }
}

/// Degree first, then lexicographic on (c_0, c_1, ...).
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { format!("{c:x}") };
            let var = match i {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{i}"),
            };
            let sep = if !coef.is_empty() && !var.is_empty() { "*" } else { "" };
            terms.push(format!("{coef}{sep}{var}"));
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Monic polynomials of degree d in the fixed order.
pub struct MonicPolys {
    field: FieldSpec,
    d: usize,
    next: u64,
    total: u64,
}

impl Iterator for MonicPolys {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.total {
            return None;
        }
        let q = self.field.q();
        let mut idx = self.next;
        self.next += 1;
        // c_0 is the most significant digit so that the index order is lexicographic
        let mut coeffs = vec![0u8; self.d + 1];
        for j in (0..self.d).rev() {
            coeffs[j] = (idx % q) as u8;
            idx /= q;
        }
        coeffs[self.d] = 1;
        Some(Poly { coeffs })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonicPolys {}

pub fn monic_polys(field: FieldSpec, d: usize) -> MonicPolys {
    MonicPolys { field, d, next: 0, total: field.q().pow(d as u32) }
}

/// All polynomials of degree < d (including zero), in the fixed order.
pub fn residues(field: FieldSpec, d: usize) -> Vec<Poly> {
    let q = field.q();
    let mut out: Vec<Poly> = (0..q.pow(d as u32))
        .map(|mut idx| {
            let mut coeffs = vec![0u8; d];
            for c in coeffs.iter_mut() {
                *c = (idx % q) as u8;
                idx /= q;
            }
            Poly::from_coeffs(coeffs)
        })
        .collect();
    out.sort();
    out
}
