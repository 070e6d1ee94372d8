//! The residue field F_q[T]/(P) for a monic irreducible P.

use super::field::FieldSpec;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ResidueField {
    field: FieldSpec,
    modulus: Poly,
    degree: usize,
}

impl ResidueField {
    pub fn new(modulus: &Poly, field: FieldSpec) -> Result<Self> {
        if !modulus.is_monic() || modulus.deg() == 0 {
            return Err(Error::Domain(format!("residue modulus {modulus} must be monic of positive degree")));
        }
        Ok(ResidueField { field, modulus: modulus.clone(), degree: modulus.deg() })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of bits in a packed residue.
    pub fn bits(&self) -> u32 {
        self.field.m() * self.degree as u32
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        a.rem(&self.modulus, self.field).expect("modulus nonzero")
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&a.mul(b, self.field))
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut base = self.reduce(a);
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn invert(&self, a: &Poly) -> Result<Poly> {
        let field = self.field;
        let a = self.reduce(a);
        if a.is_zero() {
            return Err(Error::Domain(format!("{} is not invertible modulo {}", a, self.modulus)));
        }
        let (mut r0, mut r1) = (self.modulus.clone(), a);
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quo, rem) = r0.div_rem(&r1, field)?;
            let s2 = s0.add(&quo.mul(&s1, field));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.deg() != 0 {
            return Err(Error::Domain(format!("modulus {} is not irreducible", self.modulus)));
        }
        let c = field.inv(r0.leading()).expect("nonzero constant");
        Ok(self.reduce(&s0.scale(c, field)))
    }

    /// Absolute trace down to F_2: the sum of a^{2^i} for i < m * deg P.
    pub fn trace_to_f2(&self, a: &Poly) -> u8 {
        let mut x = self.reduce(a);
        let mut acc = Poly::zero();
        for _ in 0..self.bits() {
            acc = acc.add(&x);
            x = self.mul(&x, &x);
        }
        debug_assert!(acc.deg() == 0 && acc.leading() <= 1, "trace left F_2: {acc}");
        acc.leading()
    }

    /// The trace as an F_2-linear form on packed residues: bit i is the trace of basis element i.
    pub fn trace_form(&self) -> u64 {
        let m = self.field.m();
        let mut form = 0u64;
        for j in 0..self.degree {
            for b in 0..m {
                let basis = Poly::monomial(1 << b, j);
                form |= (self.trace_to_f2(&basis) as u64) << (m * j as u32 + b);
            }
        }
        form
    }

    /// For fixed w, the linear form a -> Tr(a * w) on packed inputs of `len` coefficients.
    pub fn product_trace_form(&self, w: &Poly, len: usize) -> u64 {
        let m = self.field.m();
        assert!(len as u32 * m <= 64);
        let form = self.trace_form();
        let mut out = 0u64;
        for j in 0..len {
            for b in 0..m {
                let prod = self.mul(&Poly::monomial(1 << b, j), w);
                let bit = (prod.pack(self.field) & form).count_ones() & 1;
                out |= (bit as u64) << (m * j as u32 + b);
            }
        }
        out
    }
}
