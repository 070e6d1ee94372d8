//! The Hasse symbol [u,P), the quadratic symbol {u/N} and the character chi_u.

use std::collections::HashMap;

use crate::algebra::{FieldSpec, FqContext, Poly, ResidueField};
use crate::error::{Error, Result};
use crate::family::Discriminant;

/// A value in {-1, 0, +1}; 0 when the denominator condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolValue(i8);

impl SymbolValue {
    pub const ZERO: SymbolValue = SymbolValue(0);
    pub const PLUS: SymbolValue = SymbolValue(1);
    pub const MINUS: SymbolValue = SymbolValue(-1);

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Self::PLUS
        } else {
            Self::MINUS
        }
    }

    pub fn value(self) -> i64 {
        self.0 as i64
    }
}

impl std::ops::Mul for SymbolValue {
    type Output = SymbolValue;
    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue(self.0 * rhs.0)
    }
}

/// The image of u in F_q[T]/(P). Errors when P divides the denominator.
pub fn reduce_u(u: &Discriminant, rf: &ResidueField) -> Result<Poly> {
    let p = rf.modulus();
    if u.in_support(p) {
        return Err(Error::Denominator(p.to_string()));
    }
    let mut acc = rf.reduce(&u.infinite_part());
    for fp in &u.finite_part {
        let inv = rf.invert(&fp.prime)?;
        for (i, a) in fp.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let w = rf.pow(&inv, 2 * i as u64 + 1);
            acc = acc.add(&rf.mul(a, &w));
        }
    }
    Ok(acc)
}

/// [u,P): 0 if X^2 + X = u (mod P) is solvable, 1 otherwise.
pub fn hasse(u: &Discriminant, p: &Poly, field: FieldSpec) -> Result<u8> {
    let rf = ResidueField::new(p, field)?;
    let image = reduce_u(u, &rf)?;
    Ok(rf.trace_to_f2(&image))
}

/// chi_u(f) = {u/f} for monic f, via the factorization of f.
pub fn chi(u: &Discriminant, f: &Poly, ctx: &FqContext) -> Result<SymbolValue> {
    if !f.is_monic() {
        return Err(Error::Domain(format!("chi needs a monic argument, got {f}")));
    }
    let fac = ctx.factorize(f)?;
    let mut bit = 0u8;
    for (p, e) in &fac.factors {
        if u.in_support(p) {
            return Ok(SymbolValue::ZERO);
        }
        if e % 2 == 1 {
            bit ^= hasse(u, p, ctx.field())?;
        }
    }
    Ok(SymbolValue::from_bit(bit))
}

/// chi_u with a per-prime memo of Hasse symbols, for repeated evaluation at one u.
pub struct CharacterEvaluator<'a> {
    u: &'a Discriminant,
    ctx: &'a FqContext,
    memo: HashMap<Poly, Option<u8>>,
}

impl<'a> CharacterEvaluator<'a> {
    pub fn new(u: &'a Discriminant, ctx: &'a FqContext) -> Self {
        CharacterEvaluator { u, ctx, memo: HashMap::new() }
    }

    /// None when P divides the denominator of u.
    pub fn prime_symbol(&mut self, p: &Poly) -> Result<Option<u8>> {
        if let Some(v) = self.memo.get(p) {
            return Ok(*v);
        }
        let v = if self.u.in_support(p) { None } else { Some(hasse(self.u, p, self.ctx.field())?) };
        self.memo.insert(p.clone(), v);
        Ok(v)
    }

    pub fn chi(&mut self, f: &Poly) -> Result<SymbolValue> {
        let fac = self.ctx.factorize(f)?;
        let mut bit = 0u8;
        for (p, e) in &fac.factors {
            match self.prime_symbol(p)? {
                None => return Ok(SymbolValue::ZERO),
                Some(b) => bit ^= b * (*e as u8 & 1),
            }
        }
        Ok(SymbolValue::from_bit(bit))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{monic_polys, residues};
    use crate::family::{enumerate_f, enumerate_i};

    fn p(c: &[u8]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    fn t3() -> Discriminant {
        Discriminant { finite_part: Vec::new(), alpha: 0, odd_coeffs: vec![0, 1] }
    }

    #[test]
    fn hasse_examples() {
        let f2 = FieldSpec::from_q(2).unwrap();
        assert_eq!(hasse(&t3(), &Poly::t(), f2).unwrap(), 0);
        assert_eq!(hasse(&t3(), &p(&[1, 1]), f2).unwrap(), 1);
        let ctx = FqContext::new(f2, 3);
        let u = enumerate_f(&ctx, 1).unwrap().next().unwrap();
        assert!(matches!(hasse(&u, &Poly::t(), f2), Err(Error::Denominator(_))));
    }

    #[test]
    fn chi_examples() {
        let ctx = FqContext::new(FieldSpec::from_q(2).unwrap(), 3);
        let u = t3();
        assert_eq!(chi(&u, &Poly::one(), &ctx).unwrap(), SymbolValue::PLUS);
        assert_eq!(chi(&u, &p(&[0, 1, 1]), &ctx).unwrap(), SymbolValue::MINUS);
        let sq = p(&[1, 1]).pow(2, ctx.field());
        assert_eq!(chi(&u, &sq, &ctx).unwrap(), SymbolValue::PLUS);
    }

    #[test]
    fn multiplicative_over_i2() {
        let ctx = FqContext::new(FieldSpec::from_q(2).unwrap(), 3);
        let field = ctx.field();
        let polys: Vec<Poly> = (0..=3).flat_map(|d| monic_polys(field, d)).collect();
        for u in enumerate_i(&ctx, 2).unwrap() {
            let mut ev = CharacterEvaluator::new(&u, &ctx);
            for f in &polys {
                for g in &polys {
                    let lhs = ev.chi(&f.mul(g, field)).unwrap();
                    assert_eq!(lhs, ev.chi(f).unwrap() * ev.chi(g).unwrap());
                    assert_eq!(lhs, chi(&u, &f.mul(g, field), &ctx).unwrap());
                }
            }
        }
    }

    #[test]
    fn additive_in_u_and_exhaustive_solvability() {
        for q in [2u64, 4] {
            let ctx = FqContext::new(FieldSpec::from_q(q).unwrap(), 3);
            let field = ctx.field();
            let members: Vec<Discriminant> = enumerate_i(&ctx, 2).unwrap().collect();
            for d in 1..=3 {
                for pr in ctx.irreducibles(d) {
                    let rf = ResidueField::new(pr, field).unwrap();
                    let squares: Vec<Poly> = residues(field, d).iter().map(|x| rf.mul(x, x).add(x)).collect();
                    for (idx, u) in members.iter().enumerate().step_by(7) {
                        let Ok(image) = reduce_u(u, &rf) else { continue };
                        let h = hasse(u, pr, field).unwrap();
                        assert_eq!(h == 0, squares.contains(&image));
                        // the infinite parts of I_2 members are polynomials, so the sum of two is a valid u
                        let v = &members[(idx * 5 + 3) % members.len()];
                        if v.in_support(pr) {
                            continue;
                        }
                        let mut w = u.clone();
                        w.finite_part.extend(v.finite_part.iter().cloned());
                        let sum_inf = u.infinite_part().add(&v.infinite_part());
                        w.alpha = sum_inf.coeff(0);
                        w.odd_coeffs = (0..(sum_inf.deg() + 1) / 2).map(|j| sum_inf.coeff(2 * j + 1)).collect();
                        if w.finite_part.len() > 1 && w.finite_part[0].prime == w.finite_part[1].prime {
                            continue;
                        }
                        let hw = rf.trace_to_f2(&reduce_u(&w, &rf).unwrap());
                        assert_eq!(hw, h ^ hasse(v, pr, field).unwrap());
                    }
                }
            }
        }
    }
}
