//! Factorization and the arithmetic functions mu, phi.

use std::sync::Arc;

use super::field::{FieldSpec, FqElement};
use super::irreducible::IrreducibleTable;
use super::poly::{monic_polys, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElement,
    /// Distinct monic primes in the fixed order, with multiplicities.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn reassemble(&self, field: FieldSpec) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (p, e)| acc.mul(&p.pow(*e, field), field))
    }
}

/// Integer Moebius function.
fn mu_int(mut n: u32) -> i64 {
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

/// Number of monic irreducibles of degree d over F_q: (1/d) sum_{e | d} mu(e) q^{d/e}.
pub fn irreducible_count(q: u64, d: u32) -> u64 {
    let total: i128 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mu_int(e) as i128 * (q as i128).pow(d / e))
        .sum();
    (total / d as i128) as u64
}

/// A field plus its irreducible table: everything needed to factor polynomials.
#[derive(Clone, Debug)]
pub struct FqContext {
    field: FieldSpec,
    table: Arc<IrreducibleTable>,
}

impl FqContext {
    pub fn new(field: FieldSpec, max_degree: usize) -> Self {
        Self::from_table(IrreducibleTable::build(field, max_degree))
    }

    pub fn from_table(table: IrreducibleTable) -> Self {
        FqContext { field: table.field(), table: Arc::new(table) }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn table(&self) -> &IrreducibleTable {
        &self.table
    }

    pub fn max_degree(&self) -> usize {
        self.table.max_degree()
    }

    pub fn irreducibles(&self, d: usize) -> &[Poly] {
        self.table.of_degree(d)
    }

    /// Trial division by the table. Exact for deg f <= 2 * max_degree + 1.
    pub fn factorize(&self, f: &Poly) -> Result<Factorization> {
        let field = self.field;
        if f.is_zero() {
            return Err(Error::Domain("cannot factor the zero polynomial".into()));
        }
        if f.deg() > 2 * self.max_degree() + 1 {
            return Err(Error::Domain(format!(
                "degree {} exceeds the irreducible table (max degree {})",
                f.deg(),
                self.max_degree()
            )));
        }
        let unit = f.leading();
        let mut rest = f.monic(field);
        let mut factors = Vec::new();
        'outer: for d in 1..=self.max_degree() {
            for p in self.table.of_degree(d) {
                if 2 * d > rest.deg() {
                    break 'outer;
                }
                let mut e = 0;
                loop {
                    let (quo, rem) = rest.div_rem(p, field)?;
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quo;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p.clone(), e));
                }
            }
        }
        if rest.deg() > 0 {
            factors.push((rest, 1));
        }
        Ok(Factorization { unit, factors })
    }

    pub fn mobius(&self, f: &Poly) -> Result<i64> {
        let fac = self.factorize(f)?;
        if fac.factors.iter().any(|(_, e)| *e > 1) {
            Ok(0)
        } else if fac.factors.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    /// phi(P^e) = |P|^{e-1} (|P| - 1), multiplied over the factorization.
    pub fn phi(&self, f: &Poly) -> Result<u128> {
        let fac = self.factorize(f)?;
        Ok(phi_of(&fac, self.field))
    }

    /// Sum of phi(f) over monic f of degree n coprime to l.
    pub fn sum_phi_coprime(&self, n: usize, l: &Poly) -> Result<u128> {
        let field = self.field;
        let mut total = 0u128;
        for f in monic_polys(field, n) {
            if Poly::gcd(&f, l, field).is_one() {
                total += self.phi(&f)?;
            }
        }
        Ok(total)
    }
}

pub fn phi_of(fac: &Factorization, field: FieldSpec) -> u128 {
    fac.factors
        .iter()
        .map(|(p, e)| {
            let norm = p.norm(field) as u128;
            norm.pow(e - 1) * (norm - 1)
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(q: u64, d: usize) -> FqContext {
        FqContext::new(FieldSpec::from_q(q).unwrap(), d)
    }

    fn p(c: &[u8]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn gauss_count_matches_enumeration() {
        for (q, dmax) in [(2u64, 8usize), (4, 4), (8, 3), (16, 2)] {
            let c = ctx(q, dmax);
            for d in 1..=dmax {
                assert_eq!(c.irreducibles(d).len() as u64, irreducible_count(q, d as u32), "q={q} d={d}");
            }
        }
        assert_eq!(irreducible_count(2, 3), 2);
    }

    #[test]
    fn factorization_examples() {
        let c = ctx(2, 3);
        let f = c.factorize(&p(&[0, 1, 1])).unwrap();
        assert_eq!(f.factors, vec![(p(&[0, 1]), 1), (p(&[1, 1]), 1)]);
        assert_eq!(c.factorize(&p(&[0, 0, 1])).unwrap().factors, vec![(p(&[0, 1]), 2)]);
        assert_eq!(c.factorize(&p(&[1, 1, 1])).unwrap().factors, vec![(p(&[1, 1, 1]), 1)]);
        assert!(c.factorize(&Poly::zero()).is_err());
    }

    #[test]
    fn mobius_phi_examples() {
        let c = ctx(2, 3);
        assert_eq!(c.mobius(&p(&[0, 0, 1])).unwrap(), 0);
        assert_eq!(c.mobius(&p(&[0, 1, 1])).unwrap(), 1);
        assert_eq!(c.phi(&p(&[0, 0, 1])).unwrap(), 2);
    }

    #[test]
    fn sum_phi_examples() {
        let c = ctx(2, 3);
        assert_eq!(c.sum_phi_coprime(2, &Poly::one()).unwrap(), 8);
        assert_eq!(c.sum_phi_coprime(1, &Poly::one()).unwrap(), 2);
        assert_eq!(c.sum_phi_coprime(1, &Poly::t()).unwrap(), 1);
    }

    #[test]
    fn sum_phi_main_term_exact_for_trivial_l() {
        // zeta_A(2)^{-1} q^{2n} = (1 - 1/q) q^{2n}
        for (q, nmax) in [(2u64, 6usize), (4, 3)] {
            let c = ctx(q, 3);
            for n in 1..=nmax {
                let main = (q as u128 - 1) * (q as u128).pow(2 * n as u32 - 1);
                assert_eq!(c.sum_phi_coprime(n, &Poly::one()).unwrap(), main);
            }
        }
    }

    proptest! {
        #[test]
        fn factorization_reassembles(coeffs in prop::collection::vec(0u8..4, 1..9)) {
            let c = ctx(4, 4);
            let f = Poly::from_coeffs(coeffs);
            prop_assume!(!f.is_zero());
            let fac = c.factorize(&f).unwrap();
            prop_assert_eq!(fac.reassemble(c.field()), f);
            prop_assert!(fac.factors.windows(2).all(|w| w[0].0 < w[1].0));
            for (pr, _) in &fac.factors {
                prop_assert!(pr.is_monic());
            }
        }
    }
}
