//! The field F_{2^m}, elements packed as bit-vectors in the power basis.

use crate::error::{Error, Result};

/// An element of F_q. Bit i is the coefficient of x^i.
pub type FqElement = u8;

/// Defining polynomial over F_2 for each supported m, bit i = coefficient of x^i.
///
/// | m | modulus     |
/// |---|-------------|
/// | 1 | x + 1       |
/// | 2 | x^2 + x + 1 |
/// | 3 | x^3 + x + 1 |
/// | 4 | x^4 + x + 1 |
pub const MODULI: [u8; 5] = [0, 0b11, 0b111, 0b1011, 0b10011];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    m: u32,
}

impl FieldSpec {
    pub fn new(m: u32) -> Result<Self> {
        if (1..=4).contains(&m) {
            Ok(FieldSpec { m })
        } else {
            Err(Error::Domain(format!("m = {m} outside the supported range 1..=4")))
        }
    }

    /// Build from the cardinality q = 2^m.
    pub fn from_q(q: u64) -> Result<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::Domain(format!("q = {q} is not a power of 2")));
        }
        Self::new(q.trailing_zeros())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        1 << self.m
    }

    pub fn modulus(&self) -> u8 {
        MODULI[self.m as usize]
    }

    /// All elements in the fixed order (the integer value of the bit-vector).
    pub fn elements(&self) -> impl Iterator<Item = FqElement> {
        0..(1u16 << self.m) as u8
    }

    #[inline]
    pub fn add(&self, a: FqElement, b: FqElement) -> FqElement {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: FqElement, b: FqElement) -> FqElement {
        let mut prod: u16 = 0;
        for i in 0..self.m {
            if (b >> i) & 1 == 1 {
                prod ^= (a as u16) << i;
            }
        }
        let modulus = self.modulus() as u16;
        for i in (self.m..2 * self.m).rev() {
            if (prod >> i) & 1 == 1 {
                prod ^= modulus << (i - self.m);
            }
        }
        prod as u8
    }

    pub fn pow(&self, a: FqElement, mut e: u64) -> FqElement {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElement) -> Option<FqElement> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.q() - 2))
        }
    }

    /// Absolute trace F_q -> F_2.
    pub fn trace(&self, a: FqElement) -> u8 {
        let mut t = 0;
        let mut x = a;
        for _ in 0..self.m {
            t ^= x;
            x = self.mul(x, x);
        }
        debug_assert!(t <= 1);
        t
    }

    /// rho(x) = x^2 + x, an additive map with kernel F_2.
    pub fn rho(&self, x: FqElement) -> FqElement {
        self.mul(x, x) ^ x
    }

    /// The first element (in the fixed order) outside rho(F_q).
    pub fn xi(&self) -> FqElement {
        let image: Vec<FqElement> = self.elements().map(|x| self.rho(x)).collect();
        self.elements()
            .find(|e| !image.contains(e))
            .expect("rho is two-to-one, so its image misses half the field")
    }
}
