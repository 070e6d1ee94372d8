//! Normalized quadratic discriminants and the families B_n, F_n, F'_n, G_s, I_n.
//!
//! Every u is stored in its normal form
//! u = sum_{P | M} sum_{i <= l_P} A_{P,i} / P^{2i-1} + alpha + sum_j alpha_j T^{2j-1},
//! which is unique, so the serialized key doubles as a dedup/hash key.

use std::fmt;

use crate::algebra::{residues, FieldSpec, FqContext, FqElement, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UKind {
    RamifiedImaginary,
    Real,
    InertImaginary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    B,
    F,
    Fprime,
    G,
    I,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(FamilyKind::B),
            "F" | "f" => Ok(FamilyKind::F),
            "Fprime" | "fprime" | "F'" => Ok(FamilyKind::Fprime),
            "G" | "g" => Ok(FamilyKind::G),
            "I" | "i" => Ok(FamilyKind::I),
            _ => Err(Error::Domain(format!("unknown family {s:?} (expected B, F, Fprime, G or I)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::B => "B",
            FamilyKind::F => "F",
            FamilyKind::Fprime => "Fprime",
            FamilyKind::G => "G",
            FamilyKind::I => "I",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub field: FieldSpec,
    pub n: usize,
    pub kind: FamilyKind,
}

impl FamilySpec {
    pub fn new(field: FieldSpec, n: usize, kind: FamilyKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("family index n must be at least 1".into()));
        }
        Ok(FamilySpec { field, n, kind })
    }

    /// Cardinality from the closed formulas.
    pub fn expected_size(&self) -> u128 {
        let q = self.field.q() as u128;
        let n = self.n as u32;
        match self.kind {
            FamilyKind::B => q.pow(n),
            FamilyKind::F | FamilyKind::Fprime => (q - 1) * q.pow(2 * n - 1),
            FamilyKind::G => 2 * (q - 1) * q.pow(n - 1),
            FamilyKind::I => 2 * (q - 1) * q.pow(2 * n - 2),
        }
    }
}

/// The part of u with poles at a finite prime P: coefficients A_{P,1..l_P}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePart {
    pub prime: Poly,
    pub coeffs: Vec<Poly>,
}

impl FinitePart {
    pub fn ell(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Discriminant {
    pub finite_part: Vec<FinitePart>,
    /// alpha, either 0 or xi.
    pub alpha: FqElement,
    /// alpha_1..alpha_s; empty unless ramified at infinity.
    pub odd_coeffs: Vec<FqElement>,
}

impl Discriminant {
    pub fn r(&self) -> usize {
        self.finite_part.iter().map(|fp| fp.ell() * fp.prime.deg()).sum()
    }

    pub fn s(&self) -> usize {
        self.odd_coeffs.len()
    }

    /// Half the degree of D_u.
    pub fn n(&self) -> usize {
        self.r() + self.s()
    }

    pub fn genus(&self) -> usize {
        self.n().saturating_sub(1)
    }

    pub fn xi_flag(&self) -> bool {
        self.alpha != 0
    }

    pub fn kind(&self) -> UKind {
        if !self.odd_coeffs.is_empty() {
            UKind::RamifiedImaginary
        } else if self.alpha == 0 {
            UKind::Real
        } else {
            UKind::InertImaginary
        }
    }

    /// alpha + sum alpha_j T^{2j-1}
    pub fn infinite_part(&self) -> Poly {
        let mut coeffs = vec![0u8; (2 * self.s()).max(1)];
        coeffs[0] = self.alpha;
        for (j, &a) in self.odd_coeffs.iter().enumerate() {
            coeffs[2 * j + 1] = a;
        }
        Poly::from_coeffs(coeffs)
    }

    /// M = prod P^{2 l_P - 1}
    pub fn m_poly(&self, field: FieldSpec) -> Poly {
        self.finite_part
            .iter()
            .fold(Poly::one(), |acc, fp| acc.mul(&fp.prime.pow(2 * fp.ell() as u32 - 1, field), field))
    }

    pub fn in_support(&self, p: &Poly) -> bool {
        self.finite_part.iter().any(|fp| &fp.prime == p)
    }

    /// Serialized key `r|M|coeffs|F`: coefficient lists per prime are comma separated,
    /// primes separated by semicolons.
    pub fn key(&self, field: FieldSpec) -> String {
        let coeffs = self
            .finite_part
            .iter()
            .map(|fp| fp.coeffs.iter().map(Poly::encode).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";");
        format!("{}|{}|{}|{}", self.r(), self.m_poly(field).encode(), coeffs, self.infinite_part().encode())
    }

    /// Inverse of `key`.
    pub fn from_key(key: &str, ctx: &FqContext) -> Result<Self> {
        let field = ctx.field();
        let parts: Vec<&str> = key.split('|').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("bad discriminant key {key:?}")));
        }
        let m = Poly::decode(parts[1], field)?;
        let fac = ctx.factorize(&m)?;
        let tables: Vec<&str> = if parts[2].is_empty() { Vec::new() } else { parts[2].split(';').collect() };
        if tables.len() != fac.factors.len() {
            return Err(Error::Parse(format!("key {key:?}: {} primes but {} tables", fac.factors.len(), tables.len())));
        }
        let mut finite_part = Vec::new();
        for ((prime, e), table) in fac.factors.into_iter().zip(tables) {
            let coeffs = table.split(',').map(|c| Poly::decode(c, field)).collect::<Result<Vec<_>>>()?;
            if e % 2 == 0 || coeffs.len() != (e as usize + 1) / 2 {
                return Err(Error::Parse(format!("key {key:?}: valuation {e} inconsistent with table")));
            }
            finite_part.push(FinitePart { prime, coeffs });
        }
        let inf = Poly::decode(parts[3], field)?;
        let alpha = inf.coeff(0);
        let s = (inf.deg() + 1) / 2;
        let odd_coeffs = if inf.deg() == 0 { Vec::new() } else { (0..s).map(|j| inf.coeff(2 * j + 1)).collect() };
        let u = Discriminant { finite_part, alpha, odd_coeffs };
        if u.r().to_string() != parts[0] {
            return Err(Error::Parse(format!("key {key:?}: r does not match M")));
        }
        Ok(u)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for fp in &self.finite_part {
            for (i, a) in fp.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    terms.push(format!("({a})/({})^{}", fp.prime, 2 * i + 1));
                }
            }
        }
        let inf = self.infinite_part();
        if !inf.is_zero() || terms.is_empty() {
            terms.push(inf.to_string());
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// An element of B_n: M = prod P^{2 l_P - 1} with sum l_P deg P = n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BElement {
    pub m: Poly,
    /// (P, l_P) in the fixed prime order.
    pub primes: Vec<(Poly, usize)>,
}

impl BElement {
    /// Number of coefficient tables, i.e. phi(prod P^{l_P}).
    pub fn table_count(&self, field: FieldSpec) -> u64 {
        self.primes
            .iter()
            .map(|(p, l)| {
                let norm = p.norm(field);
                norm.pow(*l as u32 - 1) * (norm - 1)
            })
            .product()
    }
}

/// B_n in the fixed order of M. M <-> prod P^{l_P} is a bijection onto monic polynomials of degree n.
pub fn enumerate_b(ctx: &FqContext, n: usize) -> Result<Vec<BElement>> {
    let field = ctx.field();
    let mut out = Vec::new();
    for base in crate::algebra::monic_polys(field, n) {
        let fac = ctx.factorize(&base)?;
        let primes: Vec<(Poly, usize)> = fac.factors.into_iter().map(|(p, e)| (p, e as usize)).collect();
        let m = primes
            .iter()
            .fold(Poly::one(), |acc, (p, l)| acc.mul(&p.pow(2 * *l as u32 - 1, field), field));
        out.push(BElement { m, primes });
    }
    out.sort_by(|a, b| a.m.cmp(&b.m));
    Ok(out)
}

/// Coefficient tables over one M, decoded from a mixed-radix index (first slot most significant).
#[derive(Clone, Debug)]
pub struct TableBlock {
    pub element: BElement,
    /// Choices per slot, one slot per (P, i); the last slot of each prime excludes 0.
    slot_choices: Vec<Vec<Poly>>,
    /// Index of the prime owning each slot.
    slot_prime: Vec<usize>,
}

impl TableBlock {
    pub fn new(element: BElement, field: FieldSpec) -> Self {
        let mut slot_choices = Vec::new();
        let mut slot_prime = Vec::new();
        for (pi, (p, l)) in element.primes.iter().enumerate() {
            let all = residues(field, p.deg());
            for i in 0..*l {
                let choices = if i + 1 == *l { all[1..].to_vec() } else { all.clone() };
                slot_choices.push(choices);
                slot_prime.push(pi);
            }
        }
        TableBlock { element, slot_choices, slot_prime }
    }

    pub fn len(&self) -> u64 {
        self.slot_choices.iter().map(|c| c.len() as u64).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slot_choices(&self) -> &[Vec<Poly>] {
        &self.slot_choices
    }

    pub fn slot_prime(&self) -> &[usize] {
        &self.slot_prime
    }

    /// Per-slot choice indices of the idx-th table.
    pub fn digits(&self, mut idx: u64) -> Vec<usize> {
        let mut digits = vec![0; self.slot_choices.len()];
        for (d, choices) in digits.iter_mut().zip(&self.slot_choices).rev() {
            let base = choices.len() as u64;
            *d = (idx % base) as usize;
            idx /= base;
        }
        digits
    }

    pub fn finite_part(&self, idx: u64) -> Vec<FinitePart> {
        let digits = self.digits(idx);
        let mut parts: Vec<FinitePart> = self
            .element
            .primes
            .iter()
            .map(|(p, _)| FinitePart { prime: p.clone(), coeffs: Vec::new() })
            .collect();
        for (slot, &d) in digits.iter().enumerate() {
            parts[self.slot_prime[slot]].coeffs.push(self.slot_choices[slot][d].clone());
        }
        parts
    }
}

/// F_r split into per-M blocks, in the fixed order. F_0 is a single empty block.
pub fn f_blocks(ctx: &FqContext, r: usize) -> Result<Vec<TableBlock>> {
    if r == 0 {
        let unit = BElement { m: Poly::one(), primes: Vec::new() };
        return Ok(vec![TableBlock::new(unit, ctx.field())]);
    }
    Ok(enumerate_b(ctx, r)?.into_iter().map(|b| TableBlock::new(b, ctx.field())).collect())
}

/// (alpha, alpha_1..alpha_s) for every F in G_s, in the fixed order.
pub fn g_members(field: FieldSpec, s: usize) -> Vec<(FqElement, Vec<FqElement>)> {
    let xi = field.xi();
    let q = field.q() as usize;
    let mut out = Vec::new();
    for alpha in [0, xi] {
        let count = q.pow(s as u32 - 1) * (q - 1);
        for mut idx in 0..count {
            let mut coeffs = vec![0u8; s];
            coeffs[s - 1] = (idx % (q - 1)) as u8 + 1;
            idx /= q - 1;
            for c in coeffs[..s - 1].iter_mut().rev() {
                *c = (idx % q) as u8;
                idx /= q;
            }
            out.push((alpha, coeffs));
        }
    }
    out
}

pub fn enumerate_g(field: FieldSpec, s: usize) -> Result<Vec<Poly>> {
    if s == 0 {
        return Err(Error::Domain("G_s needs s >= 1".into()));
    }
    Ok(g_members(field, s)
        .into_iter()
        .map(|(alpha, odd)| Discriminant { finite_part: Vec::new(), alpha, odd_coeffs: odd }.infinite_part())
        .collect())
}

fn f_stream(ctx: &FqContext, n: usize, alpha: FqElement) -> Result<impl Iterator<Item = Discriminant>> {
    let blocks = f_blocks(ctx, n)?;
    Ok(blocks.into_iter().flat_map(move |b| {
        (0..b.len()).map(move |i| Discriminant { finite_part: b.finite_part(i), alpha, odd_coeffs: Vec::new() })
    }))
}

pub fn enumerate_f(ctx: &FqContext, n: usize) -> Result<impl Iterator<Item = Discriminant>> {
    check_n(n)?;
    f_stream(ctx, n, 0)
}

pub fn enumerate_fprime(ctx: &FqContext, n: usize) -> Result<impl Iterator<Item = Discriminant>> {
    check_n(n)?;
    f_stream(ctx, n, ctx.field().xi())
}

/// I_n = union over r + s = n, s >= 1 of F_r + G_s, ordered by (r, M, table, F).
pub fn enumerate_i(ctx: &FqContext, n: usize) -> Result<impl Iterator<Item = Discriminant>> {
    check_n(n)?;
    let field = ctx.field();
    let mut pieces = Vec::new();
    for r in 0..n {
        let gs = g_members(field, n - r);
        pieces.push((f_blocks(ctx, r)?, gs));
    }
    Ok(pieces.into_iter().flat_map(|(blocks, gs)| {
        blocks.into_iter().flat_map(move |b| {
            let gs = gs.clone();
            (0..b.len()).flat_map(move |i| {
                let fin = b.finite_part(i);
                gs.clone().into_iter().map(move |(alpha, odd)| Discriminant {
                    finite_part: fin.clone(),
                    alpha,
                    odd_coeffs: odd,
                })
            })
        })
    }))
}

pub fn enumerate(spec: &FamilySpec, ctx: &FqContext) -> Result<Box<dyn Iterator<Item = Discriminant>>> {
    Ok(match spec.kind {
        FamilyKind::F => Box::new(enumerate_f(ctx, spec.n)?),
        FamilyKind::Fprime => Box::new(enumerate_fprime(ctx, spec.n)?),
        FamilyKind::I => Box::new(enumerate_i(ctx, spec.n)?),
        FamilyKind::B | FamilyKind::G => {
            return Err(Error::Domain("B_n and G_s hold polynomials, not discriminants".into()))
        }
    })
}

/// Enumerated size; B and G are counted directly, F/F'/I through their block structure.
pub fn count(spec: &FamilySpec, ctx: &FqContext) -> Result<u128> {
    let field = spec.field;
    let f_size = |r: usize| -> Result<u128> {
        Ok(f_blocks(ctx, r)?.iter().map(|b| b.len() as u128).sum())
    };
    match spec.kind {
        FamilyKind::B => Ok(enumerate_b(ctx, spec.n)?.len() as u128),
        FamilyKind::G => Ok(g_members(field, spec.n).len() as u128),
        FamilyKind::F | FamilyKind::Fprime => f_size(spec.n),
        FamilyKind::I => {
            let mut total = 0;
            for r in 0..spec.n {
                total += f_size(r)? * g_members(field, spec.n - r).len() as u128;
            }
            Ok(total)
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("family index n must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn genus(u: &Discriminant) -> usize {
    u.genus()
}
