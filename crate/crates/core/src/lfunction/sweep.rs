//! Whole-family computation of prime characters and L-polynomials.
//!
//! [u, P) is additive in u, so for u = v + F the trace bit at each prime is the
//! XOR of a bit from v and a bit from F. Each bit is an F_2-linear function of
//! the packed coefficients, so every slot of the normal form gets a precomputed
//! mask over all primes of degree <= n, and a member costs a few XORs.
//! The Dirichlet series then comes from the Euler product
//! prod_P (1 - chi(P) z^{deg P})^{-1}, truncated at degree g + 1.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{complete, LPolynomial};
use crate::algebra::{residues, FqContext, Poly, ResidueField};
use crate::error::{Error, Result};
use crate::family::{f_blocks, g_members, FamilyKind, FamilySpec, TableBlock, UKind};

/// Prime characters of one family member, as bit masks over the sweep primes.
pub struct MemberChars<'a> {
    pub support: &'a [u64],
    pub trace: &'a [u64],
}

impl MemberChars<'_> {
    /// chi_u(P) for the k-th sweep prime.
    #[inline]
    pub fn chi_prime(&self, k: usize) -> i64 {
        let (w, b) = (k / 64, k % 64);
        if (self.support[w] >> b) & 1 == 1 {
            0
        } else if (self.trace[w] >> b) & 1 == 1 {
            -1
        } else {
            1
        }
    }
}

struct Piece {
    blocks: Vec<TableBlock>,
    /// Trace masks of the infinite parts paired with every table of this piece.
    inf_masks: Vec<Vec<u64>>,
}

pub struct FamilySweep {
    spec: FamilySpec,
    kind: UKind,
    genus: usize,
    primes: Vec<Poly>,
    prime_deg: Vec<usize>,
    words: usize,
    pieces: Vec<Piece>,
    /// Per (prime index of P', slot i): masks for every residue choice of A_{P', i}.
    slot_masks: HashMap<(usize, usize), Vec<Vec<u64>>>,
    size: usize,
}

impl FamilySweep {
    /// Needs irreducibles up to degree n in the context.
    pub fn new(ctx: &FqContext, spec: FamilySpec) -> Result<Self> {
        let field = ctx.field();
        let n = spec.n;
        if ctx.max_degree() < n {
            return Err(Error::Domain(format!(
                "sweep over n = {n} needs irreducibles up to degree {n}, context has {}",
                ctx.max_degree()
            )));
        }
        let kind = match spec.kind {
            FamilyKind::I => UKind::RamifiedImaginary,
            FamilyKind::F => UKind::Real,
            FamilyKind::Fprime => UKind::InertImaginary,
            _ => return Err(Error::Domain("sweeps run over I, F or F' only".into())),
        };
        let primes: Vec<Poly> = ctx.table().up_to(n).cloned().collect();
        let prime_deg: Vec<usize> = primes.iter().map(Poly::deg).collect();
        let words = primes.len().div_ceil(64).max(1);
        let index: HashMap<&Poly, usize> = primes.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let rings: Vec<ResidueField> =
            primes.iter().map(|p| ResidueField::new(p, field)).collect::<Result<_>>()?;
        let forms: Vec<u64> = rings.iter().map(ResidueField::trace_form).collect();

        // infinite part alpha + sum alpha_j T^{2j-1}: one mask per member of G_s
        let inf_mask = |alpha: u8, odd: &[u8]| -> Vec<u64> {
            let mut mask = vec![0u64; words];
            for (k, rf) in rings.iter().enumerate() {
                let mut poly = Poly::constant(alpha);
                for (j, &a) in odd.iter().enumerate() {
                    poly = poly.add(&Poly::monomial(a, 2 * j + 1));
                }
                let bit = (rf.reduce(&poly).pack(field) & forms[k]).count_ones() & 1;
                mask[k / 64] |= (bit as u64) << (k % 64);
            }
            mask
        };

        let mut pieces = Vec::new();
        match spec.kind {
            FamilyKind::I => {
                for r in 0..n {
                    let gs = g_members(field, n - r);
                    let inf_masks = gs.par_iter().map(|(a, odd)| inf_mask(*a, odd)).collect();
                    pieces.push(Piece { blocks: f_blocks(ctx, r)?, inf_masks });
                }
            }
            _ => {
                let alpha = if spec.kind == FamilyKind::Fprime { field.xi() } else { 0 };
                pieces.push(Piece { blocks: f_blocks(ctx, n)?, inf_masks: vec![inf_mask(alpha, &[])] });
            }
        }

        // which (P', i) slots occur
        let mut needed: Vec<(usize, usize)> = Vec::new();
        for piece in &pieces {
            for block in &piece.blocks {
                for (p, l) in &block.element.primes {
                    for i in 0..*l {
                        needed.push((index[p], i));
                    }
                }
            }
        }
        needed.sort_unstable();
        needed.dedup();
        let slot_masks: HashMap<(usize, usize), Vec<Vec<u64>>> = needed
            .par_iter()
            .map(|&(pi, i)| {
                let owner = &primes[pi];
                let d = owner.deg();
                // linear forms A -> Tr(A * owner^{-(2i+1)} mod P) for every other sweep prime P
                let forms: Vec<u64> = rings
                    .iter()
                    .enumerate()
                    .map(|(k, rf)| {
                        if k == pi {
                            return 0;
                        }
                        let inv = rf.invert(owner).expect("distinct primes are coprime");
                        rf.product_trace_form(&rf.pow(&inv, 2 * i as u64 + 1), d)
                    })
                    .collect();
                let masks = residues(field, d)
                    .iter()
                    .map(|a| {
                        let packed = a.pack(field);
                        let mut mask = vec![0u64; words];
                        for (k, form) in forms.iter().enumerate() {
                            let bit = (packed & form).count_ones() as u64 & 1;
                            mask[k / 64] |= bit << (k % 64);
                        }
                        mask
                    })
                    .collect();
                ((pi, i), masks)
            })
            .collect();

        let size = pieces
            .iter()
            .map(|p| p.blocks.iter().map(|b| b.len() as usize).sum::<usize>() * p.inf_masks.len())
            .sum();
        Ok(FamilySweep { spec, kind, genus: n - 1, primes, prime_deg, words, pieces, slot_masks, size })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn kind(&self) -> UKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// The sweep primes (all monic irreducibles of degree <= n, fixed order).
    pub fn primes(&self) -> &[Poly] {
        &self.primes
    }

    pub fn prime_index(&self, p: &Poly) -> Option<usize> {
        self.primes.iter().position(|x| x == p)
    }

    /// Run `visit` over all members in enumeration order. Blocks are processed in
    /// parallel; one accumulator per block is returned in block order.
    pub fn visit<A: Send>(&self, init: impl Fn() -> A + Sync, visit: impl Fn(&mut A, &MemberChars) + Sync) -> Vec<A> {
        let tasks: Vec<(&Piece, &TableBlock)> =
            self.pieces.iter().flat_map(|p| p.blocks.iter().map(move |b| (p, b))).collect();
        tasks
            .par_iter()
            .map(|(piece, block)| {
                let mut acc = init();
                let mut support = vec![0u64; self.words];
                let mut slot_tables: Vec<&[Vec<u64>]> = Vec::new();
                let mut slot_offset: Vec<usize> = Vec::new();
                for (p, l) in &block.element.primes {
                    let k = self.prime_index(p).expect("block primes are sweep primes");
                    support[k / 64] |= 1 << (k % 64);
                    for i in 0..*l {
                        slot_tables.push(&self.slot_masks[&(k, i)]);
                        // the top coefficient skips the zero residue
                        slot_offset.push(if i + 1 == *l { 1 } else { 0 });
                    }
                }
                let mut v_mask = vec![0u64; self.words];
                let mut trace = vec![0u64; self.words];
                for idx in 0..block.len() {
                    v_mask.iter_mut().for_each(|w| *w = 0);
                    for (s, d) in block.digits(idx).into_iter().enumerate() {
                        for (w, m) in v_mask.iter_mut().zip(&slot_tables[s][d + slot_offset[s]]) {
                            *w ^= m;
                        }
                    }
                    for inf in &piece.inf_masks {
                        for ((t, a), b) in trace.iter_mut().zip(&v_mask).zip(inf) {
                            *t = a ^ b;
                        }
                        visit(&mut acc, &MemberChars { support: &support, trace: &trace });
                    }
                }
                acc
            })
            .collect()
    }

    /// Dirichlet coefficients c_0..=c_{max} of the non-completed L-function from the Euler product.
    pub fn raw_coeffs(&self, mc: &MemberChars, out: &mut [i64]) {
        let n_max = out.len() - 1;
        out.fill(0);
        out[0] = 1;
        for (k, &d) in self.prime_deg.iter().enumerate() {
            if d > n_max {
                break;
            }
            let chi = mc.chi_prime(k);
            if chi == 0 {
                continue;
            }
            for n in d..=n_max {
                out[n] += chi * out[n - d];
            }
        }
    }

    /// Completed L-polynomials of every member.
    pub fn l_data(&self) -> Result<FamilyLData> {
        let g = self.genus;
        let q = self.spec.field.q();
        let kind = self.kind;
        let chunks = self.visit(
            || (Vec::<i64>::new(), None::<Error>),
            |(flat, err), mc| {
                if err.is_some() {
                    return;
                }
                let mut raw = vec![0i64; g + 2];
                self.raw_coeffs(mc, &mut raw);
                match complete(&raw, kind, g, q) {
                    Ok(c) => flat.extend_from_slice(&c),
                    Err(e) => *err = Some(e),
                }
            },
        );
        let mut coeffs = Vec::with_capacity(self.size * (2 * g + 1));
        for (flat, err) in chunks {
            if let Some(e) = err {
                return Err(e);
            }
            coeffs.extend(flat);
        }
        Ok(FamilyLData { spec: self.spec, kind, genus: g, q, coeffs })
    }
}

/// Completed L-polynomials of a whole family, flattened with stride 2g + 1.
#[derive(Clone, Debug)]
pub struct FamilyLData {
    pub spec: FamilySpec,
    pub kind: UKind,
    pub genus: usize,
    pub q: u64,
    pub coeffs: Vec<i64>,
}

impl FamilyLData {
    pub fn compute(ctx: &FqContext, spec: FamilySpec) -> Result<Self> {
        FamilySweep::new(ctx, spec)?.l_data()
    }

    pub fn stride(&self) -> usize {
        2 * self.genus + 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn member(&self, i: usize) -> &[i64] {
        &self.coeffs[i * self.stride()..(i + 1) * self.stride()]
    }

    pub fn members(&self) -> impl Iterator<Item = &[i64]> {
        self.coeffs.chunks(self.stride())
    }

    pub fn l_polynomial(&self, i: usize, key: String) -> LPolynomial {
        LPolynomial { coeffs: self.member(i).to_vec(), genus: self.genus, kind: self.kind, q: self.q, key }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;
    use crate::character::CharacterEvaluator;
    use crate::family::enumerate;
    use crate::lfunction::l_star;

    #[test]
    fn sweep_matches_direct_character_sums() {
        for (q, nmax) in [(2u64, 4usize), (4, 3)] {
            let ctx = FqContext::new(FieldSpec::from_q(q).unwrap(), nmax);
            for n in 1..=nmax {
                for kind in [FamilyKind::I, FamilyKind::F, FamilyKind::Fprime] {
                    let spec = FamilySpec::new(ctx.field(), n, kind).unwrap();
                    let data = FamilyLData::compute(&ctx, spec).unwrap();
                    let members: Vec<_> = enumerate(&spec, &ctx).unwrap().collect();
                    assert_eq!(data.len(), members.len());
                    // the direct path is slow, so sample members on the larger families
                    let step = if members.len() > 400 { 13 } else { 1 };
                    for (i, u) in members.iter().enumerate().step_by(step) {
                        let direct = l_star(u, &ctx).unwrap();
                        assert_eq!(data.member(i), &direct.coeffs[..], "q={q} n={n} {kind:?} member {i}");
                    }
                }
            }
        }
    }

    #[test]
    fn prime_characters_match_hasse() {
        let ctx = FqContext::new(FieldSpec::from_q(4).unwrap(), 3);
        let spec = FamilySpec::new(ctx.field(), 3, FamilyKind::I).unwrap();
        let sweep = FamilySweep::new(&ctx, spec).unwrap();
        let chars: Vec<Vec<i64>> = sweep
            .visit(Vec::new, |acc: &mut Vec<Vec<i64>>, mc| {
                acc.push((0..sweep.primes().len()).map(|k| mc.chi_prime(k)).collect())
            })
            .into_iter()
            .flatten()
            .collect();
        let members: Vec<_> = enumerate(&spec, &ctx).unwrap().collect();
        assert_eq!(chars.len(), members.len());
        for (u, ch) in members.iter().zip(&chars).step_by(17) {
            let mut ev = CharacterEvaluator::new(u, &ctx);
            for (k, p) in sweep.primes().iter().enumerate() {
                assert_eq!(ev.chi(p).unwrap().value(), ch[k]);
            }
        }
    }
}
