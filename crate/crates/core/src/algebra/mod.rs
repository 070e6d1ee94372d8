//! Exact arithmetic in F_{2^m} and F_q[T].

pub mod arith;
pub mod field;
pub mod irreducible;
pub mod poly;
pub mod residue;

pub use arith::{irreducible_count, phi_of, Factorization, FqContext};
pub use field::{FieldSpec, FqElement, MODULI};
pub use irreducible::{default_cache_dir, IrreducibleTable, CACHE_ENV};
pub use poly::{monic_polys, residues, MonicPolys, Poly};
pub use residue::ResidueField;
