//! Monic irreducibles by trial division, with an optional on-disk cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::arith::irreducible_count;
use super::field::FieldSpec;
use super::poly::{monic_polys, Poly};
use crate::error::{Error, Result};

/// Environment variable consulted when no cache directory is passed explicitly.
pub const CACHE_ENV: &str = "FQLAB_CACHE_DIR";

pub fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

/// All monic irreducibles of degree 1..=max_degree, grouped by degree, each group in the fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleTable {
    field: FieldSpec,
    by_degree: Vec<Vec<Poly>>,
}

impl IrreducibleTable {
    pub fn build(field: FieldSpec, max_degree: usize) -> Self {
        let mut by_degree: Vec<Vec<Poly>> = vec![Vec::new()];
        for d in 1..=max_degree {
            let found: Vec<Poly> = monic_polys(field, d)
                .filter(|f| {
                    by_degree[1..=d / 2]
                        .iter()
                        .flatten()
                        .all(|p| !Poly::divides(p, f, field))
                })
                .collect();
            by_degree.push(found);
        }
        IrreducibleTable { field, by_degree }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn of_degree(&self, d: usize) -> &[Poly] {
        &self.by_degree[d]
    }

    /// Primes of degree <= d, by degree then fixed order.
    pub fn up_to(&self, d: usize) -> impl Iterator<Item = &Poly> {
        self.by_degree[1..=d.min(self.max_degree())].iter().flatten()
    }

    pub fn cache_path(dir: &Path, field: FieldSpec, max_degree: usize) -> PathBuf {
        dir.join(format!("irreducibles_q{}_maxdeg{}.txt", field.q(), max_degree))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        // write-then-rename so concurrent readers never see a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut out = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(out, "q={} maxdeg={}", self.field.q(), self.max_degree())?;
            for p in self.up_to(self.max_degree()) {
                writeln!(out, "{}", p.encode())?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty cache file".into()))?;
        let (q, max_degree) = parse_header(header)?;
        let field = FieldSpec::from_q(q)?;
        let mut by_degree = vec![Vec::new(); max_degree + 1];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let p = Poly::decode(line.trim(), field)?;
            let d = p.deg();
            if !p.is_monic() || d == 0 || d > max_degree {
                return Err(Error::Parse(format!("bad cache entry {line:?}")));
            }
            by_degree[d].push(p);
        }
        for (d, ps) in by_degree.iter().enumerate().skip(1) {
            if ps.len() as u64 != irreducible_count(q, d as u32) {
                return Err(Error::Parse(format!("cache holds {} primes of degree {d}", ps.len())));
            }
        }
        Ok(IrreducibleTable { field, by_degree })
    }

    /// Read the cache file for (q, max_degree) if present and valid, else build and write it.
    pub fn load_or_build(field: FieldSpec, max_degree: usize, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Ok(Self::build(field, max_degree));
        };
        let path = Self::cache_path(dir, field, max_degree);
        if path.exists() {
            if let Ok(table) = Self::read(&path) {
                if table.field == field && table.max_degree() == max_degree {
                    return Ok(table);
                }
            }
        }
        let table = Self::build(field, max_degree);
        table.write(&path)?;
        Ok(table)
    }
}

fn parse_header(header: &str) -> Result<(u64, usize)> {
    let bad = || Error::Parse(format!("bad cache header {header:?}"));
    let mut q = None;
    let mut d = None;
    for part in header.split_whitespace() {
        match part.split_once('=') {
            Some(("q", v)) => q = v.parse().ok(),
            Some(("maxdeg", v)) => d = v.parse().ok(),
            _ => return Err(bad()),
        }
    }
    Ok((q.ok_or_else(bad)?, d.ok_or_else(bad)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let f2 = FieldSpec::from_q(2).unwrap();
        let t = IrreducibleTable::build(f2, 3);
        assert_eq!(t.of_degree(1), &[Poly::t(), Poly::from_coeffs(vec![1, 1])]);
        assert_eq!(t.of_degree(2), &[Poly::from_coeffs(vec![1, 1, 1])]);
        assert_eq!(t.of_degree(3).len(), 2);
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let f4 = FieldSpec::from_q(4).unwrap();
        let built = IrreducibleTable::load_or_build(f4, 3, Some(dir.path())).unwrap();
        let path = IrreducibleTable::cache_path(dir.path(), f4, 3);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("q=4 maxdeg=3\n"));
        assert_eq!(IrreducibleTable::read(&path).unwrap(), built);
        assert_eq!(IrreducibleTable::load_or_build(f4, 3, Some(dir.path())).unwrap(), built);
    }

    #[test]
    fn corrupt_cache_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let f2 = FieldSpec::from_q(2).unwrap();
        let path = IrreducibleTable::cache_path(dir.path(), f2, 4);
        fs::write(&path, "q=2 maxdeg=4\n01\n").unwrap();
        assert!(IrreducibleTable::read(&path).is_err());
        let t = IrreducibleTable::load_or_build(f2, 4, Some(dir.path())).unwrap();
        assert_eq!(t, IrreducibleTable::build(f2, 4));
    }
}
