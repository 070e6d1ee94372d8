//! Pairing empirical sums with predictions, and the named comparison scenarios.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{
    char_average_limit, empirical_char_average, empirical_density_of, empirical_moment_of, empirical_ratio_of,
    family_data,
};
use crate::algebra::{FieldSpec, Poly};
use crate::error::{Error, Result};
use crate::family::FamilyKind;
use crate::prediction::density::{density_prediction, TestFunction};
use crate::prediction::ratios::ratio_prediction;
use crate::prediction::{default_truncation, first_moment_main_term, moment_prediction};

/// One comparison row. Columns absent for a kind serialize as null (JSON) or empty (CSV).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub q: u64,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    /// test function id for density rows, the polynomial m for character averages
    pub h: Option<String>,
    #[serde(rename = "D")]
    pub d: Option<usize>,
    pub empirical: f64,
    pub predicted: f64,
    pub relative_deviation: f64,
    pub family_size: u64,
    pub excluded: usize,
    pub seconds: Option<f64>,
    /// exact empirical value where available
    pub exact: Option<String>,
}

pub fn relative_deviation(empirical: f64, predicted: f64) -> f64 {
    (empirical - predicted).abs() / predicted.abs().max(1e-300)
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// Write reports as CSV with a header row.
    pub fn write_csv<W: Write>(reports: &[Report], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in reports {
            w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// What to compare.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    /// k-th moment of L(1/2) over I_n; over F_n / F'_n only k = 1 has a prediction.
    Moment { k: usize, family: FamilyKind },
    CharAverage { m: Poly },
    Ratio { alpha: f64, gamma: f64 },
    Density { h: TestFunction<f64>, points: usize },
}

impl Quantity {
    fn kind(&self) -> String {
        match self {
            Quantity::Moment { family, .. } => format!("moment_{}", family.name()),
            Quantity::CharAverage { .. } => "char_average".into(),
            Quantity::Ratio { .. } => "ratio".into(),
            Quantity::Density { .. } => "density".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareParams {
    pub q: u64,
    pub n: usize,
    /// Euler truncation degree; the per-q default when None
    pub d: Option<usize>,
    pub timing: bool,
}

impl CompareParams {
    pub fn new(q: u64, n: usize) -> Self {
        CompareParams { q, n, d: None, timing: false }
    }
}

/// Compute the empirical value and its prediction for one (quantity, q, n).
pub fn compare(quantity: &Quantity, params: &CompareParams) -> Result<Report> {
    let start = Instant::now();
    let CompareParams { q, n, .. } = *params;
    let field = FieldSpec::from_q(q)?;
    if n < 2 {
        return Err(Error::Domain(format!("comparisons need n >= 2 (genus >= 1), got {n}")));
    }
    let g = n - 1;
    let d = params.d.unwrap_or_else(|| default_truncation(q));
    let mut r = Report {
        kind: quantity.kind(),
        q,
        n,
        k: None,
        alpha: None,
        gamma: None,
        h: None,
        d: Some(d),
        empirical: 0.0,
        predicted: 0.0,
        relative_deviation: 0.0,
        family_size: 0,
        excluded: 0,
        seconds: None,
        exact: None,
    };
    match quantity {
        Quantity::Moment { k, family } => {
            r.k = Some(*k);
            let predicted: f64 = match family {
                FamilyKind::I => moment_prediction(*k, q, g, d)?,
                FamilyKind::F | FamilyKind::Fprime if *k == 1 => first_moment_main_term(*family, q, g, d)?,
                other => {
                    return Err(Error::Domain(format!(
                        "no moment prediction for k = {k} over family {}",
                        other.name()
                    )))
                }
            };
            let data = family_data(q, n, *family)?;
            let e = empirical_moment_of(&data, *k as u32)?;
            r.family_size = data.len() as u64;
            r.empirical = e.value;
            r.exact = Some(format!("{} + ({})/sqrt({q})", e.exact.a, e.exact.b));
            r.predicted = predicted;
        }
        Quantity::CharAverage { m } => {
            r.d = None;
            r.h = Some(m.encode());
            let e = empirical_char_average(m, q, n)?;
            r.empirical = e.to_f64().unwrap_or(f64::NAN);
            r.exact = Some(e.to_string());
            r.predicted = char_average_limit(m, q)?.to_f64().unwrap_or(f64::NAN);
            r.family_size = crate::family::FamilySpec::new(field, n, FamilyKind::I)?.expected_size() as u64;
        }
        Quantity::Ratio { alpha, gamma } => {
            r.alpha = Some(*alpha);
            r.gamma = Some(*gamma);
            let (a, c) = (Complex64::new(*alpha, 0.0), Complex64::new(*gamma, 0.0));
            r.predicted = ratio_prediction(a, c, q, g, d)?.re;
            let data = family_data(q, n, FamilyKind::I)?;
            let e = empirical_ratio_of(&data, a, c);
            r.family_size = data.len() as u64;
            r.empirical = e.value.re;
            r.excluded = e.excluded;
        }
        Quantity::Density { h, points } => {
            r.h = Some(h.id());
            r.predicted = density_prediction(h, q, g, d, *points)?;
            let data = family_data(q, n, FamilyKind::I)?;
            let e = empirical_density_of(&data, h)?;
            r.family_size = data.len() as u64;
            r.empirical = e.value;
        }
    }
    r.relative_deviation = relative_deviation(r.empirical, r.predicted);
    if params.timing {
        r.seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(r)
}

/// A deviation sequence over increasing n with its trend verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub reports: Vec<Report>,
    /// relative deviation non-increasing over the last three n
    pub trend_ok: bool,
}

/// Fejer order used by the density scenario.
pub const DENSITY_FEJER_ORDER: usize = 4;
/// Quadrature points for the density prediction in scenarios.
pub const DENSITY_POINTS: usize = 256;

pub fn scenario_names() -> &'static [&'static str] {
    &["moment-I", "moment-F", "moment-Fprime", "ratios", "density", "char-T2", "char-T"]
}

fn scenario_plan(name: &str) -> Result<(Quantity, u64, Vec<usize>)> {
    let genus_2_to_4 = vec![3, 4, 5];
    Ok(match name {
        "moment-I" => (Quantity::Moment { k: 1, family: FamilyKind::I }, 4, genus_2_to_4),
        "moment-F" => (Quantity::Moment { k: 1, family: FamilyKind::F }, 4, genus_2_to_4),
        "moment-Fprime" => (Quantity::Moment { k: 1, family: FamilyKind::Fprime }, 4, genus_2_to_4),
        "ratios" => (Quantity::Ratio { alpha: 0.2, gamma: 0.24 }, 4, genus_2_to_4),
        "density" => (
            Quantity::Density { h: TestFunction::Fejer(DENSITY_FEJER_ORDER), points: DENSITY_POINTS },
            4,
            genus_2_to_4,
        ),
        "char-T2" => (Quantity::CharAverage { m: Poly::from_coeffs(vec![0, 0, 1]) }, 2, vec![2, 3, 4]),
        "char-T" => (Quantity::CharAverage { m: Poly::t() }, 2, vec![2, 3, 4]),
        _ => {
            return Err(Error::Domain(format!(
                "unknown scenario {name:?}; known: {}",
                scenario_names().join(", ")
            )))
        }
    })
}

/// Run a named scenario.
pub fn scenario(name: &str, timing: bool) -> Result<Scenario> {
    let (quantity, q, ns) = scenario_plan(name)?;
    let reports = ns
        .iter()
        .map(|&n| compare(&quantity, &CompareParams { q, n, d: None, timing }))
        .collect::<Result<Vec<_>>>()?;
    let dev: Vec<f64> = reports.iter().map(|r| r.relative_deviation).collect();
    let tail = &dev[dev.len().saturating_sub(3)..];
    let trend_ok = tail.windows(2).all(|w| w[1] <= w[0]);
    Ok(Scenario { name: name.into(), reports, trend_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_report_has_both_values() {
        let r = compare(&Quantity::Moment { k: 1, family: FamilyKind::I }, &CompareParams::new(4, 3)).unwrap();
        assert_eq!(r.family_size, 1536);
        assert!(r.relative_deviation < 1e-2);
        assert!(r.exact.is_some() && r.seconds.is_none());
        let json = r.to_json();
        assert!(json.contains("\"D\":16") && json.contains("\"seconds\":null"));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn char_average_report_has_limit() {
        let m = Poly::from_coeffs(vec![0, 0, 1]);
        let r = compare(&Quantity::CharAverage { m }, &CompareParams::new(2, 3)).unwrap();
        assert!((r.predicted - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn density_report_with_fejer() {
        let r = compare(
            &Quantity::Density { h: TestFunction::Fejer(3), points: 128 },
            &CompareParams::new(4, 3),
        )
        .unwrap();
        assert_eq!(r.h.as_deref(), Some("fejer3"));
        assert!(r.relative_deviation < 1e-2);
    }

    #[test]
    fn mismatched_parameters_are_rejected() {
        let p = CompareParams::new(4, 3);
        assert!(compare(&Quantity::Moment { k: 2, family: FamilyKind::F }, &p).is_err());
        assert!(compare(&Quantity::Ratio { alpha: 0.3, gamma: 0.3 }, &p).is_err());
        assert!(compare(&Quantity::Moment { k: 1, family: FamilyKind::I }, &CompareParams::new(3, 3)).is_err());
        assert!(scenario("nope", false).is_err());
    }

    #[test]
    fn csv_has_spec_columns() {
        let r = compare(&Quantity::Ratio { alpha: 0.2, gamma: 0.24 }, &CompareParams::new(4, 2)).unwrap();
        let mut buf = Vec::new();
        Report::write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "kind,q,n,k,alpha,gamma,h,D,empirical,predicted,relative_deviation,family_size,excluded,seconds,exact\n"
        ));
    }
}
