//! fqlab: enumerate families, compute empirical and predicted quantities, run comparisons.
//!
//! Exit codes: 0 success, 1 computational failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fqlab::algebra::{default_cache_dir, FieldSpec, FqContext, IrreducibleTable};
use fqlab::experiments::{compare, scenario, scenario_names, scaled_histogram, CompareParams, Quantity, Report};
use fqlab::family::{count, enumerate, FamilyKind, FamilySpec};
use fqlab::lfunction::{central_value, zeros, FamilyLData};
use fqlab::prediction::density::{scaled_density_limit, TestFunction};
use fqlab::prediction::euler::{EulerCache, NamedProduct};
use fqlab::prediction::{default_truncation, leading_constant, moment_prediction, named_product, q_k};

#[derive(Parser, Debug)]
#[command(name = "fqlab", version, about = "Quadratic L-functions over F_q(T), q = 2^m: enumeration, moments, ratios, densities")]
struct Cli {
    /// Cache directory for irreducible tables and Euler products (falls back to FQLAB_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Family sizes and members
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Completed L-polynomials and central values of every member
    Lvalues(LvaluesArgs),
    /// Empirical moment against the conjectured value
    Moment(MomentArgs),
    /// Empirical ratio sum against the ratios conjecture
    Ratios(RatiosArgs),
    /// One-level density against its prediction, or the scaled zero histogram
    Density(DensityArgs),
    /// Conjecture-side quantities only
    Conjecture {
        #[command(subcommand)]
        what: ConjectureCmd,
    },
    /// Run a named comparison scenario
    Compare(CompareArgs),
    /// Manage the on-disk caches
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

fn parse_q(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(q @ (2 | 4 | 8 | 16)) => Ok(q),
        _ => Err(format!("q must be one of 2, 4, 8, 16, got {s:?}")),
    }
}

fn parse_n(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("n must be a positive integer, got {s:?}")),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    I,
    F,
    Fprime,
    B,
    G,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::I => FamilyKind::I,
            Family::F => FamilyKind::F,
            Family::Fprime => FamilyKind::Fprime,
            Family::B => FamilyKind::B,
            Family::G => FamilyKind::G,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
struct FieldArgs {
    #[arg(long, value_parser = parse_q)]
    q: u64,
    /// Family index n = g + 1 (discriminants of degree 2n)
    #[arg(long, value_parser = parse_n)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum FamilyAction {
    /// Number of members
    Count {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "i")]
        kind: Family,
    },
    /// Normal-form keys of all members, one per line
    List {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "i")]
        kind: Family,
    },
}

#[derive(Args, Debug)]
struct LvaluesArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value = "i")]
    kind: Family,
    /// Also list the zero ordinates
    #[arg(long)]
    zeros: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug, Clone, Copy)]
struct ReportArgs {
    /// Euler-product truncation degree (default depends on q)
    #[arg(long)]
    trunc_deg: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Fill the seconds column
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "i")]
    family: Family,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct RatiosArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Fejer kernel of this order as the test function
    #[arg(long, conflicts_with = "cosine")]
    fejer: Option<usize>,
    /// Cosine coefficients a_0,a_1,... of h(t) = sum a_m cos(m t log q)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    cosine: Option<Vec<f64>>,
    /// Quadrature points for the prediction
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Emit the scaled zero histogram with this many bins instead (CSV)
    #[arg(long, conflicts_with_all = ["fejer", "cosine"])]
    histogram: Option<usize>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Subcommand, Debug)]
enum ConjectureCmd {
    /// Coefficients of Q_k(x), lowest degree first, as a JSON array
    Qk {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        trunc_deg: Option<usize>,
    },
    /// The leading-order constant of the k-th moment, exact
    Constant {
        #[arg(long)]
        k: usize,
    },
    /// A named Euler product: p1, plogderiv or aclosed (with --k)
    Euler {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long, value_enum)]
        product: Product,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trunc_deg: Option<usize>,
    },
    /// The conjectured k-th moment #I_{g+1} Q_k(2g+1)
    Moment {
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        trunc_deg: Option<usize>,
    },
    /// Scaled one-level density limit for (sin pi tau / pi tau)^2
    DensityLimit,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Product {
    P1,
    Plogderiv,
    Aclosed,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Scenario name; omit with --list
    scenario: Option<String>,
    /// List the scenario names
    #[arg(long)]
    list: bool,
    /// Exit 1 when the deviation trend check fails
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Build the irreducible table up to a degree and the default Euler products for q
    Build {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        max_degree: usize,
    },
    /// Print the cache directory in use
    Path,
}

enum Failure {
    Usage(String),
    Compute(fqlab::Error),
}

impl From<fqlab::Error> for Failure {
    fn from(e: fqlab::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

struct Ctx {
    cache_dir: Option<PathBuf>,
    out: Box<dyn Write>,
}

impl Ctx {
    fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.out, "{s}")
    }

    fn reports(&mut self, reports: &[Report], format: Format) -> Outcome {
        match format {
            Format::Json => {
                for r in reports {
                    self.line(&r.to_json())?;
                }
            }
            Format::Csv => Report::write_csv(reports, &mut self.out)?,
        }
        Ok(())
    }

    fn context(&self, q: u64, degree: usize) -> Result<FqContext, Failure> {
        let table = IrreducibleTable::load_or_build(FieldSpec::from_q(q)?, degree, self.cache_dir.as_deref())?;
        Ok(FqContext::from_table(table))
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("values serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("cannot set up {t} threads: {e}")))?;
    }
    let out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut ctx = Ctx { cache_dir: cli.cache_dir.clone().or_else(default_cache_dir), out };
    let result = dispatch(&mut ctx, cli.cmd);
    ctx.out.flush()?;
    result
}

fn dispatch(ctx: &mut Ctx, cmd: Command) -> Outcome {
    match cmd {
        Command::Family { action } => family(ctx, action),
        Command::Lvalues(a) => lvalues(ctx, a),
        Command::Moment(a) => {
            let kind: FamilyKind = a.family.into();
            if !matches!(kind, FamilyKind::I | FamilyKind::F | FamilyKind::Fprime) {
                return Err(usage("moments are taken over I, F or Fprime"));
            }
            if kind != FamilyKind::I && a.k != 1 {
                return Err(usage("over F and Fprime only k = 1 has a prediction"));
            }
            if a.field.n < 2 {
                return Err(usage("comparisons need n >= 2"));
            }
            let r = compare(&Quantity::Moment { k: a.k, family: kind }, &params(a.field, a.report))?;
            ctx.reports(&[r], a.report.format)
        }
        Command::Ratios(a) => {
            if !(a.alpha.abs() < 0.25 && a.gamma > 0.0 && a.gamma < 0.25) {
                return Err(usage("need -1/4 < alpha < 1/4 and 0 < gamma < 1/4"));
            }
            if a.field.n < 2 {
                return Err(usage("comparisons need n >= 2"));
            }
            let r = compare(&Quantity::Ratio { alpha: a.alpha, gamma: a.gamma }, &params(a.field, a.report))?;
            ctx.reports(&[r], a.report.format)
        }
        Command::Density(a) => density(ctx, a),
        Command::Conjecture { what } => conjecture(ctx, what),
        Command::Compare(a) => compare_cmd(ctx, a),
        Command::Cache { action } => cache(ctx, action),
    }
}

fn params(field: FieldArgs, report: ReportArgs) -> CompareParams {
    CompareParams { q: field.q, n: field.n, d: report.trunc_deg, timing: report.timing }
}

fn family(ctx: &mut Ctx, action: FamilyAction) -> Outcome {
    match action {
        FamilyAction::Count { field, kind } => {
            let fc = ctx.context(field.q, field.n)?;
            let spec = FamilySpec::new(fc.field(), field.n, kind.into())?;
            let c = count(&spec, &fc)?;
            ctx.line(&c.to_string())?;
        }
        FamilyAction::List { field, kind } => {
            let fc = ctx.context(field.q, field.n)?;
            let spec = FamilySpec::new(fc.field(), field.n, kind.into())?;
            if matches!(spec.kind, FamilyKind::B | FamilyKind::G) {
                return Err(usage("listing is available for I, F and Fprime"));
            }
            for u in enumerate(&spec, &fc)? {
                ctx.line(&u.key(fc.field()))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LvalueRow {
    key: String,
    coeffs: Vec<i64>,
    central_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ordinates: Option<Vec<f64>>,
}

fn lvalues(ctx: &mut Ctx, a: LvaluesArgs) -> Outcome {
    let kind: FamilyKind = a.kind.into();
    if !matches!(kind, FamilyKind::I | FamilyKind::F | FamilyKind::Fprime) {
        return Err(usage("L-functions are attached to I, F and Fprime"));
    }
    let fc = ctx.context(a.field.q, a.field.n)?;
    let spec = FamilySpec::new(fc.field(), a.field.n, kind)?;
    let data = FamilyLData::compute(&fc, spec)?;
    let keys: Vec<String> = enumerate(&spec, &fc)?.map(|u| u.key(fc.field())).collect();
    if a.format == Format::Csv {
        ctx.line("key,coeffs,central_value")?;
    }
    for (i, key) in keys.into_iter().enumerate() {
        let lp = data.l_polynomial(i, key);
        let cv = central_value(&lp).to_f64();
        let ordinates = if a.zeros { Some(zeros(&lp)?.ordinates) } else { None };
        match a.format {
            Format::Json => {
                let row = LvalueRow { key: lp.key.clone(), coeffs: lp.coeffs.clone(), central_value: cv, ordinates };
                ctx.line(&json(&row))?;
            }
            Format::Csv => {
                let coeffs: Vec<String> = lp.coeffs.iter().map(i64::to_string).collect();
                ctx.line(&format!("{},{},{:?}", lp.key, coeffs.join(" "), cv))?;
            }
        }
    }
    Ok(())
}

fn density(ctx: &mut Ctx, a: DensityArgs) -> Outcome {
    if let Some(bins) = a.histogram {
        if bins == 0 || a.field.n < 2 {
            return Err(usage("--histogram needs at least one bin and n >= 2"));
        }
        let hist = scaled_histogram(a.field.q, a.field.n, bins)?;
        ctx.line("bin_center,count,normalized_density")?;
        for b in hist {
            ctx.line(&format!("{:?},{},{:?}", b.bin_center, b.count, b.normalized_density))?;
        }
        return Ok(());
    }
    let h = match (a.fejer, a.cosine) {
        (Some(m), None) => TestFunction::Fejer(m),
        (None, Some(c)) if !c.is_empty() => TestFunction::Cosine(c),
        _ => return Err(usage("give a test function with --fejer M or --cosine a0,a1,...")),
    };
    if a.field.n < 2 || a.points < 8 {
        return Err(usage("density needs n >= 2 and at least 8 quadrature points"));
    }
    let r = compare(&Quantity::Density { h, points: a.points }, &params(a.field, a.report))?;
    ctx.reports(&[r], a.report.format)
}

#[derive(Serialize)]
struct EulerRow {
    product: String,
    q: u64,
    #[serde(rename = "D")]
    d: usize,
    value: f64,
    tail_estimate: f64,
}

fn conjecture(ctx: &mut Ctx, what: ConjectureCmd) -> Outcome {
    match what {
        ConjectureCmd::Qk { k, q, trunc_deg } => {
            if k > 4 {
                return Err(usage("q_k is available for k <= 4"));
            }
            let d = trunc_deg.unwrap_or_else(|| default_truncation(q));
            let qk = q_k::<f64>(k, q, d)?;
            ctx.line(&json(&qk.coeffs()))?;
        }
        ConjectureCmd::Constant { k } => {
            if k == 0 {
                return Err(usage("k must be at least 1"));
            }
            ctx.line(&leading_constant(k).to_string())?;
        }
        ConjectureCmd::Euler { q, product, k, trunc_deg } => {
            let named = match (product, k) {
                (Product::P1, None) => NamedProduct::P1,
                (Product::Plogderiv, None) => NamedProduct::PLogDeriv,
                (Product::Aclosed, Some(k @ 1..=5)) => NamedProduct::AClosed(k),
                (Product::Aclosed, _) => return Err(usage("aclosed needs --k between 1 and 5")),
                _ => return Err(usage("--k only applies to aclosed")),
            };
            let d = trunc_deg.unwrap_or_else(|| default_truncation(q));
            if d == 0 {
                return Err(usage("--trunc-deg must be at least 1"));
            }
            let cache = ctx.cache_dir.as_ref().map(EulerCache::new);
            let v = named_product(named, q, d, cache.as_ref())?;
            ctx.line(&json(&EulerRow { product: named.id(), q, d, value: v.value, tail_estimate: v.tail_estimate }))?;
        }
        ConjectureCmd::Moment { k, q, g, trunc_deg } => {
            if k > 4 {
                return Err(usage("moment predictions are available for k <= 4"));
            }
            let d = trunc_deg.unwrap_or_else(|| default_truncation(q));
            let v: f64 = moment_prediction(k, q, g, d)?;
            ctx.line(&json(&v))?;
        }
        ConjectureCmd::DensityLimit => {
            let sinc2 = |t: f64| {
                let x = std::f64::consts::PI * t;
                if x == 0.0 {
                    1.0
                } else {
                    (x.sin() / x).powi(2)
                }
            };
            ctx.line(&json(&scaled_density_limit(sinc2)?))?;
        }
    }
    Ok(())
}

fn compare_cmd(ctx: &mut Ctx, a: CompareArgs) -> Outcome {
    if a.list {
        for name in scenario_names() {
            ctx.line(name)?;
        }
        return Ok(());
    }
    let Some(name) = a.scenario else {
        return Err(usage(format!("name a scenario ({}) or pass --list", scenario_names().join(", "))));
    };
    if !scenario_names().contains(&name.as_str()) {
        return Err(usage(format!("unknown scenario {name:?}; known: {}", scenario_names().join(", "))));
    }
    let s = scenario(&name, a.timing)?;
    ctx.reports(&s.reports, a.format)?;
    eprintln!("{}: trend {}", s.name, if s.trend_ok { "ok" } else { "FAILED" });
    if a.strict && !s.trend_ok {
        return Err(Failure::Compute(fqlab::Error::Consistency(format!("{name}: deviation trend is increasing"))));
    }
    Ok(())
}

fn cache(ctx: &mut Ctx, action: CacheAction) -> Outcome {
    let Some(dir) = ctx.cache_dir.clone() else {
        return Err(usage("no cache directory: pass --cache-dir or set FQLAB_CACHE_DIR"));
    };
    match action {
        CacheAction::Build { q, max_degree } => {
            if max_degree == 0 {
                return Err(usage("--max-degree must be at least 1"));
            }
            let table = IrreducibleTable::load_or_build(FieldSpec::from_q(q)?, max_degree, Some(&dir))?;
            let d = default_truncation(q);
            let cache = EulerCache::new(&dir);
            for p in [NamedProduct::P1, NamedProduct::PLogDeriv] {
                cache.get(p, q, d)?;
            }
            let primes: usize = (1..=max_degree).map(|k| table.of_degree(k).len()).sum();
            ctx.line(&format!("{} primes up to degree {max_degree}; Euler products at D = {d}", primes))?;
            ctx.line(&IrreducibleTable::cache_path(&dir, table.field(), max_degree).display().to_string())?;
        }
        CacheAction::Path => ctx.line(&dir.display().to_string())?,
    }
    Ok(())
}

