//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, 3 size cap.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::boolfn::{BoolFnError, TracePolynomial, MAX_SWEEP_N};
use crate::bounds::{compare_report, BoundEntry, BoundReport, BoundsError};
use crate::field::{parse_modulus_hex, FieldCtx, FieldElement, FieldError};
use crate::linpoly::{LinPolyError, LinearizedPoly};
use crate::numtheory::{minimize_v, ExponentSet, NumError, VResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "linroot", version, about = "Root counts of linearized polynomials and nl2 bounds for cubics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Extension degree n of GF(2^n).
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Defining polynomial in hex, including the x^n bit.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// File of `n hex-modulus` lines overriding the built-in table.
    #[arg(long, global = true, env = "LINROOT_MODULUS_TABLE")]
    pub modulus_table: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads for per-element sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum-V search over a signed exponent set.
    Vsearch {
        /// Comma-separated signed exponents, e.g. 9,5,4,-9,-5,-4.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        /// Derive the exponent set from a cubic function instead.
        #[arg(long)]
        function: Option<String>,
    },
    /// Kernel dimension of a linearized polynomial.
    KernelDim {
        /// Terms like `a3*X^2^5 + 01*X^2^-2`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Every lower bound on nl2 that applies to a cubic.
    Bounds {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        select: BoundSelect,
    },
    /// Brute-force soundness sweep.
    Verify {
        /// Defaults to every monomial Tr(x^(2^i + 2^j + 1)).
        #[arg(long)]
        function: Option<String>,
    },
    /// Histogram of derivative radical dimensions.
    RadicalDist {
        #[arg(long)]
        function: String,
    },
    /// Exact second-order nonlinearity (n <= 6).
    Nl2Exact {
        #[arg(long)]
        function: String,
    },
    /// Walsh value distribution and nonlinearity.
    Walsh {
        #[arg(long)]
        function: String,
    },
}

#[derive(Debug, Clone, Copy, Args)]
#[group(multiple = false)]
pub struct BoundSelect {
    #[arg(long)]
    pub all: bool,
    /// Only the main bound.
    #[arg(long)]
    pub main: bool,
    /// Main and Li-Hu-Gao bounds.
    #[arg(long)]
    pub lhg: bool,
    /// Main and Gode-Gangopadhyay bounds.
    #[arg(long)]
    pub gode: bool,
}

impl BoundSelect {
    fn keeps(&self, name: &str) -> bool {
        if self.main {
            name == "main"
        } else if self.lhg {
            name == "main" || name.starts_with("lihugao")
        } else if self.gode {
            name == "main" || name.starts_with("gode")
        } else {
            true
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cap(_) => EXIT_CAP,
        }
    }
}

impl From<BoolFnError> for CliError {
    fn from(e: BoolFnError) -> Self {
        match e {
            BoolFnError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::BoolFn(b) => b.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}
usage_from!(FieldError, NumError, LinPolyError);

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ctx: FieldCtx,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        let n = g.n.ok_or_else(|| CliError::Usage("--n is required".to_string()))?;
        let modulus = match (&g.modulus, &g.modulus_table) {
            (Some(m), _) => Some(parse_modulus_hex(m)?),
            (None, Some(path)) => lookup_modulus(path, n)?,
            (None, None) => None,
        };
        let ctx = match modulus {
            Some(m) => FieldCtx::with_modulus(n, m)?,
            None => FieldCtx::new(n)?,
        };
        Ok(RunConfig { ctx, format: g.format, threads: g.threads })
    }
}

fn lookup_modulus(path: &Path, n: u32) -> Result<Option<u64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read modulus table {}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::Usage(format!("{}:{}: expected `n hex`", path.display(), lineno + 1));
        let mut it = line.split_whitespace();
        let deg: u32 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let hex = it.next().ok_or_else(bad)?;
        if deg == n {
            return Ok(Some(parse_modulus_hex(hex)?));
        }
    }
    Ok(None)
}

/// One command's result in all three renderings.
#[derive(Debug, Clone)]
pub struct Output {
    pub op: &'static str,
    pub result: Value,
    pub witness: Option<Value>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Free-form lines printed under the table.
    pub notes: Vec<String>,
    pub ok: bool,
}

impl Output {
    fn key_values(op: &'static str, result: Value, rows: Vec<(&str, String)>) -> Self {
        Output {
            op,
            result,
            witness: None,
            header: vec!["key".to_string(), "value".to_string()],
            rows: rows.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect(),
            notes: Vec::new(),
            ok: true,
        }
    }

    pub fn render(&self, ctx: &FieldCtx, format: Format) -> String {
        match format {
            Format::Json => {
                let mut doc = json!({
                    "n": ctx.n(),
                    "modulus": format!("{:#x}", ctx.modulus()),
                    "op": self.op,
                    "result": self.result,
                });
                if let Some(w) = &self.witness {
                    doc["witness"] = w.clone();
                }
                let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush to vec")).expect("utf-8 input")
            }
            Format::Table => {
                let mut s = format!("{} n={} modulus={:#x}\n", self.op, ctx.n(), ctx.modulus());
                s.push_str(&render_table(&self.header, &self.rows));
                for note in &self.notes {
                    s.push_str(note);
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        let s = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        format!("{}\n", s.trim_end())
    };
    let mut out = line(header);
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

pub fn parse_delta(n: u32, s: &str) -> Result<ExponentSet, CliError> {
    let exps = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| CliError::Usage(format!("bad exponent '{t}' in --delta"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExponentSet::new(n, exps)?)
}

fn v_json(delta: &ExponentSet, r: &VResult) -> (Value, Value) {
    (
        json!({
            "delta": delta.exps(),
            "v": r.v,
            "t_k": r.tk,
            "s_k": r.sk,
            "initial_v": r.initial_v,
        }),
        json!({ "k": r.witness.k, "shifts": r.witness.shifts }),
    )
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn cmd_vsearch(cfg: &RunConfig, delta: Option<&str>, function: Option<&str>) -> Result<Output, CliError> {
    let delta = match (delta, function) {
        (Some(d), None) => parse_delta(cfg.ctx.n(), d)?,
        (None, Some(f)) => TracePolynomial::parse(&cfg.ctx, f)?.delta_set()?,
        _ => return Err(CliError::Usage("give exactly one of --delta and --function".to_string())),
    };
    let r = minimize_v(&delta)?;
    let (result, witness) = v_json(&delta, &r);
    let mut out = Output::key_values(
        "vsearch",
        result,
        vec![
            ("delta", join(delta.exps())),
            ("V", r.v.to_string()),
            ("k", r.witness.k.to_string()),
            ("shifts", join(&r.witness.shifts)),
            ("T_K", r.tk.to_string()),
            ("S_K", r.sk.to_string()),
            ("initial_v", r.initial_v.to_string()),
        ],
    );
    out.witness = Some(witness);
    Ok(out)
}

pub fn cmd_kernel_dim(cfg: &RunConfig, poly: &str) -> Result<Output, CliError> {
    let l = LinearizedPoly::parse(&cfg.ctx, poly)?;
    let kd = l.kernel_dimension();
    let basis: Vec<String> = l.kernel_basis().iter().map(FieldElement::to_string).collect();
    Ok(Output::key_values(
        "kernel-dim",
        json!({ "poly": l.to_string(), "dim": kd.dim, "degenerate": kd.degenerate, "basis": basis }),
        vec![
            ("poly", l.to_string()),
            ("dim", kd.dim.to_string()),
            ("degenerate", kd.degenerate.to_string()),
            ("basis", basis.join(",")),
        ],
    ))
}

fn entry_row(e: &BoundEntry) -> Vec<String> {
    vec![
        e.name.clone(),
        e.radicand.as_ref().map_or("-".to_string(), |r| r.to_string()),
        e.real.display3(),
        e.ceil.to_string(),
        e.nearest().to_string(),
        e.applicable.to_string(),
        e.reason.clone().or_else(|| e.caveat.clone()).unwrap_or_default(),
    ]
}

fn report_json(r: &BoundReport, entries: &[&BoundEntry]) -> Value {
    json!({
        "function": r.function,
        "delta": r.delta.exps(),
        "v": r.v.v,
        "q_size": r.q_size,
        "nl2": r.nl2,
        "entries": entries.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
        "metadata": r.metadata,
        "ordering_violations": r.ordering_violations,
        "soundness_violations": r.soundness_violations,
    })
}

pub fn cmd_bounds(cfg: &RunConfig, function: &str, select: BoundSelect) -> Result<Output, CliError> {
    let f = TracePolynomial::parse(&cfg.ctx, function)?;
    let r = compare_report(&f)?;
    let entries: Vec<&BoundEntry> = r.entries.iter().filter(|e| select.keeps(&e.name)).collect();
    let mut notes = vec![format!("|Q_f| = {}, V = {}, delta = {}", r.q_size, r.v.v, join(r.delta.exps()))];
    if let Some(nl2) = r.nl2 {
        notes.push(format!("nl2 = {nl2}"));
    }
    notes.extend(r.ordering_violations.iter().map(|v| format!("ordering: {v}")));
    notes.extend(r.soundness_violations.iter().map(|v| format!("soundness: {v}")));
    Ok(Output {
        op: "bounds",
        result: report_json(&r, &entries),
        witness: Some(json!({ "k": r.v.witness.k, "shifts": r.v.witness.shifts })),
        header: ["name", "radicand", "real", "ceil", "nearest", "applicable", "note"]
            .map(String::from)
            .to_vec(),
        rows: entries.iter().map(|e| entry_row(e)).collect(),
        notes,
        ok: true,
    })
}

/// Per-function verification result.
struct Checked {
    function: String,
    v: u64,
    max_kernel: u32,
    kernel_violations: u64,
    soundness: Vec<String>,
    ordering: Vec<String>,
}

fn verify_one(f: &TracePolynomial) -> Result<Checked, CliError> {
    let ctx = f.ctx();
    if ctx.n() > MAX_SWEEP_N {
        return Err(CliError::Cap(format!("verify supports n <= {MAX_SWEEP_N}, got n = {}", ctx.n())));
    }
    let report = compare_report(f)?;
    let v = report.v.v;
    let dims = ctx
        .elements()
        .skip(1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| -> Result<Option<u32>, BoolFnError> {
            let q = f.quadratic_part(a)?;
            Ok((!q.is_zero()).then(|| q.polar_linpoly().kernel_dimension().dim))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<u32> = dims.into_iter().flatten().collect();
    Ok(Checked {
        function: report.function.clone(),
        v,
        max_kernel: dims.iter().copied().max().unwrap_or(0),
        kernel_violations: dims.iter().filter(|&&d| d as u64 > v).count() as u64,
        soundness: report.soundness_violations,
        ordering: report.ordering_violations,
    })
}

pub fn cmd_verify(cfg: &RunConfig, function: Option<&str>) -> Result<Output, CliError> {
    let ctx = &cfg.ctx;
    let n = ctx.n();
    let functions = match function {
        Some(s) => vec![TracePolynomial::parse(ctx, s)?],
        None => {
            let mut fs = Vec::new();
            for i in 2..n {
                for j in 1..i {
                    let d = (1u64 << i) | (1u64 << j) | 1;
                    fs.push(TracePolynomial::monomial(ctx, FieldElement::ONE, d)?);
                }
            }
            fs
        }
    };
    let checked = functions.iter().map(verify_one).collect::<Result<Vec<_>, _>>()?;
    let ok = checked.iter().all(|c| c.kernel_violations == 0 && c.soundness.is_empty());
    let rows = checked
        .iter()
        .map(|c| {
            vec![
                c.function.clone(),
                c.v.to_string(),
                c.max_kernel.to_string(),
                c.kernel_violations.to_string(),
                c.soundness.len().to_string(),
                c.ordering.len().to_string(),
            ]
        })
        .collect();
    let result = json!({
        "ok": ok,
        "checked": checked.iter().map(|c| json!({
            "function": c.function,
            "v": c.v,
            "max_kernel": c.max_kernel,
            "kernel_violations": c.kernel_violations,
            "soundness_violations": c.soundness,
            "ordering_violations": c.ordering,
        })).collect::<Vec<_>>(),
    });
    let mut notes = vec![format!("verify: {}", if ok { "ok" } else { "FAILED" })];
    for c in &checked {
        notes.extend(c.soundness.iter().map(|s| format!("{}: soundness: {s}", c.function)));
        notes.extend(c.ordering.iter().map(|s| format!("{}: ordering: {s}", c.function)));
    }
    Ok(Output {
        op: "verify",
        result,
        witness: None,
        header: ["function", "V", "max_kernel", "kernel_violations", "soundness_violations", "ordering_violations"]
            .map(String::from)
            .to_vec(),
        rows,
        notes,
        ok,
    })
}

pub fn cmd_radical_dist(cfg: &RunConfig, function: &str) -> Result<Output, CliError> {
    let f = TracePolynomial::parse(&cfg.ctx, function)?;
    let rd = f.radical_distribution()?;
    let mut out = Output::key_values(
        "radical-dist",
        json!({ "histogram": rd.histogram, "degenerate": rd.degenerate }),
        rd.histogram.iter().map(|(r, c)| ("r", format!("{r}: {c}"))).collect(),
    );
    out.header = vec!["r_a".to_string(), "count".to_string()];
    out.rows = rd.histogram.iter().map(|(r, c)| vec![r.to_string(), c.to_string()]).collect();
    out.notes.push(format!("degenerate = {}", rd.degenerate));
    Ok(out)
}

pub fn cmd_nl2_exact(cfg: &RunConfig, function: &str) -> Result<Output, CliError> {
    let f = TracePolynomial::parse(&cfg.ctx, function)?;
    let nl2 = f.truth_table()?.nl2_exact()?;
    Ok(Output::key_values("nl2-exact", json!({ "nl2": nl2 }), vec![("nl2", nl2.to_string())]))
}

pub fn cmd_walsh(cfg: &RunConfig, function: &str) -> Result<Output, CliError> {
    let f = TracePolynomial::parse(&cfg.ctx, function)?;
    let tt = f.truth_table()?;
    let spectrum = tt.walsh_spectrum(&cfg.ctx);
    let mut dist: BTreeMap<i32, u64> = BTreeMap::new();
    for &w in &spectrum {
        *dist.entry(w).or_default() += 1;
    }
    let nl = tt.nonlinearity();
    let max_abs = spectrum.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    let mut out = Output::key_values(
        "walsh",
        json!({ "nonlinearity": nl, "max_abs": max_abs, "distribution": dist }),
        Vec::new(),
    );
    out.header = vec!["value".to_string(), "count".to_string()];
    out.rows = dist.iter().map(|(w, c)| vec![w.to_string(), c.to_string()]).collect();
    out.notes.push(format!("nonlinearity = {nl}, max |W| = {max_abs}"));
    Ok(out)
}

pub fn execute(cli: &Cli) -> Result<(RunConfig, Output), CliError> {
    let cfg = RunConfig::from_args(&cli.global)?;
    if let Some(t) = cfg.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = match &cli.command {
        Command::Vsearch { delta, function } => cmd_vsearch(&cfg, delta.as_deref(), function.as_deref())?,
        Command::KernelDim { poly } => cmd_kernel_dim(&cfg, poly)?,
        Command::Bounds { function, select } => cmd_bounds(&cfg, function, *select)?,
        Command::Verify { function } => cmd_verify(&cfg, function.as_deref())?,
        Command::RadicalDist { function } => cmd_radical_dist(&cfg, function)?,
        Command::Nl2Exact { function } => cmd_nl2_exact(&cfg, function)?,
        Command::Walsh { function } => cmd_walsh(&cfg, function)?,
    };
    Ok((cfg, out))
}

/// Parses `args`, runs the command, prints the result and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok((cfg, out)) => {
            print!("{}", out.render(&cfg.ctx, cfg.format));
            if out.ok {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
