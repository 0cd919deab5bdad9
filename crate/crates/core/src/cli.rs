//! The `orbivol` command line: argument grammar, rendering in text, CSV and
//! JSON, and the exit-code contract.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | the verification suite found violations |
//! | 2 | usage error |
//! | 3 | a numerical routine failed |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{
    compute_bound, group_order_bound_ln, log_ball_volume, log_kappa, BoundQuery, BoundResult,
    GroupOrderBound,
};
use crate::elliptic::{c_k, jorgensen_tau};
use crate::error::{Error, Result};
use crate::verify::{run_all, SuiteConfig, SuiteOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

pub const TOOL: &str = "orbivol";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of `schema/output-v1.json` that JSON output conforms to.
pub const SCHEMA_VERSION: u32 = 1;
/// JSON Schema for every `--format json` record.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output-v1.json");
pub const UNDERFLOW_SENTINEL: &str = "underflow-sentinel";
pub const OVERFLOW_SENTINEL: &str = "overflow-sentinel";
pub const SATURATION_SENTINEL: &str = "exceeds 2^63";
pub const TABLE_CSV_HEADER: &str = "n,k,log10_A,r_star";
pub const MAX_TABLE_CELLS: usize = 10_000;
/// The comparison value for τ.
pub const TAU_THRESHOLD: f64 = 0.2971;

#[derive(Debug, Parser)]
#[command(name = "orbivol", version, about = "Volume lower bounds for hyperbolic orbifolds with bounded torsion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound A(n,k) on the volume of a hyperbolic n-orbifold with torsion of order at most k.
    Bound(BoundArgs),
    /// log10 A(n,k) over ranges of n and k, e.g. `--n 2..5 --k 2..7`.
    Table(TableArgs),
    /// Upper bound on the order of an isometry group of a manifold of the given volume.
    Hurwitz(HurwitzArgs),
    /// tau, c_k, kappa(r) and ball volumes.
    Constants(ConstantsArgs),
    /// Volume of the hyperbolic n-ball of radius r.
    BallVolume(BallVolumeArgs),
    /// Run the randomized inequality checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the output to this file.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// A value `N` or an inclusive range `LO..HI`.
    #[arg(long, value_parser = parse_range)]
    pub n: (u64, u64),
    /// A value `K` or an inclusive range `LO..HI`.
    #[arg(long, value_parser = parse_range)]
    pub k: (u64, u64),
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HurwitzArgs {
    /// Volume of the manifold: a decimal such as `12.5`, `3e-400` or `3.1×10^-400`.
    #[arg(long, allow_hyphen_values = true)]
    pub volume: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u32,
    /// Bound for subgroups of Out(π₁ M), which doubles the ratio.
    #[arg(long)]
    pub out: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Dimension for the ball volume printed with `--r` (default: 2 through 5).
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BallVolumeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}..{hi}"));
            }
            Ok((lo, hi))
        }
        None => parse(s).map(|v| (v, v)),
    }
}

/// Base-10 log of a positive number written as `m`, `meE`, `m×10^E` or `m*10^E`.
/// Works for magnitudes far outside the range of `f64`.
pub fn parse_log10_positive(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::usage(format!("`{text}` is not a positive number"));
    let (mantissa, exponent) = if let Some((m, e)) = s.split_once("×10^").or_else(|| s.split_once("*10^")) {
        (m, Some(e))
    } else if let Some(i) = s.find(['e', 'E']) {
        (&s[..i], Some(&s[i + 1..]))
    } else {
        (s, None)
    };
    let m: f64 = mantissa.trim().parse().map_err(|_| bad())?;
    let e: i64 = match exponent {
        Some(e) => e.trim().trim_start_matches('+').parse().map_err(|_| bad())?,
        None => 0,
    };
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::usage(format!("volume `{text}` must be > 0")));
    }
    Ok(m.log10() + e as f64)
}

/// `m×10^e` with a 12-significant-digit mantissa, from a base-10 log.
pub fn scientific_from_log10(log10: f64) -> String {
    let mut exp = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exp);
    if format!("{mantissa:.11}").starts_with("10") {
        mantissa /= 10.0;
        exp += 1.0;
    }
    format!("{mantissa:.11}×10^{exp}")
}

/// `10^log10` as a JSON number, or a sentinel string when it is not a
/// normal double.
pub fn value_from_log10(log10: f64) -> Value {
    let v = 10f64.powf(log10);
    if v.is_infinite() {
        json!(OVERFLOW_SENTINEL)
    } else if v < f64::MIN_POSITIVE {
        json!(UNDERFLOW_SENTINEL)
    } else {
        json!(v)
    }
}

/// Twelve significant digits, fixed notation where that stays readable.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor();
    if (-4.0..12.0).contains(&mag) {
        let decimals = (11.0 - mag) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn record(command: &str, inputs: Value, results: Value, seed: Option<u64>) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "seed": seed,
    })
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// What a command prints, and the exit code it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub output: String,
    pub exit_code: i32,
}

impl Rendered {
    fn ok(output: String) -> Self {
        Rendered { output, exit_code: EXIT_OK }
    }
}

fn bound_json(b: &BoundResult) -> Value {
    let log10_a = b.log10_a();
    json!({
        "n": b.n,
        "k": b.k,
        "log10_A": log10_a,
        "A_scientific": scientific_from_log10(log10_a),
        "A_value": value_from_log10(log10_a),
        "r_star": b.r_star,
        "log10_ball_volume": b.log_ball_volume / std::f64::consts::LN_10,
        "log10_packing_count": b.log_packing_count / std::f64::consts::LN_10,
        "optimizer_evals": b.optimizer_evals,
    })
}

fn bound_csv_row(b: &BoundResult) -> String {
    format!("{},{},{},{}\n", b.n, b.k, b.log10_a(), b.r_star)
}

fn cmd_bound(args: &BoundArgs) -> Result<Rendered> {
    let b = compute_bound(BoundQuery::new(args.n, args.k)?)?;
    let out = match args.out.format {
        Format::Json => to_json(&record(
            "bound",
            json!({"n": args.n, "k": args.k}),
            bound_json(&b),
            None,
        )),
        Format::Csv => format!("{TABLE_CSV_HEADER}\n{}", bound_csv_row(&b)),
        Format::Text => {
            let mut s = String::new();
            let l10 = std::f64::consts::LN_10;
            writeln!(s, "A(n={}, k={})", b.n, b.k).unwrap();
            writeln!(s, "  log10 A         {:.12}", b.log10_a()).unwrap();
            writeln!(s, "  A               {}", scientific_from_log10(b.log10_a())).unwrap();
            writeln!(s, "  r*              {}", sig12(b.r_star)).unwrap();
            writeln!(s, "  log10 Vol(B)    {:.12}", b.log_ball_volume / l10).unwrap();
            writeln!(s, "  log10 H         {:.12}", b.log_packing_count / l10).unwrap();
            s
        }
    };
    Ok(Rendered::ok(out))
}

fn cmd_table(args: &TableArgs) -> Result<Rendered> {
    let (n_lo, n_hi) = args.n;
    let (k_lo, k_hi) = args.k;
    let cells = (n_hi - n_lo + 1).saturating_mul(k_hi - k_lo + 1);
    if cells > MAX_TABLE_CELLS as u64 {
        return Err(Error::Usage(format!(
            "table has {cells} cells; at most {MAX_TABLE_CELLS} are allowed"
        )));
    }
    let narrow = |v: u64, what: &str| -> Result<u32> {
        u32::try_from(v).map_err(|_| Error::Usage(format!("{what} = {v} is too large")))
    };
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        for k in k_lo..=k_hi {
            let n = narrow(n, "n")? as usize;
            let k = narrow(k, "k")?;
            rows.push(compute_bound(BoundQuery::new(n, k)?)?);
        }
    }
    let out = match args.out.format {
        Format::Csv => {
            let mut s = format!("{TABLE_CSV_HEADER}\n");
            for b in &rows {
                s.push_str(&bound_csv_row(b));
            }
            s
        }
        Format::Json => to_json(&record(
            "table",
            json!({"n_min": n_lo, "n_max": n_hi, "k_min": k_lo, "k_max": k_hi}),
            Value::Array(rows.iter().map(bound_json).collect()),
            None,
        )),
        Format::Text => {
            let ks: Vec<u64> = (k_lo..=k_hi).collect();
            let values: Vec<Vec<String>> = rows
                .chunks(ks.len())
                .map(|row| row.iter().map(|b| format!("{:.6}", b.log10_a())).collect())
                .collect();
            let ns: Vec<String> = (n_lo..=n_hi).map(|n| n.to_string()).collect();
            text_matrix("log10 A(n,k)", &ns, &ks, &values)
        }
    };
    Ok(Rendered::ok(out))
}

/// Right-aligned matrix: one row per `n`, one column per `k`, every column
/// as wide as the widest entry in the whole table.
pub fn text_matrix(title: &str, ns: &[String], ks: &[u64], values: &[Vec<String>]) -> String {
    let label = ns.iter().map(|n| n.len()).max().unwrap_or(1).max("n\\k".len());
    let width = values
        .iter()
        .flatten()
        .map(String::len)
        .chain(ks.iter().map(|k| k.to_string().len()))
        .max()
        .unwrap_or(1);
    let mut s = format!("{title}\n");
    write!(s, "{:>label$}", "n\\k").unwrap();
    for k in ks {
        write!(s, "  {k:>width$}").unwrap();
    }
    s.push('\n');
    for (n, row) in ns.iter().zip(values) {
        write!(s, "{n:>label$}").unwrap();
        for v in row {
            write!(s, "  {v:>width$}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn cmd_hurwitz(args: &HurwitzArgs) -> Result<Rendered> {
    let log10_volume = parse_log10_positive(&args.volume)?;
    let b = compute_bound(BoundQuery::new(args.n, args.k)?)?;
    let factor = if args.out { 2 } else { 1 };
    let l10 = std::f64::consts::LN_10;
    let bound = group_order_bound_ln(log10_volume * l10, b.log_a, factor)?;
    let log10_ratio = log10_volume - b.log10_a() + f64::from(factor).log10();
    let (bound_value, note) = match bound {
        GroupOrderBound::Count(c) => (json!(c), None),
        GroupOrderBound::ExceedsTwoPow63 => (
            json!(SATURATION_SENTINEL),
            Some(format!(
                "the ratio is {} and does not fit below 2^63",
                scientific_from_log10(log10_ratio)
            )),
        ),
    };
    let bound_text = match bound {
        GroupOrderBound::Count(c) => c.to_string(),
        GroupOrderBound::ExceedsTwoPow63 => SATURATION_SENTINEL.to_string(),
    };
    let out = match args.output.format {
        Format::Json => {
            let mut results = Map::new();
            results.insert("log10_A".into(), json!(b.log10_a()));
            results.insert("A_scientific".into(), json!(scientific_from_log10(b.log10_a())));
            results.insert("factor".into(), json!(factor));
            results.insert("log10_ratio".into(), json!(log10_ratio));
            results.insert("ratio_scientific".into(), json!(scientific_from_log10(log10_ratio)));
            results.insert("bound".into(), bound_value);
            if let Some(note) = &note {
                results.insert("note".into(), json!(note));
            }
            to_json(&record(
                "hurwitz",
                json!({"volume": args.volume, "n": args.n, "k": args.k, "out": args.out}),
                Value::Object(results),
                None,
            ))
        }
        Format::Csv => format!(
            "n,k,log10_volume,factor,log10_ratio,bound\n{},{},{},{},{},{}\n",
            args.n, args.k, log10_volume, factor, log10_ratio, bound_text
        ),
        Format::Text => {
            let group = if args.out { "|H| for H < Out(π₁ M)" } else { "|G|" };
            let mut s = format!("{group} <= {bound_text}\n");
            writeln!(s, "  factor · Vol / A = {}", scientific_from_log10(log10_ratio)).unwrap();
            writeln!(s, "  A(n={}, k={}) = {}", args.n, args.k, scientific_from_log10(b.log10_a())).unwrap();
            if let Some(note) = note {
                writeln!(s, "  note: {note}").unwrap();
            }
            s
        }
    };
    Ok(Rendered::ok(out))
}

fn cmd_constants(args: &ConstantsArgs) -> Result<Rendered> {
    let tau = jorgensen_tau();
    let residual = 2.0 * tau * (1.0 + tau).powi(2) - 1.0;
    let mut entries: Vec<(String, Value, String)> = vec![
        ("tau".into(), json!(tau), sig12(tau)),
        ("tau_residual".into(), json!(residual), format!("{residual:e}")),
        (
            "tau_exceeds_0.2971".into(),
            json!(tau > TAU_THRESHOLD),
            (tau > TAU_THRESHOLD).to_string(),
        ),
    ];
    if let Some(k) = args.k {
        let c = c_k(k)?;
        entries.push((format!("c_{k}"), json!(c), sig12(c)));
    }
    if let Some(r) = args.r {
        let lk = log_kappa(r)?;
        let l10 = std::f64::consts::LN_10;
        entries.push(("log10_kappa".into(), json!(lk / l10), sig12(lk / l10)));
        let kappa = value_from_log10(lk / l10);
        let kappa_text = kappa.as_f64().map(sig12).unwrap_or_else(|| scientific_from_log10(lk / l10));
        entries.push(("kappa".into(), kappa, kappa_text));
        let dims: Vec<usize> = match args.n {
            Some(n) => vec![n],
            None => (2..=5).collect(),
        };
        for n in dims {
            let lv = log_ball_volume(n, r)? / l10;
            let v = value_from_log10(lv);
            let text = v.as_f64().map(sig12).unwrap_or_else(|| scientific_from_log10(lv));
            entries.push((format!("ball_volume_n{n}"), v, text));
        }
    }
    let out = match args.out.format {
        Format::Json => {
            let results: Map<String, Value> =
                entries.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect();
            to_json(&record(
                "constants",
                json!({"k": args.k, "r": args.r, "n": args.n}),
                Value::Object(results),
                None,
            ))
        }
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for (name, _, text) in &entries {
                writeln!(s, "{name},{text}").unwrap();
            }
            s
        }
        Format::Text => {
            let width = entries.iter().map(|e| e.0.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (name, _, text) in &entries {
                writeln!(s, "{name:<width$} = {text}").unwrap();
            }
            s
        }
    };
    Ok(Rendered::ok(out))
}

fn cmd_ball_volume(args: &BallVolumeArgs) -> Result<Rendered> {
    let log10_v = log_ball_volume(args.n, args.r)? / std::f64::consts::LN_10;
    let value = value_from_log10(log10_v);
    let out = match args.out.format {
        Format::Json => to_json(&record(
            "ball-volume",
            json!({"n": args.n, "r": args.r}),
            json!({
                "log10_volume": log10_v,
                "volume_scientific": scientific_from_log10(log10_v),
                "volume": value,
            }),
            None,
        )),
        Format::Csv => format!("n,r,log10_volume\n{},{},{}\n", args.n, args.r, log10_v),
        Format::Text => format!(
            "Vol B(n={}, r={}) = {}\n  log10 = {:.12}\n",
            args.n,
            args.r,
            value.as_f64().map(sig12).unwrap_or_else(|| scientific_from_log10(log10_v)),
            log10_v
        ),
    };
    Ok(Rendered::ok(out))
}

fn cmd_verify(args: &VerifyArgs) -> Result<Rendered> {
    let config = SuiteConfig::with_trials(args.trials, args.seed);
    let outcome = run_all(&config)?;
    let out = render_suite(&outcome, args, args.out.format);
    Ok(Rendered {
        output: out,
        exit_code: suite_exit_code(&outcome),
    })
}

/// `0` when every check passed, `1` otherwise.
pub fn suite_exit_code(outcome: &SuiteOutcome) -> i32 {
    if outcome.passed && outcome.reports.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    }
}

fn render_suite(outcome: &SuiteOutcome, args: &VerifyArgs, format: Format) -> String {
    let slack_text = |s: Option<f64>| s.map(|v| format!("{v:.9}")).unwrap_or_else(|| "-".into());
    let seed_text = |s: Option<u64>| s.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    match format {
        Format::Json => {
            let reports = serde_json::to_value(&outcome.reports).expect("reports serialize");
            to_json(&record(
                "verify",
                json!({"trials": args.trials, "seed": args.seed}),
                json!({"passed": outcome.passed, "reports": reports}),
                Some(args.seed),
            ))
        }
        Format::Csv => {
            let mut s = String::from("lemma_id,case,trials,violations,failures,min_slack,worst_seed\n");
            for r in &outcome.reports {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.lemma_id,
                    r.case,
                    r.trials,
                    r.violations,
                    r.failures,
                    r.min_slack.map(|v| v.to_string()).unwrap_or_default(),
                    r.worst_seed.map(|v| v.to_string()).unwrap_or_default()
                )
                .unwrap();
            }
            s
        }
        Format::Text => {
            let id_w = outcome.reports.iter().map(|r| r.lemma_id.len()).max().unwrap_or(0);
            let case_w = outcome.reports.iter().map(|r| r.case.len()).max().unwrap_or(0);
            let mut s = String::new();
            for r in &outcome.reports {
                writeln!(
                    s,
                    "{} {:<id_w$}  {:<case_w$}  trials={} violations={} min_slack={} worst_seed={}",
                    if r.passed() { "ok  " } else { "FAIL" },
                    r.lemma_id,
                    r.case,
                    r.trials,
                    r.violations,
                    slack_text(r.min_slack),
                    seed_text(r.worst_seed),
                )
                .unwrap();
            }
            let bad = outcome.reports.iter().filter(|r| !r.passed()).count();
            writeln!(
                s,
                "{} ({} cases, {} failing, seed {})",
                if outcome.passed { "PASS" } else { "FAIL" },
                outcome.reports.len(),
                bad,
                args.seed
            )
            .unwrap();
            s
        }
    }
}

impl Command {
    fn output_args(&self) -> &OutputArgs {
        match self {
            Command::Bound(a) => &a.out,
            Command::Table(a) => &a.out,
            Command::Hurwitz(a) => &a.output,
            Command::Constants(a) => &a.out,
            Command::BallVolume(a) => &a.out,
            Command::Verify(a) => &a.out,
        }
    }
}

/// Runs a parsed command without touching stdout or the filesystem.
pub fn execute(cli: &Cli) -> Result<Rendered> {
    match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Table(a) => cmd_table(a),
        Command::Hurwitz(a) => cmd_hurwitz(a),
        Command::Constants(a) => cmd_constants(a),
        Command::BallVolume(a) => cmd_ball_volume(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Exit code for a library error.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let rendered = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("orbivol: {e}");
            return exit_code_for(&e);
        }
    };
    if let Some(path) = &cli.command.output_args().output {
        if let Err(e) = std::fs::write(path, &rendered.output) {
            eprintln!("orbivol: cannot write {}: {e}", path.display());
            return EXIT_FAILURE;
        }
    }
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(rendered.output.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return EXIT_FAILURE;
    }
    rendered.exit_code
}
