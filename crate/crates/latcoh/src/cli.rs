//! Command-line front end: one binary wiring every library capability —
//! field invariants, cohomology reports, Harder–Narasimhan polygons,
//! semistability verdicts, vanishing probes, moduli statistics, and zeta
//! evaluation — with machine-readable output.
//!
//! Reports are JSON envelopes `{"command", "inputs", "result",
//! "wall_time_s"}` with sorted keys, so identical inputs produce
//! byte-identical output apart from the wall-time value.  Every floating
//! quantity in a result is accompanied by an error field (certified bound,
//! statistical estimate, or round-off scale, labeled as such).  Exit codes:
//! `0` success, `1` usage error, `2` theorem-hypothesis violation, `3`
//! budget or tolerance failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::lattice::MetrizedLattice;
use crate::linalg::Mat;
use crate::{selftest, stability, theta, vanishing, zeta};

/// Entry point used by the `latcoh` binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout();
    run(&argv, &mut stdout)
}

/// Parse `argv` and execute; reports go to `out`, errors to stderr.
pub fn run(argv: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        // A reader that hangs up early (`latcoh … | head`) is not a fault of
        // ours: die quietly with the shell's 128 + SIGPIPE status instead of
        // spraying an io-error report onto stderr.
        Err(e) if is_broken_pipe(&e) => EXIT_PIPE,
        Err(e) => {
            let report = json!({
                "error": {"code": e.code(), "message": e.to_string()},
            });
            eprintln!("{}", serde_json::to_string_pretty(&report).unwrap());
            e.exit_code()
        }
    }
}

/// Exit status when stdout's reader disappears, mirroring 128 + SIGPIPE.
const EXIT_PIPE: i32 = 141;

fn is_broken_pipe(e: &Error) -> bool {
    match e {
        Error::Io(io) => io.kind() == std::io::ErrorKind::BrokenPipe,
        Error::Json(j) => j.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Argument grammar.
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "latcoh",
    version,
    about = "Arithmetic cohomology, stability, and zeta functions of metrized lattices",
    disable_help_subcommand = true
)]
struct Cli {
    /// key=value config file; explicit flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,
    /// Worker threads (flag, else LATCOH_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format: json (default), plain, or csv where documented
    #[arg(long, global = true)]
    output: Option<String>,
    /// Write the report to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact invariants of a base field (Q or a quadratic field)
    Field(FieldArgs),
    /// Arithmetic h0 of a metrized lattice with a certified tail
    H0(CohomArgs),
    /// Arithmetic h1 (duality-defined) with a certified tail
    H1(CohomArgs),
    /// Riemann-Roch report: h0 - h1 - (deg - (n/2) log |disc|) residual
    Rr(CohomArgs),
    /// Harder-Narasimhan polygon of the canonical filtration
    Hn(HnArgs),
    /// Semistability verdict (verdict travels in JSON; exit code stays 0)
    Semistable(SemistableArgs),
    /// Effective vanishing bounds and scaling decay probes
    Vanish {
        #[command(subcommand)]
        sub: VanishCmd,
    },
    /// Moduli-space statistics for semistable lattices
    Moduli {
        #[command(subcommand)]
        sub: ModuliCmd,
    },
    /// Non-abelian zeta evaluation (single point, residues, or grid)
    Zeta(ZetaArgs),
    /// Run the acceptance criteria and print a pass/fail table
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field label: Q, Q(sqrt 5), Q(sqrt -1), ...
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args, Debug)]
struct CohomArgs {
    /// Field label: Q, Q(sqrt 5), Q(sqrt -1), ...
    #[arg(long)]
    field: Option<String>,
    /// Lattice: diag:a,b,… | rows:a,b;c,d | random:RANK,SEED[,SPREAD[,DEG]]
    /// | standard:RANK | @file.json
    #[arg(long)]
    lattice: Option<String>,
    /// Certified absolute tolerance on the theta value
    #[arg(long)]
    tol: Option<f64>,
    /// Enumeration budget (lattice points)
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Debug)]
struct HnArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    /// Search-radius safety margin (>= 1)
    #[arg(long)]
    margin: Option<f64>,
    /// Compute the polygon of the restriction of scalars to Q instead
    #[arg(long)]
    restrict: bool,
}

#[derive(Args, Debug)]
struct SemistableArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    /// Slope slack for the verdict
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum VanishCmd {
    /// Effective h0/h1 upper bounds where the degree hypotheses hold
    Bounds(VanishBoundsArgs),
    /// Scaling decay probe: h1 along repeated negative twists
    Probe(VanishProbeArgs),
}

#[derive(Args, Debug)]
struct VanishBoundsArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    /// Skip the semistability check (caller asserts the hypothesis)
    #[arg(long)]
    assume_semistable: bool,
}

#[derive(Args, Debug)]
struct VanishProbeArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    /// Degree decrement per twist step (> 0)
    #[arg(long)]
    twist_deg: Option<f64>,
    /// Number of twist steps
    #[arg(long)]
    m_max: Option<usize>,
    /// Convergence target for h1
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum ModuliCmd {
    /// Sample semistable lattices at fixed degree; extremal h0 statistics
    Extremal(ModuliExtremalArgs),
}

#[derive(Args, Debug)]
struct ModuliExtremalArgs {
    #[arg(long)]
    field: Option<String>,
    /// O_F-rank of the stratum
    #[arg(long)]
    rank: Option<usize>,
    /// Fixed degree of the stratum
    #[arg(long)]
    degree: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also compute Serre-duality residuals of the extremal values
    #[arg(long)]
    duality: bool,
    /// Write the per-sample table (sample_id, degree, h0, semistable) here
    #[arg(long, value_name = "PATH")]
    csv: Option<String>,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    /// Optional mode: "residues" extrapolates both pole residues
    #[arg(value_parser = ["residues"])]
    mode: Option<String>,
    /// Moduli rank: 1 or 2
    #[arg(long)]
    rank: Option<u32>,
    /// Evaluation point, e.g. "2", "0.5+3i", "-1.25-0.5i"
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Rank-2 Monte-Carlo sample count (default: deterministic quadrature)
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the direct both-regions integration (requires Re s > 1)
    #[arg(long)]
    direct: bool,
    /// Evaluate on a grid: NRExNIM[xMC] over the ranges below (CSV output)
    #[arg(long)]
    grid: Option<String>,
    /// Real-part range for --grid, "a:b" (default 0:1)
    #[arg(long)]
    re_range: Option<String>,
    /// Imaginary-part range for --grid, "a:b" (default 0:30)
    #[arg(long)]
    im_range: Option<String>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Reduced corpus sizes for a fast smoke pass
    #[arg(long)]
    quick: bool,
    /// Comma-separated criterion ids, e.g. "1,3,7" (default: all)
    #[arg(long)]
    criteria: Option<String>,
}

// ---------------------------------------------------------------------------
// Config file: key=value lines, flags win, unknown keys rejected.
// ---------------------------------------------------------------------------

struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    fn load(path: Option<&str>) -> Result<ConfigMap> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("config {p}: {e}")))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "config {p}:{}: expected key=value, got {line:?}",
                        lineno + 1
                    ))
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(ConfigMap(map))
    }

    /// Fill `slot` from the config when the flag did not set it.  The key is
    /// consumed either way.
    fn take<T: FromStr>(&mut self, key: &str, slot: &mut Option<T>) -> Result<()> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                *slot = Some(v.parse::<T>().map_err(|_| {
                    Error::Config(format!("config key {key}: cannot parse {v:?}"))
                })?);
            }
        }
        Ok(())
    }

    fn take_flag(&mut self, key: &str, slot: &mut bool) -> Result<()> {
        if let Some(v) = self.0.remove(key) {
            let parsed: bool = v.parse().map_err(|_| {
                Error::Config(format!("config key {key}: expected true/false, got {v:?}"))
            })?;
            *slot = *slot || parsed;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.0.keys().next() {
            return Err(Error::Config(format!("unknown config key {k:?}")));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers.
// ---------------------------------------------------------------------------

/// Parse a complex number: "2", "-1.5", "0.5+3i", "0.5-3i", "3i", "-i".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(rest) = t.strip_suffix('i').or_else(|| t.strip_suffix('I')) {
        // Split the imaginary suffix from an optional real part at the last
        // sign that is neither leading nor part of an exponent.
        let split = rest
            .char_indices()
            .rev()
            .find(|(i, c)| {
                (*c == '+' || *c == '-')
                    && *i != 0
                    && !matches!(rest.as_bytes()[i - 1], b'e' | b'E')
            })
            .map(|(i, _)| i);
        let (re_str, im_str) = match split {
            Some(i) => (&rest[..i], &rest[i..]),
            None => ("", rest),
        };
        let re = if re_str.is_empty() { 0.0 } else { re_str.parse().map_err(|_| bad())? };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im_str.parse().map_err(|_| bad())?,
        };
        return Ok(Complex64::new(re, im));
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}

/// Build a lattice from the inline shorthand or a `@file.json` source.
fn parse_lattice(field: &NumberField, spec: &str) -> Result<MetrizedLattice> {
    let bad = |msg: String| Error::InvalidParameter(msg);
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("lattice file {path}: {e}")))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| bad(format!("lattice file {path}: {e}")))?;
        let rows = v
            .get("rows")
            .and_then(|r| r.as_array())
            .ok_or_else(|| bad(format!("lattice file {path}: missing \"rows\" array")))?;
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .map(|xs| xs.iter().filter_map(|x| x.as_f64()).collect::<Vec<f64>>())
                    .filter(|xs| !xs.is_empty())
                    .ok_or_else(|| bad(format!("lattice file {path}: malformed row")))
            })
            .collect::<Result<_>>()?;
        return MetrizedLattice::from_basis(field, Mat::from_rows(&rows)?);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("lattice {spec:?}: expected kind:args or @file")))?;
    match kind {
        "diag" => {
            let scales: Vec<f64> = rest
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad(format!("diag entry {x:?}"))))
                .collect::<Result<_>>()?;
            MetrizedLattice::diag(field, &scales)
        }
        "rows" => {
            let rows: Vec<Vec<f64>> = rest
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(|x| x.trim().parse().map_err(|_| bad(format!("row entry {x:?}"))))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            MetrizedLattice::from_basis(field, Mat::from_rows(&rows)?)
        }
        "standard" => {
            let rank: usize =
                rest.trim().parse().map_err(|_| bad(format!("standard rank {rest:?}")))?;
            if rank == 0 {
                return Err(Error::InvalidRank("rank must be positive".into()));
            }
            Ok(MetrizedLattice::standard(field, rank))
        }
        "random" => {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() < 2 || parts.len() > 4 {
                return Err(bad(format!(
                    "random lattice {rest:?}: expected RANK,SEED[,SPREAD[,DEGREE]]"
                )));
            }
            let rank: usize =
                parts[0].trim().parse().map_err(|_| bad(format!("rank {:?}", parts[0])))?;
            let seed: u64 =
                parts[1].trim().parse().map_err(|_| bad(format!("seed {:?}", parts[1])))?;
            let spread: f64 = match parts.get(2) {
                Some(x) => x.trim().parse().map_err(|_| bad(format!("spread {x:?}")))?,
                None => 1.0,
            };
            let degree: Option<f64> = match parts.get(3) {
                Some(x) => {
                    Some(x.trim().parse().map_err(|_| bad(format!("degree {x:?}")))?)
                }
                None => None,
            };
            MetrizedLattice::random(field, rank, seed, spread, degree)
        }
        _ => Err(bad(format!("unknown lattice kind {kind:?}"))),
    }
}

fn parse_range(spec: Option<&str>, default: (f64, f64)) -> Result<(f64, f64)> {
    match spec {
        None => Ok(default),
        Some(s) => {
            let (a, b) = s
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("range {s:?}: expected a:b")))?;
            let lo: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("range endpoint {a:?}")))?;
            let hi: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("range endpoint {b:?}")))?;
            if !(hi > lo) {
                return Err(Error::InvalidParameter(format!("range {s:?} is empty")));
            }
            Ok((lo, hi))
        }
    }
}

fn parse_grid(spec: &str) -> Result<(usize, usize, Option<u64>)> {
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "grid {spec:?}: expected NRExNIM or NRExNIMxMC"
        )));
    }
    let n_re: usize = parts[0]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("grid dimension {:?}", parts[0])))?;
    let n_im: usize = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("grid dimension {:?}", parts[1])))?;
    let mc: Option<u64> = match parts.get(2) {
        Some(x) => Some(
            x.parse()
                .map_err(|_| Error::InvalidParameter(format!("grid budget {x:?}")))?,
        ),
        None => None,
    };
    if n_re == 0 || n_im == 0 {
        return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
    }
    Ok((n_re, n_im, mc))
}

fn field_of(spec: &Option<String>) -> Result<NumberField> {
    NumberField::parse(spec.as_deref().unwrap_or("Q"))
}

fn cjson(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn zeta_eval_json(ev: &zeta::ZetaEval) -> Value {
    let error_model = match ev.method.as_str() {
        "monte-carlo" => "3-sigma statistical estimate",
        _ => "certified quadrature + truncation bound",
    };
    json!({
        "s": cjson(ev.s),
        "value": cjson(ev.value),
        "i_s": cjson(ev.i_s),
        "i_1ms": cjson(ev.i_1ms),
        "polar": cjson(ev.polar),
        "abs_error": ev.abs_error,
        "error_model": error_model,
        "method": ev.method,
        "sample_count": ev.sample_count,
    })
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

enum OutputMode {
    Json,
    Plain,
    Csv,
}

fn output_mode(s: &Option<String>) -> Result<OutputMode> {
    match s.as_deref() {
        None | Some("json") => Ok(OutputMode::Json),
        Some("plain") => Ok(OutputMode::Plain),
        Some("csv") => Ok(OutputMode::Csv),
        Some(other) => Err(Error::InvalidParameter(format!(
            "output {other:?}: expected json, plain, or csv"
        ))),
    }
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("LATCOH_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(mut cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = ConfigMap::load(cli.config.as_deref())?;
    cfg.take("threads", &mut cli.threads)?;
    cfg.take("output", &mut cli.output)?;
    cfg.take("out", &mut cli.out)?;
    init_threads(cli.threads);
    let mode = output_mode(&cli.output)?;
    let started = Instant::now();
    let is_h0_cmd = matches!(cli.command, Cmd::H0(_));

    let (name, inputs, result, exit): (&str, Value, Value, i32) = match &mut cli.command {
        Cmd::Field(a) => {
            cfg.take("field", &mut a.field)?;
            cfg.finish()?;
            let field = field_of(&a.field)?;
            let rec = serde_json::to_value(field.record()).expect("record serializes");
            (
                "field",
                json!({"field": field.label()}),
                json!({"record": rec, "error_model": "exact integer arithmetic"}),
                0,
            )
        }
        Cmd::H0(a) | Cmd::H1(a) => {
            let is_h0 = is_h0_cmd;
            cfg.take("field", &mut a.field)?;
            cfg.take("lattice", &mut a.lattice)?;
            cfg.take("tol", &mut a.tol)?;
            cfg.take("cap", &mut a.cap)?;
            cfg.finish()?;
            let field = field_of(&a.field)?;
            let spec = a.lattice.clone().ok_or_else(|| {
                Error::InvalidParameter("missing --lattice".into())
            })?;
            let lat = parse_lattice(&field, &spec)?;
            let tol = a.tol.unwrap_or(1e-12);
            let cap = a.cap.unwrap_or(100_000_000);
            let tv = if is_h0 {
                theta::h0_with_cap(&lat, tol, cap)?
            } else {
                theta::h1_with_cap(&lat, tol, cap)?
            };
            let key = if is_h0 { "h0" } else { "h1" };
            (
                if is_h0 { "h0" } else { "h1" },
                json!({"field": field.label(), "lattice": spec, "tol": tol, "cap": cap}),
                json!({
                    key: tv.h0,
                    "error": tv.h0_error,
                    "error_model": "certified enumeration tail + fp budget",
                    "theta_value": tv.value,
                    "theta_tail_bound": tv.tail_bound,
                    "radius": tv.radius,
                    "enumerated": tv.enumerated,
                    "degree": lat.degree(),
                    "covolume": lat.covolume(),
                }),
                0,
            )
        }
        Cmd::Rr(a) => {
            cfg.take("field", &mut a.field)?;
            cfg.take("lattice", &mut a.lattice)?;
            cfg.take("tol", &mut a.tol)?;
            cfg.take("cap", &mut a.cap)?;
            cfg.finish()?;
            let field = field_of(&a.field)?;
            let spec = a.lattice.clone().ok_or_else(|| {
                Error::InvalidParameter("missing --lattice".into())
            })?;
            let lat = parse_lattice(&field, &spec)?;
            let tol = a.tol.unwrap_or(1e-12);
            let rr = theta::rr_residual(&lat, tol)?;
            let rr_json = serde_json::to_value(&rr).expect("report serializes");
            (
                "rr",
                json!({"field": field.label(), "lattice": spec, "tol": tol}),
                json!({
                    "report": rr_json,
                    "error_model": "residual certified by the summed theta tails",
                }),
                0,
            )
        }
        Cmd::Hn(a) => {
            cfg.take("field", &mut a.field)?;
            cfg.take("lattice", &mut a.lattice)?;
            cfg.take("margin", &mut a.margin)?;
            cfg.take_flag("restrict", &mut a.restrict)?;
            cfg.finish()?;
            let field = field_of(&a.field)?;
            let spec = a.lattice.clone().ok_or_else(|| {
                Error::InvalidParameter("missing --lattice".into())
            })?;
            let lat = parse_lattice(&field, &spec)?;
            let margin = a.margin.unwrap_or(1.5);
            let poly = if a.restrict {
                stability::canonical_polygon_over_q(&lat)?
            } else {
                stability::hn_filtration_with_margin(&lat, margin)?
            };
            let poly_json = serde_json::to_value(&poly).expect("polygon serializes");
            (
                "hn",
                json!({
                    "field": field.label(), "lattice": spec,
                    "margin": margin, "restrict": a.restrict,
                }),
                json!({
                    "polygon": poly_json,
                    "error_model": "vertices exact up to fp round-off (<= 1e-12 · |deg|)",
                }),
                0,
            )
        }
        Cmd::Semistable(a) => {
            cfg.take("field", &mut a.field)?;
            cfg.take("lattice", &mut a.lattice)?;
            cfg.take("tol", &mut a.tol)?;
            cfg.take("margin", &mut a.margin)?;
            cfg.finish()?;
            let field = field_of(&a.field)?;
            let spec = a.lattice.clone().ok_or_else(|| {
                Error::InvalidParameter("missing --lattice".into())
            })?;
            let lat = parse_lattice(&field, &spec)?;
            let tol = a.tol.unwrap_or(1e-9);
            let margin = a.margin.unwrap_or(1.5);
            let best = stability::max_slope_sublattice(&lat, margin)?;
            let verdict = best.slope <= lat.slope() + tol;
            // The verdict travels in the JSON report; the exit code stays 0
            // so scripted pipelines can distinguish "unstable" from "failed".
            (
                "semistable",
                json!({"field": field.label(), "lattice": spec, "tol": tol, "margin": margin}),
                json!({
                    "semistable": verdict,
                    "slope": lat.slope(),
                    "max_subobject": {
                        "generators": best.generators.to_rows(),
                        "of_rank": best.of_rank,
                        "z_rank": best.rank_z,
                        "degree": best.degree,
                        "slope": best.slope,
                    },
                    "slope_gap": best.slope - lat.slope(),
                    "error_model": "slopes exact up to fp round-off (<= 1e-12 · |deg|)",
                }),
                0,
            )
        }
        Cmd::Vanish { sub } => match sub {
            VanishCmd::Bounds(a) => {
                cfg.take("field", &mut a.field)?;
                cfg.take("lattice", &mut a.lattice)?;
                cfg.take_flag("assume_semistable", &mut a.assume_semistable)?;
                cfg.finish()?;
                let field = field_of(&a.field)?;
                let spec = a.lattice.clone().ok_or_else(|| {
                    Error::InvalidParameter("missing --lattice".into())
                })?;
                let lat = parse_lattice(&field, &spec)?;
                let h0b = vanishing::effective_h0_bound(&lat, a.assume_semistable)?;
                let h1b = vanishing::effective_h1_bound(&lat, a.assume_semistable)?;
                (
                    "vanish bounds",
                    json!({
                        "field": field.label(), "lattice": spec,
                        "assume_semistable": a.assume_semistable,
                    }),
                    json!({
                        "degree": lat.degree(),
                        "h0_bound": h0b,
                        "h1_bound": h1b,
                        "error_model": "closed-form certified bounds (null = hypothesis not met)",
                    }),
                    0,
                )
            }
            VanishCmd::Probe(a) => {
                cfg.take("field", &mut a.field)?;
                cfg.take("lattice", &mut a.lattice)?;
                cfg.take("twist_deg", &mut a.twist_deg)?;
                cfg.take("m_max", &mut a.m_max)?;
                cfg.take("tol", &mut a.tol)?;
                cfg.finish()?;
                let field = field_of(&a.field)?;
                let spec = a.lattice.clone().ok_or_else(|| {
                    Error::InvalidParameter("missing --lattice".into())
                })?;
                let lat = parse_lattice(&field, &spec)?;
                let twist = a.twist_deg.unwrap_or(1.0);
                let m_max = a.m_max.unwrap_or(30);
                let tol = a.tol.unwrap_or(1e-12);
                let probe = vanishing::scaling_decay_probe(&lat, twist, m_max, tol)?;
                let probe_json = serde_json::to_value(&probe).expect("probe serializes");
                (
                    "vanish probe",
                    json!({
                        "field": field.label(), "lattice": spec,
                        "twist_deg": twist, "m_max": m_max, "tol": tol,
                    }),
                    json!({
                        "probe": probe_json,
                        "error_model": "per-step certified theta tails",
                    }),
                    0,
                )
            }
        },
        Cmd::Moduli { sub } => match sub {
            ModuliCmd::Extremal(a) => {
                cfg.take("field", &mut a.field)?;
                cfg.take("rank", &mut a.rank)?;
                cfg.take("degree", &mut a.degree)?;
                cfg.take("samples", &mut a.samples)?;
                cfg.take("seed", &mut a.seed)?;
                cfg.take_flag("duality", &mut a.duality)?;
                cfg.take("csv", &mut a.csv)?;
                cfg.finish()?;
                let field = field_of(&a.field)?;
                let rank = a.rank.unwrap_or(1);
                let degree = a.degree.unwrap_or(0.0);
                let samples = a.samples.unwrap_or(32);
                let seed = a.seed.unwrap_or(1);
                let est = vanishing::extremal_values_estimate(&field, rank, degree, samples, seed)?;
                if let Some(path) = &a.csv {
                    let mut csv = String::from("sample_id,degree,h0,semistable\n");
                    for p in &est.samples {
                        csv.push_str(&format!(
                            "{},{},{},true\n",
                            p.sample_id, p.degree, p.h0
                        ));
                    }
                    std::fs::write(path, csv).map_err(|e| {
                        Error::InvalidParameter(format!("csv {path}: {e}"))
                    })?;
                }
                let duality = if a.duality {
                    let (rmax, rmin) = vanishing::extremal_duality_residual(&est)?;
                    json!({"max_residual": rmax, "min_residual": rmin})
                } else {
                    Value::Null
                };
                let est_json = serde_json::to_value(&est).expect("estimate serializes");
                (
                    "moduli extremal",
                    json!({
                        "field": field.label(), "rank": rank, "degree": degree,
                        "samples": samples, "seed": seed, "csv": a.csv,
                    }),
                    json!({
                        "estimate": est_json,
                        "duality_residuals": duality,
                        "error_model": "per-sample theta tolerance 1e-12 · (1 + e^max(0,chi))",
                    }),
                    0,
                )
            }
        },
        Cmd::Zeta(a) => {
            cfg.take("rank", &mut a.rank)?;
            cfg.take("s", &mut a.s)?;
            cfg.take("tol", &mut a.tol)?;
            cfg.take("mc_samples", &mut a.mc_samples)?;
            cfg.take("seed", &mut a.seed)?;
            cfg.take_flag("direct", &mut a.direct)?;
            cfg.take("grid", &mut a.grid)?;
            cfg.take("re_range", &mut a.re_range)?;
            cfg.take("im_range", &mut a.im_range)?;
            cfg.finish()?;
            let rank = a.rank.unwrap_or(1);
            if rank != 1 && rank != 2 {
                return Err(Error::InvalidRank(format!("zeta rank {rank}: only 1 and 2")));
            }
            match run_zeta(a, rank, &mode, &mut cli.out, out)? {
                ZetaOut::Report(n, i, r, e) => (n, i, r, e),
                ZetaOut::AlreadyEmitted(code) => return Ok(code),
            }
        }
        Cmd::Selftest(a) => {
            cfg.take_flag("quick", &mut a.quick)?;
            cfg.take("criteria", &mut a.criteria)?;
            cfg.finish()?;
            let ids: Option<Vec<usize>> = match &a.criteria {
                None => None,
                Some(spec) => Some(
                    spec.split(',')
                        .map(|x| {
                            x.trim().parse::<usize>().map_err(|_| {
                                Error::InvalidParameter(format!("criterion id {x:?}"))
                            })
                        })
                        .collect::<Result<_>>()?,
                ),
            };
            let results = selftest::run_all(a.quick, ids.as_deref());
            let all_pass = results.iter().all(|r| r.pass);
            if matches!(mode, OutputMode::Plain) {
                for r in &results {
                    writeln!(
                        out,
                        "criterion {:2} {:45} {}  [{:8.2}s]  {}",
                        r.id,
                        r.name,
                        if r.pass { "PASS" } else { "FAIL" },
                        r.wall_time_s,
                        r.detail
                    )
                    .map_err(io_err)?;
                }
                writeln!(out, "{}", if all_pass { "all criteria passed" } else { "FAILURES" })
                    .map_err(io_err)?;
                return Ok(if all_pass { 0 } else { 3 });
            }
            let results_json = serde_json::to_value(&results).expect("results serialize");
            (
                "selftest",
                json!({"quick": a.quick, "criteria": a.criteria}),
                json!({"criteria": results_json, "all_pass": all_pass}),
                if all_pass { 0 } else { 3 },
            )
        }
    };

    let envelope = json!({
        "command": name,
        "inputs": inputs,
        "result": result,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    emit(&envelope, &mode, &cli.out, out)?;
    Ok(exit)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn emit(envelope: &Value, mode: &OutputMode, out_path: &Option<String>, out: &mut dyn Write) -> Result<()> {
    let text = match mode {
        OutputMode::Json => serde_json::to_string_pretty(envelope).expect("valid json"),
        OutputMode::Plain => render_plain(envelope),
        OutputMode::Csv => {
            return Err(Error::InvalidParameter(
                "csv output is supported only for zeta --grid and moduli --csv tables".into(),
            ))
        }
    };
    match out_path {
        Some(path) => std::fs::write(path, text + "\n").map_err(io_err),
        None => writeln!(out, "{text}").map_err(io_err),
    }
}

fn render_plain(v: &Value) -> String {
    let mut lines = Vec::new();
    flatten("", v, &mut lines);
    lines.join("\n")
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, val, lines);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), val, lines);
            }
        }
        other => lines.push(format!("{prefix} = {other}")),
    }
}

/// Outcome of the zeta subcommand: a report for the shared envelope, or
/// "the grid CSV already went out" (so the envelope must not clobber it).
enum ZetaOut {
    Report(&'static str, Value, Value, i32),
    AlreadyEmitted(i32),
}

/// Zeta subcommand: single evaluation, residues, or a CSV grid.  When the
/// grid consumes `--out` for its CSV table, `out_path` is cleared so the
/// JSON envelope falls through to stdout.
fn run_zeta(
    a: &ZetaArgs,
    rank: u32,
    mode: &OutputMode,
    out_path: &mut Option<String>,
    out: &mut dyn Write,
) -> Result<ZetaOut> {
    let tol = a.tol.unwrap_or(if rank == 1 { 1e-10 } else { 1e-4 });
    let seed = a.seed.unwrap_or(1);
    let mk_cfg = |mc: Option<u64>| zeta::Rank2Config {
        tol,
        method: match mc {
            Some(samples) => zeta::Rank2Method::MonteCarlo { samples, seed },
            None => zeta::Rank2Method::Quadrature,
        },
        t_max: None,
    };

    if a.mode.as_deref() == Some("residues") {
        let expected = if rank == 1 { 1.0 } else { std::f64::consts::PI / 3.0 - 1.0 };
        let cfg = mk_cfg(None);
        let f = |s: Complex64| -> Result<Complex64> {
            if rank == 1 {
                zeta::rank1_zeta(s, tol).map(|e| e.value)
            } else {
                zeta::rank2_zeta(s, &cfg).map(|e| e.value)
            }
        };
        let p1 = zeta::pole_check(&f, 1)?;
        let p0 = zeta::pole_check(&f, 0)?;
        return Ok(ZetaOut::Report(
            "zeta residues",
            json!({"rank": rank, "tol": tol}),
            json!({
                "pole_1": {"residue": p1.residue, "expected": expected, "table": p1.table},
                "pole_0": {"residue": p0.residue, "expected": -expected, "table": p0.table},
                "error_model": "Richardson extrapolation over the printed ladder",
            }),
            0,
        ));
    }

    if let Some(grid_spec) = &a.grid {
        let (n_re, n_im, mc) = parse_grid(grid_spec)?;
        let (re_lo, re_hi) = parse_range(a.re_range.as_deref(), (0.0, 1.0))?;
        let (im_lo, im_hi) = parse_range(a.im_range.as_deref(), (0.0, 30.0))?;
        let mut csv = String::from("re,im,value_re,value_im,value_abs,abs_error,method\n");
        let mut count = 0usize;
        for i in 0..n_re {
            for j in 0..n_im {
                let re = if n_re == 1 {
                    re_lo
                } else {
                    re_lo + (re_hi - re_lo) * i as f64 / (n_re - 1) as f64
                };
                let im = if n_im == 1 {
                    im_lo
                } else {
                    im_lo + (im_hi - im_lo) * j as f64 / (n_im - 1) as f64
                };
                let s = Complex64::new(re, im);
                // Poles are skipped rather than aborting the whole grid.
                let ev = if rank == 1 {
                    zeta::rank1_zeta(s, tol)
                } else {
                    zeta::rank2_zeta(s, &mk_cfg(mc))
                };
                let ev = match ev {
                    Ok(e) => e,
                    Err(Error::PoleArgument(_)) => continue,
                    Err(other) => return Err(other),
                };
                csv.push_str(&format!(
                    "{re},{im},{},{},{},{},{}\n",
                    ev.value.re,
                    ev.value.im,
                    ev.value.norm(),
                    ev.abs_error,
                    ev.method
                ));
                count += 1;
            }
        }
        let written = match out_path.take() {
            Some(path) => {
                std::fs::write(&path, &csv).map_err(io_err)?;
                json!(path)
            }
            None => {
                if !matches!(mode, OutputMode::Csv) {
                    return Err(Error::InvalidParameter(
                        "zeta --grid needs --out PATH or --output csv".into(),
                    ));
                }
                write!(out, "{csv}").map_err(io_err)?;
                return Ok(ZetaOut::AlreadyEmitted(0));
            }
        };
        return Ok(ZetaOut::Report(
            "zeta grid",
            json!({
                "rank": rank, "grid": grid_spec, "tol": tol,
                "re_range": [re_lo, re_hi], "im_range": [im_lo, im_hi],
                "mc_samples": mc,
            }),
            json!({
                "points": count,
                "csv_path": written,
                "error_model": "per-point abs_error column",
            }),
            0,
        ));
    }

    let s_spec = a
        .s
        .clone()
        .ok_or_else(|| Error::InvalidParameter("missing --s (or use residues / --grid)".into()))?;
    let s = parse_complex(&s_spec)?;
    let ev = match (rank, a.direct) {
        (1, false) => zeta::rank1_zeta(s, tol)?,
        (1, true) => zeta::rank1_zeta_direct(s, tol)?,
        (2, false) => zeta::rank2_zeta(s, &mk_cfg(a.mc_samples))?,
        (2, true) => zeta::rank2_zeta_direct(s, tol)?,
        _ => unreachable!("rank validated above"),
    };
    let mut result = zeta_eval_json(&ev);
    if rank == 1 {
        if let Ok(oracle) = zeta::xi_reference(s) {
            result["xi_reference"] = cjson(oracle);
            result["xi_gap"] = json!((ev.value - oracle).norm());
        }
    }
    Ok(ZetaOut::Report(
        "zeta",
        json!({
            "rank": rank, "s": s_spec, "tol": tol,
            "mc_samples": a.mc_samples, "direct": a.direct,
        }),
        result,
        0,
    ))
}
