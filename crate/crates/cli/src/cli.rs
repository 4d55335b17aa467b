//! Command-line surface. [`run_cli`] is the whole program minus process
//! plumbing, so it can be driven in-process by tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use srheat_core::free_lie::hall_basis;
use srheat_core::leading::{c0_contact3d, c0_cr, c0_riemannian, c0_steptwo, Measure, QuadOptions};
use srheat_core::mc_engine::{estimate_diag, Bandwidth, SimEstimate};
use srheat_core::steptwo::{heat_kernel_at, GroupPoint};
use srheat_core::vf_analyzer::{check_equiregular, DEFAULT_NMAX, DEFAULT_RANK_TOL};
use thiserror::Error;

use crate::acceptance;
use crate::frame_spec::{parse_frame, FrameError, FrameSpec};
use crate::structure::StructureSpec;

/// Seed used when neither `--seed` nor `SRHEAT_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub const EXIT_OK: i32 = 0;
/// `verify` found failing criteria.
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_CERTIFIED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Core(#[from] srheat_core::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use srheat_core::Error as E;
        match self {
            CliError::Core(E::HormanderNotCertified { .. }) => EXIT_NOT_CERTIFIED,
            CliError::Core(E::NonConvergence { .. } | E::DecayNotDetected { .. } | E::Consistency(_)) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_USAGE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "srheat", version, about = "Sub-Riemannian heat-kernel toolkit")]
struct Cli {
    /// Worker threads for quadrature and simulation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Case {
    Riemannian,
    Contact3d,
    Cr,
    Steptwo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureArg {
    Lebesgue,
    Popp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Lyndon basis of the free nilpotent Lie algebra.
    Basis {
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        step: usize,
        #[arg(long)]
        json: bool,
    },
    /// Hörmander filtration and equiregularity of a frame.
    Analyze {
        #[arg(long)]
        frame: PathBuf,
        /// Evaluation point "a,b,..."; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// JSON file holding an array of points.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NMAX)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Step-two heat kernel p_t(e, g) on a grid of points g.
    Kernel {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        time: f64,
        /// One "lo:hi:count" or "value" per coordinate (x then z), comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// CSV destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leading heat-kernel constant c0.
    C0 {
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "lebesgue")]
        measure: MeasureArg,
    },
    /// Monte Carlo estimate of p_t(e, e) on a step-two group.
    Simulate {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        substeps: usize,
        /// Overrides SRHEAT_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// "plug-in", one bandwidth, or one per coordinate "h1,h2,...".
        #[arg(long, default_value = "plug-in")]
        bandwidth: String,
        /// Print JSON instead of a CSV row.
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance suite.
    Verify {
        /// Smaller sample sizes; statistical criteria become less sensitive.
        #[arg(long)]
        quick: bool,
    },
}

/// Runs the program on `argv` (including the program name).
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                // The pool runs the command on a worker thread, so output is
                // buffered and copied out afterwards.
                let mut buf = Vec::new();
                let r = pool.install(|| dispatch(cli.command, &mut buf));
                let _ = out.write_all(&buf);
                r
            }
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(cli.command, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Core(srheat_core::Error::HormanderNotCertified { report, .. }) = &e {
                if let Ok(text) = serde_json::to_string_pretty(report) {
                    let _ = writeln!(err, "partial report: {text}");
                }
            }
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad coordinate '{v}' in point '{s}'")))
        })
        .collect()
}

fn load_structure(path: &Path) -> Result<srheat_core::steptwo::StructureConstants, CliError> {
    let spec: StructureSpec = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    spec.to_constants()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Basis { letters, step, json } => basis(letters, step, json, out),
        Command::Analyze {
            frame,
            point,
            points,
            nmax,
            tol,
            json,
        } => analyze(&frame, &point, points.as_deref(), nmax, tol, json, out),
        Command::Kernel {
            structure,
            time,
            grid,
            out: dest,
        } => kernel(&structure, time, &grid, dest.as_deref(), out),
        Command::C0 {
            case,
            dim,
            k,
            structure,
            measure,
        } => c0(case, dim, k, structure.as_deref(), measure, out),
        Command::Simulate {
            structure,
            time,
            samples,
            substeps,
            seed,
            bandwidth,
            json,
        } => simulate(&structure, time, samples, substeps, seed, &bandwidth, json, out),
        Command::Verify { quick } => verify(quick, out),
    }
}

#[derive(Serialize)]
struct BasisRow {
    index: usize,
    grade: usize,
    word: Vec<u32>,
    bracket: String,
}

#[derive(Serialize)]
struct BasisDoc {
    letters: usize,
    step: usize,
    grade_sizes: Vec<usize>,
    elements: Vec<BasisRow>,
}

fn basis(letters: usize, step: usize, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let b = hall_basis(letters, step)?;
    let rows: Vec<BasisRow> = (0..b.len())
        .map(|i| BasisRow {
            index: i,
            grade: b.grade(i),
            word: b.word(i).letters().to_vec(),
            bracket: b.bracket_string(i),
        })
        .collect();
    if json {
        write_json(
            out,
            &BasisDoc {
                letters,
                step,
                grade_sizes: b.grade_sizes(),
                elements: rows,
            },
        )?;
    } else {
        writeln!(out, "{:>5}  {:>5}  {:<16}  bracket", "index", "grade", "word")?;
        for r in rows {
            writeln!(out, "{:>5}  {:>5}  {:<16}  {}", r.index, r.grade, b.word(r.index).to_string(), r.bracket)?;
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    frame_path: &Path,
    point: &[String],
    points_path: Option<&Path>,
    nmax: usize,
    tol: f64,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let spec = FrameSpec::from_json(&read(frame_path)?)?;
    let frame = parse_frame(&spec)?;
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in point {
        pts.push(parse_point(p)?);
    }
    if let Some(path) = points_path {
        let extra: Vec<Vec<f64>> = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        pts.extend(extra);
    }
    if pts.is_empty() {
        pts = spec.points.clone();
    }
    if pts.is_empty() {
        return Err(CliError::Usage(
            "no evaluation points: use --point, --points or a \"points\" entry in the frame".into(),
        ));
    }
    if let Some(bad) = pts.iter().find(|p| p.len() != frame.dim()) {
        return Err(CliError::Usage(format!(
            "point {bad:?} has {} coordinates, the frame lives on R^{}",
            bad.len(),
            frame.dim()
        )));
    }
    let verdict = check_equiregular(&frame, &pts, nmax, tol)?;
    if json {
        write_json(out, &verdict)?;
    } else {
        for r in &verdict.reports {
            let fmt_opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
            let hs: Vec<String> = r
                .hall_set
                .iter()
                .map(|w| format!("({})", w.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            writeln!(
                out,
                "point {:?}: growth {:?}, step {}, nu {}, H = {{{}}}, |det B_H| = {}",
                r.point,
                r.growth,
                fmt_opt(r.step),
                fmt_opt(r.nu),
                hs.join(", "),
                r.det_b_h.map_or("-".to_string(), |v| format!("{:.6e}", v.abs()))
            )?;
        }
        let verdict_text = if verdict.equiregular { "equiregular" } else { "not equiregular" };
        match verdict.first_disagreement {
            Some(i) => writeln!(out, "verdict: {verdict_text} (first disagreement at point {})", i + 1)?,
            None => writeln!(out, "verdict: {verdict_text}")?,
        }
    }
    Ok(if verdict.all_certified { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

/// Parses "lo:hi:count" (count ≥ 1, endpoints included) or a single value.
fn parse_axis(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad grid axis '{s}': expected lo:hi:count or a value"));
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.parse().map_err(|_| bad())?]),
        [lo, hi, count] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            match count {
                0 => Err(bad()),
                1 => Ok(vec![lo]),
                _ => Ok((0..count)
                    .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                    .collect()),
            }
        }
        _ => Err(bad()),
    }
}

fn kernel(
    structure: &Path,
    time: f64,
    grid: &str,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let c = load_structure(structure)?;
    let (n, p) = (c.n(), c.p());
    let axes = grid.split(',').map(parse_axis).collect::<Result<Vec<_>, _>>()?;
    if axes.len() != n + p {
        return Err(CliError::Usage(format!(
            "grid has {} axes, the group has {} coordinates",
            axes.len(),
            n + p
        )));
    }
    let total: usize = axes.iter().map(Vec::len).product();
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut v = vec![0.0; n + p];
            for k in (0..n + p).rev() {
                v[k] = axes[k][idx % axes[k].len()];
                idx /= axes[k].len();
            }
            v
        })
        .collect();
    let opts = QuadOptions::default();
    let values = points
        .par_iter()
        .map(|v| heat_kernel_at(time, &c, &GroupPoint::new(v[..n].to_vec(), v[n..].to_vec()), &opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut buffer = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buffer);
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.extend((1..=p).map(|k| format!("z{k}")));
        header.extend(["value".to_string(), "error".to_string()]);
        w.write_record(&header)?;
        for (v, k) in points.iter().zip(&values) {
            let mut row: Vec<String> = v.iter().map(f64::to_string).collect();
            row.push(k.value.to_string());
            row.push(k.error.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    match dest {
        Some(path) => std::fs::write(path, &buffer).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?,
        None => out.write_all(&buffer)?,
    }
    Ok(EXIT_OK)
}

fn c0(
    case: Case,
    dim: Option<usize>,
    k: Option<usize>,
    structure: Option<&Path>,
    measure: MeasureArg,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let opts = QuadOptions::default();
    let missing = |flag: &str, case: &str| CliError::Usage(format!("--case {case} needs {flag}"));
    let result = match case {
        Case::Riemannian => c0_riemannian(dim.ok_or_else(|| missing("--dim", "riemannian"))?)?,
        Case::Contact3d => c0_contact3d(&opts)?,
        Case::Cr => c0_cr(k.ok_or_else(|| missing("--k", "cr"))?, &opts)?,
        Case::Steptwo => {
            let c = load_structure(structure.ok_or_else(|| missing("--structure", "steptwo"))?)?;
            let m = match measure {
                MeasureArg::Lebesgue => Measure::Lebesgue,
                MeasureArg::Popp => Measure::Popp,
            };
            c0_steptwo(&c, m, &opts)?
        }
    };
    write_json(out, &result)?;
    Ok(EXIT_OK)
}

/// `--seed`, else `SRHEAT_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("SRHEAT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("SRHEAT_SEED='{v}' is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth, CliError> {
    if s == "plug-in" {
        return Ok(Bandwidth::PlugIn);
    }
    let vals = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad bandwidth '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match vals.as_slice() {
        [h] => Bandwidth::Fixed(*h),
        _ => Bandwidth::PerAxis(vals),
    })
}

/// CSV header and row for a [`SimEstimate`]; bandwidths joined by ';'.
pub fn sim_estimate_csv(est: &SimEstimate) -> Result<String, CliError> {
    let mut buffer = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buffer);
        w.write_record(["value", "stderr", "N", "m", "h", "seed"])?;
        let h = est
            .h
            .as_ref()
            .map(|h| h.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        w.write_record([
            est.value.to_string(),
            est.stderr.to_string(),
            est.samples.to_string(),
            est.substeps.to_string(),
            h,
            est.seed.to_string(),
        ])?;
        w.flush()?;
    }
    String::from_utf8(buffer).map_err(|e| CliError::Output(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    structure: &Path,
    time: f64,
    samples: usize,
    substeps: usize,
    seed: Option<u64>,
    bandwidth: &str,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let c = load_structure(structure)?;
    let seed = resolve_seed(seed)?;
    let bw = parse_bandwidth(bandwidth)?;
    if let Bandwidth::PerAxis(h) = &bw {
        if h.len() != c.n() + c.p() {
            return Err(CliError::Usage(format!(
                "{} bandwidths given for {} coordinates",
                h.len(),
                c.n() + c.p()
            )));
        }
    }
    let est = estimate_diag(&c, time, samples, substeps, &bw, seed)?;
    if json {
        write_json(out, &est)?;
    } else {
        out.write_all(sim_estimate_csv(&est)?.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn verify(quick: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut all = true;
    for id in acceptance::CRITERIA {
        let r = acceptance::run(id, quick);
        all &= r.passed;
        writeln!(out, "{r}")?;
        out.flush()?;
    }
    writeln!(out, "{}", if all { "all criteria passed" } else { "some criteria FAILED" })?;
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}
