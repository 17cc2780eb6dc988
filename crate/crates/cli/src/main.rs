//! `arclab`: batch front end for the arithmetic-weight toolkit.
//!
//! Every subcommand reads/writes CSV series (`n,re,im`) or JSON summaries.
//! A plain `key = value` config file supplies defaults; command-line flags
//! override it. `--deterministic` (or `--threads 1`) pins the sequential
//! reference execution; outputs are then byte-identical across runs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use arclab::arcs::{farey_dyadic_slice, farey_slice, slice_to_json};
use arclab::ergodic::{bilinear_average, Observable, System, DEFAULT_ALPHA};
use arclab::error::{Error, Result};
use arclab::gowers::{u2_fft, u3_fft, u_norm_brute};
use arclab::major_arc::{ArcModel, MajorArcWeight, WeightMode};
use arclab::oscillation::{jump_count, variation, Trace};
use arclab::ps::{ps_members, tech_lemma_stats};
use arclab::sieve::{build_sieve, divisor_series, two_squares_series, von_mangoldt_series};
use arclab::spectra::{grid_intervals, nesting_violations, ShiftedGrid};
use arclab::verify::{run_all, Effort};
use arclab::Series;

#[derive(Parser)]
#[command(name = "arclab", version, about = "arithmetic weight laboratory")]
struct Cli {
    /// plain `key = value` defaults, overridden by flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// worker pool size (1 = sequential reference execution)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// force sequential reductions (implies --threads 1)
    #[arg(long, global = true)]
    deterministic: bool,
    /// output path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Mangoldt,
    Divisor,
    TwoSquares,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Slice,
    Cumulative,
    Dyadic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Fft,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate an arithmetic series on [1, N] as CSV.
    Sieve {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Emit a Farey slice (optionally a dyadic sub-slice) as JSON.
    Arcs {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        i: Option<u32>,
    },
    /// Evaluate a major-arc weight model on [1, N] as CSV.
    Weight {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value = "slice")]
        mode: Mode,
        #[arg(long)]
        i: Option<u32>,
    },
    /// Uniformity norm of a CSV series, by direct sum, FFT, or both.
    Gowers {
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// Floor-power sequence membership and difference-Fourier statistics.
    Ps {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        /// when set, also run the h-statistics at N = 2^i
        #[arg(long)]
        i: Option<u32>,
        /// good/bad margin for the h-statistics
        #[arg(long)]
        delta: Option<f64>,
    },
    /// r-variation and jump count of a CSV series read as a trace.
    Osc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Option<f64>,
        /// jump threshold
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Shifted dyadic grid intervals and their nesting check, as JSON.
    Spectra {
        /// window upper end (window is [0, n))
        #[arg(long)]
        n: Option<i64>,
        /// base scale K0
        #[arg(long)]
        q: Option<u64>,
        /// prime step modulus Delta
        #[arg(long)]
        i: Option<u32>,
        /// shift L, 0 <= L < Delta
        #[arg(long)]
        s: Option<u64>,
        /// residue class of the scale index
        #[arg(long)]
        r: Option<u32>,
    },
    /// Skew-product bilinear averages over seeded starting points.
    Ergodic {
        #[arg(long)]
        n: Option<u64>,
        /// rotation number (default sqrt(2) - 1)
        #[arg(long)]
        c: Option<f64>,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: Suite,
    },
}

/// `key = value` lines; `#` comments; later keys win.
fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line without '=': {line:?}")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Ctx {
    config: HashMap<String, String>,
    out: Option<PathBuf>,
    seed: u64,
}

impl Ctx {
    /// Flag value if given, else the config-file value, else an error.
    fn need<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.get(flag, key)?
            .ok_or_else(|| Error::invalid(format!("missing --{key} (flag or config)")))
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse(format!("config value for {key}: {raw:?}"))),
            None => Ok(None),
        }
    }

    fn or<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    fn emit_text(&self, body: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(body.as_bytes())?;
                if !body.ends_with('\n') {
                    writeln!(f)?;
                }
                Ok(())
            }
            None => {
                println!("{}", body.trim_end_matches('\n'));
                Ok(())
            }
        }
    }

    fn emit_json(&self, value: &serde_json::Value) -> Result<()> {
        self.emit_text(&serde_json::to_string_pretty(value).expect("serializable"))
    }

    fn emit_series(&self, series: &Series) -> Result<()> {
        let mut buf = Vec::new();
        series.write_csv(&mut buf)?;
        self.emit_text(std::str::from_utf8(&buf).expect("csv is utf-8"))
    }
}

fn model_of(m: Model, scale_n: f64) -> ArcModel {
    match m {
        Model::Mangoldt => ArcModel::Mangoldt,
        Model::Divisor => ArcModel::Divisor { scale_n },
        Model::TwoSquares => ArcModel::TwoSquares,
    }
}

/// Sieve series, cached as CSV under $ARITH_LAB_CACHE when set.
fn sieve_series(model: Model, n: u64) -> Result<Series> {
    let name = match model {
        Model::Mangoldt => "mangoldt",
        Model::Divisor => "divisor",
        Model::TwoSquares => "two_squares",
    };
    let cache = std::env::var_os("ARITH_LAB_CACHE").map(PathBuf::from);
    if let Some(dir) = &cache {
        let path = dir.join(format!("{name}_{n}.csv"));
        if path.is_file() {
            return Series::read_csv(name, BufReader::new(File::open(path)?));
        }
    }
    let series = match model {
        Model::Mangoldt => {
            let sieve = build_sieve(n as usize)?;
            von_mangoldt_series(&sieve, n as usize)?
        }
        Model::Divisor => divisor_series(n as usize)?,
        Model::TwoSquares => two_squares_series(n as usize)?,
    };
    if let Some(dir) = &cache {
        std::fs::create_dir_all(dir)?;
        let mut f = BufWriter::new(File::create(dir.join(format!("{name}_{n}.csv")))?);
        series.write_csv(&mut f)?;
    }
    Ok(series)
}

fn read_series(path: &Path) -> Result<Series> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into());
    Series::read_csv(label, BufReader::new(File::open(path)?))
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn gowers_json(label: &str, r: &arclab::Gowers) -> serde_json::Value {
    json!({
        "method": label,
        "s": r.s,
        "raw_power": f17(r.raw_power),
        "normalized": f17(r.normalized),
        "clamped": r.clamped,
    })
}

fn run(cli: Cli) -> Result<()> {
    let threads = if cli.deterministic { 1 } else { cli.threads.unwrap_or(0) };
    if cli.deterministic || cli.threads.is_some() {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx {
        config: match &cli.config {
            Some(path) => read_config(path)?,
            None => HashMap::new(),
        },
        out: cli.out.clone(),
        seed: cli.seed.unwrap_or(0),
    };

    match cli.cmd {
        Cmd::Sieve { model, n } => {
            let n = ctx.need(n, "n")?;
            ctx.emit_series(&sieve_series(model, n)?)
        }
        Cmd::Arcs { q, i } => {
            let q = ctx.need(q, "q")?;
            let value = match ctx.get(i, "i")? {
                Some(i) => {
                    let s = farey_dyadic_slice(q, i)?;
                    slice_to_json(q, Some(i), &s.fractions, &s.lcm)
                }
                None => {
                    let s = farey_slice(q)?;
                    slice_to_json(q, None, &s.fractions, &s.lcm)
                }
            };
            ctx.emit_json(&value)
        }
        Cmd::Weight { model, q, n, mode, i } => {
            let q = ctx.need(q, "q")?;
            let n = ctx.need(n, "n")?;
            let mode = match mode {
                Mode::Slice => WeightMode::Slice(q),
                Mode::Cumulative => WeightMode::Cumulative(q),
                Mode::Dyadic => WeightMode::Dyadic(q, ctx.need(i, "i")?),
            };
            let w = MajorArcWeight::<f64>::build(model_of(model, n as f64), mode)?;
            ctx.emit_series(&w.weight_series(1, n as i64)?)
        }
        Cmd::Gowers { s, input, method } => {
            let s = ctx.or(s, "s", 2)?;
            let f = read_series(&input)?;
            let mut parts = Vec::new();
            if method != Method::Fft {
                parts.push(gowers_json("brute", &u_norm_brute(&f, s)?));
            }
            if method != Method::Brute {
                let fast = match s {
                    2 => u2_fft(&f),
                    3 => u3_fft(&f)?,
                    _ => return Err(Error::invalid("fft path supports s in {2, 3}")),
                };
                parts.push(gowers_json("fft", &fast));
            }
            ctx.emit_json(&json!({ "input": f.label, "results": parts }))
        }
        Cmd::Ps { c, n, i, delta } => {
            let c = ctx.need(c, "c")?;
            let n = ctx.need(n, "n")?;
            let seq = ps_members(c, n)?;
            let expected = (n as f64).powf(1.0 / c).floor() as u64;
            let mut value = json!({
                "c": c,
                "n": n,
                "members": seq.members.len(),
                "expected": expected,
            });
            if let Some(log2_n) = ctx.get(i, "i")? {
                let eps = ctx.or(delta, "delta", 0.05)?;
                let stats = tech_lemma_stats(c, log2_n, 256, ctx.seed, eps)?;
                value["h_stats"] = json!({
                    "n": stats.n,
                    "sampled_h": stats.sampled_h,
                    "max_exponent": f17(stats.max_exponent),
                    "max_l1": f17(stats.max_l1),
                    "bad_fraction": f17(stats.bad_fraction),
                    "epsilon_prime": f17(stats.epsilon_prime),
                });
            }
            ctx.emit_json(&value)
        }
        Cmd::Osc { input, r, delta } => {
            let f = read_series(&input)?;
            let r = ctx.or(r, "r", 2.0)?;
            let lambda = ctx.or(delta, "delta", 1.0)?;
            let times: Vec<i64> = f.indices().collect();
            let trace = Trace::new(times, f.values.clone())?;
            ctx.emit_json(&json!({
                "input": f.label,
                "r": r,
                "variation": f17(variation(&trace, r)?),
                "lambda": lambda,
                "jumps": jump_count(&trace, lambda)?,
            }))
        }
        Cmd::Spectra { n, q, i, s, r } => {
            let grid = ShiftedGrid {
                k0: ctx.or(q, "q", 4)?,
                delta: ctx.or(i, "i", 2)?.into(),
                shift: ctx.or(s, "s", 0)?,
                residue: ctx.or(r, "r", 0)?,
                window: (0, ctx.need(n, "n")?),
            };
            let intervals = grid_intervals(&grid)?;
            ctx.emit_json(&json!({
                "k0": grid.k0,
                "delta": grid.delta,
                "shift": grid.shift,
                "residue": grid.residue,
                "window": [grid.window.0, grid.window.1],
                "intervals": intervals
                    .iter()
                    .map(|g| json!({ "lo": g.interval.lo, "len": g.interval.len }))
                    .collect::<Vec<_>>(),
                "nesting_violations": nesting_violations(&intervals),
            }))
        }
        Cmd::Ergodic { n, c } => {
            let n = ctx.or(n, "n", 100_000)?;
            let alpha = ctx.or(c, "c", DEFAULT_ALPHA)?;
            let sys = System::Skew { alpha };
            let f = Observable::constant(1.0, 2);
            let g = Observable::character(vec![0, 1]);
            let w = Series::from_real("flat", 1, vec![1.0; n as usize])?;
            // deterministic low-discrepancy starting points from the seed
            let mut rows = Vec::new();
            for k in 0..5u64 {
                let t = (ctx.seed.wrapping_add(k).wrapping_mul(0x9e3779b97f4a7c15) >> 11) as f64
                    / (1u64 << 53) as f64;
                let x0 = [t, (t * std::f64::consts::SQRT_2).fract()];
                let b = bilinear_average(&w, &sys, &f, &g, &x0, n, (1, -1))?;
                rows.push(json!({
                    "x0": [f17(x0[0]), f17(x0[1])],
                    "re": f17(b.re),
                    "im": f17(b.im),
                    "abs": f17(b.norm()),
                }));
            }
            ctx.emit_json(&json!({ "n": n, "alpha": f17(alpha), "averages": rows }))
        }
        Cmd::Verify { suite } => {
            let effort = match suite {
                Suite::Fast => Effort::Fast,
                Suite::Full => Effort::Full,
            };
            let reports = run_all(effort)?;
            let mut lines = String::new();
            let mut ok = true;
            for r in &reports {
                lines.push_str(&r.line());
                lines.push('\n');
                ok &= r.passed;
            }
            ctx.emit_text(&lines)?;
            if !ok {
                // distinct from argument (2) and capacity (1) failures
                std::process::exit(3);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arclab: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Parse(_) => ExitCode::from(2),
                Error::Capacity(_) | Error::Io(_) => ExitCode::from(1),
            }
        }
    }
}
