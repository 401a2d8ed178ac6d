//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 result produced by a fallback
//! solver (with a warning), 3 internal assertion failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::binary::sample_curve;
use crate::channel::{make_standard, StandardChannel, WiretapChannel};
use crate::classify::{classify_with, improving_prefix_with, ClassificationReport, ImprovingPrefix};
use crate::error::{Error, Result};
use crate::io::{dump_channel, load_channel, region_sidecar, to_report_json};
use crate::oracle::{brute_binary, brute_chain};
use crate::region::{secrecy_capacity_with, trace_region_with};
use crate::settings::Settings;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FALLBACK: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wiretap", version, about = "Rate-equivocation regions of discrete memoryless wiretap channels")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Place the pair among the orderings (less noisy, more capable, dominantly symmetric).
    Classify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Trace the rate-equivocation boundary; writes region.csv and region.json.
    Region {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        knobs: Knobs,
        /// Number of positive slopes in the geometric mu grid.
        #[arg(long)]
        mu_count: Option<usize>,
        /// Largest slope of the geometric mu grid.
        #[arg(long)]
        mu_max: Option<f64>,
        /// Explicit comma-separated slopes, overriding the geometric grid.
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Sample f and f_mu of a binary-input pair as CSV.
    Curve {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Number of grid cells on [0, 1].
        #[arg(long, default_value_t = 10_000)]
        resolution: usize,
        /// Output file (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Capacities of both channels.
    Capacity {
        #[command(flatten)]
        source: Source,
    },
    /// Secrecy capacity and an achieving chain.
    Secrecy {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Exhaustive grid solvers for binary inputs.
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        /// Search chains with this many rate-splitting states instead of (lambda, p1, p2).
        #[arg(long, requires = "card_v")]
        card_u: Option<usize>,
        #[arg(long, requires = "card_u")]
        card_v: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ChannelChoice {
    /// Channel JSON: {"name"?, "main": [[..]], "eavesdropper": [[..]]}.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Main BSC(EPS), eavesdropper BEC(ALPHA).
    #[arg(long, num_args = 2, value_names = ["EPS", "ALPHA"])]
    bsc_bec: Option<Vec<f64>>,
    /// Main BEC(ALPHA), eavesdropper BSC(EPS).
    #[arg(long, num_args = 2, value_names = ["ALPHA", "EPS"])]
    bec_bsc: Option<Vec<f64>>,
    /// Quaternary van Dijk pair.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "R"])]
    vandijk: Option<Vec<f64>>,
    /// Main BSC(EPS), ternary eavesdropper with rows [1-P-Q, Q, P], [Q, 1-P-Q, P].
    #[arg(long, num_args = 3, value_names = ["P", "Q", "EPS"])]
    bsc_ternary: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct Source {
    #[command(flatten)]
    choice: ChannelChoice,
    /// Also write the channel as JSON to this path.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Knobs {
    /// Simplex grid resolution for classification searches.
    #[arg(long)]
    grid_resolution: Option<usize>,
    /// Sign tolerance of classification decisions.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Seed for random restarts and random test inputs.
    #[arg(long)]
    seed: Option<u64>,
}

impl Knobs {
    fn settings(&self) -> Result<Settings> {
        let mut s = Settings {
            grid_resolution: self.grid_resolution,
            ..Settings::default()
        };
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "tolerance",
                    value: t,
                    reason: "must lie in (0, 1)",
                });
            }
            s.tau_class = t;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        Ok(s)
    }
}

impl Source {
    fn load(&self) -> Result<WiretapChannel> {
        let c = &self.choice;
        let w = if let Some(path) = &c.file {
            load_channel(path)?
        } else {
            let kind = if let Some(v) = &c.bsc_bec {
                StandardChannel::BscBec { eps: v[0], alpha: v[1] }
            } else if let Some(v) = &c.bec_bsc {
                StandardChannel::BecBsc { alpha: v[0], eps: v[1] }
            } else if let Some(v) = &c.vandijk {
                StandardChannel::VanDijk { p: v[0], q: v[1], r: v[2] }
            } else if let Some(v) = &c.bsc_ternary {
                StandardChannel::BscTernary { p: v[0], q: v[1], eps: v[2] }
            } else {
                return Err(Error::Parse("no channel source given".into()));
            };
            make_standard(kind)?
        };
        if let Some(path) = &self.dump {
            write_file(path, &dump_channel(&w))?;
        }
        Ok(w)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    channel: Option<&'a str>,
    /// Strongest ordering that holds, or "none".
    placement: &'static str,
    report: ClassificationReport,
    improving_prefix: Option<ImprovingPrefix>,
}

fn placement(r: &ClassificationReport) -> &'static str {
    match (r.less_noisy, r.more_capable, r.dominantly_cyclic) {
        (true, _, true) => "less-noisy, dominantly-symmetric",
        (true, _, false) => "less-noisy",
        (false, true, true) => "more-capable, dominantly-symmetric",
        (false, true, false) => "more-capable",
        (false, false, true) => "dominantly-symmetric",
        (false, false, false) => "none",
    }
}

#[derive(Serialize)]
struct CapacityOutput<'a> {
    channel: Option<&'a str>,
    c_b: f64,
    c_e: f64,
    main_input: &'a [f64],
    eavesdropper_input: &'a [f64],
    main_gap: f64,
    eavesdropper_gap: f64,
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INPUT;
        }
        // Fails only if the global pool already exists, e.g. across repeated
        // in-process runs; the existing pool is then reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Assertion(_) | Error::NonConvergence { .. } => EXIT_ASSERTION,
        _ => EXIT_INPUT,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::Io(e.to_string()))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Classify { source, knobs } => {
            let w = source.load()?;
            let s = knobs.settings()?;
            let report = classify_with(&w, &s);
            let improving_prefix = if report.more_capable { None } else { improving_prefix_with(&w, &s) };
            let o = ClassifyOutput {
                channel: w.name.as_deref(),
                placement: placement(&report),
                report,
                improving_prefix,
            };
            emit(out, &to_report_json(&o)?)?;
            Ok(EXIT_OK)
        }
        Command::Region {
            source,
            knobs,
            mu_count,
            mu_max,
            mu,
            output,
        } => {
            let w = source.load()?;
            let mut s = knobs.settings()?;
            if let Some(c) = mu_count {
                s.mu_count = c;
            }
            if let Some(m) = mu_max {
                if !(m > s.mu_min) {
                    return Err(Error::InvalidParameter {
                        name: "mu-max",
                        value: m,
                        reason: "must exceed the smallest positive slope 1e-3",
                    });
                }
                s.mu_max = m;
            }
            let grid = mu.unwrap_or_else(|| s.mu_grid());
            let b = trace_region_with(&w, &grid, &s)?;
            std::fs::create_dir_all(&output).map_err(|e| Error::Io(format!("{}: {e}", output.display())))?;
            write_file(&output.join("region.csv"), &b.to_csv())?;
            write_file(&output.join("region.json"), &region_sidecar(&w, &b)?)?;
            for msg in &b.warnings {
                eprintln!("warning: {msg}");
            }
            emit(out, &format!("wrote {} points to {}", b.points.len(), output.display()))?;
            Ok(if b.warnings.is_empty() { EXIT_OK } else { EXIT_FALLBACK })
        }
        Command::Curve {
            source,
            mu,
            resolution,
            output,
        } => {
            let w = source.load()?;
            if !(mu >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "mu",
                    value: mu,
                    reason: "must be non-negative",
                });
            }
            let csv = sample_curve(&w, mu, resolution)?.to_csv();
            match output {
                Some(path) => write_file(&path, &csv)?,
                None => out.write_all(csv.as_bytes()).map_err(|e| Error::Io(e.to_string()))?,
            }
            Ok(EXIT_OK)
        }
        Command::Capacity { source } => {
            let w = source.load()?;
            let o = CapacityOutput {
                channel: w.name.as_deref(),
                c_b: w.c_b(),
                c_e: w.c_e(),
                main_input: w.main_capacity().input.weights(),
                eavesdropper_input: w.eavesdropper_capacity().input.weights(),
                main_gap: w.main_capacity().gap,
                eavesdropper_gap: w.eavesdropper_capacity().gap,
            };
            emit(out, &to_report_json(&o)?)?;
            Ok(EXIT_OK)
        }
        Command::Secrecy { source, knobs } => {
            let w = source.load()?;
            let sc = secrecy_capacity_with(&w, &knobs.settings()?);
            emit(out, &to_report_json(&sc)?)?;
            Ok(EXIT_OK)
        }
        Command::Oracle {
            source,
            mu,
            resolution,
            card_u,
            card_v,
        } => {
            let w = source.load()?;
            let text = match (card_u, card_v) {
                (Some(u), Some(v)) => to_report_json(&brute_chain(&w, mu, u, v, resolution)?)?,
                _ => to_report_json(&brute_binary(&w, mu, resolution)?)?,
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("wiretap").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn capacity_command() {
        let (code, out) = run_str(&["capacity", "--bsc-bec", "0.1", "0.6"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["c_e"].as_f64().unwrap() - 0.4).abs() < 1e-9);
    }

    #[test]
    fn input_errors() {
        assert_eq!(run_str(&["capacity", "--bsc-bec", "0.7", "0.6"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["capacity"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["capacity", "--bsc-bec", "0.1"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["curve", "--vandijk", "0.1", "0.2", "0.3"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn placement_names() {
        for (args, expected) in [
            (["--bec-bsc", "0.45", "0.1"], "more-capable"),
            (["--bsc-bec", "0.1", "0.6"], "dominantly-symmetric"),
            (["--bsc-bec", "0.1", "1"], "less-noisy, dominantly-symmetric"),
            (["--bsc-bec", "0.1", "0.3"], "none"),
        ] {
            let mut cmd = vec!["classify"];
            cmd.extend(args);
            let (code, out) = run_str(&cmd);
            assert_eq!(code, EXIT_OK);
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["placement"], expected, "{args:?}");
        }
    }
}
