//! Command-line surface.
//!
//! One thin binary with six subcommands: `equiv`, `dist1`, `approx`,
//! `bernoulli`, `gadget`, and `sample`. Exact results are printed as `p/q`
//! rationals (with a `~=` float rendering on a separate line); identical
//! invocations produce byte-identical output. Exit codes: 0 success, 1
//! analysis refused (`--strict` with an undecided result), 2 input error.

use crate::bernoulli::{self, solve_f};
use crate::bounds::{
    approximate, threshold_verdict, ApproxStatus, ThresholdVerdict, DEFAULT_MAX_DEPTH,
};
use crate::dist_one::distance_one;
use crate::format::{parse_lmc, serialize_lmc};
use crate::gadgets::{closed_form, generate, GadgetSpec};
use crate::linalg::distance_zero;
use crate::model::ProblemInstance;
use crate::rational::{format_rational, parse_rational, rational_to_f64, Rational};
use crate::simulate::estimate_distance_mc;
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "lmcdist",
    version,
    about = "Decide, bound, and estimate the total variation distance between labelled Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s)
        .ok_or_else(|| format!("`{s}` is not a rational (use p/q, an integer, or a decimal)"))
}

#[derive(Subcommand)]
enum Command {
    /// Decide language equivalence (distance 0) of the two initial distributions
    Equiv { file: PathBuf },
    /// Decide whether the distance is exactly 1
    Dist1 { file: PathBuf },
    /// Enclose the distance between certified rational bounds
    Approx {
        file: PathBuf,
        /// Target bracket width
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        /// Depth cap; DepthCapped brackets are still sound
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Print one line per depth
        #[arg(long)]
        history: bool,
        /// Also report whether the distance is above or below this value
        #[arg(long, value_parser = rational_arg)]
        threshold: Option<Rational>,
        /// Exit with status 1 when the analysis is inconclusive
        #[arg(long)]
        strict: bool,
        /// Write depth,lower,upper rows (floats) to this file
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads for the per-class coupling programs
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate the Bernoulli-convolution distance d_theta(x)
    Bernoulli {
        #[arg(long, value_parser = rational_arg)]
        theta: Rational,
        #[arg(long, value_parser = rational_arg)]
        x: Rational,
        /// Grid points (odd)
        #[arg(long, default_value_t = 4097)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write x,f,d rows to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate an example chain and write it in the .lmc format
    Gadget {
        #[arg(value_enum)]
        family: Family,
        /// Family parameter x (repeat for `parallel`)
        #[arg(long = "x", value_parser = rational_arg)]
        xs: Vec<Rational>,
        /// Contraction parameter for `bernoulli-chain`
        #[arg(long, value_parser = rational_arg)]
        theta: Option<Rational>,
        /// Naturals s_i for `sqrt-sum` (repeat)
        #[arg(long = "s")]
        s: Vec<u64>,
        /// Threshold numerator for `sqrt-sum`
        #[arg(long)]
        t: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Monte-Carlo estimate of the distance via likelihood ratios
    Sample {
        file: PathBuf,
        /// Run length (letters per sampled run)
        #[arg(long)]
        len: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Worker threads for the sample batches
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Example1,
    TwoState,
    Irrational,
    Parallel,
    BernoulliChain,
    SqrtSum,
}

/// Runs the CLI against explicit arguments and output streams; returns the
/// process exit code.
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(String::as_str)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{rendered}");
                0
            } else {
                let _ = write!(err, "{rendered}");
                2
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<ProblemInstance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_lmc(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                return Err("--jobs must be at least 1".into());
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| format!("cannot build thread pool: {e}"))?;
            Ok(pool.install(f))
        }
    }
}

fn dispatch<O: Write>(command: Command, out: &mut O) -> Result<i32, String> {
    match command {
        Command::Equiv { file } => {
            let inst = load(&file)?;
            let verdict = if distance_zero(&inst) {
                "equivalent"
            } else {
                "not-equivalent"
            };
            writeln!(out, "{verdict}").map_err(|e| e.to_string())?;
            Ok(0)
        }
        Command::Dist1 { file } => {
            let inst = load(&file)?;
            let verdict = if distance_one(&inst) {
                "distance=1"
            } else {
                "distance<1"
            };
            writeln!(out, "{verdict}").map_err(|e| e.to_string())?;
            Ok(0)
        }
        Command::Approx {
            file,
            eps,
            max_depth,
            history,
            threshold,
            strict,
            csv,
            jobs,
        } => {
            let inst = load(&file)?;
            let report = with_pool(jobs, || approximate(&inst, &eps, max_depth))?
                .map_err(|e| e.to_string())?;
            writeln!(
                out,
                "lower={} upper={} status={}",
                format_rational(&report.bracket.lower),
                format_rational(&report.bracket.upper),
                report.status
            )
            .map_err(|e| e.to_string())?;
            writeln!(
                out,
                "approx: lower ~= {} upper ~= {}",
                rational_to_f64(&report.bracket.lower),
                rational_to_f64(&report.bracket.upper)
            )
            .map_err(|e| e.to_string())?;
            let mut refused = false;
            if let Some(tau) = &threshold {
                let verdict = threshold_verdict(&report.bracket, tau);
                writeln!(out, "threshold={verdict}").map_err(|e| e.to_string())?;
                refused |= verdict == ThresholdVerdict::Undecided;
            }
            if history {
                for b in &report.history {
                    writeln!(
                        out,
                        "depth={} lower={} upper={}",
                        b.depth,
                        format_rational(&b.lower),
                        format_rational(&b.upper)
                    )
                    .map_err(|e| e.to_string())?;
                }
            }
            if let Some(path) = csv {
                let mut rows = String::from("depth,lower,upper\n");
                for b in &report.history {
                    rows.push_str(&format!(
                        "{},{},{}\n",
                        b.depth,
                        rational_to_f64(&b.lower),
                        rational_to_f64(&b.upper)
                    ));
                }
                std::fs::write(&path, rows)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            refused |= report.status == ApproxStatus::DepthCapped;
            Ok(if strict && refused { 1 } else { 0 })
        }
        Command::Bernoulli {
            theta,
            x,
            grid,
            tol,
            csv,
        } => {
            let theta_f = rational_to_f64(&theta);
            let x_f = rational_to_f64(&x);
            if !(-0.5..=0.5).contains(&x_f) {
                return Err(format!("x must lie in [-1/2, 1/2], got {x_f}"));
            }
            let report = solve_f(theta_f, grid, tol).map_err(|e| e.to_string())?;
            writeln!(out, "d_theta={}", 0.5 + 0.5 * report.f.eval(x_f))
                .map_err(|e| e.to_string())?;
            if let Some(path) = csv {
                let file = std::fs::File::create(&path)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                bernoulli::write_grid_csv(&report.f, file)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(0)
        }
        Command::Gadget {
            family,
            xs,
            theta,
            s,
            t,
            output,
        } => {
            let spec = build_spec(family, xs, theta, s, t)?;
            let gadget = generate(&spec).map_err(|e| e.to_string())?;
            std::fs::write(&output, serialize_lmc(&gadget.instance))
                .map_err(|e| format!("cannot write {}: {e}", output.display()))?;
            writeln!(out, "wrote {}", output.display()).map_err(|e| e.to_string())?;
            if let Ok(value) = closed_form(&spec) {
                writeln!(out, "closed_form={} (~{})", value, value.to_f64())
                    .map_err(|e| e.to_string())?;
            }
            if let Some(tau) = gadget.threshold {
                writeln!(out, "threshold={}", format_rational(&tau)).map_err(|e| e.to_string())?;
            }
            Ok(0)
        }
        Command::Sample {
            file,
            len,
            samples,
            seed,
            jobs,
        } => {
            if len == 0 || samples == 0 {
                return Err("--len and --samples must be at least 1".into());
            }
            let inst = load(&file)?;
            let est = with_pool(jobs, || estimate_distance_mc(&inst, len, samples, seed))?;
            writeln!(out, "estimate={} std_error={}", est.estimate, est.std_error)
                .map_err(|e| e.to_string())?;
            Ok(0)
        }
    }
}

fn build_spec(
    family: Family,
    xs: Vec<Rational>,
    theta: Option<Rational>,
    s: Vec<u64>,
    t: Option<u64>,
) -> Result<GadgetSpec, String> {
    match family {
        Family::Example1 => Ok(GadgetSpec::Example1),
        Family::TwoState => Ok(GadgetSpec::TwoState),
        Family::Irrational => match xs.as_slice() {
            [x] => Ok(GadgetSpec::Irrational(x.clone())),
            _ => Err("irrational takes exactly one --x".into()),
        },
        Family::Parallel => {
            if xs.is_empty() {
                Err("parallel takes at least one --x".into())
            } else {
                Ok(GadgetSpec::Parallel(xs))
            }
        }
        Family::BernoulliChain => {
            let theta = theta.ok_or("bernoulli-chain requires --theta")?;
            match xs.as_slice() {
                [x] => Ok(GadgetSpec::BernoulliChain {
                    theta,
                    x: x.clone(),
                }),
                _ => Err("bernoulli-chain takes exactly one --x".into()),
            }
        }
        Family::SqrtSum => {
            let t = t.ok_or("sqrt-sum requires --t")?;
            if s.is_empty() {
                Err("sqrt-sum takes at least one --s".into())
            } else {
                Ok(GadgetSpec::SqrtSum { s, t })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("lmcdist".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_flags_exit_2() {
        let (code, _, err) = run_args(&["approx", "--no-such-flag"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_args(&["equiv", "/nonexistent/chain.lmc"]);
        assert_eq!(code, 2);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("equiv"));
        assert!(out.contains("bernoulli"));
    }

    #[test]
    fn gadget_families_validate_their_parameters() {
        let (code, _, err) = run_args(&["gadget", "irrational", "-o", "/tmp/x.lmc"]);
        assert_eq!(code, 2);
        assert!(err.contains("exactly one --x"));

        let (code, _, err) = run_args(&["gadget", "sqrt-sum", "--s", "2", "-o", "/tmp/x.lmc"]);
        assert_eq!(code, 2);
        assert!(err.contains("requires --t"));
    }

    #[test]
    fn bernoulli_prints_d_theta() {
        let (code, out, _) = run_args(&[
            "bernoulli",
            "--theta",
            "2",
            "--x",
            "0.3",
            "--grid",
            "1025",
            "--tol",
            "1e-9",
        ]);
        assert_eq!(code, 0);
        let value: f64 = out
            .trim()
            .strip_prefix("d_theta=")
            .unwrap()
            .parse()
            .unwrap();
        assert!((value - 0.84).abs() < 1e-4);
    }
}
