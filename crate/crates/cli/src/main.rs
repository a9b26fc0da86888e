//! Command-line front end for the Bell-state analyzer toolkit.
//!
//! Four subcommands cover the workflow: `analyze` classifies the detection
//! outcomes of a circuit file, `preset` writes a named reference circuit,
//! `optimize` searches interferometer meshes for high-success analyzers, and
//! `verify` stress-tests the structural bounds over random networks.
//!
//! Reports are deterministic JSON: the same command line produces the same
//! bytes (timestamps are opt-in).  Exit status: 0 success, 1 usage or parse
//! error, 2 validation error, 3 structural-check failure.

mod circuit;
mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use bsa_core::{
    classify, optimize, per_mode_bound, run_battery, verify_bound, LinearNetwork, Priors,
    TheoremChecks, TAU_ZERO,
};

use circuit::CircuitFile;
use report::{
    render, sig12, AnalysisReport, AnalyzeParameters, BoundSection, CheckRecord, ModeProbeRecord,
    OptimizeParameters, OptimizeReport, ToolStamp, VerifyParameters, VerifyReport, CAP_SLACK,
};

/// Exit status for a usage, parse, or I/O failure.
const EXIT_USAGE: i32 = 1;
/// Exit status for a semantic validation failure.
const EXIT_VALIDATION: i32 = 2;
/// Exit status when a structural check fails.
const EXIT_CHECK_FAILURE: i32 = 3;

/// Failures surfaced to the user, tagged by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input (file I/O, JSON syntax, bad schema).
    Parse(String),
    /// Structurally valid input that violates a semantic rule.
    Invalid(bsa_core::Error),
    /// Output could not be written.
    Io(String),
}

impl CliError {
    /// Process exit status for this failure.
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Invalid(_) => EXIT_VALIDATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) | CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Invalid(err) => write!(f, "{err}"),
        }
    }
}

impl From<bsa_core::Error> for CliError {
    fn from(err: bsa_core::Error) -> Self {
        CliError::Invalid(err)
    }
}

/// Four comma-separated priors as given on the command line.
#[derive(Clone, Debug)]
struct PriorsArg([f64; 4]);

/// Parse `"a,b,c,d"` into four floats.  Sum validation happens later so it
/// can be reported as a validation error rather than a usage error.
fn parse_priors_arg(text: &str) -> Result<PriorsArg, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected four comma-separated priors, got {}",
            parts.len()
        ));
    }
    let mut values = [0.0f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("invalid prior {:?}: {e}", part.trim()))?;
    }
    Ok(PriorsArg(values))
}

/// An inclusive mode-count range such as `6` or `4..8`.
#[derive(Clone, Debug)]
struct ModeRange {
    lo: usize,
    hi: usize,
    echo: String,
}

/// Parse `"n"` or `"lo..hi"` (both ends inclusive).
fn parse_mode_range(text: &str) -> Result<ModeRange, String> {
    let parse_end = |s: &str| -> Result<usize, String> {
        s.trim()
            .parse()
            .map_err(|e| format!("invalid mode count {:?}: {e}", s.trim()))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse_end(a)?, parse_end(b)?),
        None => {
            let n = parse_end(text)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty mode range {lo}..{hi}"));
    }
    Ok(ModeRange {
        lo,
        hi,
        echo: text.trim().to_string(),
    })
}

/// Simulation and search toolkit for linear-optical Bell-state analyzers.
#[derive(Parser)]
#[command(name = "bsa", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every detection outcome of a circuit and report success
    /// probabilities, identified states, and structural-check results.
    Analyze {
        /// Path to the circuit JSON file.
        circuit: PathBuf,
        /// Bell-state priors as four comma-separated values summing to 1.
        #[arg(long, value_parser = parse_priors_arg)]
        priors: Option<PriorsArg>,
        /// Probability threshold below which an amplitude counts as zero.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stamp the report with the current Unix time (off by default so
        /// reports are byte-reproducible).
        #[arg(long)]
        timestamp: bool,
    },
    /// Write a named reference circuit as a reusable circuit file.
    Preset {
        /// Preset name: `bs-pbs` or `bs-pbs-hwp`.
        name: String,
        /// Write the circuit here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search interferometer meshes for a high-success analyzer.
    Optimize {
        /// Number of optical modes (at least 4).
        #[arg(long)]
        modes: usize,
        /// Number of independent restarts.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        restarts: u32,
        /// Base seed; restart `r` uses `seed + r`.
        #[arg(long)]
        seed: u64,
        /// Bell-state priors as four comma-separated values summing to 1.
        #[arg(long, value_parser = parse_priors_arg)]
        priors: Option<PriorsArg>,
        /// Require at least this many identified states (0 disables).
        #[arg(long, default_value_t = 0)]
        min_identified: usize,
        /// Write the report here instead of standard output; the best
        /// circuit is also written next to it with a `.circuit.json` suffix.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the best circuit to this exact path.
        #[arg(long)]
        circuit_out: Option<PathBuf>,
        /// Stamp the report with the current Unix time.
        #[arg(long)]
        timestamp: bool,
    },
    /// Probe Haar-random networks: check the success bound and run the full
    /// structural-check battery.
    Verify {
        /// Number of random networks per mode count (at least 1).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Mode count or inclusive range, e.g. `6` or `4..8`.
        #[arg(long, value_parser = parse_mode_range)]
        modes: ModeRange,
        /// Base seed; trial `t` uses `seed + t`.
        #[arg(long)]
        seed: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stamp the report with the current Unix time.
        #[arg(long)]
        timestamp: bool,
    },
}

fn main() {
    std::process::exit(run());
}

/// Parse arguments and dispatch, translating failures into the exit-status
/// contract.
fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Run one subcommand to completion.
fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Analyze {
            circuit,
            priors,
            tolerance,
            out,
            timestamp,
        } => cmd_analyze(
            &circuit,
            priors,
            tolerance,
            out.as_deref(),
            stamp(timestamp),
        ),
        Command::Preset { name, out } => cmd_preset(&name, out.as_deref()),
        Command::Optimize {
            modes,
            restarts,
            seed,
            priors,
            min_identified,
            out,
            circuit_out,
            timestamp,
        } => cmd_optimize(
            modes,
            restarts,
            seed,
            priors,
            min_identified,
            out.as_deref(),
            circuit_out.as_deref(),
            stamp(timestamp),
        ),
        Command::Verify {
            trials,
            modes,
            seed,
            out,
            timestamp,
        } => cmd_verify(trials, &modes, seed, out.as_deref(), stamp(timestamp)),
    }
}

/// Current Unix time when stamping was requested, otherwise nothing.
fn stamp(requested: bool) -> Option<u64> {
    if requested {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    } else {
        None
    }
}

/// Resolve optional priors, validating the sum and renormalizing exactly.
fn resolve_priors(arg: Option<PriorsArg>) -> Result<Priors, CliError> {
    match arg {
        Some(PriorsArg(values)) => Ok(Priors::renormalized(values, 1e-9)?),
        None => Ok(Priors::uniform()),
    }
}

/// Write text to a file, or to standard output when no path was given.
fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `analyze`: classify a circuit's outcomes and audit it against the
/// structural checks.
fn cmd_analyze(
    circuit_path: &Path,
    priors: Option<PriorsArg>,
    tolerance: Option<f64>,
    out: Option<&Path>,
    timestamp: Option<u64>,
) -> Result<i32, CliError> {
    let file = CircuitFile::load(circuit_path)?;
    let network = file.to_network()?;
    let priors = resolve_priors(priors)?;
    let tau_zero = tolerance.unwrap_or(TAU_ZERO);

    let analysis = classify(&network, &priors, tau_zero)?;
    let mut bounds = Vec::with_capacity(network.modes());
    for mode in 1..=network.modes() {
        bounds.push(per_mode_bound(&network.alpha(mode)?, &priors));
    }
    let mut checks = TheoremChecks::new();
    checks.run_network(&network, &priors)?;

    let parameters = AnalyzeParameters {
        circuit: circuit_path.display().to_string(),
        priors: priors.as_array(),
        tolerance: tau_zero,
    };
    let full = AnalysisReport::build(parameters, file, &analysis, &bounds, &checks, timestamp);
    emit(&render(&full), out)?;
    Ok(if full.checks_passed {
        0
    } else {
        EXIT_CHECK_FAILURE
    })
}

/// `preset`: write a named reference circuit.
fn cmd_preset(name: &str, out: Option<&Path>) -> Result<i32, CliError> {
    let network = LinearNetwork::preset(name)?;
    let file = CircuitFile::from_network(&network);
    emit(&file.to_json(), out)?;
    Ok(0)
}

/// `optimize`: search meshes and report the best network found, including
/// whether it qualifies as a multi-state analyzer witness.
#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    modes: usize,
    restarts: u32,
    seed: u64,
    priors: Option<PriorsArg>,
    min_identified: usize,
    out: Option<&Path>,
    circuit_out: Option<&Path>,
    timestamp: Option<u64>,
) -> Result<i32, CliError> {
    let priors = resolve_priors(priors)?;
    let result = optimize(modes, restarts, seed, &priors, min_identified)?;

    let parameters = OptimizeParameters {
        modes,
        restarts,
        seed,
        priors: priors.as_array(),
        min_identified,
    };
    let full = OptimizeReport::build(parameters, &result, &priors, timestamp);

    let circuit_text = full.best_circuit.to_json();
    emit(&render(&full), out)?;
    let circuit_path = circuit_out
        .map(Path::to_path_buf)
        .or_else(|| out.map(|p| p.with_extension("circuit.json")));
    if let Some(path) = circuit_path {
        emit(&circuit_text, Some(&path))?;
    }
    Ok(0)
}

/// `verify`: probe the success bound and run the structural-check battery
/// over Haar-random networks for every requested mode count.
fn cmd_verify(
    trials: u64,
    modes: &ModeRange,
    seed: u64,
    out: Option<&Path>,
    timestamp: Option<u64>,
) -> Result<i32, CliError> {
    let priors = Priors::uniform();
    let cap = priors.two_largest_sum();

    let mut by_modes = Vec::new();
    let mut checks = TheoremChecks::new();
    let mut max_success = f64::NEG_INFINITY;
    let mut argmax_modes = modes.lo;
    let mut argmax_seed = seed;
    for n in modes.lo..=modes.hi {
        let probe = verify_bound(trials, n, seed)?;
        if probe.max_success > max_success {
            max_success = probe.max_success;
            argmax_modes = n;
            argmax_seed = probe.argmax_seed;
        }
        by_modes.push(ModeProbeRecord::from_probe(&probe));
        checks.merge(&run_battery(trials, n, seed, &priors)?);
    }

    let bound = BoundSection {
        cap,
        slack: CAP_SLACK,
        by_modes,
        max_success: sig12(max_success),
        argmax_modes,
        argmax_seed,
        passed: max_success <= cap + CAP_SLACK,
    };
    let all_passed = bound.passed && checks.all_passed();
    let full = VerifyReport {
        tool: ToolStamp::current(),
        command: "verify".to_string(),
        timestamp,
        parameters: VerifyParameters {
            trials,
            modes: modes.echo.clone(),
            seed,
        },
        bound,
        checks: CheckRecord::from_checks(&checks),
        all_passed,
    };
    emit(&render(&full), out)?;
    Ok(if all_passed { 0 } else { EXIT_CHECK_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_argument_requires_exactly_four_values() {
        assert!(parse_priors_arg("0.25,0.25,0.25,0.25").is_ok());
        assert!(parse_priors_arg("0.5,0.5").is_err());
        assert!(parse_priors_arg("a,b,c,d").is_err());
    }

    #[test]
    fn mode_ranges_accept_single_values_and_spans() {
        let single = parse_mode_range("6").unwrap();
        assert_eq!((single.lo, single.hi), (6, 6));
        let span = parse_mode_range("4..8").unwrap();
        assert_eq!((span.lo, span.hi), (4, 8));
        assert!(parse_mode_range("8..4").is_err());
        assert!(parse_mode_range("four").is_err());
    }

    #[test]
    fn prior_sums_off_by_more_than_the_slack_are_rejected() {
        let arg = Some(PriorsArg([0.3, 0.3, 0.3, 0.3]));
        assert!(resolve_priors(arg).is_err());
        let near = Some(PriorsArg([0.25, 0.25, 0.25, 0.25 + 5e-10]));
        assert!(resolve_priors(near).is_ok());
    }
}
