//! `evidence`: evaluate, sweep, invert and verify the evidence measure from
//! the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 computation error, 3 verification
//! failure.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use evidence_core::{ContrastClass, CorrectionRule, EvidenceConfig, HypothesisContrast, QuadratureConfig};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "evidence", version, about = "Evidence E for binomial hypothesis contrasts")]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evidence for a single observation (also the default without a subcommand)
    #[command(visible_alias = "evidence")]
    Eval {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Evidence over an (n, x/n) grid
    #[command(group(ArgGroup::new("ns").required(true).args(["n", "nrange"])))]
    #[command(group(ArgGroup::new("ratios").required(true).args(["ratio", "ratiorange"])))]
    Sweep {
        #[command(flatten)]
        contrast: ContrastArgs,
        #[arg(long)]
        n: Option<f64>,
        /// Sample sizes as lo:hi:count
        #[arg(long, value_parser = parse_range)]
        nrange: Option<Grid>,
        #[arg(long)]
        ratio: Option<f64>,
        /// Ratios x/n as lo:hi:count
        #[arg(long, value_parser = parse_range)]
        ratiorange: Option<Grid>,
        #[command(flatten)]
        common: Common,
    },
    /// Iso-evidence contour: the n reaching a target E at each x/n
    #[command(group(ArgGroup::new("ratios").required(true).args(["ratio", "ratiorange"])))]
    Iso {
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Target evidence
        #[arg(long = "iso", value_name = "E")]
        target: f64,
        #[arg(long)]
        ratio: Option<f64>,
        /// Ratios x/n as lo:hi:count
        #[arg(long, value_parser = parse_range)]
        ratiorange: Option<Grid>,
        #[arg(long, default_value_t = 1e-3)]
        nmin: f64,
        #[arg(long, default_value_t = 1e7)]
        nmax: f64,
        /// Relative tolerance of the solved n
        #[arg(long, default_value_t = 1e-8)]
        ntol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Transition points at one or more sample sizes
    #[command(group(ArgGroup::new("ns").required(true).args(["n", "nrange"])))]
    Trp {
        #[command(flatten)]
        contrast: ContrastArgs,
        #[arg(long)]
        n: Option<f64>,
        /// Sample sizes as lo:hi:count
        #[arg(long, value_parser = parse_range)]
        nrange: Option<Grid>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite
    Verify {
        /// Every check: behavior patterns, oracles, identities and controls
        #[arg(long, conflicts_with_all = ["class", "theta2"])]
        all: bool,
        /// Run the behavior-pattern suite on this class only
        #[arg(long, required_unless_present = "all")]
        class: Option<ContrastClass>,
        #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"])]
        theta2: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct ContrastArgs {
    /// Contrast class: 1a, 1b, 2a or 2b
    #[arg(long, required = true)]
    class: Option<ContrastClass>,
    /// Θ2 interval for class 2b (default 0.4 0.6)
    #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"])]
    theta2: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("heads").args(["x", "ratio"])))]
struct PointArgs {
    #[command(flatten)]
    contrast: ContrastArgs,
    /// Sample size (need not be an integer)
    #[arg(long, required = true)]
    n: Option<f64>,
    /// Number of heads
    #[arg(long, required_unless_present = "ratio")]
    x: Option<f64>,
    /// Observed proportion x/n
    #[arg(long)]
    ratio: Option<f64>,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Relative tolerance of the volume quadrature
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Rule for the nested-contrast correction b
    #[arg(long, value_enum, default_value_t = Correction::Ln4)]
    correction: Correction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Correction {
    Ln4,
    Sqrt2pi,
    Off,
}

impl Common {
    fn config(&self) -> Result<EvidenceConfig, Failure> {
        let quadrature = QuadratureConfig::with_rel_tol(self.tol);
        quadrature.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(EvidenceConfig {
            correction: match self.correction {
                Correction::Ln4 => CorrectionRule::Ln4,
                Correction::Sqrt2pi => CorrectionRule::Sqrt2Pi,
                Correction::Off => CorrectionRule::Off,
            },
            ..EvidenceConfig::with_quadrature(quadrature)
        })
    }
}

fn contrast(class: Option<ContrastClass>, theta2: Option<&[f64]>) -> Result<HypothesisContrast, Failure> {
    let class = class.ok_or_else(|| Failure::Usage("--class is required".into()))?;
    let theta2 = match (class, theta2) {
        (ContrastClass::IIb, Some(t)) => Some((t[0], t[1])),
        (ContrastClass::IIb, None) => Some((0.4, 0.6)),
        (_, Some(_)) => return Err(Failure::Usage("--theta2 applies to class 2b only".into())),
        (_, None) => None,
    };
    HypothesisContrast::from_class(class, theta2).map_err(|e| Failure::Usage(e.to_string()))
}

impl ContrastArgs {
    fn build(&self) -> Result<HypothesisContrast, Failure> {
        contrast(self.class, self.theta2.as_deref())
    }
}

/// Values parsed from a `lo:hi:count` flag.
#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

/// `lo:hi:count`, `count` evenly spaced values including both ends.
fn parse_range(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("expected lo:hi:count, got {s:?}"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    let count: usize = count.parse().map_err(|e| format!("bad count {count:?}: {e}"))?;
    match count {
        0 => Err("count must be at least 1".into()),
        1 => Ok(Grid(vec![lo])),
        k => Ok(Grid(
            (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
        )),
    }
}

enum Failure {
    Usage(String),
    Compute,
    Verification,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        None => commands::evidence(&cli.point, &cli.common),
        Some(Command::Eval { point, common }) => commands::evidence(&point, &common),
        Some(Command::Sweep {
            contrast,
            n,
            nrange,
            ratio,
            ratiorange,
            common,
        }) => {
            let ns = nrange.map(|g| g.0).unwrap_or_else(|| n.into_iter().collect());
            let ratios = ratiorange.map(|g| g.0).unwrap_or_else(|| ratio.into_iter().collect());
            commands::sweep(&contrast.build()?, ns, ratios, &common)
        }
        Some(Command::Iso {
            contrast,
            target,
            ratio,
            ratiorange,
            nmin,
            nmax,
            ntol,
            common,
        }) => {
            let ratios = ratiorange.map(|g| g.0).unwrap_or_else(|| ratio.into_iter().collect());
            let options = evidence_core::IsoOptions {
                n_min: nmin,
                n_max: nmax,
                rel_tol: ntol,
            };
            if !(nmin > 0.0 && nmax > nmin && ntol > 0.0) {
                return Err(Failure::Usage("need 0 < nmin < nmax and ntol > 0".into()));
            }
            commands::iso(&contrast.build()?, target, ratios, options, &common)
        }
        Some(Command::Trp {
            contrast,
            n,
            nrange,
            common,
        }) => {
            let ns = nrange.map(|g| g.0).unwrap_or_else(|| n.into_iter().collect());
            commands::trp(&contrast.build()?, ns, &common)
        }
        Some(Command::Verify {
            all,
            class,
            theta2,
            common,
        }) => {
            let hc = if all {
                None
            } else {
                Some(contrast(class, theta2.as_deref())?)
            };
            commands::verify(hc, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute) => ExitCode::from(2),
        Err(Failure::Verification) => ExitCode::from(3),
    }
}
