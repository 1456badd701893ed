//! `kncli`: exact Krichever-Novikov computations at genus zero.
//!
//! Exit codes: 0 success, 1 usage error, 2 property-check failure (with a
//! machine-readable report on stdout).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kn_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "kncli", version, about = "exact multi-point Krichever-Novikov algebra computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Comma-separated marked points (rationals), out-point fixed at ∞
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    points: Option<Vec<String>>,

    /// Rank n of gl(n)
    #[arg(long, global = true)]
    gl_rank: Option<usize>,

    /// Charge sector of the fermion space
    #[arg(long, global = true, allow_hyphen_values = true)]
    charge: Option<i64>,

    /// Degree floor of truncations (≤ 0)
    #[arg(long, global = true, allow_hyphen_values = true)]
    depth: Option<i64>,

    /// Orientation of the separating cycle (±1); -1 negates all cycle
    /// integrals
    #[arg(long, global = true, allow_hyphen_values = true)]
    orientation: Option<i8>,

    /// Seed for sampled property checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Parallel jobs for entry-level computations (default: KNCLI_JOBS or 1)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Read the run configuration from a JSON file (flags override)
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the basis form f^λ_{n,p}
    Basis {
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        p: usize,
    },
    /// KN pairing of f^λ_{n,p} with f^{1-λ}_{m,r}
    Pairing {
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        r: usize,
    },
    /// Structure constants over a degree window
    Structure {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        to: i64,
    },
    /// Evaluate a geometric cocycle on basis elements
    Cocycle {
        #[arg(long = "type")]
        kind: String,
        /// left index as n,p
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// right index as m,r
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        /// gl matrix unit i,j for the left current slot (default identity)
        #[arg(long)]
        x: Option<String>,
        /// gl matrix unit i,j for the right current slot (default identity)
        #[arg(long)]
        y: Option<String>,
    },
    /// Locality scan of a cocycle
    CheckLocal {
        #[arg(long = "type")]
        kind: String,
        #[arg(long, default_value_t = -6, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 6, allow_hyphen_values = true)]
        to: i64,
    },
    /// Operator matrix on a wedge-space degree window
    Wedge {
        /// current | vector
        #[arg(long)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        p: usize,
        /// gl matrix unit i,j for currents (default identity)
        #[arg(long)]
        x: Option<String>,
    },
    /// Rescaled Sugawara mode matrix and detected (c, κ)
    Sugawara {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        r: usize,
    },
    /// Verify [T[e], x(A)] = x(e.A) on all basis triples up to a degree
    CheckFundamental {
        #[arg(long, default_value_t = 2)]
        max_degree: i64,
    },
    /// Conformal block dimension and basis
    Blocks,
    /// The generalized KZ system ∂_p Ψ = -M_p Ψ
    Kz {
        /// also emit the simple-pole residue decomposition (symbolic in
        /// one moving point)
        #[arg(long)]
        poles: bool,
    },
    /// Central scalars λ(p,q) of [∇_p, ∇_q] on blocks
    Curvature,
    /// Run the acceptance suite
    VerifyAll {
        /// reduced scopes for a fast smoke run
        #[arg(long)]
        quick: bool,
    },
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Usage(format!("bad config file: {e}")))?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &common.points {
        cfg.points = p.clone();
    }
    if let Some(g) = common.gl_rank {
        cfg.gl_rank = g;
    }
    if let Some(c) = common.charge {
        cfg.charge = c;
    }
    if let Some(d) = common.depth {
        cfg.depth = d;
    }
    if let Some(o) = common.orientation {
        cfg.orientation = o;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.jobs = common
        .jobs
        .or_else(|| {
            std::env::var("KNCLI_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(cfg.jobs);
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> kn_cli::CliResult {
    let cfg = load_config(&cli.common)?;
    match &cli.command {
        Command::Basis { lambda, n, p } => kn_cli::run_basis(&cfg, *lambda, *n, *p),
        Command::Pairing { lambda, n, p, m, r } => {
            kn_cli::run_pairing(&cfg, *lambda, *n, *p, *m, *r)
        }
        Command::Structure { algebra, from, to } => {
            kn_cli::run_structure(&cfg, algebra, *from, *to)
        }
        Command::Cocycle {
            kind,
            left,
            right,
            x,
            y,
        } => kn_cli::run_cocycle(&cfg, kind, left, right, x.as_deref(), y.as_deref()),
        Command::CheckLocal { kind, from, to } => kn_cli::run_check_local(&cfg, kind, *from, *to),
        Command::Wedge { op, n, p, x } => kn_cli::run_wedge(&cfg, op, *n, *p, x.as_deref()),
        Command::Sugawara { k, r } => kn_cli::run_sugawara(&cfg, *k, *r),
        Command::CheckFundamental { max_degree } => {
            kn_cli::run_check_fundamental(&cfg, *max_degree)
        }
        Command::Blocks => kn_cli::run_blocks(&cfg),
        Command::Kz { poles } => kn_cli::run_kz(&cfg, *poles),
        Command::Curvature => kn_cli::run_curvature(&cfg),
        Command::VerifyAll { quick } => kn_cli::run_verify_all(&cfg, *quick),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's help/version output goes to stdout with success.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(&cli) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Check(report)) => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            ExitCode::from(2)
        }
    }
}
