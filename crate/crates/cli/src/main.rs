//! `condsym`: classify, synthesize, reduce and numerically verify
//! Q-conditional symmetries of `u_yz = f(y,z,u)`.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "condsym", version, about = "Conditional symmetries of u_yz = f(y,z,u)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Sample points per identity test.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Relative tolerance of identity tests.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub epsilon: f64,
    /// Seed of the sampling RNG.
    #[arg(long, global = true, env = "CONDSYM_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Sampling range of one variable, e.g. `u=-1:1` (repeatable).
    #[arg(long = "range", global = true, value_name = "VAR=LO:HI", value_parser = parse_var_range, allow_hyphen_values = true)]
    pub ranges: Vec<(String, (f64, f64))>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long = "y-range", value_name = "LO:HI", default_value = "0.5:2", value_parser = parse_interval, allow_hyphen_values = true)]
    pub y_range: (f64, f64),
    #[arg(long = "z-range", value_name = "LO:HI", default_value = "0.5:2", value_parser = parse_interval, allow_hyphen_values = true)]
    pub z_range: (f64, f64),
    /// Nodes per axis.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Finite-difference stencil width.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long = "pde-tol", default_value_t = 1e-5)]
    pub pde_tol: f64,
    #[arg(long = "side-tol", default_value_t = 1e-5)]
    pub side_tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize `a·u_y + b·u_z − c = 0` and check the determining equations for `f`.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Side condition `u_y = L`: residuals, first-order pair, compatibility.
    Case1 {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Closed-form solution to check numerically against the PDE and `u_y = L`.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// `K = e^u`, `L = s·e^u + d`: constraints on `(s, d)` and the forced `f`.
    Case22 {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Operator, invariant and multiplier generated by `T`.
    Reduce {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        /// Use this invariant instead of the catalog one.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        /// Also compare numeric characteristic labels with the catalog invariant.
        #[arg(long = "numeric-check")]
        numeric_check: bool,
        /// RK4 step along characteristics.
        #[arg(long = "char-step", default_value_t = 1e-3)]
        char_step: f64,
    },
    /// Right-hand side `f` for `(T, Φ)` and its determining-equation residuals.
    Synthesize {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "Phi", allow_hyphen_values = true)]
        phi: String,
    },
    /// Solve the reduced ODE, lift, and check PDE and side-condition residuals.
    Verify {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "Phi", allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        omega0: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi0: f64,
        #[arg(long, allow_hyphen_values = true)]
        dphi0: f64,
        /// ODE step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the lifted solution as a plain-text matrix.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad number `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad number `{hi}`"))?;
    if !(lo < hi) {
        return Err(format!("empty interval {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_var_range(s: &str) -> Result<(String, (f64, f64)), String> {
    let (var, interval) = s.split_once('=').ok_or("expected VAR=LO:HI")?;
    Ok((var.trim().to_string(), parse_interval(interval)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { a, b, c, f } => commands::classify(&cli.common, &a, &b, &c, &f),
        Command::Case1 { l, f, u, grid } => commands::case1(&cli.common, &l, &f, u.as_deref(), &grid),
        Command::Case22 { s, d } => commands::case22(&cli.common, &s, &d),
        Command::Reduce { t, omega, numeric_check, char_step } => {
            commands::reduce(&cli.common, &t, omega.as_deref(), numeric_check, char_step)
        }
        Command::Synthesize { t, phi } => commands::synthesize(&cli.common, &t, &phi),
        Command::Verify { t, phi, omega0, phi0, dphi0, step, grid, export } => commands::verify(
            &cli.common,
            &commands::VerifyArgs { t, phi, omega0, phi0, dphi0, step, grid, export },
        ),
    };
    let report = match result {
        Ok(r) => r.finish(),
        Err(e) => {
            eprintln!("condsym: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match cli.common.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("condsym: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::from(report.exit as u8)
}
