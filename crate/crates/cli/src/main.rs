use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

mod commands;
mod input;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Domain(siegel_theta::Error),
}

impl From<siegel_theta::Error> for CliError {
    fn from(e: siegel_theta::Error) -> Self {
        CliError::Domain(e)
    }
}

/// Riemann theta functions, Siegel reduction and theta embeddings of
/// polarized complex tori. Reads flags or stdin (`-`), writes JSON.
#[derive(Parser, Debug)]
#[command(name = "siegel-theta", version)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Absolute truncation error target for theta series.
    #[arg(long, global = true, env = "SIEGEL_THETA_EPS", default_value_t = siegel_theta::DEFAULT_EPS)]
    pub eps: f64,
    /// Positive-definiteness tolerance for imaginary parts.
    #[arg(long, global = true, default_value_t = siegel_theta::DEFAULT_PD_TOL)]
    pub pd_tol: f64,
    /// Tolerance for matrix comparisons.
    #[arg(long, global = true, default_value_t = siegel_theta::DEFAULT_MATRIX_TOL)]
    pub matrix_tol: f64,
    /// Radius of the finite set used to check `|det(gamma tau + delta)| >= 1`.
    #[arg(long, global = true, default_value_t = 1)]
    pub check_radius: u32,
    /// Seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl Config {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.eps > 1e-15 && self.eps < 1e-2) {
            return Err(CliError::Parse(format!("eps must lie in (1e-15, 1e-2), got {}", self.eps)));
        }
        if !(self.pd_tol > 0.0 && self.matrix_tol > 0.0) {
            return Err(CliError::Parse("tolerances must be positive".into()));
        }
        if self.check_radius == 0 {
            return Err(CliError::Parse("check radius must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate theta(z, tau) or theta[a; b](z, tau).
    Theta(commands::ThetaArgs),
    /// Reduce tau into the Siegel fundamental set.
    ReduceTau(commands::TauArgs),
    /// Test membership of tau in the Siegel fundamental set.
    CheckFundamental(commands::FundamentalArgs),
    /// Membership in the fundamental set or in the torus point sets over it.
    Member(commands::MemberArgs),
    /// Projective theta embedding of a point of a polarized torus.
    Embed(commands::EmbedArgs),
    /// Theta constant theta[a; b](0, tau).
    ThetaNull(commands::ThetaNullArgs),
    /// Cone membership, generators, and the standard cones.
    Cone(commands::ConeArgs),
    /// Check constancy of the theta transformation ratio.
    TransformCheck(commands::TransformArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = cli.config.validate().and_then(|_| commands::run(&cli.command, &cli.config));
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string(&v).expect("JSON values always serialize"));
            ExitCode::SUCCESS
        }
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            println!("{}", serde_json::json!({ "error": "ParseError", "message": msg }));
            ExitCode::from(1)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            println!("{}", serde_json::json!({ "error": e.code(), "message": e.to_string() }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

pub type Output = Result<Value, CliError>;
