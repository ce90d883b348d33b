//! `galsym`: command-line front end for the symbol engine.

mod commands;
mod session;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use galsym_core::FieldTower;
use serde_json::{json, Value};

use session::OutputMode;

#[derive(Debug, Parser)]
#[command(name = "galsym", version, about = "Exact mod-m symbol calculus over Laurent-series towers")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Session file holding the current tower.
    #[arg(long, global = true, env = "GALSYM_SESSION")]
    session: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Declare or inspect the session tower.
    #[command(subcommand)]
    Tower(TowerCommand),
    /// Canonical form of a symbol expression.
    Normalize { expr: String },
    /// Residue at the outermost uniformizer.
    Residue { expr: String },
    /// Split into unramified part and residue paired with the outermost uniformizer.
    Decompose {
        expr: String,
        /// Include the rewrite trace.
        #[arg(long)]
        trace: bool,
    },
    /// Decompose along the last two uniformizers.
    BilocalDecompose {
        expr: String,
        /// Also verify the nodal-point chain for this unit.
        #[arg(long)]
        unit: Option<String>,
    },
    /// Splitting certificate for a top-degree class.
    Split {
        expr: String,
        /// Order of the prime factors of m, e.g. `3,2`.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<u64>>,
    },
    /// Period, constructed index bound, and whether they agree.
    PeriodIndex { expr: String },
    /// One extension splitting several top-degree classes.
    CommonSlot {
        exprs: Vec<String>,
        /// Draw this many random top-degree classes instead.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Descent from the tower enlarged by the roots of unity of order m.
    Descend {
        /// Class over the enlarged tower; defaults to the top basis symbol.
        expr: Option<String>,
    },
    /// Quadratic field splitting quaternion algebras over Q, e.g. `(-1,-1)`.
    TateSlot {
        #[arg(required = true, allow_hyphen_values = true)]
        algebras: Vec<String>,
    },
    /// Independent number-theoretic oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
enum TowerCommand {
    /// Create the session tower F_q((t1))...((tn)) with coefficients mod m.
    New {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
        /// Uniformizer names, innermost first.
        #[arg(long, value_delimiter = ',', default_value = "t")]
        uniformizers: Vec<String>,
        /// Default output mode stored in the session.
        #[arg(long, value_enum, default_value_t = OutputMode::Text)]
        output: OutputMode,
    },
    /// Print the session tower.
    Show,
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Hilbert symbol (a, b) at one place, or at every relevant place.
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        /// A prime, or `inf` for the real place.
        #[arg(long)]
        place: Option<String>,
    },
}

/// An error tagged with a machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    pub fn session(message: String) -> Self {
        Self { kind: "Session".into(), message }
    }

    pub fn usage(message: String) -> Self {
        Self { kind: "Usage".into(), message }
    }
}

impl From<galsym_core::Error> for CliError {
    fn from(e: galsym_core::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Self { kind, message: e.to_string() }
    }
}

/// Result of a command: a text rendering and a JSON payload.
pub struct Report {
    pub text: String,
    pub json: Value,
    /// Tower to embed, absent for tower-free commands.
    pub tower: Option<Arc<FieldTower>>,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Tower(TowerCommand::New { .. }) => "tower new",
        Command::Tower(TowerCommand::Show) => "tower show",
        Command::Normalize { .. } => "normalize",
        Command::Residue { .. } => "residue",
        Command::Decompose { .. } => "decompose",
        Command::BilocalDecompose { .. } => "bilocal-decompose",
        Command::Split { .. } => "split",
        Command::PeriodIndex { .. } => "period-index",
        Command::CommonSlot { .. } => "common-slot",
        Command::Descend { .. } => "descend",
        Command::TateSlot { .. } => "tate-slot",
        Command::Oracle(OracleCommand::Hilbert { .. }) => "oracle hilbert",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let session_path = session::Session::path(cli.session.as_deref());
    let stored_json = session::Session::load(&session_path).map(|s| s.output == OutputMode::Json).unwrap_or(false);
    let json_mode = cli.json || stored_json;

    let outcome = commands::run(&cli, &session_path);
    let mut stdout = std::io::stdout().lock();
    match outcome {
        Ok(report) => {
            if json_mode {
                let (tower, convention) = match &report.tower {
                    Some(t) => (json!(t.decl()), json!(t.generator_convention())),
                    None => (Value::Null, Value::Null),
                };
                let envelope = json!({
                    "command": name,
                    "tower": tower,
                    "generator_convention": convention,
                    "result": report.json,
                });
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&envelope).expect("json"));
            } else {
                if let Some(t) = &report.tower {
                    let _ = writeln!(stdout, "# tower {t}; generator c: {}", t.generator_convention());
                }
                let _ = writeln!(stdout, "{}", report.text.trim_end());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if json_mode {
                let payload = json!({"command": name, "error": {"kind": err.kind, "message": err.message}});
                eprintln!("{}", serde_json::to_string_pretty(&payload).expect("json"));
            } else {
                eprintln!("error: {name}: {} [{}]", err.message, err.kind);
            }
            ExitCode::FAILURE
        }
    }
}
