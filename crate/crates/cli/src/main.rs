//! `lks`: command line front end.
//!
//! Exit codes: 0 on success, 1 for domain or validation errors, 2 for
//! unreadable or malformed input.

mod commands;
mod render;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Torus,
    Elementary,
    Bottle1,
    Bottle2,
}

#[derive(Parser, Debug)]
#[command(name = "lks", version, about = "Invariants of Lorentzian surfaces 2dxdy + f(x)dy^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Write an SVG plot to this file.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeros, components, contiguity graph, symmetry case, squares and leaf space.
    Analyze {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Census of minimal torsion-free quotients.
    Quotients {
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Case label such as `0`, `1a`, `2+u`, `3c+b` (overrides the profile).
        #[arg(long = "case")]
        case: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        ell: Option<i64>,
        /// `k1,l1` for case (2+b).
        #[arg(long)]
        split: Option<String>,
    },
    /// Validates an invariant and prints its canonical form.
    Classify {
        #[arg(long)]
        invariant: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Kind::Torus)]
        kind: Kind,
        #[arg(long, allow_hyphen_values = true)]
        t0: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Comma-separated mark positions in the coordinate of the profile.
        #[arg(long, allow_hyphen_values = true)]
        marks: Option<String>,
    },
    /// Decides whether two invariants describe the same surface.
    Compare {
        #[arg(long = "invariant", num_args = 1, required = true)]
        invariants: Vec<PathBuf>,
        #[arg(long, default_value_t = lks_core::classify::DEFAULT_TOL)]
        tol: f64,
    },
    /// Component indices of the space of metrics.
    Components {
        #[arg(long)]
        invariant: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Integrates one geodesic.
    Geodesic {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        y0: String,
        #[arg(long, allow_hyphen_values = true)]
        p0: String,
        #[arg(long, allow_hyphen_values = true)]
        q0: String,
        #[arg(long = "t-end", allow_hyphen_values = true, default_value = "10")]
        t_end: String,
        /// Write the trajectory table (t x y p q C E) to this file.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Searches a geodesic tangent twice to the Killing field.
    Conjugate {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps: i8,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(value) => {
            let text = match cli.format {
                Format::Structured => serde_json::to_string_pretty(&value).expect("reports serialize") + "\n",
                Format::Human => render::human(&value),
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
