//! Command-line front end: reads a JSON scenario, runs the analytic or
//! Monte-Carlo pipeline, and writes CSV tables and JSON reports.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod scenario_file;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::MapScheme;
pub use crate::error::CliError;
use crate::scenario_file::{load_scenario, ScenarioFile};

#[derive(Debug, Parser)]
#[command(name = "phykey", version, about = "Physical-layer key exchange analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic BER versus SINR for one or more phase ranges.
    BerCurve {
        /// Scenario providing defaults for M and θ_b.
        scenario: Option<PathBuf>,
        /// Phase ranges in degrees, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta_b_deg: Vec<f64>,
        /// Constellation size.
        #[arg(long)]
        m: Option<usize>,
        /// start:stop:points in dB, or a comma list (may include -inf).
        #[arg(long, default_value = "0:30:31", allow_hyphen_values = true)]
        sinr_db: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eavesdropper BER map plus analytic region and security factor.
    RegionMap {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::Proposed)]
        scheme: SchemeArg,
        /// Half-width of the square map around the node midpoint, meters
        /// (default 2d).
        #[arg(long)]
        extent: Option<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 200)]
        res: usize,
        /// CSV path; the JSON sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo sweep of the key exchange.
    Simulate {
        scenario: PathBuf,
        /// axis:start:stop:points with axis one of eve-distance, eve-ratio,
        /// p-ratio-db, sinr-db.
        #[arg(long, allow_hyphen_values = true)]
        sweep: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Security factors of the interference scheme and the directional
    /// baseline.
    Compare {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Proposed,
    Directional,
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

/// Sidecar path for a region-map CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BerCurve {
            scenario,
            theta_b_deg,
            m,
            sinr_db,
            out,
        } => {
            let from_file = match &scenario {
                Some(p) => Some(ScenarioFile::load(p)?),
                None => None,
            };
            let m = m.or(from_file.as_ref().map(|f| f.scheme.m)).unwrap_or(4);
            let thetas = if !theta_b_deg.is_empty() {
                theta_b_deg
            } else if let Some(f) = &from_file {
                vec![f.scheme.theta_b_deg]
            } else {
                vec![45.0, 90.0, 180.0]
            };
            let sinr = commands::parse_range(&sinr_db, "--sinr-db")?;
            emit(out.as_deref(), &commands::ber_curve(m, &thetas, &sinr)?)
        }
        Command::RegionMap {
            scenario,
            scheme,
            extent,
            res,
            out,
        } => {
            let loaded = load_scenario(&scenario)?;
            let sidecar = sidecar_path(&out);
            if sidecar == out {
                return Err(CliError::Input("--out: use a .csv path; the sidecar takes .json".into()));
            }
            let scheme = match scheme {
                SchemeArg::Proposed => MapScheme::Proposed,
                SchemeArg::Directional => MapScheme::Directional,
            };
            let (csv, json) = commands::region_map(&loaded, scheme, extent, res)?;
            emit(Some(&out), &csv)?;
            emit(Some(&sidecar), &json)
        }
        Command::Simulate {
            scenario,
            sweep,
            out,
        } => {
            let loaded = load_scenario(&scenario)?;
            let (axis, values) = commands::parse_sweep(&sweep)?;
            emit(out.as_deref(), &commands::simulate(&loaded, axis, &values)?)
        }
        Command::Compare { scenario, out } => {
            let loaded = load_scenario(&scenario)?;
            emit(out.as_deref(), &commands::compare(&loaded)?)
        }
    }
}
