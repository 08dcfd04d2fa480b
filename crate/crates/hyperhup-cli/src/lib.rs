//! Command-line front end: argument parsing, config resolution and report
//! output for the `hyperhup` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use clap::{Args, Parser, Subcommand};
use config::{
    parse_list, parse_tolerance, parse_window, AnnulusParams, CommandKind, CrossConfig, Format,
    GridParams, KgParams, RunConfig,
};
use error::{CliError, CliResult};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "hyperhup",
    version,
    about = "Uniqueness-pair numerics for the hyperbola"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// JSON config file, or a saved report whose embedded config is reused
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid half length L
    #[arg(long = "grid-l", global = true)]
    pub grid_l: Option<f64>,
    /// Grid point count n
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    /// Tolerance override key=value (repeatable)
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tol: Vec<(String, f64)>,
}

#[derive(Args, Debug, Default)]
pub struct CrossArgs {
    /// Lattice cross alpha:beta[:shift]
    #[arg(long)]
    pub cross: Option<String>,
    /// Lattice index window lo:hi
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<[i64; 2]>,
    /// Explicit A as a comma-separated list
    #[arg(long = "a-points", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Explicit B as a comma-separated list
    #[arg(long = "b-points", allow_hyphen_values = true)]
    pub b: Option<String>,
    /// JSON file with A and B
    #[arg(long = "cross-file")]
    pub file: Option<PathBuf>,
}

impl CrossArgs {
    fn config(self) -> CliResult<Option<CrossConfig>> {
        let c = CrossConfig {
            lattice: self.cross,
            window: self.window,
            a: self.a.as_deref().map(list).transpose()?,
            b: self.b.as_deref().map(list).transpose()?,
            file: self.file,
        };
        Ok((c != CrossConfig::default()).then_some(c))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// T-operator property suite on the built-in fixtures
    VerifyT,
    /// Subcritical certificate for ψ against a cross
    Certify {
        /// ψ source: gaussian, odd_gaussian, zero, poisson:ALPHA:BETA, file:PATH
        #[arg(long)]
        psi: Option<String>,
        #[command(flatten)]
        cross: CrossArgs,
        /// Exit 1 when ψ does not vanish on the cross
        #[arg(long)]
        expect_uniqueness: bool,
    },
    /// Witness construction for a cross with gaps above 1
    Construct {
        #[command(flatten)]
        cross: CrossArgs,
    },
    /// Annulus Poincaré constants against the comparison bound
    Annulus {
        /// Inner radii
        #[arg(long)]
        radii: Option<String>,
        /// Outer/inner radius ratios
        #[arg(long)]
        ratios: Option<String>,
        /// Dimensions
        #[arg(long)]
        dims: Option<String>,
    },
    /// Klein–Gordon residual of Eψ at two resolutions
    Kg {
        #[arg(long)]
        psi: Option<String>,
        /// Half width of the square window
        #[arg(long)]
        extent: Option<f64>,
        /// Points per axis on the coarse grid
        #[arg(long)]
        points: Option<usize>,
    },
    /// One-sided invariance probe
    Onesided {
        #[arg(long)]
        psi: Option<String>,
        #[command(flatten)]
        cross: CrossArgs,
    },
}

fn list<T: std::str::FromStr>(s: &str) -> CliResult<Vec<T>> {
    parse_list(s).map_err(CliError::Input)
}

fn flag_config(cli: Cli, base: &RunConfig) -> CliResult<(CommandKind, RunConfig)> {
    let g = cli.global;
    let mut cfg = RunConfig {
        seed: g.seed,
        format: g.format,
        out: g.out,
        tolerances: g.tol.into_iter().collect(),
        ..Default::default()
    };
    if g.grid_l.is_some() || g.grid_n.is_some() {
        let start = base.grid.unwrap_or(GridParams {
            half_length: 32.0,
            n: 1 << 14,
        });
        cfg.grid = Some(GridParams {
            half_length: g.grid_l.unwrap_or(start.half_length),
            n: g.grid_n.unwrap_or(start.n),
        });
    }
    let kind = match cli.command {
        Command::VerifyT => CommandKind::VerifyT,
        Command::Certify {
            psi,
            cross,
            expect_uniqueness,
        } => {
            cfg.psi = psi;
            cfg.cross = cross.config()?;
            cfg.expect_uniqueness = expect_uniqueness.then_some(true);
            CommandKind::Certify
        }
        Command::Construct { cross } => {
            cfg.cross = cross.config()?;
            CommandKind::Construct
        }
        Command::Annulus {
            radii,
            ratios,
            dims,
        } => {
            if radii.is_some() || ratios.is_some() || dims.is_some() {
                let start = base.annulus.clone().unwrap_or_default();
                cfg.annulus = Some(AnnulusParams {
                    radii: radii
                        .as_deref()
                        .map(list)
                        .transpose()?
                        .unwrap_or(start.radii),
                    ratios: ratios
                        .as_deref()
                        .map(list)
                        .transpose()?
                        .unwrap_or(start.ratios),
                    dims: dims.as_deref().map(list).transpose()?.unwrap_or(start.dims),
                });
            }
            CommandKind::Annulus
        }
        Command::Kg {
            psi,
            extent,
            points,
        } => {
            cfg.psi = psi;
            if extent.is_some() || points.is_some() {
                let start = base.kg.unwrap_or_default();
                cfg.kg = Some(KgParams {
                    extent: extent.unwrap_or(start.extent),
                    points: points.unwrap_or(start.points),
                });
            }
            CommandKind::Kg
        }
        Command::Onesided { psi, cross } => {
            cfg.psi = psi;
            cfg.cross = cross.config()?;
            CommandKind::Onesided
        }
    };
    Ok((kind, cfg))
}

fn write_output(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit(kind: CommandKind, cfg: &RunConfig, outcome: &commands::Outcome) -> CliResult<()> {
    let text = match cfg.format.unwrap_or_default() {
        Format::Csv => outcome.csv.clone(),
        Format::Json => report::to_json(&report::Report {
            command: kind.name(),
            config: cfg,
            result: &outcome.result,
            pass: outcome.pass,
            exit_code: outcome.exit_code,
        })
        .map_err(|e| CliError::Input(e.to_string()))?,
    };
    write_output(cfg, &text)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let base = match cli
        .global
        .config
        .as_deref()
        .map(RunConfig::load)
        .transpose()
    {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("hyperhup: {e}");
            return e.exit_code();
        }
    };
    let resolved = flag_config(cli, &base)
        .and_then(|(kind, flags)| Ok((kind, base.overlay(flags).resolve(kind)?)));
    let (kind, cfg) = match resolved {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hyperhup: {e}");
            return e.exit_code();
        }
    };
    let outcome = match commands::run(kind, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hyperhup {}: {e}", kind.name());
            let code = e.exit_code();
            let result = serde_json::json!({ "error": e.to_string() });
            let failed = commands::Outcome {
                csv: report::key_value_csv(&result),
                result,
                pass: false,
                exit_code: code,
            };
            if let Err(e) = emit(kind, &cfg, &failed) {
                eprintln!("hyperhup: {e}");
            }
            return code;
        }
    };
    if let Err(e) = emit(kind, &cfg, &outcome) {
        eprintln!("hyperhup: {e}");
        return e.exit_code();
    }
    eprintln!(
        "hyperhup {}: {} (exit {})",
        kind.name(),
        if outcome.pass { "pass" } else { "fail" },
        outcome.exit_code
    );
    outcome.exit_code
}
