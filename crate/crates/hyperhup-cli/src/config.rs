//! Run configuration: JSON file, flag overlay and per-command defaults.

use crate::error::{CliError, CliResult};
use hyperhup_core::lattice::{make_cross_window, CrossSpec, LatticeSpec, RealSequence};
use hyperhup_core::Grid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    VerifyT,
    Certify,
    Construct,
    Annulus,
    Kg,
    Onesided,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::VerifyT => "verify-t",
            CommandKind::Certify => "certify",
            CommandKind::Construct => "construct",
            CommandKind::Annulus => "annulus",
            CommandKind::Kg => "kg",
            CommandKind::Onesided => "onesided",
        }
    }

    fn default_grid(self) -> Option<GridParams> {
        let g = |l, n| Some(GridParams { half_length: l, n });
        match self {
            CommandKind::VerifyT | CommandKind::Onesided => g(32.0, 1 << 14),
            CommandKind::Certify | CommandKind::Construct => g(64.0, 1 << 16),
            CommandKind::Kg => g(32.0, 1 << 15),
            CommandKind::Annulus => None,
        }
    }

    /// Tolerance keys accepted by the command, with their defaults.
    pub fn default_tolerances(self) -> BTreeMap<String, f64> {
        let pairs: &[(&str, f64)] = match self {
            CommandKind::VerifyT => &[
                ("involution", 1e-5),
                ("isometry", 1e-4),
                ("leakage", 1e-6),
                ("agreement", 1e-5),
                ("agreement_radius", 16.0),
            ],
            CommandKind::Certify => &[
                ("vanishing", 1e-6),
                ("zero_l2", 1e-12),
                ("pw_endpoint", 1e-6),
                ("critical_gap", 1e-9),
                ("critical_vanishing", 1e-6),
            ],
            CommandKind::Construct => {
                &[("residual", 1e-5), ("contraction", 0.5), ("solver", 1e-12)]
            }
            CommandKind::Annulus => &[],
            CommandKind::Kg => &[("ratio_min", 3.5), ("ratio_max", 4.5)],
            CommandKind::Onesided => &[("invariance", 1e-4), ("mean_zero", 1e-6)],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(rename = "L")]
    pub half_length: f64,
    pub n: usize,
}

impl GridParams {
    pub fn grid(&self) -> CliResult<Grid> {
        Ok(Grid::new(self.half_length, self.n)?)
    }
}

/// Cross source: explicit lists win over a file, a file over a lattice.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "A")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "B")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// Contents of a cross file: plain lists, or a serialized cross.
#[derive(Deserialize)]
#[serde(untagged)]
enum CrossFile {
    Lists {
        #[serde(alias = "A")]
        a: Vec<f64>,
        #[serde(alias = "B")]
        b: Vec<f64>,
    },
    Spec(CrossSpec),
}

fn sequence(values: &[f64], name: &str) -> CliResult<RealSequence> {
    RealSequence::from_unsorted(values.to_vec())
        .map_err(|e| CliError::Input(format!("{name}: {e}")))
}

impl CrossConfig {
    pub fn overlay(&mut self, other: &CrossConfig) {
        if other.lattice.is_some() {
            self.lattice = other.lattice.clone();
        }
        if other.window.is_some() {
            self.window = other.window;
        }
        if other.a.is_some() {
            self.a = other.a.clone();
        }
        if other.b.is_some() {
            self.b = other.b.clone();
        }
        if other.file.is_some() {
            self.file = other.file.clone();
        }
    }

    pub fn build(&self) -> CliResult<CrossSpec> {
        if let (Some(a), Some(b)) = (&self.a, &self.b) {
            return Ok(CrossSpec::new(sequence(a, "A")?, sequence(b, "B")?)?);
        }
        if self.a.is_some() != self.b.is_some() {
            return Err(CliError::Input("explicit crosses need both A and B".into()));
        }
        if let Some(path) = &self.file {
            let text = read(path)?;
            return match serde_json::from_str::<CrossFile>(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            {
                CrossFile::Lists { a, b } => {
                    Ok(CrossSpec::new(sequence(&a, "A")?, sequence(&b, "B")?)?)
                }
                CrossFile::Spec(s) => Ok(s),
            };
        }
        let spec: LatticeSpec = self.lattice.as_deref().unwrap_or("1:1").parse()?;
        let w = self.window.unwrap_or([-64, 64]);
        Ok(make_cross_window(
            spec.alpha,
            spec.beta,
            spec.shift,
            (w[0], w[1]),
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusParams {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub dims: Vec<u32>,
}

impl Default for AnnulusParams {
    fn default() -> Self {
        Self {
            radii: vec![0.5, 1.0, 2.0],
            ratios: vec![1.1, 2.0, 5.0],
            dims: (2..=6).collect(),
        }
    }
}

/// Output window [−extent, extent]² sampled with `points` and 2·`points`
/// per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KgParams {
    pub extent: f64,
    pub points: usize,
}

impl Default for KgParams {
    fn default() -> Self {
        Self {
            extent: 2.0,
            points: 128,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Not embedded in reports, so re-running a report never overwrites it.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<CrossConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_uniqueness: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus: Option<AnnulusParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kg: Option<KgParams>,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Parses a config file. A saved report is accepted too, in which case
    /// its embedded config is used.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let value = match value {
            serde_json::Value::Object(mut map)
                if map.contains_key("exit_code") && map.contains_key("config") =>
            {
                map.remove("config").expect("checked")
            }
            v => v,
        };
        serde_json::from_value(value)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if flags.$f.is_some() { self.$f = flags.$f; })*};
        }
        take!(
            command,
            seed,
            format,
            out,
            psi,
            expect_uniqueness,
            annulus,
            kg
        );
        if let Some(g) = flags.grid {
            self.grid = Some(g);
        }
        self.tolerances.extend(flags.tolerances);
        match (&mut self.cross, flags.cross) {
            (Some(c), Some(f)) => c.overlay(&f),
            (c @ None, f) => *c = f,
            _ => {}
        }
        self
    }

    /// Fills every field the command reads and validates tolerances.
    pub fn resolve(mut self, cmd: CommandKind) -> CliResult<Self> {
        self.command = Some(cmd);
        self.seed.get_or_insert(0);
        self.format.get_or_insert(Format::Json);
        if let Some(def) = cmd.default_grid() {
            self.grid.get_or_insert(def);
        } else {
            self.grid = None;
        }
        let mut tol = cmd.default_tolerances();
        for (k, v) in &self.tolerances {
            if !tol.contains_key(k) {
                let known: Vec<&str> = tol.keys().map(String::as_str).collect();
                return Err(CliError::Input(format!(
                    "unknown tolerance {k:?} for {}; expected one of {known:?}",
                    cmd.name()
                )));
            }
            if !(v.is_finite() && *v >= f64::EPSILON) {
                return Err(CliError::Input(format!(
                    "tolerance {k} = {v} is below machine epsilon"
                )));
            }
            tol.insert(k.clone(), *v);
        }
        self.tolerances = tol;
        match cmd {
            CommandKind::VerifyT => {}
            CommandKind::Certify => {
                self.psi.get_or_insert_with(|| "poisson:1.2:1.2".into());
                let c = self.cross.get_or_insert_with(Default::default);
                if c.a.is_none() && c.file.is_none() {
                    c.lattice.get_or_insert_with(|| "0.9:0.9:0".into());
                    c.window.get_or_insert([-30, 30]);
                }
                self.expect_uniqueness.get_or_insert(false);
            }
            CommandKind::Construct => {
                let c = self.cross.get_or_insert_with(Default::default);
                if c.a.is_none() && c.file.is_none() {
                    c.lattice.get_or_insert_with(|| "1.5:1.5:0".into());
                    c.window.get_or_insert([-32, 32]);
                }
            }
            CommandKind::Annulus => {
                self.annulus.get_or_insert_with(Default::default);
            }
            CommandKind::Kg => {
                self.psi.get_or_insert_with(|| "gaussian".into());
                self.kg.get_or_insert_with(Default::default);
            }
            CommandKind::Onesided => {
                self.psi.get_or_insert_with(|| "odd_gaussian".into());
                let c = self.cross.get_or_insert_with(Default::default);
                if c.a.is_none() && c.file.is_none() {
                    c.lattice.get_or_insert_with(|| "1:1:0".into());
                    c.window.get_or_insert([-16, 16]);
                }
            }
        }
        Ok(self)
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }
}

/// Parses `key=value` for `--tol`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("bad tolerance value {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses `lo:hi` for `--window`.
pub fn parse_window(s: &str) -> Result<[i64; 2], String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let num = |p: &str| {
        p.trim()
            .parse::<i64>()
            .map_err(|_| format!("bad window bound {p:?}"))
    };
    Ok([num(lo)?, num(hi)?])
}

/// Parses a comma-separated list of numbers.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list entry {p:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = RunConfig {
            seed: Some(3),
            grid: Some(GridParams {
                half_length: 8.0,
                n: 64,
            }),
            ..Default::default()
        };
        let flags = RunConfig {
            seed: Some(5),
            ..Default::default()
        };
        let r = file.overlay(flags).resolve(CommandKind::VerifyT).unwrap();
        assert_eq!(r.seed, Some(5));
        assert_eq!(r.grid.unwrap().n, 64);
        assert_eq!(r.tol("involution"), 1e-5);
    }

    #[test]
    fn tolerance_guards() {
        let mut c = RunConfig::default();
        c.tolerances.insert("involution".into(), 1e-17);
        assert!(c.clone().resolve(CommandKind::VerifyT).is_err());
        c.tolerances.insert("involution".into(), 1e-3);
        assert_eq!(
            c.clone()
                .resolve(CommandKind::VerifyT)
                .unwrap()
                .tol("involution"),
            1e-3
        );
        c.tolerances.insert("bogus".into(), 1.0);
        assert!(c.resolve(CommandKind::VerifyT).is_err());
    }

    #[test]
    fn cross_overlay_and_lists() {
        let mut c = CrossConfig {
            lattice: Some("2:2".into()),
            window: Some([-2, 2]),
            ..Default::default()
        };
        let s = c.build().unwrap();
        assert_eq!(s.a.values(), &[-4.0, -2.0, 0.0, 2.0, 4.0]);
        c.overlay(&CrossConfig {
            a: Some(vec![1.0, -1.0]),
            b: Some(vec![0.5]),
            ..Default::default()
        });
        assert_eq!(c.build().unwrap().a.values(), &[-1.0, 1.0]);
        c.b = Some(vec![1.0, 1.0]);
        assert!(matches!(c.build(), Err(CliError::Input(_))));
    }

    #[test]
    fn small_parsers() {
        assert_eq!(parse_tolerance("a = 1e-3").unwrap(), ("a".into(), 1e-3));
        assert!(parse_tolerance("a").is_err());
        assert_eq!(parse_window("-3:4").unwrap(), [-3, 4]);
        assert_eq!(parse_list::<u32>("2,3").unwrap(), vec![2, 3]);
    }
}
