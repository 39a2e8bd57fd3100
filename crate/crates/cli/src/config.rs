//! Run configuration files (JSON).
//!
//! ```json
//! {
//!   "device": "isolator",
//!   "params": { "j_a": 0.5, "j_b": 0.5, "gamma_e": 0.15 },
//!   "derive": true,
//!   "direction": "a_to_b",
//!   "grid": { "start": -1, "stop": 1, "points": 401 },
//!   "outputs": ["spectrum", "conditions"]
//! }
//! ```
//!
//! Exactly one of `device` and `network` must be present. Unknown keys are
//! rejected everywhere.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nonrecip::analysis::FrequencyGrid;
use nonrecip::device::{
    dual_frequency_params, isolator_conditions, symmetric_circulator_conditions, Circulation,
    ConditionSet, DeviceKind, DeviceParams, IsolationDirection,
};
use nonrecip::{Network, NetworkDescription};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_GRID: FrequencyGrid = FrequencyGrid {
    start: -2.0,
    stop: 2.0,
    points: 401,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Invalid(#[from] nonrecip::Error),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeriveMode {
    /// Use `params` as given.
    #[default]
    None,
    /// Fill in the resonant optimum (isolator, symmetric circulator).
    Resonant,
    /// Fill in the dual-frequency set (circulators).
    DualFrequency,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DeriveRepr {
    Flag(bool),
    Named(DeriveMode),
}

impl From<DeriveRepr> for DeriveMode {
    fn from(r: DeriveRepr) -> Self {
        match r {
            DeriveRepr::Flag(false) => DeriveMode::None,
            DeriveRepr::Flag(true) => DeriveMode::Resonant,
            DeriveRepr::Named(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AToB,
    BToA,
    Counterclockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Spectrum,
    Conditions,
    Compare,
    Symmetry,
    Scan,
    Device,
}

impl OutputKind {
    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::Spectrum => "spectrum.csv",
            OutputKind::Conditions => "conditions.txt",
            OutputKind::Compare => "compare.csv",
            OutputKind::Symmetry => "symmetry.txt",
            OutputKind::Scan => "scan.csv",
            OutputKind::Device => "device.json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub conditions: f64,
    pub compare: f64,
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            conditions: DEFAULT_TOLERANCE,
            compare: DEFAULT_TOLERANCE,
            symmetry: DEFAULT_TOLERANCE,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            conditions: tol,
            compare: tol,
            symmetry: tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParam {
    JA,
    JB,
    JAb,
    GammaC,
    GammaE,
}

impl ScanParam {
    pub fn name(self) -> &'static str {
        match self {
            ScanParam::JA => "j_a",
            ScanParam::JB => "j_b",
            ScanParam::JAb => "j_ab",
            ScanParam::GammaC => "gamma_c",
            ScanParam::GammaE => "gamma_e",
        }
    }

    pub fn set(self, p: &mut DeviceParams, value: f64) {
        match self {
            ScanParam::JA => p.j_a = value,
            ScanParam::JB => p.j_b = value,
            ScanParam::JAb => p.j_ab = value,
            ScanParam::GammaC => p.gamma_c = value,
            ScanParam::GammaE => p.gamma_e = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub param: ScanParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ScanAxis {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        Ok(FrequencyGrid::new(self.start, self.stop, self.points)?.omegas())
    }
}

/// Two-parameter map of the isolator transmissions at a fixed frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub x: ScanAxis,
    pub y: ScanAxis,
    #[serde(default)]
    pub omega: f64,
    /// Recompute the emitter coupling at each point so the reverse
    /// direction stays suppressed.
    #[serde(default = "yes")]
    pub rederive_g: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    device: Option<DeviceKind>,
    network: Option<NetworkDescription>,
    params: Option<DeviceParams>,
    derive: Option<DeriveRepr>,
    direction: Option<Direction>,
    condition_set: Option<ConditionSet>,
    grid: Option<FrequencyGrid>,
    #[serde(default)]
    outputs: Vec<OutputKind>,
    #[serde(default)]
    tolerances: Tolerances,
    scan: Option<ScanSpec>,
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Device {
        kind: DeviceKind,
        params: DeviceParams,
    },
    Network(Network),
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub derive: DeriveMode,
    pub condition_set: ConditionSet,
    pub grid: FrequencyGrid,
    pub outputs: Vec<OutputKind>,
    pub tolerances: Tolerances,
    pub scan: Option<ScanSpec>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn network(&self) -> Result<Network, nonrecip::Error> {
        match &self.source {
            Source::Device { kind, params } => nonrecip::device::build_device(*kind, params),
            Source::Network(net) => Ok(net.clone()),
        }
    }

    pub fn device(&self) -> Option<(DeviceKind, &DeviceParams)> {
        match &self.source {
            Source::Device { kind, params } => Some((*kind, params)),
            Source::Network(_) => None,
        }
    }

    /// Short description of the source for output headers.
    pub fn source_label(&self) -> String {
        match &self.source {
            Source::Device { kind, .. } => format!("device={}", kind.name()),
            Source::Network(net) => format!(
                "network modes={} ports={}",
                net.num_modes(),
                net.num_ports()
            ),
        }
    }
}

impl fmt::Display for DeriveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeriveMode::None => "none",
            DeriveMode::Resonant => "resonant",
            DeriveMode::DualFrequency => "dual_frequency",
        })
    }
}

fn json_error(e: serde_json::Error) -> ConfigError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => ConfigError::Schema(e.to_string()),
        _ => ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(json_error)?;
    resolve(raw)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn schema(msg: impl Into<String>) -> ConfigError {
    ConfigError::Schema(msg.into())
}

fn resolve(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let derive: DeriveMode = raw.derive.map(Into::into).unwrap_or_default();
    let (source, condition_set) = match (raw.device, raw.network) {
        (Some(_), Some(_)) => return Err(schema("`device` and `network` are mutually exclusive")),
        (None, None) => return Err(schema("one of `device` or `network` is required")),
        (None, Some(desc)) => {
            if raw.params.is_some() || raw.direction.is_some() || derive != DeriveMode::None {
                return Err(schema(
                    "`params`, `derive` and `direction` only apply to a `device`",
                ));
            }
            if raw.scan.is_some() {
                return Err(schema("`scan` needs an isolator `device`"));
            }
            (
                Source::Network(desc.build()?),
                raw.condition_set.unwrap_or_default(),
            )
        }
        (Some(kind), None) => {
            let params =
                device_params(kind, raw.params.unwrap_or_default(), derive, raw.direction)?;
            if raw.scan.is_some() && kind != DeviceKind::Isolator {
                return Err(schema("`scan` is only defined for the isolator"));
            }
            let default_set = if derive == DeriveMode::DualFrequency
                || kind == DeviceKind::AntisymmetricCirculator
            {
                ConditionSet::DualFrequency
            } else {
                ConditionSet::Resonant
            };
            (
                Source::Device { kind, params },
                raw.condition_set.unwrap_or(default_set),
            )
        }
    };
    let grid = raw.grid.unwrap_or(DEFAULT_GRID);
    grid.validate()?;
    if let Some(scan) = &raw.scan {
        scan.x.values()?;
        scan.y.values()?;
        if scan.x.param == scan.y.param {
            return Err(schema("scan axes must vary different parameters"));
        }
    }
    let mut outputs = raw.outputs;
    outputs.sort();
    outputs.dedup();
    Ok(RunConfig {
        source,
        derive,
        condition_set,
        grid,
        outputs,
        tolerances: raw.tolerances,
        scan: raw.scan,
        output: raw.output,
    })
}

fn device_params(
    kind: DeviceKind,
    mut p: DeviceParams,
    derive: DeriveMode,
    direction: Option<Direction>,
) -> Result<DeviceParams, ConfigError> {
    if p.kappa.is_empty() {
        p.kappa = vec![1.0; kind.num_ports()];
    }
    if p.kappa.len() != kind.num_ports() {
        return Err(schema(format!(
            "the {} has {} ports but `kappa` lists {}",
            kind.name(),
            kind.num_ports(),
            p.kappa.len()
        )));
    }
    let kappa_c = p.kappa[0];
    if derive != DeriveMode::None && p.kappa.iter().any(|k| *k != kappa_c) {
        return Err(schema("derived parameter sets need equal port dampings"));
    }
    let circulation = |direction: Option<Direction>| match direction {
        None | Some(Direction::Counterclockwise) => Ok(Circulation::Counterclockwise),
        Some(Direction::Clockwise) => Ok(Circulation::Clockwise),
        Some(d) => Err(schema(format!(
            "direction {d:?} does not apply to a circulator"
        ))),
    };
    let derived = match (derive, kind) {
        (DeriveMode::None, _) => {
            if direction.is_some() {
                return Err(schema("`direction` is only used together with `derive`"));
            }
            p
        }
        (DeriveMode::Resonant, DeviceKind::Isolator) => {
            let dir = match direction {
                None | Some(Direction::AToB) => IsolationDirection::AToB,
                Some(Direction::BToA) => IsolationDirection::BToA,
                Some(d) => {
                    return Err(schema(format!(
                        "direction {d:?} does not apply to an isolator"
                    )))
                }
            };
            isolator_conditions(p.j_a, p.j_b, kappa_c, p.gamma_e, p.gamma_c, dir)?
        }
        (DeriveMode::Resonant, DeviceKind::SymmetricCirculator) => {
            let q = symmetric_circulator_conditions(
                p.j_a,
                p.j_b,
                kappa_c,
                p.gamma_e,
                p.g_a,
                circulation(direction)?,
            )?;
            DeviceParams {
                gamma_c: p.gamma_c,
                ..q
            }
        }
        (DeriveMode::Resonant, DeviceKind::AntisymmetricCirculator) => {
            return Err(schema(
                "the antisymmetric circulator only supports `derive: \"dual_frequency\"`",
            ));
        }
        (DeriveMode::DualFrequency, DeviceKind::Isolator) => {
            return Err(schema("the isolator has no dual-frequency parameter set"));
        }
        (DeriveMode::DualFrequency, _) => {
            let mut q = dual_frequency_params(kind, kappa_c, p.gamma_e)?;
            q.gamma_c = p.gamma_c;
            // counterclockwise at omega = -kappa for either circulator
            let phase = match circulation(direction)? {
                Circulation::Counterclockwise => FRAC_PI_2,
                Circulation::Clockwise => 3.0 * FRAC_PI_2,
            };
            if kind == DeviceKind::SymmetricCirculator {
                q.phi1 = phase;
            } else {
                q.phi2 = phase;
            }
            q
        }
    };
    derived.validate(kind)?;
    Ok(derived)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_materialized() {
        let cfg = parse_config(r#"{"device": "isolator", "params": {"j_a": 0.5}}"#).unwrap();
        assert_eq!(cfg.grid, DEFAULT_GRID);
        assert_eq!(cfg.tolerances, Tolerances::default());
        let (_, p) = cfg.device().unwrap();
        assert_eq!(p.kappa, vec![1.0, 1.0]);
    }

    #[test]
    fn derive_fills_isolator_optimum() {
        let cfg = parse_config(
            r#"{"device": "isolator", "params": {"j_a": 0.5, "j_b": 0.5, "gamma_e": 0.15}, "derive": true}"#,
        )
        .unwrap();
        let (_, p) = cfg.device().unwrap();
        assert_eq!(p.j_ab, 0.5);
        assert!((p.g_a - 0.15f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(p.phi1, 1.5 * std::f64::consts::PI);
    }

    #[test]
    fn both_sources_rejected() {
        let err = parse_config(r#"{"device": "isolator", "network": {"modes": []}}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Schema(_)), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let err = parse_config(r#"{"device": "isolator", "colour": 3}"#).unwrap_err();
        assert!(
            matches!(err, ConfigError::Schema(ref m) if m.contains("colour")),
            "{err}"
        );
        let err = parse_config(r#"{"device": "isolator", "params": {"j_x": 3}}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Schema(_)), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_config("{\n  \"device\": \"isolator\",\n  oops\n}").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn direction_must_fit_device() {
        let err =
            parse_config(r#"{"device": "isolator", "derive": true, "direction": "clockwise"}"#)
                .unwrap_err();
        assert!(matches!(err, ConfigError::Schema(_)));
    }

    #[test]
    fn infeasible_derivation_surfaces() {
        let err = parse_config(
            r#"{"device": "symmetric_circulator", "params": {"g_a": 0.1, "gamma_e": 0.5}, "derive": true}"#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Invalid(nonrecip::Error::InfeasibleCondition(_))
        ));
    }
}
