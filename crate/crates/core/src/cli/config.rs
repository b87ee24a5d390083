//! Run configuration: defaults, JSON file, `--set` overrides, then flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::group::{BoundaryConvention, OrbitSpace, Representation, SpaceKind, Statistics};
use crate::orbit::TruncationPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Evolve,
    Resolvent,
    Thermal,
    Dos,
    Coined,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Resolvent => "resolvent",
            Command::Thermal => "thermal",
            Command::Dos => "dos",
            Command::Coined => "coined",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: SpaceKind,
    pub length: u32,
    pub walkers: usize,
    pub boundary: BoundaryConvention,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig { kind: SpaceKind::Circle, length: 8, walkers: 1, boundary: BoundaryConvention::Standard }
    }
}

impl SpaceConfig {
    pub fn space(&self) -> OrbitSpace {
        OrbitSpace { kind: self.kind, length: self.length, walkers: self.walkers, boundary: self.boundary }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepresentationConfig {
    pub theta: f64,
    pub phi: f64,
    pub statistics: Statistics,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        RepresentationConfig { theta: 0.0, phi: 0.0, statistics: Statistics::Boson }
    }
}

impl RepresentationConfig {
    pub fn representation(&self) -> Representation {
        Representation::new(self.theta, self.phi, self.statistics)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega: f64,
    pub tau: f64,
    pub beta: f64,
    pub energy_re: f64,
    pub energy_im: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig { omega: 1.0, tau: 1.0, beta: 1.0, energy_re: 0.0, energy_im: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub point: Vec<i64>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DosConfig {
    pub eta: f64,
    /// Defaults to `-(omega + 100 eta)`.
    pub e_min: Option<f64>,
    /// Defaults to `omega + 100 eta`.
    pub e_max: Option<f64>,
    pub points: usize,
}

impl Default for DosConfig {
    fn default() -> Self {
        DosConfig { eta: 0.05, e_min: None, e_max: None, points: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoinedConfig {
    pub steps: i64,
    /// Coin rows as `[[re, im], ...]`; Hadamard when absent.
    pub coin: Option<Vec<Vec<[f64; 2]>>>,
    pub shifts: Option<Vec<i64>>,
    pub start: i64,
    /// Initial coin state as `[[re, im], ...]`.
    pub coin_state: Vec<[f64; 2]>,
}

impl Default for CoinedConfig {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CoinedConfig { steps: 4, coin: None, shifts: None, start: 1, coin_state: vec![[h, 0.0], [0.0, h]] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub omega_taus: Vec<f64>,
    pub all_representations: bool,
    /// Oracle chain length on the line and half line.
    pub oracle_window: Option<usize>,
    /// Largest coordinate label checked on infinite spaces.
    pub grid: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { omega_taus: vec![0.5, 1.0, 5.0], all_representations: false, oracle_window: None, grid: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<String>,
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: Format::Csv, path: None, precision: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub space: SpaceConfig,
    pub representation: RepresentationConfig,
    pub params: ParamsConfig,
    pub truncation: TruncationPolicy,
    pub initial_state: Vec<Amplitude>,
    /// Inclusive single-coordinate output window `[lo, hi]`; required for
    /// the line and half line.
    pub window: Option<[i64; 2]>,
    pub dos: DosConfig,
    pub coined: CoinedConfig,
    pub verify: VerifyConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Evolve,
            space: SpaceConfig::default(),
            representation: RepresentationConfig::default(),
            params: ParamsConfig::default(),
            truncation: TruncationPolicy::default(),
            initial_state: Vec::new(),
            window: None,
            dos: DosConfig::default(),
            coined: CoinedConfig::default(),
            verify: VerifyConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Shell cap used for resolvent sweeps when none is given; decay near the
/// real axis is slow.
pub const RESOLVENT_MAX_SHELL: u32 = 4096;

/// Overrides collected from the command line, applied after the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub tolerance: Option<f64>,
    pub max_shell: Option<u32>,
    pub window: Option<String>,
    pub output: Option<String>,
    pub format: Option<Format>,
    pub precision: Option<usize>,
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad key path '{path}'")));
    }
    for part in &parts[..parts.len() - 1] {
        if !cur.is_object() {
            *cur = Value::Object(Map::new());
        }
        cur = cur.as_object_mut().expect("object").entry(*part).or_insert(Value::Object(Map::new()));
    }
    if !cur.is_object() {
        *cur = Value::Object(Map::new());
    }
    cur.as_object_mut().expect("object").insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn has_path(root: &Value, path: &[&str]) -> bool {
    let mut cur = root;
    for p in path {
        match cur.get(p) {
            Some(v) => cur = v,
            None => return false,
        }
    }
    !cur.is_null()
}

fn parse_window(s: &str) -> Result<[i64; 2]> {
    let parts: Vec<&str> = s.split([':', ',']).map(str::trim).collect();
    let bad = || Error::Config(format!("window must look like 'lo:hi', got '{s}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok([lo, hi])
}

/// Builds the user overlay from the config file text and the overrides.
fn user_overlay(file: Option<&str>, command: Command, ov: &Overrides) -> Result<Value> {
    let mut user = match file {
        Some(text) => serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?,
        None => Value::Object(Map::new()),
    };
    if !user.is_object() {
        return Err(Error::Config("config must be a JSON object".into()));
    }
    for s in &ov.sets {
        let (k, v) = s.split_once('=').ok_or_else(|| Error::Config(format!("--set expects key=value, got '{s}'")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        set_path(&mut user, k.trim(), value)?;
    }
    let mut put = |path: &str, v: Value| set_path(&mut user, path, v);
    put("command", Value::String(command.name().into()))?;
    if let Some(t) = ov.tolerance {
        put("truncation.tol", serde_json::json!(t))?;
    }
    if let Some(m) = ov.max_shell {
        put("truncation.max_shell", serde_json::json!(m))?;
    }
    if let Some(w) = &ov.window {
        put("window", serde_json::json!(parse_window(w)?))?;
    }
    if let Some(p) = &ov.output {
        put("output.path", Value::String(p.clone()))?;
    }
    if let Some(f) = ov.format {
        put("output.format", serde_json::to_value(f).expect("format serializes"))?;
    }
    if let Some(p) = ov.precision {
        put("output.precision", serde_json::json!(p))?;
    }
    Ok(user)
}

/// Resolves a configuration from optional file text, the command and the
/// overrides. Returns the typed config and its fully resolved JSON form.
pub fn resolve(file: Option<&str>, command: Command, ov: &Overrides) -> Result<(RunConfig, Value)> {
    let user = user_overlay(file, command, ov)?;
    let mut merged = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
    let explicit_shell = has_path(&user, &["truncation", "max_shell"]);
    merge(&mut merged, user);
    if matches!(command, Command::Resolvent | Command::Dos) && !explicit_shell {
        set_path(&mut merged, "truncation.max_shell", serde_json::json!(RESOLVENT_MAX_SHELL))?;
    }
    let cfg: RunConfig =
        serde_json::from_value(merged).map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
    cfg.validate()?;
    let resolved = serde_json::to_value(&cfg).expect("config serializes");
    Ok((cfg, resolved))
}

pub fn load(path: Option<&Path>, command: Command, ov: &Overrides) -> Result<(RunConfig, Value)> {
    let text = match path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?),
        None => None,
    };
    resolve(text.as_deref(), command, ov)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let space = self.space.space();
        space.validate()?;
        if !(self.command == Command::Verify && self.verify.all_representations) {
            self.representation.representation().validate(&space)?;
        }
        self.truncation.validate()?;
        let p = &self.params;
        if !(p.omega.is_finite() && p.omega > 0.0) {
            return Err(Error::Config(format!("params.omega must be positive, got {}", p.omega)));
        }
        if !p.tau.is_finite() || !(p.beta.is_finite() && p.beta >= 0.0) {
            return Err(Error::Config("params.tau must be finite and params.beta finite and >= 0".into()));
        }
        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(Error::Config(format!("output.precision must be in 1..=17, got {}", self.output.precision)));
        }
        if let Some([lo, hi]) = self.window {
            if lo > hi {
                return Err(Error::Config(format!("window [{lo}, {hi}] is empty")));
            }
            if hi - lo > 100_000 {
                return Err(Error::Config("window wider than 100000 sites".into()));
            }
        }
        for a in &self.initial_state {
            if a.point.len() != space.walkers {
                return Err(Error::DimensionMismatch { expected: space.walkers, got: a.point.len() });
            }
        }
        match self.command {
            Command::Dos => {
                if !(1e-6..=1.0).contains(&self.dos.eta) {
                    return Err(Error::Config(format!("dos.eta must lie in [1e-6, 1], got {}", self.dos.eta)));
                }
                if self.dos.points < 2 {
                    return Err(Error::Config("dos.points must be at least 2".into()));
                }
            }
            Command::Resolvent if !(p.energy_im > 0.0) => {
                return Err(Error::Config(format!("params.energy_im must be > 0, got {}", p.energy_im)));
            }
            _ => {}
        }
        Ok(())
    }
}
