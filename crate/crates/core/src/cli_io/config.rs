//! Run configuration: a flat JSON object with the bath parameters at the
//! top level, an `emitter` object and optional per-task sections.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bath::{BathSpec, Boundary, Lattice};
use crate::boundstates::SearchOptions;
use crate::dynamics::{EvolveOptions, Integrator};
use crate::emitter_model::EmitterSpec;
use crate::analysis::RateSemantics;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathKind {
    Unidirectional,
    HatanoNelson,
    AlternatingLoss,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub gamma: f64,
    pub g: f64,
    pub x0: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_max: f64,
    /// Number of uniformly spaced output times, including `t = 0`.
    pub steps: usize,
    pub record_snapshots: bool,
    pub snapshot_every: usize,
    pub integrator: Integrator,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_max: 40.0,
            steps: 200,
            record_snapshots: true,
            snapshot_every: 10,
            integrator: Integrator::default(),
        }
    }
}

impl TimeConfig {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            integrator: self.integrator,
            record_snapshots: self.record_snapshots,
            snapshot_every: self.snapshot_every,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    /// Bloch bands on a momentum grid.
    Bloch,
    /// Eigenvalues of the finite bath matrix with the configured boundary.
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub n_k: usize,
    pub source: SpectrumSource,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            n_k: 256,
            source: SpectrumSource::Bloch,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindingConfig {
    pub n_k: usize,
    /// Reference energies as `[re, im]` pairs.
    pub e_ref: Vec<[f64; 2]>,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig {
            n_k: 4096,
            e_ref: vec![[0.0, -1.0]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DosConfig {
    pub n_k: usize,
    pub bins: usize,
}

impl Default for DosConfig {
    fn default() -> Self {
        DosConfig { n_k: 4096, bins: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// Full diagonalization of the finite Hamiltonian.
    Numeric,
    /// Thermodynamic-limit formulas (unidirectional lattice only).
    ClosedForm,
    /// Newton iteration on the finite-lattice self-energy.
    SelfConsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundStatesConfig {
    pub method: SearchMethod,
    pub weight_threshold: f64,
    pub tail_window: usize,
    pub min_r_squared: f64,
    pub min_tail_decay: f64,
    /// Also write every state's photon profile.
    pub write_profiles: bool,
}

impl Default for BoundStatesConfig {
    fn default() -> Self {
        let s = SearchOptions::default();
        BoundStatesConfig {
            method: SearchMethod::Numeric,
            weight_threshold: s.weight_threshold,
            tail_window: s.tail_window,
            min_r_squared: s.min_r_squared,
            min_tail_decay: s.min_tail_decay,
            write_profiles: false,
        }
    }
}

impl BoundStatesConfig {
    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            weight_threshold: self.weight_threshold,
            tail_window: self.tail_window,
            min_r_squared: self.min_r_squared,
            min_tail_decay: self.min_tail_decay,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    /// Closed-form amplitudes (unidirectional lattice only).
    Analytic,
    /// Direct integration of the assembled Hamiltonian.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    pub t: f64,
    pub source: ProfileSource,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            t: 40.0,
            source: ProfileSource::Numeric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    EmitterPopulation,
    PhotonPopulation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Exponential,
    PowerLaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub observable: Observable,
    pub law: Law,
    /// `[t_min, t_max]`; when absent the first 20% and last 10% are dropped.
    pub window: Option<[f64; 2]>,
    pub semantics: RateSemantics,
    /// Fit only the local maxima of the series.
    pub peaks: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            observable: Observable::EmitterPopulation,
            law: Law::Exponential,
            window: None,
            semantics: RateSemantics::AmplitudeFromProbability,
            peaks: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTask {
    BoundStates,
    Classify,
    Fit,
}

/// One swept parameter, given as an explicit list or as a linear range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParam {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl SweepParam {
    pub fn resolved_values(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        match (self.start, self.stop, self.points) {
            (Some(a), Some(b), Some(n)) if n >= 2 => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            (Some(a), Some(_), Some(1)) => vec![a],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_task")]
    pub task: SweepTask,
    pub params: Vec<SweepParam>,
}

fn default_sweep_task() -> SweepTask {
    SweepTask::BoundStates
}

/// Names accepted as sweep parameters.
pub const SWEEPABLE: [&str; 10] = [
    "g",
    "delta0",
    "gamma",
    "x0",
    "kappa",
    "length",
    "j_right",
    "j_left",
    "j_hop",
    "delta_stagger",
];

fn default_boundary() -> Boundary {
    Boundary::Periodic
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathKind,
    pub kappa: f64,
    pub length: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_right: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_hop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_stagger: Option<f64>,
    pub emitter: EmitterConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub winding: WindingConfig,
    #[serde(default)]
    pub dos: DosConfig,
    #[serde(default)]
    pub bound_states: BoundStatesConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    /// Bath described by the top-level keys. Missing hoppings are reported
    /// by [`RunConfig::violations`]; here they fall back to 0.
    pub fn bath_spec(&self) -> BathSpec {
        let lattice = match self.bath {
            BathKind::Unidirectional => Lattice::Unidirectional,
            BathKind::HatanoNelson => Lattice::HatanoNelson {
                j_right: self.j_right.unwrap_or(0.0),
                j_left: self.j_left.unwrap_or(0.0),
            },
            BathKind::AlternatingLoss => Lattice::AlternatingLoss {
                j_hop: self.j_hop.unwrap_or(0.0),
                delta: self.delta_stagger.unwrap_or(0.0),
            },
        };
        BathSpec {
            lattice,
            kappa: self.kappa,
            length: self.length,
            boundary: self.boundary,
        }
    }

    pub fn emitter_spec(&self) -> EmitterSpec {
        EmitterSpec::new(self.emitter.delta0, self.emitter.gamma, self.emitter.g, self.emitter.x0)
    }

    /// Every violated constraint, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let needs = |out: &mut Vec<String>, key: &str, v: Option<f64>, wanted: bool, kind: &str| match (v.is_some(), wanted) {
            (false, true) => out.push(format!("{key} is required for bath {kind}")),
            (true, false) => out.push(format!("{key} does not apply to bath {kind}")),
            _ => {}
        };
        let kind = serde_json::to_value(self.bath)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let hn = self.bath == BathKind::HatanoNelson;
        let alt = self.bath == BathKind::AlternatingLoss;
        needs(&mut out, "j_right", self.j_right, hn, &kind);
        needs(&mut out, "j_left", self.j_left, hn, &kind);
        needs(&mut out, "j_hop", self.j_hop, alt, &kind);
        if self.delta_stagger.is_some() && !alt {
            out.push(format!("delta_stagger does not apply to bath {kind}"));
        }
        out.extend(self.bath_spec().violations());
        out.extend(self.emitter_spec().violations(self.length));

        let t = &self.time;
        if !(t.t_max > 0.0) || !t.t_max.is_finite() {
            out.push(format!("time.t_max must be > 0 (got {})", t.t_max));
        }
        if t.steps < 2 {
            out.push(format!("time.steps must be >= 2 (got {})", t.steps));
        }
        if t.snapshot_every == 0 {
            out.push("time.snapshot_every must be >= 1".into());
        }
        match t.integrator {
            Integrator::Rk4 { step_fraction } if !(step_fraction > 0.0 && step_fraction <= 0.1) => {
                out.push(format!("time.integrator.step_fraction must be in (0, 0.1] (got {step_fraction})"))
            }
            Integrator::Adaptive { rtol } if !(rtol > 0.0 && rtol < 1.0) => {
                out.push(format!("time.integrator.rtol must be in (0, 1) (got {rtol})"))
            }
            _ => {}
        }
        if self.spectrum.n_k == 0 {
            out.push("spectrum.n_k must be >= 1".into());
        }
        if self.winding.n_k < 256 {
            out.push(format!("winding.n_k must be >= 256 (got {})", self.winding.n_k));
        }
        if self.winding.e_ref.is_empty() {
            out.push("winding.e_ref must list at least one energy".into());
        }
        if self.dos.n_k == 0 || self.dos.bins == 0 {
            out.push("dos.n_k and dos.bins must be >= 1".into());
        }
        let b = &self.bound_states;
        if !(b.weight_threshold >= 0.0 && b.weight_threshold < 1.0) {
            out.push(format!("bound_states.weight_threshold must be in [0, 1) (got {})", b.weight_threshold));
        }
        if b.tail_window < 8 {
            out.push(format!("bound_states.tail_window must be >= 8 (got {})", b.tail_window));
        }
        if !(b.min_r_squared >= 0.0 && b.min_r_squared <= 1.0) {
            out.push(format!("bound_states.min_r_squared must be in [0, 1] (got {})", b.min_r_squared));
        }
        if b.method == SearchMethod::ClosedForm && self.bath != BathKind::Unidirectional {
            out.push("bound_states.method closed_form needs the unidirectional bath".into());
        }
        if !(self.profile.t >= 0.0) || !self.profile.t.is_finite() {
            out.push(format!("profile.t must be >= 0 (got {})", self.profile.t));
        }
        if self.profile.source == ProfileSource::Analytic && self.bath != BathKind::Unidirectional {
            out.push("profile.source analytic needs the unidirectional bath".into());
        }
        if let Some([a, b]) = self.fit.window {
            if !(a < b) {
                out.push(format!("fit.window must satisfy t_min < t_max (got [{a}, {b}])"));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.params.is_empty() {
                out.push("sweep.params must list one or two parameters".into());
            }
            if sweep.params.len() > 2 {
                out.push(format!("sweep accepts at most two parameters (got {})", sweep.params.len()));
            }
            for p in &sweep.params {
                if !SWEEPABLE.contains(&p.name.as_str()) {
                    out.push(format!("sweep parameter `{}` is not one of {}", p.name, SWEEPABLE.join(", ")));
                }
                let explicit = p.values.is_some();
                let range = p.start.is_some() || p.stop.is_some() || p.points.is_some();
                if explicit && range {
                    out.push(format!("sweep parameter `{}`: give either values or start/stop/points", p.name));
                } else if !explicit && !(p.start.is_some() && p.stop.is_some() && p.points.is_some()) {
                    out.push(format!("sweep parameter `{}`: range needs start, stop and points", p.name));
                }
                let complete = explicit || (p.start.is_some() && p.stop.is_some() && p.points.is_some());
                let n = p.resolved_values().len();
                if complete && n < 2 {
                    out.push(format!("sweep parameter `{}` needs at least 2 values (got {n})", p.name));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Sets one sweepable parameter.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let as_index = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidArgument(format!("{name} must be a non-negative integer (got {v})")))
            }
        };
        match name {
            "g" => self.emitter.g = value,
            "delta0" => self.emitter.delta0 = value,
            "gamma" => self.emitter.gamma = value,
            "x0" => self.emitter.x0 = as_index(value)?,
            "kappa" => self.kappa = value,
            "length" => self.length = as_index(value)?,
            "j_right" => self.j_right = Some(value),
            "j_left" => self.j_left = Some(value),
            "j_hop" => self.j_hop = Some(value),
            "delta_stagger" => self.delta_stagger = Some(value),
            _ => return Err(Error::InvalidArgument(format!("unknown sweep parameter `{name}`"))),
        }
        Ok(())
    }
}

fn parse_error(source: &str, err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    let inner = err.into_inner();
    Error::Parse {
        path: if path == "." { source.to_owned() } else { format!("{source}: {path}") },
        line: inner.line(),
        column: inner.column(),
        message: inner.to_string(),
    }
}

/// Parses and validates a configuration held in memory. `overrides` are
/// `dotted.key=value` assignments applied before validation; values are
/// read as JSON, falling back to a plain string.
pub fn parse_config_str(text: &str, source: &str, overrides: &[String]) -> Result<RunConfig> {
    let config: RunConfig = if overrides.is_empty() {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| parse_error(source, e))?
    } else {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: source.to_owned(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        serde_path_to_error::deserialize(value).map_err(|e| parse_error(source, e))?
    };
    config.validate()?;
    Ok(config)
}

/// Reads, parses and validates a configuration file.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, &path.display().to_string(), overrides)
}

fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidArgument(format!("override `{key}`: `{part}` is not inside an object")))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_owned(), value);
            return Ok(());
        }
        node = obj
            .entry((*part).to_owned())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}
