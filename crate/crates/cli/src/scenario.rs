//! Scenario files: one strict JSON document per run. Unknown keys are
//! rejected; optional sections are filled with their defaults by [`parse`], so
//! the serialized scenario is the full resolved configuration.

use std::fmt;

use deltanls::analytic::bound_state;
use deltanls::approx1d::{ComparisonConfig, PotentialProfile};
use deltanls::charge::GradedConfig;
use deltanls::datum::{GaussianPart, InitialDatum};
use deltanls::linear_delta::{eigenstate_norm_const, eigenvalue, Coupling, DeltaModel};
use deltanls::{Complex64, Dim};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Spectrum,
    StandingWave,
    Blowup,
    Approx,
    Verify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Evolve => "evolve",
            Mode::Spectrum => "spectrum",
            Mode::StandingWave => "standing-wave",
            Mode::Blowup => "blowup",
            Mode::Approx => "approx",
            Mode::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax,
    UnknownKey,
    MissingKey,
    TypeMismatch,
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    /// dotted key path, empty for the document root
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn constraint(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind: ConfigErrorKind::Constraint, field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ConfigErrorKind::Syntax => "syntax error",
            ConfigErrorKind::UnknownKey => "unknown key",
            ConfigErrorKind::MissingKey => "missing key",
            ConfigErrorKind::TypeMismatch => "type mismatch",
            ConfigErrorKind::Constraint => "constraint violation",
        };
        if self.field.is_empty() {
            write!(f, "{kind}: {}", self.message)
        } else {
            write!(f, "{kind} at `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standing_wave: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
}

/// `alpha` alone gives the linear model, `beta` with `sigma` the nonlinear one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub d: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub amplitude: ComplexSpec,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSpec {
    Gaussian {
        amplitude: ComplexSpec,
        width: f64,
    },
    /// standing wave of the model at frequency ω
    BoundState {
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// initial value of the exact blow-up solution built on the ω standing wave
    Pseudoconformal {
        omega: f64,
        #[serde(default)]
        phase: f64,
        blowup_time: f64,
    },
    Green {
        charge: ComplexSpec,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        regular: Option<GaussianSpec>,
    },
    /// normalized eigenstate of the linear model
    Eigenstate,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureGridSpec {
    /// half-width (d = 1) or outer radius (d = 2, 3)
    pub extent: f64,
    pub panel: f64,
    pub order: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// times of the observables table; default: T/10 spacing
    #[serde(default)]
    pub observable_times: Vec<f64>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_grid: Option<UniformGridSpec>,
    /// decomposition parameter for energies in d = 2, 3
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// time offset of the moment second difference in the virial column
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub virial_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let s = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if self.log {
                    (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + s * (self.max - self.min)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    pub window: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rotation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_growth: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Gaussian,
    Box { half_width: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSpec {
    pub potential: PotentialSpec,
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default)]
    pub criteria: Vec<String>,
}

fn classify(err: &serde_json::Error) -> ConfigErrorKind {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ConfigErrorKind::Syntax,
        Category::Data => {
            let m = err.to_string();
            if m.starts_with("unknown field") || m.starts_with("unknown variant") {
                ConfigErrorKind::UnknownKey
            } else if m.starts_with("missing field") {
                ConfigErrorKind::MissingKey
            } else {
                ConfigErrorKind::TypeMismatch
            }
        }
    }
}

/// Parses and validates a scenario for the given mode, filling defaults.
pub fn parse(text: &str, mode: Mode) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError { kind: classify(&inner), field: if path == "." { String::new() } else { path }, message: inner.to_string() }
    })?;
    if let Some(declared) = sc.mode {
        if declared != mode {
            return Err(ConfigError::constraint("mode", format!("scenario is for `{declared}` but `{mode}` was requested")));
        }
    }
    sc.mode = Some(mode);
    sc.validate(mode)?;
    Ok(sc)
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::constraint(field, format!("must be positive and finite (got {v})")))
    }
}

fn on_grid(field: &str, t: f64, h: f64, t_final: f64) -> Result<(), ConfigError> {
    let k = (t / h).round();
    if !(t >= 0.0 && t <= t_final * (1.0 + 1e-12)) {
        return Err(ConfigError::constraint(field, format!("{t} lies outside [0, T]")));
    }
    if (k * h - t).abs() > 1e-9 * h.max(t) {
        return Err(ConfigError::constraint(field, format!("{t} is not a multiple of h = {h}")));
    }
    Ok(())
}

impl ModelSpec {
    pub fn dim(&self) -> Result<Dim, ConfigError> {
        u8::try_from(self.d)
            .ok()
            .and_then(|d| Dim::try_from(d).ok())
            .ok_or_else(|| {
                ConfigError::constraint(
                    "model.d",
                    format!("dimension {} not supported: the point interaction is defined only for d = 1, 2, 3", self.d),
                )
            })
    }

    pub fn build(&self) -> Result<DeltaModel, ConfigError> {
        let d = self.dim()?;
        match (self.alpha, self.beta, self.sigma) {
            (Some(alpha), None, None) => {
                if !alpha.is_finite() {
                    return Err(ConfigError::constraint("model.alpha", "must be finite"));
                }
                DeltaModel::linear(d, alpha).map_err(|e| ConfigError::constraint("model.alpha", e.to_string()))
            }
            (None, Some(beta), Some(sigma)) => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(ConfigError::constraint("model.sigma", format!("must be > 0 (got {sigma})")));
                }
                if !(beta != 0.0 && beta.is_finite()) {
                    return Err(ConfigError::constraint("model.beta", format!("must be finite and nonzero (got {beta})")));
                }
                DeltaModel::nonlinear(d, beta, sigma).map_err(|e| ConfigError::constraint("model", e.to_string()))
            }
            (None, Some(_), None) => Err(ConfigError::constraint("model.sigma", "required with `beta`")),
            (None, None, Some(_)) => Err(ConfigError::constraint("model.beta", "required with `sigma`")),
            (None, None, None) => Err(ConfigError::constraint("model", "give either `alpha` or `beta` and `sigma`")),
            _ => Err(ConfigError::constraint("model.alpha", "`alpha` excludes `beta` and `sigma`")),
        }
    }
}

impl DatumSpec {
    pub fn build(&self, model: &DeltaModel) -> Result<InitialDatum, ConfigError> {
        let d = model.dim;
        let standing = |omega: f64| {
            let (beta, sigma) = model
                .beta_sigma()
                .map_err(|_| ConfigError::constraint("datum.kind", "standing waves need a nonlinear model"))?;
            bound_state(d, beta, sigma, omega).map_err(|e| ConfigError::constraint("datum.omega", e.to_string()))
        };
        let datum = match *self {
            DatumSpec::Gaussian { amplitude, width } => {
                positive("datum.width", width)?;
                InitialDatum::gaussian(amplitude.value(), width)
            }
            DatumSpec::BoundState { omega, phase } => InitialDatum::BoundState { state: standing(omega)?, phase },
            DatumSpec::Pseudoconformal { omega, phase, blowup_time } => {
                positive("datum.blowup_time", blowup_time)?;
                InitialDatum::Pseudoconformal { state: standing(omega)?, phase, blowup_time }
            }
            DatumSpec::Green { charge, lambda, regular } => {
                positive("datum.lambda", lambda)?;
                if let Some(r) = regular {
                    positive("datum.regular.width", r.width)?;
                }
                InitialDatum::Green {
                    charge: charge.value(),
                    lambda,
                    regular: regular.map(|r| GaussianPart { amplitude: r.amplitude.value(), width: r.width }),
                }
            }
            DatumSpec::Eigenstate => {
                let alpha = match model.coupling {
                    Coupling::Linear { alpha } => alpha,
                    _ => return Err(ConfigError::constraint("datum.kind", "the eigenstate needs a linear model")),
                };
                let ell = eigenvalue(d, alpha)
                    .ok_or_else(|| ConfigError::constraint("model.alpha", format!("no eigenvalue for α = {alpha} in d = {d}")))?;
                let lambda = -ell;
                let charge = eigenstate_norm_const(d, lambda).map_err(|e| ConfigError::constraint("datum", e.to_string()))?;
                InitialDatum::Green { charge: Complex64::new(charge, 0.0), lambda, regular: None }
            }
        };
        datum.validate(d).map_err(|e| ConfigError::constraint("datum", e.to_string()))?;
        Ok(datum)
    }
}

impl Scenario {
    pub fn model(&self) -> Result<DeltaModel, ConfigError> {
        self.model.as_ref().ok_or_else(|| ConfigError::constraint("model", "required for this mode"))?.build()
    }

    pub fn datum(&self) -> Result<InitialDatum, ConfigError> {
        let model = self.model()?;
        self.datum.as_ref().ok_or_else(|| ConfigError::constraint("datum", "required for this mode"))?.build(&model)
    }

    pub fn time(&self) -> Result<TimeSpec, ConfigError> {
        self.time.ok_or_else(|| ConfigError::constraint("time", "required for this mode"))
    }

    fn validate_time(&self) -> Result<TimeSpec, ConfigError> {
        let t = self.time()?;
        positive("time.T", t.t_final)?;
        positive("time.h", t.h)?;
        let n = (t.t_final / t.h).round();
        if n < 1.0 || (n * t.h - t.t_final).abs() > 1e-9 * t.t_final {
            return Err(ConfigError::constraint("time.h", format!("h = {} must divide T = {}", t.h, t.t_final)));
        }
        Ok(t)
    }

    fn validate_sweep(field: &str, s: &SweepSpec) -> Result<(), ConfigError> {
        if s.points == 0 {
            return Err(ConfigError::constraint(format!("{field}.points"), "must be at least 1"));
        }
        if !(s.min.is_finite() && s.max.is_finite() && s.min <= s.max) {
            return Err(ConfigError::constraint(field, "need finite min ≤ max"));
        }
        if s.log {
            positive(&format!("{field}.min"), s.min)?;
        }
        Ok(())
    }

    fn validate(&mut self, mode: Mode) -> Result<(), ConfigError> {
        if let Some(m) = &self.model {
            // a spectrum sweep supplies α itself
            if mode == Mode::Spectrum {
                m.dim()?;
            } else {
                m.build()?;
            }
        }
        match mode {
            Mode::Evolve => {
                let model = self.model()?;
                self.datum()?;
                let t = self.validate_time()?;
                self.fill_outputs(model.dim, t)?;
            }
            Mode::Spectrum => {
                let m = self.model.as_ref().ok_or_else(|| ConfigError::constraint("model", "required for this mode"))?;
                m.dim()?;
                let s = self.spectrum.ok_or_else(|| ConfigError::constraint("spectrum", "required for this mode"))?;
                Self::validate_sweep("spectrum", &s)?;
            }
            Mode::StandingWave => {
                let model = self.model()?;
                model.beta_sigma().map_err(|_| ConfigError::constraint("model", "standing waves need `beta` and `sigma`"))?;
                let s = self.standing_wave.ok_or_else(|| ConfigError::constraint("standing_wave", "required for this mode"))?;
                Self::validate_sweep("standing_wave", &s)?;
                if self.time.is_some() {
                    self.validate_time()?;
                    if !matches!(self.datum, Some(DatumSpec::BoundState { .. })) {
                        return Err(ConfigError::constraint("datum", "a `time` block needs a bound_state datum"));
                    }
                    self.datum()?;
                }
            }
            Mode::Blowup => {
                let model = self.model()?;
                model.beta_sigma().map_err(|_| ConfigError::constraint("model", "blow-up runs need `beta` and `sigma`"))?;
                if model.dim == Dim::Two {
                    return Err(ConfigError::constraint("model.d", "blow-up runs use the graded mesh, available for d = 1, 3"));
                }
                self.datum()?;
                let t = self.validate_time()?;
                let b = self.blowup.as_mut().ok_or_else(|| ConfigError::constraint("blowup", "required for this mode"))?;
                let [a, w] = b.window;
                if !(a >= 0.0 && a < w && w <= t.t_final) {
                    return Err(ConfigError::constraint("blowup.window", "need 0 ≤ start < end ≤ T"));
                }
                let def = GradedConfig { h_max: t.h, ..GradedConfig::default() };
                b.h_max.get_or_insert(def.h_max);
                b.h_min.get_or_insert(def.h_min);
                b.max_rotation.get_or_insert(def.max_rotation);
                b.max_growth.get_or_insert(def.max_growth);
                for (k, v) in [("h_max", b.h_max), ("h_min", b.h_min), ("max_rotation", b.max_rotation), ("max_growth", b.max_growth)] {
                    positive(&format!("blowup.{k}"), v.unwrap_or(0.0))?;
                }
            }
            Mode::Approx => {
                let model = self.model()?;
                if model.dim != Dim::One {
                    return Err(ConfigError::constraint("model.d", "the shrinking-potential comparison is one-dimensional"));
                }
                self.datum()?;
                let t = self.validate_time()?;
                let a = self.approx.as_mut().ok_or_else(|| ConfigError::constraint("approx", "required for this mode"))?;
                if a.eps.is_empty() {
                    return Err(ConfigError::constraint("approx.eps", "needs at least one value"));
                }
                for (i, &e) in a.eps.iter().enumerate() {
                    positive(&format!("approx.eps[{i}]"), e)?;
                }
                if let PotentialSpec::Box { half_width } = a.potential {
                    positive("approx.potential.half_width", half_width)?;
                }
                let def = ComparisonConfig::default();
                a.half_width.get_or_insert(def.half_width);
                a.n_points.get_or_insert(def.n_points);
                a.dt.get_or_insert(def.dt);
                a.samples.get_or_insert(def.samples);
                positive("approx.half_width", a.half_width.unwrap_or(0.0))?;
                positive("approx.dt", a.dt.unwrap_or(0.0))?;
                if a.n_points.unwrap_or(0) < 8 {
                    return Err(ConfigError::constraint("approx.n_points", "must be at least 8"));
                }
                let samples = a.samples.unwrap_or(0);
                if samples == 0 {
                    return Err(ConfigError::constraint("approx.samples", "must be at least 1"));
                }
                let step = t.t_final / samples as f64;
                let k = (step / a.dt.unwrap_or(1.0)).round();
                if k < 1.0 || (k * a.dt.unwrap_or(1.0) - step).abs() > 1e-9 * step {
                    return Err(ConfigError::constraint("approx.dt", "must divide T/samples"));
                }
                let s = (step / t.h).round();
                if (s * t.h - step).abs() > 1e-9 * step {
                    return Err(ConfigError::constraint("time.h", "must divide T/approx.samples"));
                }
            }
            Mode::Verify => {
                let v = self.verify.get_or_insert_with(VerifySpec::default);
                for (i, id) in v.criteria.iter().enumerate() {
                    if !deltanls::verify::CRITERIA.contains(&id.as_str()) {
                        return Err(ConfigError::constraint(
                            format!("verify.criteria[{i}]"),
                            format!("unknown criterion `{id}`; known: {}", deltanls::verify::CRITERIA.join(", ")),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn fill_outputs(&mut self, d: Dim, t: TimeSpec) -> Result<(), ConfigError> {
        let o = &mut self.outputs;
        if o.observable_times.is_empty() {
            let n = (t.t_final / t.h).round() as usize;
            let stride = (n / 10).max(1);
            o.observable_times = (0..=n).step_by(stride).map(|k| k as f64 * t.h).collect();
        }
        for (i, &s) in o.observable_times.iter().enumerate() {
            on_grid(&format!("outputs.observable_times[{i}]"), s, t.h, t.t_final)?;
        }
        for (i, &s) in o.snapshot_times.iter().enumerate() {
            on_grid(&format!("outputs.snapshot_times[{i}]"), s, t.h, t.t_final)?;
        }
        let q = *o.quadrature.get_or_insert(match d {
            Dim::One => QuadratureGridSpec { extent: 40.0, panel: 0.5, order: 16 },
            _ => QuadratureGridSpec { extent: 30.0, panel: 0.5, order: 16 },
        });
        positive("outputs.quadrature.extent", q.extent)?;
        positive("outputs.quadrature.panel", q.panel)?;
        if q.order < 2 {
            return Err(ConfigError::constraint("outputs.quadrature.order", "must be at least 2"));
        }
        let g = *o.snapshot_grid.get_or_insert(match d {
            Dim::One => UniformGridSpec { min: -10.0, max: 10.0, points: 401 },
            _ => UniformGridSpec { min: 0.05, max: 10.0, points: 200 },
        });
        if g.points < 2 || !(g.max > g.min) {
            return Err(ConfigError::constraint("outputs.snapshot_grid", "need at least 2 points and max > min"));
        }
        if d != Dim::One && !(g.min > 0.0) {
            return Err(ConfigError::constraint("outputs.snapshot_grid.min", "radial grids exclude r = 0"));
        }
        positive("outputs.lambda", *o.lambda.get_or_insert(1.0))?;
        let dv = *o.virial_step.get_or_insert(((0.02 / t.h).round().max(1.0)) * t.h);
        positive("outputs.virial_step", dv)?;
        let k = (dv / t.h).round();
        if (k * t.h - dv).abs() > 1e-9 * dv {
            return Err(ConfigError::constraint("outputs.virial_step", "must be a multiple of h"));
        }
        Ok(())
    }
}

/// Potential profile with β = ∫V taken from the model.
pub fn potential(spec: PotentialSpec, model: &DeltaModel) -> Result<PotentialProfile, ConfigError> {
    let beta = match model.coupling {
        Coupling::Linear { alpha } => alpha,
        Coupling::Nonlinear { beta, .. } => beta,
    };
    match spec {
        PotentialSpec::Gaussian => Ok(PotentialProfile::gaussian(beta)),
        PotentialSpec::Box { half_width } => {
            PotentialProfile::boxed(beta, half_width).map_err(|e| ConfigError::constraint("approx.potential", e.to_string()))
        }
    }
}
