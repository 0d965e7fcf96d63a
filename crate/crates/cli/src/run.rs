//! Mode runners. Each returns its artifacts in memory, in a fixed order, so
//! that reruns of the same scenario write byte-identical files.

use std::fmt;
use std::time::Instant;

use deltanls::analytic::{rate_exponent, sigma_c, standing_wave_curve};
use deltanls::approx1d::{compare_to_delta, ComparisonConfig};
use deltanls::charge::{solve_graded, solve_linear, solve_nonlinear, ChargeTrajectory, GradedConfig, DEFAULT_BLOWUP_GUARD};
use deltanls::datum::InitialDatum;
use deltanls::export::Table;
use deltanls::field::{blowup_rate_fit, energy, mass, moment_of_inertia, reconstruct, virial_rhs_derived, SpatialGrid};
use deltanls::linear_delta::{eigenvalue, Coupling, DeltaModel};
use deltanls::verify::{self, Profile};
use deltanls::{Complex64, Dim};
use serde::Serialize;

use crate::scenario::{potential, ConfigError, Mode, Scenario};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Numerical(String),
    Verification(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Verification(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn numerical(context: &str) -> impl Fn(deltanls::Error) -> Failure + '_ {
    move |e| Failure::Numerical(format!("{context}: {e}"))
}

pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Files plus lines for stdout. A verification failure still carries its
/// artifacts, which are written before the exit status is reported.
pub struct Report {
    pub artifacts: Vec<Artifact>,
    pub lines: Vec<String>,
    pub failure: Option<Failure>,
}

impl Report {
    fn new() -> Self {
        Self { artifacts: Vec::new(), lines: Vec::new(), failure: None }
    }

    fn csv(&mut self, name: &str, table: Table) {
        self.artifacts.push(Artifact { name: name.into(), contents: table.to_csv() });
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        s.push('\n');
        self.artifacts.push(Artifact { name: name.into(), contents: s });
        Ok(())
    }
}

fn table(columns: &[&str], sc: &Scenario, profile: Profile) -> Table {
    let config = serde_json::to_string(sc).unwrap_or_default();
    Table::new(columns)
        .meta("name", &sc.name)
        .meta("mode", sc.mode.map(|m| m.to_string()).unwrap_or_default())
        .meta("tolerance_profile", format!("{profile:?}").to_lowercase())
        .meta("version", env!("CARGO_PKG_VERSION"))
        .meta("config", config)
}

pub fn run(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    match sc.mode.unwrap_or(Mode::Verify) {
        Mode::Evolve => evolve(sc, profile),
        Mode::Spectrum => spectrum(sc, profile),
        Mode::StandingWave => standing_wave(sc, profile),
        Mode::Blowup => blowup(sc, profile),
        Mode::Approx => approx(sc, profile),
        Mode::Verify => run_verify(sc, profile),
    }
}

fn solve(model: DeltaModel, datum: &InitialDatum, t_final: f64, h: f64) -> Result<ChargeTrajectory, Failure> {
    match model.coupling {
        Coupling::Linear { .. } => solve_linear(model, datum, t_final, h),
        Coupling::Nonlinear { .. } => solve_nonlinear(model, datum, t_final, h, DEFAULT_BLOWUP_GUARD),
    }
    .map_err(numerical("charge equation"))
}

fn charge_table(traj: &ChargeTrajectory, sc: &Scenario, profile: Profile) -> Table {
    let mut t = table(&["t", "q_re", "q_im", "q_abs"], sc, profile);
    if let Some(b) = traj.blown_up {
        t = t.meta("blown_up_after", b.last_time).meta("blow_up_reason", format!("{:?}", b.reason).to_lowercase());
    }
    for (n, q) in traj.values.iter().enumerate() {
        t.push(vec![traj.time(n), q.re, q.im, q.norm()]);
    }
    t
}

fn quadrature_grid(sc: &Scenario, d: Dim) -> SpatialGrid {
    let q = sc.outputs.quadrature.expect("filled by validation");
    match d {
        Dim::One => SpatialGrid::line(q.extent, q.panel, q.order),
        _ => SpatialGrid::radial(q.extent, q.panel, q.order),
    }
}

#[derive(Serialize)]
struct EvolveSummary {
    name: String,
    steps: usize,
    t_last: f64,
    blown_up: bool,
    mass_drift: f64,
    energy_drift: f64,
    virial_form: &'static str,
}

fn evolve(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    let model = sc.model()?;
    let datum = sc.datum()?;
    let time = sc.time()?;
    let d = model.dim;
    let traj = solve(model, &datum, time.t_final, time.h)?;
    let mut rep = Report::new();
    let t_last = traj.t_last();
    if traj.blown_up.is_some() {
        rep.lines.push(format!("charge left the resolved range after t = {t_last}"));
    }
    rep.csv("charge.csv", charge_table(&traj, sc, profile));

    let lambda = sc.outputs.lambda.unwrap_or(1.0);
    let dv = sc.outputs.virial_step.unwrap_or(0.02);
    let observe = |t: f64| -> Result<(f64, f64, f64, Complex64), Failure> {
        let s = reconstruct(&traj, &datum, t, quadrature_grid(sc, d)).map_err(numerical("reconstruction"))?;
        let e = energy(&s, &model, lambda).map_err(numerical("energy"))?;
        Ok((mass(&s), e, moment_of_inertia(&s), s.charge_at_t))
    };
    let times: Vec<f64> = sc.outputs.observable_times.iter().copied().filter(|&t| t <= t_last + 1e-12).collect();
    let mut obs = table(&["t", "mass", "energy", "moment", "virial_residual"], sc, profile)
        .meta("lambda", lambda)
        .meta("virial_form", "M'' - (16 E0 + g)");
    let e0 = observe(0.0)?.1;
    let (mut m0, mut en0) = (None, None);
    let (mut mass_drift, mut energy_drift) = (0.0f64, 0.0f64);
    for &t in &times {
        let (m, e, mom, q) = observe(t)?;
        let (m0, en0) = (*m0.get_or_insert(m), *en0.get_or_insert(e));
        mass_drift = mass_drift.max((m - m0).abs() / m0.max(f64::MIN_POSITIVE));
        energy_drift = energy_drift.max((e - en0).abs() / en0.abs().max(f64::MIN_POSITIVE));
        let virial = if model.beta_sigma().is_ok() && t - dv >= -1e-12 && t + dv <= t_last + 1e-12 {
            let lo = observe(t - dv)?.2;
            let hi = observe(t + dv)?.2;
            let second = (hi - 2.0 * mom + lo) / (dv * dv);
            second - virial_rhs_derived(e0, q, &model).map_err(numerical("virial"))?
        } else {
            f64::NAN
        };
        obs.push(vec![t, m, e, mom, virial]);
    }
    rep.csv("observables.csv", obs);

    let g = sc.outputs.snapshot_grid.expect("filled by validation");
    for &t in &sc.outputs.snapshot_times {
        if t > t_last + 1e-12 {
            rep.lines.push(format!("snapshot at t = {t} skipped: beyond the resolved range"));
            continue;
        }
        let grid = SpatialGrid::uniform(g.min, g.max, g.points).map_err(numerical("snapshot grid"))?;
        let s = reconstruct(&traj, &datum, t, grid).map_err(numerical("reconstruction"))?;
        let mut tab = table(&[if d == Dim::One { "x" } else { "r" }, "re", "im", "abs"], sc, profile).meta("t", t);
        for (x, v) in s.grid.points.iter().zip(&s.values) {
            tab.push(vec![*x, v.re, v.im, v.norm()]);
        }
        rep.csv(&format!("snapshot_t{t:.6}.csv"), tab);
    }

    let summary = EvolveSummary {
        name: sc.name.clone(),
        steps: traj.len() - 1,
        t_last,
        blown_up: traj.blown_up.is_some(),
        mass_drift,
        energy_drift,
        virial_form: "16 E0 + g",
    };
    rep.lines.push(format!(
        "{} steps to t = {t_last}; mass drift {mass_drift:.3e}, energy drift {energy_drift:.3e}",
        summary.steps
    ));
    rep.json("summary.json", &summary)?;
    Ok(rep)
}

fn spectrum(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    let d = sc.model.as_ref().expect("validated").dim()?;
    let sweep = sc.spectrum.expect("validated");
    let mut tab = table(&["alpha", "ell", "exists"], sc, profile).meta("d", d);
    for alpha in sweep.values() {
        match eigenvalue(d, alpha) {
            Some(ell) => tab.push(vec![alpha, ell, 1.0]),
            None => tab.push(vec![alpha, f64::NAN, 0.0]),
        }
    }
    let mut rep = Report::new();
    rep.lines.push(format!("{} eigenvalues for d = {d}", tab.rows.iter().filter(|r| r[2] == 1.0).count()));
    rep.csv("spectrum.csv", tab);
    Ok(rep)
}

#[derive(Serialize)]
struct Stationarity {
    omega: f64,
    max_phase_rel_err: f64,
    steps: usize,
}

#[derive(Serialize)]
struct Curve<'a> {
    d: u8,
    beta: f64,
    sigma: f64,
    points: &'a [deltanls::analytic::CurvePoint],
    #[serde(skip_serializing_if = "Option::is_none")]
    stationarity: Option<Stationarity>,
}

fn standing_wave(sc: &Scenario, _profile: Profile) -> Result<Report, Failure> {
    let model = sc.model()?;
    let (beta, sigma) = model.beta_sigma().map_err(numerical("model"))?;
    let sweep = sc.standing_wave.expect("validated");
    let points = standing_wave_curve(model.dim, beta, sigma, &sweep.values());
    let mut rep = Report::new();
    rep.lines.push(format!("{} admissible frequencies of {}", points.len(), sweep.points));
    let stationarity = match (sc.time, sc.datum.is_some()) {
        (Some(time), true) => {
            let datum = sc.datum()?;
            let omega = match &datum {
                InitialDatum::BoundState { state, .. } => state.omega,
                _ => unreachable!("validated"),
            };
            let traj = solve(model, &datum, time.t_final, time.h)?;
            let q0 = traj.values[0];
            let err = (0..traj.len())
                .map(|n| (traj.values[n] - q0 * Complex64::from_polar(1.0, omega * traj.time(n))).norm() / q0.norm())
                .fold(0.0, f64::max);
            rep.lines.push(format!("ω = {omega}: charge phase error {err:.3e} over [0, {}]", traj.t_last()));
            Some(Stationarity { omega, max_phase_rel_err: err, steps: traj.len() - 1 })
        }
        _ => None,
    };
    let curve = Curve { d: model.dim.as_u8(), beta, sigma, points: &points, stationarity };
    rep.json("curve.json", &curve)?;
    Ok(rep)
}

#[derive(Serialize)]
struct RateReport {
    t_est: f64,
    exponent: f64,
    prefactor: f64,
    rms_residual: f64,
    window: [f64; 2],
    steps: usize,
    t_last: f64,
    stopped_early: bool,
    sigma_c: f64,
    rate_exponent_bound: f64,
}

fn blowup(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    let model = sc.model()?;
    let (_, sigma) = model.beta_sigma().map_err(numerical("model"))?;
    let datum = sc.datum()?;
    let time = sc.time()?;
    let b = sc.blowup.expect("validated");
    let cfg = GradedConfig {
        h_max: b.h_max.expect("filled"),
        h_min: b.h_min.expect("filled"),
        max_rotation: b.max_rotation.expect("filled"),
        max_growth: b.max_growth.expect("filled"),
        guard: DEFAULT_BLOWUP_GUARD,
    };
    let traj = solve_graded(model, &datum, time.t_final, &cfg).map_err(numerical("graded charge solve"))?;
    let mut rep = Report::new();
    rep.csv("charge.csv", charge_table(&traj, sc, profile));
    let fit = blowup_rate_fit(&traj, (b.window[0], b.window[1])).map_err(numerical("rate fit"))?;
    let report = RateReport {
        t_est: fit.t_est,
        exponent: fit.exponent,
        prefactor: fit.prefactor,
        rms_residual: fit.rms_residual,
        window: b.window,
        steps: traj.len() - 1,
        t_last: traj.t_last(),
        stopped_early: traj.blown_up.is_some(),
        sigma_c: sigma_c(sigma),
        rate_exponent_bound: rate_exponent(sigma),
    };
    rep.lines.push(format!(
        "|q| ~ (T - t)^p on [{}, {}]: p = {:.4}, T = {:.5} ({} steps)",
        b.window[0], b.window[1], fit.exponent, fit.t_est, report.steps
    ));
    rep.json("rate_fit.json", &report)?;
    Ok(rep)
}

fn approx(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    let model = sc.model()?;
    let datum = sc.datum()?;
    let time = sc.time()?;
    let a = sc.approx.as_ref().expect("validated");
    let v = potential(a.potential, &model)?;
    let sigma = model.beta_sigma().map(|(_, s)| s).unwrap_or(0.0);
    let cfg = ComparisonConfig {
        half_width: a.half_width.expect("filled"),
        n_points: a.n_points.expect("filled"),
        dt: a.dt.expect("filled"),
        h: time.h,
        samples: a.samples.expect("filled"),
    };
    let start = Instant::now();
    let rows = compare_to_delta(&v, &a.eps, sigma, &datum, time.t_final, &cfg).map_err(numerical("comparison"))?;
    let mut tab = table(&["eps", "sup_h1_error", "mass_drift", "boundary_mass"], sc, profile);
    let mut rep = Report::new();
    for r in &rows {
        tab.push(vec![r.eps, r.sup_h1_error, r.mass_drift, r.boundary_mass]);
        // runtimes go to stdout only, keeping the file reproducible
        rep.lines.push(format!("eps = {}: sup H1 error {:.4e} ({:.1} s)", r.eps, r.sup_h1_error, r.runtime_s));
    }
    let decreasing = rows.windows(2).all(|w| w[1].sup_h1_error < w[0].sup_h1_error);
    rep.lines.push(format!(
        "error column strictly decreasing: {}; total {:.1} s",
        if decreasing { "yes" } else { "no" },
        start.elapsed().as_secs_f64()
    ));
    rep.csv("approx.csv", tab.meta("strictly_decreasing", decreasing));
    Ok(rep)
}

fn run_verify(sc: &Scenario, profile: Profile) -> Result<Report, Failure> {
    let ids: Vec<&str> = match &sc.verify {
        Some(v) if !v.criteria.is_empty() => v.criteria.iter().map(String::as_str).collect(),
        _ => verify::CRITERIA.to_vec(),
    };
    let outcomes = verify::run(&ids, profile);
    let mut rep = Report::new();
    rep.lines.extend(outcomes.iter().map(|o| o.to_string()));
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id.as_str()).collect();
    rep.json("verify.json", &outcomes)?;
    if !failed.is_empty() {
        rep.failure = Some(Failure::Verification(format!("criteria {} failed", failed.join(", "))));
    }
    Ok(rep)
}
