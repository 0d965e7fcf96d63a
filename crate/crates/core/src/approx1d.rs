//! Standard NLS in d = 1 with a shrinking potential
//!
//!   i ψ_t = −ψ_xx + ε⁻¹ V(x/ε) |ψ|^{2σ} ψ,
//!
//! solved by Strang splitting on a periodic grid, and compared against the
//! point-interaction solution with β = ∫V.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::charge::{solve_linear, solve_nonlinear, DEFAULT_BLOWUP_GUARD};
use crate::datum::{GridDatum, InitialDatum};
use crate::error::{domain, Error, Result};
use crate::field::{reconstruct, SpatialGrid};
use crate::linear_delta::DeltaModel;
use crate::Dim;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PotentialShape {
    /// height β/(2a) on |x| < a
    Box { half_width: f64 },
    /// β e^{−x²}/√π
    Gaussian,
    /// V ≡ 0
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub shape: PotentialShape,
    pub beta: f64,
}

impl PotentialProfile {
    pub fn boxed(beta: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(domain("PotentialProfile", "box half-width must be positive"));
        }
        Ok(Self { shape: PotentialShape::Box { half_width }, beta })
    }

    pub fn gaussian(beta: f64) -> Self {
        Self { shape: PotentialShape::Gaussian, beta }
    }

    pub fn zero() -> Self {
        Self { shape: PotentialShape::Zero, beta: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.shape {
            PotentialShape::Box { half_width } => {
                if x.abs() < half_width {
                    self.beta / (2.0 * half_width)
                } else {
                    0.0
                }
            }
            PotentialShape::Gaussian => self.beta * (-x * x).exp() / PI.sqrt(),
            PotentialShape::Zero => 0.0,
        }
    }

    /// ε⁻¹ V(x/ε).
    pub fn scaled(&self, eps: f64, x: f64) -> f64 {
        self.value(x / eps) / eps
    }

    /// ∫V.
    pub fn integral(&self) -> f64 {
        self.beta
    }

    /// ∫|x||V|.
    pub fn moment(&self) -> f64 {
        match self.shape {
            PotentialShape::Box { half_width } => 0.5 * self.beta.abs() * half_width,
            PotentialShape::Gaussian => self.beta.abs() / PI.sqrt(),
            PotentialShape::Zero => 0.0,
        }
    }

    /// Width of the unscaled core, used for the resolution check.
    pub fn core_width(&self) -> Option<f64> {
        match self.shape {
            PotentialShape::Box { half_width } => Some(2.0 * half_width),
            PotentialShape::Gaussian => Some(2.0),
            PotentialShape::Zero => None,
        }
    }
}

/// Reusable FFT plans and multipliers for one periodic grid.
struct Stepper {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    kinetic: Vec<Complex64>,
    potential: Vec<f64>,
    sigma: f64,
    dt: f64,
}

fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * kk / (n as f64 * dx)
        })
        .collect()
}

impl Stepper {
    fn new(v: &PotentialProfile, eps: f64, sigma: f64, grid: &GridDatum, dt: f64) -> Self {
        let n = grid.values.len();
        let mut planner = FftPlanner::new();
        let wavenumbers = wavenumbers(n, grid.dx);
        let kinetic = wavenumbers.iter().map(|k| Complex64::from_polar(1.0, -k * k * dt)).collect();
        let potential = (0..n).map(|j| v.scaled(eps, grid.x0 + j as f64 * grid.dx)).collect();
        Self { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), wavenumbers, kinetic, potential, sigma, dt }
    }

    // exact flow of i ψ_t = V_ε |ψ|^{2σ} ψ over τ; |ψ| is invariant
    fn potential_step(&self, psi: &mut [Complex64], tau: f64) {
        for (p, &v) in psi.iter_mut().zip(&self.potential) {
            if v != 0.0 {
                let a = if self.sigma == 0.0 { 1.0 } else { p.norm_sqr().powf(self.sigma) };
                *p *= Complex64::from_polar(1.0, -v * a * tau);
            }
        }
    }

    fn step(&self, psi: &mut [Complex64]) {
        let n = psi.len() as f64;
        self.potential_step(psi, 0.5 * self.dt);
        self.fwd.process(psi);
        for (p, k) in psi.iter_mut().zip(&self.kinetic) {
            *p *= k / n;
        }
        self.inv.process(psi);
        self.potential_step(psi, 0.5 * self.dt);
    }

    fn derivative(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = psi.len();
        let mut buf = psi.to_vec();
        self.fwd.process(&mut buf);
        for (p, (k, j)) in buf.iter_mut().zip(self.wavenumbers.iter().zip(0..n)) {
            // drop the unpaired Nyquist mode
            let kk = if n % 2 == 0 && j == n / 2 { 0.0 } else { *k };
            *p *= Complex64::new(0.0, kk) / n as f64;
        }
        self.inv.process(&mut buf);
        buf
    }

    fn energy(&self, psi: &[Complex64], dx: f64) -> f64 {
        let dpsi = self.derivative(psi);
        let kin: f64 = dpsi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        let pot: f64 = psi
            .iter()
            .zip(&self.potential)
            .map(|(p, v)| v * p.norm_sqr().powf(self.sigma + 1.0))
            .sum::<f64>()
            * dx;
        0.5 * kin + pot / (2.0 * self.sigma + 2.0)
    }
}

/// Snapshots of a split-step run with the conserved quantities at each.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitStepRun {
    pub times: Vec<f64>,
    pub snapshots: Vec<GridDatum>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// mass in the outer tenth of the periodic box, maximum over the run
    pub boundary_mass: f64,
}

impl SplitStepRun {
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max)
    }

    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs() / e0.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
    }
}

fn boundary_fraction(psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let band = n / 20;
    let total: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
    let edge: f64 = psi[..band].iter().chain(&psi[n - band..]).map(|v| v.norm_sqr()).sum();
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Strang-split evolution up to `t_final`, recording every `record_every` steps.
/// σ = 0 gives the linear problem with potential ε⁻¹V(x/ε).
pub fn splitstep_solve(
    v: &PotentialProfile,
    eps: f64,
    sigma: f64,
    psi0: &GridDatum,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<SplitStepRun> {
    if !(eps > 0.0) || !(sigma >= 0.0) || !(dt > 0.0) || !(t_final > 0.0) || record_every == 0 {
        return Err(domain("splitstep_solve", "need eps > 0, sigma ≥ 0, dt > 0, T > 0"));
    }
    if let Some(w) = v.core_width() {
        let pts = w * eps / psi0.dx;
        if pts < 8.0 {
            return Err(Error::Resolution(format!(
                "{pts:.1} points across the potential core at eps = {eps}; need at least 8"
            )));
        }
    }
    let steps = (t_final / dt).round() as usize;
    if ((steps as f64) * dt - t_final).abs() > 1e-9 * t_final {
        return Err(domain("splitstep_solve", "dt must divide T"));
    }
    let st = Stepper::new(v, eps, sigma, psi0, dt);
    let mut psi = psi0.values.clone();
    let dx = psi0.dx;
    let mass_of = |p: &[Complex64]| p.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    let mut run = SplitStepRun {
        times: vec![0.0],
        snapshots: vec![psi0.clone()],
        mass: vec![mass_of(&psi)],
        energy: vec![st.energy(&psi, dx)],
        boundary_mass: boundary_fraction(&psi),
    };
    for n in 1..=steps {
        st.step(&mut psi);
        if n % record_every == 0 || n == steps {
            run.times.push(n as f64 * dt);
            run.mass.push(mass_of(&psi));
            run.energy.push(st.energy(&psi, dx));
            run.boundary_mass = run.boundary_mass.max(boundary_fraction(&psi));
            run.snapshots.push(GridDatum::new(psi0.x0, dx, psi.clone())?);
        }
    }
    Ok(run)
}

/// Discretization of one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub half_width: f64,
    pub n_points: usize,
    pub dt: f64,
    /// time step of the charge equation
    pub h: f64,
    /// number of comparison times in (0, T]
    pub samples: usize,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self { half_width: 20.0, n_points: 8192, dt: 1e-4, h: 1e-3, samples: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub eps: f64,
    pub sup_h1_error: f64,
    pub runtime_s: f64,
    pub mass_drift: f64,
    pub boundary_mass: f64,
}

/// sup over the sample times of ‖ψ_ε − ψ‖_{H¹} for each ε, ψ being the
/// point-interaction solution with β = ∫V (linear with α = β when σ = 0).
pub fn compare_to_delta(
    v: &PotentialProfile,
    eps_list: &[f64],
    sigma: f64,
    psi0: &InitialDatum,
    t_final: f64,
    cfg: &ComparisonConfig,
) -> Result<Vec<ComparisonRow>> {
    if cfg.samples == 0 || cfg.n_points < 8 {
        return Err(domain("compare_to_delta", "need samples ≥ 1 and at least 8 grid points"));
    }
    let beta = v.integral();
    let model = if sigma == 0.0 { DeltaModel::linear(Dim::One, beta)? } else { DeltaModel::nonlinear(Dim::One, beta, sigma)? };
    let traj = if sigma == 0.0 {
        solve_linear(model, psi0, t_final, cfg.h)?
    } else {
        solve_nonlinear(model, psi0, t_final, cfg.h, DEFAULT_BLOWUP_GUARD)?
    };
    if traj.blown_up.is_some() {
        return Err(Error::Unsupported("the point-interaction solution blows up before T".into()));
    }
    let grid0 = GridDatum::sample(psi0, cfg.half_width, cfg.n_points)?;
    let dx = grid0.dx;
    let points: Vec<f64> = (0..cfg.n_points).map(|j| grid0.x0 + j as f64 * dx).collect();
    let sample_times: Vec<f64> = (1..=cfg.samples).map(|k| t_final * k as f64 / cfg.samples as f64).collect();
    let step_t = t_final / cfg.samples as f64;
    let record = (step_t / cfg.dt).round() as usize;
    if ((record as f64) * cfg.dt - step_t).abs() > 1e-9 * step_t || record == 0 {
        return Err(domain("compare_to_delta", "dt must divide T/samples"));
    }

    let reference: Vec<_> = sample_times
        .iter()
        .map(|&t| {
            let g = SpatialGrid { points: points.clone(), weights: vec![dx; points.len()], tail_from: None };
            reconstruct(&traj, psi0, t, g)
        })
        .collect::<Result<_>>()?;

    let wn = wavenumbers(cfg.n_points, dx);
    eps_list
        .par_iter()
        .map(|&eps| {
            let start = Instant::now();
            let run = splitstep_solve(v, eps, sigma, &grid0, t_final, cfg.dt, record)?;
            let mut planner = FftPlanner::new();
            let (fwd, inv) = (planner.plan_fft_forward(cfg.n_points), planner.plan_fft_inverse(cfg.n_points));
            let mut sup = 0.0f64;
            for (snap, refr) in run.snapshots.iter().skip(1).zip(&reference) {
                let mut d = snap.values.clone();
                fwd.process(&mut d);
                let n = cfg.n_points;
                for (j, p) in d.iter_mut().enumerate() {
                    let k = if n % 2 == 0 && j == n / 2 { 0.0 } else { wn[j] };
                    *p *= Complex64::new(0.0, k) / n as f64;
                }
                inv.process(&mut d);
                let err: f64 = (0..n)
                    .map(|j| (snap.values[j] - refr.values[j]).norm_sqr() + (d[j] - refr.gradient[j]).norm_sqr())
                    .sum::<f64>()
                    * dx;
                sup = sup.max(err.sqrt());
            }
            Ok(ComparisonRow {
                eps,
                sup_h1_error: sup,
                runtime_s: start.elapsed().as_secs_f64(),
                mass_drift: run.mass_drift(),
                boundary_mass: run.boundary_mass,
            })
        })
        .collect()
}
