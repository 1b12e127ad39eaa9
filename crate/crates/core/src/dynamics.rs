//! Time integration of the quasi-static flow `V_n = F(|Du|)`.
//!
//! For a star boundary `x = c + r(θ)e(θ)` the normal speed is
//! `V_n = r_t r / √(r² + r_θ²)`, so the radii evolve by
//! `r_t = F(|Du|) √(r² + r_θ²) / r`. Each RK4 stage re-solves the constrained
//! torsion problem; the radius modes are filtered after every step.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::snapshot::fmt17;
use crate::geometry::{area_and_moments, asymmetry_to_ball_from, AsymmetryOptions, StarDomain, Vec2};
use crate::scenario::ScenarioConfig;
use crate::spectral::exponential_filter;
use crate::stability::{ball_closed_forms, serrin_deficit};
use crate::torsion::{solve_torsion, TorsionSolution};

/// Normal velocity as a function of the boundary gradient, `F(s) = Σ c_k s^k`.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityLaw {
    /// `F(s) = s² - 1`.
    Quadratic,
    Polynomial(Vec<f64>),
}

/// Bounds and resolution of the grid on which `F' > 0` is checked.
pub const VALIDATION_GRID: (f64, f64, usize) = (0.1, 10.0, 1000);

impl VelocityLaw {
    pub fn quadratic() -> Self {
        VelocityLaw::Quadratic
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let law = VelocityLaw::Polynomial(coeffs);
        law.validate()?;
        Ok(law)
    }

    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            VelocityLaw::Quadratic => vec![-1.0, 0.0, 1.0],
            VelocityLaw::Polynomial(c) => c.clone(),
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.coefficients() == [-1.0, 0.0, 1.0]
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            VelocityLaw::Quadratic => s * s - 1.0,
            VelocityLaw::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * s + ck),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            VelocityLaw::Quadratic => 2.0 * s,
            VelocityLaw::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * s + k as f64 * ck),
        }
    }

    /// `F(1) = 0` and `F' > 0` on the validation grid.
    pub fn validate(&self) -> Result<()> {
        let c = self.coefficients();
        if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::VelocityLaw("coefficients must be finite and nonempty".into()));
        }
        let scale: f64 = c.iter().map(|v| v.abs()).sum();
        let f1 = self.eval(1.0);
        if f1.abs() > 4.0 * f64::EPSILON * scale {
            return Err(Error::VelocityLaw(format!("F(1) = {f1}, the equilibrium needs F(1) = 0")));
        }
        let (lo, hi, n) = VALIDATION_GRID;
        for i in 0..=n {
            let s = lo + (hi - lo) * i as f64 / n as f64;
            let d = self.derivative(s);
            if !(d > 0.0) {
                return Err(Error::VelocityLaw(format!("F'({s}) = {d} is not positive")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for VelocityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocityLaw::Quadratic => f.write_str("quadratic"),
            VelocityLaw::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly({})", parts.join(","))
            }
        }
    }
}

impl FromStr for VelocityLaw {
    type Err = Error;

    /// `quadratic` or `poly(c0,c1,...)`; the result is validated.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "quadratic" {
            return Ok(VelocityLaw::Quadratic);
        }
        let inner = s
            .strip_prefix("poly(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::VelocityLaw(format!("'{s}' is neither 'quadratic' nor 'poly(c0,c1,...)'")))?;
        let coeffs = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::VelocityLaw(format!("bad coefficient '{}'", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        VelocityLaw::polynomial(coeffs)
    }
}

impl Serialize for VelocityLaw {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `J = λ Vol + |Ω|`.
    pub energy: f64,
    pub lambda: f64,
    pub deficit: f64,
    /// NaN when not tracked.
    pub asymmetry: f64,
    pub asymmetry_center: [f64; 2],
    pub max_vn: f64,
    /// `∮ (1 - |Du|²) F(|Du|) dσ`, the exact rate of change of `J`.
    pub dissipation: f64,
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub domain: StarDomain,
    pub solution: TorsionSolution,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub filter_strength: f64,
    pub filter_order: i32,
    pub track_asymmetry: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            filter_strength: 36.0,
            filter_order: 36,
            track_asymmetry: true,
        }
    }
}

fn normal_velocity(s: &TorsionSolution, law: &VelocityLaw) -> Vec<f64> {
    s.boundary_grad.values.iter().map(|&g| law.eval(g)).collect()
}

impl FlowState {
    pub fn new(t: f64, domain: StarDomain, vol: f64, law: &VelocityLaw, opts: &StepOptions) -> Result<Self> {
        let solution = solve_torsion(&domain, vol)?;
        Self::from_solution(t, solution, law, opts, None)
    }

    fn from_solution(
        t: f64,
        solution: TorsionSolution,
        law: &VelocityLaw,
        opts: &StepOptions,
        asym_start: Option<Vec2>,
    ) -> Result<Self> {
        let domain = solution.domain.clone();
        let moments = area_and_moments(&domain);
        let v = normal_velocity(&solution, law);
        let g = &solution.boundary_grad.values;
        let dissipation = solution.geometry.integrate(|j| (1.0 - g[j] * g[j]) * v[j]);
        let (asymmetry, center) = if opts.track_asymmetry {
            let r_star = ball_closed_forms(2, solution.vol)?.r_star;
            let (start, step) = match asym_start {
                Some(c) => (c, 1e-3),
                None => (moments.barycenter, 0.05),
            };
            let fit = asymmetry_to_ball_from(
                &domain,
                r_star,
                start,
                AsymmetryOptions {
                    initial_step: step,
                    ..Default::default()
                },
            )?;
            (fit.value, fit.center)
        } else {
            (f64::NAN, moments.barycenter)
        };
        let diagnostics = Diagnostics {
            energy: solution.lambda * solution.vol + moments.area,
            lambda: solution.lambda,
            deficit: serrin_deficit(&solution),
            asymmetry,
            asymmetry_center: [center.x, center.y],
            max_vn: v.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
            dissipation,
            area: moments.area,
        };
        Ok(Self {
            t,
            domain,
            solution,
            diagnostics,
        })
    }

    pub fn vol(&self) -> f64 {
        self.solution.vol
    }

    /// Smallest arc length between neighbouring nodes.
    pub fn min_spacing(&self) -> f64 {
        self.solution.geometry.weights.min()
    }

    /// Largest step allowed by `dt ≤ cfl h_min / max(max|V_n|, F'(1))`.
    ///
    /// `F'(1)` is the linearized signal speed, so the bound stays finite at equilibrium.
    pub fn cfl_step(&self, law: &VelocityLaw, cfl: f64) -> f64 {
        cfl * self.min_spacing() / self.diagnostics.max_vn.max(law.derivative(1.0))
    }
}

fn radius_rate(s: &TorsionSolution, law: &VelocityLaw) -> Vec<f64> {
    let r = s.domain.radii();
    let speed = &s.geometry.speed;
    s.boundary_grad
        .values
        .iter()
        .enumerate()
        .map(|(j, &g)| law.eval(g) * speed[j] / r[j])
        .collect()
}

fn stage(base: &StarDomain, rates: &[f64], h: f64, t: f64, vol: f64) -> Result<TorsionSolution> {
    let radii: Vec<f64> = base.radii().iter().zip(rates).map(|(r, k)| r + h * k).collect();
    solve_torsion(&domain_with(base, radii, t)?, vol)
}

fn domain_with(base: &StarDomain, radii: Vec<f64>, t: f64) -> Result<StarDomain> {
    if let Some(node) = radii.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::LostStarShape { node, t });
    }
    base.with_radii(radii)
}

/// One RK4 step with default filtering.
pub fn advance_step(state: &FlowState, dt: f64, law: &VelocityLaw) -> Result<FlowState> {
    advance_step_with(state, dt, law, &StepOptions::default())
}

pub fn advance_step_with(state: &FlowState, dt: f64, law: &VelocityLaw, opts: &StepOptions) -> Result<FlowState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let vol = state.vol();
    let d = &state.domain;
    let t = state.t;
    let k1 = radius_rate(&state.solution, law);
    let k2 = radius_rate(&stage(d, &k1, 0.5 * dt, t, vol)?, law);
    let k3 = radius_rate(&stage(d, &k2, 0.5 * dt, t, vol)?, law);
    let k4 = radius_rate(&stage(d, &k3, dt, t, vol)?, law);
    let radii: Vec<f64> = d
        .radii()
        .iter()
        .enumerate()
        .map(|(j, r)| r + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let radii = exponential_filter(&radii, opts.filter_strength, opts.filter_order);
    let mut next = domain_with(d, radii, t + dt)?;

    let moments = area_and_moments(&next);
    if (moments.barycenter - next.center()).norm() > 0.1 * moments.in_radius {
        next = next.resampled_about(moments.barycenter, next.len())?;
    }
    let solution = solve_torsion(&next, vol)?;
    let start = Vec2::new(state.diagnostics.asymmetry_center[0], state.diagnostics.asymmetry_center[1]);
    FlowState::from_solution(t + dt, solution, law, opts, Some(start))
}

/// One row of the dense diagnostic series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    pub lambda: f64,
    pub deficit: f64,
    pub asymmetry: f64,
    pub max_vn: f64,
    /// Step that produced this state; zero for the initial state.
    pub dt: f64,
    pub dissipation: f64,
}

impl Sample {
    fn of(s: &FlowState, dt: f64) -> Self {
        let d = &s.diagnostics;
        Self {
            t: s.t,
            energy: d.energy,
            lambda: d.lambda,
            deficit: d.deficit,
            asymmetry: d.asymmetry,
            max_vn: d.max_vn,
            dt,
            dissipation: d.dissipation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halt {
    pub t: f64,
    pub reason: String,
    #[serde(skip)]
    pub error: Error,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub law: VelocityLaw,
    pub vol: f64,
    /// Every accepted step, starting with the initial state.
    pub samples: Vec<Sample>,
    /// `(step index, state)` every `snapshot_stride` steps, plus the final state.
    pub snapshots: Vec<(usize, FlowState)>,
    pub final_state: FlowState,
    pub stationary: bool,
    pub halt: Option<Halt>,
    pub rejected_steps: usize,
}

pub const CSV_HEADER: &str = "t,J,lambda,deficit,asymmetry,max_Vn,dt";

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn asymmetries(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.asymmetry).collect()
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let row = [s.t, s.energy, s.lambda, s.deficit, s.asymmetry, s.max_vn, s.dt].map(fmt17);
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Runs the flow described by `cfg`.
///
/// Errors only if the initial state cannot be built; later failures end the
/// run and are recorded in [`Trajectory::halt`].
pub fn run_flow(cfg: &ScenarioConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let opts = StepOptions {
        filter_strength: cfg.filter_strength,
        filter_order: cfg.filter_order,
        track_asymmetry: cfg.track_asymmetry,
    };
    let law = &cfg.law;
    let mut state = FlowState::new(0.0, cfg.initial_domain()?, cfg.vol, law, &opts)?;
    let mut samples = vec![Sample::of(&state, 0.0)];
    let mut snapshots = vec![(0, state.clone())];
    let mut halt = None;
    let mut rejected = 0;
    let mut clean = 0;
    let mut dt = cfg.dt0;
    let stationary = |s: &FlowState| cfg.tol_stationary > 0.0 && s.diagnostics.max_vn < cfg.tol_stationary;
    let t_eps = 1e-12 * cfg.t_end.max(1.0);

    'outer: while !stationary(&state) && state.t < cfg.t_end - t_eps {
        loop {
            let remaining = cfg.t_end - state.t;
            let mut h = dt.min(remaining);
            if cfg.adaptive {
                h = h.min(state.cfl_step(law, cfg.cfl));
            }
            if cfg.adaptive && h < cfg.dt_min && h < remaining {
                halt = Some(Halt {
                    t: state.t,
                    reason: Error::StepUnderflow { dt: h, dt_min: cfg.dt_min, t: state.t }.to_string(),
                    error: Error::StepUnderflow { dt: h, dt_min: cfg.dt_min, t: state.t },
                });
                break 'outer;
            }
            let next = match advance_step_with(&state, h, law, &opts) {
                Ok(n) => n,
                Err(e) => {
                    halt = Some(Halt {
                        t: state.t,
                        reason: e.to_string(),
                        error: e,
                    });
                    break 'outer;
                }
            };
            if cfg.adaptive {
                // the speed may jump within a step; accept a modest overshoot of the bound
                let cfl_breach = h > 1.5 * next.cfl_step(law, cfg.cfl);
                let energy_rise = next.diagnostics.energy > state.diagnostics.energy + cfg.j_slack;
                if cfl_breach || energy_rise {
                    rejected += 1;
                    clean = 0;
                    dt = 0.5 * h;
                    continue;
                }
                clean += 1;
                if clean >= 10 {
                    dt = (2.0 * dt).min(cfg.dt_max);
                    clean = 0;
                }
            }
            samples.push(Sample::of(&next, h));
            state = next;
            if (samples.len() - 1) % cfg.snapshot_stride == 0 {
                snapshots.push((samples.len() - 1, state.clone()));
            }
            break;
        }
    }
    let last = samples.len() - 1;
    if snapshots.last().map(|(i, _)| *i) != Some(last) {
        snapshots.push((last, state.clone()));
    }
    Ok(Trajectory {
        law: law.clone(),
        vol: cfg.vol,
        samples,
        snapshots,
        stationary: stationary(&state),
        final_state: state,
        halt,
        rejected_steps: rejected,
    })
}

/// Relative floor on `J` differences, below which they are round-off.
pub const ENERGY_RESOLUTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalResidual {
    pub t0: f64,
    pub t1: f64,
    /// `(J₁ - J₀) / Δt`.
    pub difference_quotient: f64,
    /// Trapezoid average of the boundary dissipation.
    pub dissipation: f64,
    /// `|difference - dissipation| / max(|dissipation|, floor)`.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissipationCheck {
    pub intervals: Vec<IntervalResidual>,
    /// `J(t_i) - J(0)`.
    pub energy_change: Vec<f64>,
    /// Trapezoid integral of the dissipation from 0 to `t_i`.
    pub integrated_dissipation: Vec<f64>,
    /// Largest `|ΔJ - ∫ dissipation|` relative to `max(|ΔJ_final|, floor)`.
    pub cumulative_relative: f64,
}

impl DissipationCheck {
    pub fn fraction_below(&self, tol: f64) -> f64 {
        if self.intervals.is_empty() {
            return 1.0;
        }
        let n = self.intervals.iter().filter(|r| r.relative < tol).count();
        n as f64 / self.intervals.len() as f64
    }

    pub fn median_relative(&self) -> f64 {
        let mut v: Vec<f64> = self.intervals.iter().map(|r| r.relative).collect();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v[v.len() / 2]
    }
}

/// Compares the discrete energy decrease with the boundary dissipation, per
/// interval and in integrated form.
pub fn dissipation_residuals(traj: &Trajectory) -> DissipationCheck {
    let s = &traj.samples;
    let mut intervals = Vec::with_capacity(s.len().saturating_sub(1));
    let mut energy_change = vec![0.0];
    let mut integrated = vec![0.0];
    let mut acc = 0.0;
    for w in s.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        let dq = (b.energy - a.energy) / dt;
        let rate = 0.5 * (a.dissipation + b.dissipation);
        let floor = ENERGY_RESOLUTION * a.energy.abs() / dt;
        intervals.push(IntervalResidual {
            t0: a.t,
            t1: b.t,
            difference_quotient: dq,
            dissipation: rate,
            relative: (dq - rate).abs() / rate.abs().max(floor),
        });
        acc += rate * dt;
        energy_change.push(b.energy - s[0].energy);
        integrated.push(acc);
    }
    let total = energy_change.last().copied().unwrap_or(0.0).abs();
    let floor = ENERGY_RESOLUTION * s[0].energy.abs();
    let cumulative_relative = energy_change
        .iter()
        .zip(&integrated)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / total.max(floor);
    DissipationCheck {
        intervals,
        energy_change,
        integrated_dissipation: integrated,
        cumulative_relative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// `-slope` of `log a` against `t`.
    pub rate: f64,
    pub slope: f64,
    /// `exp(intercept)`.
    pub amplitude: f64,
    pub r2: f64,
    pub points: usize,
}

pub const DEFAULT_DECAY_WINDOW: (f64, f64) = (1e-4, 1e-1);
pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares line through `(t, log a)` over the samples with `a` in `window`.
///
/// `Ok(None)` means the series never entered the window.
pub fn fit_decay_rate(t: &[f64], a: &[f64], window: (f64, f64)) -> Result<Option<DecayFit>> {
    if t.len() != a.len() {
        return Err(Error::InvalidArgument(format!("{} times for {} values", t.len(), a.len())));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("window [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(a)
        .filter(|(_, &v)| v >= lo && v <= hi)
        .map(|(&x, &v)| (x, v.ln()))
        .collect();
    if pts.is_empty() {
        return Ok(None);
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            found: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all fitting points share one time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(Some(DecayFit {
        rate: -slope,
        slope,
        amplitude: intercept.exp(),
        r2,
        points: pts.len(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_parsing_and_validation() {
        let q: VelocityLaw = "quadratic".parse().unwrap();
        assert!(q.is_quadratic());
        assert_eq!(q.eval(3.0), 8.0);
        let p: VelocityLaw = "poly(-2,1,1)".parse().unwrap();
        assert_eq!(p.eval(2.0), 4.0);
        assert_eq!(p.derivative(2.0), 5.0);
        assert_eq!(p.to_string(), "poly(-2,1,1)");
        assert!("poly(-1,0,1)".parse::<VelocityLaw>().unwrap().is_quadratic());
        for bad in ["poly(1,1)", "poly(1,-1)", "poly(0)", "cubic", "poly(a)", "poly(-1,3,-1)"] {
            assert!(
                matches!(bad.parse::<VelocityLaw>(), Err(Error::VelocityLaw(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn decay_fit_rejects_sparse_windows() {
        let t: Vec<f64> = (0..3).map(|i| i as f64).collect();
        let a = vec![0.05, 0.04, 0.03];
        assert_eq!(
            fit_decay_rate(&t, &a, DEFAULT_DECAY_WINDOW),
            Err(Error::TooFewPoints { found: 3, required: 5 })
        );
        assert_eq!(fit_decay_rate(&t, &[1.0; 3], DEFAULT_DECAY_WINDOW), Ok(None));
    }
}
