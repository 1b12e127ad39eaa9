//! Energy, Serrin deficit, ball closed forms and stability ratios (planar case).

use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    area_and_moments, asymmetry_to_ball, interior_ball_radius, AsymmetryOptions, ShapeSpec,
    StarDomain, Vec2,
};
use crate::optimize::{compass_search, CompassOptions};
use crate::torsion::{solve_torsion, TorsionSolution};

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Closed forms for the family of balls `B_r` carrying volume `vol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallQuantities {
    pub n: usize,
    pub vol: f64,
    pub omega: f64,
    pub r_star: f64,
    pub lambda_star: f64,
    /// `λ* vol + ω r*^n`.
    pub j_star: f64,
    /// The combined-coefficient form `ω^{1/(n+1)} (n+2)^{-1/(n+1)} (2n+1) vol^{n/(n+1)}`,
    /// kept only to document that it disagrees with `j_star`.
    pub j_star_printed: f64,
}

impl BallQuantities {
    /// `λ(B_r) = n(n+2) vol / (ω r^{n+2})`.
    pub fn lambda_of_r(&self, r: f64) -> f64 {
        let n = self.n as f64;
        n * (n + 2.0) * self.vol / (self.omega * r.powf(n + 2.0))
    }

    /// `J(B_r) = λ(B_r) vol + ω r^n`.
    pub fn energy_of_r(&self, r: f64) -> f64 {
        self.lambda_of_r(r) * self.vol + self.omega * r.powi(self.n as i32)
    }

    /// `J''(r) = n(n+2)²(n+3) vol² / (ω r^{n+4}) + n(n-1) ω r^{n-2}`.
    pub fn j_second_derivative(&self, r: f64) -> f64 {
        let n = self.n as f64;
        n * (n + 2.0).powi(2) * (n + 3.0) * self.vol * self.vol / (self.omega * r.powf(n + 4.0))
            + n * (n - 1.0) * self.omega * r.powf(n - 2.0)
    }

    /// Same expression with `vol` in place of `vol²`.
    pub fn j_second_derivative_printed(&self, r: f64) -> f64 {
        let n = self.n as f64;
        n * (n + 2.0).powi(2) * (n + 3.0) * self.vol / (self.omega * r.powf(n + 4.0))
            + n * (n - 1.0) * self.omega * r.powf(n - 2.0)
    }

    /// Golden-section minimization of `J(B_r)` on `[lo, hi]`.
    pub fn minimize_energy(&self, lo: f64, hi: f64, tol: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.energy_of_r(c), self.energy_of_r(d));
        while b - a > tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.energy_of_r(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.energy_of_r(d);
            }
        }
        0.5 * (a + b)
    }
}

pub fn ball_closed_forms(n: usize, vol: f64) -> Result<BallQuantities> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension {n} must be at least 2")));
    }
    if !(vol > 0.0) || !vol.is_finite() {
        return Err(Error::InvalidArgument(format!("volume {vol} must be positive")));
    }
    let nf = n as f64;
    let omega = unit_ball_volume(n);
    let r_star = ((nf + 2.0) * vol / omega).powf(1.0 / (nf + 1.0));
    let lambda_star = nf / r_star;
    let j_star = lambda_star * vol + omega * r_star.powi(n as i32);
    let j_star_printed = omega.powf(1.0 / (nf + 1.0))
        * (nf + 2.0).powf(-1.0 / (nf + 1.0))
        * (2.0 * nf + 1.0)
        * vol.powf(nf / (nf + 1.0));
    Ok(BallQuantities {
        n,
        vol,
        omega,
        r_star,
        lambda_star,
        j_star,
        j_star_printed,
    })
}

/// `J = λ vol + |Ω|` from a solution.
pub fn energy_of(s: &TorsionSolution) -> f64 {
    s.lambda * s.vol + area_and_moments(&s.domain).area
}

pub fn capillary_energy(d: &StarDomain, vol: f64) -> Result<f64> {
    Ok(energy_of(&solve_torsion(d, vol)?))
}

/// `∮(|Du|² - 1)² dσ`.
pub fn serrin_deficit(s: &TorsionSolution) -> f64 {
    let g = &s.boundary_grad.values;
    s.geometry.integrate(|j| (g[j] * g[j] - 1.0).powi(2))
}

/// Uniform rescaling about the domain center to the requested area.
pub fn scaled_to_area(d: &StarDomain, area: f64) -> Result<StarDomain> {
    let t = (area / area_and_moments(d).area).sqrt();
    d.with_radii(d.radii().iter().map(|r| r * t).collect())
}

/// A ratio whose numerator and denominator may both vanish at equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Value(f64),
    DegenerateEqual,
}

/// Numerators and denominators below this count as zero.
pub const DEGENERATE_THRESHOLD: f64 = 1e-9;

impl Ratio {
    pub fn of(num: f64, den: f64) -> Ratio {
        if num.abs() <= DEGENERATE_THRESHOLD && den.abs() <= DEGENERATE_THRESHOLD {
            Ratio::DegenerateEqual
        } else {
            Ratio::Value(num / den)
        }
    }

    /// `num / den` unless the caller has established that both sides vanish.
    pub fn of_unless(num: f64, den: f64, degenerate: bool) -> Ratio {
        if degenerate {
            Ratio::DegenerateEqual
        } else {
            Ratio::Value(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::DegenerateEqual => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value(v) => write!(f, "{v:.16e}"),
            Ratio::DegenerateEqual => f.write_str("degenerate-equal"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Value(v) => s.serialize_f64(*v),
            Ratio::DegenerateEqual => s.serialize_str("degenerate-equal"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub vol: f64,
    pub lambda: f64,
    pub area: f64,
    pub energy: f64,
    pub j_star: f64,
    pub r_star: f64,
    /// `min_x |Ω Δ B_{r*}(x)| / |B_{r*}|`.
    pub asymmetry: f64,
    pub asymmetry_center: [f64; 2],
    pub deficit: f64,
    /// `A / (deficit / r*)^{1/2}`.
    pub ratio_thm1: Ratio,
    /// `min_{x0} ∮((λ/2)|x - x0| - 1)² dσ`.
    pub l2_lhs: f64,
    pub l2_center: [f64; 2],
    /// Equal to the deficit.
    pub l2_rhs: f64,
    pub l2_ratio: Ratio,
    /// `|Ω|²λ(Ω) - |B|²λ(B)`; the ball term is `8π vol` for every radius.
    pub fk_gap: f64,
    pub fk_holds: bool,
    /// `(J - J*)^{1/2} / (J*^{1/2} A)`.
    pub fk_cor_ratio: Ratio,
    pub rho0: f64,
    pub diameter: f64,
    pub diam_over_rho0: f64,
    pub diam_over_rstar: f64,
}

/// `min_{x0} ∮((λ/2)|x - x0| - 1)² dσ` by compass search from the barycenter.
pub fn l2_boundary_distance(s: &TorsionSolution) -> Result<(f64, Vec2)> {
    let g = &s.geometry;
    let start = area_and_moments(&s.domain).barycenter;
    let scale = 1.0 / s.lambda;
    let m = compass_search(
        |x0| g.integrate(|j| (0.5 * s.lambda * (g.points[j] - x0).norm() - 1.0).powi(2)),
        start,
        CompassOptions {
            initial_step: 0.05 * scale,
            min_step: 1e-10 * scale,
            max_evaluations: 20_000,
        },
    )?;
    Ok((m.value, m.point))
}

pub fn stability_report_for(s: &TorsionSolution) -> Result<StabilityReport> {
    let ball = ball_closed_forms(2, s.vol)?;
    let moments = area_and_moments(&s.domain);
    let fit = asymmetry_to_ball(&s.domain, ball.r_star, AsymmetryOptions::default())?;
    let deficit = serrin_deficit(s);
    let (l2_lhs, l2_center) = l2_boundary_distance(s)?;
    let energy = s.lambda * s.vol + moments.area;
    let fk_gap = moments.area * moments.area * s.lambda - 8.0 * PI * s.vol;
    let rho0 = interior_ball_radius(&s.domain);
    // squared quantities vanish at round-off level, their roots only at its square root
    let at_equilibrium = fit.value <= DEGENERATE_THRESHOLD
        && deficit <= DEGENERATE_THRESHOLD * DEGENERATE_THRESHOLD
        && (energy - ball.j_star).abs() <= DEGENERATE_THRESHOLD * ball.j_star;
    Ok(StabilityReport {
        vol: s.vol,
        lambda: s.lambda,
        area: moments.area,
        energy,
        j_star: ball.j_star,
        r_star: ball.r_star,
        asymmetry: fit.value,
        asymmetry_center: [fit.center.x, fit.center.y],
        deficit,
        ratio_thm1: Ratio::of_unless(
            fit.value,
            (deficit / ball.r_star).sqrt(),
            at_equilibrium,
        ),
        l2_lhs,
        l2_center: [l2_center.x, l2_center.y],
        l2_rhs: deficit,
        l2_ratio: Ratio::of(l2_lhs, deficit),
        fk_gap,
        fk_holds: fk_gap >= -1e-9,
        fk_cor_ratio: Ratio::of_unless(
            (energy - ball.j_star).max(0.0).sqrt(),
            ball.j_star.sqrt() * fit.value,
            at_equilibrium,
        ),
        rho0,
        diameter: moments.diameter,
        diam_over_rho0: moments.diameter / rho0,
        diam_over_rstar: moments.diameter / ball.r_star,
    })
}

pub fn stability_report(d: &StarDomain, vol: f64) -> Result<StabilityReport> {
    stability_report_for(&solve_torsion(d, vol)?)
}

pub const SWEEP_HEADER: &str = "shape,k,eps,asymmetry,deficit,ratio_thm1,fk_gap,fk_cor_ratio,lhs_l2dist";

/// One row of a single-mode stability sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub shape: String,
    pub k: u32,
    pub eps: f64,
    pub report: StabilityReport,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        let r = &self.report;
        let shape = if self.shape.contains(',') {
            format!("\"{}\"", self.shape)
        } else {
            self.shape.clone()
        };
        format!(
            "{shape},{},{:.16e},{:.16e},{:.16e},{},{:.16e},{},{:.16e}",
            self.k, self.eps, r.asymmetry, r.deficit, r.ratio_thm1, r.fk_gap, r.fk_cor_ratio, r.l2_lhs
        )
    }
}

/// `fourier(1,[(k,eps)])` rescaled to `|Ω| = |B_{r*}|`.
pub fn normalized_mode_domain(k: u32, eps: f64, vol: f64, m: usize) -> Result<StarDomain> {
    let spec = ShapeSpec::Fourier {
        base: 1.0,
        modes: vec![(k, eps)],
    };
    let r_star = ball_closed_forms(2, vol)?.r_star;
    scaled_to_area(&StarDomain::build(&spec, m)?, PI * r_star * r_star)
}

pub fn sweep_row(k: u32, eps: f64, vol: f64, m: usize) -> Result<SweepRow> {
    let d = normalized_mode_domain(k, eps, vol, m)?;
    Ok(SweepRow {
        shape: format!("fourier(1,[({k},{eps})])"),
        k,
        eps,
        report: stability_report(&d, vol)?,
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}
