use std::f64::consts::PI;

use super::{boundary_geometry, interior_quadrature, StarDomain, Vec2};
use crate::error::{Error, Result};
use crate::optimize::{compass_search, CompassOptions};
use crate::quadrature::gauss_legendre;

#[inline]
fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Inverts the polar angle about `origin` along a boundary that is star-shaped about it.
pub(crate) struct RayCaster<'a> {
    domain: &'a StarDomain,
    origin: Vec2,
    thetas: Vec<f64>,
    /// Unwrapped polar angle about `origin` at each table `θ`, increasing by 2π over the table.
    psis: Vec<f64>,
}

impl<'a> RayCaster<'a> {
    pub(crate) fn new(domain: &'a StarDomain, origin: Vec2) -> Self {
        let n = 4 * domain.len();
        let mut thetas = Vec::with_capacity(n + 1);
        let mut psis = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        for j in 0..=n {
            let t = 2.0 * PI * j as f64 / n as f64;
            let (p, _) = domain.boundary_point(t);
            let d = p - origin;
            let raw = d.y.atan2(d.x);
            let psi = if j == 0 {
                raw
            } else {
                let mut v = raw;
                while v - prev > PI {
                    v -= 2.0 * PI;
                }
                while v - prev < -PI {
                    v += 2.0 * PI;
                }
                v
            };
            prev = psi;
            thetas.push(t);
            psis.push(psi);
        }
        Self {
            domain,
            origin,
            thetas,
            psis,
        }
    }

    /// Distance from the origin to the boundary along direction `psi`.
    pub(crate) fn distance(&self, psi: f64) -> f64 {
        let base = self.psis[0];
        let mut target = psi;
        while target < base {
            target += 2.0 * PI;
        }
        while target >= base + 2.0 * PI {
            target -= 2.0 * PI;
        }
        let idx = match self
            .psis
            .binary_search_by(|v| v.partial_cmp(&target).expect("finite angles"))
        {
            Ok(i) => return (self.domain.boundary_point(self.thetas[i]).0 - self.origin).norm(),
            Err(i) => i.clamp(1, self.psis.len() - 1),
        };
        let (mut lo, mut hi) = (self.thetas[idx - 1], self.thetas[idx]);
        let e = Vec2::new(target.cos(), target.sin());
        // signed angle of (p(θ) - origin) relative to e, increasing in θ
        let g = |t: f64| {
            let (p, dp) = self.domain.boundary_point(t);
            let d = p - self.origin;
            let val = cross(e, d).atan2(e.dot(&d));
            (val, cross(d, dp) / d.norm_squared(), d.norm())
        };
        let mut t = lo + (hi - lo) * (target - self.psis[idx - 1])
            / (self.psis[idx] - self.psis[idx - 1]);
        let mut rho = 0.0;
        for _ in 0..60 {
            let (val, slope, r) = g(t);
            rho = r;
            if val.abs() < 1e-15 {
                break;
            }
            if val > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - val / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() < 1e-16 {
                t = next;
                rho = g(t).2;
                break;
            }
            t = next;
        }
        rho
    }
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Composite 16-point Gauss–Legendre on `[a, b]` with panels no wider than `width`.
fn composite(a: f64, b: f64, width: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gl16();
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (t, wt) in x.iter().zip(w) {
            total += 0.5 * h * wt * f(mid + 0.5 * h * t);
        }
    }
    total
}

/// Bisection/Newton root of `f` on a bracketing interval.
fn refine_root(f: &impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo).0;
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (v, dv) = f(t);
        if v == 0.0 {
            return t;
        }
        if (v < 0.0) == (flo < 0.0) {
            lo = t;
            flo = v;
        } else {
            hi = t;
        }
        let mut next = t - v / dv;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo).abs() < 1e-15 || (next - t).abs() < 1e-16 {
            return next;
        }
        t = next;
    }
    t
}

/// `|Ω Δ B_r(x)|`.
///
/// When Ω is star-shaped about `x` this is `½∮ |ρ(ψ)² - r²| dψ` with `ρ` the
/// ray-cast boundary distance from `x`; the integral is taken in the domain's
/// own angle θ via `dψ = ψ'(θ) dθ`, split at the crossings `ρ = r`. Otherwise
/// falls back to indicator quadrature on an interior rule.
pub fn symmetric_difference_area(d: &StarDomain, x: Vec2, r: f64) -> f64 {
    if !d.is_star_shaped_about(x) {
        return indicator_symmetric_difference(d, x, r);
    }
    let f = |t: f64| {
        let (p, dp) = d.boundary_point(t);
        let q = p - x;
        (q.norm_squared() - r * r, 2.0 * q.dot(&dp))
    };
    let integrand = |t: f64| {
        let (p, dp) = d.boundary_point(t);
        let q = p - x;
        let rho2 = q.norm_squared();
        0.5 * (rho2 - r * r).abs() * cross(q, dp) / rho2
    };
    let n = 4 * d.len();
    let width = 2.0 * PI / (d.len() / 2).max(8) as f64;
    let mut roots = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_v = f(0.0).0;
    for j in 1..=n {
        let t = 2.0 * PI * j as f64 / n as f64;
        let v = f(t).0;
        if v == 0.0 && j < n {
            roots.push(t);
        } else if (v < 0.0) != (prev_v < 0.0) && prev_v != 0.0 {
            roots.push(refine_root(&f, prev_t, t));
        }
        prev_t = t;
        prev_v = v;
    }
    if roots.is_empty() {
        return composite(0.0, 2.0 * PI, width, &integrand);
    }
    let mut total = 0.0;
    for i in 0..roots.len() {
        let a = roots[i];
        let b = if i + 1 < roots.len() {
            roots[i + 1]
        } else {
            roots[0] + 2.0 * PI
        };
        total += composite(a, b, width, &integrand);
    }
    total
}

fn indicator_symmetric_difference(d: &StarDomain, x: Vec2, r: f64) -> f64 {
    let q = interior_quadrature(d, 64).expect("n_radial above minimum");
    let area = q.total_weight();
    let inside: f64 = q
        .nodes
        .iter()
        .zip(&q.weights)
        .filter(|(p, _)| (*p - x).norm() < r)
        .map(|(_, w)| w)
        .sum();
    area + PI * r * r - 2.0 * inside
}

#[derive(Debug, Clone, Copy)]
pub struct AsymmetryOptions {
    /// Initial pattern step relative to the ball radius.
    pub initial_step: f64,
    /// Convergence when the step falls below this multiple of the radius.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            tolerance: 1e-10,
            max_evaluations: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallFit {
    /// `min_x |Ω Δ B_r(x)| / |B_r|`.
    pub value: f64,
    pub center: Vec2,
    pub evaluations: usize,
}

/// Asymmetry relative to balls of radius `radius`, searched from the barycenter.
pub fn asymmetry_to_ball(d: &StarDomain, radius: f64, opts: AsymmetryOptions) -> Result<BallFit> {
    let start = super::area_and_moments(d).barycenter;
    asymmetry_to_ball_from(d, radius, start, opts)
}

pub fn asymmetry_to_ball_from(
    d: &StarDomain,
    radius: f64,
    start: Vec2,
    opts: AsymmetryOptions,
) -> Result<BallFit> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius {radius} must be positive")));
    }
    let ball = PI * radius * radius;
    let m = compass_search(
        |x| symmetric_difference_area(d, x, radius) / ball,
        start,
        CompassOptions {
            initial_step: opts.initial_step * radius,
            min_step: opts.tolerance * radius,
            max_evaluations: opts.max_evaluations,
        },
    )?;
    Ok(BallFit {
        value: m.value.max(0.0),
        center: m.point,
        evaluations: m.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCheck {
    /// `|E Δ B_r(0)| / |B_r|`.
    pub lhs: f64,
    /// `( r^{-1} ∮ (|x|/r - 1)² dσ )^{1/2}`.
    pub rhs: f64,
}

impl DistanceCheck {
    pub fn constant(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Both sides of the measure-vs-boundary-distance estimate for the origin-centered ball `B_r`.
pub fn lemma_distance_check(d: &StarDomain, r: f64) -> Result<DistanceCheck> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    if d.relative_radius(Vec2::zeros()) >= 1.0 {
        return Err(Error::OriginOutside);
    }
    let lhs = symmetric_difference_area(d, Vec2::zeros(), r) / (PI * r * r);
    let g = boundary_geometry(d);
    let integral = g.integrate(|j| (g.points[j].norm() / r - 1.0).powi(2));
    Ok(DistanceCheck {
        lhs,
        rhs: (integral / r).sqrt(),
    })
}
