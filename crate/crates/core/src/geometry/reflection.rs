use std::f64::consts::PI;

use super::{StarDomain, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ReflectionOptions {
    /// Number of offset grid points scanned per direction before bisection.
    pub offsets: usize,
    /// Absolute bisection tolerance on the critical offset.
    pub tolerance: f64,
    /// Point-in-star tolerance for reflected samples.
    pub inclusion_tolerance: f64,
    /// Boundary refinement factor for the tested samples.
    pub upsample: usize,
}

impl Default for ReflectionOptions {
    fn default() -> Self {
        Self {
            offsets: 128,
            tolerance: 1e-4,
            inclusion_tolerance: 1e-10,
            upsample: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionReport {
    /// Smallest ρ with the ρ-reflection property; `None` when even the critical
    /// offset leaves `B_ρ(0)` outside the domain.
    pub rho_min: Option<f64>,
    /// Critical offset before the `B_ρ(0) ⊂ Ω` requirement is applied.
    pub critical_offset: f64,
    /// `sup_{∂Ω} |x| - inf_{∂Ω} |x|`.
    pub oscillation: f64,
    pub inf_radius: f64,
    pub sup_radius: f64,
    /// `(inf |x|² - ρ²)^{1/2}`, the radius of the ball the domain is star-shaped about.
    pub star_radius: Option<f64>,
}

impl ReflectionReport {
    /// Whether `sup|x| - inf|x| ≤ 4ρ` holds for the computed ρ.
    pub fn oscillation_bound_holds(&self) -> bool {
        match self.rho_min {
            Some(rho) => self.oscillation <= 4.0 * rho + 1e-12,
            None => false,
        }
    }
}

/// Sampled ρ-reflection test about the coordinate origin.
///
/// For each of `M` directions `e` the half-planes `{x·e > s}` are scanned from
/// the farthest boundary projection downward; the largest offset at which some
/// boundary sample reflects outside the domain is refined by bisection.
pub fn rho_reflection_min(d: &StarDomain, opts: ReflectionOptions) -> Result<ReflectionReport> {
    if d.relative_radius(Vec2::zeros()) >= 1.0 {
        return Err(Error::OriginOutside);
    }
    let samples = d.upsampled(opts.upsample.max(1)).nodes();
    let norms: Vec<f64> = samples.iter().map(|p| p.norm()).collect();
    let inf_radius = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let sup_radius = norms.iter().cloned().fold(0.0, f64::max);

    let violates = |e: Vec2, s: f64| {
        samples.iter().any(|p| {
            let a = p.dot(&e);
            a > s && !d.contains(p - e * (2.0 * (a - s)), opts.inclusion_tolerance)
        })
    };

    let m = d.len();
    let mut critical: f64 = 0.0;
    for j in 0..m {
        let phi = 2.0 * PI * j as f64 / m as f64;
        let e = Vec2::new(phi.cos(), phi.sin());
        let top = samples.iter().map(|p| p.dot(&e)).fold(f64::NEG_INFINITY, f64::max);
        if top <= critical {
            continue;
        }
        let step = (top - critical) / opts.offsets as f64;
        // scan downward to the first violating offset above the current critical value
        let mut hi = top;
        let mut found = None;
        for i in 1..=opts.offsets {
            let s = top - step * i as f64;
            if violates(e, s) {
                found = Some(s);
                break;
            }
            hi = s;
        }
        if let Some(mut lo) = found {
            while hi - lo > opts.tolerance {
                let mid = 0.5 * (lo + hi);
                if violates(e, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            critical = critical.max(0.5 * (lo + hi));
        }
    }

    let rho_min = if critical < inf_radius {
        Some(critical)
    } else {
        None
    };
    Ok(ReflectionReport {
        rho_min,
        critical_offset: critical,
        oscillation: sup_radius - inf_radius,
        inf_radius,
        sup_radius,
        star_radius: rho_min.map(|r| (inf_radius * inf_radius - r * r).max(0.0).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;

    #[test]
    fn centered_disk_has_zero_rho() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.3 }, 64).unwrap();
        let r = rho_reflection_min(&d, ReflectionOptions::default()).unwrap();
        assert_eq!(r.rho_min, Some(0.0));
        assert!(r.oscillation < 1e-12);
    }

    #[test]
    fn off_center_disk_rho_equals_offset() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 64)
            .unwrap()
            .translated(Vec2::new(0.2, 0.0));
        let r = rho_reflection_min(&d, ReflectionOptions::default()).unwrap();
        let rho = r.rho_min.unwrap();
        assert!((rho - 0.2).abs() < 0.01, "{rho}");
        assert!(r.oscillation_bound_holds());
        assert!((r.oscillation - 0.4).abs() < 1e-6);
    }

    #[test]
    fn origin_outside_is_rejected() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 64)
            .unwrap()
            .translated(Vec2::new(2.0, 0.0));
        assert_eq!(
            rho_reflection_min(&d, ReflectionOptions::default()).unwrap_err(),
            Error::OriginOutside
        );
    }
}
