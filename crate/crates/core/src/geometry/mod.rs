//! Star-shaped planar domains sampled by a radius function about a center.

mod asymmetry;
mod boundary;
mod measures;
mod reflection;
mod shape;
pub mod snapshot;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{self, TrigSeries};

pub use asymmetry::{
    asymmetry_to_ball, asymmetry_to_ball_from, lemma_distance_check, symmetric_difference_area,
    AsymmetryOptions, BallFit, DistanceCheck,
};
pub use boundary::{boundary_geometry, BoundaryGeometry};
pub use measures::{
    area_and_moments, interior_ball_radius, interior_quadrature, interior_quadrature_with, InteriorQuadrature, Moments,
};
pub use reflection::{rho_reflection_min, ReflectionOptions, ReflectionReport};
pub use shape::ShapeSpec;

pub type Vec2 = nalgebra::Vector2<f64>;

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;

/// Default threshold on the relative spectral tail above which a domain is flagged as rough.
pub const DEFAULT_SMOOTHNESS_THRESHOLD: f64 = 1e-6;

/// Closed star-shaped region `{center + s r(θ)(cos θ, sin θ) : 0 ≤ s ≤ 1}`,
/// with `r` stored at `M` uniform angles.
#[derive(Debug, Clone)]
pub struct StarDomain {
    center: Vec2,
    radii: Vec<f64>,
    series: TrigSeries,
}

impl PartialEq for StarDomain {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center && self.radii == other.radii
    }
}

impl StarDomain {
    pub fn new(center: Vec2, radii: Vec<f64>) -> Result<Self> {
        let m = radii.len();
        if m < MIN_NODES || m % 2 != 0 {
            return Err(Error::BadNodeCount(m));
        }
        for (j, &r) in radii.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::NonPositiveRadius {
                    angle: 2.0 * PI * j as f64 / m as f64,
                    radius: r,
                });
            }
        }
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(Error::InvalidShape("center must be finite".into()));
        }
        let series = TrigSeries::from_samples(&radii);
        Ok(Self {
            center,
            radii,
            series,
        })
    }

    /// Samples the exact radius function of `spec` at `m` uniform angles, centered at the origin.
    pub fn build(spec: &ShapeSpec, m: usize) -> Result<Self> {
        if let ShapeSpec::Samples(r) = spec {
            return Self::new(Vec2::zeros(), r.clone());
        }
        if m < MIN_NODES || m % 2 != 0 {
            return Err(Error::BadNodeCount(m));
        }
        let radii = spectral::uniform_angles(m)
            .into_iter()
            .map(|t| spec.radius(t))
            .collect();
        Self::new(Vec2::zeros(), radii)
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        spectral::uniform_angles(self.len())
    }

    pub fn radius_series(&self) -> &TrigSeries {
        &self.series
    }

    /// Trigonometric interpolant of the radius at an arbitrary angle.
    pub fn radius_at(&self, theta: f64) -> f64 {
        self.series.eval(theta)
    }

    /// Boundary point and its θ-derivative.
    pub fn boundary_point(&self, theta: f64) -> (Vec2, Vec2) {
        let (r, dr) = self.series.eval2(theta);
        let (s, c) = theta.sin_cos();
        let e = Vec2::new(c, s);
        let e_perp = Vec2::new(-s, c);
        (self.center + e * r, e * dr + e_perp * r)
    }

    pub fn nodes(&self) -> Vec<Vec2> {
        self.angles()
            .iter()
            .zip(&self.radii)
            .map(|(t, r)| self.center + Vec2::new(t.cos(), t.sin()) * *r)
            .collect()
    }

    pub fn translated(&self, offset: Vec2) -> Self {
        Self {
            center: self.center + offset,
            radii: self.radii.clone(),
            series: self.series.clone(),
        }
    }

    /// Dilation `tΩ = {t x : x ∈ Ω}` about the coordinate origin.
    pub fn dilated(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("dilation factor {t} must be positive")));
        }
        Self::new(self.center * t, self.radii.iter().map(|r| r * t).collect())
    }

    pub fn with_radii(&self, radii: Vec<f64>) -> Result<Self> {
        Self::new(self.center, radii)
    }

    /// Band-limited refinement onto `factor * M` nodes.
    pub fn upsampled(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        let radii = spectral::upsample(&self.radii, factor);
        Self::new(self.center, radii).expect("band-limited refinement of a valid domain")
    }

    /// Relative spectral tail of the radius samples (top third of modes).
    pub fn smoothness_tail(&self) -> f64 {
        spectral::spectral_tail(&self.radii)
    }

    pub fn is_smooth(&self, threshold: f64) -> bool {
        self.smoothness_tail() <= threshold
    }

    /// `|p - c| / r(ψ)` where ψ is the polar angle of `p` about the center; `< 1` inside.
    pub fn relative_radius(&self, p: Vec2) -> f64 {
        let d = p - self.center;
        let rho = d.norm();
        if rho == 0.0 {
            return 0.0;
        }
        let psi = d.y.atan2(d.x);
        rho / self.series.eval(psi)
    }

    /// Point-in-star test with absolute tolerance on the radial coordinate.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let d = p - self.center;
        let rho = d.norm();
        if rho == 0.0 {
            return true;
        }
        let psi = d.y.atan2(d.x);
        rho <= self.series.eval(psi) + tol
    }

    /// Whether the boundary curve is star-shaped about `x`, checked on `4M` points.
    pub fn is_star_shaped_about(&self, x: Vec2) -> bool {
        let n = 4 * self.len();
        (0..n).all(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            let (p, dp) = self.boundary_point(t);
            let d = p - x;
            d.x * dp.y - d.y * dp.x > 0.0
        })
    }

    /// Re-parameterizes the boundary about `new_center` by ray casting at `m` uniform angles.
    pub fn resampled_about(&self, new_center: Vec2, m: usize) -> Result<Self> {
        if !self.is_star_shaped_about(new_center) {
            return Err(Error::InvalidShape(format!(
                "domain is not star-shaped about ({}, {})",
                new_center.x, new_center.y
            )));
        }
        let rays = asymmetry::RayCaster::new(self, new_center);
        let radii = spectral::uniform_angles(m)
            .into_iter()
            .map(|psi| rays.distance(psi))
            .collect();
        Self::new(new_center, radii)
    }
}

/// Scalar samples attached to the boundary nodes of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    pub values: Vec<f64>,
    pub label: String,
}

impl BoundaryField {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            values,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Checks the field against a domain's node count and finiteness.
    pub fn validate(&self, domain: &StarDomain) -> Result<()> {
        if self.values.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "field '{}' has {} values for {} nodes",
                self.label,
                self.values.len(),
                domain.len()
            )));
        }
        if let Some(j) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "field '{}' is not finite at node {j}",
                self.label
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_node_counts_and_radii() {
        assert_eq!(
            StarDomain::new(Vec2::zeros(), vec![1.0; 15]).unwrap_err(),
            Error::BadNodeCount(15)
        );
        assert_eq!(
            StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 14).unwrap_err(),
            Error::BadNodeCount(14)
        );
        let bad = ShapeSpec::Fourier {
            base: 1.0,
            modes: vec![(2, 1.5)],
        };
        match StarDomain::build(&bad, 64).unwrap_err() {
            Error::NonPositiveRadius { angle, radius } => {
                assert!(radius <= 0.0);
                assert!(angle > 0.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn shape_families_sample_their_radius_functions() {
        let c = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 64).unwrap();
        assert!(c.radii().iter().all(|&r| r == 1.0));

        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        assert!((e.radii()[0] - 1.2).abs() < 1e-15);
        assert!((e.radii()[32] - 0.8).abs() < 1e-15);

        let f = StarDomain::build(
            &ShapeSpec::Fourier {
                base: 1.0,
                modes: vec![(3, 0.1)],
            },
            96,
        )
        .unwrap();
        assert!((f.radii()[0] - 1.1).abs() < 1e-15);
        assert!((f.radius_at(PI / 3.0) - 0.9).abs() < 1e-14);
        assert!((f.radii()[16] - 0.9).abs() < 1e-14);
    }

    #[test]
    fn point_in_star_and_resampling() {
        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        assert!(e.contains(Vec2::new(1.19, 0.0), 0.0));
        assert!(!e.contains(Vec2::new(0.0, 0.81), 0.0));
        let shift = Vec2::new(0.1, -0.05);
        let r = e.resampled_about(shift, 128).unwrap();
        for t in [0.0, 0.7, 2.1, 4.4] {
            let (p, _) = r.boundary_point(t);
            let q = p;
            let val = (q.x / 1.2).powi(2) + (q.y / 0.8).powi(2);
            assert!((val - 1.0).abs() < 1e-9, "{val}");
        }
    }

    #[test]
    fn smoothness_tail_flags_rough_samples() {
        let smooth = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        assert!(smooth.is_smooth(DEFAULT_SMOOTHNESS_THRESHOLD));
        let mut r = smooth.radii().to_vec();
        r[5] += 0.05;
        let rough = smooth.with_radii(r).unwrap();
        assert!(!rough.is_smooth(DEFAULT_SMOOTHNESS_THRESHOLD));
    }
}
