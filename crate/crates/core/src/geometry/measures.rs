use std::f64::consts::PI;

use super::{boundary_geometry, StarDomain, Vec2};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_on;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub area: f64,
    pub barycenter: Vec2,
    /// Largest distance between two boundary nodes.
    pub diameter: f64,
    /// Distance from the barycenter to the nearest boundary point.
    pub in_radius: f64,
    /// Distance from the barycenter to the farthest boundary point.
    pub out_radius: f64,
}

pub fn area_and_moments(d: &StarDomain) -> Moments {
    let m = d.len();
    let h = 2.0 * PI / m as f64;
    let mut area = 0.0;
    let mut first = Vec2::zeros();
    for (t, r) in d.angles().iter().zip(d.radii()) {
        area += 0.5 * r * r * h;
        first += Vec2::new(t.cos(), t.sin()) * (r * r * r / 3.0 * h);
    }
    let barycenter = d.center() + first / area;

    let nodes = d.nodes();
    let mut diameter: f64 = 0.0;
    for (i, p) in nodes.iter().enumerate() {
        for q in &nodes[i + 1..] {
            diameter = diameter.max((p - q).norm());
        }
    }

    let fine = d.upsampled(4).nodes();
    let (mut in_radius, mut out_radius) = (f64::INFINITY, 0.0_f64);
    for p in &fine {
        let dist = (p - barycenter).norm();
        in_radius = in_radius.min(dist);
        out_radius = out_radius.max(dist);
    }
    Moments {
        area,
        barycenter,
        diameter,
        in_radius,
        out_radius,
    }
}

/// Estimate of the uniform interior ball radius `ρ_0`: the largest `ρ` such that
/// every boundary node is touched from inside by a ball of radius `ρ`.
///
/// At node `x` with outward normal `ν` the ball `B_ρ(x - ρν)` misses the other
/// nodes `y` iff `ρ ≤ |y-x|² / (2(x-y)·ν)` whenever `(x-y)·ν > 0`; the local
/// limit `1/κ` is included for convex nodes.
pub fn interior_ball_radius(d: &StarDomain) -> f64 {
    let g = boundary_geometry(&d.upsampled(2));
    let mut rho = f64::INFINITY;
    for (j, x) in g.points.iter().enumerate() {
        let nu = g.normals[j];
        let k = g.curvature.values[j];
        if k > 0.0 {
            rho = rho.min(1.0 / k);
        }
        for (i, y) in g.points.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = x - y;
            let depth = diff.dot(&nu);
            if depth > 0.0 {
                rho = rho.min(diff.norm_squared() / (2.0 * depth));
            }
        }
    }
    rho
}

/// Tensor-product rule on the star map `(s, θ) ↦ c + s r(θ)(cos θ, sin θ)`.
#[derive(Debug, Clone)]
pub struct InteriorQuadrature {
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// `1 - s_max`: relative radial distance of the outermost node ring from the boundary.
    pub offset: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl InteriorQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Vec2) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }

    /// Integrates precomputed nodal values.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Gauss–Legendre in `s` with `n_radial` nodes, trapezoid in θ on the domain's `M` angles.
pub fn interior_quadrature(d: &StarDomain, n_radial: usize) -> Result<InteriorQuadrature> {
    interior_quadrature_with(d, n_radial, d.len())
}

pub fn interior_quadrature_with(
    d: &StarDomain,
    n_radial: usize,
    n_angular: usize,
) -> Result<InteriorQuadrature> {
    if n_radial < 8 {
        return Err(Error::InvalidArgument(format!(
            "n_radial = {n_radial} is below the minimum of 8"
        )));
    }
    if n_angular < 3 {
        return Err(Error::InvalidArgument("need at least 3 angular nodes".into()));
    }
    let (s_nodes, s_weights) = gauss_legendre_on(n_radial, 0.0, 1.0);
    let h = 2.0 * PI / n_angular as f64;
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for k in 0..n_angular {
        let theta = h * k as f64;
        let r = d.radius_at(theta);
        let e = Vec2::new(theta.cos(), theta.sin());
        for (s, ws) in s_nodes.iter().zip(&s_weights) {
            nodes.push(d.center() + e * (s * r));
            weights.push(ws * h * s * r * r);
        }
    }
    let s_max = s_nodes.iter().cloned().fold(0.0, f64::max);
    Ok(InteriorQuadrature {
        nodes,
        weights,
        offset: 1.0 - s_max,
        n_radial,
        n_angular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;

    #[test]
    fn disk_moments() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 64).unwrap();
        let m = area_and_moments(&d);
        assert!((m.area - PI).abs() < 1e-13);
        assert!(m.barycenter.norm() < 1e-14);
        assert!((m.in_radius - 1.0).abs() < 1e-13);
        assert!((m.out_radius - 1.0).abs() < 1e-13);
        assert!((m.diameter - 2.0).abs() < 1e-13);
    }

    #[test]
    fn areas_of_fourier_and_ellipse() {
        let f = StarDomain::build(
            &ShapeSpec::Fourier {
                base: 1.0,
                modes: vec![(3, 0.1)],
            },
            64,
        )
        .unwrap();
        assert!((area_and_moments(&f).area - PI * (1.0 + 0.005)).abs() < 1e-13);
        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        assert!((area_and_moments(&e).area - 0.96 * PI).abs() < 1e-12);
    }

    #[test]
    fn barycenter_follows_translation() {
        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128)
            .unwrap()
            .translated(Vec2::new(0.3, -0.2));
        let m = area_and_moments(&e);
        assert!((m.barycenter - Vec2::new(0.3, -0.2)).norm() < 1e-12);
        assert!((m.in_radius - 0.8).abs() < 1e-3);
        assert!((m.out_radius - 1.2).abs() < 1e-3);
    }

    #[test]
    fn interior_ball_of_disk_and_ellipse() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.3 }, 64).unwrap();
        assert!((interior_ball_radius(&d) - 1.3).abs() < 1e-9);
        // for an ellipse the binding constraint is the curvature at the ends of the major axis
        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        assert!((interior_ball_radius(&e) - 0.64 / 1.2).abs() < 1e-6);
    }

    #[test]
    fn interior_weights_integrate_exactly() {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 64).unwrap();
        let q = interior_quadrature(&d, 16).unwrap();
        assert!((q.total_weight() - PI).abs() < 1e-12);
        assert!((q.integrate(|p| p.norm_squared()) - PI / 2.0).abs() < 1e-12);
        assert!(q.offset > 0.0 && q.offset < 0.01);

        let e = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        let qe = interior_quadrature(&e, 16).unwrap();
        assert!((qe.total_weight() / (0.96 * PI) - 1.0).abs() < 1e-10);
        assert!(qe.nodes.iter().all(|p| e.relative_radius(*p) < 1.0));
        assert!(interior_quadrature(&e, 4).is_err());
    }
}
