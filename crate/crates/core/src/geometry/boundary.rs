use std::f64::consts::PI;

use super::{BoundaryField, StarDomain, Vec2};
use crate::spectral;

/// Differential geometry of the boundary at the sample nodes.
///
/// Parameterized counterclockwise by the polar angle; `speed = |x'(θ)|`,
/// `normals` point outward.
#[derive(Debug, Clone)]
pub struct BoundaryGeometry {
    pub points: Vec<Vec2>,
    pub tangents: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    /// `x'(θ)` at each node.
    pub velocity: Vec<Vec2>,
    /// `x''(θ)` at each node.
    pub acceleration: Vec<Vec2>,
    pub speed: Vec<f64>,
    pub curvature: BoundaryField,
    /// Trapezoid arc-length weights `|x'(θ_j)| 2π/M`.
    pub weights: BoundaryField,
    pub radius_d1: Vec<f64>,
    pub radius_d2: Vec<f64>,
}

impl BoundaryGeometry {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.weights.values.iter().sum()
    }

    /// `∮ f dσ` for nodal values `f`.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights
            .values
            .iter()
            .enumerate()
            .map(|(j, w)| w * f(j))
            .sum()
    }
}

pub fn boundary_geometry(d: &StarDomain) -> BoundaryGeometry {
    let m = d.len();
    let r = d.radii();
    let dr = spectral::derivative(r, 1);
    let ddr = spectral::derivative(r, 2);
    let h = 2.0 * PI / m as f64;
    let mut points = Vec::with_capacity(m);
    let mut tangents = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    let mut velocity = Vec::with_capacity(m);
    let mut acceleration = Vec::with_capacity(m);
    let mut speed = Vec::with_capacity(m);
    let mut curvature = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (j, theta) in d.angles().into_iter().enumerate() {
        let (s, c) = theta.sin_cos();
        let e = Vec2::new(c, s);
        let ep = Vec2::new(-s, c);
        let x = d.center() + e * r[j];
        let v = e * dr[j] + ep * r[j];
        let a = e * (ddr[j] - r[j]) + ep * (2.0 * dr[j]);
        let sp = v.norm();
        let t = v / sp;
        points.push(x);
        tangents.push(t);
        normals.push(Vec2::new(t.y, -t.x));
        velocity.push(v);
        acceleration.push(a);
        speed.push(sp);
        curvature.push((v.x * a.y - v.y * a.x) / (sp * sp * sp));
        weights.push(sp * h);
    }
    BoundaryGeometry {
        points,
        tangents,
        normals,
        velocity,
        acceleration,
        speed,
        curvature: BoundaryField::new("curvature", curvature),
        weights: BoundaryField::new("arc-length-weight", weights),
        radius_d1: dr,
        radius_d2: ddr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;
    use crate::quadrature::gauss_legendre_on;

    #[test]
    fn circles_have_constant_curvature() {
        for (radius, kappa, per) in [(1.0, 1.0, 2.0 * PI), (2.0, 0.5, 4.0 * PI)] {
            let d = StarDomain::build(&ShapeSpec::Circle { radius }, 64).unwrap();
            let g = boundary_geometry(&d);
            assert!(g.curvature.values.iter().all(|k| (k - kappa).abs() < 1e-13));
            assert!((g.perimeter() - per).abs() < 1e-12);
            assert!(g.normals.iter().all(|n| (n.norm() - 1.0).abs() < 1e-12));
            for (p, n) in g.points.iter().zip(&g.normals) {
                assert!((p / radius - n).norm() < 1e-13);
            }
        }
    }

    /// Composite Gauss–Legendre arc length of the parametric ellipse
    /// `(a cos t, b sin t)`, independent of the star parameterization.
    fn ellipse_perimeter_oracle(a: f64, b: f64) -> f64 {
        let panels = 64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = 2.0 * PI * p as f64 / panels as f64;
            let hi = 2.0 * PI * (p + 1) as f64 / panels as f64;
            let (x, w) = gauss_legendre_on(20, lo, hi);
            for (t, wt) in x.iter().zip(&w) {
                total += wt * (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
            }
        }
        total
    }

    #[test]
    fn ellipse_perimeter_matches_arc_length_oracle() {
        let oracle = ellipse_perimeter_oracle(1.2, 0.8);
        assert!((oracle - 6.346_175_835_716).abs() < 1e-9);
        let d = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128).unwrap();
        let g = boundary_geometry(&d);
        assert!((g.perimeter() - oracle).abs() < 1e-8, "{} vs {oracle}", g.perimeter());
    }

    #[test]
    fn ellipse_curvature_matches_closed_form() {
        let (a, b) = (1.2, 0.8);
        let d = StarDomain::build(&ShapeSpec::Ellipse { a, b }, 128).unwrap();
        let g = boundary_geometry(&d);
        for (p, k) in g.points.iter().zip(&g.curvature.values) {
            // κ = ab / (b²x²/a² + a²y²/b²)^{3/2} for the implicit ellipse
            let denom = (b * b * p.x * p.x / (a * a) + a * a * p.y * p.y / (b * b)).powf(1.5);
            assert!((k - a * b / denom).abs() < 1e-9);
        }
    }
}
