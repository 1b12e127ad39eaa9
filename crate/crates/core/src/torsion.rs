//! Constrained torsion problem `-Δu = λ, u|∂Ω = 0, ∫u = Vol` on star domains.
//!
//! The unit torsion function is split as `φ = -|x-c|²/4 + h` with `h` harmonic.
//! `h` is the real part of an analytic function `Φ`, represented as a Cauchy
//! (double-layer) integral whose real density solves a second-kind equation
//! discretized by Nyström on the boundary nodes. The boundary values of `Φ`
//! (including the conjugate harmonic) are differentiated spectrally, and
//! interior values use the barycentric Cauchy formula, which stays accurate
//! close to the boundary.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{boundary_geometry, BoundaryField, BoundaryGeometry, StarDomain, Vec2};
use crate::spectral;

/// Condition estimates above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

fn cx(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

#[derive(Debug, Clone)]
pub struct TorsionSolution {
    pub domain: StarDomain,
    pub vol: f64,
    pub lambda: f64,
    /// `∫φ` of the unit torsion function.
    pub phi_integral: f64,
    /// `|Du|` at the boundary nodes.
    pub boundary_grad: BoundaryField,
    /// Real double-layer density.
    pub density: Vec<f64>,
    /// `‖A‖₁ ‖A⁻¹‖₁` of the Nyström matrix.
    pub condition: f64,
    pub geometry: BoundaryGeometry,
    /// `D²u` at the boundary nodes.
    pub boundary_hessian: Vec<Matrix2<f64>>,
    fine: FineBoundary,
}

/// Boundary data of `Φ, Φ', Φ''` on a refined grid for the barycentric formula.
#[derive(Debug, Clone)]
struct FineBoundary {
    points: Vec<Complex64>,
    velocity: Vec<Complex64>,
    phi: Vec<Complex64>,
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
}

impl FineBoundary {
    fn new(d: &StarDomain, values: &[Complex64]) -> Self {
        let fine = d.upsampled(2);
        let g = boundary_geometry(&fine);
        let points: Vec<Complex64> = g.points.iter().map(|p| cx(*p)).collect();
        let velocity: Vec<Complex64> = g.velocity.iter().map(|p| cx(*p)).collect();
        let phi = spectral::upsample_complex(values, 2);
        let d1: Vec<Complex64> = spectral::derivative_complex(&phi, 1)
            .iter()
            .zip(&velocity)
            .map(|(a, b)| a / b)
            .collect();
        let d2: Vec<Complex64> = spectral::derivative_complex(&d1, 1)
            .iter()
            .zip(&velocity)
            .map(|(a, b)| a / b)
            .collect();
        Self {
            points,
            velocity,
            phi,
            d1,
            d2,
        }
    }

    /// Barycentric Cauchy interpolation of `Φ, Φ', Φ''` at `z`.
    fn eval(&self, z: Complex64) -> [Complex64; 3] {
        let mut den = Complex64::new(0.0, 0.0);
        let mut num = [Complex64::new(0.0, 0.0); 3];
        for j in 0..self.points.len() {
            let diff = self.points[j] - z;
            if diff.norm_sqr() == 0.0 {
                return [self.phi[j], self.d1[j], self.d2[j]];
            }
            let w = self.velocity[j] / diff;
            den += w;
            num[0] += w * self.phi[j];
            num[1] += w * self.d1[j];
            num[2] += w * self.d2[j];
        }
        [num[0] / den, num[1] / den, num[2] / den]
    }
}

/// Values of `u`, `Du` and `D²u` at an interior point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorValue {
    pub point: Vec2,
    pub u: f64,
    pub grad: Vec2,
    pub hessian: Matrix2<f64>,
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn solve_torsion(d: &StarDomain, vol: f64) -> Result<TorsionSolution> {
    if !(vol > 0.0) || !vol.is_finite() {
        return Err(Error::InvalidArgument(format!("volume {vol} must be positive")));
    }
    let m = d.len();
    let geo = boundary_geometry(d);
    let h = 2.0 * PI / m as f64;
    let c = d.center();

    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let x = geo.points[i];
        for j in 0..m {
            let k = if i == j {
                geo.curvature.values[i] / (4.0 * PI)
            } else {
                let r = geo.points[j] - x;
                r.dot(&geo.normals[j]) / (2.0 * PI * r.norm_squared())
            };
            a[(i, j)] = k * geo.weights.values[j];
        }
        a[(i, i)] += 0.5;
    }
    let radii = d.radii();
    let rhs = DVector::from_iterator(m, radii.iter().map(|r| 0.25 * r * r));
    let lu = a.clone().lu();
    let inverse = lu
        .try_inverse()
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let condition = one_norm(&a) * one_norm(&inverse);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let mu: Vec<f64> = (&inverse * &rhs).iter().cloned().collect();

    // conjugate harmonic boundary values from the principal-value Cauchy integral
    let dmu = spectral::derivative(&mu, 1);
    let tau: Vec<Complex64> = geo.points.iter().map(|p| cx(*p)).collect();
    let dtau: Vec<Complex64> = geo.velocity.iter().map(|p| cx(*p)).collect();
    let values: Vec<Complex64> = (0..m)
        .map(|i| {
            let mut s = dmu[i];
            for j in 0..m {
                if j != i {
                    s += (mu[j] - mu[i]) * (dtau[j] / (tau[j] - tau[i])).re;
                }
            }
            Complex64::new(rhs[i], -s * h / (2.0 * PI))
        })
        .collect();

    let d1: Vec<Complex64> = spectral::derivative_complex(&values, 1)
        .iter()
        .zip(&dtau)
        .map(|(a, b)| a / b)
        .collect();
    let d2: Vec<Complex64> = spectral::derivative_complex(&d1, 1)
        .iter()
        .zip(&dtau)
        .map(|(a, b)| a / b)
        .collect();

    let mut dn_phi = Vec::with_capacity(m);
    for j in 0..m {
        let nu = geo.normals[j];
        let dn_h = (d1[j] * cx(nu)).re;
        dn_phi.push(-(geo.points[j] - c).dot(&nu) / 2.0 + dn_h);
    }
    let q_integral: f64 = radii.iter().map(|r| r.powi(4)).sum::<f64>() * h / 16.0;
    let flux: f64 = (0..m)
        .map(|j| geo.weights.values[j] * 0.25 * radii[j] * radii[j] * dn_phi[j])
        .sum();
    let phi_integral = -flux - q_integral;
    if !(phi_integral > 0.0) {
        return Err(Error::InvalidShape(format!(
            "torsion integral {phi_integral} is not positive"
        )));
    }
    let lambda = vol / phi_integral;
    let grad: Vec<f64> = dn_phi.iter().map(|v| -lambda * v).collect();
    if let Some(node) = grad.iter().position(|g| !(*g > 0.0)) {
        return Err(Error::NegativeBoundaryGradient {
            node,
            value: grad[node],
        });
    }
    let boundary_hessian = d2.iter().map(|p| hessian_from(lambda, *p)).collect();
    let fine = FineBoundary::new(d, &values);
    Ok(TorsionSolution {
        domain: d.clone(),
        vol,
        lambda,
        phi_integral,
        boundary_grad: BoundaryField::new("|Du|", grad),
        density: mu,
        condition,
        geometry: geo,
        boundary_hessian,
        fine,
    })
}

fn hessian_from(lambda: f64, d2: Complex64) -> Matrix2<f64> {
    let (hxx, hxy) = (d2.re, -d2.im);
    Matrix2::new(hxx - 0.5, hxy, hxy, -hxx - 0.5) * lambda
}

pub fn lambda_of(d: &StarDomain, vol: f64) -> Result<f64> {
    Ok(solve_torsion(d, vol)?.lambda)
}

impl TorsionSolution {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// `Du = -|Du| ν` at the boundary nodes.
    pub fn boundary_gradient_vectors(&self) -> Vec<Vec2> {
        self.boundary_grad
            .values
            .iter()
            .zip(&self.geometry.normals)
            .map(|(g, n)| -n * *g)
            .collect()
    }

    /// Evaluates at a single point; rejects points whose relative radial offset
    /// `1 - |x-c|/r(ψ)` is not above `min_offset`.
    pub fn eval_point(&self, p: Vec2, min_offset: f64) -> Result<InteriorValue> {
        let rel = self.domain.relative_radius(p);
        if !(1.0 - rel > min_offset.max(0.0)) {
            return Err(Error::PointOutside { x: p.x, y: p.y });
        }
        let [phi, d1, d2] = self.fine.eval(cx(p));
        let r = p - self.domain.center();
        let u = self.lambda * (phi.re - 0.25 * r.norm_squared());
        let grad = (Vec2::new(d1.re, -d1.im) - r * 0.5) * self.lambda;
        Ok(InteriorValue {
            point: p,
            u,
            grad,
            hessian: hessian_from(self.lambda, d2),
        })
    }

    /// Per-point evaluation, strictly inside.
    pub fn eval_interior(&self, pts: &[Vec2]) -> Vec<Result<InteriorValue>> {
        self.eval_interior_with(pts, 0.0)
    }

    pub fn eval_interior_with(&self, pts: &[Vec2], min_offset: f64) -> Vec<Result<InteriorValue>> {
        pts.iter().map(|p| self.eval_point(*p, min_offset)).collect()
    }

    /// `∮ |Du| dσ`, equal to `λ|Ω|`.
    pub fn boundary_flux(&self) -> f64 {
        self.geometry.integrate(|j| self.boundary_grad.values[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;

    fn circle(r: f64, m: usize) -> StarDomain {
        StarDomain::build(&ShapeSpec::Circle { radius: r }, m).unwrap()
    }

    #[test]
    fn unit_disk() {
        let s = solve_torsion(&circle(1.0, 64), 1.0).unwrap();
        assert!((s.lambda - 8.0 / PI).abs() < 1e-10, "{}", s.lambda);
        for g in &s.boundary_grad.values {
            assert!((g - 4.0 / PI).abs() < 1e-10);
        }
        let c = s.eval_point(Vec2::zeros(), 0.0).unwrap();
        assert!((c.u - 2.0 / PI).abs() < 1e-10);
        assert!(c.grad.norm() < 1e-10);
        assert!((c.hessian - Matrix2::identity() * (-s.lambda / 2.0)).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_volume_and_outside_points() {
        assert!(solve_torsion(&circle(1.0, 32), 0.0).is_err());
        let s = solve_torsion(&circle(1.0, 32), 1.0).unwrap();
        assert!(s.eval_point(Vec2::new(1.2, 0.0), 0.0).is_err());
        assert!(s.eval_point(Vec2::new(0.95, 0.0), 0.1).is_err());
        assert!(s.eval_point(Vec2::new(0.85, 0.0), 0.1).is_ok());
    }

    #[test]
    fn ellipse_closed_form() {
        let (a, b) = (1.2_f64, 0.8_f64);
        let d = StarDomain::build(&ShapeSpec::Ellipse { a, b }, 128).unwrap();
        let s = solve_torsion(&d, 1.0).unwrap();
        let exact = 4.0 * (a * a + b * b) / (PI * a.powi(3) * b.powi(3));
        assert!((s.lambda - exact).abs() < 1e-8, "{} vs {exact}", s.lambda);
        let k = a * a * b * b / (2.0 * (a * a + b * b));
        let p = Vec2::new(0.5, 0.3);
        let v = s.eval_point(p, 0.0).unwrap();
        let u = s.lambda * k * (1.0 - (p.x / a).powi(2) - (p.y / b).powi(2));
        assert!((v.u - u).abs() < 1e-9);
        let hxx = -2.0 * s.lambda * k / (a * a);
        assert!((v.hessian[(0, 0)] - hxx).abs() < 1e-8);
        assert!(v.hessian[(0, 1)].abs() < 1e-8);
    }
}
