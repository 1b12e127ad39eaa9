//! Integration-by-parts identities and inequalities evaluated on torsion solutions.

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcalc::growth_constant;
use crate::geometry::{interior_quadrature, InteriorQuadrature, Vec2};
use crate::torsion::{InteriorValue, TorsionSolution};

const N: f64 = 2.0;

/// Residual denominators get `RESIDUAL_FLOOR × scale` added; boundary sums at unit
/// scale carry round-off near `1e-15`, so a smaller floor turns vanishing sides into noise.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Pohozaev,
    Cube,
    KappaCube,
    Trace,
    /// Signed form of the Hessian estimate, which holds with equality.
    FundEst,
    /// Absolute-value bound of the Hessian estimate.
    FundEstAbs,
    /// `∫u|D²u + (λ/N)Id|² ≤ c_N^{-1} × (absolute bound)`.
    FundEstHessian,
    S2Divfree,
}

impl IdentityId {
    pub const ALL: [IdentityId; 8] = [
        IdentityId::Pohozaev,
        IdentityId::Cube,
        IdentityId::KappaCube,
        IdentityId::Trace,
        IdentityId::FundEst,
        IdentityId::FundEstAbs,
        IdentityId::FundEstHessian,
        IdentityId::S2Divfree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Pohozaev => "pohozaev",
            IdentityId::Cube => "cube",
            IdentityId::KappaCube => "kappa_cube",
            IdentityId::Trace => "trace",
            IdentityId::FundEst => "fund_est",
            IdentityId::FundEstAbs => "fund_est_abs",
            IdentityId::FundEstHessian => "fund_est_hessian",
            IdentityId::S2Divfree => "s2_divfree",
        }
    }

    pub fn is_inequality(self) -> bool {
        matches!(self, IdentityId::FundEstAbs | IdentityId::FundEstHessian)
    }

    pub fn needs_interior(self) -> bool {
        !matches!(self, IdentityId::Pohozaev | IdentityId::Cube)
    }

    fn needs_hessians(self) -> bool {
        matches!(
            self,
            IdentityId::KappaCube
                | IdentityId::FundEst
                | IdentityId::FundEstAbs
                | IdentityId::FundEstHessian
                | IdentityId::S2Divfree
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown identity '{s}'")))
    }
}

/// `Re` or `Im` of `((x₁-a) + i(x₂-b))^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicTest {
    pub degree: u32,
    pub imaginary: bool,
    pub center: [f64; 2],
}

impl HarmonicTest {
    pub fn new(degree: u32, imaginary: bool, center: Vec2) -> Self {
        Self {
            degree,
            imaginary,
            center: [center.x, center.y],
        }
    }

    /// The family used by the suite: `1`, then `Re`, `Im` for degrees `1..=max_degree`.
    pub fn family(max_degree: u32, center: Vec2) -> Vec<HarmonicTest> {
        let mut out = vec![HarmonicTest::new(0, false, center)];
        for k in 1..=max_degree {
            out.push(HarmonicTest::new(k, false, center));
            out.push(HarmonicTest::new(k, true, center));
        }
        out
    }

    fn part(&self, z: Complex64) -> f64 {
        if self.imaginary {
            z.im
        } else {
            z.re
        }
    }

    fn shifted(&self, p: Vec2) -> Complex64 {
        Complex64::new(p.x - self.center[0], p.y - self.center[1])
    }

    pub fn value(&self, p: Vec2) -> f64 {
        self.part(self.shifted(p).powu(self.degree))
    }

    /// For analytic `g`, `∇ Re g = (Re g', -Im g')` and `∇ Im g = (Im g', Re g')`.
    pub fn gradient(&self, p: Vec2) -> Vec2 {
        if self.degree == 0 {
            return Vec2::zeros();
        }
        let d = self.shifted(p).powu(self.degree - 1) * self.degree as f64;
        if self.imaginary {
            Vec2::new(d.im, d.re)
        } else {
            Vec2::new(d.re, -d.im)
        }
    }
}

impl fmt::Display for HarmonicTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = if self.imaginary { "Im" } else { "Re" };
        write!(
            f,
            "{part}((x1-{})+i(x2-{}))^{}",
            self.center[0], self.center[1], self.degree
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub label: Option<String>,
    pub nodes: usize,
    pub n_radial: usize,
    pub x0: [f64; 2],
    pub test_function: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub inequality: bool,
    pub pass: bool,
    pub metadata: ReportMetadata,
}

impl IdentityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report fields serialize")
    }
}

#[derive(Debug, Clone)]
pub struct IdentityOptions {
    pub n_radial: usize,
    /// Residual tolerance for identities that only involve boundary data or `u`, `Du`.
    pub boundary_tolerance: f64,
    /// Residual tolerance for identities built from interior Hessians.
    pub hessian_tolerance: f64,
    /// One-sided slack for inequalities.
    pub inequality_slack: f64,
    /// Smallest admissible relative offset of the outermost quadrature ring.
    pub min_offset: f64,
    pub label: Option<String>,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            n_radial: 32,
            boundary_tolerance: 1e-5,
            hessian_tolerance: 1e-3,
            inequality_slack: 1e-6,
            min_offset: 1e-6,
            label: None,
        }
    }
}

/// Interior values cached once per solution.
pub struct IdentityContext<'a> {
    pub solution: &'a TorsionSolution,
    pub quadrature: InteriorQuadrature,
    pub values: Vec<InteriorValue>,
    pub options: IdentityOptions,
}

impl<'a> IdentityContext<'a> {
    pub fn new(solution: &'a TorsionSolution, options: IdentityOptions) -> Result<Self> {
        let quadrature = interior_quadrature(&solution.domain, options.n_radial)?;
        let values = solution
            .eval_interior(&quadrature.nodes)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            solution,
            quadrature,
            values,
            options,
        })
    }

    fn interior(&self, f: impl Fn(&InteriorValue) -> f64) -> f64 {
        self.values
            .iter()
            .zip(&self.quadrature.weights)
            .map(|(v, w)| w * f(v))
            .sum()
    }

    fn boundary(&self, f: impl Fn(usize, Vec2, Vec2, f64) -> f64) -> f64 {
        let g = &self.solution.geometry;
        g.integrate(|j| f(j, g.points[j], g.normals[j], self.solution.boundary_grad.values[j]))
    }

    fn check_offset(&self) -> Result<()> {
        if self.quadrature.offset < self.options.min_offset {
            return Err(Error::InsufficientOffset {
                offset: self.quadrature.offset,
                required: self.options.min_offset,
            });
        }
        Ok(())
    }

    /// `∮⟨(λ/N)(x-x0) + Du, ν⟩(|Du|²-1) dσ`.
    fn signed_correction(&self, x0: Vec2) -> f64 {
        let l = self.solution.lambda;
        self.boundary(|_, x, nu, g| ((x - x0).dot(&nu) * l / N - g) * (g * g - 1.0))
    }

    /// `∮|(λ/N)(x-x0) + Du| ||Du|²-1| dσ`.
    fn absolute_correction(&self, x0: Vec2) -> f64 {
        let l = self.solution.lambda;
        self.boundary(|_, x, nu, g| ((x - x0) * (l / N) - nu * g).norm() * (g * g - 1.0).abs())
    }

    /// `∫u((Δu/N)² - S_2(D²u))`; at `N = 2`, `S_2` is the determinant.
    fn fund_lhs(&self) -> f64 {
        self.interior(|v| v.u * ((v.hessian.trace() / N).powi(2) - v.hessian.determinant()))
    }

    pub fn check(
        &self,
        which: IdentityId,
        x0: Vec2,
        f: Option<HarmonicTest>,
    ) -> Result<IdentityReport> {
        if which.needs_hessians() {
            self.check_offset()?;
        }
        let s = self.solution;
        let l = s.lambda;
        let vol = s.vol;
        let main = l * l * vol;
        let mut test_function = None;
        let (lhs, rhs, scale) = match which {
            IdentityId::Pohozaev => {
                let lhs = self.boundary(|_, x, nu, g| (x - x0).dot(&nu) * (l / N) * g * g);
                (lhs, (N + 2.0) / N * main, main)
            }
            IdentityId::Cube => {
                let lhs = self.boundary(|_, _, _, g| g * g * g);
                let rhs = (N + 2.0) / N * main - self.signed_correction(x0);
                (lhs, rhs, main)
            }
            IdentityId::KappaCube => {
                let lhs = self.interior(|v| {
                    let g2 = v.grad.norm_squared();
                    g2 * v.hessian.trace() - (v.hessian * v.grad).dot(&v.grad)
                });
                let rhs = -1.5 * main + 0.5 * self.boundary(|_, _, _, g| g * g * g);
                (lhs, rhs, main)
            }
            IdentityId::Trace => {
                let f = f.unwrap_or_else(|| HarmonicTest::new(0, false, s.domain.center()));
                test_function = Some(f.to_string());
                let lhs = self.boundary(|_, x, _, g| f.value(x).powi(2) * g);
                let grad_term = self.interior(|v| f.gradient(v.point).norm_squared() * v.u);
                let val_term = self.quadrature.integrate(|p| f.value(p).powi(2));
                let rhs = 2.0 * grad_term + l * val_term;
                (lhs, rhs, lhs.abs().max(rhs.abs()))
            }
            IdentityId::FundEst => {
                let rhs = -self.signed_correction(x0) / (2.0 * N * (N - 1.0));
                (self.fund_lhs(), rhs, main)
            }
            IdentityId::FundEstAbs => {
                let rhs = self.absolute_correction(x0) / (2.0 * N * (N - 1.0));
                (self.fund_lhs(), rhs, main)
            }
            IdentityId::FundEstHessian => {
                let shift = Matrix2::identity() * (l / N);
                let lhs = self.interior(|v| v.u * (v.hessian + shift).norm_squared());
                let rhs = self.absolute_correction(x0) / (2.0 * N * (N - 1.0)) / growth_constant(2);
                (lhs, rhs, main)
            }
            IdentityId::S2Divfree => {
                let lhs = self.interior(|v| v.hessian.determinant());
                let rhs = -0.5
                    * self.boundary(|j, _, nu, g| {
                        let h = &s.boundary_hessian[j];
                        g * (h.trace() - (h * nu).dot(&nu))
                    });
                (lhs, rhs, main)
            }
        };
        let floor = RESIDUAL_FLOOR * scale.abs().max(f64::MIN_POSITIVE);
        let denom = lhs.abs() + rhs.abs() + floor;
        let inequality = which.is_inequality();
        let (residual, tolerance, pass) = if inequality {
            let excess = (lhs - rhs).max(0.0);
            let tol = self.options.inequality_slack;
            (excess / denom, tol, lhs <= rhs + tol)
        } else {
            let tol = if which.needs_hessians() {
                self.options.hessian_tolerance
            } else {
                self.options.boundary_tolerance
            };
            let r = (lhs - rhs).abs() / denom;
            (r, tol, r <= tol)
        };
        Ok(IdentityReport {
            id: which,
            lhs,
            rhs,
            residual,
            tolerance,
            inequality,
            pass,
            metadata: ReportMetadata {
                label: self.options.label.clone(),
                nodes: s.len(),
                n_radial: self.quadrature.n_radial,
                x0: [x0.x, x0.y],
                test_function,
            },
        })
    }

    /// Every identity at `x0`, with the trace identity run over degrees `0..=4`.
    pub fn check_all(&self, x0: Vec2) -> Result<Vec<IdentityReport>> {
        let mut out = Vec::new();
        for id in IdentityId::ALL {
            if id == IdentityId::Trace {
                for f in HarmonicTest::family(4, self.solution.domain.center()) {
                    out.push(self.check(id, x0, Some(f))?);
                }
            } else {
                out.push(self.check(id, x0, None)?);
            }
        }
        Ok(out)
    }
}

/// One-off check; builds the interior cache only when the identity needs it.
pub fn check_identity(
    s: &TorsionSolution,
    which: IdentityId,
    x0: Vec2,
    f: Option<HarmonicTest>,
) -> Result<IdentityReport> {
    let mut opts = IdentityOptions::default();
    if !which.needs_interior() {
        opts.n_radial = 8;
    }
    IdentityContext::new(s, opts)?.check(which, x0, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;
    use crate::geometry::StarDomain;
    use crate::torsion::solve_torsion;
    use std::f64::consts::PI;

    fn disk(r: f64) -> TorsionSolution {
        solve_torsion(&StarDomain::build(&ShapeSpec::Circle { radius: r }, 64).unwrap(), 1.0)
            .unwrap()
    }

    #[test]
    fn trace_closed_forms_on_unit_disk() {
        let s = disk(1.0);
        let one = check_identity(&s, IdentityId::Trace, Vec2::zeros(), None).unwrap();
        assert!((one.lhs - 8.0).abs() < 1e-9 && (one.rhs - 8.0).abs() < 1e-9);
        let x1 = HarmonicTest::new(1, false, Vec2::zeros());
        let r = check_identity(&s, IdentityId::Trace, Vec2::zeros(), Some(x1)).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-9 && (r.rhs - 4.0).abs() < 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn equilibrium_disk_cube_and_fund_est() {
        let rstar = (4.0 / PI).powf(1.0 / 3.0);
        let s = disk(rstar);
        let c = check_identity(&s, IdentityId::Cube, Vec2::zeros(), None).unwrap();
        assert!((c.lhs - 2.0 * PI * rstar).abs() < 1e-9);
        assert!((c.rhs - 2.0 * s.lambda * s.lambda).abs() < 1e-9);
        assert!(c.residual < 1e-8);
        let f = check_identity(&s, IdentityId::FundEst, Vec2::zeros(), None).unwrap();
        assert!(f.lhs.abs() < 1e-12 && f.rhs.abs() < 1e-12);
        assert!(f.pass);
    }

    #[test]
    fn harmonic_gradients_match_differences() {
        let p = Vec2::new(0.3, -0.2);
        let h = 1e-6;
        for f in HarmonicTest::family(4, Vec2::new(0.1, 0.05)) {
            let g = f.gradient(p);
            let gx = (f.value(p + Vec2::new(h, 0.0)) - f.value(p - Vec2::new(h, 0.0))) / (2.0 * h);
            let gy = (f.value(p + Vec2::new(0.0, h)) - f.value(p - Vec2::new(0.0, h))) / (2.0 * h);
            assert!((g - Vec2::new(gx, gy)).norm() < 1e-8, "{f}");
        }
    }

    #[test]
    fn names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!("nope".parse::<IdentityId>().is_err());
    }
}
