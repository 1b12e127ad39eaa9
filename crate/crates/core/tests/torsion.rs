use std::f64::consts::PI;

use droplet_core::geometry::{area_and_moments, interior_quadrature};
use droplet_core::torsion::{lambda_of, solve_torsion};
use droplet_core::{ShapeSpec, StarDomain, Vec2};
use nalgebra::Matrix2;
use proptest::prelude::*;

fn rstar() -> f64 {
    (4.0 / PI).powf(1.0 / 3.0)
}

fn build(spec: &ShapeSpec, m: usize) -> StarDomain {
    StarDomain::build(spec, m).unwrap()
}

fn family() -> Vec<ShapeSpec> {
    vec![
        ShapeSpec::Circle { radius: 1.0 },
        ShapeSpec::Ellipse { a: 1.2, b: 0.8 },
        "fourier(1,[(2,0.1)])".parse().unwrap(),
        "fourier(1,[(3,0.1),(5,0.03)])".parse().unwrap(),
    ]
}

#[test]
fn disk_lambdas() {
    let l1 = lambda_of(&build(&ShapeSpec::Circle { radius: 1.0 }, 64), 1.0).unwrap();
    let l2 = lambda_of(&build(&ShapeSpec::Circle { radius: 2.0 }, 64), 1.0).unwrap();
    assert!((l1 - 8.0 / PI).abs() < 1e-8);
    assert!((l2 - 1.0 / (2.0 * PI)).abs() < 1e-8);
    assert!((l1 / l2 - 16.0).abs() < 1e-8);
    let ls = lambda_of(&build(&ShapeSpec::Circle { radius: rstar() }, 64), 1.0).unwrap();
    assert!((ls - 2.0 / rstar()).abs() < 1e-9);
    assert!((ls - 1.845_270_149).abs() < 1e-8);
}

#[test]
fn faber_krahn_ordering() {
    let le = lambda_of(&build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 128), 1.0).unwrap();
    let lb = lambda_of(&build(&ShapeSpec::Circle { radius: 0.96f64.sqrt() }, 128), 1.0).unwrap();
    assert!(le > lb);
    assert!((le - 2.993_365_538).abs() < 1e-8);
}

#[test]
fn equilibrium_disk_interior() {
    let s = solve_torsion(&build(&ShapeSpec::Circle { radius: rstar() }, 128), 1.0).unwrap();
    for g in &s.boundary_grad.values {
        assert!((g - 1.0).abs() < 1e-10);
    }
    for psi in [0.0f64, 0.4, 2.0, 4.5] {
        let p = Vec2::new(psi.cos(), psi.sin()) * (0.9 * rstar());
        let v = s.eval_point(p, 0.0).unwrap();
        assert!((v.grad.norm() - 0.9).abs() < 1e-6, "{}", v.grad.norm());
        let h = Matrix2::identity() * (-s.lambda / 2.0);
        assert!((v.hessian - h).norm() < 1e-8);
    }
}

#[test]
fn spectral_convergence_on_the_disk() {
    let exact = 8.0 / PI;
    let e64 = (lambda_of(&build(&ShapeSpec::Circle { radius: 1.0 }, 64), 1.0).unwrap() - exact).abs();
    let e128 = (lambda_of(&build(&ShapeSpec::Circle { radius: 1.0 }, 128), 1.0).unwrap() - exact).abs();
    assert!(e128 < 1e-10 && e64 < 1e-10);

    // on a non-trivial shape the M and 2M answers agree to near round-off
    let spec: ShapeSpec = "fourier(1,[(3,0.1),(5,0.03)])".parse().unwrap();
    let a = lambda_of(&build(&spec, 64), 1.0).unwrap();
    let b = lambda_of(&build(&spec, 128), 1.0).unwrap();
    let c = lambda_of(&build(&spec, 256), 1.0).unwrap();
    assert!((b - c).abs() < 1e-11 && (a - c).abs() < 1e-7, "{a} {b} {c}");
}

#[test]
fn solution_invariants_on_the_family() {
    for spec in family() {
        let d = build(&spec, 128);
        let s = solve_torsion(&d, 1.0).unwrap();
        let area = area_and_moments(&d).area;
        assert!(
            (s.boundary_flux() - s.lambda * area).abs() < 1e-8,
            "{spec}: {} vs {}",
            s.boundary_flux(),
            s.lambda * area
        );
        assert!(s.boundary_grad.min() > 0.0);

        let q = interior_quadrature(&d, 24).unwrap();
        let vals: Vec<_> = s
            .eval_interior(&q.nodes)
            .into_iter()
            .map(|v| v.unwrap())
            .collect();
        assert!(vals.iter().all(|v| v.u > 0.0), "{spec}: maximum principle");
        let u: Vec<f64> = vals.iter().map(|v| v.u).collect();
        let vol = q.integrate_values(&u);
        assert!((vol - 1.0).abs() < 1e-8, "{spec}: ∫u = {vol}");
        let grad2: Vec<f64> = vals.iter().map(|v| v.grad.norm_squared()).collect();
        let energy = q.integrate_values(&grad2);
        assert!((energy / s.lambda - 1.0).abs() < 1e-6, "{spec}: energy {energy}");

        let lap: Vec<f64> = vals.iter().map(|v| v.hessian.trace() + s.lambda).collect();
        let worst = lap.iter().cloned().fold(0.0, |a: f64, b| a.max(b.abs()));
        assert!(worst < 1e-8 * s.lambda, "{spec}: harmonicity {worst}");
    }
}

#[test]
fn ill_resolved_samples_are_rejected_or_flagged() {
    let d = StarDomain::new(Vec2::zeros(), vec![1.0; 16]).unwrap();
    assert!(solve_torsion(&d, 1.0).is_ok());
    assert!(solve_torsion(&d, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn translation_equivariance(dx in -0.5f64..0.5, dy in -0.5f64..0.5, px in -0.4f64..0.4, py in -0.3f64..0.3) {
        let d = build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 96);
        let shift = Vec2::new(dx, dy);
        let s0 = solve_torsion(&d, 1.0).unwrap();
        let s1 = solve_torsion(&d.translated(shift), 1.0).unwrap();
        prop_assert!((s0.lambda - s1.lambda).abs() < 1e-10);
        let p = Vec2::new(px, py);
        let a = s0.eval_point(p, 0.0).unwrap();
        let b = s1.eval_point(p + shift, 0.0).unwrap();
        prop_assert!((a.u - b.u).abs() < 1e-10);
        prop_assert!((a.grad - b.grad).norm() < 1e-9);
    }

    #[test]
    fn dilation_scaling(t in 0.5f64..2.0) {
        let spec: ShapeSpec = "fourier(1,[(2,0.1)])".parse().unwrap();
        let d = build(&spec, 96);
        let l = lambda_of(&d, 1.0).unwrap();
        let lt = lambda_of(&d.dilated(t).unwrap(), 1.0).unwrap();
        prop_assert!((lt * t.powi(4) / l - 1.0).abs() < 1e-10);
    }
}
