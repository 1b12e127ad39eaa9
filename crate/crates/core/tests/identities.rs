use droplet_core::geometry::area_and_moments;
use droplet_core::identities::*;
use droplet_core::torsion::solve_torsion;
use droplet_core::{ShapeSpec, StarDomain, Vec2};

fn family() -> Vec<ShapeSpec> {
    vec![
        ShapeSpec::Circle { radius: 1.0 },
        ShapeSpec::Ellipse { a: 1.2, b: 0.8 },
        "fourier(1,[(2,0.1)])".parse().unwrap(),
        "fourier(1,[(3,0.1),(5,0.03)])".parse().unwrap(),
    ]
}

#[test]
fn every_identity_holds_on_the_family() {
    for spec in family() {
        let d = StarDomain::build(&spec, 128).unwrap();
        let s = solve_torsion(&d, 1.0).unwrap();
        let ctx = IdentityContext::new(&s, IdentityOptions::default()).unwrap();
        let bary = area_and_moments(&d).barycenter;
        for x0 in [d.center(), bary, Vec2::new(0.2, -0.1), Vec2::new(-0.3, 0.25)] {
            for r in ctx.check_all(x0).unwrap() {
                println!(
                    "{spec} {:<18} x0=({:+.2},{:+.2}) lhs={:+.10e} rhs={:+.10e} res={:.2e} {}",
                    r.id.name(),
                    x0.x,
                    x0.y,
                    r.lhs,
                    r.rhs,
                    r.residual,
                    r.metadata.test_function.clone().unwrap_or_default()
                );
                assert!(r.pass, "{spec}: {}", r.to_json());
                // equalities carry far more accuracy than their tolerances require
                if !r.inequality {
                    assert!(
                        (r.lhs - r.rhs).abs() < 1e-7 * (r.lhs.abs() + r.rhs.abs()) + 1e-12,
                        "{spec}: {}",
                        r.to_json()
                    );
                }
            }
        }
    }
}

#[test]
fn fund_est_lhs_is_nonnegative() {
    for spec in family() {
        let d = StarDomain::build(&spec, 96).unwrap();
        let s = solve_torsion(&d, 1.0).unwrap();
        let r = check_identity(&s, IdentityId::FundEst, d.center(), None).unwrap();
        assert!(r.lhs >= -1e-8, "{spec}: {}", r.lhs);
    }
}

#[test]
fn pohozaev_on_disks() {
    // |Du| = λR/2 on the disk of radius R, so the flux is 2π R (λR/2)³
    for r in [0.7, 1.0, 1.6] {
        let d = StarDomain::build(&ShapeSpec::Circle { radius: r }, 64).unwrap();
        let s = solve_torsion(&d, 1.0).unwrap();
        let p = check_identity(&s, IdentityId::Pohozaev, Vec2::zeros(), None).unwrap();
        let flux = 2.0 * std::f64::consts::PI * r * (s.lambda * r / 2.0).powi(3);
        assert!((p.lhs - flux).abs() < 1e-9 * flux);
        assert!((p.rhs - 2.0 * s.lambda * s.lambda).abs() < 1e-9 * p.rhs);
    }
}

#[test]
fn cube_residual_is_independent_of_x0() {
    let spec: ShapeSpec = "fourier(1,[(3,0.1),(5,0.03)])".parse().unwrap();
    let s = solve_torsion(&StarDomain::build(&spec, 128).unwrap(), 1.0).unwrap();
    let a = check_identity(&s, IdentityId::Cube, Vec2::zeros(), None).unwrap();
    let b = check_identity(&s, IdentityId::Cube, Vec2::new(0.4, 0.3), None).unwrap();
    assert!((a.lhs - b.lhs).abs() < 1e-14);
    assert!(a.residual < 1e-10 && b.residual < 1e-10);
}

#[test]
fn reports_serialize_to_json() {
    let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 32).unwrap();
    let s = solve_torsion(&d, 1.0).unwrap();
    let r = check_identity(&s, IdentityId::Pohozaev, Vec2::zeros(), None).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["id"], "pohozaev");
    assert_eq!(v["pass"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn too_close_quadrature_is_rejected_for_hessians() {
    let d = StarDomain::build(&ShapeSpec::Circle { radius: 1.0 }, 32).unwrap();
    let s = solve_torsion(&d, 1.0).unwrap();
    let opts = IdentityOptions {
        min_offset: 0.05,
        ..Default::default()
    };
    let ctx = IdentityContext::new(&s, opts).unwrap();
    assert!(ctx.check(IdentityId::KappaCube, Vec2::zeros(), None).is_err());
    assert!(ctx.check(IdentityId::Cube, Vec2::zeros(), None).is_ok());
}
