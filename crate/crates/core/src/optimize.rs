//! Derivative-free minimization over planar points.

use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy)]
pub struct CompassOptions {
    pub initial_step: f64,
    /// Stop once the pattern step falls below this length.
    pub min_step: f64,
    pub max_evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum {
    pub point: Vec2,
    pub value: f64,
    pub evaluations: usize,
}

/// Compass (coordinate pattern) search with step halving.
pub fn compass_search(
    mut f: impl FnMut(Vec2) -> f64,
    start: Vec2,
    opts: CompassOptions,
) -> Result<Minimum> {
    let dirs = [
        Vec2::new(1.0, 0.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(0.0, -1.0),
        Vec2::new(1.0, 1.0) / 2f64.sqrt(),
        Vec2::new(-1.0, -1.0) / 2f64.sqrt(),
        Vec2::new(1.0, -1.0) / 2f64.sqrt(),
        Vec2::new(-1.0, 1.0) / 2f64.sqrt(),
    ];
    let mut best = start;
    let mut best_val = f(start);
    let mut evals = 1;
    let mut step = opts.initial_step;
    while step >= opts.min_step {
        if evals >= opts.max_evaluations {
            return Err(Error::NoConvergence {
                evaluations: evals,
                best_value: best_val,
                best_point: best,
            });
        }
        let mut improved = false;
        for d in &dirs {
            let trial = best + d * step;
            let v = f(trial);
            evals += 1;
            if v < best_val {
                best_val = v;
                best = trial;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(Minimum {
        point: best,
        value: best_val,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let target = Vec2::new(0.3, -0.17);
        let m = compass_search(
            |p| (p - target).norm_squared(),
            Vec2::zeros(),
            CompassOptions {
                initial_step: 0.1,
                min_step: 1e-12,
                max_evaluations: 10_000,
            },
        )
        .unwrap();
        assert!((m.point - target).norm() < 1e-10);
        assert!(m.value < 1e-20);
    }

    #[test]
    fn budget_exhaustion_reports_best_point() {
        let err = compass_search(
            |p| p.norm(),
            Vec2::new(1.0, 1.0),
            CompassOptions {
                initial_step: 1e-3,
                min_step: 1e-14,
                max_evaluations: 5,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { evaluations: 5, .. }));
    }
}
