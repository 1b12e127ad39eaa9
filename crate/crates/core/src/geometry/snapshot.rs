//! Domain snapshot files: CSV with header `theta,r`, one row per node.

use std::fmt::Write as _;

use super::{StarDomain, Vec2};
use crate::error::{Error, Result};

pub const HEADER: &str = "theta,r";

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(d: &StarDomain) -> String {
    let mut out = String::with_capacity(40 * d.len());
    out.push_str(HEADER);
    out.push('\n');
    for (t, r) in d.angles().iter().zip(d.radii()) {
        let _ = writeln!(out, "{},{}", fmt17(*t), fmt17(*r));
    }
    out
}

/// Parses a snapshot; the angles must be the uniform grid `2πj/M`.
pub fn read_snapshot(text: &str, center: Vec2) -> Result<StarDomain> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(Error::InvalidShape(format!(
                "snapshot header must be '{HEADER}', found {other:?}"
            )))
        }
    }
    let mut thetas = Vec::new();
    let mut radii = Vec::new();
    for (i, line) in lines.enumerate() {
        let (t, r) = line
            .split_once(',')
            .ok_or_else(|| Error::InvalidShape(format!("row {i}: expected two columns")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidShape(format!("row {i}: bad number '{s}'")))
        };
        thetas.push(parse(t)?);
        radii.push(parse(r)?);
    }
    let m = radii.len();
    for (j, t) in thetas.iter().enumerate() {
        let expected = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        if (t - expected).abs() > 1e-12 {
            return Err(Error::InvalidShape(format!(
                "row {j}: angle {t} is not on the uniform grid"
            )));
        }
    }
    StarDomain::new(center, radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShapeSpec;
    use proptest::prelude::*;

    #[test]
    fn header_and_precision() {
        let d = StarDomain::build(&ShapeSpec::Ellipse { a: 1.2, b: 0.8 }, 16).unwrap();
        let text = write_snapshot(&d);
        assert!(text.starts_with("theta,r\n"));
        assert_eq!(text.lines().count(), 17);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, "0.0000000000000000e0,1.2000000000000000e0");
        assert!(read_snapshot("t,r\n0,1\n", Vec2::zeros()).is_err());
    }

    proptest! {
        #[test]
        fn snapshot_round_trips_bit_exactly(
            radii in proptest::collection::vec(0.1f64..10.0, 8..40)
        ) {
            let mut r = radii.clone();
            if r.len() % 2 == 1 { r.pop(); }
            while r.len() < 16 { r.extend_from_slice(&radii[..2]); }
            let d = StarDomain::new(Vec2::zeros(), r).unwrap();
            let back = read_snapshot(&write_snapshot(&d), Vec2::zeros()).unwrap();
            prop_assert_eq!(back.radii(), d.radii());
        }
    }
}
