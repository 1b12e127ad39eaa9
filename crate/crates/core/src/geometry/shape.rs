use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Declarative shape families. Radii are expressed about the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeSpec {
    Circle { radius: f64 },
    /// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y).
    Ellipse { a: f64, b: f64 },
    /// `r(θ) = base (1 + Σ ε_k cos kθ)`.
    Fourier { base: f64, modes: Vec<(u32, f64)> },
    /// Explicit radii at uniform angles.
    Samples(Vec<f64>),
}

impl ShapeSpec {
    pub fn radius(&self, theta: f64) -> f64 {
        match self {
            ShapeSpec::Circle { radius } => *radius,
            ShapeSpec::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                a * b / (b * b * c * c + a * a * s * s).sqrt()
            }
            ShapeSpec::Fourier { base, modes } => {
                base * (1.0
                    + modes
                        .iter()
                        .map(|&(k, eps)| eps * (k as f64 * theta).cos())
                        .sum::<f64>())
            }
            ShapeSpec::Samples(r) => {
                crate::spectral::TrigSeries::from_samples(r).eval(theta)
            }
        }
    }

    /// Same shape with every length multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        match self {
            ShapeSpec::Circle { radius } => ShapeSpec::Circle { radius: radius * t },
            ShapeSpec::Ellipse { a, b } => ShapeSpec::Ellipse { a: a * t, b: b * t },
            ShapeSpec::Fourier { base, modes } => ShapeSpec::Fourier {
                base: base * t,
                modes: modes.clone(),
            },
            ShapeSpec::Samples(r) => ShapeSpec::Samples(r.iter().map(|v| v * t).collect()),
        }
    }

    /// Exact enclosed area where a closed form exists.
    pub fn exact_area(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match self {
            ShapeSpec::Circle { radius } => Some(PI * radius * radius),
            ShapeSpec::Ellipse { a, b } => Some(PI * a * b),
            ShapeSpec::Fourier { base, modes } => {
                // ½∫(1 + Σ ε_k cos kθ)² dθ, modes assumed distinct and nonzero
                let mut s = 1.0;
                for &(k, eps) in modes {
                    if k == 0 {
                        return None;
                    }
                    s += 0.5 * eps * eps;
                }
                Some(PI * base * base * s)
            }
            ShapeSpec::Samples(_) => None,
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Circle { radius } => write!(f, "circle({radius})"),
            ShapeSpec::Ellipse { a, b } => write!(f, "ellipse({a},{b})"),
            ShapeSpec::Fourier { base, modes } => {
                write!(f, "fourier({base},[")?;
                for (i, (k, e)) in modes.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "({k},{e})")?;
                }
                write!(f, "])")
            }
            ShapeSpec::Samples(r) => write!(f, "samples[{}]", r.len()),
        }
    }
}

fn parse_number(s: &str) -> Result<f64, Error> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidShape(format!("'{s}' is not a number")))
}

/// Parses `circle(R)`, `ellipse(a,b)`, `fourier(R,[(k,eps),...])`, `samples(r0,r1,...)`.
impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let open = compact
            .find('(')
            .ok_or_else(|| Error::InvalidShape(format!("missing '(' in '{s}'")))?;
        if !compact.ends_with(')') {
            return Err(Error::InvalidShape(format!("missing ')' in '{s}'")));
        }
        let name = compact[..open].to_ascii_lowercase();
        let body = &compact[open + 1..compact.len() - 1];
        match name.as_str() {
            "circle" | "disk" => Ok(ShapeSpec::Circle {
                radius: parse_number(body)?,
            }),
            "ellipse" => {
                let parts: Vec<&str> = body.split(',').collect();
                if parts.len() != 2 {
                    return Err(Error::InvalidShape(format!("ellipse needs two semi-axes: '{s}'")));
                }
                Ok(ShapeSpec::Ellipse {
                    a: parse_number(parts[0])?,
                    b: parse_number(parts[1])?,
                })
            }
            "fourier" => {
                let comma = body
                    .find(',')
                    .ok_or_else(|| Error::InvalidShape(format!("fourier needs a mode list: '{s}'")))?;
                let base = parse_number(&body[..comma])?;
                let list = body[comma + 1..]
                    .strip_prefix('[')
                    .and_then(|l| l.strip_suffix(']'))
                    .ok_or_else(|| Error::InvalidShape(format!("mode list must be bracketed: '{s}'")))?;
                let mut modes = Vec::new();
                for item in list.split("),") {
                    let item = item.trim_start_matches('(').trim_end_matches(')');
                    if item.is_empty() {
                        continue;
                    }
                    let (k, e) = item
                        .split_once(',')
                        .ok_or_else(|| Error::InvalidShape(format!("bad mode '{item}'")))?;
                    let k: u32 = k
                        .parse()
                        .map_err(|_| Error::InvalidShape(format!("bad mode index '{k}'")))?;
                    modes.push((k, parse_number(e)?));
                }
                Ok(ShapeSpec::Fourier { base, modes })
            }
            "samples" => {
                let r = body
                    .split(',')
                    .map(parse_number)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ShapeSpec::Samples(r))
            }
            _ => Err(Error::InvalidShape(format!("unknown shape family '{name}'"))),
        }
    }
}
