//! Run configuration in a plain `key = value` format.
//!
//! ```text
//! # comments start with '#'
//! vol = 1
//! shape = fourier(1,[(2,0.1)])
//! law = quadratic
//! t_end = 8
//! ```
//!
//! The token `rstar` inside a shape is replaced by the equilibrium radius for `vol`.

use std::collections::HashSet;
use std::path::PathBuf;

use crate::dynamics::VelocityLaw;
use crate::error::{Error, Result};
use crate::geometry::{ShapeSpec, StarDomain, MIN_NODES};
use crate::stability::{ball_closed_forms, scaled_to_area};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub vol: f64,
    pub shape: ShapeSpec,
    pub law: VelocityLaw,
    /// Boundary nodes.
    pub m: usize,
    pub n_radial: usize,
    pub dt0: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub cfl: f64,
    pub adaptive: bool,
    pub filter_strength: f64,
    pub filter_order: i32,
    pub t_end: f64,
    /// Stop once `max |V_n|` falls below this; `0` disables the test.
    pub tol_stationary: f64,
    /// Allowed per-step energy increase before a step is rejected.
    pub j_slack: f64,
    /// Rescale the initial shape to `|Ω| = |B_{r*}|`.
    pub normalize_area: bool,
    /// Compute the asymmetry at every accepted step.
    pub track_asymmetry: bool,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            vol: 1.0,
            shape: ShapeSpec::Circle { radius: 1.0 },
            law: VelocityLaw::quadratic(),
            m: 128,
            n_radial: 32,
            dt0: 0.01,
            dt_max: 0.05,
            dt_min: 1e-6,
            cfl: 0.4,
            adaptive: true,
            filter_strength: 36.0,
            filter_order: 36,
            t_end: 10.0,
            tol_stationary: 1e-7,
            j_slack: 1e-10,
            normalize_area: false,
            track_asymmetry: true,
            snapshot_stride: 50,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

pub const KEYS: &[&str] = &[
    "vol",
    "shape",
    "law",
    "m",
    "n_radial",
    "dt0",
    "dt_max",
    "dt_min",
    "cfl",
    "adaptive",
    "filter_strength",
    "filter_order",
    "t_end",
    "tol_stationary",
    "j_slack",
    "normalize_area",
    "track_asymmetry",
    "snapshot_stride",
    "output_dir",
    "seed",
];

fn bad(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| bad(key, format!("'{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn positive(key: &str, v: &str) -> Result<f64> {
    let x = num(key, v)?;
    if x <= 0.0 {
        return Err(bad(key, format!("{x} must be positive")));
    }
    Ok(x)
}

fn nonnegative(key: &str, v: &str) -> Result<f64> {
    let x = num(key, v)?;
    if x < 0.0 {
        return Err(bad(key, format!("{x} must be nonnegative")));
    }
    Ok(x)
}

fn integer(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| bad(key, format!("'{v}' is not a nonnegative integer")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, format!("'{v}' is not a boolean"))),
    }
}

/// Parses a shape, substituting `rstar` with the equilibrium radius for `vol`.
pub fn parse_shape(text: &str, vol: f64) -> Result<ShapeSpec> {
    let text = if text.contains("rstar") {
        let r = ball_closed_forms(2, vol)?.r_star;
        text.replace("rstar", &format!("{r:.17e}"))
    } else {
        text.to_string()
    };
    text.parse::<ShapeSpec>()
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String, usize)> = Vec::new();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let k = k.trim().to_string();
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key '{k}'", lineno + 1)));
            }
            if !seen.insert(k.clone()) {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
            pairs.push((k, v.trim().to_string(), lineno + 1));
        }

        let mut cfg = ScenarioConfig::default();
        // vol first, the shape may depend on it
        if let Some((_, v, _)) = pairs.iter().find(|(k, _, _)| k == "vol") {
            cfg.vol = positive("vol", v)?;
        }
        for (k, v, _) in &pairs {
            let v = v.as_str();
            match k.as_str() {
                "vol" => {}
                "shape" => cfg.shape = parse_shape(v, cfg.vol).map_err(|e| bad(k, e))?,
                "law" => cfg.law = v.parse::<VelocityLaw>().map_err(|e| bad(k, e))?,
                "m" => cfg.m = integer(k, v)? as usize,
                "n_radial" => cfg.n_radial = integer(k, v)? as usize,
                "dt0" => cfg.dt0 = positive(k, v)?,
                "dt_max" => cfg.dt_max = positive(k, v)?,
                "dt_min" => cfg.dt_min = positive(k, v)?,
                "cfl" => cfg.cfl = positive(k, v)?,
                "adaptive" => cfg.adaptive = boolean(k, v)?,
                "filter_strength" => cfg.filter_strength = nonnegative(k, v)?,
                "filter_order" => cfg.filter_order = integer(k, v)? as i32,
                "t_end" => cfg.t_end = nonnegative(k, v)?,
                "tol_stationary" => cfg.tol_stationary = nonnegative(k, v)?,
                "j_slack" => cfg.j_slack = nonnegative(k, v)?,
                "normalize_area" => cfg.normalize_area = boolean(k, v)?,
                "track_asymmetry" => cfg.track_asymmetry = boolean(k, v)?,
                "snapshot_stride" => cfg.snapshot_stride = integer(k, v)? as usize,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "seed" => cfg.seed = integer(k, v)?,
                _ => unreachable!("keys are checked above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < MIN_NODES || self.m % 2 != 0 || self.m > 4096 {
            return Err(bad("m", format!("{} must be even and in [{MIN_NODES}, 4096]", self.m)));
        }
        if !(8..=256).contains(&self.n_radial) {
            return Err(bad("n_radial", format!("{} must be in [8, 256]", self.n_radial)));
        }
        if self.cfl > 2.0 {
            return Err(bad("cfl", format!("{} must be at most 2", self.cfl)));
        }
        if self.dt_min > self.dt0 || self.dt0 > self.dt_max {
            return Err(bad("dt0", "need dt_min <= dt0 <= dt_max"));
        }
        if !(2..=64).contains(&self.filter_order) || self.filter_order % 2 != 0 {
            return Err(bad("filter_order", "must be an even integer in [2, 64]"));
        }
        if self.snapshot_stride == 0 {
            return Err(bad("snapshot_stride", "must be at least 1"));
        }
        self.law.validate().map_err(|e| bad("law", e))?;
        Ok(())
    }

    /// The initial domain described by `shape`, `m` and `normalize_area`.
    pub fn initial_domain(&self) -> Result<StarDomain> {
        let d = StarDomain::build(&self.shape, self.m)?;
        if self.normalize_area {
            let r = ball_closed_forms(2, self.vol)?.r_star;
            scaled_to_area(&d, std::f64::consts::PI * r * r)
        } else {
            Ok(d)
        }
    }
}
