//! Browser bindings: solve a shape, step the flow, print ball closed forms.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are callable natively; the `#[wasm_bindgen]` wrappers only convert errors.

use droplet_core::dynamics::{advance_step_with, FlowState, StepOptions, VelocityLaw};
use droplet_core::scenario::parse_shape;
use droplet_core::stability::{ball_closed_forms, scaled_to_area};
use droplet_core::StarDomain;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Node limits keep a single solve interactive.
const M_RANGE: (usize, usize) = (16, 256);

fn domain(spec: &str, m: usize, vol: f64, normalize: bool) -> Result<StarDomain, String> {
    if !(M_RANGE.0..=M_RANGE.1).contains(&m) {
        return Err(format!("node count {m} outside [{}, {}]", M_RANGE.0, M_RANGE.1));
    }
    let shape = parse_shape(spec, vol).map_err(|e| e.to_string())?;
    let d = StarDomain::build(&shape, m).map_err(|e| e.to_string())?;
    if normalize {
        let r = ball_closed_forms(2, vol).map_err(|e| e.to_string())?.r_star;
        scaled_to_area(&d, std::f64::consts::PI * r * r).map_err(|e| e.to_string())
    } else {
        Ok(d)
    }
}

fn state_json(s: &FlowState, r_star: f64) -> Value {
    let g = &s.solution.geometry;
    let d = &s.diagnostics;
    json!({
        "t": s.t,
        "x": g.points.iter().map(|p| p.x).collect::<Vec<_>>(),
        "y": g.points.iter().map(|p| p.y).collect::<Vec<_>>(),
        "grad": s.solution.boundary_grad.values,
        "lambda": d.lambda,
        "energy": d.energy,
        "deficit": d.deficit,
        "max_vn": d.max_vn,
        "area": d.area,
        "r_star": r_star,
    })
}

const VIEW: StepOptions = StepOptions {
    filter_strength: 36.0,
    filter_order: 36,
    track_asymmetry: false,
};

/// Boundary nodes, `|Du|` and scalar diagnostics of the torsion solution.
pub fn solve_shape_json(spec: &str, m: usize, vol: f64) -> Result<String, String> {
    let d = domain(spec, m, vol, false)?;
    let s = FlowState::new(0.0, d, vol, &VelocityLaw::quadratic(), &VIEW).map_err(|e| e.to_string())?;
    let r_star = ball_closed_forms(2, vol).map_err(|e| e.to_string())?.r_star;
    Ok(state_json(&s, r_star).to_string())
}

pub fn ball_json(n: usize, vol: f64) -> Result<String, String> {
    let b = ball_closed_forms(n, vol).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(b).map_err(|e| e.to_string())?;
    v["j_second_derivative_at_r_star"] = json!(b.j_second_derivative(b.r_star));
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn solve_shape(spec: &str, m: usize, vol: f64) -> Result<String, JsValue> {
    solve_shape_json(spec, m, vol).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ball_quantities(n: usize, vol: f64) -> Result<String, JsValue> {
    ball_json(n, vol).map_err(|e| JsValue::from_str(&e))
}

/// Flow under a chosen velocity law, stepped on demand.
#[wasm_bindgen]
pub struct FlowStepper {
    state: FlowState,
    law: VelocityLaw,
    r_star: f64,
    cfl: f64,
}

impl FlowStepper {
    pub fn create(spec: &str, m: usize, vol: f64, law: &str) -> Result<FlowStepper, String> {
        let law: VelocityLaw = law.parse().map_err(|e: droplet_core::Error| e.to_string())?;
        let d = domain(spec, m, vol, true)?;
        let state = FlowState::new(0.0, d, vol, &law, &VIEW).map_err(|e| e.to_string())?;
        Ok(FlowStepper {
            state,
            law,
            r_star: ball_closed_forms(2, vol).map_err(|e| e.to_string())?.r_star,
            cfl: 0.4,
        })
    }

    /// Advances `steps` CFL-limited steps and returns the new state.
    pub fn advance(&mut self, steps: u32) -> Result<String, String> {
        for _ in 0..steps {
            let dt = self.state.cfl_step(&self.law, self.cfl);
            self.state = advance_step_with(&self.state, dt, &self.law, &VIEW).map_err(|e| e.to_string())?;
        }
        Ok(self.state_json())
    }

    pub fn state_json(&self) -> String {
        state_json(&self.state, self.r_star).to_string()
    }
}

#[wasm_bindgen]
impl FlowStepper {
    /// Starts from `spec` rescaled to the equilibrium area.
    #[wasm_bindgen(constructor)]
    pub fn new(spec: &str, m: usize, vol: f64, law: &str) -> Result<FlowStepper, JsValue> {
        FlowStepper::create(spec, m, vol, law).map_err(|e| JsValue::from_str(&e))
    }

    pub fn step(&mut self, steps: u32) -> Result<String, JsValue> {
        self.advance(steps).map_err(|e| JsValue::from_str(&e))
    }

    pub fn state(&self) -> String {
        self.state_json()
    }
}
