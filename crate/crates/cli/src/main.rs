//! Command-line driver: flow runs, identity verification, stability sweeps
//! and ball closed forms.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 runtime halt.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use droplet_core::dynamics::{dissipation_residuals, fit_decay_rate, run_flow, Trajectory, DEFAULT_DECAY_WINDOW};
use droplet_core::geometry::snapshot::write_snapshot;
use droplet_core::geometry::{rho_reflection_min, ReflectionOptions};
use droplet_core::identities::{HarmonicTest, IdentityContext, IdentityId, IdentityOptions, IdentityReport};
use droplet_core::scenario::{parse_shape, ScenarioConfig};
use droplet_core::stability::{ball_closed_forms, normalized_mode_domain, stability_report, SWEEP_HEADER};
use droplet_core::{solve_torsion, Error, StarDomain};

/// Overrides the output directory of `run` when set.
const OUTPUT_ENV: &str = "DROPLET_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "droplet", version, about = "Quasi-static droplet flow and Serrin stability diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow from a config file; writes timeseries.csv, snapshots/ and summary.json.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and DROPLET_OUTPUT_DIR).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check every integral identity on each domain.
    Verify {
        #[arg(required = true, num_args = 1..)]
        shapes: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        vol: f64,
        #[arg(long, default_value_t = 128)]
        m: usize,
        #[arg(long, default_value_t = 32)]
        n_radial: usize,
        /// Print one JSON report per line instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Stability sweep over single-mode perturbations, or reports for given shapes.
    Stability {
        /// Mode numbers of the sweep.
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4])]
        modes: Vec<u32>,
        /// Amplitudes; defaults to 0.02, 0.04, ..., 0.2.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Explicit shapes instead of the sweep (the token `rstar` is substituted).
        #[arg(long = "shape")]
        shapes: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        vol: f64,
        #[arg(long, default_value_t = 128)]
        m: usize,
        /// CSV destination; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print ball closed forms as JSON.
    Ball {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        vol: f64,
    },
}

/// A failed command with its exit code.
struct Exit(u8, String);

impl Exit {
    fn config(msg: impl std::fmt::Display) -> Self {
        Exit(2, msg.to_string())
    }

    fn halt(msg: impl std::fmt::Display) -> Self {
        Exit(3, msg.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run { config, output_dir } => cmd_run(&config, output_dir),
        Command::Verify {
            shapes,
            vol,
            m,
            n_radial,
            json,
        } => cmd_verify(&shapes, vol, m, n_radial, json),
        Command::Stability {
            modes,
            eps,
            shapes,
            vol,
            m,
            output,
        } => cmd_stability(&modes, &eps, &shapes, vol, m, output.as_deref()),
        Command::Ball { n, vol } => cmd_ball(n, vol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            eprintln!("droplet: {msg}");
            ExitCode::from(code)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    fs::write(path, text).map_err(|e| Exit::halt(format!("cannot write {}: {e}", path.display())))
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn run_summary(cfg: &ScenarioConfig, traj: &Trajectory) -> Value {
    let last = traj.samples.last().expect("trajectory has the initial sample");
    let d = &traj.final_state.diagnostics;
    let status = match (&traj.halt, traj.stationary) {
        (Some(_), _) => "halted",
        (None, true) => "stationary",
        (None, false) => "finished",
    };
    let decay = if cfg.track_asymmetry {
        match fit_decay_rate(&traj.times(), &traj.asymmetries(), DEFAULT_DECAY_WINDOW) {
            Ok(Some(fit)) => json!({"rate": fit.rate, "slope": fit.slope, "amplitude": fit.amplitude, "r2": fit.r2, "points": fit.points}),
            Ok(None) => json!("no decay signal"),
            Err(e) => json!(e.to_string()),
        }
    } else {
        json!("asymmetry not tracked")
    };
    let diss = dissipation_residuals(traj);
    json!({
        "status": status,
        "halt": traj.halt.as_ref().map(|h| json!({"t": h.t, "reason": h.reason})),
        "law": traj.law.to_string(),
        "vol": traj.vol,
        "shape": cfg.shape.to_string(),
        "m": cfg.m,
        "steps": traj.samples.len() - 1,
        "rejected_steps": traj.rejected_steps,
        "t_final": last.t,
        "final": {
            "energy": d.energy,
            "lambda": d.lambda,
            "deficit": d.deficit,
            "asymmetry": finite(d.asymmetry),
            "max_vn": d.max_vn,
            "area": d.area,
        },
        "j_star": ball_closed_forms(2, traj.vol).map(|b| b.j_star).ok(),
        "decay_fit": decay,
        "dissipation": {
            "fraction_below_5pct": diss.fraction_below(0.05),
            "median_relative": diss.median_relative(),
            "cumulative_relative": diss.cumulative_relative,
        },
    })
}

fn cmd_run(path: &Path, output_dir: Option<PathBuf>) -> Result<(), Exit> {
    let text = fs::read_to_string(path).map_err(|e| Exit::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ScenarioConfig::parse(&text).map_err(Exit::config)?;
    if let Some(dir) = output_dir.or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from)) {
        cfg.output_dir = dir;
    }
    let traj = run_flow(&cfg).map_err(|e| match e {
        Error::Config(_) | Error::VelocityLaw(_) | Error::InvalidShape(_) | Error::NonPositiveRadius { .. } | Error::BadNodeCount(_) => {
            Exit::config(e)
        }
        other => Exit::halt(format!("initial state: {other}")),
    })?;

    let out = &cfg.output_dir;
    let snaps = out.join("snapshots");
    fs::create_dir_all(&snaps).map_err(|e| Exit::halt(format!("cannot create {}: {e}", snaps.display())))?;
    write(&out.join("timeseries.csv"), &traj.csv())?;
    for (step, state) in &traj.snapshots {
        write(&snaps.join(format!("step_{step:06}.csv")), &write_snapshot(&state.domain))?;
    }
    let summary = run_summary(&cfg, &traj);
    write(&out.join("summary.json"), &serde_json::to_string_pretty(&summary).expect("json"))?;
    println!("{}", serde_json::to_string(&summary).expect("json"));
    match &traj.halt {
        Some(h) => Err(Exit::halt(format!("halted at t = {}: {}", h.t, h.reason))),
        None => Ok(()),
    }
}

fn verify_domain(spec: &str, vol: f64, m: usize, n_radial: usize) -> Result<Vec<(String, Result<IdentityReport, Error>)>, Exit> {
    let shape = parse_shape(spec, vol).map_err(Exit::config)?;
    let d = StarDomain::build(&shape, m).map_err(Exit::config)?;
    let s = solve_torsion(&d, vol).map_err(|e| Exit::halt(format!("{spec}: {e}")))?;
    let opts = IdentityOptions {
        n_radial,
        label: Some(spec.to_string()),
        ..Default::default()
    };
    let x0 = d.center();
    let ctx = match IdentityContext::new(&s, opts) {
        Ok(c) => c,
        Err(e) => {
            return Ok(IdentityId::ALL.iter().map(|id| (id.name().to_string(), Err(e.clone()))).collect());
        }
    };
    let mut out = Vec::new();
    for id in IdentityId::ALL {
        if id == IdentityId::Trace {
            for f in HarmonicTest::family(4, x0) {
                out.push((format!("trace[{f}]"), ctx.check(id, x0, Some(f))));
            }
        } else {
            out.push((id.name().to_string(), ctx.check(id, x0, None)));
        }
    }
    Ok(out)
}

fn cmd_verify(shapes: &[String], vol: f64, m: usize, n_radial: usize, json_out: bool) -> Result<(), Exit> {
    if shapes.is_empty() {
        return Err(Exit::config("usage: droplet verify <SHAPE>..."));
    }
    if !(vol > 0.0) || !vol.is_finite() {
        return Err(Exit::config(format!("vol {vol} must be positive")));
    }
    let mut failed = Vec::new();
    if !json_out {
        println!("{:<34} {:<30} {:>12} {:>8}  pass", "domain", "identity", "residual", "tol");
    }
    for spec in shapes {
        for (name, res) in verify_domain(spec, vol, m, n_radial)? {
            match res {
                Ok(r) => {
                    if json_out {
                        println!("{}", r.to_json());
                    } else {
                        println!(
                            "{:<34} {:<30} {:>12.3e} {:>8.0e}  {}",
                            spec,
                            name,
                            r.residual,
                            r.tolerance,
                            if r.pass { "yes" } else { "NO" }
                        );
                    }
                    if !r.pass {
                        failed.push(format!("{spec}: {name}"));
                    }
                }
                Err(e) => {
                    if json_out {
                        println!("{}", json!({"label": spec, "id": name, "pass": false, "error": e.to_string()}));
                    } else {
                        println!("{:<34} {:<30} {:>12} {:>8}  NO ({e})", spec, name, "-", "-");
                    }
                    failed.push(format!("{spec}: {name}"));
                }
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Exit(1, format!("failing identities: {}", failed.join(", "))))
    }
}

/// One sweep member: a report row, or why it has none.
struct Member {
    shape: String,
    k: u32,
    eps: f64,
    row: Result<String, String>,
    /// The domain has no ball `B_ρ(0)` it is star-shaped about.
    lost_star_margin: bool,
}

fn sweep_member(shape: String, k: u32, eps: f64, d: droplet_core::Result<StarDomain>, vol: f64) -> Member {
    let d = match d {
        Ok(d) => d,
        Err(e) => {
            return Member {
                shape,
                k,
                eps,
                row: Err(e.to_string()),
                lost_star_margin: false,
            }
        }
    };
    let lost = rho_reflection_min(&d, ReflectionOptions::default())
        .map(|r| r.star_radius.is_none())
        .unwrap_or(true);
    let row = stability_report(&d, vol)
        .map(|r| {
            format!(
                "{:.16e},{:.16e},{},{:.16e},{},{:.16e}",
                r.asymmetry, r.deficit, r.ratio_thm1, r.fk_gap, r.fk_cor_ratio, r.l2_lhs
            )
        })
        .map_err(|e| e.to_string());
    Member {
        shape,
        k,
        eps,
        row,
        lost_star_margin: lost,
    }
}

fn quote(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

fn cmd_stability(
    modes: &[u32],
    eps: &[f64],
    shapes: &[String],
    vol: f64,
    m: usize,
    output: Option<&Path>,
) -> Result<(), Exit> {
    if !(vol > 0.0) || !vol.is_finite() {
        return Err(Exit::config(format!("vol {vol} must be positive")));
    }
    let mut jobs: Vec<(String, u32, f64, Option<String>)> = Vec::new();
    if shapes.is_empty() {
        let amps: Vec<f64> = if eps.is_empty() {
            (1..=10).map(|i| 0.02 * i as f64).collect()
        } else {
            eps.to_vec()
        };
        for &k in modes {
            for &e in &amps {
                jobs.push((format!("fourier(1,[({k},{e})])"), k, e, None));
            }
        }
    } else {
        for s in shapes {
            parse_shape(s, vol).map_err(Exit::config)?;
            jobs.push((s.clone(), 0, 0.0, Some(s.clone())));
        }
    }
    if jobs.is_empty() {
        return Err(Exit::config("nothing to sweep"));
    }
    // members are independent; collect() keeps the (k, ε) order of `jobs`
    let members: Vec<Member> = jobs
        .into_par_iter()
        .map(|(shape, k, e, explicit)| {
            let d = match explicit {
                Some(s) => parse_shape(&s, vol).and_then(|spec| StarDomain::build(&spec, m)),
                None => normalized_mode_domain(k, e, vol, m),
            };
            sweep_member(shape, k, e, d, vol)
        })
        .collect();

    let mut csv = format!("{SWEEP_HEADER},status\n");
    let mut bad = Vec::new();
    for mb in &members {
        let status = match (&mb.row, mb.lost_star_margin) {
            (Err(e), _) => format!("failed: {}", e.replace(',', ";")),
            (Ok(_), true) => "halted: lost star margin".to_string(),
            (Ok(_), false) => "ok".to_string(),
        };
        let values = match &mb.row {
            Ok(v) => v.clone(),
            Err(_) => vec!["nan"; 6].join(","),
        };
        if status != "ok" {
            bad.push(format!("{} ({status})", mb.shape));
        }
        csv.push_str(&format!("{},{},{},{values},{status}\n", quote(&mb.shape), mb.k, mb.eps));
    }
    match output {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Exit::halt(format!("{} sweep members halted or failed: {}", bad.len(), bad.join(", "))))
    }
}

fn cmd_ball(n: usize, vol: f64) -> Result<(), Exit> {
    let b = ball_closed_forms(n, vol).map_err(Exit::config)?;
    let mut v = serde_json::to_value(b).expect("json");
    v["j_second_derivative_at_r_star"] = json!(b.j_second_derivative(b.r_star));
    v["j_second_derivative_vol_only_at_r_star"] = json!(b.j_second_derivative_printed(b.r_star));
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    Ok(())
}
