use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn droplet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_droplet"))
        .args(args)
        .current_dir(dir)
        .env_remove("DROPLET_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_equilibrium_is_stationary() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eq.cfg"), "shape = circle(rstar)\nt_end = 1\nm = 64\noutput_dir = out\n").unwrap();
    let o = droplet(&["run", "eq.cfg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "stationary");
    assert_eq!(summary["t_final"], 0.0);
    assert_eq!(summary["decay_fit"], "no decay signal");
    assert!(dir.path().join("out/snapshots/step_000000.csv").exists());
}

#[test]
fn velocity_law_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "law = poly(1,2)\n").unwrap();
    let o = droplet(&["run", "bad.cfg"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("velocity law rejected"), "{}", stderr(&o));

    fs::write(dir.path().join("typo.cfg"), "t_ned = 3\n").unwrap();
    let o = droplet(&["run", "typo.cfg"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("t_ned"));
    assert_eq!(code(&droplet(&["run", "missing.cfg"], dir.path())), 2);
}

#[test]
fn perturbed_run_writes_monotone_series() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.cfg"),
        "shape = fourier(1,[(2,0.1)])\nnormalize_area = true\nt_end = 0.3\nm = 64\ntrack_asymmetry = false\nsnapshot_stride = 10\n",
    )
    .unwrap();
    let out = dir.path().join("elsewhere");
    let o = droplet(&["run", "p.cfg", "--output-dir", out.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,J,lambda,deficit,asymmetry,max_Vn,dt"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 10);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][1] <= w[0][1] + 1e-10);
    }
    let snaps = fs::read_dir(out.join("snapshots")).unwrap().count();
    assert!(snaps >= 2);
    // identical config, identical bytes
    let out2 = dir.path().join("again");
    droplet(&["run", "p.cfg", "--output-dir", out2.to_str().unwrap()], dir.path());
    assert_eq!(fs::read_to_string(out2.join("timeseries.csv")).unwrap(), csv);
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eq.cfg"), "shape = circle(rstar)\nm = 32\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_droplet"))
        .args(["run", "eq.cfg"])
        .current_dir(dir.path())
        .env("DROPLET_OUTPUT_DIR", "from_env")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("from_env/summary.json").exists());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["verify", "circle(rstar)", "fourier(1,[(3,0.1)])"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let table = stdout(&o);
    assert!(table.contains("pohozaev") && table.contains("trace[") && !table.contains(" NO"));
    assert_eq!(code(&droplet(&["verify"], dir.path())), 2);
    assert_eq!(code(&droplet(&["verify", "blob(3)"], dir.path())), 2);

    let o = droplet(&["verify", "--json", "ellipse(1.2,0.8)"], dir.path());
    assert_eq!(code(&o), 0);
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn under_resolved_domain_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["verify", "--m", "32", "fourier(1,[(3,0.2),(5,0.05)])"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("failing identities") && stderr(&o).contains("pohozaev"));
    assert!(stdout(&o).contains(" NO"));
}

#[test]
fn stability_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["stability", "--modes", "2,3", "--eps", "0.05,0.1", "--m", "64", "-o", "sweep.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    // merged in (k, ε) order regardless of completion order
    let keys: Vec<(u32, f64)> = rows
        .iter()
        .map(|r| {
            let rest: Vec<&str> = r.rsplit_once("\",").unwrap().1.split(',').collect();
            (rest[0].parse().unwrap(), rest[1].parse().unwrap())
        })
        .collect();
    assert_eq!(keys, vec![(2, 0.05), (2, 0.1), (3, 0.05), (3, 0.1)]);
    assert!(rows.iter().all(|r| r.ends_with(",ok")));

    let o = droplet(&["stability", "--shape", "circle(rstar)", "--m", "64"], dir.path());
    assert_eq!(code(&o), 0);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.contains("degenerate-equal"), "{row}");

    let o = droplet(&["stability", "--modes", "3", "--eps", "0.5", "--m", "64"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("halted"));
}

#[test]
fn ball_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["ball"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["r_star"].as_f64().unwrap() - 1.083852).abs() < 1e-6);
    assert!((v["lambda_star"].as_f64().unwrap() - 1.8452701486).abs() < 1e-9);
    let o = droplet(&["ball", "--n", "3"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = v["r_star"].as_f64().unwrap();
    assert!((r.powi(4) - 5.0 / (4.0 * std::f64::consts::PI / 3.0)).abs() < 1e-12);
    assert_eq!(code(&droplet(&["ball", "--vol", "0"], dir.path())), 2);
}
