//! End-to-end tests of the binary: exit codes, file outputs, determinism,
//! and the printed-precision round trip of the CSV artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cgl::criteria::{check_mz, check_structural};
use cgl::domain::Params;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cgl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn ode_blowup_and_global_cases() {
    let out = run(&[
        "ode", "--v0", "1", "--theta", "0", "--alpha", "2", "--gamma", "0",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("BlowsUp t*=0.5"), "{}", stdout(&out));

    let out = run(&[
        "ode", "--v0", "0", "--theta", "0.3", "--alpha", "2", "--gamma", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Global (zero)"));

    let out = run(&[
        "ode", "--v0", "0.5", "--theta", "0", "--alpha", "1", "--gamma", "-1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).trim().ends_with("Global"));

    let out = run(&[
        "ode", "--v0", "1", "--theta", "0", "--alpha", "2", "--gamma", "0", "--times", "0.25",
    ]);
    assert!(stdout(&out).contains("0.25,1.414213562373095"));

    let out = run(&[
        "ode", "--v0", "nope", "--theta", "0", "--alpha", "2", "--gamma", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_constant_blowup_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "run.cfg",
        &format!(
            "theta = 0\nalpha = 2\ngamma = 0\ndim = 1\n\
             controls.t_max = 1.0\ncontrols.tol = 1e-9\ncontrols.record_every = 4\n\
             initial.kind = constant\ninitial.value_re = 1.0\n\
             outputs = {}\nmonitors = mass,energy,pos\n",
            out_dir.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let outcome = fs::read_to_string(out_dir.join("outcome.txt")).unwrap();
    assert!(outcome.contains("kind = BlowupDetected"), "{outcome}");
    let t_star: f64 = outcome
        .lines()
        .find_map(|l| l.strip_prefix("t_star = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((t_star - 0.5).abs() <= 0.01, "t* = {t_star}");
    assert!(out_dir.join("series.csv").exists());
    assert!(out_dir.join("monitor_mass.txt").exists());
    assert!(out_dir.join("monitor_energy.txt").exists());
    // gamma = 0 run: the driven-convexity monitor refuses and says so
    let pos = fs::read_to_string(out_dir.join("monitor_pos.txt")).unwrap();
    assert!(pos.contains("refused"), "{pos}");

    let series = fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert!(
        series.starts_with("t,mass,energy,variational,grad_sq,sup_norm,ut_sq,re_inner,im_inner\n")
    );
}

#[test]
fn simulate_small_data_decays_and_zero_is_immediate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "decay.cfg",
        &format!(
            "theta = 0.3\nalpha = 1\ngamma = -0.5\ndim = 1\n\
             controls.t_max = 20\ncontrols.record_every = 8\n\
             initial.kind = gaussian\ninitial.amplitude_re = 1e-6\ninitial.width = 1\n\
             outputs = {}\n",
            out_dir.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert!(out.status.success());
    let outcome = fs::read_to_string(out_dir.join("outcome.txt")).unwrap();
    assert!(outcome.contains("kind = Decayed"), "{outcome}");

    let out_dir2 = dir.path().join("out0");
    let cfg = write_config(
        dir.path(),
        "zero.cfg",
        &format!(
            "theta = 0\nalpha = 2\ngamma = 0\ninitial.kind = constant\ninitial.value_re = 0\n\
             outputs = {}\n",
            out_dir2.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert!(out.status.success());
    let outcome = fs::read_to_string(out_dir2.join("outcome.txt")).unwrap();
    assert!(outcome.contains("kind = Decayed"));
    assert!(outcome.contains("t_end = 0"));
    let series = fs::read_to_string(out_dir2.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 2, "only the t = 0 record: {series}");
}

#[test]
fn simulate_is_deterministic_and_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let cfg = write_config(
            dir.path(),
            &format!("{name}.cfg"),
            &format!(
                "theta = 0.4\nalpha = 2\ngamma = -0.3\ndim = 1\n\
                 controls.t_max = 0.4\ncontrols.record_every = 2\n\
                 initial.kind = random\ninitial.seed = 7\ninitial.max_mode = 6\ninitial.amplitude = 0.8\n\
                 outputs = {}\n",
                out_dir.display()
            ),
        );
        let out = run(&["simulate", &cfg]);
        assert!(out.status.success());
        outputs.push(fs::read_to_string(out_dir.join("series.csv")).unwrap());
    }
    assert_eq!(
        outputs[0], outputs[1],
        "identical configs must produce identical bytes"
    );

    // shortest round-trip printing: parse every float and re-print it
    let mut rebuilt =
        String::from("t,mass,energy,variational,grad_sq,sup_norm,ut_sq,re_inner,im_inner\n");
    for line in outputs[0].lines().skip(1) {
        let fields: Vec<String> = line
            .split(',')
            .map(|s| format!("{}", s.parse::<f64>().expect("parses")))
            .collect();
        rebuilt.push_str(&fields.join(","));
        rebuilt.push('\n');
    }
    assert_eq!(
        outputs[0], rebuilt,
        "printed precision must survive a parse"
    );
}

#[test]
fn check_reports_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "check.cfg",
        "theta = 0.1\nalpha = 2\ngamma = -0.2\ndim = 1\n\
         initial.kind = gaussian\ninitial.amplitude_re = 2.87\ninitial.width = 1\n",
    );
    let out = run(&["check", &cfg]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[holds] structural"), "{text}");
    assert!(text.contains("masmoudi-zaag"), "{text}");
    assert!(
        text.contains("[holds] shifted-energy blowup (gamma < 0)"),
        "{text}"
    );
    assert!(text.contains("kappa*"), "{text}");
    assert!(text.contains("indicative"), "{text}");

    // wide angle: criterion inapplicable regardless of data
    let cfg = write_config(
        dir.path(),
        "wide.cfg",
        "theta = 0.8\nalpha = 2\ngamma = -0.2\ndim = 1\n\
         initial.kind = gaussian\ninitial.amplitude_re = 10\ninitial.width = 1\n",
    );
    let out = run(&["check", &cfg]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("[fails] shifted-energy blowup (gamma < 0)"),
        "{text}"
    );
    assert!(text.contains("pi/4"), "{text}");

    // driven regime prints the maximal-time bound
    let cfg = write_config(
        dir.path(),
        "driven.cfg",
        "theta = 0.5235987755982988\nalpha = 2\ngamma = 0.5\ndim = 1\n\
         initial.kind = gaussian\ninitial.amplitude_re = 3\ninitial.width = 1\n",
    );
    let out = run(&["check", &cfg]);
    let text = stdout(&out);
    assert!(
        text.contains("[holds] negative-energy blowup (gamma > 0)"),
        "{text}"
    );
    assert!(text.contains("t_max <= 0.107"), "{text}");
}

#[test]
fn sweep_writes_regions_and_respects_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out = bin()
        .args([
            "sweep",
            "--resolution",
            "64",
            "--out",
            out_a.to_str().unwrap(),
        ])
        .env("CGL_THREADS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv_a = fs::read_to_string(out_a.join("regions.csv")).unwrap();
    assert!(csv_a.starts_with("alpha,theta,s_1_8,s_1_14,label\n"));
    assert_eq!(csv_a.lines().count(), 1 + 64 * 64);
    assert!(out_a.join("regions_plot.gp").exists());

    let out_b = dir.path().join("b");
    let out = bin()
        .args([
            "sweep",
            "--resolution",
            "64",
            "--out",
            out_b.to_str().unwrap(),
        ])
        .env("CGL_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv_b = fs::read_to_string(out_b.join("regions.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "parallelism must not change the output bytes");

    // single-cell sweep agrees with the scalar checkers
    let out_c = dir.path().join("c");
    let out = run(&[
        "sweep",
        "--alpha-min",
        "1.95",
        "--alpha-max",
        "2.05",
        "--theta-min",
        "0.05",
        "--theta-max",
        "0.15",
        "--resolution",
        "1",
        "--out",
        out_c.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_c.join("regions.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let p = Params::new(0.1, 2.0, 0.0, 1).unwrap();
    let want = format!(
        "2,0.1,{},{}",
        check_structural(&p).holds as u8,
        check_mz(&p).holds as u8
    );
    assert!(row.starts_with(&want), "{row} vs {want}");

    let out = run(&[
        "sweep",
        "--alpha-min",
        "5",
        "--alpha-max",
        "1",
        "--out",
        "/tmp",
    ]);
    assert_eq!(out.status.code(), Some(2), "empty range is a usage error");
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();

    let out = run(&["simulate", "/definitely/not/a/file.cfg"]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = write_config(dir.path(), "syntax.cfg", "this is not a config\n");
    let out = run(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "unknown.cfg",
        "theta = 0\nalpha = 2\ngamma = 0\ninitial.kind = constant\nbogus.key = 1\n",
    );
    let out = run(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(2));

    // config is fine, the data behind it is not: exit 3
    let cfg = write_config(
        dir.path(),
        "badfield.cfg",
        "theta = 0\nalpha = 2\ngamma = 0\ninitial.kind = file\ninitial.path = /nope.csv\n",
    );
    let out = run(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(3));

    // field file with the wrong number of samples: exit 3
    let field = dir.path().join("short.csv");
    fs::write(&field, "1.0,0.0\n2.0,0.0\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "short.cfg",
        &format!(
            "theta = 0\nalpha = 2\ngamma = 0\ninitial.kind = file\ninitial.path = {}\n",
            field.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["nonsense-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn two_dim_ring_run() {
    // exercises the 2-D transform path and the ring family end to end
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "ring.cfg",
        &format!(
            "theta = 0.2\nalpha = 1\ngamma = -0.5\ndim = 2\n\
             grid.half_width = 8\ngrid.n = 32\n\
             controls.t_max = 0.1\ncontrols.tol = 1e-8\n\
             initial.kind = ring\ninitial.amplitude_re = 0.5\ninitial.radius = 3\ninitial.width = 0.8\n\
             outputs = {}\nmonitors = mass\n",
            out_dir.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let outcome = fs::read_to_string(out_dir.join("outcome.txt")).unwrap();
    assert!(outcome.contains("kind = ReachedHorizon"), "{outcome}");
    let series = fs::read_to_string(out_dir.join("series.csv")).unwrap();
    // damped small data: the mass decreases
    let masses: Vec<f64> = series
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(masses.last().unwrap() < masses.first().unwrap());
}

#[test]
fn field_file_round_trip_runs() {
    // a sampled-field file drives the run exactly like the builtin family
    let dir = tempfile::tempdir().unwrap();
    let n = 256;
    let l = 16.0;
    let mut body = String::new();
    for j in 0..n {
        let x = -l + j as f64 * (2.0 * l / n as f64);
        body.push_str(&format!("{},{}\n", 0.5 * (-x * x / 2.0f64).exp(), 0.0));
    }
    let field = dir.path().join("field.csv");
    fs::write(&field, body).unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "file.cfg",
        &format!(
            "theta = 0.2\nalpha = 2\ngamma = -0.4\ndim = 1\ngrid.n = 256\ngrid.half_width = 16\n\
             controls.t_max = 0.2\ninitial.kind = file\ninitial.path = {}\noutputs = {}\n",
            field.display(),
            out_dir.display()
        ),
    );
    let out = run(&["simulate", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let outcome = fs::read_to_string(out_dir.join("outcome.txt")).unwrap();
    assert!(outcome.contains("kind = ReachedHorizon"), "{outcome}");
}
