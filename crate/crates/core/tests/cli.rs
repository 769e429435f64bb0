use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn trotterlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trotterlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "\
# two states on a short grid
h1_expr = 0.5*Q^2
h2_expr = half_p2
states = 0,1
t = 1
trotter_steps = 100
d_min = 2
d_max = 9
bound_overlay = true
window = 4
";

#[test]
fn bound_prints_closed_form() {
    let o = trotterlab(&["bound", "--m", "0", "--t", "1", "--n", "1000"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (0.6f64).sqrt() / 800.0).abs() < 1e-18);
    assert_eq!(trotterlab(&["bound", "--m", "0", "--t", "1", "--n", "0"]).status.code(), Some(1));
}

#[test]
fn presets_are_valid_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig2", "fig3", "fig4", "figS1"] {
        let o = trotterlab(&["preset", "--name", name]);
        assert!(o.status.success(), "{name}");
        let text = stdout(&o);
        assert!(text.contains("trotter_steps ="));
        let cfg = trotterlab::harness::SweepConfig::parse(&text).unwrap();
        assert_eq!(cfg, trotterlab::harness::preset(name).unwrap().1);
        fs::write(dir.path().join(name), text).unwrap();
    }
    let o = trotterlab(&["preset", "--name", "fig5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fig2"));
}

fn run_small(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let cfg = dir.join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.join(name);
    let o = Command::new(env!("CARGO_BIN_EXE_trotterlab"))
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()])
        .env("TROTTERLAB_THREADS", threads)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict:"));
    fs::read(out).unwrap()
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_small(dir.path(), "a.csv", "1");
    let b = run_small(dir.path(), "b.csv", "3");
    let c = run_small(dir.path(), "c.csv", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("d,m0,m1,bound_m0,bound_m1\n"));
    assert_eq!(text.lines().count(), 1 + 8);
}

#[test]
fn sweep_writes_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, format!("{SMALL}output_path = {}\n", dir.path().join("s.csv").display())).unwrap();
    let dat = dir.path().join("s.dat");
    let o = trotterlab(&["sweep", "--config", cfg.to_str().unwrap(), "--plot", dat.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("s.csv").exists());
    assert!(dat.exists() && dir.path().join("s.gp").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = trotterlab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(trotterlab(&["bound", "--m", "1"]).status.code(), Some(1));
    assert_eq!(trotterlab(&["sweep", "--config", "/nonexistent/x.cfg"]).status.code(), Some(1));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, SMALL.replace("states = 0,1", "states = 0,5")).unwrap();
    let o = trotterlab(&["sweep", "--config", cfg.to_str().unwrap(), "--output", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4") && stderr(&o).contains("states"), "{}", stderr(&o));

    fs::write(&cfg, SMALL).unwrap();
    let o = trotterlab(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "no output path anywhere");

    assert!(trotterlab(&["--help"]).status.success());
}

#[test]
fn verify_reports_seed_and_passes() {
    let o = trotterlab(&["verify", "--dim", "5", "--trials", "20", "--seed", "42"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("seed 42") && text.contains(" 0 violations"), "{text}");
}
