use std::path::Path;
use std::process::{Command, Output};

fn qnsch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnsch"))
        .current_dir(dir)
        .env("QNSCH_THREADS", "1")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const UNIFORM: &str = "physics.n = 16\ninit.kind = uniform\nscheme.max_steps = 10\noutput.dir = run\n";

#[test]
fn uniform_run_keeps_its_energy() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.conf"), UNIFORM).unwrap();
    let o = qnsch(tmp.path(), &["--quiet", "--config", "run.conf", "simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("run/diagnostics.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "E_total").unwrap();
    let energies: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(energies.len(), 11);
    assert!(energies.iter().all(|e| (e - energies[0]).abs() <= 1e-13 * energies[0].abs()));
}

#[test]
fn unknown_key_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.conf"), "physics.n = 16\nfoo.bar = 1\n").unwrap();
    let o = qnsch(tmp.path(), &["--config", "bad.conf", "simulate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("foo.bar") && stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = qnsch(tmp.path(), &["--config", "missing.conf", "simulate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.conf"), "{}", stderr(&o));

    let o = qnsch(tmp.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupted_checkpoint_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.conf"), UNIFORM).unwrap();
    assert_eq!(qnsch(tmp.path(), &["-q", "--config", "run.conf", "simulate"]).status.code(), Some(0));
    let ck = tmp.path().join("run/final.qnsch");
    let mut bytes = std::fs::read(&ck).unwrap();
    bytes[20] ^= 0x55;
    std::fs::write(tmp.path().join("broken.qnsch"), bytes).unwrap();
    let o = qnsch(tmp.path(), &["--config", "run.conf", "--out", "r2", "resume", "broken.qnsch"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("checkpoint"));
}

#[test]
fn grid_mismatch_exits_4_with_both_shapes() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.conf"), UNIFORM).unwrap();
    assert_eq!(qnsch(tmp.path(), &["-q", "--config", "run.conf", "simulate"]).status.code(), Some(0));
    let o = qnsch(
        tmp.path(),
        &["--override", "physics.n=32", "--out", "r2", "resume", "run/final.qnsch"],
    );
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(err.contains("16x16") && err.contains("32x32"), "{err}");
}

#[test]
fn resume_continues_from_a_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = "physics.n = 16\nscheme.kind = imex_bdf2\nscheme.max_steps = 8\noutput.checkpoint_every = 4\noutput.dir = a\n";
    std::fs::write(tmp.path().join("run.conf"), conf).unwrap();
    assert_eq!(qnsch(tmp.path(), &["-q", "--config", "run.conf", "simulate"]).status.code(), Some(0));
    let o = qnsch(tmp.path(), &["-q", "--out", "b", "resume", "a/checkpoint-00000004.qnsch"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = std::fs::read(tmp.path().join("a/final.qnsch")).unwrap();
    let b = std::fs::read(tmp.path().join("b/final.qnsch")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn plot_writes_three_scripts() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.conf"), UNIFORM).unwrap();
    assert_eq!(qnsch(tmp.path(), &["-q", "--config", "run.conf", "simulate"]).status.code(), Some(0));
    let o = qnsch(tmp.path(), &["plot", "run/diagnostics.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["energy.gp", "bd_entropy.gp", "tails.gp"] {
        assert!(tmp.path().join("run").join(f).exists(), "{f}");
    }

    std::fs::write(tmp.path().join("partial.csv"), "step,time\n0,0\n").unwrap();
    let o = qnsch(tmp.path(), &["plot", "partial.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing column"), "{}", stderr(&o));

    std::fs::write(tmp.path().join("empty.csv"), "").unwrap();
    assert_eq!(qnsch(tmp.path(), &["plot", "empty.csv"]).status.code(), Some(1));
}

#[test]
fn verify_reports_json() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qnsch(tmp.path(), &["verify", "operators"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][0]["suite"], "operators");

    let o = qnsch(tmp.path(), &["--out", "report.json", "verify", "potentials"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("report.json").exists());

    assert_eq!(qnsch(tmp.path(), &["verify", "nonsense"]).status.code(), Some(1));
}
