use std::path::Path;

use qnsch::io::{
    self, checkpoint_name, write_plot_scripts, Checkpoint, ConfinementMode, CsvTable, RunConfig, CSV_NAME,
    FINAL_CHECKPOINT, SCHEMA, SUMMARY_NAME,
};
use qnsch::model::InitialKind;
use qnsch::solver::SchemeKind;
use qnsch::{Error, Level};

fn small(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.n = 16;
    cfg.scheme.max_steps = 6;
    cfg.output.dir = dir.to_path_buf();
    cfg.output.pressure_every = 2;
    cfg
}

#[test]
fn config_text_roundtrips() {
    let text = "
        # a comment
        physics.rho1 = 1/3
        physics.n = 32
        scheme.kind = imex_bdf2
        scheme.level = target
        init.kind = bubble   # trailing comment
        physics.confinement = 1e6
    ";
    let cfg = RunConfig::parse(text).unwrap();
    assert_eq!(cfg.n, 32);
    assert_eq!(cfg.scheme.scheme, SchemeKind::ImexBdf2);
    assert_eq!(cfg.scheme.level, Level::Target);
    assert_eq!(cfg.initial.kind, InitialKind::Bubble);
    assert_eq!(cfg.confinement, ConfinementMode::Steep(1e6));
    assert!((cfg.params.rho1 - 1.0 / 3.0).abs() < 1e-16);
    let again = RunConfig::parse(&cfg.to_config_string()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn config_errors_carry_position() {
    let err = RunConfig::parse("physics.n = 32\n  bogus.key = 1\n").unwrap_err();
    match err {
        Error::Config { line, column, message } => {
            assert_eq!((line, column), (2, 3));
            assert!(message.contains("bogus.key"), "{message}");
        }
        other => panic!("unexpected {other}"),
    }
    let err = RunConfig::parse("scheme.dt = fast\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: 1, column: 13, .. }), "{err}");
    assert!(RunConfig::parse("no equals sign\n").is_err());
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn overrides_apply_in_order() {
    let mut cfg = RunConfig::default();
    cfg.apply_overrides(&["scheme.dt=1e-3", "scheme.dt = 2e-3", "physics.n=64"]).unwrap();
    assert_eq!(cfg.scheme.dt, 2e-3);
    assert_eq!(cfg.n, 64);
    assert!(matches!(cfg.apply_overrides(&["nonsense"]), Err(Error::Config { .. })));
}

#[test]
fn missing_config_file_names_the_path() {
    let err = RunConfig::load(Path::new("/nonexistent/run.conf")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/run.conf"), "{err}");
}

#[test]
fn run_writes_its_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    cfg.output.checkpoint_every = 3;
    let out = io::simulate(&cfg).unwrap();
    assert!(out.error.is_none());
    assert_eq!(out.exit_code(), 0);
    assert_eq!(out.summary.final_step, 6);
    for name in [CSV_NAME, SUMMARY_NAME, FINAL_CHECKPOINT, "config.txt"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
    assert!(tmp.path().join(checkpoint_name(3)).exists());
    assert!(tmp.path().join(checkpoint_name(6)).exists());

    let raw = std::fs::read_to_string(tmp.path().join(CSV_NAME)).unwrap();
    assert!(raw.starts_with(&format!("# schema={SCHEMA}")));
    let table = CsvTable::read(&tmp.path().join(CSV_NAME)).unwrap();
    assert_eq!(table.rows.len(), 7);
    let step = table.column("step").unwrap();
    assert_eq!(table.rows.last().unwrap()[step], 6.0);
    assert!(table.column("not_a_column").is_err());

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join(SUMMARY_NAME)).unwrap()).unwrap();
    assert_eq!(summary["status"], "completed");
    assert_eq!(summary["final_step"], 6);

    let echoed = RunConfig::load(&tmp.path().join("config.txt")).unwrap();
    assert_eq!(echoed, cfg);
}

#[test]
fn checkpoint_roundtrip_and_corruption() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    cfg.scheme.scheme = SchemeKind::ImexBdf2;
    io::simulate(&cfg).unwrap();
    let path = tmp.path().join(FINAL_CHECKPOINT);
    let ck = Checkpoint::load(&path).unwrap();
    assert_eq!(ck.state.step, 6);
    assert!(ck.previous.is_some());
    let bytes = ck.to_bytes();
    assert_eq!(bytes, std::fs::read(&path).unwrap());
    assert_eq!(Checkpoint::from_bytes(&bytes).unwrap(), ck);

    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    assert!(Checkpoint::from_bytes(&bad).unwrap_err().to_string().contains("magic"));
    let mut bad = bytes.clone();
    bad[30] ^= 0x01;
    assert!(matches!(Checkpoint::from_bytes(&bad), Err(Error::Checkpoint(_))));
    let mut bad = bytes.clone();
    let last = bad.len() - 20;
    bad[last] ^= 0x01;
    assert!(matches!(Checkpoint::from_bytes(&bad), Err(Error::Checkpoint(_))));
    let err = Checkpoint::from_bytes(&bytes[..bytes.len() / 2]).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(Checkpoint::load(&tmp.path().join("missing.qnsch")).is_err());
}

#[test]
fn resume_matches_a_straight_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(&tmp.path().join("a"));
    cfg.output.checkpoint_every = 2;
    let straight = io::simulate(&cfg).unwrap();
    let mut again = cfg.clone();
    again.output.dir = tmp.path().join("b");
    let resumed = io::resume(&tmp.path().join("a").join(checkpoint_name(2)), &again).unwrap();
    assert_eq!(resumed.summary.start_step, 2);
    assert_eq!(resumed.state, straight.state);
}

#[test]
fn resume_rejects_a_different_setup() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path());
    io::simulate(&cfg).unwrap();
    let ck = tmp.path().join(FINAL_CHECKPOINT);

    let mut other = cfg.clone();
    other.n = 32;
    other.output.dir = tmp.path().join("x");
    let err = io::resume(&ck, &other).unwrap_err();
    assert!(err.to_string().contains("16x16") && err.to_string().contains("32x32"), "{err}");
    assert_eq!(err.exit_code(), 4);

    let mut other = cfg.clone();
    other.params.beta = 2.0;
    other.output.dir = tmp.path().join("y");
    assert!(matches!(io::resume(&ck, &other), Err(Error::Checkpoint(_))));
}

#[test]
fn plot_scripts_need_data_and_columns() {
    let tmp = tempfile::tempdir().unwrap();
    io::simulate(&small(tmp.path())).unwrap();
    let written = write_plot_scripts(&tmp.path().join(CSV_NAME)).unwrap();
    let names: Vec<_> = written.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names, ["energy.gp", "bd_entropy.gp", "tails.gp"]);
    let body = std::fs::read_to_string(&written[0]).unwrap();
    assert!(body.contains(CSV_NAME));

    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert!(write_plot_scripts(&empty).is_err());
    let header_only = tmp.path().join("header.csv");
    std::fs::write(&header_only, "step,time,E_total\n").unwrap();
    assert!(write_plot_scripts(&header_only).is_err());
    let partial = tmp.path().join("partial.csv");
    std::fs::write(&partial, "step,time,E_total\n0,0,1\n").unwrap();
    let err = write_plot_scripts(&partial).unwrap_err();
    assert!(err.to_string().contains("E_sigma_delta"), "{err}");
}
