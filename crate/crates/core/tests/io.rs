//! Snapshot files, configuration handling and the command-line binary.

use std::path::Path;
use std::process::Command;

use pif_mhd::config::{parse_settings, resolve};
use pif_mhd::driver::{run, RunConfig, Simulation};
use pif_mhd::output::{snapshot_name, Snapshot};
use pif_mhd::problems::ProblemId;

#[test]
fn snapshot_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (id, mesh) in [(ProblemId::Rotor, vec![12, 10]), (ProblemId::Blast3d, vec![4, 5, 3])] {
        let sim = Simulation::new(RunConfig::new(id).with_mesh(&mesh)).unwrap();
        let snap = Snapshot::from_fields(id.name(), 0.125, &sim.q, Some(&sim.a));
        let path = dir.path().join(format!("{id}.dat"));
        snap.write(&path).unwrap();
        let back = Snapshot::read(&path).unwrap();
        assert_eq!(back, snap);
        let ncells: usize = mesh.iter().product();
        assert_eq!(back.values.len(), ncells);
        let want = if mesh.len() == 2 { 9 } else { 11 };
        assert_eq!(back.components.len(), want);
    }
}

#[test]
fn corrupt_snapshot_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dat");
    std::fs::write(&path, "not a snapshot\n").unwrap();
    assert!(Snapshot::read(&path).is_err());
    let sim = Simulation::new(RunConfig::new(ProblemId::Rotor).with_mesh(&[6, 6])).unwrap();
    let good = dir.path().join("good.dat");
    Snapshot::from_fields("rotor", 0.0, &sim.q, None).write(&good).unwrap();
    let bytes = std::fs::read(&good).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(Snapshot::read(&path).is_err());
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(ProblemId::Alfven2d).with_mesh(&[8, 16]).with_t_final(0.02);
    cfg.out_dir = Some(dir.path().to_path_buf());
    cfg.snapshots = 2;
    let out = run(&cfg).unwrap();
    let d = dir.path();
    for f in ["series.csv", "summary.txt", &snapshot_name(0), &snapshot_name(1), &snapshot_name(2)] {
        assert!(d.join(f).is_file(), "missing {f}");
    }
    let last = Snapshot::read(&d.join(snapshot_name(2))).unwrap();
    assert_eq!(last.t, out.summary.t);
    assert_eq!(last.t, 0.02);
    let first = Snapshot::read(&d.join(snapshot_name(0))).unwrap();
    assert_eq!(first.t, 0.0);
    let summary = std::fs::read_to_string(d.join("summary.txt")).unwrap();
    assert!(summary.starts_with("problem alfven2d\nmesh 8x16\n"), "{summary}");
    let series = std::fs::read_to_string(d.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), out.series.len() + 1);
}

#[test]
fn settings_resolve_and_reject_bad_input() {
    let s = parse_settings("problem = blast3d\nmesh = 10x12x14\nct = off\ntfinal = 0.1\n").unwrap();
    let r = resolve(&s).unwrap();
    assert_eq!(r.run.problem, ProblemId::Blast3d);
    assert_eq!(r.run.mesh, vec![10, 12, 14]);
    assert!(!r.run.ct);
    assert_eq!(r.run.t_final, 0.1);
    for bad in [
        "problem = rotor\ncolour = red\n",
        "problem = rotor\nmesh = 0,4\n",
        "problem = rotor\nct = maybe\n",
        "problem = nowhere\n",
        "mesh = 4,4\n",
        "problem = rotor\ncfl = -1\n",
        "problem = rotor\nmesh = 8\n",
        "problem rotor\n",
    ] {
        let parsed = parse_settings(bad).and_then(|s| resolve(&s));
        assert!(parsed.is_err(), "accepted {bad:?}");
    }
}

fn cli(args: &[&str], cwd: &Path) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pif-mhd"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn cli_run_and_converge() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("alfven.cfg"), "problem = alfven2d\nmesh = 8,16\ntfinal = 1\n").unwrap();
    let (ok, stdout, stderr) = cli(
        &["run", "--config", "alfven.cfg", "--tfinal", "0.05", "--out", "res", "--snapshots", "1"],
        d,
    );
    assert!(ok, "{stderr}");
    assert!(stdout.contains("problem alfven2d") && stdout.contains("t 5e-2"), "{stdout}");
    assert!(d.join("res").join(snapshot_name(1)).is_file());

    let (ok, stdout, stderr) = cli(
        &["converge", "--problem", "alfven2d", "--mesh", "8,16", "--tfinal", "0.05", "--levels", "2"],
        d,
    );
    assert!(ok, "{stderr}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "mesh,cfl,error_B,order_B,error_A,order_A");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("16x32,"), "{stdout}");

    let (ok, _, stderr) = cli(&["run", "--problem", "rotor", "--mesh", "8,8", "--ct", "sideways"], d);
    assert!(!ok);
    assert!(stderr.starts_with("error:"), "{stderr}");
}
