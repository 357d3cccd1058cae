//! Fast end-to-end checks of the command-line interface: exit codes,
//! header echoing, and the gen/solve/analyze round trip.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csplab"))
}

fn tmpdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "csplab-cli-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_solve_analyze_roundtrip() {
    let dir = tmpdir();
    let inst = dir.join("inst.csp");
    let out = bin()
        .args(["gen", "--model", "ed3", "--n", "40", "--c", "1.5"])
        .args(["--flavor", "hat", "--seed", "5", "--out"])
        .arg(&inst)
        .output()
        .unwrap();
    assert!(out.status.success(), "gen failed: {out:?}");
    let echoed = String::from_utf8(out.stdout).unwrap();
    assert!(echoed.contains("# model = ed3"));
    assert!(echoed.contains("# seed = 5"));
    assert!(std::fs::read_to_string(&inst).unwrap().contains("CSPINST 1"));

    let out = bin().arg("solve").arg(&inst).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("SAT") || stdout.contains("UNSAT"));

    let dot = dir.join("inst.dot");
    let out = bin().arg("analyze").arg(&inst).arg("--dot").arg(&dot).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("components"));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn deterministic_output_given_seed() {
    let run = || {
        bin()
            .args(["gen", "--model", "dkt:2,3,1", "--n", "30", "--c", "8.0"])
            .args(["--flavor", "plain", "--seed", "9"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn seed_resolution_env_fallback() {
    let with_env = bin()
        .args(["gen", "--model", "ed3", "--n", "30", "--c", "1.0"])
        .env("CSPLAB_SEED", "123")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    assert!(String::from_utf8(with_env.stdout)
        .unwrap()
        .contains("# seed = 123"));
}

#[test]
fn exit_codes() {
    // unknown model: input error
    let out = bin()
        .args(["gen", "--model", "bogus", "--n", "10", "--c", "1.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // budget exhaustion: exit 2
    let dir = tmpdir();
    let inst = dir.join("hard.csp");
    assert!(bin()
        .args(["gen", "--model", "dkt:2,3,1", "--n", "120", "--c", "30.0"])
        .args(["--flavor", "hat", "--seed", "3", "--out"])
        .arg(&inst)
        .status()
        .unwrap()
        .success());
    let out = bin()
        .arg("solve")
        .arg(&inst)
        .args(["--budget", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stdout: {out:?}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn audit_writes_witness() {
    let dir = tmpdir();
    let witness = dir.join("witness.csp");
    let out = bin()
        .args(["audit", "--model", "coloring:2", "--out"])
        .arg(&witness)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("COUNTEREXAMPLE"));
    assert!(std::fs::read_to_string(&witness).unwrap().contains("CSPINST 1"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tmpdir();
    let cfg = dir.join("lab.cfg");
    std::fs::write(&cfg, "[model]\nmodel = ed3\n[run]\nseed = 77\n").unwrap();
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["gen", "--n", "30", "--c", "1.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("# model = ed3"));
    assert!(stdout.contains("# seed = 77"));
    let _ = std::fs::remove_dir_all(&dir);
}
