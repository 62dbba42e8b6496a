use std::process::Command;

fn dipmem() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dipmem"))
}

#[test]
fn presets_are_listed() {
    let out = dipmem().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig2-cavity",
        "fig3-freespace",
        "zero-coupling",
        "shaped-output",
    ] {
        assert!(text.lines().any(|l| l == name), "missing {name}");
    }
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dipmem()
        .args(["run", "fig2-cavity", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("eta_w       0.864665"));
    for file in ["result.json", "e_out.csv", "spinwave.csv"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(record["scenario"], "fig2-cavity");
    assert_eq!(record["summary"]["family"], "cavity");
}

#[test]
fn sweep_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dipmem()
        .args([
            "sweep",
            "fig2-cavity",
            "--axis",
            "tau-r",
            "--values",
            "0.5,1",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("value,eta_w,eta_r"));
}

#[test]
fn failures_are_reported_as_json() {
    let out = dipmem().args(["run", "no-such-scenario"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");

    let out = dipmem()
        .args(["sweep", "fig2-cavity", "--axis", "tau-r"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parameter");
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "name = \"x\"\nmodel = \"cavity-adiabatic\"\nbogus = 1\n",
    )
    .unwrap();
    let out = dipmem().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn verify_passes() {
    let out = dipmem().arg("verify").output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}
