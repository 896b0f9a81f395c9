use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn pnp(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_pnp"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

fn header(path: PathBuf) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn commands_write_expected_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = |c: &str| tmp.path().join(c);
    let cases = [
        ("steady-asymptotic", "standard.json", "composite.csv", "x,phi,c1,c2"),
        ("steady-bvp", "layered.json", "solution.csv", "x,phi,c1,c2"),
        ("layers", "layered.json", "left_layer.csv", "xi,phi,u,v,w,H1,H2,H3"),
        ("transient", "transient.json", "lyapunov.csv", "t,L"),
        ("sweep", "sweep_bump.json", "sweep.csv", "value,seed,status,rho0,j1,j2,jbar1,jbar2"),
    ];
    for (cmd, cfg, file, head) in cases {
        let dir = out(cmd);
        assert_eq!(pnp(&[cmd, "--config", &config(cfg), "--out", dir.to_str().unwrap()]), 0, "{cmd}");
        assert_eq!(header(dir.join(file)), head, "{cmd}");
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["status"], "ok");
        assert_eq!(summary["command"], cmd);
    }
}

#[test]
fn exit_codes_classify_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"problem":{"species":{"alpha1":1,"alpha2":1},"boundary":{"phi0":0,"l1":1,"l2":1,"r1":2,"r2":2},"mu":0.1,"lambda":3}}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    assert_eq!(pnp(&["steady-bvp", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    fs::write(&bad, "{\"problem\": {").unwrap();
    assert_eq!(pnp(&["steady-bvp", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    let missing = tmp.path().join("missing.json");
    assert_eq!(pnp(&["steady-bvp", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]), 4);
}
