use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ofdma-alloc"))
}

#[test]
fn run_writes_identical_csv_twice() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = bin()
            .args(["run", "--drops", "4", "--users", "5,9", "--algorithm", "mwdg,rg", "--power-mode", "uniform,dpra", "--ipp", "1,2"])
            .arg("--out")
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algorithm,power_mode,M,N,J,drops,mean_dropped,ci_dropped,mean_eta,ci_eta,mean_total_power_w");
    // 2 user counts x 2 algorithms x (uniform + DPRA at J=1,2)
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines[1].starts_with("mwdg,uniform,2,5,1,4,"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    fs::write(&cfg, "max_prbs = 3\nusers_per_cell = [6]\nnum_drops = 2\nalgorithm = \"meg\"\n").unwrap();
    let out = bin().arg("run").arg(&cfg).args(["--seed", "11", "--print-config"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max_prbs = 3") && text.contains("master_seed = 11"));

    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("meg,uniform,3,6,1,2,"));
}

#[test]
fn bad_input_exits_nonzero() {
    let out = bin().args(["run", "--algorithm", "fastest"]).output().unwrap();
    assert!(!out.status.success());

    let out = bin().args(["run", "--max-prbs", "24", "--drops", "1"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_prbs"));

    let out = bin().args(["run", "/nonexistent/scenario.toml"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn verify_reports_each_check() {
    let out = bin().args(["verify", "--instances", "90", "--drops", "1"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 4);
    assert!(text.contains("worst W_mwdg/W_opt"));
}
