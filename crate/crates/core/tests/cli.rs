use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitwalk")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows of the CSV table `name`.
fn table(text: &str, name: &str) -> Vec<Vec<String>> {
    let marker = format!("# table: {name}");
    let mut lines = text.lines().skip_while(|l| *l != marker).skip(2);
    let mut rows = Vec::new();
    for l in lines.by_ref() {
        if l.starts_with('#') || l.is_empty() {
            break;
        }
        rows.push(l.split(',').map(str::to_string).collect());
    }
    rows
}

#[test]
fn evolve_conserves_probability_on_circle() {
    let out = run(&["evolve", "--set", "space.length=8", "--set", "params.tau=2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows = table(&text, "distribution");
    assert_eq!(rows.len(), 8);
    let total: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn output_is_deterministic() {
    let args = ["evolve", "--set", "space.kind=interval", "--set", "space.length=5", "--set", "representation.theta=3.141592653589793"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fermion_pairs_are_sorted_and_vanish_on_the_diagonal() {
    let out = run(&[
        "evolve",
        "--set",
        "space.kind=interval",
        "--set",
        "space.length=5",
        "--set",
        "space.walkers=2",
        "--set",
        "representation.statistics=fermion",
    ]);
    assert_eq!(code(&out), 0);
    let rows = table(&stdout(&out), "distribution");
    assert_eq!(rows.len(), 15);
    for r in &rows {
        let (x1, x2): (i64, i64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!(x1 <= x2);
        if x1 == x2 {
            assert!(r[4].parse::<f64>().unwrap() < 1e-26);
        }
    }
}

#[test]
fn thermal_at_zero_beta_counts_sites() {
    let out = run(&["thermal", "--set", "space.length=5", "--set", "params.beta=0", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["config"]["command"], "thermal");
    let part = v["tables"].as_array().unwrap().iter().find(|t| t["name"] == "partition").unwrap();
    assert_eq!(part["data"][0][1].as_f64(), Some(5.0));
}

#[test]
fn dos_integrates_to_site_count() {
    let out = run(&["dos", "--set", "space.length=5"]);
    assert_eq!(code(&out), 0);
    let rows = table(&stdout(&out), "integral");
    let total = rows.iter().find(|r| r[0] == "total").unwrap()[1].parse::<f64>().unwrap();
    assert!((total - 5.0).abs() < 0.1, "{total}");
}

#[test]
fn config_file_and_overrides_layer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"space": {"kind": "circle", "length": 4}, "params": {"tau": 0.5}}"#).unwrap();
    let out = run(&["evolve", "--config", path.to_str().unwrap(), "--set", "space.length=6"]);
    assert_eq!(code(&out), 0);
    assert_eq!(table(&stdout(&out), "distribution").len(), 6);

    let target = dir.path().join("out.csv");
    let out = run(&["coined", "--set", "space.length=6", "--output", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(&target).unwrap().contains("# table: blocks"));
}

#[test]
fn verify_passes_on_the_interval() {
    let out = run(&["verify", "--set", "space.kind=interval", "--set", "space.length=3", "--set", "verify.all_representations=true"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("# result: pass"));
    assert_eq!(table(&text, "verify").len(), 12);
}

#[test]
fn invalid_input_exits_2() {
    // Unknown key, missing window on the half line, invalid interval flux.
    assert_eq!(code(&run(&["evolve", "--set", "space.colour=3"])), 2);
    assert_eq!(code(&run(&["evolve", "--set", "space.kind=half_line"])), 2);
    assert_eq!(code(&run(&["evolve", "--set", "space.kind=interval", "--set", "representation.theta=1"])), 2);
}

#[test]
fn non_convergence_exits_3() {
    let out = run(&["evolve", "--set", "params.tau=50", "--max-shell", "2"]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());
}

#[test]
fn failed_verification_exits_4() {
    // An oracle chain far too short for omega tau = 5.
    let out = run(&["verify", "--set", "space.kind=half_line", "--set", "verify.oracle_window=16"]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("fail"));
}

#[test]
fn dirichlet_half_line_conserves_probability_in_window() {
    let out = run(&[
        "evolve",
        "--set",
        "space.kind=half_line",
        "--set",
        "space.boundary=dirichlet",
        "--set",
        "representation.phi=3.141592653589793",
        "--set",
        "params.tau=2",
        "--window",
        "1:60",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = table(&stdout(&out), "distribution");
    assert_eq!(rows.len(), 60);
    let total: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn broken_truncation_in_verify_is_an_error() {
    let out = run(&["verify", "--set", "space.length=4", "--tolerance", "0.1", "--max-shell", "1"]);
    assert!([3, 4].contains(&code(&out)), "exit {}", code(&out));
}
