use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_superbroadcast"));
    c.env_remove("SUPERBROADCAST_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn broadcast_reports() {
    let o = run(&["broadcast", "--n", "2", "--m", "3", "--nbar", "1.0", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(field(&t, "nbar_out"), "0.666666667");
    assert_eq!(field(&t, "superbroadcast"), "true");

    let o = run(&["broadcast", "--n", "3", "--m", "1", "--nbar", "0.9", "--format", "text"]);
    assert_eq!(field(&stdout(&o), "nbar_out"), "0.300000000");

    let o = run(&["broadcast", "--n", "2", "--m", "3", "--nbar", "1", "--alpha", "0.5"]);
    let v = json(&o);
    for key in [
        "spec", "nbar_out_local", "nbar_out_predicted", "threshold", "superbroadcast", "mbar", "gamma_in",
        "gamma_out", "bound_gamma", "clone_mean", "ppt_min_eigenvalue", "seed",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["spec"]["mode"], "standard");
    assert!((v["clone_mean"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["seed"], 0);
}

#[test]
fn exact_mode() {
    let o = run(&["broadcast", "--n", "2", "--m", "3", "--nbar", "1", "--mode", "exact", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "mbar"), "0.500000000");
    assert_eq!(field(&stdout(&o), "nbar_out"), "1.000000000");

    let o = run(&["broadcast", "--n", "2", "--m", "3", "--nbar", "0.2", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("-0.100000000"), "{}", stderr(&o));
}

#[test]
fn conjugate_mode_flips_the_mean() {
    let o = run(&["broadcast", "--n", "2", "--m", "2", "--nbar", "0", "--alpha", "1+1i", "--mode", "conj"]);
    let v = json(&o);
    assert!((v["clone_mean"]["im"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((v["gamma_out"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["spec"]["mode"], "conj");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["broadcast", "--n", "2"],
        vec!["broadcast", "--n", "2", "--m", "3", "--nbar", "1", "--alpha", "1+2j"],
        vec!["sweep", "--n", "2", "--m-range", "5:2", "--nbar-range", "0"],
        vec!["bounds", "--n", "2", "--m", "3", "--gamma", "0.4"],
        vec!["amp-verify", "--gain", "1"],
        vec!["broadcast", "--n", "2", "--m", "3", "--nbar", "1", "--format", "csv"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = [
        "sweep", "--n", "2", "--m-range", "2:5", "--nbar-range", "0:1:0.5", "--out",
        path.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,M,nbar_in,nbar_out,threshold,superbroadcast,mbar");
    assert_eq!(lines.len(), 13);
    assert!(lines.contains(&"2,3,0.500000000,0.416666667,0.333333333,true,0.125000000"));
    let order: Vec<(usize, String)> = lines[1..]
        .iter()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].parse().unwrap(), c[2].to_string())
        })
        .collect();
    let mut sorted = order.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.parse::<f64>().unwrap().total_cmp(&b.1.parse().unwrap())));
    assert_eq!(order, sorted);

    run(&args);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn sweep_marks_infinite_threshold() {
    let o = run(&["sweep", "--n", "1", "--m-range", "2", "--nbar-range", "0:0.5:0.5"]);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().starts_with("1,2,0.00000000,0.500000000,inf,false,"));
}

#[test]
fn bounds_table() {
    let o = run(&["bounds", "--n", "2", "--m", "3", "--gamma", "1.5"]);
    let t = stdout(&o);
    let row = t.lines().find(|l| l.starts_with("broadcast")).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols, ["broadcast", "1.166666667", "1.166666667", "yes"]);

    let t = stdout(&run(&["bounds", "--n", "3", "--m", "2", "--gamma", "1.4"]));
    let row = t.lines().find(|l| l.starts_with("purification")).unwrap();
    assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["purification", "0.800000000", "0.800000000", "yes"]);

    let v = json(&run(&["bounds", "--n", "2", "--m", "2", "--gamma", "0.5", "--format", "json"]));
    let conj = v["bounds"].as_array().unwrap().iter().find(|b| b["name"] == "phase-conj").unwrap();
    assert!((conj["bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(conj["saturated"], true);
}

#[test]
fn amp_verify_is_seeded() {
    let args = ["amp-verify", "--gain", "1.5", "--shots", "100000", "--seed", "42"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let t = stdout(&a);
    assert_eq!(field(&t, "tau"), "0.816496581");
    assert_eq!(field(&t, "k"), "0.707106781");
    assert!(field(&t, "channel_deviation").parse::<f64>().unwrap() < 1e-12);
    assert_eq!(field(&t, "seed"), "42");
    assert_eq!(run(&args).stdout, a.stdout);

    let env = bin()
        .args(["amp-verify", "--gain", "1.5", "--shots", "100000"])
        .env("SUPERBROADCAST_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let near = run(&["amp-verify", "--gain", "1.0001", "--shots", "20000"]);
    assert_eq!(near.status.code(), Some(0));
}

#[test]
fn oracle_runs() {
    let o = run(&["oracle", "--n", "1", "--m", "2", "--nbar", "0", "--cutoff", "12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for c in v["clones"].as_array().unwrap() {
        assert!((c["fidelity_to_input"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-4);
        assert!(c["fidelity_to_prediction"].as_f64().unwrap() > 1.0 - 1e-6);
    }
    let stages = v["stages"].as_array().unwrap();
    assert_eq!(stages.first().unwrap()["stage"], "input");
    assert_eq!(stages.last().unwrap()["stage"], "distribute");

    let o = run(&["oracle", "--cutoff", "2", "--nbar", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--cutoff 13"), "{}", stderr(&o));
}

#[test]
fn oracle_desk_scale() {
    let o = run(&["oracle", "--n", "2", "--m", "3", "--nbar", "0.5", "--cutoff", "14", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    for c in json(&o)["clones"].as_array().unwrap() {
        assert!(c["fidelity_to_prediction"].as_f64().unwrap() >= 0.9999);
    }
}
