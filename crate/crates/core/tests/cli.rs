use std::process::{Command, Output};

fn udlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

#[test]
fn split_attack_exits_with_exceeds_bound() {
    let out = udlab(&[
        "run", "--game", "flip_qcp", "--backend", "split_pair", "--adversary", "split_flip:q=2", "--trials", "3000",
        "--seed", "11",
    ]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["verdict"], "ExceedsBound");
    assert_eq!(r["seed"], 11);
}

#[test]
fn honest_play_within_slack_exits_zero() {
    let out = udlab(&["run", "--game", "weak_qcp", "--n", "2", "--k", "0", "--trials", "8000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["mean"], 2.0);
}

#[test]
fn small_runs_are_inconclusive() {
    let out = udlab(&["run", "--game", "flip_qcp", "--trials", "50", "--seed", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_seed_is_drawn_and_reported() {
    let out = udlab(&["run", "--game", "ind", "--trials", "10"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with("seed: ")).expect("seed reported");
    let seed: u64 = line["seed: ".len()..].split_whitespace().next().unwrap().parse().unwrap();
    assert_eq!(report(&out)["seed"], seed);
}

#[test]
fn unknown_names_exit_three_and_bad_parameters_four() {
    assert_eq!(code(&udlab(&["run", "--game", "nonesuch"])), 3);
    assert_eq!(code(&udlab(&["run", "--game", "ud", "--profile", "cca9"])), 3);
    assert_eq!(code(&udlab(&["run", "--game", "ud", "--adversary", "honest", "--scheme", "extend(ud2)"])), 3);
    assert_eq!(code(&udlab(&["run", "--game", "flip_qcp", "--adversary", "split_flip:q=x"])), 4);
    assert_eq!(code(&udlab(&["run", "--game", "ud", "--trials", "0"])), 4);
    assert_eq!(code(&udlab(&["run", "--trials", "ten"])), 4);
    assert_eq!(code(&udlab(&["run"])), 4);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out_path = dir.path().join("report.json");
    std::fs::write(&cfg, "game = ud1\nprofile = cca1\ntrials = 400\nseed = 5\nn = 2\n").unwrap();
    let out = udlab(&["run", "--config", cfg.to_str().unwrap(), "--trials", "30", "--out", out_path.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["game"], "ud1_cca1");
    assert_eq!(r["params"]["trials"], 30);
    assert_eq!(r["params"]["n"], 2);
    assert_eq!(r["seed"], 5);

    let json = dir.path().join("run.json");
    std::fs::write(&json, r#"{"game": "seuf_cma", "sig": "malleable", "adversary": "trivial", "trials": 20, "seed": 1}"#).unwrap();
    let out = udlab(&["run", "--config", json.to_str().unwrap()]);
    assert_eq!(report(&out)["mean"], 1.0);
    assert_eq!(code(&out), 1);
}

#[test]
fn same_seed_gives_identical_reports() {
    let args = ["run", "--game", "ud", "--profile", "cca2", "--adversary", "malleability", "--trials", "300", "--seed", "8"];
    let a = udlab(&args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let b = udlab(&threaded);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn kat_and_list_succeed() {
    let out = udlab(&["kat"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("match"));
    let out = udlab(&["list"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("split_flip"));
}

#[test]
fn suite_filter_runs_selected_rows() {
    let out = udlab(&["suite", "acceptance", "--filter", "quantum"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{text}");
    assert!(text.contains("PASS [ 9]"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 1);
}
