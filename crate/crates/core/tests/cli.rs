mod common;

use common::*;

const GOLDEN: &str = "Chop chocolate and add to batter. Stir until incorporated.";

fn worked_example_args() -> Vec<String> {
    let w = fixtures().join("worked_example");
    vec![
        "eval".into(),
        "retrieval".into(),
        "--glosses".into(),
        path_str(&w.join("glosses.jsonl")),
        "--manifest".into(),
        path_str(&w.join("manifest.json")),
        "--synonyms".into(),
        path_str(&w.join("synonyms.tsv")),
    ]
}

#[test]
fn gloss_rule_prints_golden_sequence() {
    let r = signpipe(&["gloss", "--rule", "--text", GOLDEN], &[]);
    assert!(r.ok, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "CHOP CHOCOLATE ADD BATTER STIR UNTIL INCORPORATE");
}

#[test]
fn gloss_needs_a_strategy() {
    let r = signpipe(&["gloss", "--text", GOLDEN], &[]);
    assert!(!r.ok);
    let r = signpipe(&["gloss", "--rule", "--llm", "--text", GOLDEN], &[]);
    assert!(!r.ok);
}

#[test]
fn eval_retrieval_on_worked_example() {
    let r = signpipe(&worked_example_args(), &[]);
    assert!(r.ok, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["n_glosses"], 6);
    assert_eq!(v["n_hits"], 3);
    assert_eq!(v["hit_rate"], 0.5);
    assert_eq!(v["recall_at_1"], 0.75);

    let mut args = worked_example_args();
    args.extend(["--recall-definition".into(), "all-glosses".into()]);
    let r = signpipe(&args, &[]);
    assert_eq!(json(&r.stdout)["recall_at_1"], 0.5);

    let mut args = worked_example_args();
    args.extend(["--format".into(), "csv".into()]);
    let r = signpipe(&args, &[]);
    let mut lines = r.stdout.lines();
    assert!(lines.next().unwrap().starts_with("n_glosses,n_hits"));
    assert!(lines.next().unwrap().starts_with("6,3,"));
}

#[test]
fn manifest_verify_lists_missing_keys() {
    let root = tempfile::tempdir().unwrap();
    let manifest = bundled_manifest();
    materialize_assets(&manifest, root.path());
    let m = path_str(&fixtures().join("manifest.json"));
    let r = signpipe(&["manifest", "verify", "--manifest", &m, "--root", &path_str(root.path())], &[]);
    assert!(r.ok, "{}", r.stderr);
    assert!(json(&r.stdout)["missing"].as_array().unwrap().is_empty());

    std::fs::remove_file(root.path().join("backup/SIMMER.mp4")).unwrap();
    let r = signpipe(&["manifest", "verify", "--manifest", &m, "--root", &path_str(root.path())], &[]);
    assert!(!r.ok);
    let err = json(r.stderr.lines().last().unwrap());
    assert_eq!(err["kind"], "missing_assets");
    assert_eq!(err["detail"][0]["gloss_key"], "SIMMER");
    assert_eq!(err["detail"].as_array().unwrap().len(), 1);
}

#[test]
fn manifest_scan_round_trips() {
    let root = tempfile::tempdir().unwrap();
    for (dir, key) in [("primary", "STIR"), ("primary", "ADD"), ("backup", "WHISK")] {
        std::fs::create_dir_all(root.path().join(dir)).unwrap();
        std::fs::write(root.path().join(dir).join(format!("{key}.mp4")), b"x").unwrap();
    }
    let out = root.path().join("m.json");
    let r = signpipe(
        &[
            "manifest",
            "scan",
            "--primary",
            &path_str(&root.path().join("primary")),
            "--backup",
            &path_str(&root.path().join("backup")),
            "--out",
            &path_str(&out),
        ],
        &[],
    );
    assert!(r.ok, "{}", r.stderr);
    let m = signpipe::resolve::VideoManifest::load(&out).unwrap();
    assert_eq!(m.len(), 3);
}

#[test]
fn compile_writes_one_file_per_task() {
    let out = tempfile::tempdir().unwrap();
    let mut args: Vec<String> = vec![
        "compile".into(),
        "--tasks".into(),
        path_str(&fixtures().join("tasks")),
        "--out".into(),
        path_str(out.path()),
    ];
    args.extend(table_args());
    let r = signpipe(&args, &[]);
    assert!(r.ok, "{}", r.stderr);
    let summary = json(&r.stdout);
    assert_eq!(summary["translator"], "rule");
    assert_eq!(summary["tasks"].as_array().unwrap().len(), 13);
    assert_eq!(dir_bytes(out.path()).len(), 13);
    assert!(summary["tasks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn errors_are_json_on_stderr() {
    let r = signpipe(&["compile", "--tasks", "/definitely/not/here", "--out", "/tmp/x"], &[]);
    assert!(!r.ok);
    assert!(r.stdout.is_empty());
    let err = json(r.stderr.lines().last().unwrap());
    assert!(err["error"].as_str().unwrap().contains("/definitely/not/here"), "{err}");

    let r = signpipe(&["gloss", "--llm", "--text", GOLDEN], &[]);
    assert!(!r.ok);
    assert!(json(r.stderr.lines().last().unwrap())["error"].is_string());
}

#[test]
fn flags_beat_env_beat_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = fixtures().join("worked_example");
    let cfg = dir.path().join("signpipe.toml");
    std::fs::write(
        &cfg,
        format!(
            "manifest = {:?}\nsynonyms = {:?}\nrecall_definition = \"all-glosses\"\n",
            path_str(&fixtures().join("manifest.json")),
            path_str(&w.join("synonyms.tsv")),
        ),
    )
    .unwrap();
    let glosses = path_str(&w.join("glosses.jsonl"));
    let base = ["eval", "retrieval", "--glosses", glosses.as_str(), "--config", &path_str(&cfg)];

    // file only: bundled manifest covers everything in the example
    let r = signpipe(&base, &[]);
    assert!(r.ok, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["n_glosses"], 6);
    let file_hits = json(&r.stdout)["n_hits"].clone();
    assert_ne!(file_hits, 3);

    // env overrides the file
    let small = path_str(&w.join("manifest.json"));
    let r = signpipe(&base, &[("SIGNPIPE_MANIFEST", small.as_str())]);
    let v = json(&r.stdout);
    assert_eq!((v["n_hits"].clone(), v["recall_at_1"].clone()), (3.into(), 0.5.into()));

    // the flag overrides both
    let mut args = base.to_vec();
    args.extend(["--recall-definition", "recoverable"]);
    let r = signpipe(&args, &[("SIGNPIPE_MANIFEST", small.as_str())]);
    assert_eq!(json(&r.stdout)["recall_at_1"], 0.75);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "manifset = \"x\"\n").unwrap();
    let r = signpipe(&["eval", "retrieval", "--glosses", "x", "--config", &path_str(&cfg)], &[]);
    assert!(!r.ok);
    assert!(r.stderr.contains("manifset"), "{}", r.stderr);
}

#[test]
fn translate_and_eval_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.jsonl");
    let tasks = path_str(&fixtures().join("tasks"));
    let r = signpipe(&["translate", "--rule", "--tasks", &tasks, "--out", &path_str(&out)], &[]);
    assert!(r.ok, "{}", r.stderr);
    let shipped = std::fs::read_to_string(fixtures().join("corpus/rule.jsonl")).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), shipped);

    let hyp = path_str(&fixtures().join("corpus/llm.jsonl"));
    let r = signpipe(&["eval", "text", "--hyp", &hyp, "--ref", &path_str(&out)], &[]);
    assert!(r.ok, "{}", r.stderr);
    let v = json(&r.stdout);
    let oracle = text_oracle();
    let pinned = &oracle.cases.iter().find(|c| c.name == "shipped-llm-vs-rule").unwrap().scores;
    assert!((v["chrf"].as_f64().unwrap() - pinned["chrf"]).abs() < METRIC_TOL);

    let r = signpipe(&["eval", "text", "--hyp", &hyp, "--ref", &path_str(&fixtures().join("worked_example/glosses.jsonl"))], &[]);
    assert!(!r.ok);
}

#[test]
fn check_reports_and_strict_fails() {
    let w = fixtures().join("worked_example");
    let args = [
        "check",
        "--glosses",
        &path_str(&w.join("glosses.jsonl")),
        "--manifest",
        &path_str(&w.join("manifest.json")),
    ]
    .map(String::from);
    let r = signpipe(&args, &[]);
    assert!(r.ok, "{}", r.stderr);
    assert!(json(&r.stdout)["total"].as_u64().unwrap() > 0);
    let mut strict = args.to_vec();
    strict.push("--strict".into());
    assert!(!signpipe(&strict, &[]).ok);
}

#[test]
fn eval_curve_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let svg = dir.path().join("c.svg");
    let mut args: Vec<String> = [
        "eval",
        "curve",
        "--glosses",
        &format!("llm={}", path_str(&fixtures().join("corpus/llm.jsonl"))),
        "--policy",
        "random",
        "--seeds",
        "0,1,2,3,4",
        "--step",
        "50",
        "--out",
        &path_str(&csv),
        "--plot",
        &path_str(&svg),
    ]
    .map(String::from)
    .to_vec();
    args.extend(table_args());
    let r = signpipe(&args, &[]);
    assert!(r.ok, "{}", r.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 2);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}
