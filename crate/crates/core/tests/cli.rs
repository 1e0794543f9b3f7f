use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ecgsqa");

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(BIN);
    c.args(args).env_remove("ECGSQA_SEED");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const CONFIG: &str = r#"
seed = 3

[model]
kind = "rforest"
n_trees = 20

[sweep]
dataset = "A"
windows_s = [10.0, 20.0]

[[dataset]]
id = "A"
synth = { n_records = 5, duration_s = 120.0, seed = 1 }

[[dataset]]
id = "B"
synth = { n_records = 5, duration_s = 120.0, fs = 1000.0, ma_weight = 0.2, seed = 2 }
"#;

fn write_config(dir: &Path) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, CONFIG).unwrap();
    p.to_str().unwrap().to_string()
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn all_commands(cfg: &str, out: &str, envs: &[(&str, &str)]) {
    for cmd in ["pipeline", "within", "cross", "sweep-window"] {
        let o = run(&[cmd, "--config", cfg, "--out", out], envs);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    all_commands(&cfg, a.to_str().unwrap(), &[]);
    all_commands(&cfg, b.to_str().unwrap(), &[]);
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    let names: Vec<&String> = sa.keys().collect();
    assert_eq!(
        names,
        ["A.csv", "B.csv", "cross.csv", "cross.json", "pipeline.json", "sweep_A.csv", "sweep_A.json", "within_A.json", "within_B.json"]
    );
    assert_eq!(sa, sb);
}

#[test]
fn seed_from_environment_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let within = |out: &Path, extra: &[&str], envs: &[(&str, &str)]| {
        let mut args = vec!["within", "--config", &cfg, "--out", out.to_str().unwrap(), "--dataset", "A"];
        args.extend_from_slice(extra);
        assert_eq!(code(&run(&args, envs)), 0);
        std::fs::read(out.join("within_A.json")).unwrap()
    };
    let by_env = within(&a, &[], &[("ECGSQA_SEED", "11")]);
    let by_flag = within(&b, &["--seed", "11"], &[]);
    let from_file = within(&c, &[], &[]);
    assert_eq!(by_env, by_flag);
    assert_ne!(by_env, from_file);
    let text = String::from_utf8(by_env).unwrap();
    assert!(text.contains("\"seed\": 11"));

    assert_eq!(code(&run(&["within", "--config", &cfg], &[("ECGSQA_SEED", "abc")])), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["bogus"], &[])), 1);
    assert_eq!(code(&run(&[], &[])), 1);
    assert_eq!(code(&run(&["--help"], &[])), 0);
    assert_eq!(code(&run(&["pipeline"], &[])), 1);

    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&run(&["pipeline", "--config", missing.to_str().unwrap()], &[])), 1);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = \"x\"\n").unwrap();
    assert_eq!(code(&run(&["pipeline", "--config", bad.to_str().unwrap()], &[])), 1);

    let svm = dir.path().join("svm.toml");
    std::fs::write(&svm, "[model]\nkind = \"svm\"\n").unwrap();
    assert_eq!(code(&run(&["within", "--config", svm.to_str().unwrap()], &[])), 1);

    // a config whose record directory does not exist is a data problem
    let norec = dir.path().join("norec.toml");
    std::fs::write(&norec, "[[dataset]]\nid = \"X\"\nrecords = \"missing_dir\"\n").unwrap();
    let out = dir.path().join("o");
    assert_eq!(code(&run(&["pipeline", "--config", norec.to_str().unwrap(), "--out", out.to_str().unwrap()], &[])), 2);

    let garbage = dir.path().join("g.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&run(&["report", garbage.to_str().unwrap()], &[])), 2);
}

#[test]
fn synth_nst_ingest_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = |s: &str| dir.path().join(s).to_str().unwrap().to_string();

    let o = run(&["synth", "--out", &d("corpus"), "--n-records", "2", "--duration", "90", "--snr", "-6,0", "--lead-in", "20", "--block", "20"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["synth_000.ecg", "synth_000.meta", "synth_000.ann", "synth_000.peaks", "synth_001.ecg"] {
        assert!(dir.path().join("corpus").join(f).exists(), "{f}");
    }
    let first = std::fs::read(dir.path().join("corpus/synth_000.ecg")).unwrap();

    let o = run(&["synth", "--out", &d("clean"), "--n-records", "1", "--duration", "560", "--clean"], &[("ECGSQA_SEED", "5")]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(dir.path().join("clean/synth_000.ann")).unwrap(), "");

    let o = run(&["nst", "--clean", &d("clean/synth_000.ecg"), "--noise", "em", "--snr", "-6", "--out", &d("nst")], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // 300 s lead-in, noisy 120 s, clean 120 s, then a noisy 20 s remainder
    let ann = std::fs::read_to_string(dir.path().join("nst/synth_000_-6dB.ann")).unwrap();
    assert_eq!(ann, "108000 151200 1\n194400 201600 1\n");

    let txt = dir.path().join("plain.txt");
    let body: String = (0..4000).map(|i| format!("{i}, {}\n", (i as f64 * 0.05).sin())).collect();
    std::fs::write(&txt, body).unwrap();
    let o = run(&["ingest", "--input", txt.to_str().unwrap(), "--fs", "250", "--column", "1", "--id", "p1", "--out", &d("ing")], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec = ecgsqa::io::load_record(dir.path().join("ing/p1.ecg")).unwrap();
    assert_eq!(rec.len(), 4000);
    assert_eq!(rec.fs(), 250.0);
    assert_eq!(code(&run(&["ingest", "--input", txt.to_str().unwrap(), "--out", &d("ing2")], &[])), 1);

    // records written by synth feed the pipeline through a records directory
    let cfg = dir.path().join("rec.toml");
    std::fs::write(&cfg, format!("seed = 1\n[[dataset]]\nid = \"R\"\nrecords = {:?}\n", d("corpus"))).unwrap();
    let o = run(&["pipeline", "--config", cfg.to_str().unwrap(), "--out", &d("out")], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Dataset") && stdout.contains('R'));

    let o = run(&["report", &d("out/pipeline.json")], &[]);
    assert_eq!(code(&o), 0);
    let o = run(&["report", "--json", &d("out/pipeline.json")], &[]);
    assert_eq!(o.stdout, std::fs::read(dir.path().join("out/pipeline.json")).unwrap());

    // same seed, same corpus
    let o = run(&["synth", "--out", &d("again"), "--n-records", "2", "--duration", "90", "--snr", "-6,0", "--lead-in", "20", "--block", "20"], &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(dir.path().join("again/synth_000.ecg")).unwrap(), first);
}
