use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn djm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_djm")).args(args).output().expect("failed to start djm")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &TempDir) -> std::path::PathBuf {
    let inst = dir.path().join("rmat.djm");
    let out = djm(&[
        "gen-rmat", "--log-nodes", "6", "--model", "er", "--fraction", "0.2", "--del-prob", "0.3",
        "--update-batches", "5", "--density", "4", "--seed", "7", "--out", p(&inst),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    inst
}

#[test]
fn run_and_aggregate() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir);
    let mut csvs = Vec::new();
    for algo in ["kec", "dyn-greedy-r", "batch-2apx"] {
        for recourse in [false, true] {
            let csv = dir.path().join(format!("{algo}-{recourse}.csv"));
            let mut args = vec!["run", "--algo", algo, "--k", "4", "--input", p(&inst), "--repeats", "2", "--out", p(&csv)];
            if recourse {
                args.push("--measure-recourse");
            }
            let out = djm(&args);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            csvs.push(csv);
        }
    }
    let text = fs::read_to_string(&csvs[0]).unwrap();
    assert!(text.starts_with("instance,algo,k,seed,repeat,batch,b,time_ns,weight,recourse_all,recourse_touched\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 6);

    let agg = dir.path().join("agg.csv");
    let mut args = vec!["aggregate", "--reference", "kec", "--out", p(&agg), "--in"];
    args.extend(csvs.iter().map(|c| p(c)));
    let out = djm(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let agg = fs::read_to_string(&agg).unwrap();
    assert!(agg.starts_with("dataset,algo,reference,k,instances,speedup,relative_weight,relative_recourse"));
    assert_eq!(agg.lines().count(), 3);
    assert!(agg.contains("dyn-greedy-r") && agg.contains("batch-2apx"));
}

#[test]
fn filter_needs_threshold() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir);
    let csv = dir.path().join("x.csv");
    let out = djm(&["run", "--algo", "dyn-kec+f", "--k", "2", "--input", p(&inst), "--out", p(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    let out = djm(&["run", "--algo", "dyn-kec", "--filter", "2", "--postprocess", "--k", "2", "--input", p(&inst), "--out", p(&csv)]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&csv).unwrap().contains("dyn-kec+pf"));
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(djm(&["run", "--algo", "kec"]).status.code(), Some(1));
    assert_eq!(djm(&["frobnicate"]).status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.djm");
    fs::write(&bad, "djm 1 3\n#batch\n0 0 5\n").unwrap();
    let out = djm(&["verify", "--in", p(&bad), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("x.csv");
    let out = djm(&["run", "--algo", "nope", "--k", "2", "--input", p(&bad), "--out", p(&csv)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_small_instance() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("toy.djm");
    fs::write(&inst, "djm 1 4\n#batch\n0 1 5\n1 2 7\n2 3 5\n0 3 2\n#batch\n1 2 1\n0 2 9\n#batch\n0 2 0\n").unwrap();
    let out = djm(&["verify", "--in", p(&inst), "--k", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 14);
    let out = djm(&["verify", "--in", p(&inst), "--k", "1", "--algo", "greedy+p", "batch-2apx"]);
    assert!(out.status.success());
}

#[test]
fn split_and_ingest() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.txt");
    fs::write(&trace, "1 a b 100\n2 b a 50\n3 c a 10\n4 a b 7\n").unwrap();
    let inst = dir.path().join("trace.djm");
    let out = djm(&["ingest", "--group", "2", "--format", "ts", "--in", p(&trace), "--out", p(&inst)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&inst).unwrap();
    assert!(text.contains("0 1 150"), "{text}");

    let split = dir.path().join("split.djm");
    let out = djm(&["split", "--sub-batches", "5", "--cap", "40", "--seed", "2", "--in", p(&inst), "--out", p(&split)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&split).unwrap().matches("#batch").count(), 10);

    let out = djm(&["split", "--sub-batches", "2", "--cap", "40", "--in", p(&inst), "--out", p(&split)]);
    assert_eq!(out.status.code(), Some(2));
}
