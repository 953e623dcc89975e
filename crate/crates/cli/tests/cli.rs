use std::fs;
use std::process::{Command, Output};

fn permcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permcode"))
        .args(args)
        .env_remove("PERMCODE_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bounds_prints_csv_and_text() {
    let out = permcode(&["bounds", "--n", "6", "--d", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,d,"));
    assert!(lines.next().unwrap().starts_with("6,4,90/7,13,720,720,120,true,139.48"));
    assert!(text.contains("PA(6, 4)"));

    let out = permcode(&["bounds", "--table"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 16);

    assert!(!permcode(&["bounds", "--n", "4", "--d", "5"]).status.success());
}

#[test]
fn run_writes_a_verifiable_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pa.txt");
    let out = permcode(&[
        "run",
        "--n",
        "6",
        "--d",
        "6",
        "--method",
        "rs",
        "--budget",
        "100000",
        "--seed",
        "4",
        "--no-timing",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout(&out);
    assert_eq!(
        csv.lines().next().unwrap(),
        "n,d,method,policy,fitness,seed,peak_size,final_size,evals_used,resets"
    );
    assert!(csv.lines().nth(1).unwrap().starts_with("6,6,rs,plain,f3,4,6,6,"));

    let out = permcode(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "valid PA(6,6) with 6 rows");

    // Same seed, same output.
    let again = permcode(&[
        "run",
        "--n",
        "6",
        "--d",
        "6",
        "--method",
        "rs",
        "--budget",
        "100000",
        "--seed",
        "4",
        "--no-timing",
    ]);
    assert_eq!(stdout(&again), csv);
}

#[test]
fn verify_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let close = dir.path().join("close.txt");
    fs::write(&close, "4 3 2\n1 2 3 4\n2 1 3 4\n").unwrap();
    let out = permcode(&["verify", close.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rows (1,2)"), "{err}");

    let repeated = dir.path().join("repeated.txt");
    fs::write(&repeated, "3 2 1\n1 1 2\n").unwrap();
    assert!(!permcode(&["verify", repeated.to_str().unwrap()]).status.success());

    assert!(!permcode(&["verify", dir.path().join("missing.txt").to_str().unwrap()])
        .status
        .success());
}

#[test]
fn oracle_exact_and_greedy() {
    let out = permcode(&["oracle", "--n", "4", "--d", "3", "--exact"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("4 3 12\n"));

    let out = permcode(&["oracle", "--n", "5", "--d", "4", "--greedy", "--seed", "2"]);
    assert!(out.status.success());
    let header = stdout(&out).lines().next().unwrap().to_string();
    let m: usize = header.split(' ').nth(2).unwrap().parse().unwrap();
    assert!((1..=20).contains(&m));

    let out = permcode(&["oracle", "--n", "6", "--d", "5"]);
    assert!(!out.status.success());
}

#[test]
fn sweep_is_deterministic_and_emits_codes() {
    let dir = tempfile::tempdir().unwrap();
    let codes = dir.path().join("codes");
    let summary = dir.path().join("summary.csv");
    let args = [
        "sweep",
        "--instances",
        "5:4,6:6",
        "--variants",
        "EA1,RS2",
        "--fitness",
        "f3,f4",
        "--repetitions",
        "2",
        "--budget",
        "5000",
        "--pop-size",
        "50",
        "--seed",
        "11",
        "--no-timing",
    ];
    let first = permcode(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let csv = stdout(&first);
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2 * 2);

    let mut with_files: Vec<&str> = args.to_vec();
    let (codes_s, summary_s) = (codes.to_str().unwrap(), summary.to_str().unwrap());
    with_files.extend(["--codes-dir", codes_s, "--summary", summary_s]);
    let second = Command::new(env!("CARGO_BIN_EXE_permcode"))
        .args(&with_files)
        .env("PERMCODE_WORKERS", "3")
        .output()
        .unwrap();
    assert!(second.status.success());
    assert_eq!(stdout(&second), csv);

    let files: Vec<_> = fs::read_dir(&codes).unwrap().collect();
    assert_eq!(files.len(), 16);
    for f in files {
        let out = permcode(&["verify", f.unwrap().path().to_str().unwrap()]);
        assert!(out.status.success());
    }
    let summary = fs::read_to_string(summary).unwrap();
    assert_eq!(summary.lines().count(), 1 + 8);
    assert!(summary.starts_with("n,d,method,policy,fitness,runs,min_peak,median_peak,max_peak,mean_peak\n"));
}

#[test]
fn rejects_bad_arguments() {
    assert!(!permcode(&["run", "--n", "6", "--d", "4", "--fitness", "f9"])
        .status
        .success());
    assert!(!permcode(&["run", "--n", "6", "--d", "4", "--tournament", "2"])
        .status
        .success());
    assert!(!permcode(&["sweep", "--instances", "6-4"]).status.success());
    assert!(!permcode(&["sweep", "--instances", "3:4", "--quick"]).status.success());
}
