//! End-to-end checks of the dfrank binary: flag handling, exit codes, and
//! output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dfrank() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dfrank"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dfrank-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Deterministic toy temporal stream: 600 events over 40 vertices.
fn write_temporal(path: &Path) {
    let mut lines = vec!["# toy".to_string()];
    let mut x: u64 = 9;
    for t in 0..600u64 {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let u = (x >> 33) % 40;
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let v = (x >> 33) % 40;
        lines.push(format!("{u} {v} {}", t / 2));
    }
    fs::write(path, lines.join("\n")).unwrap();
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn dfrank")
}

#[test]
fn temporal_run_produces_expected_rows() {
    let dir = workdir("temporal");
    let input = dir.join("stream.txt");
    write_temporal(&input);
    let out = dir.join("rows.csv");
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&input)
        .args(["--fractions", "2e-3,1e-2", "--batches", "4", "--out"])
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("graph,strategy,fraction,batch_index"));
    // 2 fractions x 4 batches x 5 strategies
    assert_eq!(lines.count(), 2 * 4 * 5);
}

#[test]
fn same_seed_reproduces_csv_modulo_elapsed() {
    let dir = workdir("repro");
    let input = dir.join("stream.txt");
    write_temporal(&input);
    let strip = |path: &Path| -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                let mut fields = fields;
                fields.remove(11); // elapsed_s
                fields.join(",")
            })
            .collect()
    };
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for out in [&out_a, &out_b] {
        let output = run(dfrank()
            .args(["temporal", "--input"])
            .arg(&input)
            .args([
                "--fractions",
                "5e-3",
                "--batches",
                "3",
                "--seed",
                "7",
                "--out",
            ])
            .arg(out));
        assert!(output.status.success(), "{output:?}");
    }
    assert_eq!(strip(&out_a), strip(&out_b));
}

#[test]
fn scaling_emits_rows_per_thread_count() {
    let dir = workdir("scaling");
    let input = dir.join("stream.txt");
    write_temporal(&input);
    let out = dir.join("rows.csv");
    let output = run(dfrank()
        .args(["scaling", "--input"])
        .arg(&input)
        .args([
            "--fraction",
            "5e-3",
            "--threads",
            "1,2",
            "--batches",
            "2",
            "--out",
        ])
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out).unwrap();
    let ones = text
        .lines()
        .filter(|l| l.split(',').nth(5) == Some("1"))
        .count();
    let twos = text
        .lines()
        .filter(|l| l.split(',').nth(5) == Some("2"))
        .count();
    // df and dfp by default, 2 batches each
    assert_eq!(ones, 4);
    assert_eq!(twos, 4);
}

#[test]
fn random_run_on_edge_list() {
    let dir = workdir("random");
    let input = dir.join("graph.txt");
    fs::write(&input, "1 2\n2 3\n3 4\n4 1\n2 4\n3 1\n").unwrap();
    let out = dir.join("rows.csv");
    let output = run(dfrank()
        .args(["random", "--input"])
        .arg(&input)
        .args([
            "--fractions",
            "0.2",
            "--trials",
            "2",
            "--strategies",
            "static,df",
            "--out",
        ])
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

#[test]
fn ranks_dump_has_one_line_per_vertex() {
    let dir = workdir("ranks");
    let input = dir.join("stream.txt");
    write_temporal(&input);
    let out = dir.join("ranks.tsv");
    let output = run(dfrank()
        .args(["ranks", "--input"])
        .arg(&input)
        .args(["--strategy", "dfp", "--out"])
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "vertex\trank");
    assert_eq!(lines.len(), 1 + 40);
    let sum: f64 = lines[1..]
        .iter()
        .map(|l| l.split('\t').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    // pruning leaves ranks within the prune tolerance of exact
    // normalization
    assert!((sum - 1.0).abs() < 1e-4, "ranks sum to {sum}");
}

#[test]
fn env_var_supplies_thread_count() {
    let dir = workdir("env");
    let input = dir.join("stream.txt");
    write_temporal(&input);
    let out = dir.join("rows.csv");
    let output = run(dfrank()
        .env("DFRANK_THREADS", "2")
        .args(["temporal", "--input"])
        .arg(&input)
        .args([
            "--fractions",
            "5e-3",
            "--batches",
            "1",
            "--strategies",
            "df",
            "--out",
        ])
        .arg(&out));
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(5), Some("2"));
}

#[test]
fn exit_codes_distinguish_validation_from_io() {
    let dir = workdir("exits");
    let input = dir.join("stream.txt");
    write_temporal(&input);

    // missing input file: I/O error
    let output = run(dfrank()
        .args(["temporal", "--input", "/definitely/not/here", "--out"])
        .arg(dir.join("x.csv")));
    assert_eq!(output.status.code(), Some(2), "{output:?}");

    // unknown strategy: validation error
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&input)
        .args(["--strategies", "bogus", "--out"])
        .arg(dir.join("x.csv")));
    assert_eq!(output.status.code(), Some(1), "{output:?}");

    // malformed data: validation error with file and line
    let bad = dir.join("bad.txt");
    fs::write(&bad, "1 2 3\nnot numbers\n").unwrap();
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.join("x.csv")));
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains(":2:"), "stderr: {stderr}");

    // out-of-range plan parameters: validation error, not a crash
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&input)
        .args(["--preload", "1.5", "--out"])
        .arg(dir.join("x.csv")));
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&input)
        .args(["--batches", "0", "--out"])
        .arg(dir.join("x.csv")));
    assert_eq!(output.status.code(), Some(1), "{output:?}");

    // success path exits 0
    let output = run(dfrank()
        .args(["temporal", "--input"])
        .arg(&input)
        .args([
            "--fractions",
            "1e-2",
            "--batches",
            "1",
            "--strategies",
            "static",
            "--out",
        ])
        .arg(dir.join("ok.csv")));
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}
