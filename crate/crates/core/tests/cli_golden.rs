//! Runs the binary on fixed invocations and compares against `tests/golden`.
//!
//! `UPDATE_GOLDEN=1 cargo test --test cli_golden` rewrites the files.

use std::path::PathBuf;
use std::process::Command;

const CASES: &[(&str, &str)] = &[
    ("vsearch_n20", "vsearch --n 20 --delta 9,5,4,-9,-5,-4"),
    ("vsearch_n20_json", "vsearch --n 20 --delta 9,5,4,-9,-5,-4 --format json"),
    ("vsearch_n20_g", "vsearch --n 20 --delta 18,10,8,-18,-10,-8"),
    ("vsearch_n3", "vsearch --n 3 --delta 1,-1"),
    ("vsearch_n4", "vsearch --n 4 --delta 3,2,-2,-3"),
    ("vsearch_from_function", "vsearch --n 14 --function 01:21"),
    ("vsearch_empty", "vsearch --n 3 --delta ,"),
    ("kernel_dim", "kernel-dim --n 4 --poly 01*X^2^2+0c*X^2^1+0c*X^2^-1"),
    ("bounds_n20", "bounds --n 20 --function 01:545"),
    ("bounds_n19", "bounds --n 19 --function 01:545"),
    ("bounds_n20_main_json", "bounds --n 20 --function 01:545 --main --format json"),
    ("bounds_n20_g_lhg", "bounds --n 20 --function 01:263169 --lhg"),
    ("bounds_n4_csv", "bounds --n 4 --function 01:7 --format csv"),
    ("bounds_n5_gmu", "bounds --n 5 --function 01:7"),
    ("bounds_n12_noncoprime", "bounds --n 12 --function 01:73"),
    ("nl2_exact_n4", "nl2-exact --n 4 --function 01:7"),
    ("nl2_exact_cap", "nl2-exact --n 8 --function 01:7"),
    ("radical_dist_n5", "radical-dist --n 5 --function 01:7 --format json"),
    ("walsh_n4", "walsh --n 4 --function 01:7"),
    ("verify_n5", "verify --n 5"),
    ("custom_modulus", "nl2-exact --n 4 --modulus 0x19 --function 01:7"),
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run(args: &str) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_linroot"))
        .args(args.split_whitespace())
        .env_remove("LINROOT_MODULUS_TABLE")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

#[test]
fn golden_outputs() {
    let update = std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let dir = golden_dir();
    let mut mismatches = Vec::new();
    for (name, args) in CASES {
        let (code, stdout) = run(args);
        let got = format!("$ linroot {args}\nexit: {code}\n{stdout}");
        let path = dir.join(format!("{name}.txt"));
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if got != want {
            mismatches.push(format!("{name}:\n--- want\n{want}\n--- got\n{got}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run("vsearch --n 3 --delta ,").0, 2);
    assert_eq!(run("vsearch --n 3").0, 2);
    assert_eq!(run("nl2-exact --n 8 --function 01:7").0, 3);
    assert_eq!(run("bounds --n 30 --function 01:7").0, 3);
    assert_eq!(run("bounds --n 4 --function zz:7").0, 2);
    assert_eq!(run("bounds --n 4 --function 01:15").0, 2);
    assert_eq!(run("walsh --n 4 --modulus 0x11 --function 01:7").0, 2);
    assert_eq!(run("frobnicate --n 4").0, 2);
    assert_eq!(run("verify --n 6").0, 0);
}

#[test]
fn json_round_trips() {
    for (_, args) in CASES.iter().filter(|(_, a)| a.contains("--format json")) {
        let (_, stdout) = run(args);
        let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, stdout, "{args}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run("bounds --n 10 --function 01:7 --threads 1 --format json");
    let many = run("bounds --n 10 --function 01:7 --threads 4 --format json");
    assert_eq!(one, many);
}

#[test]
fn modulus_table_from_env() {
    let path = std::env::temp_dir().join(format!("linroot-moduli-{}.txt", std::process::id()));
    std::fs::write(&path, "4 0x19\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_linroot"))
        .args(["nl2-exact", "--n", "4", "--function", "01:7", "--format", "json"])
        .env("LINROOT_MODULUS_TABLE", &path)
        .output()
        .unwrap();
    std::fs::remove_file(&path).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["modulus"], "0x19");
    assert_eq!(v["result"]["nl2"], 2);
}

#[test]
fn readme_examples_are_golden_cases() {
    let readme = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../README.md");
    let text = std::fs::read_to_string(readme).expect("README.md at the workspace root");
    let examples: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix("$ linroot ")).collect();
    assert!(!examples.is_empty());
    for ex in examples {
        assert!(CASES.iter().any(|(_, a)| *a == ex.trim()), "README example not covered: {ex}");
    }
}
