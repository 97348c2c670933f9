#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// One row of the t1c worked example.
pub struct Case {
    pub name: &'static str,
    pub plans: &'static str,
    /// `--relation`, `--q` or `--k` and their values.
    pub bound: &'static [&'static str],
    pub exit: i32,
    pub verdict: &'static str,
    pub witness: Option<&'static [&'static str]>,
}

pub fn t1c_cases() -> Vec<Case> {
    vec![
        Case {
            name: "loopless-q4-ab",
            plans: "ab",
            bound: &["--relation", "loopless", "--q", "4"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "loopless-q4-empty",
            plans: "empty",
            bound: &["--relation", "loopless", "--q", "4"],
            exit: 1,
            verdict: "refuted",
            witness: Some(&["a", "b"]),
        },
        Case {
            name: "loopless-x2-ab",
            plans: "ab",
            bound: &["--relation", "loopless", "--q", "x2.0"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "loopless-q4-both",
            plans: "both",
            bound: &["--relation", "loopless", "--q", "4"],
            exit: 1,
            verdict: "refuted",
            witness: Some(&["a", "c", "a", "b"]),
        },
        Case {
            name: "none-q2-ab",
            plans: "ab",
            bound: &["--relation", "none", "--q", "2"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "none-q4-ab",
            plans: "ab",
            bound: &["--relation", "none", "--q", "4"],
            exit: 1,
            verdict: "refuted",
            witness: Some(&["a", "c", "a", "b"]),
        },
        Case {
            name: "none-q4-both",
            plans: "both",
            bound: &["--relation", "none", "--q", "4"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "topk-2-both",
            plans: "both",
            bound: &["--k", "2"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "topk-1-ab",
            plans: "ab",
            bound: &["--k", "1"],
            exit: 0,
            verdict: "certified",
            witness: None,
        },
        Case {
            name: "topk-3-ab",
            plans: "ab",
            bound: &["--k", "3"],
            exit: 1,
            verdict: "refuted",
            witness: Some(&["a", "c", "a", "b"]),
        },
    ]
}

fn certify_args(case: &Case, mode: &str, output: &Path) -> Vec<String> {
    let mut args: Vec<String> = vec![
        "certify".into(),
        "--task".into(),
        fixture("t1c/task.sas").display().to_string(),
        "--plans".into(),
        fixture(&format!("t1c/{}", case.plans))
            .display()
            .to_string(),
        "--mode".into(),
        mode.into(),
        "--output".into(),
        output.display().to_string(),
    ];
    args.extend(case.bound.iter().map(|s| s.to_string()));
    args
}

/// Runs `case` through the binary and checks exit code, verdict, witness,
/// byte-identical reports across runs, the stored report, and agreement of
/// the oracle mode where it applies.
pub fn check_case(case: &Case, scratch: &Path) -> Result<(), String> {
    let first = scratch.join(format!("{}.1.json", case.name));
    let second = scratch.join(format!("{}.2.json", case.name));
    let out = run(&certify_args(case, "transform", &first));
    if code(&out) != case.exit {
        return Err(format!(
            "{}: exit {} (expected {}): {}",
            case.name,
            code(&out),
            case.exit,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let bytes = std::fs::read(&first).map_err(|e| format!("{}: {}", case.name, e))?;
    let report: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| format!("{}: {}", case.name, e))?;
    if report["verdict"] != case.verdict {
        return Err(format!("{}: verdict {}", case.name, report["verdict"]));
    }
    if let Some(expected) = case.witness {
        let actions = &report["witness"]["plan"]["actions"];
        if *actions != serde_json::json!(expected) {
            return Err(format!("{}: witness {}", case.name, report["witness"]));
        }
    }

    run(&certify_args(case, "transform", &second));
    if std::fs::read(&second).ok().as_deref() != Some(&bytes[..]) {
        return Err(format!("{}: report differs between runs", case.name));
    }
    let stored = fixture(&format!("t1c/expected/{}.json", case.name));
    match std::fs::read(&stored) {
        Ok(expected) if expected == bytes => {}
        Ok(_) => {
            return Err(format!(
                "{}: report differs from {}",
                case.name,
                stored.display()
            ))
        }
        Err(e) => return Err(format!("{}: {}: {}", case.name, stored.display(), e)),
    }

    if case.bound.contains(&"--q") {
        let oracle = scratch.join(format!("{}.oracle.json", case.name));
        let out = run(&certify_args(case, "oracle", &oracle));
        if code(&out) != case.exit {
            return Err(format!("{}: oracle mode exit {}", case.name, code(&out)));
        }
    }
    Ok(())
}
