mod common;

use common::{check_case, code, fixture, run, t1c_cases};

fn task() -> String {
    fixture("t1c/task.sas").display().to_string()
}

#[test]
fn worked_example_table() {
    let dir = tempfile::tempdir().unwrap();
    for case in t1c_cases() {
        check_case(&case, dir.path()).unwrap();
    }
}

#[test]
fn parallel_flag_gives_identical_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for parallel in [false, true] {
        let out = dir.path().join(format!("{}.json", parallel));
        let mut args = vec![
            "certify".to_string(),
            "--task".into(),
            task(),
            "--plans".into(),
            fixture("t1c/ab").display().to_string(),
            "--relation".into(),
            "loopless".into(),
            "--q".into(),
            "4".into(),
            "--output".into(),
            out.display().to_string(),
        ];
        if parallel {
            args.push("--parallel".into());
        }
        assert_eq!(code(&run(&args)), 0);
        reports.push(std::fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn plan_output_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("plans");
    let out = run(&[
        "plan",
        "--task",
        &task(),
        "--relation",
        "none",
        "--q",
        "4",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let first = std::fs::read_to_string(out_dir.join("001.plan")).unwrap();
    assert_eq!(first, "(a)\n(b)\n; cost = 2 (general cost)\n");
    assert!(out_dir.join("002.plan").exists());
    let trace: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["rounds"].as_array().unwrap().len(), 3);
    assert_eq!(trace["termination"]["reason"], "bound_exceeded");

    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        out_dir.to_str().unwrap(),
        "--q",
        "4",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn plan_top_k_stops_when_unsolvable() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("k");
    let out = run(&[
        "plan",
        "--task",
        &task(),
        "--k",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("003.plan").exists());
    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        out_dir.to_str().unwrap(),
        "--k",
        "3",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn transform_writes_task_and_map() {
    let dir = tempfile::tempdir().unwrap();
    let sas = dir.path().join("forbid.sas");
    let out = run(&[
        "transform",
        "--task",
        &task(),
        "--plans",
        fixture("t1c/ab").to_str().unwrap(),
        "--relation",
        "loopless",
        "--output",
        sas.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let transformed = topcert::sas::parse_sas_str(&std::fs::read_to_string(&sas).unwrap()).unwrap();
    let map: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("forbid.map.json")).unwrap())
            .unwrap();
    let map = map.as_object().unwrap();
    assert_eq!(map.len(), transformed.actions.len());
    assert!(map
        .values()
        .all(|v| ["a", "b", "c"].contains(&v.as_str().unwrap())));

    let out = run(&["enumerate", "--task", sas.to_str().unwrap(), "--q", "8"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn enumerate_lists_plans_in_cost_order() {
    let out = run(&["enumerate", "--task", &task(), "--q", "6"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "2 a b\n4 a c a b\n6 a c a c a b\n"
    );
    let out = run(&["enumerate", "--task", &task(), "--q", "6", "--loopless"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2 a b\n");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sas");
    std::fs::write(&bad, "begin_version\n3\nend_version\nbegin_metric\n7\n").unwrap();
    let out = run(&["enumerate", "--task", bad.to_str().unwrap(), "--q", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let plan = dir.path().join("x.plan");
    std::fs::write(&plan, "(b)\n").unwrap();
    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        plan.to_str().unwrap(),
        "--q",
        "2",
    ]);
    assert_eq!(code(&out), 2);

    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let out = run(&["certify", "--task", &task(), "--plans", "--q", "zz"]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        "--k",
        "2",
        "--mode",
        "oracle",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exhausted_limits_exit_3() {
    let out = run(&[
        "certify",
        "--task",
        &task(),
        "--plans",
        fixture("t1c/ab").to_str().unwrap(),
        "--relation",
        "loopless",
        "--q",
        "4",
        "--max-expansions",
        "1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive"));
}
