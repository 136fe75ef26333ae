use std::io::Write;
use std::process::{Command, Output, Stdio};

fn glat(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_glat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &str) -> String {
    let out = glat(args, stdin);
    assert!(
        out.status.success(),
        "glat {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn gallery(args: &[&str]) -> String {
    let mut full = vec!["gallery"];
    full.extend_from_slice(args);
    ok(&full, "")
}

#[test]
fn trepalin_pipeline_reports_h1_of_w() {
    let lat = gallery(&["trepalin", "--n", "1"]);
    let report = ok(&["cohomology", "--all-subgroups"], &lat);
    assert!(report.contains("H1(W) = (2,2)\n"), "{report}");
    let kv = ok(&["cohomology", "--format", "kv"], &lat);
    assert!(kv.contains("profile.h1_whole=(2,2)\n"));
    assert!(kv.contains("profile.rows=1\n"));
}

#[test]
fn kv_output_is_sorted() {
    let lat = gallery(&["torus-w"]);
    let kv = ok(&["check", "stably-permutation", "--format", "kv"], &lat);
    let keys: Vec<&str> = kv.lines().map(|l| l.split('=').next().unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(kv.contains("verdict.verdict=NotStablyPermutation\n"));
}

#[test]
fn single_subgroup_and_dual() {
    let lat = gallery(&["trepalin", "--n", "2"]);
    let report = ok(&["cohomology", "--subgroup", "3", "--dual", "--format", "kv"], &lat);
    assert!(report.contains("profile.000.h1n=(2,2,2,2,2,2,2,2)\n"), "{report}");
    assert!(report.contains("profile.000.h1nd=(2,2,2,2,2,2,2,2)\n"));
}

#[test]
fn coflasque_check_on_permutation_lattice() {
    let perm = r#"{
        "name": "Z[C2]",
        "rank": 2,
        "group": {"degree": 1, "generators": {"t": [[-1]]}},
        "action": {"generators": {"t": [[0, 1], [1, 0]]}}
    }"#;
    let out = ok(&["check", "coflasque", "--format", "kv"], perm);
    assert!(out.contains("check.holds=true\n"));
    let out = ok(&["check", "permutation", "--format", "kv"], perm);
    assert!(out.contains("check.holds=true\n"));
    let out = ok(&["check", "stably-permutation"], perm);
    assert!(out.contains("outcome: Proven"));
}

#[test]
fn flasque_part_of_torus_is_consistent_but_unknown() {
    let lat = gallery(&["torus-w"]);
    let out = ok(&["report", "theorem-b", "--flasque-part"], &lat);
    assert!(out.contains("verdict: ConsistentWithStablyPermutation"));
    assert!(out.contains("NOT a proof"));
    assert!(out.contains("outcome: Unknown"));
    assert!(out.contains("rank_bound: 19"));
    assert!(out.contains("coeff_bound: 3"));
}

#[test]
fn bounds_are_echoed() {
    let lat = gallery(&["torus-w"]);
    let out = ok(
        &["report", "theorem-b", "--flasque-part", "--rank-bound", "12", "--coeff-bound", "1", "--max-pairs", "5", "--format", "kv"],
        &lat,
    );
    assert!(out.contains("search.rank_bound=12\n"));
    assert!(out.contains("search.coeff_bound=1\n"));
    assert!(out.contains("search.max_pairs=5\n"));
}

#[test]
fn flasque_resolution_emits_f() {
    let lat = gallery(&["torus-w"]);
    let f = ok(&["flasque-resolution", "--emit-f"], &lat);
    assert!(f.contains("\"name\": \"F(torus-w)\""));
    let flasque = ok(&["check", "flasque", "--format", "kv"], &f);
    assert!(flasque.contains("check.holds=true\n"));
    let coflasque = ok(&["check", "coflasque", "--format", "kv"], &f);
    assert!(coflasque.contains("check.holds=true\n"));
}

#[test]
fn round_trip_keeps_reports_identical() {
    for args in [vec!["torus-pi"], vec!["torus-w"], vec!["trepalin", "--n", "3"]] {
        let once = gallery(&args);
        let twice = ok(&["show"], &once);
        let reexported = {
            let dir = std::env::temp_dir().join(format!("glat-rt-{}", std::process::id()));
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join(format!("{}.json", args.join("-")));
            std::fs::write(&path, &once).unwrap();
            ok(&["show", path.to_str().unwrap()], "")
        };
        assert_eq!(twice, reexported);
        let a = ok(&["cohomology", "--all-subgroups", "--dual"], &once);
        let b = ok(&["cohomology", "--all-subgroups", "--dual", "-"], &once);
        assert_eq!(a, b);
    }
}

#[test]
fn similar_identifies_groups() {
    let dir = std::env::temp_dir().join(format!("glat-sim-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    std::fs::write(&a, gallery(&["trepalin", "--n", "1"])).unwrap();
    std::fs::write(&b, gallery(&["trepalin", "--n", "2"])).unwrap();
    let out = ok(
        &["similar", a.to_str().unwrap(), b.to_str().unwrap(), "--identify-generators", "--format", "kv"],
        "",
    );
    assert!(out.contains("verdict.verdict=NotSimilar\n"));
    assert!(out.contains("verdict.left_order=4\n"));
    assert!(out.contains("verdict.right_order=16\n"));

    let same = ok(&["similar", a.to_str().unwrap(), a.to_str().unwrap(), "--format", "kv"], "");
    assert!(same.contains("verdict.verdict=Similar\n"));

    let t = dir.join("t.json");
    std::fs::write(&t, gallery(&["torus-pi"])).unwrap();
    let out = glat(&["similar", a.to_str().unwrap(), t.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    let cases: [(&[&str], &str); 6] = [
        (&["show"], "{ not json"),
        (&["show"], r#"{"name": "x", "group": {"degree": 1, "generators": {"t": [[3]]}}}"#),
        (&["show", "/nonexistent/lattice.json"], ""),
        (&["cohomology", "--subgroup", "40"], r#"{"name": "x", "group": {"degree": 1, "generators": {"t": [[-1]]}}}"#),
        (&["gallery", "trepalin", "--n", "0"], ""),
        (&["show", "--coeff-bound", "0"], ""),
    ];
    for (args, stdin) in cases {
        let out = glat(args, stdin);
        assert_eq!(out.status.code(), Some(2), "glat {args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn parse_errors_name_the_location() {
    let out = glat(
        &["show"],
        "{\"name\": \"x\", \"rank\": -1, \"group\": {\"degree\": 1, \"generators\": {}}}",
    );
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("<stdin>: rank"), "{err}");
    let out = glat(&["show"], "{\n  \"name\": \"x\"\n  \"rank\": 1\n}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3 column 3"), "{err}");
}

#[test]
fn unknown_flags_are_rejected() {
    let out = glat(&["show", "--colour"], "");
    assert_eq!(out.status.code(), Some(2));
}
