use std::path::Path;

use gca_core::cli::{run_cli, CertificateRecord};
use gca_core::verdict::Witness;
use gca_core::Status;

const SHIFT: &str = r#"
[[job]]
name = "shift"
universe = { kind = "free-abelian", rank = 1 }
alphabet = { kind = "vector", p = 2, dim = 1 }
rule = { memory = [[1]], kind = "linear", data = [1] }
"#;

const RING: &str = r#"
[[job]]
universe = { kind = "cyclic", n = 2 }
ring = { p = 2, n = 1, support = [{ element = 0, entries = [1] }, { element = 1, entries = [1] }] }
"#;

const SWEEP: &str = r#"
[[job]]
universe = { kind = "cyclic", n = 3 }
alphabet = { kind = "group", group = { kind = "cyclic", n = 2 } }
memory = [0, 1]
"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gca").chain(args.iter().copied()).map(String::from);
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn records(out: &str) -> Vec<CertificateRecord> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn invert_shift_exits_zero_with_inverse_at_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shift.toml", SHIFT);
    let (code, out, _) = run(&["invert", &cfg]);
    assert_eq!(code, 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    let v = recs[0].verdict.as_ref().unwrap();
    assert_eq!(v.status, Status::CertifiedYes);
    let Some(Witness::InverseRule { rule, .. }) = &v.witness else { panic!("{v:?}") };
    // memory {-1, 0, 1}, weight 1 on -1 only
    assert_eq!(rule.data, vec![1, 0, 0]);
}

#[test]
fn stable_finite_on_singular_element_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ring.toml", RING);
    let (code, out, err) = run(&["stable-finite", &cfg]);
    assert_eq!(code, 1);
    assert!(err.contains("singular"));
    let v = records(&out)[0].verdict.clone().unwrap();
    assert!(matches!(v.witness, Some(Witness::SingularRegularRepresentation { size: 2, rank: 1 })));
}

#[test]
fn sweep_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let (code, out, _) = run(&["sweep", &cfg]);
    assert_eq!(code, 0);
    let v = records(&out)[0].verdict.clone().unwrap();
    let Some(Witness::SweepReport { rules, injective, surjective_among_injective, violations }) = v.witness else {
        panic!()
    };
    assert_eq!((rules, injective, surjective_among_injective, violations.len()), (4, 2, 2, 0));
}

#[test]
fn verify_confirms_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shift.toml", SHIFT);
    let ring = write(dir.path(), "ring.toml", RING);
    let mut corpus = String::new();
    for (cmd, cfg) in [
        ("invert", &cfg),
        ("check-injective", &cfg),
        ("check-surjective", &cfg),
        ("goe", &cfg),
        ("pre-injective", &cfg),
        ("post-surjective", &cfg),
        ("exact-1d", &cfg),
        ("phi", &ring),
        ("left-inverse", &ring),
        ("stable-finite", &ring),
    ] {
        let (code, out, _) = run(&[cmd, cfg]);
        assert!(code < 3, "{cmd}: {out}");
        corpus.push_str(&out);
    }
    let certs = write(dir.path(), "certs.jsonl", &corpus);
    let (code, out, _) = run(&["verify", &certs]);
    assert_eq!(code, 0, "{out}");

    let (_, out, _) = run(&["invert", &cfg]);
    let tampered = out.replace("\"data\":[1,0,0]", "\"data\":[0,0,1]");
    assert_ne!(tampered, out);
    let bad = write(dir.path(), "bad.jsonl", &tampered);
    assert_eq!(run(&["verify", &bad]).0, 1);
}

#[test]
fn malformed_inputs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_key = write(dir.path(), "a.toml", &SHIFT.replace("name =", "nmae ="));
    let (code, _, err) = run(&["invert", &unknown_key]);
    assert_eq!(code, 3);
    let diag: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(diag["error"]["kind"], "Config");

    let missing_rule = write(dir.path(), "b.toml", RING);
    assert_eq!(run(&["invert", &missing_rule]).0, 3);
    assert_eq!(run(&["invert", "/nonexistent/file.toml"]).0, 3);

    let garbage = write(dir.path(), "c.jsonl", "{\"tool_version\": 1}\n");
    assert_eq!(run(&["verify", &garbage]).0, 3);

    let (_, out, _) = run(&["invert", &write(dir.path(), "d.toml", SHIFT)]);
    let future = write(dir.path(), "e.jsonl", &out.replace("\"tool_version\":\"0.1.0\"", "\"tool_version\":\"9.0.0\""));
    assert_eq!(run(&["verify", &future]).0, 3);
}

#[test]
fn output_is_deterministic_modulo_duration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shift.toml", &format!("{SHIFT}{}", SHIFT.replace("shift", "shift2")));
    let strip = |out: String| {
        records(&out)
            .into_iter()
            .map(|mut r| {
                r.duration_ms = 0;
                serde_json::to_string(&r).unwrap()
            })
            .collect::<Vec<_>>()
    };
    let a = strip(run(&["check-injective", &cfg, "--jobs", "1"]).1);
    let b = strip(run(&["check-injective", &cfg, "--jobs", "4"]).1);
    assert_eq!(a, b);
    assert_eq!(a.len(), 2);
}

#[test]
fn job_params_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "shift.toml", &format!("{SHIFT}params = {{ max_radius = 0 }}\n"));
    // radius 0 cannot express the inverse of a shift
    let (code, out, _) = run(&["invert", &cfg, "--max-radius", "3"]);
    assert_eq!(code, 2, "{out}");
    let (code, _, _) = run(&["invert", &write(dir.path(), "s.toml", SHIFT), "--max-radius", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn help_lists_flags() {
    let (code, out, _) = run(&["invert", "--help"]);
    assert_eq!(code, 0);
    for flag in ["--max-radius", "--max-n", "--period-bound", "--budget", "--seed", "--jobs", "--cap", "GCA_CAP"] {
        assert!(out.contains(flag), "{flag} missing from help");
    }
}
