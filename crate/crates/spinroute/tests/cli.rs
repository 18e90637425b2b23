use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn spinroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinroute")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn schedule_surface_succeeds() {
    let o = spinroute(&["schedule", "--code", "surface:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# spinroute "));
    assert!(text.contains("\n# config {\"code\":\"surface:3\""));
    assert!(text.contains("\n# input code surface:3 sha256 "));
    assert!(text.lines().any(|l| l.starts_with("a0 INIT 0 500 ")));
}

#[test]
fn corrupt_code_file_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "bad.code");
    std::fs::write(&f, "3 ? ? broken\nHX\n1 1 x\n").unwrap();
    let o = spinroute(&["schedule", "--code", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(spinroute(&["schedule", "--code", &path(&dir, "missing.code")]).status.code(), Some(3));
    assert_eq!(spinroute(&["schedule", "--basis", "y"]).status.code(), Some(3));
}

#[test]
fn tiny_grid_is_infeasible() {
    let o = spinroute(&["schedule", "--code", "surface:5", "--width", "3", "--height", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emit_variants_differ() {
    let variants = [
        vec!["emit", "--basis", "z", "--tailor"],
        vec!["emit", "--basis", "x", "--no-tailor"],
        vec!["emit", "--basis", "z", "--per-edge-noise"],
    ];
    let outs: Vec<String> = variants
        .iter()
        .map(|v| {
            let o = spinroute(v);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            stdout(&o)
        })
        .collect();
    for o in &outs {
        assert!(o.starts_with("# spinroute "));
        assert!(o.contains("DETECTOR"));
        assert!(o.contains("OBSERVABLE_INCLUDE(0)"));
    }
    let bodies: Vec<Vec<&str>> = outs.iter().map(|o| o.lines().filter(|l| !l.starts_with('#')).collect()).collect();
    assert_ne!(bodies[0], bodies[1]);
    assert_ne!(bodies[0], bodies[2]);
    assert_ne!(bodies[1], bodies[2]);
}

#[test]
fn verify_reports() {
    let o = spinroute(&["verify", "--code", "surface:3", "--tailor"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for check in ["PASS schedule", "PASS determinism", "PASS tailoring", "verify: PASS"] {
        assert!(text.contains(check), "{text}");
    }

    let o = spinroute(&["verify", "--code", "surface:3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS schedule") && text.contains("INFO tailoring"), "{text}");
    assert!(text.lines().any(|l| l.contains("data residue [Z")), "{text}");
}

#[test]
fn verify_catches_injected_collision() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "s.txt");
    assert_eq!(spinroute(&["schedule", "-o", &f]).status.code(), Some(0));
    let text = std::fs::read_to_string(&f).unwrap();
    // a1 becomes a copy of a0, so the two share every component at every instant.
    let mut edited = String::new();
    for l in text.lines() {
        if l.starts_with("a1 ") || l.starts_with("# ancilla 1 ") {
            continue;
        }
        edited.push_str(l);
        edited.push('\n');
        if let Some(rest) = l.strip_prefix("# ancilla 0 ") {
            edited.push_str(&format!("# ancilla 1 {rest}\n"));
        }
    }
    for l in text.lines().filter(|l| l.starts_with("a0 ")) {
        edited.push_str(&format!("a1{}\n", &l[2..]));
    }
    std::fs::write(&f, edited).unwrap();
    let o = spinroute(&["verify", "--schedule", &f]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL schedule") && out.contains("collision") && out.contains("verify: FAIL"), "{out}");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for (cmd, extra) in
        [("schedule", None), ("schedule", Some("--json")), ("emit", None), ("verify", None), ("stats", Some("--csv"))]
    {
        let run = |name: &str| {
            let f = path(&dir, name);
            let mut args = vec![cmd, "--code", "surface:5", "--rounds", "2", "-o", &f];
            args.extend(extra);
            assert_eq!(spinroute(&args).status.code(), Some(0));
            std::fs::read(&f).unwrap()
        };
        let a = run("a");
        assert_eq!(a, run("b"), "{cmd}");
        assert!(a.starts_with(b"# spinroute ") || a.starts_with(b"{"));
    }
}

#[test]
fn saved_schedules_feed_emit() {
    let dir = TempDir::new().unwrap();
    let direct = stdout(&spinroute(&["emit", "--rounds", "2", "--tailor"]));
    for json in [false, true] {
        let f = path(&dir, if json { "s.json" } else { "s.txt" });
        let mut args = vec!["schedule", "--rounds", "2", "--tailor", "-o", &f];
        if json {
            args.push("--json");
        }
        assert_eq!(spinroute(&args).status.code(), Some(0));
        let o = spinroute(&["emit", "--schedule", &f]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), direct);
        assert_eq!(spinroute(&["verify", "--schedule", &f]).status.code(), Some(0));
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "run.toml");
    std::fs::write(&f, "code = \"surface:3\"\nrounds = 3\nbasis = \"x\"\n").unwrap();
    let o = spinroute(&["schedule", "--config", &f, "--rounds", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"rounds\":2") && text.contains("\"basis\":\"x\""));
    std::fs::write(&f, "colour = 3\n").unwrap();
    assert_eq!(spinroute(&["schedule", "--config", &f]).status.code(), Some(3));
}

#[test]
fn stats_over_a_corpus() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let dir = TempDir::new().unwrap();
    std::fs::copy(data.join("bb72.code"), dir.path().join("bb72.code")).unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let o = spinroute(&["stats", "--corpus", &dir.path().to_string_lossy(), "--csv", "--convention", "open"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("code,n,k,d,check_weight,ancillae,mean_shuttles"));
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("bb72,72,12,6,6,72,"));
    assert!(rows[1].contains(",open,"));
    assert!(text.contains("bb72.code sha256 "));
}
