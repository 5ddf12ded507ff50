//! Golden files: the six constants reports and the six verify runs at
//! max-n 5, byte for byte. Set `SUBCRITICAL_BLESS=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use subcritical::cli::{execute, to_json, VerifyReport};
use subcritical::families::{Family, Structure};
use subcritical::singularity::ConstantsReport;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn check(name: &str, args: &[&str], expected_code: i32) -> String {
    let mut argv = vec!["subcritical"];
    argv.extend_from_slice(args);
    let out = execute(argv);
    assert_eq!(out.code, expected_code, "{name}: {}", out.stderr);
    let path = golden_dir().join(name);
    if std::env::var_os("SUBCRITICAL_BLESS").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, &out.stdout).unwrap();
    }
    let golden = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(golden == out.stdout, "{name} differs from the golden file");
    out.stdout
}

fn models() -> Vec<(Family, Structure)> {
    Family::ALL.iter().flat_map(|&f| Structure::ALL.iter().map(move |&s| (f, s))).collect()
}

#[test]
fn constants_reports() {
    for (f, s) in models() {
        let name = format!("constants_{f}_{s}.json");
        let text = check(&name, &["constants", "--family", f.name(), "--structure", s.name()], 0);
        let parsed: Vec<ConstantsReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json(&parsed), text);
    }
}

#[test]
fn verify_runs() {
    for (f, s) in models() {
        let name = format!("verify_{f}_{s}.json");
        let text = check(&name, &["verify", "--family", f.name(), "--structure", s.name(), "--max-n", "5"], 0);
        let parsed: Vec<VerifyReport> = serde_json::from_str(&text).unwrap();
        assert!(parsed.iter().all(|r| r.agree));
        assert_eq!(to_json(&parsed), text);
    }
}
