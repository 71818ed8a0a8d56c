//! End-to-end runs of the binary: exit-code contract, report determinism,
//! and the worked examples of each subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", &fixture("abelian.homalg"), "--kind", "linfty"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));

    let bad = run(&["verify", &fixture("broken_d2.homalg"), "--kind", "linfty"]);
    assert_eq!(code(&bad), 1);
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("FAIL"), "{text}");
    assert!(
        text.contains("residual"),
        "counterexample payload expected: {text}"
    );

    let ugly = run(&["verify", &fixture("malformed.homalg"), "--kind", "linfty"]);
    assert_eq!(code(&ugly), 2);

    // kind mismatch is a validation error
    let mismatch = run(&["verify", &fixture("abelian.homalg"), "--kind", "ainfty"]);
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn verify_other_kinds() {
    for (file, kind) in [
        ("dualnumbers.homalg", "ainfty"),
        ("morphism_id.homalg", "morphism"),
        ("derivation.homalg", "co"),
    ] {
        let out = run(&["verify", &fixture(file), "--kind", kind]);
        assert_eq!(
            code(&out),
            0,
            "{file}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for format in ["text", "machine"] {
        let a = run(&[
            "verify",
            &fixture("derivation.homalg"),
            "--kind",
            "co",
            "--format",
            format,
        ]);
        let b = run(&[
            "verify",
            &fixture("derivation.homalg"),
            "--kind",
            "co",
            "--format",
            format,
        ]);
        assert_eq!(a.stdout, b.stdout);
        // and under a different job count
        let c = run(&[
            "verify",
            &fixture("derivation.homalg"),
            "--kind",
            "co",
            "--format",
            format,
            "--jobs",
            "3",
        ]);
        assert_eq!(a.stdout, c.stdout);
    }
}

#[test]
fn trees_counts_and_split_table() {
    let out = run(&["trees", "--kind", "ordered", "--leaves", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("count: 3"), "{text}");

    let out2 = run(&["trees", "--kind", "ordered", "--leaves", "2"]);
    assert!(String::from_utf8_lossy(&out2.stdout).contains("count: 1"));

    let out3 = run(&[
        "trees",
        "--kind",
        "unordered",
        "--leaves",
        "3",
        "--format",
        "machine",
    ]);
    let json: serde_json::Value =
        serde_json::from_slice(&out3.stdout).expect("machine output is json");
    assert_eq!(
        json["tables"]["codim1_split_counts"]["(2,2)"],
        serde_json::json!(3)
    );

    let out4 = run(&[
        "trees",
        "--kind",
        "two-colored",
        "--leaves",
        "1",
        "--interior",
        "1",
        "--list",
    ]);
    assert_eq!(code(&out4), 0);
    assert!(String::from_utf8_lossy(&out4.stdout).contains("count: 3"));
}

#[test]
fn homology_modes() {
    let out = run(&[
        "homology",
        &fixture("times2.homalg"),
        "--mode",
        "complex",
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        json["tables"]["homology"]["(1)"]["torsion"],
        serde_json::json!(["2"])
    );

    let tel = run(&[
        "homology",
        &fixture("telescope_id.homalg"),
        "--mode",
        "telescope",
    ]);
    assert_eq!(code(&tel), 0);
    assert!(String::from_utf8_lossy(&tel.stdout).contains("colimit-comparison: equal"));

    let tel0 = run(&[
        "homology",
        &fixture("telescope_zero.homalg"),
        "--mode",
        "telescope",
    ]);
    assert_eq!(code(&tel0), 0);
    assert!(String::from_utf8_lossy(&tel0.stdout).contains("colimit-comparison: unequal"));

    let hh = run(&[
        "homology",
        &fixture("groundring.homalg"),
        "--mode",
        "hochschild",
        "--window",
        "0..0",
    ]);
    assert_eq!(code(&hh), 0, "{}", String::from_utf8_lossy(&hh.stdout));
    let text = String::from_utf8_lossy(&hh.stdout);
    assert!(text.contains("\"rank\":1"), "{text}");

    // an uncertified window is refused with exit 2
    let refused = run(&[
        "homology",
        &fixture("dualnumbers.homalg"),
        "--mode",
        "hochschild",
        "--window",
        "0..2",
        "--caps",
        "length=2",
    ]);
    assert_eq!(code(&refused), 2);
    assert!(String::from_utf8_lossy(&refused.stdout).contains("not certified"));
}
