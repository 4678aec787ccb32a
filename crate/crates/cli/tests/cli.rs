//! End-to-end runs of the `formstr` binary.
//!
//! Golden reports live in `tests/golden/`; the statistics section is
//! dropped before comparing. Set `FORMSTR_UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn formstr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formstr"))
        .args(args)
        .env_remove("FORMSTRENGTH_WORKERS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.code() == Some(0) || out.status.code() == Some(3),
        "status {:?}, stderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn assert_golden(name: &str, out: &Output) {
    let mut value = report(out);
    assert!(value["statistics"].is_object(), "{name}: statistics section missing");
    value["statistics"] = Value::Null;
    let text = serde_json::to_string_pretty(&value).unwrap() + "\n";
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var("FORMSTR_UPDATE_GOLDEN").as_deref() == Ok("1") {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(text, expected, "{name} differs from its golden file");
}

#[test]
fn strength_exact_on_weighted_form() {
    let out = formstr(&[
        "strength",
        "--exact",
        "--ring",
        "GF(2)[x:1,y:1,f:2,g:2]",
        "x^2*f + y^2*g",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["value"], 2);
    assert_golden("strength_exact_weighted", &out);
}

#[test]
fn worker_count_never_changes_values() {
    let args = [
        "strength",
        "--builtin",
        "analog:k=3",
        "--field",
        "GF(2)",
        "--max-r",
        "3",
    ];
    let one = report(&formstr(&args));
    let mut three = args.to_vec();
    three.extend(["--workers", "3"]);
    let three = report(&formstr(&three));
    assert_eq!(one["result"], three["result"]);
    assert_eq!(one["result"]["value"], 3);
    assert_eq!(three["statistics"]["workers"], 3);

    let env = Command::new(env!("CARGO_BIN_EXE_formstr"))
        .args(args)
        .env("FORMSTRENGTH_WORKERS", "2")
        .output()
        .unwrap();
    let env = report(&env);
    assert_eq!(env["statistics"]["workers"], 2);
    assert_eq!(env["result"], one["result"]);
}

#[test]
fn analogue_golden() {
    assert_golden(
        "strength_analog_k3",
        &formstr(&[
            "strength",
            "--builtin",
            "analog:k=3",
            "--field",
            "GF(2)",
            "--max-r",
            "3",
        ]),
    );
}

#[test]
fn strength_upper_and_hint() {
    let out = formstr(&["strength", "--upper", "--builtin", "paper-h", "--field", "GF(2)"]);
    let r = report(&out);
    assert_eq!(r["result"]["mode"], "upper-only");
    assert_eq!(r["result"]["upper_bound"], 4);
    assert_golden("strength_upper_paper_h", &out);

    let out = formstr(&[
        "strength",
        "--upper",
        "--ring",
        "QQ[x, y]",
        "x^2 - y^2",
        "--hint",
        "(x + y)*(x - y)",
    ]);
    assert_eq!(report(&out)["result"]["upper_bound"], 1);
}

#[test]
fn border_decomposition_verifies() {
    let dec = "(x^2 + g)*(y^2 + f); (-u^2 + q)*(v^2 - p); (-x*y - u*v)*(x*y - u*v)";
    let out = formstr(&[
        "strength",
        "--builtin",
        "paper-h-at:t0=1",
        "--field",
        "GF(5)",
        "--verify",
        dec,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["verified"], true);
    assert_golden("verify_border_t1_gf5", &out);

    // The same certificate does not decompose h itself.
    let out = formstr(&["strength", "--builtin", "paper-h", "--field", "GF(5)", "--verify", dec]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["result"]["verified"], false);
}

#[test]
fn parse_builtins() {
    let out = formstr(&["parse", "--builtin", "paper-h"]);
    assert_eq!(
        report(&out)["result"]["polynomials"][0]["polynomial"],
        "x^2*f + y^2*g + u^2*p + v^2*q"
    );
    assert_golden("parse_paper_h", &out);
    assert_golden(
        "parse_paper_h_t",
        &formstr(&["parse", "--builtin", "paper-h-t", "--field", "GF(7)"]),
    );
    assert_golden("parse_instance_m2", &formstr(&["parse", "--builtin", "instance:m=2"]));

    let out = formstr(&["parse", "--ring", "QQ[x, y]", "(x+y)*(x-y)"]);
    assert_eq!(report(&out)["result"]["polynomials"][0]["polynomial"], "x^2 + -1*y^2");
}

#[test]
fn slice_rank_commands() {
    let out = formstr(&["slice-rank", "--ring", "GF(2)[x1, x2, x3, x4]", "x1*x2 + x3*x4"]);
    let r = report(&out);
    assert_eq!(r["result"]["value"], 2);
    assert_eq!(r["certificate"]["subspace"], serde_json::json!(["x1 = 0", "x3 = 0"]));
    assert_golden("slice_rank_x1x2_x3x4", &out);

    let out = formstr(&[
        "slice-rank",
        "--codim",
        "1",
        "--ring",
        "GF(2)[x1, x2, x3, x4]",
        "x1*x2 + x3*x4",
    ]);
    let r = report(&out);
    assert_eq!(r["result"]["found"], false);
    assert!(r["certificate"].is_null());
}

#[test]
fn groebner_commands() {
    let ring = "QQ[x, y, u, v]";
    let out = formstr(&["gb", "--ring", ring, "x^2", "y^2", "u^2", "v^2"]);
    assert_eq!(report(&out)["certificate"]["s_pairs_reduce_to_zero"], true);
    assert_golden("gb_squares", &out);

    let out = formstr(&["gb", "--order", "lex", "--ring", "QQ[x, y]", "x^2 - y", "x*y - 1"]);
    assert_eq!(report(&out)["result"]["order"], "lex");
    assert_golden("gb_lex", &out);

    let out = formstr(&["dim", "--ring", ring, "x^2", "y^2", "u^2", "v^2"]);
    let r = report(&out);
    assert_eq!(
        (r["result"]["dimension"].clone(), r["result"]["codimension"].clone()),
        (0.into(), 4.into())
    );
    assert_golden("dim_squares", &out);

    let out = formstr(&["member", "--ring", ring, "x^2", "x + y", "y + u", "u + v"]);
    assert_eq!(report(&out)["result"]["member"], false);
    let out = formstr(&["member", "--ring", ring, "x*y - u*v", "x", "u"]);
    assert_eq!(report(&out)["result"]["member"], true);
    assert_golden("member_true", &out);
}

#[test]
fn singular_locus_commands() {
    let out = formstr(&["ah-bound", "--builtin", "lemma10:m=1"]);
    let r = report(&out);
    assert!(r["result"]["codim"].as_i64().unwrap() <= 4);
    assert!(r["result"]["bound"].as_i64().unwrap() <= 2);
    assert_golden("ah_bound_instance_m1", &out);
    assert_golden(
        "ah_bound_instance_m2",
        &formstr(&["ah-bound", "--builtin", "instance:m=2"]),
    );

    let out = formstr(&["sing-codim", "--builtin", "instance:m=1"]);
    assert_eq!(report(&out)["result"]["codimension"], 4);
    assert_golden("sing_codim_instance_m1", &out);

    let out = formstr(&["ah-bound", "--builtin", "instance:m=1", "--field", "GF(2)"]);
    assert_eq!(report(&out)["result"]["characteristic_caveat"], true);
}

#[test]
fn verify_paper_passes() {
    let out = formstr(&["verify-paper", "--field", "GF(2)"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["passed"], true);
    assert_eq!(r["result"]["checks"].as_array().unwrap().len(), 8);
    assert_golden("verify_paper_gf2", &out);

    let out = formstr(&["verify-paper", "--field", "QQ", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn campaign_slice_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cp = cp.to_str().unwrap();
    let out = formstr(&["campaign", "--resume", cp, "--shapes", "0", "--max-chunks", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["status"], "paused");
    let out = formstr(&["campaign", "--resume", cp, "--shapes", "0"]);
    let r = report(&out);
    assert_eq!(r["result"]["status"], "completed");
    assert_eq!(r["result"]["progress"][0]["tuples"], 455);

    let fresh = dir.path().join("fresh.json");
    assert_golden(
        "campaign_case_a",
        &formstr(&["campaign", "--resume", fresh.to_str().unwrap(), "--shapes", "0"]),
    );

    std::fs::write(dir.path().join("bad.json"), "not json").unwrap();
    let out = formstr(&[
        "campaign",
        "--resume",
        dir.path().join("bad.json").to_str().unwrap(),
        "--shapes",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = formstr(&[
        "campaign",
        "--resume",
        dir.path().join("gf3.json").to_str().unwrap(),
        "--field",
        "GF(3)",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tuples"));
}

#[test]
fn inputs_from_files_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("ring.txt");
    let polys = dir.path().join("polys.txt");
    let report_path = dir.path().join("out.json");
    std::fs::write(&ring, "ring QQ[x, y, u, v]\n").unwrap();
    std::fs::write(&polys, "# the squares\nx^2\ny^2 # second\n\nu^2\nv^2\n").unwrap();
    let out = formstr(&[
        "dim",
        "--ring-file",
        ring.to_str().unwrap(),
        "--file",
        polys.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(written["result"]["codimension"], 4);

    // Equivalent inputs hash to the same digest.
    let inline = report(&formstr(&["dim", "--ring", "QQ[x,y,u,v]", "x^2", "y*y", "u^2", "v^2"]));
    assert_eq!(inline["input_digest"], written["input_digest"]);
}

#[test]
fn errors_and_exit_codes() {
    let out = formstr(&["parse", "--ring", "QQ[x, y]", "x + w"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown symbol `w` at column 5"), "{err}");
    assert!(err.contains("    ^"), "{err}");

    let out = formstr(&["parse", "--ring", "GF(2)[x]", "x/2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["parse", "--ring", "GF(4)[x]", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["strength", "--ring", "QQ[x, y]", "x*y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("finite field"));

    let out = formstr(&["strength", "--ring", "GF(2)[x, y]", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["parse", "--builtin", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["parse", "--builtin", "instance:m=0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["parse", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["member", "--ring", "QQ[x]", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["sing-codim", "--ring", "QQ[x, y]", "x", "y"]);
    assert_eq!(out.status.code(), Some(2));

    let out = formstr(&["parse", "--ring-file", "/nonexistent/ring.txt", "x"]);
    assert_eq!(out.status.code(), Some(1));
}
