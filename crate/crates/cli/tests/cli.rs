//! End-to-end checks of the `borelgame` binary: output text, exit codes,
//! and the JSON round trip between `spe` and `verify`.

use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_borelgame");

fn scenario(name: &str) -> String {
    let path: PathBuf =
        [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    path.canonicalize()
        .unwrap_or_else(|e| panic!("scenario {name} not found: {e}"))
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BORELGAME_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

#[test]
fn solve_walks_the_loop_game_to_the_known_fixed_point() {
    let out = run(&["solve", &scenario("g1.game")]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("k* = 1"), "missing iteration count:\n{text}");
    assert!(text.contains("alpha*: v1=1, v2=1"), "missing fixed point:\n{text}");
    assert!(text.contains("v1 -go-> v2 -stop-> t2  payoff (3, 1)"), "missing threat:\n{text}");
    assert!(text.contains("verdict: pass"), "missing verdict:\n{text}");
}

#[test]
fn verify_passes_on_the_constructed_profile() {
    let out = run(&["verify", &scenario("g1.game")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("verdict: pass"));
}

#[test]
fn verify_rejects_a_profile_built_from_toothless_threats() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("sabotaged-profile.json");
    std::fs::write(
        &path,
        r#"{
            "plan_mode": "root-threat",
            "root_plan": "v1 -stop-> t1",
            "threats": {
                "v1": {"P1": "v1 -stop-> t1", "P2": "v1 -stop-> t1"},
                "v2": {"P1": "v2 -stop-> t2", "P2": "v2 -stop-> t2"}
            }
        }"#,
    )
    .expect("temp profile written");
    let out = run(&["verify", &scenario("g1.game"), "--profile", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "doctored threats must fail certification");
    let text = stdout_of(&out);
    assert!(text.contains("verdict: FAIL"), "missing verdict:\n{text}");
    assert!(text.contains("gains 2 by deviating"), "missing gain report:\n{text}");
}

#[test]
fn spe_json_round_trips_through_verify() {
    let out = run(&["spe", &scenario("g1.game"), "--json"]);
    assert!(out.status.success());
    let doc = stdout_of(&out);
    assert!(doc.contains("\"root-threat\""), "unexpected document:\n{doc}");
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("round-trip-profile.json");
    std::fs::write(&path, &doc).expect("temp profile written");
    let out = run(&["verify", &scenario("g1.game"), "--profile", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "round-tripped profile must certify");
}

#[test]
fn verify_emits_machine_readable_rows() {
    let out = run(&["verify", &scenario("g1.game"), "--json", "--epsilon", "1/2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid JSON");
    assert_eq!(v["epsilon"], "1/2");
    assert_eq!(v["pass"], true);
    assert_eq!(v["strict"], false);
    let rows = v["rows"].as_array().expect("rows array");
    assert_eq!(rows.len(), 10, "two players at five (vertex, memory) pairs");
    assert!(rows.iter().all(|r| r["slack"] == "0"));
}

#[test]
fn missing_input_file_is_an_input_error() {
    let out = run(&["solve", "no-such-file.game"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_seed_override_is_an_input_error() {
    let out = Command::new(BIN)
        .args(["value", &scenario("g1.game")])
        .env("BORELGAME_SEED", "junk")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn uncertified_games_cannot_be_solved_or_verified() {
    for cmd in ["solve", "verify"] {
        let out = run(&[cmd, &scenario("counterexample.game")]);
        assert_eq!(out.status.code(), Some(2), "`{cmd}` must refuse the tail-table game");
    }
}

#[test]
fn export_is_byte_stable_and_shows_the_annotated_vertex() {
    let first = run(&["export", &scenario("g1.game")]);
    let second = run(&["export", &scenario("g1.game")]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "export must be deterministic");
    let text = stdout_of(&first);
    assert!(text.contains(r#"v1 [label="v1|P1|1"]"#), "missing annotated vertex:\n{text}");
    let plain = stdout_of(&run(&["export", &scenario("g1.game"), "--plain"]));
    assert!(plain.contains(r#"v1 [label="v1|P1"]"#), "plain export keeps labels off:\n{plain}");
}

#[test]
fn demo_counterexample_states_the_known_equilibrium_payoff() {
    let out = run(&["demo", "counterexample"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for row in ["(2, 2)", "(1, 2)", "(2, 1)", "(0, 0)"] {
        assert!(text.contains(row), "missing payoff row {row}:\n{text}");
    }
    assert!(text.contains("not lower-semi-continuous"), "missing warning:\n{text}");
    assert!(
        text.contains("unique subgame-perfect equilibrium payoff is (2, 2)"),
        "missing known result:\n{text}"
    );
    assert!(text.contains("no soundness is claimed"), "missing disclaimer:\n{text}");
}

#[test]
fn folk_crosscheck_agrees_on_the_bundled_acyclic_games() {
    for name in ["acyclic2.game", "tie.game", "single.game"] {
        let out = run(&["folk", &scenario(name), "--oracle"]);
        assert_eq!(out.status.code(), Some(0), "cross-check must agree on {name}");
        assert!(stdout_of(&out).contains("matches exactly"));
    }
}
