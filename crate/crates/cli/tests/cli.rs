use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(sub)
}

fn fixture(name: &str) -> String {
    dir("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ugpebble"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_ok(args: &[&str]) -> (String, Value) {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?}: {stdout}{stderr}");
    let v = serde_json::from_str(&stdout).unwrap();
    (stdout, v)
}

fn golden(name: &str, text: &str) {
    let want = fs::read_to_string(dir("golden").join(name)).unwrap();
    assert_eq!(text, want, "golden {name}");
}

#[test]
fn params_reference_fixture() {
    let (text, v) = json_ok(&["params", "--epsilon", "1/4", "--delta", "1/3", "--ell", "1"]);
    assert_eq!(
        (v["d"].as_u64(), v["gamma"].as_str()),
        (Some(3), Some("1/4"))
    );
    assert_eq!(
        (v["m"].as_u64(), v["r"].as_str()),
        (Some(10), Some("644939777"))
    );
    assert_eq!(v["desk_feasible"], false);
    golden("params-l1.json", &text);
}

#[test]
fn params_ell_two_fixture() {
    let (text, v) = json_ok(&["params", "--epsilon", "1/4", "--delta", "1/3", "--ell", "2"]);
    assert_eq!(
        (v["d"].as_u64(), v["gamma"].as_str()),
        (Some(5), Some("15/26"))
    );
    assert_eq!(
        (v["m"].as_u64(), v["r"].as_str()),
        (Some(10), Some("5679772126414"))
    );
    golden("params-l2.json", &text);
}

#[test]
fn opt_on_the_fig3_pair() {
    let (text, v) = json_ok(&["opt", "--in", &fixture("fig3-u2.json")]);
    assert_eq!(v["opt"], "5/12");
    golden("opt-fig3-u2.json", &text);
    let (text, v) = json_ok(&["opt", "--in", &fixture("fig2-u2.json")]);
    assert_eq!(v["opt"], "2/3");
    golden("opt-fig2-u2.json", &text);
    assert_eq!(
        json_ok(&["opt", "--in", &fixture("fig2-u1.json")]).1["opt"],
        "1"
    );
    assert_eq!(
        json_ok(&["opt", "--in", &fixture("fig3-u1.json")]).1["opt"],
        "1/2"
    );
}

#[test]
fn missing_input_is_a_domain_error() {
    let (code, stdout, _) = run(&["opt", "--in", "missing.json"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("missing.json"));
}

#[test]
fn malformed_input_is_a_domain_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"format":"ug-group-v1","m":1,"vertices":["a"],"edges":[{"u":"a","v":"b","shifts":["1"]}]}"#)
        .unwrap();
    let (code, stdout, _) = run(&["satcheck", "--in", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(serde_json::from_str::<Value>(&stdout).unwrap()["error"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["params", "--epsilon", "1/4"],
        &["opt", "--in", "x.json", "--frobnicate"],
        &["play", "--k", "2", "--spoiler", "psychic"],
    ] {
        let (code, stdout, stderr) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(stdout.is_empty());
        assert!(stderr.starts_with("error:"), "{stderr}");
    }
}

#[test]
fn out_of_domain_values_exit_one() {
    assert_eq!(
        run(&["params", "--epsilon", "1/2", "--delta", "1/3", "--ell", "1"]).0,
        1
    );
    assert_eq!(run(&["gapcheck", "--alpha", "3/2"]).0, 1);
    assert_eq!(
        run(&["decay", "--m", "3", "--ell", "3", "--d", "3", "--r", "2"]).0,
        1
    );
    assert_eq!(run(&["opt", "--in", &fixture("k4-graph.json")]).0, 1);
    assert_eq!(run(&["preset", "fig9"]).0, 1);
}

#[test]
fn satcheck_reports_the_conflict_cycle() {
    let (text, v) = json_ok(&["satcheck", "--in", &fixture("fig2-u2.json")]);
    assert_eq!(v["satisfiable"], false);
    assert_eq!(v["conflict"]["cycle"].as_array().unwrap().len(), 3);
    golden("satcheck-fig2-u2.json", &text);
    let (text, v) = json_ok(&["satcheck", "--in", &fixture("fig2-u1.json")]);
    assert_eq!(v["satisfiable"], true);
    golden("satcheck-fig2-u1.json", &text);
    assert_eq!(
        json_ok(&["satcheck", "--in", &fixture("fig3-u1.json")]).1["satisfiable"],
        false
    );
}

#[test]
fn gapcheck_flags_the_closed_form_at_alpha_one() {
    let (text, v) = json_ok(&["gapcheck", "--alpha", "1"]);
    assert_eq!(
        (v["ell"].as_u64(), v["ratio"].as_str()),
        (Some(2), Some("4/5"))
    );
    assert_eq!(
        (
            v["ell_closed_form"].as_u64(),
            v["ratio_at_closed_form"].as_str()
        ),
        (Some(1), Some("4/3"))
    );
    assert!(v["discrepancy"].is_string());
    golden("gapcheck-1.json", &text);
    let (text, v) = json_ok(&["gapcheck", "--alpha", "1/10"]);
    assert_eq!(
        (v["ell"].as_u64(), v["ratio"].as_str()),
        (Some(6), Some("4/65"))
    );
    assert_eq!(
        (
            v["ell_closed_form"].as_u64(),
            v["ratio_at_closed_form"].as_str()
        ),
        (Some(3), Some("4/9"))
    );
    assert!(v["discrepancy"].is_string());
    golden("gapcheck-1-10.json", &text);
}

#[test]
fn decay_is_reproducible() {
    let args = [
        "decay", "--m", "3", "--ell", "1", "--d", "3", "--r", "4", "--trials", "2000", "--seed",
        "9",
    ];
    let (text, v) = json_ok(&args);
    assert_eq!(v["steps"][0]["exact_mean"], "16");
    golden("decay-small.json", &text);
}

#[test]
fn lift_writes_the_lifted_instance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("lifted.json");
    let (_, v) = json_ok(&[
        "lift",
        "--in",
        &fixture("fig2-u2.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        (v["vertices"].as_u64(), v["constraints"].as_u64()),
        (Some(6), Some(12))
    );
    golden("lift-fig2-u2.json", &fs::read_to_string(&out).unwrap());
    assert_eq!(
        json_ok(&["opt", "--in", out.to_str().unwrap()]).1["opt"],
        "2/3"
    );
}

#[test]
fn play_against_the_identity_loses_on_fig2() {
    let args = [
        "play",
        "--preset",
        "fig2-lifted",
        "--k",
        "3",
        "--duplicator",
        "identity",
        "--rounds",
        "5",
    ];
    let (text, v) = json_ok(&args);
    assert_eq!(v["outcome"]["result"], "spoiler_win");
    assert!(v["outcome"]["round"].as_u64().unwrap() <= 5);
    golden("play-fig2-identity.json", &text);
}

#[test]
fn play_with_the_tree_duplicator_survives_on_fig3() {
    let args = [
        "play",
        "--preset",
        "fig3-lifted",
        "--k",
        "3",
        "--spoiler",
        "random",
        "--rounds",
        "8",
        "--seed",
        "4",
    ];
    let (text, v) = json_ok(&args);
    assert_eq!(v["outcome"]["result"], "duplicator_survived");
    golden("play-fig3-tree.json", &text);
    let lazy = [&args[..], &["--lazy"]].concat();
    let (lazy_text, _) = json_ok(&lazy);
    assert_eq!(lazy_text, text);
}

#[test]
fn tree_duplicator_needs_base_data() {
    let a = fixture("fig2-u1.json");
    let b = fixture("fig2-u2.json");
    let (code, stdout, _) = run(&["play", "--a", &a, "--b", &b, "--k", "2"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("tree Duplicator"));
}

#[test]
fn construct_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k4");
    let args = [
        "construct",
        "--preset",
        "K4",
        "--m",
        "2",
        "--ell",
        "1",
        "--r",
        "2",
        "--seed",
        "1",
        "--out",
    ];
    let (_, v) = json_ok(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert_eq!(
        (
            v["good"].as_u64(),
            v["bad"].as_u64(),
            v["faithful"].as_bool()
        ),
        (Some(2), Some(4), Some(false))
    );
    for name in [
        "graph.json",
        "edgedata.json",
        "u1.json",
        "u2.json",
        "u1tilde.json",
        "u2tilde.json",
        "report.json",
    ] {
        golden(
            &format!("construct-k4/{name}"),
            &fs::read_to_string(out.join(name)).unwrap(),
        );
    }
    let from_graph = tmp.path().join("from-graph");
    let args = [
        "construct",
        "--graph",
        &fixture("k4-graph.json"),
        "--m",
        "2",
        "--ell",
        "1",
        "--r",
        "2",
        "--seed",
        "1",
    ];
    json_ok(&[&args[..], &["--out", from_graph.to_str().unwrap()]].concat());
    assert_eq!(
        fs::read(out.join("u1.json")).unwrap(),
        fs::read(from_graph.join("u1.json")).unwrap()
    );
    let u1 = out.join("u1.json");
    assert_eq!(
        json_ok(&["opt", "--in", u1.to_str().unwrap()]).1["opt"],
        "1/2"
    );
}

#[test]
fn play_on_a_construction_directory() {
    let c = dir("golden").join("construct-k4");
    let args = [
        "play",
        "--construction",
        c.to_str().unwrap(),
        "--k",
        "2",
        "--spoiler",
        "exhaustive",
        "--depth",
        "3",
    ];
    let (_, v) = json_ok(&[&args[..], &["--rounds", "4", "--audit"]].concat());
    assert_eq!(v["outcome"]["result"], "duplicator_survived");
}

#[test]
fn preset_command_writes_both_sides() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, v) = json_ok(&["preset", "fig3", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(v["u1"]["m"], 2);
    assert_eq!(
        fs::read_to_string(tmp.path().join("fig3-u2.json")).unwrap(),
        fs::read_to_string(fixture("fig3-u2.json")).unwrap()
    );
    let (_, v) = json_ok(&["preset", "fig3-lifted"]);
    assert_eq!(v["u1"]["vertices"].as_array().unwrap().len(), 16);
}

#[test]
fn human_output_is_plain_text() {
    let (code, stdout, _) = run(&["--human", "opt", "--in", &fixture("fig3-u2.json")]);
    assert_eq!(code, 0);
    assert!(stdout.lines().any(|l| l == "opt: 5/12"));
    assert!(serde_json::from_str::<Value>(&stdout).is_err());
}

#[test]
fn execute_reports_written_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("l.json");
    let o = ug_cli::execute([
        "ugpebble",
        "lift",
        "--in",
        &fixture("fig3-u1.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!((o.code, o.files), (0, vec![out]));
    assert_eq!(ug_cli::execute(["ugpebble", "--help"]).code, 0);
}

#[test]
fn serve_answers_http() {
    use std::io::{Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::time::{Duration, Instant};

    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_ugpebble"))
        .args(["serve", "--port", &port.to_string()])
        .stderr(std::process::Stdio::null())
        .spawn()
        .unwrap();
    let body = r#"{"preset":"fig3-lifted","k":3}"#;
    let request = format!(
        "POST /api/sessions HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let start = Instant::now();
    let response = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(mut s) => {
                s.write_all(request.as_bytes()).unwrap();
                let mut text = String::new();
                s.read_to_string(&mut text).unwrap();
                break text;
            }
            Err(_) if start.elapsed() < Duration::from_secs(20) => {
                std::thread::sleep(Duration::from_millis(50))
            }
            Err(e) => panic!("server never came up: {e}"),
        }
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 201"), "{response}");
    assert!(response.contains("\"session_id\""));
}
