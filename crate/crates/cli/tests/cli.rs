use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;

fn thue() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_thue"));
    cmd.env_remove("PORT").env_remove("THUE_COLORING_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    thue().args(args).output().unwrap()
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child =
        thue().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("thue-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_reports_exact_values() {
    let out = run(&["solve", "--q", "3", "--budget", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["value"], 4);
    assert_eq!(report["principal_variation"].as_array().unwrap().len(), 5);
    let out = run(&["solve", "--q", "1", "--budget", "5", "--no-reversal"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 1);
}

#[test]
fn solve_reports_brackets_with_exit_two() {
    let out = run(&["solve", "--q", "5", "--budget", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["bracket"]["lower"], 7);
    assert!(report["bracket"]["upper"].is_null());
    let out = run(&["solve", "--q", "12", "--budget", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["coloring_assist"]["survival"], 8);
    assert_eq!(report["coloring_assist"]["positions"], 255);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["solve", "--q", "3"][..],
        &["solve", "--q", "0", "--budget", "4"],
        &["solve", "--q", "300", "--budget", "4"],
        &["prepare", "--rounds", "3", "--colors", "65", "--out", "/dev/null"],
        &["play", "--mode", "robot", "--q", "3", "--rounds", "3"],
        &["verify", "--suite", "coloring"],
        &["serve"],
        &["nonsense"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn prepare_writes_a_certified_file() {
    let path = temp("three.coloring");
    let out = run(&["prepare", "--rounds", "3", "--colors", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["positions"], 7);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("colors=12"));
    assert_eq!(lines.count(), 7);

    let one = temp("one.coloring");
    let out = run(&["prepare", "--rounds", "1", "--colors", "1", "--out", one.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&one).unwrap(), "colors=1\n0 0 0\n");

    let none = temp("none.coloring");
    let out = run(&["prepare", "--rounds", "4", "--colors", "2", "--out", none.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!none.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("prepare failed"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["adjacency", "checker", "solver-oracle"] {
        let out = run(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        let report = json(&out);
        assert_eq!(report["pass"], true);
        assert_eq!(report["suite"], suite);
    }
    let out = run(&["verify", "--suite", "adjacency"]);
    assert_eq!(json(&out)["details"]["vertices"], 513);
}

#[test]
fn verify_coloring_reports_witnesses() {
    let path = temp("five.coloring");
    run(&["prepare", "--rounds", "5", "--colors", "12", "--out", path.to_str().unwrap()]);
    let p = path.to_str().unwrap();
    let out = run(&["verify", "--suite", "coloring", "--coloring", p, "--rounds", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["details"]["positions"], 31);

    // too few positions for six rounds
    let out = run(&["verify", "--suite", "coloring", "--coloring", p, "--rounds", "6"]);
    assert_eq!(out.status.code(), Some(3));

    // flatten the table: the first two rounds already repeat
    let text = std::fs::read_to_string(&path).unwrap();
    let flat: Vec<String> = text
        .lines()
        .map(|l| match l.rsplit_once(' ') {
            Some((head, _)) if !l.starts_with("colors") => format!("{head} 0"),
            _ => l.to_string(),
        })
        .collect();
    let bad = temp("flat.coloring");
    std::fs::write(&bad, flat.join("\n")).unwrap();
    let out = run(&["verify", "--suite", "coloring", "--coloring", bad.to_str().unwrap(), "--rounds", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let report = json(&out);
    assert_eq!(report["pass"], false);
    assert_eq!(report["violation"]["witness"]["size"], 1);
    assert_eq!(report["violation"]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn gen_thue_prints_a_square_free_word() {
    let out = run(&["gen-thue", "--length", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let word: Vec<u8> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(word.len(), 64);
    assert!(thue_core::words::is_nonrepetitive(&word.into()));
    assert_eq!(run(&["gen-thue", "--length", "0"]).stdout, b"[]\n");
}

#[test]
fn min_colors_reports_small_domains() {
    let out = run(&["min-colors", "--rounds", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["min_colors"], 1);
    let out = run(&["min-colors", "--rounds", "3"]);
    let report = json(&out);
    assert_eq!(report["min_colors"], 3);
    assert_eq!(report["witness"].as_array().unwrap().len(), 7);
}

#[test]
fn play_human_bob_survives_and_quits() {
    let out =
        run_with_input(&["play", "--mode", "human-bob", "--q", "12", "--rounds", "8"], "0\n1\n1\n0\n4\n2\n6\n3\n");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all 8 rounds played without a square"), "{text}");
    let transcript: Value = serde_json::from_str(&text[text.find("{\n").unwrap()..]).unwrap();
    assert_eq!(transcript["status"], "ongoing");
    assert_eq!(transcript["moves"].as_array().unwrap().len(), 8);

    let out = run_with_input(&["play", "--mode", "human-bob", "--q", "12", "--rounds", "8"], "0\nfoo\n9\nquit\n");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("enter a number") && text.contains("rejected") && text.ends_with("bye\n"), "{text}");
}

#[test]
fn play_human_alice_loses_quickly_over_three_letters() {
    let out = run_with_input(&["play", "--mode", "human-alice", "--q", "3", "--rounds", "20"], &"0\n1\n2\n".repeat(10));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("engine bob: \"solver\""));
    assert!(text.contains("game over: square"), "{text}");
}

#[test]
fn play_with_a_prepared_table() {
    let path = temp("four.coloring");
    run(&["prepare", "--rounds", "4", "--colors", "12", "--out", path.to_str().unwrap()]);
    let p = path.to_str().unwrap();
    let out =
        run_with_input(&["play", "--mode", "human-bob", "--q", "12", "--rounds", "4", "--coloring", p], "0\n0\n2\n1\n");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all 4 rounds"));
    let out = run_with_input(&["play", "--mode", "human-bob", "--q", "12", "--rounds", "5", "--coloring", p], "");
    assert_eq!(out.status.code(), Some(3));
    let out = run_with_input(&["play", "--mode", "auto", "--q", "3", "--rounds", "9", "--coloring", p], "");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn play_auto_prints_the_transcript() {
    let out = run(&["play", "--mode", "auto", "--q", "4", "--rounds", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let transcript: Value = serde_json::from_str(&text[text.find("{\n").unwrap()..]).unwrap();
    assert_eq!(transcript["status"], "ended");
}

fn get_health(port: u16) -> Option<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.write_all(b"GET /health HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut buf = String::new();
    s.read_to_string(&mut buf).ok()?;
    Some(buf)
}

#[test]
fn serve_answers_health_on_the_env_port() {
    let port = 20_000 + (std::process::id() % 20_000) as u16;
    let mut child = thue()
        .args(["serve", "--port", "1"])
        .env("PORT", port.to_string())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut reply = None;
    while Instant::now() < deadline {
        if let Some(r) = get_health(port) {
            reply = Some(r);
            break;
        }
        std::thread::sleep(Duration::from_millis(100));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    let reply = reply.expect("service came up");
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.ends_with("ok"));
}
