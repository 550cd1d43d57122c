use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_speccert"))
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes_follow_verdicts() {
    let injective = bin().args(["--job", &fixture("isogeny2.toml")]).output().unwrap();
    assert_eq!(injective.status.code(), Some(0), "{}", stderr(&injective));
    let mixed = bin().args(["--job", &fixture("two_torsion.toml")]).output().unwrap();
    assert_eq!(mixed.status.code(), Some(2));
    let usage = bin().arg("--no-such-flag").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn replay_round_trip() {
    for name in ["two_torsion.toml", "halving.toml", "four_generators.toml", "descent2.toml", "factor.toml"] {
        let out = scratch(&format!("{name}.json"));
        bin()
            .args(["--job", &fixture(name), "--out"])
            .arg(&out)
            .output()
            .unwrap();
        let replay = bin().arg("--replay").arg(&out).output().unwrap();
        assert!(
            String::from_utf8_lossy(&replay.stdout).contains("replay ok"),
            "{name}: {}",
            stderr(&replay)
        );
        assert_ne!(replay.status.code(), Some(1), "{name}");
    }
}

#[test]
fn tampered_certificate_is_rejected() {
    let out = scratch("tampered.json");
    bin()
        .args(["--job", &fixture("descent2.toml"), "--out"])
        .arg(&out)
        .output()
        .unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let flipped = text.replacen("\"Injective\"", "\"Indeterminate\"", 1);
    assert_ne!(text, flipped);
    fs::write(&out, flipped).unwrap();
    let replay = bin().arg("--replay").arg(&out).output().unwrap();
    assert_eq!(replay.status.code(), Some(1));
    assert!(stderr(&replay).contains("E-REPLAY"), "{}", stderr(&replay));
}

#[test]
fn parse_error_points_at_the_expression() {
    let job = scratch("bad.toml");
    fs::write(
        &job,
        "[curve]\na = \"-t^2\"\nb = \"t^2 +* 1\"\n\n[job]\nroute = \"descent2\"\nt0 = [\"3\"]\n",
    )
    .unwrap();
    let o = bin().arg("--job").arg(&job).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("E-PARSE") && msg.contains("bad.toml:3:") && msg.contains("curve.b"), "{msg}");
}

#[test]
fn singular_fiber_is_reported() {
    let job = scratch("singular.toml");
    fs::write(&job, "[curve]\na = \"-t^2\"\nb = \"t^2\"\n\n[job]\nroute = \"specialize\"\nt0 = [\"0\"]\n").unwrap();
    let o = bin().arg("--job").arg(&job).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E-SINGULAR-FIBER"), "{}", stderr(&o));
}

#[test]
fn sequential_and_parallel_agree() {
    for name in ["two_torsion.toml", "halving.toml", "four_generators.toml"] {
        let par = bin().args(["--job", &fixture(name)]).output().unwrap();
        let seq = bin().args(["--sequential", "--job", &fixture(name)]).output().unwrap();
        assert_eq!(par.stdout, seq.stdout, "{name}");
    }
}

#[test]
fn selftest_passes() {
    let o = bin().arg("--selftest").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let lines = String::from_utf8_lossy(&o.stdout);
    assert_eq!(lines.lines().filter(|l| l.starts_with("PASS")).count(), 13);
}
