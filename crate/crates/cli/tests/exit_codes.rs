use std::path::PathBuf;
use std::process::Command;

fn run(sub: &str, cfg_body: &str) -> i32 {
    let dir = std::env::temp_dir().join(format!("anytime-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg: PathBuf = dir.join(format!("{sub}.json"));
    std::fs::write(&cfg, cfg_body).unwrap();
    Command::new(env!("CARGO_BIN_EXE_anytime"))
        .args([sub, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap()
        .code()
        .unwrap()
}

#[test]
fn success_is_zero() {
    assert_eq!(run("thresholds", r#"{"channel":"bec","epsilon":0.3}"#), 0);
}

#[test]
fn usage_errors_are_two() {
    // k >= n is not a valid code shape.
    assert_eq!(
        run("sample-code", r#"{"n":2,"k":3,"p":0.5,"horizon":4}"#),
        2
    );
    // Unknown flags go through clap, same exit code.
    let code = Command::new(env!("CARGO_BIN_EXE_anytime"))
        .args(["thresholds", "--no-such-flag"])
        .status()
        .unwrap()
        .code()
        .unwrap();
    assert_eq!(code, 2);
}

#[test]
fn certification_failure_is_three() {
    assert_eq!(
        run(
            "certify",
            r#"{"n":3,"k":1,"p":0.5,"horizon":8,"seed":7,"alpha":2.0,"theta":1.5,"d_o":2,"d_max":6}"#,
        ),
        3
    );
}

#[test]
fn budget_exceeded_is_four() {
    assert_eq!(
        run(
            "certify",
            r#"{"n":12,"k":6,"p":0.5,"horizon":8,"seed":1,"alpha":0.1,"theta":1.5,"d_o":2,"d_max":8}"#,
        ),
        4
    );
}
