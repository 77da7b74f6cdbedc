use std::process::{Command, Output};

fn brjuno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brjuno")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn expand_prints_digits_and_convergents() {
    let o = brjuno(&["expand", "--alg", "ocf", "4/11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,a,eps,p,q,beta,x_n");
    assert_eq!(lines[1], "0,,,0,1,4/11,4/11");
    assert_eq!(lines[4], "3,1,T,4,11,0,0");
    assert!(lines.last().unwrap().starts_with("# seed="));
}

#[test]
fn terminal_input_is_an_error() {
    let o = brjuno(&["expand", "--alg", "rcf", "0/1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("terminal input"));
    assert_eq!(brjuno(&["expand", "--alg", "nope", "1/3"]).status.code(), Some(2));
}

#[test]
fn figures_are_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    // The provenance line records the command, so both runs use the same path.
    let path = dir.path().join("phi.csv");
    let run = || {
        let o = brjuno(&["figure", "PHI", "--samples", "500", "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(&path).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.starts_with("x,phi_nu=1,phi_nu=0.5,ok\n"));
    assert!(a.lines().any(|l| l.starts_with("5.0000000000000000e-1,-6.9314718055994")));
    assert!(a.lines().last().unwrap().starts_with("# seed=1 version="));
}

#[test]
fn restricted_holder_suite_passes() {
    let o = brjuno(&["suite", "holder", "--kind", "semi", "--nu", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"semi@nu=1"));
    assert!(!names.iter().any(|n| n.starts_with("ocf")));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"algorithm": "rcf", "seed": 3}"#).unwrap();
    let o = brjuno(&["expand", "--config", cfg.to_str().unwrap(), "--seed", "9", "2/7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    // RCF digits of 2/7 are [0; 3, 2].
    assert!(text.lines().nth(2).unwrap().starts_with("1,3,"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("# seed=9 "));

    std::fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(brjuno(&["expand", "--config", cfg.to_str().unwrap(), "2/7"]).status.code(), Some(2));
}
