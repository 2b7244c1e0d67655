use std::process::Command;

fn partri() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_partri"));
    c.env_remove("PARTRI_SEED");
    c
}

#[test]
fn selftest_passes() {
    let out = partri().arg("selftest").output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
    assert!(stdout.ends_with("0 check(s) failed\n"), "{stdout}");
}

#[test]
fn seed_from_environment_matches_flag() {
    let base = ["sample", "--n", "12", "--lambda", "0.7", "--samples", "4"];
    let flag = partri().args(base).args(["--seed", "42"]).output().unwrap();
    let env = partri().args(base).env("PARTRI_SEED", "42").output().unwrap();
    assert!(flag.status.success());
    assert_eq!(flag.stdout, env.stdout);
    let other = partri().args(base).args(["--seed", "43"]).output().unwrap();
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["count", "--n", "x"][..], &["sample", "--n", "5", "--lambda", "0"], &["nope"]] {
        let out = partri().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn count_matches_library() {
    let out = partri().args(["count", "--n", "7"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines() {
        let (k, c) = line.split_once(' ').unwrap();
        let expect = partri::combinat::count_partial_triangulations(7, k.parse().unwrap()).unwrap();
        assert_eq!(c, expect.to_string());
    }
    assert_eq!(text.lines().count(), 7);
}
