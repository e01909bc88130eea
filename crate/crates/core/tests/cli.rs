use std::io::Write;
use std::process::{Command, Output, Stdio};

const TWO: &str = "2\n0 1\n1 0\n";
const T3: &str = "3\n0 1 2\n1 0 1\n2 1 0\n";
const E3: &str = "3\n0 1 1\n1 0 1\n1 1 0\n";

fn run_with(input: &str, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_magnipersist"));
    cmd.args(["--input", "-"]).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("MAGNIPERSIST_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn run(input: &str, args: &[&str]) -> Output {
    run_with(input, args, &[])
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn expect_failure(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error:{kind}: ")), "{err}");
}

#[test]
fn magnitude_of_two_points() {
    assert_eq!(stdout(&run(TWO, &["--command", "magnitude"])), "(2)/(1 + 1*u^1) in q^(1/1)\n");
}

#[test]
fn magnitude_function_accepts_fractions() {
    assert_eq!(stdout(&run(TWO, &["--command", "magfun", "--t", "1/2", "--precision", "4"])), "1/2\t1.2449\n");
}

#[test]
fn magnitude_homology_of_three_equidistant_points() {
    let out = stdout(&run(E3, &["--command", "mh", "--n-max", "2", "--l-max", "2"]));
    let rows: Vec<&str> = out.lines().collect();
    assert!(rows.contains(&"0\t0\t3\t"));
    assert!(rows.contains(&"1\t1\t6\t"));
    assert!(rows.contains(&"2\t2\t12\t"));
}

#[test]
fn euler_rows_all_agree() {
    let out = stdout(&run(T3, &["--command", "euler", "--n-max", "3", "--l-max", "3"]));
    assert!(!out.is_empty());
    assert!(out.lines().all(|l| l.ends_with("\ttrue")), "{out}");
}

#[test]
fn blurred_two_points() {
    let out = stdout(&run(TWO, &["--command", "blurred", "--dim-max", "3", "--eps-max", "3"]));
    let bars: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(bars.contains(&"1\t1\t2"));
    assert!(bars.contains(&"2\t2\t3"));
}

#[test]
fn rips_of_two_points() {
    assert_eq!(stdout(&run(TWO, &["--command", "ph", "--dim-max", "1", "--eps-max", "2"])), "0\t0\t1\n0\t0\tinf\n");
}

#[test]
fn limits_table() {
    let out = stdout(&run(E3, &["--command", "limits", "--k", "1"]));
    assert_eq!(out, "# stabilization threshold: 1\n0\t3\t3\t0\n1\t0\t0\t0\n");
}

#[test]
fn approximation_report() {
    let out = stdout(&run(T3, &["--command", "approx", "--k", "1", "--sample-eps", "1/2,1,2"]));
    assert!(out.contains("isomorphic: true"));
    assert!(!out.contains("\tfalse"));
}

#[test]
fn point_cloud_input_warns_on_snapping() {
    let o = run("2\n0 0\n1 1\n", &["--command", "magnitude", "--metric", "euclid:10"]);
    assert!(o.status.success());
    assert!(!o.stderr.is_empty());
    let l1 = stdout(&run("2\n0 0\n1 1\n", &["--command", "magnitude", "--metric", "l1"]));
    assert_eq!(l1, "(2)/(1 + 1*u^2) in q^(1/1)\n");
}

#[test]
fn output_file_and_complex_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bars.tsv");
    let dump = dir.path().join("cx.txt");
    let o = run(
        TWO,
        &["--command", "ph", "--dim-max", "1", "--eps-max", "2", "--output", out.to_str().unwrap(), "--dump-complex", dump.to_str().unwrap()],
    );
    assert!(stdout(&o).is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "0\t0\t1\n0\t0\tinf\n");
    assert_eq!(std::fs::read_to_string(&dump).unwrap().lines().count(), 3);
}

#[test]
fn input_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.txt");
    std::fs::write(&path, TWO).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_magnipersist"))
        .args(["--command", "magnitude", "--input", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "(2)/(1 + 1*u^1) in q^(1/1)\n");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["--command", "blurred", "--dim-max", "3", "--eps-max", "4"];
    let base = stdout(&run(T3, &args));
    for threads in ["1", "2", "4"] {
        assert_eq!(stdout(&run_with(T3, &args, &[("MAGNIPERSIST_THREADS", threads)])), base);
    }
}

#[test]
fn usage_errors_exit_1() {
    expect_failure(&run(TWO, &["--command", "nope"]), 1, "usage");
    expect_failure(&run(TWO, &["--command", "magfun", "--t", "1/0"]), 1, "usage");
    expect_failure(&run_with(TWO, &["--command", "magnitude"], &[("MAGNIPERSIST_THREADS", "0")]), 1, "usage");
}

#[test]
fn parse_errors_exit_2() {
    expect_failure(&run("2\n0 x\n1 0\n", &["--command", "magnitude"]), 2, "parse");
    expect_failure(&run("3\n0 1\n1 0\n", &["--command", "magnitude"]), 2, "parse");
}

#[test]
fn validation_errors_exit_3() {
    expect_failure(&run("2\n1 1\n1 0\n", &["--command", "magnitude"]), 3, "validation");
    expect_failure(&run("2\n0 1\n2 0\n", &["--command", "ph"]), 3, "validation");
    expect_failure(&run(TWO, &["--command", "ph", "--prime", "4"]), 3, "validation");
}

#[test]
fn resource_errors_exit_4() {
    expect_failure(&run(E3, &["--command", "blurred", "--dim-max", "3", "--eps-max", "3", "--max-cells", "5"]), 4, "resource");
    expect_failure(&run(E3, &["--command", "mh", "--n-max", "3", "--l-max", "3", "--max-generators", "2"]), 4, "resource");
}
