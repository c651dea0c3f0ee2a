use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn starprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starprod")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = starprod(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["star", "--dim", "2", "--order", "2", "--sym", "K", "x1", "x2"]), "x1*x2 + hbar*K[K;1,2]\n");
    assert_eq!(stdout(&["admissible", "--n", "3,1"]), "false\n");
    assert_eq!(
        stdout(&["expect", "--n", "1,1,1,1", "--family", "K"]),
        "K[K;1,2]*K[K;3,4] + K[K;1,3]*K[K;2,4] + K[K;1,4]*K[K;2,3]\n"
    );
}

#[test]
fn algebra_commands() {
    assert_eq!(
        stdout(&["star", "--sym", "K", "x1^2", "x2^2"]),
        "x1^2*x2^2 + 4*hbar*K[K;1,2]*x1*x2 + 2*hbar^2*K[K;1,2]^2\n"
    );
    assert_eq!(stdout(&["star-graphs", "--sym", "K", "x1^2", "x2^2"]), stdout(&["star", "--sym", "K", "x1^2", "x2^2"]));
    assert_eq!(stdout(&["star", "--order", "0", "-x1", "x1"]), "-x1^2\n");
    assert_eq!(stdout(&["poisson", "x1", "x2"]), "K[K;1,2] - K[K;2,1]\n");
    assert_eq!(stdout(&["poisson", "--sym", "K", "x1", "x2"]), "0\n");
    assert_eq!(stdout(&["star", "--json", "x1", "x1"]), "\"x1^2 + hbar*K[K;1,1]\"\n");
    assert_eq!(stdout(&["wick-power", "--var", "1", "--power", "3"]), "x1^3 + 3*hbar*K[K;1,1]*x1\n");
    assert_eq!(stdout(&["wick-invert", "--var", "1", "--power", "3"]), ":x1^3: - 3*hbar*K[K;1,1]*:x1^1:\n");
    assert_eq!(
        stdout(&["wick-invert", "--json", "--var", "1", "--power", "2"]),
        "[{\"power\":2,\"coefficient\":\"1\"},{\"power\":0,\"coefficient\":\"-hbar*K[K;1,1]\"}]\n"
    );
}

#[test]
fn expectation_commands() {
    assert_eq!(stdout(&["expect", "--n", "2,2"]), "1/2*K[K;1,2]^2\n");
    assert_eq!(stdout(&["expect-oracle", "--n", "2,2"]), "2*K[K;1,2]^2\n");
    let out = starprod(&["expect-oracle", "--n", "2,2", "--keep-diagonal"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(stdout(&["expect", "--n", "3,1"]), "0\n");
}

#[test]
fn combinatorics_commands() {
    assert_eq!(stdout(&["enum-adj", "--n", "1,1,1,1"]).lines().count(), 3);
    assert_eq!(stdout(&["enum-adj", "--dim", "3", "--degree", "4", "--json"]).matches("[[").count(), 6);
    assert_eq!(stdout(&["admissible", "--json", "--n", "2,1,1"]), "true\n");
    assert_eq!(stdout(&["witness", "--n", "1,1"]), "[[0,1],[1,0]]\n");
    assert_eq!(stdout(&["ssyt", "--n", "2,1,1"]), "1 1\n2 3\n");
    assert_eq!(stdout(&["ssyt", "--json", "--n", "2,1,1"]), "{\"row1\":[1,1],\"row2\":[2,3]}\n");
}

#[test]
fn feynman_output() {
    assert_eq!(stdout(&["feynman", "[[0,1],[1,0]]"]), "graph feynman {\n  v1;\n  v2;\n  v1 -- v2;\n}\n");
    assert_eq!(
        stdout(&["feynman", "--json", "[[0,2,0],[2,0,1],[0,1,0]]"]),
        "{\"vertices\":3,\"edges\":[[1,2,2],[2,3,1]]}\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    assert_eq!(
        stdout(&["feynman", "--bernoulli", "--dot", path.to_str().unwrap(), "{\"m\":2,\"matrix\":[[0,1],[1,0]]}"]),
        ""
    );
    let dot = fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"), "{dot}");
}

#[test]
fn grid_commands() {
    let dir = tempfile::tempdir().unwrap();
    let exact = write(
        dir.path(),
        "exact.json",
        r#"{"points":["a","b"],"kernel":[["0","1/2"],["1/2","0"]],"field":["1","2"],"hbar":"1","mode":"rational"}"#,
    );
    let float = write(
        dir.path(),
        "float.json",
        r#"{"points":["a","b"],"kernel":[[0,0.5],[0.5,0]],"field":[1,2],"hbar":1,"mode":"float"}"#,
    );
    assert_eq!(stdout(&["field-star", "--grid", &exact, "--order", "1", "x1", "x2"]), "5/2\n");
    assert_eq!(stdout(&["field-star", "--grid", &exact, "--method", "direct", "x1", "x2"]), "5/2\n");
    assert_eq!(stdout(&["field-star", "--grid", &exact, "--json", "x1", "x2"]), "\"5/2\"\n");
    assert_eq!(stdout(&["field-star", "--grid", &float, "x1", "x2"]), "2.5\n");
    assert_eq!(stdout(&["field-expect", "--grid", &exact, "--n", "1,1"]), "1/2\n");

    let rule = write(dir.path(), "rule.json", r#"{"nodes":[[1],[2]],"weights":["1/2","1/2"]}"#);
    // (1/2 phi_a + 1/2 phi_b)^2 plus hbar times the averaged kernel
    assert_eq!(stdout(&["functional-star", "--grid", &exact, "--quadrature", &rule, "x1", "x1"]), "5/2\n");
}

#[test]
fn error_exit_codes() {
    let usage = |args: &[&str]| {
        let out = starprod(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        String::from_utf8(out.stderr).unwrap()
    };
    assert!(usage(&["star", "x1^-1"]).contains("column 4"));
    assert!(usage(&["star", "x1 + y"]).contains("unknown identifier `y`"));
    assert!(usage(&["star", "--dim", "1", "x2"]).contains("outside dimension"));
    usage(&["frobnicate"]);
    usage(&["admissible"]);
    usage(&["admissible", "--n", "1,x"]);
    usage(&["admissible", "--n", "0,2"]);
    usage(&["field-star", "--grid", "/no/such/file.json", "x1", "x1"]);

    let out = starprod(&["witness", "--n", "3,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not admissible"));
    assert_eq!(starprod(&["--help"]).status.code(), Some(0));
    assert_eq!(starprod(&["--version"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["star", "--order", "3", "x1^2 + x2*x3", "x3^2 - 1/2*x1", "x2 + hbar"];
    let first = starprod(&args);
    for _ in 0..3 {
        assert_eq!(starprod(&args).stdout, first.stdout);
    }
    assert!(!first.stdout.is_empty());
}
