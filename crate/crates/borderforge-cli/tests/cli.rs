use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_borderforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn circle(dir: &Path) -> String {
    let path = dir.join("sys.txt");
    std::fs::write(&path, "x1^2 + x2^2 - 1\n# comment\n\nx1 - 1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle(dir.path());
    let trace = dir.path().join("trace.json");
    let o = run(&["solve", "--field-p", "7", "--nvars", "2", "--input", &input, "--trace-out", trace.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1*x1*x2 + 6*x2\n1*x2^2\n1*x1 + 6\n");
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["enlargements"], 0);
    assert_eq!(t["iterations"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_variants_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle(dir.path());
    let base = ["solve", "--field-p", "7", "--nvars", "2", "--input", &input];
    let expected = stdout(&run(&base));
    for extra in [
        vec!["--variant", "bba", "--elim", "naive"],
        vec!["--oracle", "perfect", "--gap-threshold", "0"],
        vec!["--oracle", "empty", "--gap-threshold", "0.5"],
        vec!["--oracle", "random:0.3", "--seed", "4", "--oracle-budget", "2"],
        vec!["--oracle", "adversarial", "--gap-threshold", "0"],
    ] {
        let mut args = base.to_vec();
        args.extend(extra.iter());
        let o = run(&args);
        assert!(o.status.success(), "{extra:?}");
        assert_eq!(stdout(&o), expected, "{extra:?}");
    }
}

#[test]
fn solve_json_output_and_stdin() {
    let mut child = bin()
        .args(["solve", "--field-p", "7", "--nvars", "2", "--input", "-", "--json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"x1^2 + x2^2 - 1\nx1 - 1\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order_ideal"], serde_json::json!(["1*x2", "1"]));
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
    let o = run(&["solve", "--field-p", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--field-p", "7", "--nvars", "2", "--input", "x", "--variant", "fast"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sample", "--nvars", "3", "--degree-caps", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle(dir.path());
    let o = run(&["solve", "--field-p", "6", "--nvars", "2", "--input", &input]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "not_prime");
    assert!(e["message"].as_str().unwrap().contains("not prime"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "x1 + \n").unwrap();
    let o = run(&["solve", "--field-p", "7", "--nvars", "2", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "parse");

    let pos = dir.path().join("pos.txt");
    std::fs::write(&pos, "x1\n").unwrap();
    let o = run(&["solve", "--field-p", "7", "--nvars", "2", "--input", pos.to_str().unwrap(), "--degree-cap", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "degree_budget_exceeded");

    let o = run(&["solve", "--field-p", "7", "--nvars", "2", "--input", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "io");

    let o = run(&["sample", "--nvars", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "invalid_arity");
}

#[test]
fn sample_is_seeded() {
    let a = run(&["sample", "--count", "3", "--seed", "5"]);
    let b = run(&["sample", "--count", "3", "--seed", "5"]);
    let c = run(&["sample", "--count", "3", "--seed", "6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["seed", "order_ideal_corners", "points", "border_basis", "F"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["F"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn sample_to_file_with_caps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let o = run(&["sample", "--nvars", "2", "--max-degree", "3", "--degree-caps", "2,1", "--count", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn datagen_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("d.jsonl");
    let o = run(&["datagen", "--count", "2", "--nvars", "2", "--seed", "1", "--out", json.to_str().unwrap()]);
    assert!(o.status.success());
    let samples = borderforge::datagen::read_dataset(&json).unwrap();
    assert_eq!(samples.iter().filter(|s| s.is_terminal).count(), 2);

    for scheme in ["infix", "monomial"] {
        let o = run(&["datagen", "--count", "2", "--nvars", "2", "--seed", "1", "--scheme", scheme]);
        assert!(o.status.success());
        let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
        assert_eq!(lines.len(), samples.len());
        for (line, s) in lines.iter().zip(&samples) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let expected = match scheme {
                "infix" => borderforge::datagen::tokenize_infix(s),
                _ => borderforge::datagen::tokenize_monomial(s),
            };
            assert_eq!(v["tokens"], expected.to_text());
            assert_eq!(v["is_terminal"], s.is_terminal);
        }
    }
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.toml");
    std::fs::write(&suite, "nvars = [2]\ncount = 3\nvariants = [\"ibba\", \"ibba+fge\", \"obba+fge\"]\nborder_gap = true\n").unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = bin()
        .args(["bench", "--suite", suite.to_str().unwrap(), "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()])
        .env("BORDERFORGE_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("obba+fge"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 10);

    std::fs::write(&suite, "nvars = [2]\ncount = 2\nvariants = [\"obba\"]\noracle = \"random:0.5\"\nerror_proxy = true\n").unwrap();
    let o = run(&["bench", "--suite", suite.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("error proxy vs perfect-oracle labels"));

    std::fs::write(&suite, "variants = [\"quick\"]\n").unwrap();
    let o = run(&["bench", "--suite", suite.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "invalid_config");
}
