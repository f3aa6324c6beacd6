//! Operation reachability, output determinism and exit codes of the binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asymptospec_cli::registry::{example, OPERATIONS};
use asymptospec_cli::{evaluate, parse_config_str, Verb};

const BIN: &str = env!("CARGO_BIN_EXE_asymptospec");

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("ASYMPTOSPEC_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn every_operation_is_reachable() {
    let verbs = [Verb::Spectrum, Verb::Wavefront, Verb::Classify, Verb::Experiment].map(|v| v.to_string());
    for op in OPERATIONS {
        assert!(verbs.contains(&op.verb.to_string()), "{}: unknown verb {}", op.name, op.verb);
        let text = example(op.example).unwrap_or_else(|| panic!("{}: no example {}", op.name, op.example));
        let cfg = parse_config_str(text, false).unwrap();
        assert_eq!(cfg.analysis.verb().to_string(), op.verb, "{}", op.name);
        let s = evaluate(&cfg).unwrap();
        if op.module != "cli" {
            assert!(s.operations.contains(&op.name), "{} not called by example {}: {:?}", op.name, op.example, s.operations);
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--net", "delta:m=2", "--ladder", "0.0078125,0.5,9"];
    assert_eq!(code(&run(&args, a.path())), 0);
    assert_eq!(code(&run(&args, b.path())), 0);
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 3, "{names:?}");
    for n in names {
        let x = fs::read(a.path().join(&n)).unwrap();
        let y = fs::read(b.path().join(&n)).unwrap();
        assert!(x == y, "{n:?} differs between runs");
    }
}

#[test]
fn passing_run_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["experiment", "delta_powers", "--ladder", "0.0078125,0.5,9"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("delta_powers.csv").exists());
    assert!(d.path().join("delta_powers.dat").exists());
    assert!(d.path().join("delta_powers.json").exists());
}

#[test]
fn failed_expectation_exits_two() {
    // Under a Gevrey scale the ε⁻¹ net has spectral radius 0, not 1.
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "e4.toml",
        "net = \"const:value=1,eps_pow=-1\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"spectrum\"\ngrid = [0.0]\n",
    );
    let pass = run(&["spectrum", "--config", &cfg], &d.path().join("a"));
    assert_eq!(code(&pass), 0, "{}", String::from_utf8_lossy(&pass.stdout));
    let fail = run(&["spectrum", "--config", &cfg, "--scale", "gevrey:1"], &d.path().join("b"));
    assert_eq!(code(&fail), 2, "{}", String::from_utf8_lossy(&fail.stdout));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));
}

#[test]
fn errors_exit_one_with_a_message() {
    let d = tempfile::tempdir().unwrap();
    let unknown = write_config(d.path(), "u.toml", "net = \"delta\"\n[analysis]\nkind = \"spectrum\"\nwidth = 2\n");
    let bad = write_config(d.path(), "b.toml", "net = \"delta\"\n[ladder]\neps0 = 2.0\ncount = 2\n[analysis]\nkind = \"spectrum\"\n");
    let cases: [(&[&str], &[&str]); 5] = [
        (&["spectrum", "--config", &unknown], &["line 2", "width"]),
        (&["spectrum", "--config", &bad], &["ε0", "6 rungs"]),
        (&["experiment", "no_such"], &["no_such"]),
        (&["wavefront", "--config", &bad.replace("b.toml", "missing.toml")], &["missing.toml"]),
        (&["spectrum"], &["--net"]),
    ];
    for (args, needles) in cases {
        let o = run(args, d.path());
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(code(&o), 1, "{args:?}: {err}");
        for n in needles {
            assert!(err.contains(n), "{args:?}: {err:?} lacks {n:?}");
        }
    }
}

#[test]
fn config_must_match_the_verb() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "s.toml", "net = \"delta\"\n[analysis]\nkind = \"spectrum\"\ngrid = [0.0]\n");
    let o = run(&["wavefront", "--config", &cfg], d.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("spectrum"));
}
