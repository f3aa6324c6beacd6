//! Config parsing, normalization and validation.

use std::path::Path;

use asymptospec_cli::config::normalize;
use asymptospec_cli::{parse_config, parse_config_str, CliError, BUNDLED_CONFIGS};

#[test]
fn golden_config_normalizes_to_reference() {
    let cfg = parse_config(Path::new("tests/golden/delta_powers.toml")).unwrap();
    let want = std::fs::read_to_string("tests/golden/delta_powers.normalized.toml").unwrap();
    let got = normalize(&cfg).unwrap();
    assert_eq!(got, want);
    let again = normalize(&parse_config_str(&got, false).unwrap()).unwrap();
    assert_eq!(again, got, "normalization is not idempotent");
}

#[test]
fn bundled_configs_round_trip() {
    for (name, text) in BUNDLED_CONFIGS {
        let cfg = parse_config_str(text, false).unwrap_or_else(|e| panic!("{name}: {e}"));
        let n = normalize(&cfg).unwrap();
        assert_eq!(parse_config_str(&n, false).unwrap(), cfg, "{name}");
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config_str(&json, true).unwrap(), cfg, "{name} via JSON");
    }
}

#[test]
fn json_and_toml_agree() {
    let toml = "net = \"delta:m=2\"\n[ladder]\neps0 = 0.125\ncount = 10\n[analysis]\nkind = \"spectrum\"\ngrid = [0.0, 0.25]\n";
    let json = r#"{"net": "delta:m=2", "ladder": {"eps0": 0.125, "count": 10},
                   "analysis": {"kind": "spectrum", "grid": [0.0, 0.25]}}"#;
    assert_eq!(parse_config_str(toml, false).unwrap(), parse_config_str(json, true).unwrap());
}

#[test]
fn unknown_key_reports_location() {
    let text = "net = \"delta\"\ncolour = 3\n[analysis]\nkind = \"spectrum\"\n";
    let msg = parse_config_str(text, false).unwrap_err().to_string();
    assert!(msg.contains("line 2, column 1"), "{msg}");
    assert!(msg.contains("colour"), "{msg}");
    let json = "{\"net\": \"delta\",\n \"analysis\": {\"kind\": \"spectrum\"},\n \"colour\": 3}";
    let msg = parse_config_str(json, true).unwrap_err().to_string();
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn validation_lists_every_violation() {
    let text = "[ladder]\neps0 = 2.0\nq = 1.5\ncount = 3\n[analysis]\nkind = \"spectrum\"\n";
    match parse_config_str(text, false) {
        Err(CliError::Validation(v)) => {
            assert_eq!(v.len(), 4, "{v:?}");
            assert!(v.iter().any(|m| m.contains("ε0")));
            assert!(v.iter().any(|m| m.contains("needs a net")));
        }
        other => panic!("expected validation errors, got {other:?}"),
    }
}

#[test]
fn malformed_nets_are_rejected() {
    let text = "net = \"delta:m=zero\"\n[analysis]\nkind = \"spectrum\"\n";
    assert!(parse_config_str(text, false).is_err());
}
