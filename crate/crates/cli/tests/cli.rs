use std::process::{Command, Output};

use rhoq_padic::PadicNumber;

fn rhoq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhoq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classical_integral_of_x_declares_minus_half() {
    let o = rhoq(&["--rho", "0", "--q", "0", "--levels", "1..12", "--prec", "10", "integrate", "--f", "x", "--out", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let limit = PadicNumber::parse(v["declared_limit"].as_str().unwrap()).unwrap();
    // -1/2 in Z_5 has every digit equal to 2
    assert_eq!(limit.precision(), 10);
    assert!(limit.unit_digits().iter().all(|&d| d == 2), "{limit}");
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn measure_of_a_ball_in_each_format() {
    for out in ["json", "csv", "table"] {
        let o = rhoq(&["measure", "--a", "3", "--level", "2", "--out", out]);
        assert!(o.status.success(), "{out}");
        assert!(!stdout(&o).is_empty());
    }
}

#[test]
fn mahler_roundtrip_is_reported() {
    let o = rhoq(&["mahler", "--f", "mixed:1:2", "--order", "12", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["roundtrip_exact"], true);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 13);
}

#[test]
fn single_audit_passes_with_exit_zero() {
    let o = rhoq(&["audit", "thm31", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("theorem,section,name,key,value,verdict"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        vec!["--p", "4", "audit", "all"],
        vec!["--levels", "5..2", "audit", "thm32"],
        vec!["integrate", "--f", "sin"],
        vec!["audit", "thm99"],
    ] {
        let o = rhoq(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}
