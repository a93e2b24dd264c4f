use std::process::{Command, Output};

fn besselrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besselrad"))
        .args(args)
        .env_remove("BESSELRAD_PANEL_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const BASE: [&str; 12] = [
    "--lambda1", "0", "--lambda2", "0", "--power", "1", "--k1", "1", "--k2", "1", "--alpha", "1",
];

fn eval(extra: &[&str]) -> Output {
    let mut args = vec!["eval"];
    args.extend(BASE);
    args.extend(extra);
    besselrad(&args)
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .map(str::trim)
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn eval_log_case() {
    let o = eval(&[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: f64 = field(&text, "value").parse().unwrap();
    assert!((v - 0.4023594781).abs() < 1e-10);
    assert_eq!(field(&text, "method"), "EQ_2_8");
}

#[test]
fn eval_json_matches_text_bitwise() {
    let text = stdout(&eval(&["--oracle"]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&eval(&["--oracle", "--json"]))).unwrap();
    let from_text: f64 = field(&text, "value").parse().unwrap();
    assert_eq!(json["value"].as_f64().unwrap().to_bits(), from_text.to_bits());
    assert_eq!(json["method"], "EQ_2_8");
    for key in ["condition", "oracle_value", "oracle_abs_error", "rel_discrepancy"] {
        assert!(json[key].is_number(), "{key}");
    }
    assert!(json["rel_discrepancy"].as_f64().unwrap() < 1e-8);
}

#[test]
fn eval_exit_codes() {
    let inapplicable = ["eval", "--lambda1", "2", "--lambda2", "0", "--power", "1", "--k1", "1", "--k2", "1", "--alpha", "1"];
    assert_eq!(besselrad(&inapplicable).status.code(), Some(3));

    let mut fallback = inapplicable.to_vec();
    fallback.extend(["--fallback-oracle", "--json"]);
    let o = besselrad(&fallback);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["method"], "NA");
    assert!(json["value"].as_f64().unwrap() > 0.0);

    assert_eq!(besselrad(&["eval", "--lambda1", "0"]).status.code(), Some(2));
    assert_eq!(eval(&["--k1"]).status.code(), Some(2));
    let mut negative = vec!["eval"];
    negative.extend(&BASE[..10]);
    negative.extend(["--alpha", "-1"]);
    assert_eq!(besselrad(&negative).status.code(), Some(2));
}

#[test]
fn oracle_budget_exhaustion_exits_4() {
    let o = Command::new(env!("CARGO_BIN_EXE_besselrad"))
        .args(["eval", "--oracle"])
        .args(BASE)
        .env("BESSELRAD_PANEL_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

fn table(extra: &[&str]) -> Output {
    let mut args = vec!["table", "--lambda1", "0", "--lambda2", "0", "--power", "1", "--k1", "1", "--k2", "1"];
    args.extend(extra);
    besselrad(&args)
}

#[test]
fn table_alpha_sweep_decreases() {
    let o = table(&["--sweep", "alpha=0.5:2:4"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["lambda1", "lambda2", "power", "k1", "k2", "alpha", "value", "method", "condition"]
    );
    let values: Vec<f64> = r.records().map(|rec| rec.unwrap()[6].parse().unwrap()).collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn table_single_point() {
    let o = table(&["--sweep", "alpha=1:1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = table(&["--alpha", "1"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn table_grid_order_is_first_sweep_outermost() {
    let o = besselrad(&[
        "table", "--sweep", "k1=1:2:2", "--sweep", "alpha=1:3:3", "--lambda1", "0", "--lambda2", "0",
        "--power", "1", "--k2", "1",
    ]);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let keys: Vec<(f64, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[3].parse().unwrap(), rec[5].parse().unwrap())
        })
        .collect();
    assert_eq!(keys, [(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]);
}

#[test]
fn table_inapplicable_rows() {
    let args = ["table", "--sweep", "lambda1=0:2:3", "--lambda2", "0", "--power", "1", "--k1", "1", "--k2", "1", "--alpha", "1"];
    let o = besselrad(&args);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<csv::StringRecord> = csv::Reader::from_reader(o.stdout.as_slice()).records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[0][7], "EQ_2_8");
    assert_eq!((&rows[1][6], &rows[1][7]), ("ERROR", "NA"));

    let mut fallback = args.to_vec();
    fallback.push("--fallback-oracle");
    let o = besselrad(&fallback);
    let rows: Vec<csv::StringRecord> = csv::Reader::from_reader(o.stdout.as_slice()).records().map(Result::unwrap).collect();
    assert_eq!(&rows[2][7], "NA");
    let v: f64 = rows[2][6].parse().unwrap();
    assert!(v > 0.0);
}

#[test]
fn table_usage_errors() {
    for sweep in ["alpha=1:2", "alpha", "gamma=1:2:3", "alpha=1:2:0", "lambda1=0:1:3"] {
        assert_eq!(table(&["--sweep", sweep]).status.code(), Some(2), "{sweep}");
    }
    // alpha neither fixed nor swept
    assert_eq!(table(&[]).status.code(), Some(2));
    // fixed and swept at once
    assert_eq!(table(&["--alpha", "1", "--sweep", "alpha=1:2:2"]).status.code(), Some(2));
}

#[test]
fn table_unwritable_path_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = table(&["--alpha", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn table_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let json_path = dir.path().join("t.json");
    let sweep = ["--sweep", "alpha=0.3:2.7:5", "--oracle"];
    let mut a = sweep.to_vec();
    a.extend(["--out", csv_path.to_str().unwrap()]);
    assert_eq!(table(&a).status.code(), Some(0));
    let mut b = sweep.to_vec();
    b.extend(["--format", "json", "--out", json_path.to_str().unwrap()]);
    assert_eq!(table(&b).status.code(), Some(0));

    let csv_bytes = std::fs::read(&csv_path).unwrap();
    let mut reader = csv::Reader::from_reader(csv_bytes.as_slice());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(reader.headers().unwrap()).unwrap();
    for rec in reader.records() {
        w.write_record(&rec.unwrap()).unwrap();
    }
    assert_eq!(w.into_inner().unwrap(), csv_bytes);
    assert!(!csv_bytes.contains(&b'\r'));

    let json_text = std::fs::read_to_string(&json_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 5);
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", json_text);

    // Both files carry the same values.
    let from_csv: Vec<f64> = csv::Reader::from_reader(csv_bytes.as_slice())
        .records()
        .map(|r| r.unwrap()[6].parse().unwrap())
        .collect();
    let from_json: Vec<f64> = parsed.as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(from_csv, from_json);
}

#[test]
fn wigner_symbols() {
    let o = besselrad(&["wigner3j", "--j", "1,1,0", "--m", "0,0,0"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("-sqrt(1/3)"));
    let v: f64 = lines.next().unwrap().parse().unwrap();
    assert!((v + 0.5773502692).abs() < 1e-10);

    assert_eq!(stdout(&besselrad(&["wigner3j", "--j", "1,1,1", "--m", "0,0,0"])).lines().next(), Some("0"));
    assert_eq!(stdout(&besselrad(&["wigner3j", "--j", "1,1,1", "--m", "1,-1,0"])).lines().next(), Some("sqrt(1/6)"));

    let o = besselrad(&["wigner6j", "--j", "1,1,1,1,1,1", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["exact"], "sqrt(1/36)");
    assert_eq!(json["value"].as_f64().unwrap(), 1.0 / 6.0);

    for args in [
        &["wigner3j", "--j", "1,1", "--m", "0,0,0"][..],
        &["wigner3j", "--j", "1,1,1", "--m", "2,0,-2"],
        &["wigner3j", "--j", "a,1,1", "--m", "0,0,0"],
        &["wigner6j", "--j", "1,1,1,1,1"],
        &["wigner6j", "--j", "1,1,1,1,1,999"],
    ] {
        assert_eq!(besselrad(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn check_equal_order_suite() {
    let o = besselrad(&["check", "--suite", "eq29", "--max-l", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("PASS 108/108"));
    for line in text.lines().filter(|l| l.starts_with("ok")) {
        let d: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
        assert!(d <= 1e-8, "{line}");
    }
}

#[test]
fn check_wigner_and_three_bessel_suites() {
    let o = besselrad(&["--quiet", "check", "--suite", "wigner"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS "));

    let o = besselrad(&["--json", "check", "--suite", "eq21"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["suites"][0]["tolerance"], 1e-3);
}

#[test]
fn check_failure_and_nonconvergence_codes() {
    // An impossible tolerance fails cases rather than erroring.
    let o = besselrad(&["--quiet", "--rel-tol", "1e-30", "check", "--suite", "eq212", "--max-l", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL "));

    let o = Command::new(env!("CARGO_BIN_EXE_besselrad"))
        .args(["check", "--suite", "eq29", "--max-l", "1"])
        .env("BESSELRAD_PANEL_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn output_is_deterministic() {
    let args = ["table", "--sweep", "lambda1=0:3:4", "--sweep", "alpha=0.5:1.5:3", "--lambda2", "1", "--power", "2", "--k1", "1.3", "--k2", "0.7", "--oracle"];
    let first = besselrad(&args);
    assert_eq!(first.status.code(), Some(0));
    for _ in 0..3 {
        assert_eq!(besselrad(&args).stdout, first.stdout);
    }
    let check = ["check", "--suite", "eq26", "--max-l", "1"];
    assert_eq!(besselrad(&check).stdout, besselrad(&check).stdout);
}
