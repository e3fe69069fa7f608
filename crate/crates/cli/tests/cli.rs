use std::path::PathBuf;
use std::process::{Command, Output};

use credit_ytm::continuous::{self, ContinuousBondSpec, ContinuousCreditAssumptions, IntensitySpec};
use credit_ytm::curves::{self, classify_slope, ScenarioModel, ScenarioSpec};
use credit_ytm::discrete::DiscreteHazard;
use credit_ytm::FlatRate;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credit-ytm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("credit-ytm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn price_example() {
    let o = run(&["price", "--model", "discrete", "--coupon", "0", "--maturity", "10", "--lambda", "0.10", "--recovery", "80", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(0));
    let p: f64 = stdout(&o).trim().parse().unwrap();
    assert!((p - 71.517_288_674_388_18).abs() < 1e-10);
}

#[test]
fn par_yield_example() {
    let o = run(&["par-yield", "--model", "discrete", "--lambda", "0.01", "--recovery", "80", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0.0323"), "{}", stdout(&o));
}

#[test]
fn percent_sign_is_validation_error() {
    let o = run(&["par-yield", "--lambda", "0.01", "--recovery", "80", "--rate", "3%"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--rate"));
    assert!(stderr(&o).contains("percent"));
}

#[test]
fn missing_and_bad_inputs_exit_2() {
    let o = run(&["price", "--coupon", "5", "--maturity", "10", "--lambda", "0.1", "--recovery", "80"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--rate"));

    let o = run(&["price", "--coupon", "5", "--maturity", "10", "--lambda", "1.5", "--recovery", "80", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lambda"));

    let o = run(&["price", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreachable_quote_exits_3_naming_maturity() {
    let q = temp_file("rich.csv", "maturity_years,coupon_rate,clean_price\n1,0.05,99\n2,0,95\n");
    let o = run(&["bootstrap", "--quotes-file", q.to_str().unwrap(), "--recovery", "40", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("maturing at 2"), "{}", stderr(&o));
}

#[test]
fn percent_in_file_names_column() {
    let q = temp_file("pct.csv", "maturity_years,coupon_rate,clean_price\n1,5%,99\n");
    let o = run(&["bootstrap", "--quotes-file", q.to_str().unwrap(), "--recovery", "40", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coupon_rate"));
}

#[test]
fn verify_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!out.contains("FAIL"));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let h = temp_file("haz.csv", "period_or_time,lambda\n1,0.1\n2,0.08\n3,0.06\n4,0.05\n5,0.05\n");
    let args = ["curve", "--hazard-file", h.to_str().unwrap(), "--recovery", "80", "--rate", "0.03", "--maturities", "1..5", "--coupon-rates", "0,0.04,0.08"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let out = std::env::temp_dir().join(format!("credit-ytm-cli-{}", std::process::id())).join("curve.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--format", "json", "--out", out.to_str().unwrap()]);
    run(&with_out);
    let first = std::fs::read(&out).unwrap();
    run(&with_out);
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn curve_csv_round_trip_classification() {
    let o = run(&["curve", "--lambda", "0.1", "--recovery", "80", "--rate", "0.03", "--maturities", "1..30", "--coupon-rates", "0,0.02,0.12"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), curves::CSV_HEADER.split(',').collect::<Vec<_>>());
    let rows: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[2].parse().unwrap(), r[4].parse().unwrap())
        })
        .collect();

    let table = curves::generate(&ScenarioSpec {
        model: ScenarioModel::Discrete(DiscreteHazard::Constant(0.1)),
        maturities: (1..=30).map(f64::from).collect(),
        coupon_rates: vec![0.0, 0.02, 0.12],
        recovery: 80.0,
        risk_free: FlatRate::new(0.03).unwrap(),
    })
    .unwrap();
    for c in [0.0, 0.02, 0.12] {
        let parsed: Vec<f64> = rows.iter().filter(|r| r.0 == c).map(|r| r.1).collect();
        assert_eq!(parsed.len(), 30);
        assert_eq!(classify_slope(&parsed), classify_slope(&table.column(c)), "coupon {c}");
    }
}

#[test]
fn json_mirrors_csv_headers() {
    let o = run(&["curve", "--lambda", "0.1", "--recovery", "80", "--rate", "0.03", "--maturities", "10", "--coupon-rates", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, curves::CSV_HEADER.split(',').collect::<Vec<_>>());
    assert!((v[0]["ytm"].as_f64().unwrap() - 0.0341).abs() < 1e-4);
}

#[test]
fn continuous_models_and_cds() {
    let o = run(&["ytm", "--model", "continuous", "--coupon", "0", "--maturity", "10", "--lambda", "0.1", "--recovery", "80", "--rate", "0.03"]);
    let y: f64 = stdout(&o).trim().parse().unwrap();
    assert!((y - 0.032_822_002_983_896_8).abs() < 1e-12);

    let o = run(&["cds", "--model", "discrete", "--lambda", "0.1", "--recovery", "80", "--rate", "0.03", "--maturity", "5"]);
    let s: f64 = stdout(&o).trim().parse().unwrap();
    assert!((s - 0.2 * 0.1 / 0.9).abs() < 1e-12);

    let k = temp_file("lin.csv", "period_or_time,lambda\n0,0.01\n10,0.21\n");
    let o = run(&["cds", "--model", "continuous", "--hazard-file", k.to_str().unwrap(), "--hazard-interp", "linear", "--recovery-fraction", "0.4", "--rate", "0.03", "--maturities", "1..5", "--kernel", "consistent"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let spreads: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(spreads.len(), 5);
    assert!(spreads.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn bootstrap_round_trip() {
    let truth = [0.02, 0.05, 0.03];
    let credit = ContinuousCreditAssumptions::new(IntensitySpec::yearly(truth.to_vec()).unwrap(), 40.0).unwrap();
    let mut quotes = String::from("maturity_years,coupon_rate,clean_price\n");
    for t in 1..=3 {
        let spec = ContinuousBondSpec::with_coupon(5.0, f64::from(t)).unwrap();
        let p = continuous::price(&spec, &credit, FlatRate::new(0.03).unwrap()).unwrap();
        quotes.push_str(&format!("{t},0.05,{p:?}\n"));
    }
    let q = temp_file("quotes.csv", &quotes);
    let o = run(&["bootstrap", "--quotes-file", q.to_str().unwrap(), "--recovery", "40", "--rate", "0.03"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lambdas: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (l, t) in lambdas.iter().zip(truth) {
        assert!((l - t).abs() < 1e-8);
    }

    let z = temp_file("zero.csv", "maturity_years,zero_rate\n1,0.03\n5,0.03\n");
    let o = run(&["bootstrap", "--quotes-file", q.to_str().unwrap(), "--recovery", "40", "--zero-curve-file", z.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lambdas: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (l, t) in lambdas.iter().zip(truth) {
        assert!((l - t).abs() < 1e-7);
    }
}
