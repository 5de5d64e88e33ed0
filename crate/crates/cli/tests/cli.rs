use std::io::{self, Write};
use std::process::Command;

use proptest::prelude::*;
use qfrac_cli::report::{OutputRecord, ResultPayload};
use qfrac_cli::{parse_threads, run, Failure, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};

fn invoke(args: &[&str]) -> (i32, String, String) {
    invoke_with_threads(args, None)
}

fn invoke_with_threads(args: &[&str], threads: Option<&str>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qfrac").chain(args.iter().copied());
    let code = run(argv, threads, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn record(args: &[&str]) -> OutputRecord {
    let (code, out, err) = invoke(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn run_reports_estimate_and_exact_fraction() {
    let r = record(&[
        "run", "--predicate", "x*x mod 16 == 1", "--qubits", "4", "--shots", "10000", "--seed", "42", "--verify",
        "--format", "json",
    ]);
    assert_eq!(r.schema_version, "1");
    assert_eq!(r.command, "run");
    assert_eq!(r.config.seed, Some(42));
    let ResultPayload::Estimate(e) = r.result else { panic!("{:?}", r.result) };
    assert!((e.f_hat - 0.25).abs() <= 0.03);
    assert_eq!(e.exact_f.unwrap().to_string(), "1/4");
    assert!(r.timing.contains_key("sample_s"));
}

#[test]
fn run_always_true() {
    let r = record(&["run", "--predicate", "0 == 0", "--qubits", "3", "--shots", "16"]);
    let ResultPayload::Estimate(e) = r.result else { panic!() };
    assert_eq!((e.f_hat, e.ones), (1.0, 16));
    assert_eq!(r.config.seed, Some(0));
}

#[test]
fn run_from_epsilon_delta() {
    let r = record(&["run", "--predicate", "x < 2", "--qubits", "3", "--epsilon", "0.1", "--delta", "0.05", "--mode", "analytic"]);
    assert_eq!(r.config.shots, Some(185));
}

#[test]
fn random_seed_is_echoed() {
    let r = record(&["run", "--predicate", "x < 2", "--qubits", "3", "--shots", "10", "--seed", "random"]);
    let ResultPayload::Estimate(e) = r.result else { panic!() };
    assert_eq!(r.config.seed, Some(e.seed));
}

#[test]
fn count_examples() {
    for (pred, k, s, f) in [("x*x mod 16 == 1", "4", 4, "1/4"), ("0 == 1", "10", 0, "0"), ("x < 512", "10", 512, "1/2")] {
        let r = record(&["count", "--predicate", pred, "--qubits", k]);
        let ResultPayload::Count(c) = r.result else { panic!() };
        assert_eq!(c.solution_count, s);
        assert_eq!(c.exact_f.to_string(), f);
    }
    let (_, text, _) = invoke(&["count", "--predicate", "x*x mod 16 == 1", "--qubits", "4", "--format", "text"]);
    assert_eq!(text, "predicate: x*x mod 16 == 1  (k = 4)\nS = 4\n2^k = 16\nf = 1/4\n");
}

#[test]
fn plan_examples() {
    for (e, d, p) in [("0.01", "0.05", 18445), ("0.1", "0.05", 185), ("0.999", "0.999", 1)] {
        let r = record(&["plan", "--epsilon", e, "--delta", d]);
        let ResultPayload::Plan(plan) = r.result else { panic!() };
        assert_eq!(plan.shots, p);
        assert!(plan.statement.contains("Hoeffding"));
    }
}

#[test]
fn compare_examples() {
    let r = record(&["compare", "--predicate", "x < 4", "--qubits", "4", "--shots", "10000"]);
    let ResultPayload::Comparison(c) = r.result else { panic!() };
    assert!((c.quantum.f_hat - 0.25).abs() <= 0.03 && (c.classical.f_hat - 0.25).abs() <= 0.03);
    assert!(c.ci_overlap);
    let r = record(&["compare", "--predicate", "0 == 0", "--qubits", "4", "--shots", "100"]);
    let ResultPayload::Comparison(c) = r.result else { panic!() };
    assert_eq!(c.abs_difference, 0.0);
}

#[test]
fn sweep_rows_and_single_width() {
    let r = record(&["sweep", "--fraction-family", "quarter", "--qubits-list", "4,6,8", "--shots", "512", "--seed", "3"]);
    let ResultPayload::Sweep(rows) = r.result else { panic!() };
    assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![4, 6, 8]);
    assert!(rows.iter().all(|r| r.hoeffding_bound == rows[0].hoeffding_bound));

    let sweep = record(&["sweep", "--fraction-family", "quarter", "--qubits-list", "6", "--shots", "512", "--seed", "3"]);
    let run = record(&["run", "--predicate", "x < 1 << (6 - 2)", "--qubits", "6", "--shots", "512", "--seed", "3", "--verify"]);
    let (ResultPayload::Sweep(rows), ResultPayload::Estimate(e)) = (sweep.result, run.result) else { panic!() };
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].estimate, e);
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[],
        &["bogus"],
        &["run", "--predicate", "x ==", "--qubits", "4", "--shots", "1"],
        &["run", "--predicate", "x == 1", "--qubits", "4"],
        &["run", "--predicate", "x == 1", "--shots", "4"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "5", "--epsilon", "0.1", "--delta", "0.1"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--epsilon", "0.1"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "0"],
        &["run", "--predicate", "x == 1", "--qubits", "25", "--shots", "4"],
        &["run", "--predicate", "x == 1", "--qubits", "0", "--shots", "4"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "4", "--alpha", "1.5"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "4", "--seed", "-3"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "4", "--ci", "wald"],
        &["run", "--predicate", "x == 1", "--qubits", "4", "--shots", "4", "--format", "xml"],
        &["compare", "--predicate", "x == (", "--qubits", "4", "--shots", "10"],
        &["count", "--predicate", "x + (x == 1) > 0", "--qubits", "4"],
        &["count", "--predicate", "x == 99999999999999999999", "--qubits", "4"],
        &["plan", "--epsilon", "0", "--delta", "0.05"],
        &["plan", "--epsilon", "0.1", "--delta", "1"],
        &["plan", "--epsilon", "0.1"],
        &["sweep", "--fraction-family", "quarter", "--qubits-list", "", "--shots", "10"],
        &["sweep", "--fraction-family", "quarter", "--shots", "10"],
        &["sweep", "--fraction-family", "x < {n}", "--qubits-list", "4", "--shots", "10"],
        &["sweep", "--fraction-family", "x <", "--qubits-list", "4", "--shots", "10"],
        &["sweep", "--fraction-family", "x < {k}", "--qubits-list", "4,5", "--shots", "10"],
    ];
    for args in cases {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {out}{err}");
        assert!(out.is_empty(), "{args:?} wrote to stdout");
        assert!(!err.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn syntax_diagnostic_names_offset() {
    let (_, _, err) = invoke(&["run", "--predicate", "x == (", "--qubits", "4", "--shots", "1"]);
    assert!(err.contains("syntax error at byte 5"), "{err}");
}

#[test]
fn bad_thread_env_is_usage_error() {
    for v in ["0", "-1", "many", ""] {
        let (code, _, _) = invoke_with_threads(&["plan", "--epsilon", "0.1", "--delta", "0.1"], Some(v));
        assert_eq!(code, EXIT_USAGE, "{v:?}");
    }
    assert_eq!(parse_threads(Some("3")).unwrap(), Some(3));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(invoke(&["--help"]).0, EXIT_OK);
    assert_eq!(invoke(&["--version"]).0, EXIT_OK);
    assert_eq!(invoke(&["run", "--help"]).0, EXIT_OK);
}

struct Broken;

impl Write for Broken {
    fn write(&mut self, _: &[u8]) -> io::Result<usize> {
        Err(io::Error::new(io::ErrorKind::BrokenPipe, "closed"))
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[test]
fn runtime_failures_exit_1() {
    let mut err = Vec::new();
    let code = run(["qfrac", "plan", "--epsilon", "0.1", "--delta", "0.1"], None, &mut Broken, &mut err);
    assert_eq!(code, EXIT_RUNTIME);

    let degenerate = qfrac_core::Error::NumericalDegeneracy { outcome: 1, probability: 0.0 };
    assert_eq!(Failure::from(degenerate).exit_code(), EXIT_RUNTIME);
    let drift = qfrac_core::Error::NormalizationDrift { operation: "apply_oracle", norm: 2.0 };
    assert_eq!(Failure::from(drift).exit_code(), EXIT_RUNTIME);
    assert_eq!(Failure::from(qfrac_core::Error::Allocation { bytes: 1 }).exit_code(), EXIT_RUNTIME);
}

fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

#[test]
fn csv_matches_json_numbers() {
    let base = ["run", "--predicate", "x mod 7 == 3", "--qubits", "6", "--shots", "3000", "--seed", "5", "--verify"];
    let json = record(&base);
    let ResultPayload::Estimate(e) = json.result else { panic!() };
    let (_, csv_out, _) = invoke(&[&base[..], &["--format", "csv"]].concat());
    let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let field = |name: &str| row.get(headers.iter().position(|h| h == name).unwrap()).unwrap().to_string();
    for (name, v) in [("f_hat", e.f_hat), ("ci_low", e.ci_low), ("ci_high", e.ci_high), ("alpha", e.alpha)] {
        assert_eq!(sig12(field(name).parse().unwrap()), sig12(v), "{name}");
    }
    assert_eq!(field("ones"), e.ones.to_string());
    assert_eq!(field("exact_f"), e.exact_f.unwrap().to_string());

    let sweep = ["sweep", "--fraction-family", "half", "--qubits-list", "3,5", "--shots", "800"];
    let json = record(&sweep);
    let ResultPayload::Sweep(rows) = json.result else { panic!() };
    let (_, csv_out, _) = invoke(&[&sweep[..], &["--format", "csv"]].concat());
    let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
    let headers = reader.headers().unwrap().clone();
    for (row, r) in reader.records().map(Result::unwrap).zip(&rows) {
        let field = |name: &str| row.get(headers.iter().position(|h| h == name).unwrap()).unwrap().parse::<f64>().unwrap();
        assert_eq!(sig12(field("f_hat")), sig12(r.estimate.f_hat));
        assert_eq!(sig12(field("hoeffding_bound")), sig12(r.hoeffding_bound));
        assert_eq!(sig12(field("abs_error")), sig12(r.abs_error));
    }
}

#[test]
fn records_reject_unknown_fields() {
    let r = record(&["count", "--predicate", "x < 3", "--qubits", "4"]);
    let mut v = serde_json::to_value(&r).unwrap();
    v["surprise"] = serde_json::json!(1);
    assert!(serde_json::from_value::<OutputRecord>(v).is_err());
    let mut v = serde_json::to_value(&r).unwrap();
    v["result"]["extra"] = serde_json::json!(true);
    assert!(serde_json::from_value::<OutputRecord>(v).is_err());
}

#[test]
fn every_command_emits_schema_valid_json() {
    let commands: &[&[&str]] = &[
        &["run", "--predicate", "x < 5", "--qubits", "4", "--shots", "100"],
        &["run", "--predicate", "x < 5", "--qubits", "4", "--shots", "100", "--verify", "--ci", "clopper-pearson"],
        &["compare", "--predicate", "x < 5", "--qubits", "4", "--shots", "100", "--verify"],
        &["count", "--predicate", "x < 5", "--qubits", "4"],
        &["plan", "--epsilon", "0.2", "--delta", "0.2"],
        &["sweep", "--fraction-family", "all", "--qubits-list", "2,3", "--shots", "10"],
    ];
    for args in commands {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_OK, "{err}");
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value.as_object().unwrap().len(), 5);
        let positions: Vec<usize> = ["schema_version", "command", "config", "result", "timing"]
            .iter()
            .map(|k| out.find(&format!("\"{k}\":")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "key order in {out}");
        let rec: OutputRecord = serde_json::from_value(value).unwrap();
        assert_eq!(rec.command, args[0]);
        // Re-emitting reproduces the original bytes.
        assert_eq!(serde_json::to_string(&rec).unwrap() + "\n", out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_round_trips(seed in any::<u64>(), shots in 1u64..400, k in 1u32..8, verify in any::<bool>(), cp in any::<bool>()) {
        let seed = seed.to_string();
        let shots = shots.to_string();
        let k = k.to_string();
        let mut args = vec!["run", "--predicate", "x mod 3 == 1", "--qubits", &k, "--shots", &shots, "--seed", &seed];
        if verify {
            args.push("--verify");
        }
        if cp {
            args.extend(["--ci", "clopper-pearson"]);
        }
        let (code, out, _) = invoke(&args);
        prop_assert_eq!(code, EXIT_OK);
        let rec: OutputRecord = serde_json::from_str(&out).unwrap();
        let again: OutputRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        prop_assert_eq!(rec, again);
    }
}

fn strip_timing(out: &str) -> &str {
    out.split(",\"timing\":").next().unwrap()
}

#[test]
fn binary_output_is_deterministic_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_qfrac");
    let args = ["run", "--predicate", "x*x mod 16 == 1", "--qubits", "4", "--shots", "5000", "--seed", "9", "--verify"];
    let outputs: Vec<String> = [None, Some("1"), Some("3")]
        .into_iter()
        .map(|threads| {
            let mut cmd = Command::new(bin);
            cmd.args(args).env_remove("QFRAC_THREADS");
            if let Some(t) = threads {
                cmd.env("QFRAC_THREADS", t);
            }
            let out = cmd.output().unwrap();
            assert!(out.status.success());
            String::from_utf8(out.stdout).unwrap()
        })
        .collect();
    assert!(outputs.iter().all(|o| strip_timing(o) == strip_timing(&outputs[0])));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qfrac");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["plan", "--epsilon", "0.1", "--delta", "0.05"]), Some(0));
    assert_eq!(status(&["run", "--predicate", "x ==", "--qubits", "4", "--shots", "1"]), Some(2));
    assert_eq!(status(&["sweep", "--fraction-family", "quarter", "--qubits-list", "", "--shots", "1"]), Some(2));
}
