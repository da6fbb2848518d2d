use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use riesz_cli::{run, DaniellOut, Outcome, StoneRow, SumOut, SvarOut};
use riesz_core::formal_sums::{ColoredPieces, FourCorner, MinMax, Refinement, SubDecomposition};
use riesz_core::gauge::{ConvergenceRow, TaggedDivision};
use riesz_core::integral::{DarbouxBounds, NegligibilityCert, SeriesResult, VariationReport};
use riesz_core::selftest::SuiteReport;
use riesz_core::JordanTriple;

fn jobs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/jobs")
}

fn corpus() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(jobs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

fn riesz(args: &[&str]) -> Outcome {
    run(std::iter::once("riesz").chain(args.iter().copied()))
}

fn job(path: &std::path::Path) -> Outcome {
    riesz(&["job", "--spec", path.to_str().unwrap()])
}

/// Parses into `T` and checks re-serializing gives the same JSON value.
fn round_trip<T: Serialize + DeserializeOwned>(text: &str) {
    let typed: T = serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let raw: Value = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), raw);
}

fn diagnostic(out: &Outcome) -> String {
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn corpus_outputs_round_trip() {
    let jobs = corpus();
    assert_eq!(jobs.len(), 20);
    for path in jobs {
        let spec: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let out = job(&path);
        assert_eq!(out.code, 0, "{}: {}", path.display(), out.stdout);
        let mut text = out.stdout.clone();
        if spec["options"]["float_view"] == Value::Bool(true) {
            let v: Value = serde_json::from_str(&text).unwrap();
            assert!(v["float_view"].is_object() || v["float_view"].is_array());
            text = v["result"].to_string();
        }
        let op = spec["options"]["op"].as_str().unwrap_or("common");
        match spec["command"].as_str().unwrap() {
            "integrate" | "variations" => round_trip::<VariationReport>(&text),
            "decompose" => round_trip::<ColoredPieces>(&text),
            "refine" => match op {
                "common" => round_trip::<Refinement>(&text),
                "subdecompose" => round_trip::<SubDecomposition>(&text),
                "minmax" => round_trip::<MinMax>(&text),
                _ => round_trip::<FourCorner>(&text),
            },
            "jordan" => round_trip::<JordanTriple>(&text),
            "svar" => round_trip::<SvarOut>(&text),
            "darboux" => round_trip::<DarbouxBounds>(&text),
            "series" => round_trip::<SeriesResult>(&text),
            "negligible" => round_trip::<NegligibilityCert>(&text),
            "gauge-divide" => round_trip::<TaggedDivision>(&text),
            "gauge-sum" => round_trip::<SumOut>(&text),
            "gauge-table" => {
                let mut r = csv::Reader::from_reader(text.as_bytes());
                let rows: Vec<ConvergenceRow> = r.deserialize().collect::<Result<_, _>>().unwrap();
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &rows {
                    w.serialize(row).unwrap();
                }
                assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), text);
            }
            "stone" => round_trip::<Vec<StoneRow>>(&text),
            "daniell-roundtrip" => round_trip::<DaniellOut>(&text),
            other => panic!("unexpected command {other}"),
        }
    }
}

#[test]
fn worked_integral() {
    let out = job(&jobs_dir().join("01_integrate.json"));
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"overall": "0/1", "pos": "2/1", "neg": "2/1", "total": "4/1"})
    );
    // struct order, not alphabetical
    assert!(out.stdout.find("overall").unwrap() < out.stdout.find("neg").unwrap());
}

#[test]
fn flags_match_job_files() {
    let spec: Value =
        serde_json::from_str(&std::fs::read_to_string(jobs_dir().join("04_decompose_diagonal.json")).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("inputs.json");
    std::fs::write(&inputs, spec["inputs"]["inputs"].to_string()).unwrap();
    let by_flags = riesz(&["decompose", "--inputs", inputs.to_str().unwrap(), "--listing", "diagonal"]);
    let by_job = job(&jobs_dir().join("04_decompose_diagonal.json"));
    assert_eq!(by_flags, by_job);

    let inline = spec["inputs"]["inputs"].to_string();
    assert_eq!(riesz(&["decompose", "--inputs", &inline]), by_job);
}

#[test]
fn float_view_annotates() {
    let m = r#"{"lebesgue":[{"weight":"1","support":{"lo":"0","lo_closed":true,"hi":"3","hi_closed":false}}],"atoms":[]}"#;
    let out = riesz(&["jordan", "--measure", m, "--float-view"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["result"]["plus"]["lebesgue"][0]["weight"], "1/1");
    assert_eq!(v["float_view"]["plus"]["lebesgue"][0]["support"]["hi"], 3.0);
    round_trip::<JordanTriple>(&v["result"].to_string());
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("missing file", vec!["jordan".into(), "--measure".into(), "no/such/file.json".into()]),
        (
            "unknown input field",
            vec!["jordan".into(), "--measure".into(), r#"{"lebesgue":[],"atoms":[],"extra":1}"#.into()],
        ),
        ("bad rational", vec!["stone".into(), "--interval".into(), r#"{"lo":"1/0","lo_closed":true,"hi":"1","hi_closed":true}"#.into(), "--points".into(), "[]".into()]),
        ("unknown flag", vec!["jordan".into(), "--nope".into()]),
        ("bad listing", vec!["decompose".into(), "--inputs".into(), "[]".into(), "--listing".into(), "spiral".into()]),
        ("unknown suite", vec!["selftest".into(), "--suite".into(), "nope".into()]),
    ];
    for (what, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = riesz(&args);
        assert_eq!(out.code, 2, "{what}: {}", out.stdout);
        assert_eq!(diagnostic(&out), "ValidationError", "{what}");
    }
    let specs = [
        r#"{"command":"jordan","inputs":{"measure":{"lebesgue":[],"atoms":[]}},"extra":true}"#,
        r#"{"command":"jordan","inputs":{"measure":{"lebesgue":[],"atoms":[]}},"options":{"listing":"diagonal"}}"#,
        r#"{"command":"integral","inputs":{}}"#,
        r#"{"command":"jordan","inputs":{"measure":{"lebesgue":[],"atoms":[]}},"options":{"colour":"red"}}"#,
        r#"{"command":"series","inputs":{"measure":{"lebesgue":[],"atoms":[]}}}"#,
    ];
    for (k, s) in specs.iter().enumerate() {
        let p = dir.path().join(format!("{k}.json"));
        std::fs::write(&p, s).unwrap();
        let out = job(&p);
        assert_eq!(out.code, 2, "{s}: {}", out.stdout);
    }
}

#[test]
fn engine_errors_exit_3() {
    let i = |lo: &str, hi: &str| format!(r#"{{"lo":"{lo}","lo_closed":true,"hi":"{hi}","hi_closed":false}}"#);
    let m = format!(r#"{{"lebesgue":[{{"weight":"1","support":{}}}],"atoms":[{{"mass":"1","point":"1/2"}}]}}"#, i("0", "2"));
    let both = format!(r#"{{"terms":[{{"coeff":"+inf","set":{}}},{{"coeff":"-inf","set":{}}}]}}"#, i("0", "1"), i("0", "1"));
    let out = riesz(&["integrate", "--measure", &m, "--fsum", &both]);
    assert_eq!((out.code, diagnostic(&out).as_str()), (3, "IndefiniteIntegral"));

    let out = riesz(&["negligible", "--measure", &m, "--points", r#"["1/2"]"#]);
    assert_eq!((out.code, diagnostic(&out).as_str()), (3, "CannotCertify"));

    let out = riesz(&["negligible", "--measure", &m, "--points", r#"["1"]"#, "--epsilon=-1"]);
    assert_eq!((out.code, diagnostic(&out).as_str()), (3, "DomainError"));

    let c = format!(r#"{{"terms":[{{"coeff":"1","set":{}}}]}}"#, i("0", "1"));
    let d = format!(r#"{{"terms":[{{"coeff":"1","set":{}}}]}}"#, i("0", "2"));
    let out = riesz(&["refine", "--c", &c, "--d", &d]);
    assert_eq!((out.code, diagnostic(&out).as_str()), (3, "ProfileMismatch"));
    let out = riesz(&["refine", "--c", &d, "--d", &c, "--op", "subdecompose"]);
    assert_eq!((out.code, diagnostic(&out).as_str()), (3, "DominationError"));
}

#[test]
fn selftest_reports() {
    let out = riesz(&["selftest", "--suite", "stone", "--seed", "5"]);
    assert_eq!(out.code, 0);
    let reports: Vec<SuiteReport> = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].passed() && reports[0].cases > 0);
    round_trip::<Vec<SuiteReport>>(&out.stdout);
}

#[test]
fn help_exits_0() {
    let out = riesz(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("gauge"));
}

#[test]
fn gauge_sum_of_divided_gauge() {
    let domain = r#"{"lo":"0","lo_closed":true,"hi":"1","hi_closed":true}"#;
    let gauge = format!(r#"{{"cells":[{{"set":{domain},"delta":"1/8"}}]}}"#);
    let div = riesz(&["gauge", "divide", "--domain", domain, "--gauge", &gauge, "--kind", "kh"]);
    assert_eq!(div.code, 0);
    let f = r#"{"pieces":[{"set":{"lo":"0","lo_closed":true,"hi":"1/2","hi_closed":false},"value":"4"}]}"#;
    let m = format!(r#"{{"lebesgue":[{{"weight":"1","support":{domain}}}],"atoms":[]}}"#);
    let out = riesz(&["gauge", "sum", "--f", f, "--measure", &m, "--division", &div.stdout]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let s: SumOut = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(s.sum.to_string(), "2/1");
}
