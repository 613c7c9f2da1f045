use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use semflow::diagram::{from_json_str, is_isomorphic, labeled_isomorphic, to_json_string, PortType, Source, Target, WiringDiagram};
use semflow_cli::{run_with, EXIT_FAIL, EXIT_IO, EXIT_OK, ONTOLOGY_ENV};
use semflow_testkit::gen::BoxKind;
use semflow_testkit::{fixture, synthetic};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn semflow(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("semflow").chain(args.iter().copied()), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fx(rel: &str) -> String {
    fixture(rel).to_str().unwrap().to_string()
}

fn expected(name: &str) -> WiringDiagram {
    from_json_str(&fs::read_to_string(fixture(&format!("expected/{name}.json"))).unwrap()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = semflow(&["validate", "--ontology", &fx("ontology")]);
    assert_eq!((ok.code, ok.stdout.as_str()), (EXIT_OK, ""));

    let bad = semflow(&["validate", "--ontology", &fx("invalid/ill-typed.json")]);
    assert_eq!(bad.code, EXIT_FAIL);
    let line: serde_json::Value = serde_json::from_str(bad.stdout.trim()).unwrap();
    assert_eq!(line["class"], "ill-typed-definition");
    assert_eq!(line["severity"], "error");

    let warn = &fx("invalid/not-functorial.json");
    assert_eq!(semflow(&["validate", "--ontology", warn]).code, EXIT_OK);
    let strict = semflow(&["validate", "--ontology", warn, "--strict"]);
    assert_eq!((strict.code, strict.stdout.lines().count()), (EXIT_FAIL, 2));

    let cyc = semflow(&["validate", "--ontology", &fx("invalid/cyclic-subtypes.json"), "--strict"]);
    assert_eq!(cyc.code, EXIT_OK);
    assert!(cyc.stdout.contains("\"subtype-cycle\"") && cyc.stdout.contains("\"info\""));

    assert_eq!(semflow(&["validate", "--ontology", "/no/such/dir"]).code, EXIT_IO);
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "[{\"schema\": ").unwrap();
    let parse = semflow(&["validate", "--ontology", path(&broken)]);
    assert_eq!(parse.code, EXIT_IO);
    assert!(parse.stderr.contains("broken.json"), "{}", parse.stderr);
}

#[test]
fn raw_writes_the_flow_graph() {
    let r = semflow(&["raw", &fx("traces/kmeans-sklearn.jsonl")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(is_isomorphic(&from_json_str(&r.stdout).unwrap(), &expected("kmeans-sklearn.raw")));
    let again = semflow(&["raw", &fx("traces/kmeans-sklearn.jsonl")]);
    assert_eq!(again.stdout, r.stdout);
    let dot = semflow(&["raw", &fx("traces/kmeans-sklearn.jsonl"), "--format", "dot"]);
    assert!(dot.stdout.starts_with("digraph"));
}

#[test]
fn several_inputs_need_a_directory() {
    let traces = [fx("traces/kmeans-scipy.jsonl"), fx("traces/kmeans-r.jsonl")];
    assert_eq!(semflow(&["raw", &traces[0], &traces[1]]).code, EXIT_IO);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("graphs");
    let r = semflow(&["raw", &traces[0], &traces[1], "--out", path(&out)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    for stem in ["kmeans-scipy", "kmeans-r"] {
        let d = from_json_str(&fs::read_to_string(out.join(format!("{stem}.json"))).unwrap()).unwrap();
        assert!(is_isomorphic(&d, &expected(&format!("{stem}.raw"))), "{stem}");
    }
    let single = dir.path().join("one.json");
    assert_eq!(semflow(&["raw", &traces[1], "--out", path(&single)]).code, EXIT_OK);
    assert_eq!(fs::read_to_string(&single).unwrap(), fs::read_to_string(out.join("kmeans-r.json")).unwrap());
}

#[test]
fn enrich_matches_expected_semantic_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let stems = ["kmeans-scipy", "kmeans-sklearn", "kmeans-r", "regression-sklearn"];
    let traces: Vec<String> = stems.iter().map(|s| fx(&format!("traces/{s}.jsonl"))).collect();
    let mut args = vec!["enrich", "--ontology", "PLACEHOLDER", "--out", path(dir.path())];
    let ont = fx("ontology");
    args[2] = &ont;
    args.extend(traces.iter().map(String::as_str));
    let r = semflow(&args);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let reports: Vec<serde_json::Value> = r.stderr.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 4);
    assert_eq!(reports[1]["report"]["expanded_boxes"], 5);
    for stem in &stems[..3] {
        let d = from_json_str(&fs::read_to_string(dir.path().join(format!("{stem}.json"))).unwrap()).unwrap();
        assert!(labeled_isomorphic(&d, &expected("kmeans.semantic")), "{stem}");
    }
    let reg = dir.path().join("regression-sklearn.json");
    assert!(is_isomorphic(&from_json_str(&fs::read_to_string(&reg).unwrap()).unwrap(), &expected("regression-sklearn.semantic")));
    // one input at a time gives the same bytes as the batch
    let alone = semflow(&["enrich", "--ontology", &ont, &traces[3]]);
    assert_eq!(alone.stdout, fs::read_to_string(&reg).unwrap());
    // a raw diagram file written by `raw` enriches like its trace
    let raw_file = dir.path().join("raw.json");
    assert_eq!(semflow(&["raw", &traces[3], "--out", path(&raw_file)]).code, EXIT_OK);
    let raw = semflow(&["enrich", "--ontology", &ont, path(&raw_file)]);
    assert_eq!(raw.code, EXIT_OK);
    assert!(is_isomorphic(&from_json_str(&raw.stdout).unwrap(), &expected("regression-sklearn.semantic")));
}

/// A lone `cg` box whose second argument is not named as the annotation
/// expects.
fn mismatched(dir: &Path) -> (PathBuf, PathBuf) {
    let ont = dir.join("synthetic.json");
    fs::write(&ont, synthetic::ONTOLOGY).unwrap();
    let mut cg = BoxKind::concrete("cg", &["A", "B"], &["C"]);
    cg.call.as_mut().unwrap().args = vec![Some("a0".into()), Some("other".into())];
    let mut d = WiringDiagram::new(vec![PortType::labeled("python:A"), PortType::labeled("python:B")], vec![]);
    let id = d.add_box(cg.block());
    d.add_wire(Source::OuterIn(0), Target::BoxIn(id, 0));
    d.add_wire(Source::OuterIn(1), Target::BoxIn(id, 1));
    let k = d.add_output(PortType::labeled("python:C"));
    d.add_wire(Source::BoxOut(id, 0), Target::OuterOut(k));
    let input = dir.join("mismatch.json");
    fs::write(&input, to_json_string(&d)).unwrap();
    (ont, input)
}

#[test]
fn strict_enrichment_fails_where_lenient_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (ont, input) = mismatched(dir.path());
    let lenient = semflow(&["enrich", "--ontology", path(&ont), path(&input)]);
    assert_eq!(lenient.code, EXIT_OK, "{}", lenient.stderr);
    assert!(lenient.stderr.contains("\"skipped\":[{\"box_name\":\"cg\""), "{}", lenient.stderr);
    let strict = semflow(&["enrich", "--strict", "--ontology", path(&ont), path(&input)]);
    assert_eq!(strict.code, EXIT_FAIL);
    assert!(strict.stderr.contains("does not fit box"), "{}", strict.stderr);
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{}").unwrap();
    assert_eq!(semflow(&["enrich", "--ontology", path(&ont), path(&garbage)]).code, EXIT_IO);
}

#[test]
fn iso_compares_diagrams() {
    let a = fx("expected/kmeans.semantic.json");
    let b = fx("expected/kmeans-r.raw.json");
    assert_eq!(semflow(&["iso", &a, &a]).code, EXIT_OK);
    assert_eq!(semflow(&["iso", &a, &b]).code, EXIT_FAIL);
    assert_eq!(semflow(&["iso", &a, "/missing.json"]).code, EXIT_IO);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let r = semflow(&["enrich", "--ontology", &fx("ontology"), &fx("traces/kmeans-scipy.jsonl"), "--out", path(&out)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(semflow(&["iso", "--labeled-only", path(&out), &a]).code, EXIT_OK);
}

#[test]
fn usage_errors() {
    assert_eq!(semflow(&[]).code, EXIT_IO);
    assert_eq!(semflow(&["frobnicate"]).code, EXIT_IO);
    assert_eq!(semflow(&["raw"]).code, EXIT_IO);
    let help = semflow(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stderr.contains("enrich"));
}

#[test]
fn ontology_path_from_environment() {
    let bin = env!("CARGO_BIN_EXE_semflow");
    let trace = fx("traces/regression-sklearn.jsonl");
    let joined = std::env::join_paths([fixture("ontology/concepts.json"), fixture("ontology/python.json")]).unwrap();
    let out = Command::new(bin).args(["enrich", &trace]).env(ONTOLOGY_ENV, &joined).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let d = from_json_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(is_isomorphic(&d, &expected("regression-sklearn.semantic")));
    let none = Command::new(bin).args(["enrich", &trace]).env_remove(ONTOLOGY_ENV).output().unwrap();
    assert_eq!(none.status.code(), Some(EXIT_IO));
    assert!(String::from_utf8_lossy(&none.stderr).contains(ONTOLOGY_ENV));
}
