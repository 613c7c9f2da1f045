use rand::seq::SliceRandom;
use rand::Rng;
use semflow::annotation::{
    load_lenient, load_ontology, ontology_from_str, ontology_to_json, ontology_to_string, LoadError, Severity,
};
use semflow::concrete::{CallKind, ConcreteCallKey};
use semflow::ontology::ObType;
use semflow_testkit::{fixture, oracle, rng};
use serde_json::json;

#[test]
fn shipped_ontology_loads_strictly() {
    let o = load_ontology(&[fixture("ontology")]).unwrap();
    assert_eq!(o.function_annotations().len() + o.type_annotations().len(), 19 + 8);
    assert_eq!(o.abstract_type("python", "str"), Some(&ObType::basic("string")));
    for a in o.function_annotations().values() {
        assert!(o.definition_diagram(&a.id).is_some(), "{}", a.id);
    }
    let (_, diags) = load_lenient(&[fixture("ontology")]).unwrap();
    assert!(diags.iter().all(|d| d.severity == Severity::Info), "{diags:?}");
}

#[test]
fn serialization_round_trips_byte_for_byte() {
    let o = load_ontology(&[fixture("ontology")]).unwrap();
    let text = ontology_to_string(&o);
    let back = ontology_from_str(&text, "round-trip").unwrap();
    assert_eq!(back, o);
    assert_eq!(ontology_to_string(&back), text);
    // each file alone also links when it is self-contained
    let concepts = load_ontology(&[fixture("ontology/concepts.json")]).unwrap();
    assert!(concepts.function_annotations().is_empty());
    assert_eq!(ontology_to_json(&concepts).as_array().unwrap().len(), 28);
}

fn load_err(name: &str) -> LoadError {
    load_ontology(&[fixture(&format!("invalid/{name}"))]).unwrap_err()
}

#[test]
fn ill_typed_definition_is_rejected() {
    assert!(matches!(load_err("ill-typed.json"), LoadError::IllTyped(id, _) if id == "python:pkg.fit_twice"));
    let (_, diags) = load_lenient(&[fixture("invalid/ill-typed.json")]).unwrap();
    assert_eq!(diags.len(), 1);
    assert_eq!((diags[0].class.as_str(), diags[0].severity), ("ill-typed-definition", Severity::Error));
}

#[test]
fn slot_count_mismatch_violates_functoriality() {
    match load_err("slot-arity.json") {
        LoadError::FunctorialityViolation { annotation, slot } => {
            assert_eq!((annotation.as_str(), slot.as_str()), ("python:pkg.fit", "inputs"))
        }
        e => panic!("{e}"),
    }
}

#[test]
fn receiver_type_outside_domain_violates_functoriality() {
    match load_err("not-functorial.json") {
        LoadError::FunctorialityViolation { annotation, slot } => {
            assert_eq!((annotation.as_str(), slot.as_str()), ("python:pkg.Frame.fit", "input 0"))
        }
        e => panic!("{e}"),
    }
    let (_, diags) = load_lenient(&[fixture("invalid/not-functorial.json")]).unwrap();
    let locs: Vec<_> = diags.iter().map(|d| (d.severity, d.location.clone().unwrap())).collect();
    assert_eq!(
        locs,
        [(Severity::Warning, "input 0".to_string()), (Severity::Warning, "output 0".to_string())]
    );
}

#[test]
fn subtype_cycles_are_informational() {
    let o = load_ontology(&[fixture("invalid/cyclic-subtypes.json")]).unwrap();
    assert!(o.preorder().leq_basic("array", "vector") && o.preorder().leq_basic("vector", "array"));
    let (_, diags) = load_lenient(&[fixture("invalid/cyclic-subtypes.json")]).unwrap();
    assert_eq!(diags.len(), 1);
    assert_eq!((diags[0].class.as_str(), diags[0].severity), ("subtype-cycle", Severity::Info));
}

#[test]
fn malformed_documents_are_located() {
    let cases = [
        (r#"[{"schema":"concept","kind":"type","id":"a"}, 3]"#, "entry 1"),
        (r#"{"schema":"concept","kind":"type","id":"Bad Id"}"#, "entry 0"),
        (r#"{"schema":"concept","kind":"type","id":"a","colour":"red"}"#, "entry 0"),
        (r#"{"schema":"concept","kind":"widget","id":"a"}"#, "entry 0"),
        ("[{", "line 1, column 2"),
        ("7", "top level"),
    ];
    for (text, at) in cases {
        match ontology_from_str(text, "doc.json") {
            Err(LoadError::Parse { file, location, .. }) => assert_eq!((file.as_str(), location.as_str()), ("doc.json", at)),
            r => panic!("{text}: {r:?}"),
        }
    }
    let dangling = r#"{"schema":"concept","kind":"function","id":"f","dom":"a","cod":"a"}"#;
    assert!(matches!(ontology_from_str(dangling, "x"), Err(LoadError::UnresolvedReference(t)) if t == "a"));
    let dup = r#"[{"schema":"concept","kind":"type","id":"a"},{"schema":"concept","kind":"type","id":"a"}]"#;
    assert!(matches!(ontology_from_str(dup, "x"), Err(LoadError::DuplicateId(t)) if t == "a"));
    assert!(matches!(load_ontology(&["/no/such/path.json"]), Err(LoadError::Io { .. })));
}

/// A random class hierarchy with `fit` annotations owned by some classes,
/// a few plain functions spread over packages, and occasional duplicates
/// that make resolution ambiguous.
fn random_annotated(r: &mut semflow_testkit::Rng) -> (String, Vec<String>, Vec<String>) {
    let classes: Vec<String> = (0..r.gen_range(2..10)).map(|i| format!("pkg.C{i}")).collect();
    let packages = ["p", "q", "r"];
    let mut docs = vec![
        json!({"schema": "concept", "kind": "type", "id": "t"}),
        json!({"schema": "concept", "kind": "function", "id": "fit", "dom": "t", "cod": "t"}),
    ];
    let mut n = 0;
    let mut ann = |docs: &mut Vec<serde_json::Value>, package: &str, kind: &str, owner: Option<&str>| {
        n += 1;
        let mut a = json!({"schema": "annotation", "kind": "function", "id": format!("a{n}"),
            "language": "python", "package": package, "function": "fit", "call_kind": kind,
            "inputs": [{"slot": "x"}], "outputs": [{"return": 0}], "definition": "fit"});
        if let Some(o) = owner {
            a["owner_type"] = json!(o);
        }
        docs.push(a);
    };
    for c in &classes {
        let copies = [0, 0, 1, 1, 1, 2].choose(r).copied().unwrap();
        for _ in 0..copies {
            ann(&mut docs, packages.choose(r).unwrap(), "method", Some(c));
        }
    }
    for _ in 0..r.gen_range(0..4) {
        ann(&mut docs, packages.choose(r).unwrap(), "function", None);
    }
    (serde_json::to_string(&docs).unwrap(), classes, packages.iter().map(|s| s.to_string()).collect())
}

#[test]
fn resolution_agrees_with_linear_scan() {
    let mut r = rng(41);
    let (mut hits, mut ambiguous) = (0, 0);
    for _ in 0..100 {
        let (text, classes, packages) = random_annotated(&mut r);
        let o = ontology_from_str(&text, "random").unwrap();
        for _ in 0..20 {
            let kind = if r.gen_bool(0.7) { CallKind::Method } else { CallKind::Function };
            let depth = r.gen_range(0..=classes.len());
            let mut lineage: Vec<String> = classes.choose_multiple(&mut r, depth).cloned().collect();
            lineage.push("builtins.object".into());
            let key = ConcreteCallKey {
                language: "python".into(),
                package: packages.choose(&mut r).unwrap().clone(),
                name: "fit".into(),
                kind,
            };
            let got = o.resolve_annotation(&key, &lineage);
            match oracle::scan_annotation(&o, &key, &lineage) {
                Ok(want) => {
                    assert_eq!(got.unwrap().map(|a| &a.id), want.map(|a| &a.id));
                    hits += usize::from(want.is_some());
                }
                Err(ids) => {
                    let e = got.unwrap_err();
                    assert!(ids.len() >= 2, "{e}");
                    ambiguous += 1;
                }
            }
        }
    }
    assert!(hits > 300 && ambiguous > 50, "{hits} hits, {ambiguous} ambiguous");
}
