use super::{Diagnostic, FunctionAnnotation, Ontology, Severity};
use crate::concrete::ResultSlot;
use crate::diagram::PortType;
use crate::ontology::{infer_type, ObType, Signature};

fn port_obtype(t: &PortType) -> Option<ObType> {
    t.label().and_then(|l| ObType::parse(l).ok())
}

/// Concrete type carried by input `i`: declared on the slot, or the owner
/// class for a `self` slot of a member annotation.
fn slot_concrete_type(a: &FunctionAnnotation, i: usize) -> Option<&str> {
    let s = &a.inputs[i];
    s.concrete_type.as_deref().or_else(|| {
        (a.kind.is_member() && s.slot.as_deref() == Some("self"))
            .then_some(a.owner_type.as_deref())
            .flatten()
    })
}

fn check_annotation(o: &Ontology, a: &FunctionAnnotation, out: &mut Vec<Diagnostic>) {
    let p = o.presentation();
    if let Err(e) = infer_type(&a.definition, p) {
        out.push(Diagnostic::new("ill-typed-definition", Severity::Error, &a.id, e.to_string()));
        return;
    }
    let d = o
        .definition_diagram(&a.id)
        .expect("well-typed definitions have diagrams");
    let mut arity_ok = true;
    if a.inputs.len() != d.inputs().len() {
        arity_ok = false;
        out.push(
            Diagnostic::new(
                "slot-arity",
                Severity::Error,
                &a.id,
                format!("{} input slots for a definition with {} inputs", a.inputs.len(), d.inputs().len()),
            )
            .at("inputs"),
        );
    }
    if a.outputs.len() != d.outputs().len() {
        arity_ok = false;
        out.push(
            Diagnostic::new(
                "slot-arity",
                Severity::Error,
                &a.id,
                format!("{} output slots for a definition with {} outputs", a.outputs.len(), d.outputs().len()),
            )
            .at("outputs"),
        );
    }
    for (i, s) in a.inputs.iter().enumerate() {
        if s.slot.is_none() && s.position.is_none() {
            out.push(
                Diagnostic::new("slot-descriptor", Severity::Error, &a.id, "input slot has neither a name nor a position")
                    .at(format!("input {i}")),
            );
        }
    }
    for (j, r) in a.outputs.iter().enumerate() {
        if let ResultSlot::Mutated(name) = r {
            if !a.inputs.iter().any(|s| s.slot.as_deref() == Some(name)) {
                out.push(
                    Diagnostic::new(
                        "slot-descriptor",
                        Severity::Error,
                        &a.id,
                        format!("output names unknown input slot {name:?}"),
                    )
                    .at(format!("output {j}")),
                );
            }
        }
    }
    if !arity_ok {
        return;
    }
    let mut functorial = |concrete: &str, port: &PortType, at: String| {
        let (Some(abs), Some(t)) = (o.abstract_type(&a.language, concrete), port_obtype(port)) else {
            return;
        };
        if !p.leq(abs, &t) {
            out.push(
                Diagnostic::new(
                    "functoriality",
                    Severity::Warning,
                    &a.id,
                    format!("{concrete} is annotated as {abs}, which is not a subtype of {t}"),
                )
                .at(at),
            );
        }
    };
    for (i, port) in d.inputs().iter().enumerate() {
        if let Some(c) = slot_concrete_type(a, i) {
            functorial(c, port, format!("input {i}"));
        }
    }
    for (j, port) in d.outputs().iter().enumerate() {
        if let ResultSlot::Mutated(name) = &a.outputs[j] {
            if let Some(i) = a.inputs.iter().position(|s| s.slot.as_deref() == Some(name)) {
                if let Some(c) = slot_concrete_type(a, i) {
                    functorial(c, port, format!("output {j}"));
                }
            }
        }
    }
}

/// Check every invariant of a loaded ontology. Subtype cycles are legal
/// and reported at info severity.
pub fn validate_ontology(o: &Ontology) -> Vec<Diagnostic> {
    let p = o.presentation();
    let mut out = Vec::new();
    for class in p.preorder().cycles() {
        let ids: Vec<&str> = class.iter().map(String::as_str).collect();
        out.push(Diagnostic::new(
            "subtype-cycle",
            Severity::Info,
            ids.join(","),
            "mutually convertible types",
        ));
    }
    for f in p.functions().values() {
        if let Some(def) = &f.definition {
            match infer_type(def, p) {
                Err(e) => out.push(Diagnostic::new("ill-typed-definition", Severity::Error, &f.id, e.to_string())),
                Ok((dom, cod)) => {
                    if !(p.leq(&f.dom, &dom) && p.leq(&cod, &f.cod)) {
                        out.push(Diagnostic::new(
                            "ill-typed-definition",
                            Severity::Error,
                            &f.id,
                            format!("definition has type {dom} -> {cod}, declared {} -> {}", f.dom, f.cod),
                        ));
                    }
                }
            }
        }
        for g in &f.subfunction_of {
            let gg = &p.functions()[g];
            if !(p.leq(&f.dom, &gg.dom) && p.leq(&f.cod, &gg.cod)) {
                out.push(Diagnostic::new(
                    "subfunction",
                    Severity::Error,
                    &f.id,
                    format!("{} -> {} does not convert into {g}: {} -> {}", f.dom, f.cod, gg.dom, gg.cod),
                ));
            }
        }
    }
    for e in p.equations() {
        match (infer_type(&e.lhs, p), infer_type(&e.rhs, p)) {
            (Ok(l), Ok(r)) if l == r => {}
            (Err(err), _) | (_, Err(err)) => {
                out.push(Diagnostic::new("ill-typed-definition", Severity::Error, &e.id, err.to_string()))
            }
            _ => out.push(Diagnostic::new(
                "ill-typed-definition",
                Severity::Error,
                &e.id,
                "equation sides have different types",
            )),
        }
    }
    for a in o.function_annotations().values() {
        check_annotation(o, a, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::load::link;
    use crate::annotation::{ontology_from_str, parse_entries, LoadError};

    const BASE: &str = r#"
      {"schema":"concept","kind":"type","id":"model"},
      {"schema":"concept","kind":"type","id":"data"},
      {"schema":"concept","kind":"type","id":"k-means","supertypes":["model"]},
      {"schema":"concept","kind":"function","id":"fit","dom":{"product":["model","data"]},"cod":"model"},
      {"schema":"annotation","kind":"type","language":"python","package":"sklearn","concrete_name":"sklearn.KMeans","definition":"k-means"},
      {"schema":"annotation","kind":"type","language":"python","package":"pandas","concrete_name":"pandas.DataFrame","definition":"data"}"#;

    fn doc(extra: &str) -> String {
        format!("[{BASE}{}{extra}]", if extra.is_empty() { "" } else { "," })
    }

    fn lenient(extra: &str) -> Vec<Diagnostic> {
        let o = link(parse_entries(&doc(extra), "t").unwrap()).unwrap();
        validate_ontology(&o)
    }

    #[test]
    fn valid_fixture_has_no_diagnostics() {
        assert_eq!(lenient(""), vec![]);
    }

    #[test]
    fn cycles_are_info() {
        let d = lenient(
            r#"{"schema":"concept","kind":"type","id":"a","supertypes":["b"]},
               {"schema":"concept","kind":"type","id":"b","supertypes":["a"]}"#,
        );
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].class, "subtype-cycle");
        assert_eq!(d[0].severity, Severity::Info);
    }

    #[test]
    fn ill_typed_definition_is_an_error() {
        let d = lenient(
            r#"{"schema":"concept","kind":"function","id":"twice","dom":"model","cod":"model",
                "definition":{"compose":["fit","fit"]}}"#,
        );
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].class.as_str(), d[0].severity), ("ill-typed-definition", Severity::Error));
    }

    #[test]
    fn slot_count_mismatch_fails_strict_load() {
        let bad = doc(
            r#"{"schema":"annotation","kind":"function","language":"python","package":"p","function":"f",
                "call_kind":"function","inputs":[{"slot":"a"}],"outputs":[{"return":0}],"definition":"fit"}"#,
        );
        assert!(matches!(
            ontology_from_str(&bad, "t"),
            Err(LoadError::FunctorialityViolation { slot, .. }) if slot == "inputs"
        ));
    }

    #[test]
    fn incompatible_slot_type_is_a_functoriality_warning() {
        let d = lenient(
            r#"{"schema":"annotation","kind":"function","language":"python","package":"p","function":"f",
                "call_kind":"function","inputs":[{"slot":"m","concrete_type":"pandas.DataFrame"},{"slot":"x"}],
                "outputs":[{"return":0}],"definition":"fit"}"#,
        );
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].class.as_str(), d[0].severity), ("functoriality", Severity::Warning));
        assert_eq!(d[0].location.as_deref(), Some("input 0"));
    }

    #[test]
    fn owner_type_checks_self_slot() {
        let ok = lenient(
            r#"{"schema":"annotation","kind":"function","language":"python","package":"sklearn","function":"fit",
                "call_kind":"method","owner_type":"sklearn.KMeans","inputs":[{"slot":"self"},{"slot":"X"}],
                "outputs":[{"slot":"self"}],"definition":"fit"}"#,
        );
        assert_eq!(ok, vec![]);
        let bad = lenient(
            r#"{"schema":"annotation","kind":"function","language":"python","package":"pandas","function":"fit",
                "call_kind":"method","owner_type":"pandas.DataFrame","inputs":[{"slot":"self"},{"slot":"X"}],
                "outputs":[{"slot":"self"}],"definition":"fit"}"#,
        );
        assert_eq!(bad.len(), 2);
    }
}
