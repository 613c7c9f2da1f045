//! Semantic enrichment: expand annotated boxes and ports into their
//! abstract definitions, then contract what is left unannotated.

mod contract;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::annotation::{FunctionAnnotation, Ontology, ResolveError};
use crate::concrete::split_qualified_type;
use crate::diagram::{
    compose, flatten, substitute, topological_order, AnyOrder, BoxContent, BoxId, DiagramError, PortType,
    Source, Target, WiringDiagram,
};
use crate::ontology::ObType;

pub use contract::contract;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnrichError {
    #[error("annotation {annotation:?} does not fit box {box_name:?}: {detail}")]
    SlotMismatch {
        annotation: String,
        box_name: String,
        detail: String,
    },
    #[error("type conflict at {port}: {found} is not a subtype of {expected}")]
    TypeConflict {
        port: String,
        found: String,
        expected: String,
    },
    #[error(transparent)]
    Ambiguous(#[from] ResolveError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// What to do with a box whose annotation cannot be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    /// Leave the box unannotated and record why in the report.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedExpansion {
    pub box_name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnrichmentReport {
    /// Atomic boxes replaced by an annotation's definition.
    pub expanded_boxes: usize,
    /// Atomic boxes with no applicable annotation.
    pub unannotated_boxes: usize,
    /// Boxes already labeled by a function concept, kept as they are.
    pub abstract_boxes: usize,
    /// Blank boxes in the result.
    pub contracted_groups: usize,
    pub type_hits: usize,
    pub type_misses: usize,
    pub skipped: Vec<SkippedExpansion>,
    /// Display names of the concrete boxes absorbed by each blank box.
    /// Informational only; not part of the diagram.
    pub provenance: Vec<Vec<String>>,
}

fn abstract_label(o: &Ontology, label: &str) -> bool {
    match ObType::parse(label) {
        Ok(t) => t.basics().iter().all(|b| o.presentation().types().contains_key(*b)),
        Err(_) => false,
    }
}

/// Abstract port type for a concrete one; unlabeled for types with no
/// annotation.
fn retype(o: &Ontology, t: &PortType, report: &mut EnrichmentReport) -> PortType {
    let Some(label) = t.label() else {
        return PortType::Unlabeled;
    };
    if let Some((lang, concrete)) = split_qualified_type(label) {
        return match o.abstract_type(lang, concrete) {
            Some(a) => {
                report.type_hits += 1;
                PortType::Labeled(a.to_string())
            }
            None => {
                report.type_misses += 1;
                PortType::Unlabeled
            }
        };
    }
    if abstract_label(o, label) {
        PortType::Labeled(label.to_string())
    } else {
        report.type_misses += 1;
        PortType::Unlabeled
    }
}

fn retype_all(d: &WiringDiagram, o: &Ontology, report: &mut EnrichmentReport) -> WiringDiagram {
    let mut out = d.clone();
    for k in 0..d.inputs().len() {
        out.set_input_type(k, retype(o, &d.inputs()[k], report));
    }
    for k in 0..d.outputs().len() {
        out.set_output_type(k, retype(o, &d.outputs()[k], report));
    }
    for (id, b) in d.boxes() {
        let inputs = b.inputs.iter().map(|t| retype(o, t, report)).collect();
        let outputs = b.outputs.iter().map(|t| retype(o, t, report)).collect();
        let nb = out.block_mut(*id).expect("same ids");
        nb.inputs = inputs;
        nb.outputs = outputs;
    }
    out
}

/// How a box's ports line up with an annotation's definition.
struct Alignment {
    /// Box input feeding each definition input.
    inputs: Vec<usize>,
    /// Definition output feeding each box output.
    outputs: Vec<usize>,
}

fn align(a: &FunctionAnnotation, def: &WiringDiagram, d: &WiringDiagram, id: BoxId) -> Result<Alignment, String> {
    let b = &d.boxes()[&id];
    let site = b.call().expect("only boxes with call sites are resolved");
    if a.inputs.len() != def.inputs().len() || a.outputs.len() != def.outputs().len() {
        return Err("slot count differs from the definition's arity".into());
    }
    let mut inputs = Vec::new();
    for s in &a.inputs {
        let by_name = s
            .slot
            .as_ref()
            .and_then(|n| site.args.iter().position(|x| x.as_deref() == Some(n.as_str())));
        let by_pos = s.position.filter(|p| *p < b.inputs.len());
        if let (Some(n), Some(p)) = (by_name, s.position) {
            if n != p {
                return Err(format!(
                    "slot {} is argument {n} by name but position {p}",
                    s.slot.as_deref().unwrap_or_default()
                ));
            }
        }
        match by_name.or(by_pos) {
            Some(p) => inputs.push(p),
            None => {
                return Err(format!(
                    "no argument for input slot {}",
                    s.slot.clone().unwrap_or_else(|| format!("#{}", s.position.unwrap_or(0)))
                ))
            }
        }
    }
    if let Some(r) = a.outputs.iter().find(|r| !site.results.iter().any(|rs| rs.contains(r))) {
        return Err(format!("call has no result {r:?}"));
    }
    let outputs = (0..b.outputs.len())
        .map(|p| {
            let aliases = site.results.get(p).map(Vec::as_slice).unwrap_or_default();
            a.outputs
                .iter()
                .position(|r| aliases.contains(r))
                .ok_or_else(|| format!("output {p} is not covered by the annotation"))
        })
        .collect::<Result<_, _>>()?;
    Ok(Alignment { inputs, outputs })
}

/// The replacement for box `id`: its arguments routed into the definition
/// and the definition's results routed to its outputs.
fn replacement(d: &WiringDiagram, id: BoxId, def: &WiringDiagram, al: &Alignment) -> Result<WiringDiagram, DiagramError> {
    let b = &d.boxes()[&id];
    let mut pick = WiringDiagram::new(b.inputs.clone(), def.inputs().to_vec());
    for (i, p) in al.inputs.iter().enumerate() {
        pick.add_wire(Source::OuterIn(*p), Target::OuterOut(i));
    }
    let mut route = WiringDiagram::new(def.outputs().to_vec(), al.outputs.iter().map(|j| def.outputs()[*j].clone()).collect());
    for (p, j) in al.outputs.iter().enumerate() {
        route.add_wire(Source::OuterIn(*j), Target::OuterOut(p));
    }
    let r = compose(&pick, def, &AnyOrder)?;
    compose(&r, &route, &AnyOrder)
}

/// Every port a definition input reaches, checked against the type of the
/// wire actually feeding the box.
fn check_types(o: &Ontology, d: &WiringDiagram, id: BoxId, def: &WiringDiagram, al: &Alignment) -> Result<(), EnrichError> {
    let b = &d.boxes()[&id];
    for (i, p) in al.inputs.iter().enumerate() {
        let feed = d.source_of(Target::BoxIn(id, *p)).ok_or(DiagramError::Invalid(format!(
            "input {p} of {} is not wired",
            b.name()
        )))?;
        let Some(found) = d.source_type(feed).and_then(PortType::label) else {
            continue;
        };
        for t in def.targets_of(Source::OuterIn(i)) {
            let Some(expected) = def.target_type(t).and_then(PortType::label) else {
                continue;
            };
            let ok = match (ObType::parse(found), ObType::parse(expected)) {
                (Ok(x), Ok(y)) => o.presentation().preorder().leq(&x, &y),
                _ => found == expected,
            };
            if !ok {
                return Err(EnrichError::TypeConflict {
                    port: format!("{} input {p}", b.name()),
                    found: found.to_string(),
                    expected: expected.to_string(),
                });
            }
        }
    }
    Ok(())
}

enum Fate {
    Expand(BoxId, WiringDiagram),
    Unannotated,
    Abstract,
}

fn fate(o: &Ontology, d: &WiringDiagram, id: BoxId) -> Result<Fate, EnrichError> {
    let b = &d.boxes()[&id];
    let BoxContent::Atomic { label, call, .. } = &b.content else {
        return Ok(Fate::Unannotated);
    };
    let Some(site) = call else {
        return Ok(match label {
            Some(l) if o.presentation().function(l).is_some() || l.starts_with("curry:") || l.starts_with("uncurry:") => {
                Fate::Abstract
            }
            _ => Fate::Unannotated,
        });
    };
    let Some(a) = o.resolve_annotation(&site.key(), &site.lineage)? else {
        return Ok(Fate::Unannotated);
    };
    let mismatch = |detail: String| EnrichError::SlotMismatch {
        annotation: a.id.clone(),
        box_name: b.name().to_string(),
        detail,
    };
    let def = o
        .definition_diagram(&a.id)
        .ok_or_else(|| mismatch("definition does not typecheck".into()))?;
    let al = align(a, def, d, id).map_err(mismatch)?;
    check_types(o, d, id, def, &al)?;
    Ok(Fate::Expand(id, replacement(d, id, def, &al)?))
}

fn expand_counted(
    raw: &WiringDiagram,
    o: &Ontology,
    mode: Strictness,
    report: &mut EnrichmentReport,
) -> Result<WiringDiagram, EnrichError> {
    let flat = flatten(raw);
    let mut d = retype_all(&flat, o, report);
    for id in topological_order(&d)? {
        let outcome = match fate(o, &d, id) {
            Err(e @ (EnrichError::SlotMismatch { .. } | EnrichError::TypeConflict { .. } | EnrichError::Ambiguous(_)))
                if mode == Strictness::Lenient =>
            {
                report.skipped.push(SkippedExpansion {
                    box_name: d.boxes()[&id].name().to_string(),
                    reason: e.to_string(),
                });
                Fate::Unannotated
            }
            other => other?,
        };
        match outcome {
            Fate::Expand(id, r) => {
                d = substitute(&d, id, &r, &AnyOrder)?;
                report.expanded_boxes += 1;
            }
            Fate::Abstract => report.abstract_boxes += 1,
            Fate::Unannotated => {
                report.unannotated_boxes += 1;
                if let Some(BoxContent::Atomic { label, .. }) = d.block_mut(id).map(|b| &mut b.content) {
                    *label = None;
                }
            }
        }
    }
    for k in 0..d.outputs().len() {
        let src = d.source_of(Target::OuterOut(k)).expect("outputs are wired");
        let t = d.source_type(src).cloned().unwrap_or(PortType::Unlabeled);
        d.set_output_type(k, t);
    }
    Ok(d)
}

/// Replace every annotated box by its definition and every annotated
/// concrete type by its abstract type. Unannotated boxes keep their display
/// name but lose their label; unannotated types become unlabeled.
pub fn expand(raw: &WiringDiagram, o: &Ontology) -> Result<WiringDiagram, EnrichError> {
    expand_counted(raw, o, Strictness::Strict, &mut EnrichmentReport::default())
}

pub fn enrich(raw: &WiringDiagram, o: &Ontology) -> Result<(WiringDiagram, EnrichmentReport), EnrichError> {
    enrich_with(raw, o, Strictness::Strict)
}

/// [`expand`] followed by [`contract`], with counts of what happened.
pub fn enrich_with(
    raw: &WiringDiagram,
    o: &Ontology,
    mode: Strictness,
) -> Result<(WiringDiagram, EnrichmentReport), EnrichError> {
    let mut report = EnrichmentReport::default();
    let expanded = expand_counted(raw, o, mode, &mut report)?;
    let (d, absorbed, _) = contract::contract_tracked(&expanded);
    report.contracted_groups = d.boxes().values().filter(|b| b.is_blank()).count();
    let mut by_box: BTreeMap<BoxId, Vec<String>> = absorbed;
    report.provenance = d
        .boxes()
        .iter()
        .filter(|(_, b)| b.is_blank())
        .map(|(id, _)| by_box.remove(id).unwrap_or_default())
        .collect();
    Ok((d, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::ontology_from_str;
    use crate::concrete::{CallKind, CallSite, ResultSlot};
    use crate::diagram::Block;

    const DOC: &str = r#"[
      {"schema":"concept","kind":"type","id":"a"},
      {"schema":"concept","kind":"type","id":"b"},
      {"schema":"concept","kind":"function","id":"p","dom":{"product":["a","b"]},"cod":{"product":["b","a"]}},
      {"schema":"annotation","kind":"type","language":"python","package":"m","concrete_name":"A","definition":"a"},
      {"schema":"annotation","kind":"type","language":"python","package":"m","concrete_name":"B","definition":"b"},
      {"schema":"annotation","kind":"function","language":"python","package":"m","function":"swap","call_kind":"function",
       "inputs":[{"position":1},{"slot":"x"}],"outputs":[{"return":1},{"slot":"x"}],"definition":"p"}
    ]"#;

    fn swap_box(results: Vec<Vec<ResultSlot>>) -> WiringDiagram {
        let q = |t: &str| PortType::labeled(format!("python:{t}"));
        let n_out = results.len();
        let site = CallSite {
            language: "python".into(),
            package: "m".into(),
            name: "swap".into(),
            kind: CallKind::Function,
            lineage: vec![],
            args: vec![Some("x".into()), Some("y".into())],
            results,
        };
        let outs = [q("A"), q("B"), q("A")][..n_out].to_vec();
        let mut d = WiringDiagram::new(vec![q("B"), q("A")], outs.clone());
        let id = d.add_box(Block::atomic(Some("python:m:swap".into()), "swap", vec![q("B"), q("A")], outs).with_call(site));
        for i in 0..2 {
            d.add_wire(Source::OuterIn(i), Target::BoxIn(id, i));
        }
        for j in 0..n_out {
            d.add_wire(Source::BoxOut(id, j), Target::OuterOut(j));
        }
        d
    }

    #[test]
    fn slots_bind_by_name_and_position() {
        let o = ontology_from_str(DOC, "t").unwrap();
        // out 0 is the return value at index 1 (def output 0), out 1 is x
        // after the call (def output 1)
        let d = swap_box(vec![vec![ResultSlot::Return(1)], vec![ResultSlot::Mutated("x".into())]]);
        let e = expand(&d, &o).unwrap();
        let (id, b) = e.boxes().iter().next().unwrap();
        assert_eq!(b.label(), Some("p"));
        // definition input 0 reads argument position 1, input 1 reads x
        assert_eq!(e.source_of(Target::BoxIn(*id, 0)), Some(Source::OuterIn(1)));
        assert_eq!(e.source_of(Target::BoxIn(*id, 1)), Some(Source::OuterIn(0)));
        assert_eq!(e.source_of(Target::OuterOut(0)), Some(Source::BoxOut(*id, 0)));
        assert_eq!(e.source_of(Target::OuterOut(1)), Some(Source::BoxOut(*id, 1)));
        assert_eq!(e.inputs(), &[PortType::labeled("b"), PortType::labeled("a")]);
        assert_eq!(e.outputs(), &[PortType::labeled("b"), PortType::labeled("a")]);
    }

    #[test]
    fn one_result_may_feed_several_outputs() {
        let o = ontology_from_str(DOC, "t").unwrap();
        let both = vec![ResultSlot::Return(1), ResultSlot::Mutated("x".into())];
        let d = swap_box(vec![both.clone(), vec![ResultSlot::Mutated("x".into())], both]);
        let e = expand(&d, &o).unwrap();
        let id = *e.boxes().keys().next().unwrap();
        assert_eq!(e.source_of(Target::OuterOut(0)), Some(Source::BoxOut(id, 0)));
        assert_eq!(e.source_of(Target::OuterOut(2)), Some(Source::BoxOut(id, 0)));
    }

    #[test]
    fn uncovered_output_is_a_slot_mismatch() {
        let o = ontology_from_str(DOC, "t").unwrap();
        let d = swap_box(vec![vec![ResultSlot::Return(1)], vec![ResultSlot::Return(0)]]);
        match expand(&d, &o) {
            Err(EnrichError::SlotMismatch { detail, .. }) => assert!(detail.contains("no result"), "{detail}"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn name_and_position_must_agree() {
        let doc = DOC.replace(r#"{"position":1},{"slot":"x"}"#, r#"{"position":1},{"slot":"x","position":1}"#);
        let o = ontology_from_str(&doc, "t").unwrap();
        let d = swap_box(vec![vec![ResultSlot::Return(1)], vec![ResultSlot::Mutated("x".into())]]);
        match expand(&d, &o) {
            Err(EnrichError::SlotMismatch { detail, .. }) => assert!(detail.contains("by name but position"), "{detail}"),
            r => panic!("{r:?}"),
        }
        let agree = DOC.replace(r#"{"position":1},{"slot":"x"}"#, r#"{"position":1},{"slot":"x","position":0}"#);
        assert!(expand(&d, &ontology_from_str(&agree, "t").unwrap()).is_ok());
    }

    #[test]
    fn retype_counts_hits_and_misses() {
        let o = ontology_from_str(DOC, "t").unwrap();
        let mut r = EnrichmentReport::default();
        assert_eq!(retype(&o, &PortType::labeled("python:A"), &mut r), PortType::labeled("a"));
        assert_eq!(retype(&o, &PortType::labeled("python:Z"), &mut r), PortType::Unlabeled);
        assert_eq!(retype(&o, &PortType::labeled("b"), &mut r), PortType::labeled("b"));
        assert_eq!(retype(&o, &PortType::labeled("zzz"), &mut r), PortType::Unlabeled);
        assert_eq!(retype(&o, &PortType::Unlabeled, &mut r), PortType::Unlabeled);
        assert_eq!((r.type_hits, r.type_misses), (1, 2));
    }

    #[test]
    fn concept_labeled_boxes_are_kept() {
        let o = ontology_from_str(DOC, "t").unwrap();
        let t = |s: &str| PortType::labeled(s);
        let mut d = WiringDiagram::new(vec![t("a"), t("b")], vec![t("b"), t("a")]);
        let id = d.add_box(Block::labeled("p", vec![t("a"), t("b")], vec![t("b"), t("a")]));
        for i in 0..2 {
            d.add_wire(Source::OuterIn(i), Target::BoxIn(id, i));
            d.add_wire(Source::BoxOut(id, i), Target::OuterOut(i));
        }
        let (e, report) = enrich(&d, &o).unwrap();
        assert_eq!(e, d);
        assert_eq!((report.abstract_boxes, report.expanded_boxes, report.unannotated_boxes), (1, 0, 0));
    }
}
