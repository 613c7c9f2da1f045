//! Diagram JSON: sorted keys, integers and strings only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{
    Block, BoxContent, BoxId, DiagramError, ElementValue, PortType, Source, Target,
    WiringDiagram,
};
use crate::concrete::CallSite;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed diagram JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid diagram document: {0}")]
    Schema(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeRefDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    unlabeled: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndpointDoc {
    kind: String,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    box_id: Option<u32>,
    port: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDoc {
    src: EndpointDoc,
    tgt: EndpointDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    endpoint: EndpointDoc,
    object_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_repr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    concrete_type: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    call: Option<CallSite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<DiagramDoc>>,
    inputs: Vec<TypeRefDoc>,
    outputs: Vec<TypeRefDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramDoc {
    inputs: Vec<TypeRefDoc>,
    outputs: Vec<TypeRefDoc>,
    boxes: BTreeMap<String, BoxDoc>,
    wires: Vec<WireDoc>,
    #[serde(default)]
    elements: Vec<ElementDoc>,
}

fn type_doc(t: &PortType) -> TypeRefDoc {
    match t {
        PortType::Labeled(s) => TypeRefDoc {
            label: Some(s.clone()),
            unlabeled: false,
        },
        PortType::Unlabeled => TypeRefDoc {
            label: None,
            unlabeled: true,
        },
    }
}

fn types_doc(ts: &[PortType]) -> Vec<TypeRefDoc> {
    ts.iter().map(type_doc).collect()
}

fn source_doc(s: Source) -> EndpointDoc {
    match s {
        Source::OuterIn(k) => EndpointDoc {
            kind: "outer_in".into(),
            box_id: None,
            port: k,
        },
        Source::BoxOut(b, j) => EndpointDoc {
            kind: "box_out".into(),
            box_id: Some(b.0),
            port: j,
        },
    }
}

fn target_doc(t: Target) -> EndpointDoc {
    match t {
        Target::OuterOut(k) => EndpointDoc {
            kind: "outer_out".into(),
            box_id: None,
            port: k,
        },
        Target::BoxIn(b, i) => EndpointDoc {
            kind: "box_in".into(),
            box_id: Some(b.0),
            port: i,
        },
    }
}

fn to_doc(d: &WiringDiagram) -> DiagramDoc {
    let boxes = d
        .boxes
        .iter()
        .map(|(id, b)| {
            let doc = match &b.content {
                BoxContent::Atomic { label, name, call } => BoxDoc {
                    kind: "atomic".into(),
                    name: (name != label.as_deref().unwrap_or("")).then(|| name.clone()),
                    label: label.clone(),
                    call: call.clone(),
                    inner: None,
                    inputs: types_doc(&b.inputs),
                    outputs: types_doc(&b.outputs),
                },
                BoxContent::Nested { name, inner } => BoxDoc {
                    kind: "nested".into(),
                    label: None,
                    name: Some(name.clone()),
                    call: None,
                    inner: Some(Box::new(to_doc(inner))),
                    inputs: types_doc(&b.inputs),
                    outputs: types_doc(&b.outputs),
                },
            };
            (id.0.to_string(), doc)
        })
        .collect();
    DiagramDoc {
        inputs: types_doc(&d.inputs),
        outputs: types_doc(&d.outputs),
        boxes,
        wires: d
            .wires
            .iter()
            .map(|w| WireDoc {
                src: source_doc(w.src),
                tgt: target_doc(w.tgt),
            })
            .collect(),
        elements: d
            .elements
            .iter()
            .map(|(s, e)| ElementDoc {
                endpoint: source_doc(*s),
                object_id: e.object_id.clone(),
                value_repr: e.value_repr.clone(),
                concrete_type: e.concrete_type_name.clone(),
            })
            .collect(),
    }
}

fn schema(msg: impl Into<String>) -> JsonError {
    JsonError::Schema(msg.into())
}

fn port_type(doc: TypeRefDoc) -> Result<PortType, JsonError> {
    match (doc.label, doc.unlabeled) {
        (Some(l), false) => Ok(PortType::Labeled(l)),
        (None, true) => Ok(PortType::Unlabeled),
        _ => Err(schema("type ref needs exactly one of \"label\" or \"unlabeled\": true")),
    }
}

fn port_types(docs: Vec<TypeRefDoc>) -> Result<Vec<PortType>, JsonError> {
    docs.into_iter().map(port_type).collect()
}

fn need_box(e: &EndpointDoc) -> Result<BoxId, JsonError> {
    e.box_id
        .map(BoxId)
        .ok_or_else(|| schema(format!("endpoint of kind {} needs a box", e.kind)))
}

fn source(e: &EndpointDoc) -> Result<Source, JsonError> {
    match e.kind.as_str() {
        "outer_in" => Ok(Source::OuterIn(e.port)),
        "box_out" => Ok(Source::BoxOut(need_box(e)?, e.port)),
        k => Err(schema(format!("unknown source kind {k:?}"))),
    }
}

fn target(e: &EndpointDoc) -> Result<Target, JsonError> {
    match e.kind.as_str() {
        "outer_out" => Ok(Target::OuterOut(e.port)),
        "box_in" => Ok(Target::BoxIn(need_box(e)?, e.port)),
        k => Err(schema(format!("unknown target kind {k:?}"))),
    }
}

fn from_doc(doc: DiagramDoc) -> Result<WiringDiagram, JsonError> {
    let mut d = WiringDiagram::new(port_types(doc.inputs)?, port_types(doc.outputs)?);
    for (key, b) in doc.boxes {
        let id: u32 = key
            .parse()
            .map_err(|_| schema(format!("box id {key:?} is not a non-negative integer")))?;
        let inputs = port_types(b.inputs)?;
        let outputs = port_types(b.outputs)?;
        let content = match b.kind.as_str() {
            "atomic" => {
                if b.inner.is_some() {
                    return Err(schema(format!("atomic box {id} has an inner diagram")));
                }
                BoxContent::Atomic {
                    name: b.name.or_else(|| b.label.clone()).unwrap_or_default(),
                    label: b.label,
                    call: b.call,
                }
            }
            "nested" => {
                let inner = b
                    .inner
                    .ok_or_else(|| schema(format!("nested box {id} lacks \"inner\"")))?;
                if b.label.is_some() || b.call.is_some() {
                    return Err(schema(format!("nested box {id} cannot carry a label")));
                }
                BoxContent::Nested {
                    name: b.name.unwrap_or_default(),
                    inner: from_doc(*inner)?,
                }
            }
            k => return Err(schema(format!("unknown box kind {k:?}"))),
        };
        d.insert_box(
            BoxId(id),
            Block {
                content,
                inputs,
                outputs,
            },
        );
    }
    let listed = doc.wires.len();
    for w in doc.wires {
        d.add_wire(source(&w.src)?, target(&w.tgt)?);
    }
    if d.wires.len() != listed {
        return Err(schema("duplicate wires"));
    }
    for e in doc.elements {
        d.set_element(
            source(&e.endpoint)?,
            ElementValue {
                object_id: e.object_id,
                value_repr: e.value_repr,
                concrete_type_name: e.concrete_type,
            },
        );
    }
    d.validate_structure()?;
    Ok(d)
}

pub fn to_json_value(d: &WiringDiagram) -> Value {
    serde_json::to_value(to_doc(d)).expect("diagram documents always serialize")
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_json_string(d: &WiringDiagram) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(d)).expect("values serialize");
    s.push('\n');
    s
}

/// Parse and structurally check a diagram. Wire types are not checked here
/// since that needs a subtype order.
pub fn from_json_value(v: Value) -> Result<WiringDiagram, JsonError> {
    from_doc(serde_json::from_value(v)?)
}

pub fn from_json_str(s: &str) -> Result<WiringDiagram, JsonError> {
    from_doc(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::{CallKind, ResultSlot};

    fn sample() -> WiringDiagram {
        let x = PortType::labeled("x");
        let mut inner = WiringDiagram::from_block(Block::labeled("g", vec![x.clone()], vec![x.clone()]));
        inner.set_element(
            Source::OuterIn(0),
            ElementValue {
                object_id: None,
                value_repr: Some("3".into()),
                concrete_type_name: Some("int".into()),
            },
        );
        let mut d = WiringDiagram::new(vec![x.clone(), PortType::Unlabeled], vec![x.clone()]);
        let site = CallSite {
            language: "python".into(),
            package: "pkg".into(),
            name: "f".into(),
            kind: CallKind::Method,
            lineage: vec!["A".into(), "B".into()],
            args: vec![Some("self".into()), None],
            results: vec![vec![ResultSlot::Return(0), ResultSlot::Mutated("self".into())]],
        };
        let a = d.add_box(
            Block::atomic(None, "f", vec![x.clone(), PortType::Unlabeled], vec![x.clone()])
                .with_call(site),
        );
        let n = d.add_box(Block::nested("user", inner));
        d.add_wire(Source::OuterIn(0), Target::BoxIn(a, 0));
        d.add_wire(Source::OuterIn(1), Target::BoxIn(a, 1));
        d.add_wire(Source::BoxOut(a, 0), Target::BoxIn(n, 0));
        d.add_wire(Source::BoxOut(n, 0), Target::OuterOut(0));
        d.set_element(
            Source::BoxOut(a, 0),
            ElementValue {
                object_id: Some("0x1".into()),
                ..Default::default()
            },
        );
        d
    }

    #[test]
    fn round_trip_is_exact() {
        let d = sample();
        let s = to_json_string(&d);
        let back = from_json_str(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(to_json_string(&back), s);
    }

    #[test]
    fn keys_are_sorted() {
        let s = to_json_string(&sample());
        let top: Vec<&str> = s
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(top, ["boxes", "elements", "inputs", "outputs", "wires"]);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(from_json_str("{"), Err(JsonError::Syntax(_))));
        let bad = r#"{"inputs":[{"label":"x","unlabeled":true}],"outputs":[],"boxes":{},"wires":[]}"#;
        assert!(matches!(from_json_str(bad), Err(JsonError::Schema(_))));
        let unwired = r#"{"inputs":[],"outputs":[{"label":"x"}],"boxes":{},"wires":[]}"#;
        assert!(matches!(from_json_str(unwired), Err(JsonError::Diagram(_))));
    }
}
