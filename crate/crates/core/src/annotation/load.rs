//! On-disk JSON documents for concepts and annotations.
//!
//! A file holds one document object or an array of them. Each document has
//! a `"schema"` of `"concept"` or `"annotation"` and a `"kind"`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{
    validate_ontology, Diagnostic, FunctionAnnotation, InputSlot, LoadError, Ontology, Severity,
    TypeAnnotation,
};
use crate::concrete::{CallKind, ResultSlot};
use crate::ontology::{Equation, FunctionConcept, MorTerm, ObType, Presentation, TypeConcept};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeConceptDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    supertypes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionConceptDoc {
    id: String,
    dom: ObType,
    cod: ObType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    subfunction_of: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    definition: Option<MorTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationDoc {
    id: String,
    lhs: MorTerm,
    rhs: MorTerm,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeAnnotationDoc {
    #[serde(default)]
    id: Option<String>,
    language: String,
    package: String,
    concrete_name: String,
    definition: ObType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSlotDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    concrete_type: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionAnnotationDoc {
    #[serde(default)]
    id: Option<String>,
    language: String,
    package: String,
    function: String,
    call_kind: CallKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner_type: Option<String>,
    inputs: Vec<InputSlotDoc>,
    outputs: Vec<ResultSlot>,
    definition: MorTerm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

/// One parsed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    TypeConcept(TypeConcept),
    FunctionConcept(FunctionConcept),
    Equation(Equation),
    TypeAnnotation(TypeAnnotation),
    FunctionAnnotation(FunctionAnnotation),
}

fn valid_concept_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

fn parse_entry(mut m: Map<String, Value>) -> Result<Entry, String> {
    let mut take = |k: &str| match m.remove(k) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(format!("\"{k}\" must be a string")),
        None => Err(format!("missing \"{k}\"")),
    };
    let schema = take("schema")?;
    let kind = take("kind")?;
    let body = Value::Object(m);
    let de = |e: serde_json::Error| e.to_string();
    let entry = match (schema.as_str(), kind.as_str()) {
        ("concept", "type") => {
            let d: TypeConceptDoc = serde_json::from_value(body).map_err(de)?;
            Entry::TypeConcept(TypeConcept {
                id: d.id,
                supertypes: d.supertypes,
                description: d.description,
            })
        }
        ("concept", "function") => {
            let d: FunctionConceptDoc = serde_json::from_value(body).map_err(de)?;
            Entry::FunctionConcept(FunctionConcept {
                id: d.id,
                dom: d.dom,
                cod: d.cod,
                subfunction_of: d.subfunction_of,
                definition: d.definition,
                description: d.description,
            })
        }
        ("concept", "equation") => {
            let d: EquationDoc = serde_json::from_value(body).map_err(de)?;
            Entry::Equation(Equation {
                id: d.id,
                lhs: d.lhs,
                rhs: d.rhs,
            })
        }
        ("annotation", "type") => {
            let d: TypeAnnotationDoc = serde_json::from_value(body).map_err(de)?;
            Entry::TypeAnnotation(TypeAnnotation {
                id: d
                    .id
                    .unwrap_or_else(|| format!("{}:{}", d.language, d.concrete_name)),
                language: d.language,
                package: d.package,
                concrete_name: d.concrete_name,
                definition: d.definition,
                description: d.description,
            })
        }
        ("annotation", "function") => {
            let d: FunctionAnnotationDoc = serde_json::from_value(body).map_err(de)?;
            let id = d.id.unwrap_or_else(|| match &d.owner_type {
                Some(owner) => format!("{}:{owner}.{}", d.language, d.function),
                None => format!("{}:{}.{}", d.language, d.package, d.function),
            });
            Entry::FunctionAnnotation(FunctionAnnotation {
                id,
                language: d.language,
                package: d.package,
                function: d.function,
                kind: d.call_kind,
                owner_type: d.owner_type,
                inputs: d
                    .inputs
                    .into_iter()
                    .map(|s| InputSlot {
                        slot: s.slot,
                        position: s.position,
                        concrete_type: s.concrete_type,
                    })
                    .collect(),
                outputs: d.outputs,
                definition: d.definition,
                description: d.description,
            })
        }
        (s, k) => return Err(format!("unknown document kind {s:?}/{k:?}")),
    };
    let concept_id = match &entry {
        Entry::TypeConcept(t) => Some(&t.id),
        Entry::FunctionConcept(f) => Some(&f.id),
        Entry::Equation(e) => Some(&e.id),
        _ => None,
    };
    if let Some(id) = concept_id.filter(|id| !valid_concept_id(id)) {
        return Err(format!("concept id {id:?} must match [a-z0-9-]+"));
    }
    Ok(entry)
}

/// Parse the text of one file.
pub fn parse_entries(text: &str, file: &str) -> Result<Vec<Entry>, LoadError> {
    let v: Value = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        file: file.to_string(),
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let docs = match v {
        Value::Array(items) => items,
        v @ Value::Object(_) => vec![v],
        _ => {
            return Err(LoadError::Parse {
                file: file.to_string(),
                location: "top level".into(),
                message: "expected an object or an array of objects".into(),
            })
        }
    };
    docs.into_iter()
        .enumerate()
        .map(|(i, d)| {
            let fail = |message: String| LoadError::Parse {
                file: file.to_string(),
                location: format!("entry {i}"),
                message,
            };
            match d {
                Value::Object(m) => parse_entry(m).map_err(fail),
                _ => Err(fail("expected an object".into())),
            }
        })
        .collect()
}

fn json_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<(), LoadError> {
    let io = |source| LoadError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.is_dir() {
        let mut children: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        children.sort();
        for c in children {
            if c.is_dir() || c.extension().is_some_and(|x| x == "json") {
                json_files(&c, out)?;
            }
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

fn read_entries(paths: &[PathBuf]) -> Result<Vec<Entry>, LoadError> {
    let mut files = Vec::new();
    for p in paths {
        json_files(p, &mut files)?;
    }
    let mut entries = Vec::new();
    for f in files {
        let text = fs::read_to_string(&f).map_err(|source| LoadError::Io {
            path: f.display().to_string(),
            source,
        })?;
        entries.extend(parse_entries(&text, &f.display().to_string())?);
    }
    Ok(entries)
}

pub(crate) fn link(entries: Vec<Entry>) -> Result<Ontology, LoadError> {
    let (mut tc, mut fc, mut eq, mut ta, mut fa) = (vec![], vec![], vec![], vec![], vec![]);
    for e in entries {
        match e {
            Entry::TypeConcept(x) => tc.push(x),
            Entry::FunctionConcept(x) => fc.push(x),
            Entry::Equation(x) => eq.push(x),
            Entry::TypeAnnotation(x) => ta.push(x),
            Entry::FunctionAnnotation(x) => fa.push(x),
        }
    }
    Ontology::link(Presentation::new(tc, fc, eq)?, ta, fa)
}

/// Load and link, returning validation diagnostics instead of failing on
/// them. Only unreadable, malformed or dangling input is an error.
pub fn load_lenient<P: AsRef<Path>>(paths: &[P]) -> Result<(Ontology, Vec<Diagnostic>), LoadError> {
    let paths: Vec<PathBuf> = paths.iter().map(|p| p.as_ref().to_path_buf()).collect();
    let o = link(read_entries(&paths)?)?;
    let diags = validate_ontology(&o);
    Ok((o, diags))
}

fn strict(o: Ontology, diags: Vec<Diagnostic>) -> Result<Ontology, LoadError> {
    match diags.into_iter().find(|d| d.severity > Severity::Info) {
        None => Ok(o),
        Some(d) => Err(match d.class.as_str() {
            "slot-arity" | "functoriality" => LoadError::FunctorialityViolation {
                annotation: d.subject,
                slot: d.location.unwrap_or_default(),
            },
            "ill-typed-definition" => LoadError::IllTyped(d.subject, d.message),
            _ => LoadError::Invalid(format!("{}: {}", d.subject, d.message)),
        }),
    }
}

/// Load, link and validate. Any diagnostic above info severity fails.
pub fn load_ontology<P: AsRef<Path>>(paths: &[P]) -> Result<Ontology, LoadError> {
    let (o, diags) = load_lenient(paths)?;
    strict(o, diags)
}

/// [`load_ontology`] on in-memory text.
pub fn ontology_from_str(text: &str, name: &str) -> Result<Ontology, LoadError> {
    let o = link(parse_entries(text, name)?)?;
    let diags = validate_ontology(&o);
    strict(o, diags)
}

fn tagged<T: Serialize>(schema: &str, kind: &str, doc: T) -> Value {
    let mut v = serde_json::to_value(doc).expect("documents serialize");
    let m = v.as_object_mut().expect("documents are objects");
    m.insert("schema".into(), schema.into());
    m.insert("kind".into(), kind.into());
    v
}

/// All documents as one array: type concepts, function concepts,
/// equations, type annotations, then function annotations.
pub fn ontology_to_json(o: &Ontology) -> Value {
    let p = o.presentation();
    let mut out = Vec::new();
    for t in p.types().values() {
        out.push(tagged(
            "concept",
            "type",
            TypeConceptDoc {
                id: t.id.clone(),
                supertypes: t.supertypes.clone(),
                description: t.description.clone(),
            },
        ));
    }
    for f in p.functions().values() {
        out.push(tagged(
            "concept",
            "function",
            FunctionConceptDoc {
                id: f.id.clone(),
                dom: f.dom.clone(),
                cod: f.cod.clone(),
                subfunction_of: f.subfunction_of.clone(),
                definition: f.definition.clone(),
                description: f.description.clone(),
            },
        ));
    }
    for e in p.equations() {
        out.push(tagged(
            "concept",
            "equation",
            EquationDoc {
                id: e.id.clone(),
                lhs: e.lhs.clone(),
                rhs: e.rhs.clone(),
            },
        ));
    }
    for t in o.type_annotations().values() {
        out.push(tagged(
            "annotation",
            "type",
            TypeAnnotationDoc {
                id: Some(t.id.clone()),
                language: t.language.clone(),
                package: t.package.clone(),
                concrete_name: t.concrete_name.clone(),
                definition: t.definition.clone(),
                description: t.description.clone(),
            },
        ));
    }
    for f in o.function_annotations().values() {
        out.push(tagged(
            "annotation",
            "function",
            FunctionAnnotationDoc {
                id: Some(f.id.clone()),
                language: f.language.clone(),
                package: f.package.clone(),
                function: f.function.clone(),
                call_kind: f.kind,
                owner_type: f.owner_type.clone(),
                inputs: f
                    .inputs
                    .iter()
                    .map(|s| InputSlotDoc {
                        slot: s.slot.clone(),
                        position: s.position,
                        concrete_type: s.concrete_type.clone(),
                    })
                    .collect(),
                outputs: f.outputs.clone(),
                definition: f.definition.clone(),
                description: f.description.clone(),
            },
        ));
    }
    Value::Array(out)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn ontology_to_string(o: &Ontology) -> String {
    let mut s = serde_json::to_string_pretty(&ontology_to_json(o)).expect("values serialize");
    s.push('\n');
    s
}
