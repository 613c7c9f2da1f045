//! Concepts and annotations: the ontology presentation together with the
//! maps from concrete code (types, functions, methods) into it.

mod load;
mod validate;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::concrete::{CallKind, ConcreteCallKey, ResultSlot};
use crate::diagram::WiringDiagram;
use crate::ontology::{MorTerm, ObType, Presentation, PresentationError, SubtypePreorder};

pub use load::{
    load_lenient, load_ontology, ontology_from_str, ontology_to_json, ontology_to_string,
    parse_entries, Entry,
};
pub use validate::validate_ontology;

/// Maps a concrete type onto an abstract type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAnnotation {
    pub id: String,
    pub language: String,
    pub package: String,
    pub concrete_name: String,
    pub definition: ObType,
    pub description: Option<String>,
}

/// How one definition input binds to the concrete call's arguments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputSlot {
    pub slot: Option<String>,
    pub position: Option<usize>,
    pub concrete_type: Option<String>,
}

/// Maps a concrete function or method onto a term over function concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionAnnotation {
    pub id: String,
    pub language: String,
    pub package: String,
    pub function: String,
    pub kind: CallKind,
    pub owner_type: Option<String>,
    pub inputs: Vec<InputSlot>,
    pub outputs: Vec<ResultSlot>,
    pub definition: MorTerm,
    pub description: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub class: String,
    pub severity: Severity,
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(
        class: &str,
        severity: Severity,
        subject: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            class: class.into(),
            severity,
            subject: subject.into(),
            location: None,
            message: message.into(),
        }
    }

    pub(crate) fn at(mut self, location: impl Into<String>) -> Self {
        self.location = Some(location.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {location}: {message}")]
    Parse {
        file: String,
        location: String,
        message: String,
    },
    #[error("reference to undefined concept {0:?}")]
    UnresolvedReference(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("annotation {annotation:?} violates functoriality at {slot}")]
    FunctorialityViolation { annotation: String, slot: String },
    #[error("{0:?} has an ill-typed definition: {1}")]
    IllTyped(String, String),
    #[error("invalid ontology: {0}")]
    Invalid(String),
}

impl From<PresentationError> for LoadError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::DuplicateId(id) => LoadError::DuplicateId(id),
            PresentationError::UnresolvedReference(id) => LoadError::UnresolvedReference(id),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    #[error("annotations {0:?} and {1:?} both match at the same lineage rank")]
    AmbiguousAnnotation(String, String),
}

/// A linked ontology: the presentation plus annotations, with definition
/// diagrams precomputed for every well-typed function annotation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    presentation: Presentation,
    type_annotations: BTreeMap<String, TypeAnnotation>,
    function_annotations: BTreeMap<String, FunctionAnnotation>,
    type_index: BTreeMap<(String, String), String>,
    call_index: BTreeMap<(String, String, CallKind), Vec<String>>,
    definitions: BTreeMap<String, WiringDiagram>,
}

impl Ontology {
    pub(crate) fn link(
        presentation: Presentation,
        types: Vec<TypeAnnotation>,
        functions: Vec<FunctionAnnotation>,
    ) -> Result<Self, LoadError> {
        let mut o = Ontology {
            presentation,
            ..Default::default()
        };
        for t in types {
            for b in t.definition.basics() {
                if !o.presentation.types().contains_key(b) {
                    return Err(LoadError::UnresolvedReference(b.to_string()));
                }
            }
            let key = (t.language.clone(), t.concrete_name.clone());
            if o.type_index.contains_key(&key) || o.type_annotations.contains_key(&t.id) {
                return Err(LoadError::DuplicateId(t.id));
            }
            o.type_index.insert(key, t.id.clone());
            o.type_annotations.insert(t.id.clone(), t);
        }
        for f in functions {
            for g in f.definition.generators() {
                if o.presentation.function(g).is_none() {
                    return Err(LoadError::UnresolvedReference(g.to_string()));
                }
            }
            for ty in f.definition.mentioned_types() {
                for b in ty.basics() {
                    if !o.presentation.types().contains_key(b) {
                        return Err(LoadError::UnresolvedReference(b.to_string()));
                    }
                }
            }
            if o.function_annotations.contains_key(&f.id) {
                return Err(LoadError::DuplicateId(f.id));
            }
            if let Ok(d) = crate::ontology::term_to_diagram(&f.definition, &o.presentation) {
                o.definitions.insert(f.id.clone(), d);
            }
            o.call_index
                .entry((f.language.clone(), f.function.clone(), f.kind))
                .or_default()
                .push(f.id.clone());
            o.function_annotations.insert(f.id.clone(), f);
        }
        for ids in o.call_index.values_mut() {
            ids.sort();
        }
        Ok(o)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn preorder(&self) -> &SubtypePreorder {
        self.presentation.preorder()
    }

    pub fn type_annotations(&self) -> &BTreeMap<String, TypeAnnotation> {
        &self.type_annotations
    }

    pub fn function_annotations(&self) -> &BTreeMap<String, FunctionAnnotation> {
        &self.function_annotations
    }

    /// The diagram of an annotation's definition, if it typechecks.
    pub fn definition_diagram(&self, annotation_id: &str) -> Option<&WiringDiagram> {
        self.definitions.get(annotation_id)
    }

    /// Abstract type of a concrete type, if annotated.
    pub fn abstract_type(&self, language: &str, concrete_name: &str) -> Option<&ObType> {
        self.type_index
            .get(&(language.to_string(), concrete_name.to_string()))
            .map(|id| &self.type_annotations[id].definition)
    }

    /// Find the annotation for a concrete call.
    ///
    /// Member calls walk `lineage` from the most specific class and take the
    /// first class owning a matching annotation. Other calls match on
    /// language, package, name and kind exactly.
    pub fn resolve_annotation(
        &self,
        call: &ConcreteCallKey,
        lineage: &[String],
    ) -> Result<Option<&FunctionAnnotation>, ResolveError> {
        let Some(ids) = self
            .call_index
            .get(&(call.language.clone(), call.name.clone(), call.kind))
        else {
            return Ok(None);
        };
        let candidates: Vec<&FunctionAnnotation> =
            ids.iter().map(|id| &self.function_annotations[id]).collect();
        if call.kind.is_member() {
            for class in lineage {
                let found: Vec<_> = candidates
                    .iter()
                    .copied()
                    .filter(|a| a.owner_type.as_deref() == Some(class))
                    .collect();
                if !found.is_empty() {
                    return unique(found);
                }
            }
            Ok(None)
        } else {
            unique(
                candidates
                    .into_iter()
                    .filter(|a| a.package == call.package)
                    .collect(),
            )
        }
    }
}

fn unique(found: Vec<&FunctionAnnotation>) -> Result<Option<&FunctionAnnotation>, ResolveError> {
    match found.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some(*one)),
        [a, b, ..] => Err(ResolveError::AmbiguousAnnotation(a.id.clone(), b.id.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"[
      {"schema":"concept","kind":"type","id":"model"},
      {"schema":"concept","kind":"type","id":"data"},
      {"schema":"concept","kind":"function","id":"fit","dom":{"product":["model","data"]},"cod":"model"},
      {"schema":"annotation","kind":"function","language":"python","package":"sklearn.base",
       "function":"fit","call_kind":"method","owner_type":"sklearn.base.BaseEstimator",
       "inputs":[{"slot":"self"},{"slot":"X"}],"outputs":[{"slot":"self"}],"definition":"fit"},
      {"schema":"annotation","kind":"function","language":"python","package":"sklearn.base",
       "function":"fit","call_kind":"method","owner_type":"sklearn.cluster.KMeans",
       "inputs":[{"slot":"self"},{"slot":"X"}],"outputs":[{"slot":"self"}],"definition":"fit"}
    ]"#;

    fn key(name: &str, kind: CallKind) -> ConcreteCallKey {
        ConcreteCallKey {
            language: "python".into(),
            package: "sklearn.cluster".into(),
            name: name.into(),
            kind,
        }
    }

    #[test]
    fn lineage_walk_prefers_most_specific() {
        let o = ontology_from_str(DOC, "inline").unwrap();
        let lin = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let hit = o
            .resolve_annotation(
                &key("fit", CallKind::Method),
                &lin(&["sklearn.cluster.KMeans", "sklearn.base.BaseEstimator"]),
            )
            .unwrap()
            .unwrap();
        assert_eq!(hit.owner_type.as_deref(), Some("sklearn.cluster.KMeans"));
        let hit = o
            .resolve_annotation(
                &key("fit", CallKind::Method),
                &lin(&["other.Thing", "sklearn.base.BaseEstimator"]),
            )
            .unwrap()
            .unwrap();
        assert_eq!(hit.owner_type.as_deref(), Some("sklearn.base.BaseEstimator"));
        assert!(o
            .resolve_annotation(&key("fit", CallKind::Method), &lin(&["x.Y"]))
            .unwrap()
            .is_none());
        assert!(o
            .resolve_annotation(&key("predict", CallKind::Function), &[])
            .unwrap()
            .is_none());
    }
}
