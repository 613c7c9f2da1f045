//! Concrete (language-level) call metadata shared by traces, raw diagrams and
//! annotations.

use std::fmt;

use serde::{Deserialize, Serialize};

/// What kind of user-invoked computation a concrete call is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallKind {
    Function,
    Method,
    Getter,
    Setter,
    Operator,
}

impl CallKind {
    /// Kinds that are resolved against the receiver's class lineage.
    pub fn is_member(self) -> bool {
        matches!(self, CallKind::Method | CallKind::Getter | CallKind::Setter)
    }
}

impl fmt::Display for CallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CallKind::Function => "function",
            CallKind::Method => "method",
            CallKind::Getter => "getter",
            CallKind::Setter => "setter",
            CallKind::Operator => "operator",
        };
        f.write_str(s)
    }
}

/// Names one output of a concrete call: the k-th returned value or the
/// post-call state of a mutated input slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResultSlot {
    #[serde(rename = "return")]
    Return(usize),
    #[serde(rename = "slot")]
    Mutated(String),
}

/// Lookup key for function annotations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConcreteCallKey {
    pub language: String,
    pub package: String,
    pub name: String,
    pub kind: CallKind,
}

/// Everything a raw box remembers about the concrete call it came from.
///
/// `args` holds one optional slot name per input port and `results` one list
/// of aliases per output port (a returned object that was also mutated in
/// place is a single output carrying both aliases).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub language: String,
    pub package: String,
    pub name: String,
    pub kind: CallKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lineage: Vec<String>,
    #[serde(default)]
    pub args: Vec<Option<String>>,
    #[serde(default)]
    pub results: Vec<Vec<ResultSlot>>,
}

impl CallSite {
    pub fn key(&self) -> ConcreteCallKey {
        ConcreteCallKey {
            language: self.language.clone(),
            package: self.package.clone(),
            name: self.name.clone(),
            kind: self.kind,
        }
    }
}

/// Prefix a concrete type name with its language, the form used for port
/// types in raw diagrams (`python:pandas.core.frame.DataFrame`).
pub fn qualify_type(language: &str, concrete: &str) -> String {
    format!("{language}:{concrete}")
}

/// Inverse of [`qualify_type`]. Concept ids never contain a colon.
pub fn split_qualified_type(label: &str) -> Option<(&str, &str)> {
    label.split_once(':')
}
