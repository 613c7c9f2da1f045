//! Execution traces and raw flow graphs.
//!
//! A trace is line-delimited JSON. An optional first line
//! `{"trace_version": 1}` is a header; every other line is one event with a
//! `"kind"` of `call-begin`, `call-return`, `access`, `assign` or `delete`.

mod build;
mod homogenize;

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::concrete::CallKind;

pub use build::{build_raw_graph, RawGraphBuilder, VarBinding};
pub use homogenize::method_homogenize;

pub const TRACE_VERSION: u64 = 1;

/// The called function as reported by the tracer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionRef {
    pub language: String,
    pub package: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualname: Option<String>,
    pub kind: CallKind,
    /// Class lineage of the receiver, most specific first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lineage: Vec<String>,
}

/// An argument value. `object_id` is absent for values without identity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concrete_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_repr: Option<String>,
    /// Variable the argument was read from, if the tracer knows it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
}

/// A returned value.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReturnValue {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concrete_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_repr: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallBegin {
    pub call_id: u64,
    pub function: FunctionRef,
    #[serde(default)]
    pub user_defined: bool,
    #[serde(default)]
    pub args: Vec<Arg>,
    /// Receiver of a method call before homogenization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<Arg>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallReturn {
    pub call_id: u64,
    #[serde(default)]
    pub returns: Vec<ReturnValue>,
    /// Object ids of arguments changed in place.
    #[serde(default)]
    pub mutated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum TraceEvent {
    CallBegin(CallBegin),
    CallReturn(CallReturn),
    Access {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object_id: Option<String>,
    },
    Assign {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        object_id: Option<String>,
    },
    Delete {
        name: String,
    },
}

const KINDS: [&str; 5] = ["call-begin", "call-return", "access", "assign", "delete"];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("reading trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: unknown event kind {kind:?}")]
    UnknownEventKind { line: usize, kind: String },
    #[error("unsupported trace version {0}")]
    UnsupportedVersion(u64),
    #[error("calls are not properly nested: {0}")]
    NestingViolation(String),
    #[error("return for call {0} that never began")]
    DanglingReturn(u64),
}

/// Check call-begin / call-return pairing.
pub fn check_nesting(events: &[TraceEvent]) -> Result<(), TraceError> {
    let mut open: Vec<u64> = Vec::new();
    let mut seen: BTreeMap<u64, bool> = BTreeMap::new();
    for e in events {
        match e {
            TraceEvent::CallBegin(b) => {
                if seen.insert(b.call_id, true).is_some() {
                    return Err(TraceError::NestingViolation(format!(
                        "call id {} begins twice",
                        b.call_id
                    )));
                }
                open.push(b.call_id);
            }
            TraceEvent::CallReturn(r) => match open.last() {
                Some(top) if *top == r.call_id => {
                    open.pop();
                }
                _ if !open.contains(&r.call_id) => return Err(TraceError::DanglingReturn(r.call_id)),
                Some(top) => {
                    return Err(TraceError::NestingViolation(format!(
                        "call {} returns while call {top} is still open",
                        r.call_id
                    )))
                }
                None => unreachable!("contains() on an empty stack is false"),
            },
            _ => {}
        }
    }
    match open.last() {
        Some(id) => Err(TraceError::NestingViolation(format!("call {id} never returns"))),
        None => Ok(()),
    }
}

fn parse_line(line: &str, n: usize) -> Result<Option<TraceEvent>, TraceError> {
    let perr = |message: String| TraceError::ParseError { line: n, message };
    let v: Value = serde_json::from_str(line).map_err(|e| perr(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| perr("event is not an object".into()))?;
    if let Some(ver) = obj.get("trace_version") {
        if n != 1 {
            return Err(perr("header must be the first line".into()));
        }
        let ver = ver.as_u64().ok_or_else(|| perr("trace_version must be an integer".into()))?;
        if ver != TRACE_VERSION {
            return Err(TraceError::UnsupportedVersion(ver));
        }
        return Ok(None);
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| perr("event lacks a string \"kind\"".into()))?;
    if !KINDS.contains(&kind) {
        return Err(TraceError::UnknownEventKind {
            line: n,
            kind: kind.to_string(),
        });
    }
    serde_json::from_value(v).map(Some).map_err(|e| perr(e.to_string()))
}

/// Parse and validate a trace, including call nesting.
pub fn parse_trace<R: BufRead>(reader: R) -> Result<Vec<TraceEvent>, TraceError> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(e) = parse_line(&line, i + 1)? {
            events.push(e);
        }
    }
    check_nesting(&events)?;
    Ok(events)
}

pub fn parse_trace_str(text: &str) -> Result<Vec<TraceEvent>, TraceError> {
    parse_trace(text.as_bytes())
}

/// Serialize events as a versioned trace.
pub fn write_trace(events: &[TraceEvent]) -> String {
    let mut out = format!("{{\"trace_version\":{TRACE_VERSION}}}\n");
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trace() {
        assert!(parse_trace_str("").unwrap().is_empty());
        assert!(parse_trace_str("{\"trace_version\":1}\n").unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_trace_str("{\"kind\":\"yield\"}"),
            Err(TraceError::UnknownEventKind { line: 1, .. })
        ));
        assert!(matches!(
            parse_trace_str("{\"trace_version\":2}"),
            Err(TraceError::UnsupportedVersion(2))
        ));
        assert!(matches!(
            parse_trace_str("{\"kind\":\"delete\"}"),
            Err(TraceError::ParseError { line: 1, .. })
        ));
        assert!(matches!(
            parse_trace_str("{\"kind\":\"call-return\",\"call_id\":4}"),
            Err(TraceError::DanglingReturn(4))
        ));
        let begin = |id: u64| {
            format!(
                "{{\"kind\":\"call-begin\",\"call_id\":{id},\"function\":{{\"language\":\"python\",\"package\":\"m\",\"name\":\"f\",\"kind\":\"function\"}}}}\n"
            )
        };
        let ret = |id: u64| format!("{{\"kind\":\"call-return\",\"call_id\":{id}}}\n");
        let crossed = format!("{}{}{}{}", begin(1), begin(2), ret(1), ret(2));
        assert!(matches!(parse_trace_str(&crossed), Err(TraceError::NestingViolation(_))));
        assert!(matches!(parse_trace_str(&begin(1)), Err(TraceError::NestingViolation(_))));
        let ok = format!("{}{}{}{}", begin(1), begin(2), ret(2), ret(1));
        let events = parse_trace_str(&ok).unwrap();
        assert_eq!(events.len(), 4);
        assert_eq!(parse_trace_str(&write_trace(&events)).unwrap(), events);
    }
}
