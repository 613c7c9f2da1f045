//! A small ontology over abstract types `a`, `b` (a subtype of `a`) and `c`,
//! with a catalog of concrete Python boxes over types `A`, `B`, `C`, `D`.
//! `D` has no annotation, and neither do the boxes named `u*`.

use semflow::annotation::{ontology_from_str, Ontology};

use crate::gen::BoxKind;

pub const ONTOLOGY: &str = r#"[
  {"schema": "concept", "kind": "type", "id": "a"},
  {"schema": "concept", "kind": "type", "id": "b", "supertypes": ["a"]},
  {"schema": "concept", "kind": "type", "id": "c"},
  {"schema": "concept", "kind": "function", "id": "f", "dom": "a", "cod": "b"},
  {"schema": "concept", "kind": "function", "id": "g", "dom": {"product": ["a", "b"]}, "cod": "c"},
  {"schema": "concept", "kind": "function", "id": "h", "dom": "c", "cod": "a"},
  {"schema": "concept", "kind": "function", "id": "z", "dom": "1", "cod": "a"},
  {"schema": "concept", "kind": "function", "id": "y", "dom": "1", "cod": "b"},

  {"schema": "annotation", "kind": "type", "language": "python", "package": "pkg", "concrete_name": "A", "definition": "a"},
  {"schema": "annotation", "kind": "type", "language": "python", "package": "pkg", "concrete_name": "B", "definition": "b"},
  {"schema": "annotation", "kind": "type", "language": "python", "package": "pkg", "concrete_name": "C", "definition": "c"},

  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cf", "call_kind": "function",
   "inputs": [{"slot": "a0"}], "outputs": [{"return": 0}], "definition": "f"},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cg", "call_kind": "function",
   "inputs": [{"slot": "a0"}, {"slot": "a1"}], "outputs": [{"return": 0}], "definition": "g"},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cgs", "call_kind": "function",
   "inputs": [{"slot": "a1"}, {"slot": "a0"}], "outputs": [{"return": 0}], "definition": "g"},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "ch", "call_kind": "function",
   "inputs": [{"position": 0}], "outputs": [{"return": 0}], "definition": "h"},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "chf", "call_kind": "function",
   "inputs": [{"slot": "a0"}], "outputs": [{"return": 0}], "definition": {"compose": ["h", "f"]}},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cdup", "call_kind": "function",
   "inputs": [{"slot": "a0"}], "outputs": [{"return": 0}, {"return": 1}], "definition": {"compose": ["f", {"copy": "b"}]}},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cz", "call_kind": "function",
   "inputs": [], "outputs": [{"return": 0}], "definition": "z"},
  {"schema": "annotation", "kind": "function", "language": "python", "package": "pkg", "function": "cy", "call_kind": "function",
   "inputs": [], "outputs": [{"return": 0}], "definition": "y"}
]"#;

pub fn ontology() -> Ontology {
    ontology_from_str(ONTOLOGY, "synthetic").expect("synthetic ontology is valid")
}

/// Concrete boxes; every wire type has a zero-input producer.
pub fn catalog() -> Vec<BoxKind> {
    vec![
        BoxKind::concrete("cf", &["A"], &["B"]),
        BoxKind::concrete("cg", &["A", "B"], &["C"]),
        BoxKind::concrete("cgs", &["B", "A"], &["C"]),
        BoxKind::concrete("ch", &["C"], &["A"]),
        BoxKind::concrete("chf", &["C"], &["B"]),
        BoxKind::concrete("cdup", &["A"], &["B", "B"]),
        BoxKind::concrete("cz", &[], &["A"]),
        BoxKind::concrete("cy", &[], &["B"]),
        BoxKind::concrete("ua", &["A"], &["A"]),
        BoxKind::concrete("uac", &["A", "C"], &["B"]),
        BoxKind::concrete("uc", &[], &["C"]),
        BoxKind::concrete("ud", &["A"], &["D"]),
        BoxKind::concrete("udc", &["D"], &["C"]),
        BoxKind::concrete("ud0", &[], &["D"]),
    ]
}

/// Wire types of [`catalog`], fully qualified.
pub const WIRE_TYPES: [&str; 4] = ["python:A", "python:B", "python:C", "python:D"];
