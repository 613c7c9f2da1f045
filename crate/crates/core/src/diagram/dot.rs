use std::fmt::Write;

use super::{BoxContent, PortType, Source, Target, WiringDiagram};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn edge_label(t: Option<&PortType>) -> String {
    t.and_then(PortType::label).map(escape).unwrap_or_default()
}

fn write_body(out: &mut String, d: &WiringDiagram, prefix: &str, indent: &str) {
    for k in 0..d.inputs.len() {
        let _ = writeln!(out, "{indent}\"{prefix}in{k}\" [shape=point];");
    }
    for k in 0..d.outputs.len() {
        let _ = writeln!(out, "{indent}\"{prefix}out{k}\" [shape=point];");
    }
    for (id, b) in &d.boxes {
        match &b.content {
            BoxContent::Atomic { label, name, .. } => {
                let shown = if label.is_none() && name.is_empty() {
                    String::new()
                } else {
                    escape(name)
                };
                let _ = writeln!(out, "{indent}\"{prefix}b{id}\" [shape=box, label=\"{shown}\"];");
            }
            BoxContent::Nested { name, inner } => {
                let _ = writeln!(out, "{indent}subgraph \"cluster_{prefix}b{id}\" {{");
                let _ = writeln!(out, "{indent}  label=\"{}\";", escape(name));
                let inner_prefix = format!("{prefix}b{id}.");
                let _ = writeln!(out, "{indent}  \"{prefix}b{id}\" [shape=box, style=dashed, label=\"{}\"];", escape(name));
                write_body(out, inner, &inner_prefix, &format!("{indent}  "));
                let _ = writeln!(out, "{indent}}}");
            }
        }
    }
    for w in &d.wires {
        let from = match w.src {
            Source::OuterIn(k) => format!("{prefix}in{k}"),
            Source::BoxOut(b, _) => format!("{prefix}b{b}"),
        };
        let to = match w.tgt {
            Target::OuterOut(k) => format!("{prefix}out{k}"),
            Target::BoxIn(b, _) => format!("{prefix}b{b}"),
        };
        let ports = match (w.src, w.tgt) {
            (Source::BoxOut(_, j), Target::BoxIn(_, i)) => format!(", taillabel=\"{j}\", headlabel=\"{i}\""),
            (Source::BoxOut(_, j), _) => format!(", taillabel=\"{j}\""),
            (_, Target::BoxIn(_, i)) => format!(", headlabel=\"{i}\""),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{indent}\"{from}\" -> \"{to}\" [label=\"{}\"{ports}];",
            edge_label(d.source_type(w.src))
        );
    }
}

/// Graphviz rendering: one node per box (blank boxes get an empty label),
/// one edge per wire labeled with its source type.
pub fn to_dot(d: &WiringDiagram) -> String {
    let mut out = String::from("digraph G {\n  rankdir=TB;\n");
    write_body(&mut out, d, "", "  ");
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Block;

    #[test]
    fn blank_box_has_empty_label() {
        let x = PortType::labeled("table");
        let d = WiringDiagram::from_block(Block::unlabeled(vec![x.clone()], vec![x]));
        let dot = to_dot(&d);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("[shape=box, label=\"\"]"));
        assert!(dot.contains("label=\"table\""));
        assert_eq!(dot, to_dot(&d));
    }
}
