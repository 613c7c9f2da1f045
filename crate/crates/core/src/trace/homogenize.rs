//! Normalizing call events: methods take their receiver as a leading
//! `self` argument, attribute access becomes getter/setter calls, and
//! operators become calls to canonical functional names.

use super::{Arg, CallBegin};
use crate::concrete::CallKind;

const PY_OPERATORS: &[&str] = &[
    "abs", "add", "and_", "concat", "contains", "delitem", "eq", "floordiv", "ge", "getitem",
    "gt", "iadd", "iand", "ifloordiv", "ilshift", "imatmul", "imod", "imul", "invert", "ior",
    "ipow", "irshift", "isub", "itruediv", "ixor", "le", "lshift", "lt", "matmul", "mod", "mul",
    "ne", "neg", "not_", "or_", "pos", "pow", "rshift", "setitem", "slice", "sub", "truediv",
    "xor",
];

const R_OPERATORS: &[(&str, &str)] = &[
    ("+", "add"),
    ("-", "sub"),
    ("*", "mul"),
    ("/", "truediv"),
    ("^", "pow"),
    ("%%", "mod"),
    ("%/%", "floordiv"),
    ("%*%", "matmul"),
    ("==", "eq"),
    ("!=", "ne"),
    ("<", "lt"),
    ("<=", "le"),
    (">", "gt"),
    (">=", "ge"),
    ("&", "and_"),
    ("|", "or_"),
    ("!", "not_"),
    ("[", "getitem"),
    ("[[", "getitem"),
    ("[<-", "setitem"),
    ("[[<-", "setitem"),
];

fn operator_package(language: &str) -> &'static str {
    if language == "r" {
        "base"
    } else {
        "operator"
    }
}

/// Canonical alias for an operator spelled `name` in `language`.
fn operator_alias(language: &str, package: &str, name: &str, kind: CallKind) -> Option<&'static str> {
    let known = |n: &str| PY_OPERATORS.iter().copied().find(|op| *op == n);
    if kind == CallKind::Operator {
        if let Some(op) = known(name) {
            return Some(op);
        }
    }
    if language == "r" {
        return R_OPERATORS.iter().find(|(sym, _)| *sym == name).map(|(_, op)| *op);
    }
    if let Some(inner) = name.strip_prefix("__").and_then(|n| n.strip_suffix("__")) {
        let inner = match inner {
            "and" | "or" | "not" => format!("{inner}_"),
            "div" => "truediv".to_string(),
            other => other.to_string(),
        };
        return known(&inner);
    }
    if (package == "operator" || package == "builtins") && name == "slice" {
        return Some("slice");
    }
    if package == "operator" {
        return known(name);
    }
    None
}

fn attribute_name(a: &Arg) -> Option<String> {
    let repr = a.value_repr.as_deref()?;
    Some(repr.trim_matches(|c| c == '\'' || c == '"').to_string())
}

fn with_slot(mut a: Arg, slot: &str) -> Arg {
    a.slot = Some(slot.to_string());
    a
}

/// Rewrite a call event into homogeneous form. Idempotent.
pub fn method_homogenize(mut e: CallBegin) -> CallBegin {
    let f = &mut e.function;
    let attr_access = match (f.language.as_str(), f.package.as_str(), f.name.as_str()) {
        ("python", "builtins", "getattr") | ("r", "base", "$") | ("r", "base", "@") => {
            Some(CallKind::Getter)
        }
        ("python", "builtins", "setattr") | ("r", "base", "$<-") | ("r", "base", "@<-") => {
            Some(CallKind::Setter)
        }
        _ => None,
    };
    if let Some(kind) = attr_access {
        let mut args = std::mem::take(&mut e.args);
        if let Some(r) = e.receiver.take() {
            args.insert(0, r);
        }
        if args.len() >= 2 {
            if let Some(attr) = attribute_name(&args[1]) {
                let obj = with_slot(args.remove(0), "self");
                args.remove(0);
                let mut rest: Vec<Arg> = args
                    .into_iter()
                    .map(|a| if a.slot.is_none() { with_slot(a, "value") } else { a })
                    .collect();
                rest.insert(0, obj);
                f.name = attr;
                f.qualname = None;
                f.kind = kind;
                e.args = rest;
                return e;
            }
        }
        e.args = args;
        return e;
    }

    if let Some(op) = operator_alias(&f.language, &f.package, &f.name, f.kind) {
        f.name = op.to_string();
        f.package = operator_package(&f.language).to_string();
        f.qualname = None;
        f.kind = CallKind::Operator;
        if let Some(r) = e.receiver.take() {
            e.args.insert(0, r);
        }
        return e;
    }

    if f.kind.is_member() {
        if let Some(r) = e.receiver.take() {
            e.args.insert(0, with_slot(r, "self"));
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::FunctionRef;

    fn call(language: &str, package: &str, name: &str, kind: CallKind) -> CallBegin {
        CallBegin {
            call_id: 1,
            function: FunctionRef {
                language: language.into(),
                package: package.into(),
                name: name.into(),
                qualname: None,
                kind,
                lineage: vec![],
            },
            user_defined: false,
            args: vec![],
            receiver: None,
        }
    }

    fn arg(id: &str) -> Arg {
        Arg {
            object_id: Some(id.into()),
            ..Default::default()
        }
    }

    #[test]
    fn method_gains_self() {
        let mut e = call("python", "sklearn.base", "fit", CallKind::Method);
        e.receiver = Some(arg("km"));
        e.args = vec![with_slot(arg("X"), "X")];
        let h = method_homogenize(e);
        assert_eq!(h.args[0].slot.as_deref(), Some("self"));
        assert_eq!(h.args[0].object_id.as_deref(), Some("km"));
        assert_eq!(h.args.len(), 2);
        assert_eq!(method_homogenize(h.clone()), h);
    }

    #[test]
    fn operators_are_aliased() {
        let mut e = call("python", "pandas", "__iadd__", CallKind::Method);
        e.receiver = Some(arg("a"));
        e.args = vec![arg("b")];
        let h = method_homogenize(e);
        assert_eq!((h.function.name.as_str(), h.function.kind), ("iadd", CallKind::Operator));
        assert_eq!(h.args.len(), 2);
        assert_eq!(method_homogenize(h.clone()), h);

        for (sym, op) in [("[", "getitem"), ("!=", "ne"), ("*", "mul"), ("-", "sub")] {
            let h = method_homogenize(call("r", "base", sym, CallKind::Function));
            assert_eq!(h.function.name, op);
        }
        let h = method_homogenize(call("python", "builtins", "slice", CallKind::Function));
        assert_eq!(h.function.name, "slice");
        let h = method_homogenize(call("python", "numpy", "delete", CallKind::Function));
        assert_eq!(h.function.kind, CallKind::Function);
    }

    #[test]
    fn attribute_reads_become_getters() {
        let mut e = call("python", "builtins", "getattr", CallKind::Function);
        let name = Arg {
            value_repr: Some("'labels_'".into()),
            ..Arg::default()
        };
        e.args = vec![arg("km"), name];
        let h = method_homogenize(e);
        assert_eq!((h.function.name.as_str(), h.function.kind), ("labels_", CallKind::Getter));
        assert_eq!(h.args.len(), 1);
        assert_eq!(h.args[0].slot.as_deref(), Some("self"));
        assert_eq!(method_homogenize(h.clone()), h);
    }
}
