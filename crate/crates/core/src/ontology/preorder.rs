use std::collections::{BTreeMap, BTreeSet};

use super::ObType;
use crate::diagram::PortOrder;

/// Reflexive-transitive closure of a relation on names, by DFS from each
/// node. `up[x]` holds every `y` reachable from `x`, including `x`.
pub(crate) fn closure(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        succ.entry(a).or_default().push(b);
    }
    let mut up = BTreeMap::new();
    let all: BTreeSet<&String> = nodes.iter().chain(edges.iter().flat_map(|(a, b)| [a, b])).collect();
    for x in all {
        let mut seen = BTreeSet::from([x.clone()]);
        let mut stack = vec![x.as_str()];
        while let Some(v) = stack.pop() {
            for w in succ.get(v).into_iter().flatten() {
                if seen.insert((*w).to_string()) {
                    stack.push(w);
                }
            }
        }
        up.insert(x.clone(), seen);
    }
    up
}

/// The subtype preorder generated by declared basic subtypings and lifted
/// to products (componentwise) and function types (contravariant in the
/// domain, covariant in the codomain).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubtypePreorder {
    generators: BTreeSet<(String, String)>,
    up: BTreeMap<String, BTreeSet<String>>,
}

impl SubtypePreorder {
    pub fn new(
        basics: impl IntoIterator<Item = String>,
        generators: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        let basics: BTreeSet<String> = basics.into_iter().collect();
        let generators: BTreeSet<(String, String)> = generators.into_iter().collect();
        let up = closure(&basics, &generators);
        SubtypePreorder { generators, up }
    }

    pub fn generators(&self) -> &BTreeSet<(String, String)> {
        &self.generators
    }

    pub fn leq_basic(&self, a: &str, b: &str) -> bool {
        a == b || self.up.get(a).is_some_and(|s| s.contains(b))
    }

    /// Every declared supertype of `a`, including `a`.
    pub fn supertypes(&self, a: &str) -> BTreeSet<String> {
        self.up
            .get(a)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([a.to_string()]))
    }

    pub fn leq(&self, t1: &ObType, t2: &ObType) -> bool {
        match (t1, t2) {
            (ObType::Unit, ObType::Unit) => true,
            (ObType::Basic(a), ObType::Basic(b)) => self.leq_basic(a, b),
            (ObType::Product(xs), ObType::Product(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.leq(x, y))
            }
            (ObType::Hom(d1, c1), ObType::Hom(d2, c2)) => self.leq(d2, d1) && self.leq(c1, c2),
            _ => false,
        }
    }

    /// Groups of two or more distinct basics that are all mutually below
    /// each other.
    pub fn cycles(&self) -> Vec<BTreeSet<String>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (x, ups) in &self.up {
            if seen.contains(x) {
                continue;
            }
            let class: BTreeSet<String> = ups
                .iter()
                .filter(|y| self.leq_basic(y, x))
                .cloned()
                .collect();
            if class.len() > 1 {
                seen.extend(class.iter().cloned());
                out.push(class);
            }
        }
        out
    }
}

impl PortOrder for SubtypePreorder {
    fn leq_labels(&self, sub: &str, sup: &str) -> bool {
        if sub == sup {
            return true;
        }
        match (ObType::parse(sub), ObType::parse(sup)) {
            (Ok(a), Ok(b)) => self.leq(&a, &b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> ObType {
        ObType::basic(s)
    }

    fn pre(edges: &[(&str, &str)]) -> SubtypePreorder {
        SubtypePreorder::new(
            [],
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
    }

    #[test]
    fn matrices_are_arrays_and_tables() {
        let p = pre(&[("matrix", "array"), ("matrix", "table"), ("array", "data"), ("table", "data")]);
        assert!(p.leq(&b("matrix"), &b("array")));
        assert!(p.leq(&b("matrix"), &b("table")));
        assert!(p.leq(&b("matrix"), &b("data")));
        assert!(!p.leq(&b("array"), &b("table")));
    }

    #[test]
    fn hom_variance() {
        let p = pre(&[("x", "x2"), ("y", "y2")]);
        assert!(p.leq(&ObType::hom(b("x2"), b("y")), &ObType::hom(b("x"), b("y2"))));
        assert!(!p.leq(&ObType::hom(b("x"), b("y")), &ObType::hom(b("x2"), b("y"))));
    }

    #[test]
    fn cycles_are_legal_and_reported() {
        let p = pre(&[("a", "b"), ("b", "a"), ("b", "c")]);
        assert!(p.leq(&b("a"), &b("b")) && p.leq(&b("b"), &b("a")));
        assert_eq!(p.cycles(), vec![BTreeSet::from(["a".to_string(), "b".to_string()])]);
    }

    #[test]
    fn labels_parse_for_port_checks() {
        let p = pre(&[("x", "y")]);
        assert!(p.leq_labels("(x*x)", "(y*x)"));
        assert!(!p.leq_labels("y", "x"));
        assert!(!p.leq_labels("python:int", "x"));
    }
}
