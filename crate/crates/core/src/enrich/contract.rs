use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{encapsulate_as, is_convex, topological_order, BoxId, Source, Target, WiringDiagram};

fn unlabeled_neighbors(d: &WiringDiagram) -> BTreeMap<BoxId, BTreeSet<BoxId>> {
    let mut adj: BTreeMap<BoxId, BTreeSet<BoxId>> = d
        .boxes()
        .iter()
        .filter(|(_, b)| b.is_unlabeled())
        .map(|(id, _)| (*id, BTreeSet::new()))
        .collect();
    for w in d.wires() {
        if let (Source::BoxOut(a, _), Target::BoxIn(b, _)) = (w.src, w.tgt) {
            if a != b && adj.contains_key(&a) && adj.contains_key(&b) {
                adj.get_mut(&a).expect("checked").insert(b);
                adj.get_mut(&b).expect("checked").insert(a);
            }
        }
    }
    adj
}

/// Connected components of the unlabeled boxes, each listed by rank.
fn components(adj: &BTreeMap<BoxId, BTreeSet<BoxId>>, rank: &BTreeMap<BoxId, usize>) -> Vec<Vec<BoxId>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut by_rank: Vec<BoxId> = adj.keys().copied().collect();
    by_rank.sort_by_key(|b| rank[b]);
    for start in by_rank {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(b) = stack.pop() {
            for n in &adj[&b] {
                if seen.insert(*n) {
                    comp.push(*n);
                    stack.push(*n);
                }
            }
        }
        comp.sort_by_key(|b| rank[b]);
        out.push(comp);
    }
    out
}

/// Greedy convex pieces of a component: grow each piece from its
/// lowest-ranked box, adding adjacent boxes by rank while it stays convex.
fn convex_parts(
    d: &WiringDiagram,
    comp: &[BoxId],
    adj: &BTreeMap<BoxId, BTreeSet<BoxId>>,
) -> Vec<BTreeSet<BoxId>> {
    let mut remaining: Vec<BoxId> = comp.to_vec();
    let mut parts = Vec::new();
    while let Some(&first) = remaining.first() {
        let mut part: BTreeSet<BoxId> = BTreeSet::from([first]);
        loop {
            let next = remaining.iter().copied().find(|b| {
                !part.contains(b) && adj[b].iter().any(|n| part.contains(n)) && {
                    let mut bigger = part.clone();
                    bigger.insert(*b);
                    is_convex(d, &bigger)
                }
            });
            match next {
                Some(b) => {
                    part.insert(b);
                }
                None => break,
            }
        }
        remaining.retain(|b| !part.contains(b));
        parts.push(part);
    }
    parts
}

/// One contraction step: the first piece that is not already a single blank
/// box, if any.
fn next_group(d: &WiringDiagram) -> Option<BTreeSet<BoxId>> {
    let order = topological_order(d).expect("diagrams are acyclic");
    let rank: BTreeMap<BoxId, usize> = order.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let adj = unlabeled_neighbors(d);
    for comp in components(&adj, &rank) {
        for part in convex_parts(d, &comp, &adj) {
            let single_blank = part.len() == 1 && d.boxes()[part.first().expect("non-empty")].is_blank();
            if !single_blank {
                return Some(part);
            }
        }
    }
    None
}

/// Contract, also returning for every resulting blank box the display
/// names of the boxes it absorbed.
pub(crate) fn contract_tracked(d: &WiringDiagram) -> (WiringDiagram, BTreeMap<BoxId, Vec<String>>, usize) {
    let mut d = d.clone();
    let mut absorbed: BTreeMap<BoxId, Vec<String>> = BTreeMap::new();
    let mut steps = 0;
    while let Some(group) = next_group(&d) {
        let mut names: Vec<String> = Vec::new();
        for b in &group {
            let name = d.boxes()[b].name();
            if !name.is_empty() {
                names.push(name.to_string());
            }
            names.extend(absorbed.remove(b).unwrap_or_default());
        }
        let (next, id) = encapsulate_as(&d, &group).expect("groups are convex and non-empty");
        names.sort();
        absorbed.insert(id, names);
        d = next;
        steps += 1;
    }
    absorbed.retain(|id, _| d.boxes().contains_key(id));
    (d, absorbed, steps)
}

/// Encapsulate every maximal connected group of unlabeled boxes into one
/// blank box. A group whose encapsulation would create a cycle is split into
/// convex pieces, grown greedily in topological order.
pub fn contract(d: &WiringDiagram) -> WiringDiagram {
    contract_tracked(d).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Block, PortType};

    fn t(s: &str) -> PortType {
        PortType::labeled(s)
    }

    #[test]
    fn no_unlabeled_boxes_is_identity() {
        let mut d = WiringDiagram::new(vec![t("a")], vec![t("b")]);
        let b = d.add_box(Block::labeled("f", vec![t("a")], vec![t("b")]));
        d.add_wire(Source::OuterIn(0), Target::BoxIn(b, 0));
        d.add_wire(Source::BoxOut(b, 0), Target::OuterOut(0));
        assert_eq!(contract(&d), d);
    }

    #[test]
    fn chain_feeding_labeled_box_becomes_one_blank() {
        let mut d = WiringDiagram::new(vec![t("table")], vec![t("model")]);
        let drop = d.add_box(Block::atomic(None, "drop", vec![t("table")], vec![t("table")]));
        let values = d.add_box(Block::atomic(None, "values", vec![t("table")], vec![t("array")]));
        let fit = d.add_box(Block::labeled("fit", vec![t("array")], vec![t("model")]));
        d.add_wire(Source::OuterIn(0), Target::BoxIn(drop, 0));
        d.add_wire(Source::BoxOut(drop, 0), Target::BoxIn(values, 0));
        d.add_wire(Source::BoxOut(values, 0), Target::BoxIn(fit, 0));
        d.add_wire(Source::BoxOut(fit, 0), Target::OuterOut(0));
        let (c, absorbed, steps) = contract_tracked(&d);
        assert_eq!((c.box_count(), steps), (2, 1));
        let blank = c.boxes().iter().find(|(_, b)| b.is_blank()).map(|(id, _)| *id).unwrap();
        assert_eq!(absorbed[&blank], vec!["drop".to_string(), "values".to_string()]);
        assert_eq!(c.source_of(Target::BoxIn(fit, 0)), Some(Source::BoxOut(blank, 0)));
        assert_eq!(contract(&c), c);
    }

    #[test]
    fn non_convex_group_is_split() {
        // u1 -> f -> u2 and u1 -> u2: the pair {u1, u2} is connected but
        // encapsulating it would close a cycle through f.
        let mut d = WiringDiagram::new(vec![], vec![]);
        let u1 = d.add_box(Block::atomic(None, "u1", vec![], vec![PortType::Unlabeled]));
        let f = d.add_box(Block::labeled("f", vec![PortType::Unlabeled], vec![PortType::Unlabeled]));
        let u2 = d.add_box(Block::atomic(None, "u2", vec![PortType::Unlabeled; 2], vec![]));
        d.add_wire(Source::BoxOut(u1, 0), Target::BoxIn(f, 0));
        d.add_wire(Source::BoxOut(f, 0), Target::BoxIn(u2, 0));
        d.add_wire(Source::BoxOut(u1, 0), Target::BoxIn(u2, 1));
        let c = contract(&d);
        assert_eq!(c.box_count(), 3);
        assert!(topological_order(&c).is_ok());
        assert_eq!(c.boxes().values().filter(|b| b.is_blank()).count(), 2);
    }
}
