//! Canonical forms for wiring diagrams.
//!
//! A diagram is turned into a port graph (labeled nodes with numbered ports,
//! directed port-to-port edges) and the graph gets a canonical node order by
//! color refinement plus individualization, pruning the search tree with the
//! automorphisms discovered along the way. Two diagrams are isomorphic exactly
//! when their canonical encodings are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};

use super::{BoxContent, BoxId, PortType, Source, Target, WiringDiagram};

/// An edge endpoint: an outer port, or port `p` of node `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Outer(usize),
    Node(usize, usize),
}

/// A directed multigraph-free port graph with opaque node labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PortGraph {
    pub header: Vec<u8>,
    pub nodes: Vec<Vec<u8>>,
    pub edges: Vec<(End, End)>,
}

/// Canonical encoding. Equal forms mean isomorphic inputs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Hex SHA-256 of the encoding.
    pub fn digest(&self) -> String {
        Sha256::digest(&self.0)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", &self.digest()[..16])
    }
}

fn push_u32(buf: &mut Vec<u8>, n: usize) {
    buf.extend_from_slice(&(n as u32).to_be_bytes());
}

fn push_bytes(buf: &mut Vec<u8>, b: &[u8]) {
    push_u32(buf, b.len());
    buf.extend_from_slice(b);
}

fn push_types(buf: &mut Vec<u8>, types: &[PortType]) {
    push_u32(buf, types.len());
    for t in types {
        match t {
            PortType::Labeled(s) => {
                buf.push(1);
                push_bytes(buf, s.as_bytes());
            }
            PortType::Unlabeled => buf.push(0),
        }
    }
}

type EndKey = (u8, usize, usize);

struct Search<'a> {
    g: &'a PortGraph,
    ins: Vec<Vec<(End, usize)>>,
    outs: Vec<Vec<(usize, End)>>,
    best: Option<(Vec<u8>, Vec<usize>)>,
    first: Option<(Vec<u8>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

fn dense_ranks<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let distinct: BTreeSet<&T> = keys.iter().collect();
    let index: BTreeMap<&T, usize> = distinct.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| index[k]).collect()
}

fn count(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl<'a> Search<'a> {
    fn new(g: &'a PortGraph) -> Self {
        let n = g.nodes.len();
        let mut ins = vec![Vec::new(); n];
        let mut outs = vec![Vec::new(); n];
        for (s, t) in &g.edges {
            if let End::Node(v, p) = *t {
                ins[v].push((*s, p));
            }
            if let End::Node(u, p) = *s {
                outs[u].push((p, *t));
            }
        }
        Search {
            g,
            ins,
            outs,
            best: None,
            first: None,
            autos: Vec::new(),
        }
    }

    fn key(colors: &[usize], e: End) -> EndKey {
        match e {
            End::Outer(k) => (0, k, 0),
            End::Node(v, p) => (1, colors[v], p),
        }
    }

    /// Refine until the number of cells stops growing.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut cells = count(&colors);
        loop {
            let sigs: Vec<_> = (0..colors.len())
                .map(|v| {
                    let mut i: Vec<(EndKey, usize)> = self.ins[v]
                        .iter()
                        .map(|(s, p)| (Self::key(&colors, *s), *p))
                        .collect();
                    i.sort_unstable();
                    let mut o: Vec<(usize, EndKey)> = self.outs[v]
                        .iter()
                        .map(|(p, t)| (*p, Self::key(&colors, *t)))
                        .collect();
                    o.sort_unstable();
                    (colors[v], i, o)
                })
                .collect();
            colors = dense_ranks(&sigs);
            let now = count(&colors);
            if now == cells {
                return colors;
            }
            cells = now;
        }
    }

    fn encode(&self, pos: &[usize]) -> Vec<u8> {
        let n = pos.len();
        let mut at = vec![0; n];
        for (v, p) in pos.iter().enumerate() {
            at[*p] = v;
        }
        let mut buf = Vec::new();
        push_bytes(&mut buf, &self.g.header);
        push_u32(&mut buf, n);
        for v in &at {
            push_bytes(&mut buf, &self.g.nodes[*v]);
        }
        let mut edges: Vec<(EndKey, EndKey)> = self
            .g
            .edges
            .iter()
            .map(|(s, t)| (Self::key(pos, *s), Self::key(pos, *t)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        push_u32(&mut buf, edges.len());
        for ((a, b, c), (d, e, f)) in edges {
            buf.push(a);
            push_u32(&mut buf, b);
            push_u32(&mut buf, c);
            buf.push(d);
            push_u32(&mut buf, e);
            push_u32(&mut buf, f);
        }
        buf
    }

    fn target_cell(colors: &[usize]) -> Option<Vec<usize>> {
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            cells.entry(*c).or_default().push(v);
        }
        cells
            .into_values()
            .filter(|c| c.len() > 1)
            .min_by_key(|c| c.len())
    }

    fn leaf(&mut self, pos: Vec<usize>) {
        let enc = self.encode(&pos);
        let automorphism_with = |other: &[usize]| {
            let mut at = vec![0; other.len()];
            for (v, p) in other.iter().enumerate() {
                at[*p] = v;
            }
            pos.iter().map(|p| at[*p]).collect::<Vec<usize>>()
        };
        if let Some((fe, fp)) = &self.first {
            if *fe == enc {
                let a = automorphism_with(fp);
                self.autos.push(a);
            }
        } else {
            self.first = Some((enc.clone(), pos.clone()));
        }
        match &self.best {
            Some((be, bp)) if *be == enc => {
                let a = automorphism_with(bp);
                self.autos.push(a);
            }
            Some((be, _)) if *be < enc => {}
            _ => self.best = Some((enc, pos)),
        }
    }

    fn orbits_fixing(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.g.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for a in &self.autos {
            if prefix.iter().all(|v| a[*v] == *v) {
                for (v, w) in a.iter().enumerate() {
                    let (rv, rw) = (find(&mut parent, v), find(&mut parent, *w));
                    if rv != rw {
                        parent[rv.max(rw)] = rv.min(rw);
                    }
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    fn search(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) {
        let Some(cell) = Self::target_cell(&colors) else {
            self.leaf(colors);
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for v in cell {
            if !explored.is_empty() {
                let orbit = self.orbits_fixing(prefix);
                if explored.iter().any(|w| orbit[*w] == orbit[v]) {
                    continue;
                }
            }
            let mut split: Vec<usize> = colors.iter().map(|c| 2 * c + 1).collect();
            split[v] -= 1;
            let next = self.refine(dense_ranks(&split));
            prefix.push(v);
            self.search(next, prefix);
            prefix.pop();
            explored.push(v);
        }
    }
}

impl PortGraph {
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut s = Search::new(self);
        let start = s.refine(dense_ranks(&self.nodes));
        s.search(start, &mut Vec::new());
        CanonicalForm(s.best.expect("search reaches at least one leaf").0)
    }

    /// Canonical node order: `order[i]` is the node placed at position `i`.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut s = Search::new(self);
        let start = s.refine(dense_ranks(&self.nodes));
        s.search(start, &mut Vec::new());
        let pos = s.best.expect("search reaches at least one leaf").1;
        let mut at = vec![0; pos.len()];
        for (v, p) in pos.iter().enumerate() {
            at[*p] = v;
        }
        at
    }
}

fn node_label(content: &BoxContent, inputs: &[PortType], outputs: &[PortType]) -> Vec<u8> {
    let mut buf = Vec::new();
    match content {
        BoxContent::Atomic { label, name, .. } => {
            buf.push(b'A');
            match label {
                Some(l) => {
                    buf.push(1);
                    push_bytes(&mut buf, l.as_bytes());
                }
                None => buf.push(0),
            }
            push_bytes(&mut buf, name.as_bytes());
        }
        BoxContent::Nested { name, inner } => {
            buf.push(b'N');
            push_bytes(&mut buf, name.as_bytes());
            push_bytes(&mut buf, canonicalize(inner).as_bytes());
        }
    }
    push_types(&mut buf, inputs);
    push_types(&mut buf, outputs);
    buf
}

fn index_of(d: &WiringDiagram) -> BTreeMap<BoxId, usize> {
    d.boxes.keys().enumerate().map(|(i, b)| (*b, i)).collect()
}

/// The port graph of a diagram. Element values and call metadata are not
/// part of the structure.
pub fn port_graph(d: &WiringDiagram) -> PortGraph {
    let index = index_of(d);
    let mut header = Vec::new();
    push_types(&mut header, &d.inputs);
    push_types(&mut header, &d.outputs);
    let nodes = d
        .boxes
        .values()
        .map(|b| node_label(&b.content, &b.inputs, &b.outputs))
        .collect();
    let edges = d
        .wires
        .iter()
        .map(|w| {
            let s = match w.src {
                Source::OuterIn(k) => End::Outer(k),
                Source::BoxOut(b, j) => End::Node(index[&b], j),
            };
            let t = match w.tgt {
                Target::OuterOut(k) => End::Outer(k),
                Target::BoxIn(b, i) => End::Node(index[&b], i),
            };
            (s, t)
        })
        .collect();
    PortGraph {
        header,
        nodes,
        edges,
    }
}

pub fn canonicalize(d: &WiringDiagram) -> CanonicalForm {
    port_graph(d).canonical_form()
}

/// Structural isomorphism, ignoring box ids, element values and call data.
pub fn is_isomorphic(a: &WiringDiagram, b: &WiringDiagram) -> bool {
    a.boxes.len() == b.boxes.len()
        && a.wires.len() == b.wires.len()
        && canonicalize(a) == canonicalize(b)
}

/// The graph of labeled boxes only.
///
/// Direct wires between labeled boxes become edges. For every connected
/// region of unlabeled boxes, each labeled output feeding the region is
/// joined to each labeled input the region feeds. Outer ports are dropped.
pub fn labeled_substructure(d: &WiringDiagram) -> PortGraph {
    let labeled: Vec<BoxId> = d
        .boxes
        .iter()
        .filter(|(_, b)| b.label().is_some())
        .map(|(id, _)| *id)
        .collect();
    let index: BTreeMap<BoxId, usize> = labeled.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let is_dark = |b: &BoxId| !index.contains_key(b);

    let mut parent: BTreeMap<BoxId, BoxId> =
        d.boxes.keys().filter(|b| is_dark(b)).map(|b| (*b, *b)).collect();
    fn root(p: &mut BTreeMap<BoxId, BoxId>, x: BoxId) -> BoxId {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        p.insert(x, r);
        r
    }
    for w in &d.wires {
        if let (Source::BoxOut(a, _), Target::BoxIn(b, _)) = (w.src, w.tgt) {
            if is_dark(&a) && is_dark(&b) {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent.insert(ra.max(rb), ra.min(rb));
                }
            }
        }
    }

    let mut edges = BTreeSet::new();
    let mut feeders: BTreeMap<BoxId, BTreeSet<End>> = BTreeMap::new();
    let mut consumers: BTreeMap<BoxId, BTreeSet<End>> = BTreeMap::new();
    for w in &d.wires {
        let (Source::BoxOut(a, j), Target::BoxIn(b, i)) = (w.src, w.tgt) else {
            continue;
        };
        match (index.get(&a), index.get(&b)) {
            (Some(x), Some(y)) => {
                edges.insert((End::Node(*x, j), End::Node(*y, i)));
            }
            (Some(x), None) => {
                let r = root(&mut parent, b);
                feeders.entry(r).or_default().insert(End::Node(*x, j));
            }
            (None, Some(y)) => {
                let r = root(&mut parent, a);
                consumers.entry(r).or_default().insert(End::Node(*y, i));
            }
            (None, None) => {}
        }
    }
    for (r, fs) in &feeders {
        if let Some(cs) = consumers.get(r) {
            for f in fs {
                for c in cs {
                    edges.insert((*f, *c));
                }
            }
        }
    }

    PortGraph {
        header: Vec::new(),
        nodes: labeled
            .iter()
            .map(|id| {
                let b = &d.boxes[id];
                node_label(&b.content, &b.inputs, &b.outputs)
            })
            .collect(),
        edges: edges.into_iter().collect(),
    }
}

/// Isomorphism of the labeled substructures.
pub fn labeled_isomorphic(a: &WiringDiagram, b: &WiringDiagram) -> bool {
    let (ga, gb) = (labeled_substructure(a), labeled_substructure(b));
    ga.nodes.len() == gb.nodes.len()
        && ga.edges.len() == gb.edges.len()
        && ga.canonical_form() == gb.canonical_form()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose, product, Block, Discrete};

    fn t(s: &str) -> PortType {
        PortType::labeled(s)
    }

    fn unary(label: &str) -> WiringDiagram {
        WiringDiagram::from_block(Block::labeled(label, vec![t("x")], vec![t("x")]))
    }

    #[test]
    fn renaming_boxes_preserves_form() {
        let d = compose(&unary("f"), &unary("g"), &Discrete).unwrap();
        let r = d.rename_boxes(|b| BoxId(100 - b.0));
        assert_eq!(canonicalize(&d), canonicalize(&r));
        assert!(is_isomorphic(&d, &r));
    }

    #[test]
    fn order_of_composition_matters() {
        let fg = compose(&unary("f"), &unary("g"), &Discrete).unwrap();
        let gf = compose(&unary("g"), &unary("f"), &Discrete).unwrap();
        assert!(!is_isomorphic(&fg, &gf));
    }

    #[test]
    fn product_order_matters_at_the_boundary() {
        let fg = product(&unary("f"), &unary("g"));
        let gf = product(&unary("g"), &unary("f"));
        assert!(!is_isomorphic(&fg, &gf));
    }

    #[test]
    fn symmetric_graph_terminates() {
        // Many identical parallel boxes: a large automorphism group.
        let mut d = WiringDiagram::empty();
        for _ in 0..12 {
            d = product(&d, &unary("f"));
        }
        let r = d.rename_boxes(|b| BoxId(b.0 * 7 + 3));
        assert_eq!(canonicalize(&d), canonicalize(&r));
    }

    #[test]
    fn digest_is_hex() {
        let c = canonicalize(&unary("f"));
        assert_eq!(c.digest().len(), 64);
    }

    #[test]
    fn unlabeled_region_becomes_an_edge() {
        let mut d = WiringDiagram::new(vec![], vec![]);
        let a = d.add_box(Block::labeled("a", vec![], vec![t("x")]));
        let u = d.add_box(Block::unlabeled(vec![t("x")], vec![t("x")]));
        let b = d.add_box(Block::labeled("b", vec![t("x")], vec![]));
        d.add_wire(Source::BoxOut(a, 0), Target::BoxIn(u, 0));
        d.add_wire(Source::BoxOut(u, 0), Target::BoxIn(b, 0));
        let g = labeled_substructure(&d);
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges, vec![(End::Node(0, 0), End::Node(1, 0))]);
    }
}
