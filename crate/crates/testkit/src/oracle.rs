//! Slow, independent reference implementations to check the library
//! against.

use std::collections::{BTreeMap, BTreeSet};

use semflow::annotation::{FunctionAnnotation, Ontology};
use semflow::concrete::ConcreteCallKey;
use semflow::diagram::{Block, BoxContent, BoxId, PortType, Source, Target, WiringDiagram};
use semflow::ontology::{MorTerm, ObType};
use semflow::trace::TraceEvent;

// ------------------------------------------------------------ isomorphism

fn same_node(a: &Block, b: &Block) -> bool {
    if a.inputs != b.inputs || a.outputs != b.outputs {
        return false;
    }
    match (&a.content, &b.content) {
        (
            BoxContent::Atomic { label: la, name: na, .. },
            BoxContent::Atomic { label: lb, name: nb, .. },
        ) => la == lb && na == nb,
        (BoxContent::Nested { name: na, inner: ia }, BoxContent::Nested { name: nb, inner: ib }) => {
            na == nb && brute_isomorphic(ia, ib)
        }
        _ => false,
    }
}

type Edge = (Source, Target);

fn mapped_wires(d: &WiringDiagram, map: &BTreeMap<BoxId, BoxId>) -> BTreeSet<Edge> {
    d.wires()
        .iter()
        .map(|w| {
            let s = match w.src {
                Source::BoxOut(b, j) => Source::BoxOut(map[&b], j),
                s => s,
            };
            let t = match w.tgt {
                Target::BoxIn(b, i) => Target::BoxIn(map[&b], i),
                t => t,
            };
            (s, t)
        })
        .collect()
}

/// Isomorphism by trying every label-respecting bijection of boxes.
/// Outer ports are fixed; element values and call data are ignored.
pub fn brute_isomorphic(a: &WiringDiagram, b: &WiringDiagram) -> bool {
    if a.inputs() != b.inputs()
        || a.outputs() != b.outputs()
        || a.box_count() != b.box_count()
        || a.wires().len() != b.wires().len()
    {
        return false;
    }
    let ids_a: Vec<BoxId> = a.boxes().keys().copied().collect();
    let ids_b: Vec<BoxId> = b.boxes().keys().copied().collect();
    let target: BTreeSet<Edge> = b.wires().iter().map(|w| (w.src, w.tgt)).collect();
    let mut map = BTreeMap::new();
    let mut used = vec![false; ids_b.len()];
    search(a, b, &ids_a, &ids_b, 0, &mut map, &mut used, &target)
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &WiringDiagram,
    b: &WiringDiagram,
    ids_a: &[BoxId],
    ids_b: &[BoxId],
    i: usize,
    map: &mut BTreeMap<BoxId, BoxId>,
    used: &mut [bool],
    target: &BTreeSet<Edge>,
) -> bool {
    if i == ids_a.len() {
        return mapped_wires(a, map) == *target;
    }
    let x = ids_a[i];
    for (j, y) in ids_b.iter().enumerate() {
        if used[j] || !same_node(&a.boxes()[&x], &b.boxes()[y]) {
            continue;
        }
        used[j] = true;
        map.insert(x, *y);
        if search(a, b, ids_a, ids_b, i + 1, map, used, target) {
            return true;
        }
        map.remove(&x);
        used[j] = false;
    }
    false
}

// ------------------------------------------------------------- subtyping

/// Reflexive-transitive closure by Floyd–Warshall over an index matrix.
pub fn closure_matrix(basics: &[String], edges: &[(String, String)]) -> Vec<Vec<bool>> {
    let n = basics.len();
    let idx = |s: &str| basics.iter().position(|b| b == s).expect("known basic");
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in edges {
        m[idx(a)][idx(b)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] && m[k][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    m
}

/// Structural subtyping over the closure matrix.
pub fn leq_oracle(basics: &[String], m: &[Vec<bool>], x: &ObType, y: &ObType) -> bool {
    let idx = |s: &str| basics.iter().position(|b| b == s);
    match (x, y) {
        (ObType::Unit, ObType::Unit) => true,
        (ObType::Basic(a), ObType::Basic(b)) => match (idx(a), idx(b)) {
            (Some(i), Some(j)) => m[i][j],
            _ => a == b,
        },
        (ObType::Product(xs), ObType::Product(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, q)| leq_oracle(basics, m, p, q))
        }
        (ObType::Hom(d1, c1), ObType::Hom(d2, c2)) => {
            leq_oracle(basics, m, d2, d1) && leq_oracle(basics, m, c1, c2)
        }
        _ => false,
    }
}

// ----------------------------------------------------------------- terms

fn flat(ports: Vec<ObType>) -> ObType {
    match ports.len() {
        0 => ObType::Unit,
        1 => ports.into_iter().next().expect("one"),
        _ => ObType::Product(ports),
    }
}

fn factors(t: &ObType) -> Vec<ObType> {
    match t {
        ObType::Unit => vec![],
        ObType::Product(fs) => fs.iter().flat_map(factors).collect(),
        ObType::Hom(d, c) => vec![ObType::Hom(Box::new(norm(d)), Box::new(norm(c)))],
        t => vec![t.clone()],
    }
}

fn norm(t: &ObType) -> ObType {
    flat(factors(t))
}

/// Type of a term by structural recursion, with exact type matching at
/// composition. `None` when ill typed.
pub fn infer_oracle(t: &MorTerm, gens: &BTreeMap<String, (ObType, ObType)>) -> Option<(ObType, ObType)> {
    let pair = |x: &ObType, y: &ObType| Some((norm(x), norm(y)));
    match t {
        MorTerm::Generator(id) => gens.get(id).and_then(|(d, c)| pair(d, c)),
        MorTerm::Id(x) => pair(x, x),
        MorTerm::Compose(ts) => {
            let mut it = ts.iter();
            let (dom, mut cod) = infer_oracle(it.next()?, gens)?;
            for next in it {
                let (d, c) = infer_oracle(next, gens)?;
                if d != cod {
                    return None;
                }
                cod = c;
            }
            Some((dom, cod))
        }
        MorTerm::Product(ts) => {
            let mut d = Vec::new();
            let mut c = Vec::new();
            for x in ts {
                let (dx, cx) = infer_oracle(x, gens)?;
                d.extend(factors(&dx));
                c.extend(factors(&cx));
            }
            Some((flat(d), flat(c)))
        }
        MorTerm::Braid(x, y) => Some((
            flat([factors(x), factors(y)].concat()),
            flat([factors(y), factors(x)].concat()),
        )),
        MorTerm::Copy(x) => Some((norm(x), flat([factors(x), factors(x)].concat()))),
        MorTerm::Delete(x) => Some((norm(x), ObType::Unit)),
        MorTerm::Coerce(x, y) => (norm(x) == norm(y)).then(|| (norm(x), norm(y))),
        MorTerm::Curry { term, w, x, y } => {
            let (d, c) = infer_oracle(term, gens)?;
            let want = flat([factors(w), factors(x)].concat());
            (d == want && c == norm(y)).then(|| (norm(w), ObType::Hom(Box::new(norm(x)), Box::new(norm(y)))))
        }
        MorTerm::Uncurry { term, w, x, y } => {
            let (d, c) = infer_oracle(term, gens)?;
            let hom = ObType::Hom(Box::new(norm(x)), Box::new(norm(y)));
            (d == norm(w) && c == hom).then(|| (flat([factors(w), factors(x)].concat()), norm(y)))
        }
    }
}

// ------------------------------------------------------------- diagrams

/// Sequential composite by concatenating wire lists: `g`'s boxes are
/// renumbered past `f`'s, and each wire out of `g`'s k-th input is rerouted
/// to whatever fed `f`'s k-th output.
pub fn glue(f: &WiringDiagram, g: &WiringDiagram) -> WiringDiagram {
    let offset = f.boxes().keys().map(|b| b.0 + 1).max().unwrap_or(0);
    let shift = |b: BoxId| BoxId(b.0 + offset);
    let mut out = WiringDiagram::new(f.inputs().to_vec(), g.outputs().to_vec());
    for (id, b) in f.boxes() {
        out.insert_box(*id, b.clone());
    }
    for (id, b) in g.boxes() {
        out.insert_box(shift(*id), b.clone());
    }
    let mut mid = BTreeMap::new();
    for w in f.wires() {
        match w.tgt {
            Target::OuterOut(k) => {
                mid.insert(k, w.src);
            }
            t => out.add_wire(w.src, t),
        }
    }
    for w in g.wires() {
        let s = match w.src {
            Source::OuterIn(k) => mid[&k],
            Source::BoxOut(b, j) => Source::BoxOut(shift(b), j),
        };
        let t = match w.tgt {
            Target::BoxIn(b, i) => Target::BoxIn(shift(b), i),
            t => t,
        };
        out.add_wire(s, t);
    }
    out
}

/// Substitute every box at once. `repl[b]` must have `b`'s boundary.
pub fn substitute_all(d: &WiringDiagram, repl: &BTreeMap<BoxId, WiringDiagram>) -> WiringDiagram {
    let mut fresh: BTreeMap<(BoxId, BoxId), BoxId> = BTreeMap::new();
    let mut out = WiringDiagram::new(d.inputs().to_vec(), d.outputs().to_vec());
    let mut next = 0;
    for (b, r) in repl {
        for (c, block) in r.boxes() {
            fresh.insert((*b, *c), BoxId(next));
            out.insert_box(BoxId(next), block.clone());
            next += 1;
        }
    }
    fn resolve(
        d: &WiringDiagram,
        repl: &BTreeMap<BoxId, WiringDiagram>,
        fresh: &BTreeMap<(BoxId, BoxId), BoxId>,
        s: Source,
    ) -> Source {
        match s {
            Source::OuterIn(k) => Source::OuterIn(k),
            Source::BoxOut(b, j) => match repl[&b].source_of(Target::OuterOut(j)).expect("wired") {
                Source::BoxOut(c, m) => Source::BoxOut(fresh[&(b, c)], m),
                Source::OuterIn(i) => {
                    resolve(d, repl, fresh, d.source_of(Target::BoxIn(b, i)).expect("wired"))
                }
            },
        }
    }
    for (b, r) in repl {
        for w in r.wires() {
            let Target::BoxIn(c, m) = w.tgt else { continue };
            let s = match w.src {
                Source::BoxOut(c2, m2) => Source::BoxOut(fresh[&(*b, c2)], m2),
                Source::OuterIn(i) => resolve(d, repl, &fresh, d.source_of(Target::BoxIn(*b, i)).expect("wired")),
            };
            out.add_wire(s, Target::BoxIn(fresh[&(*b, c)], m));
        }
    }
    for w in d.wires() {
        if let Target::OuterOut(k) = w.tgt {
            out.add_wire(resolve(d, repl, &fresh, w.src), Target::OuterOut(k));
        }
    }
    out
}

/// Boundary of `set` by scanning every wire: the types of the distinct
/// outside sources read inside, and of the distinct inside sources read
/// outside, each sorted.
pub fn cut_types(d: &WiringDiagram, set: &BTreeSet<BoxId>) -> (Vec<PortType>, Vec<PortType>) {
    let inside = |s: &Source| matches!(s, Source::BoxOut(b, _) if set.contains(b));
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for w in d.wires() {
        let tgt_inside = matches!(w.tgt, Target::BoxIn(b, _) if set.contains(&b));
        if !inside(&w.src) && tgt_inside {
            ins.insert(w.src);
        }
        if inside(&w.src) && !tgt_inside {
            outs.insert(w.src);
        }
    }
    let types = |ss: BTreeSet<Source>| {
        let mut v: Vec<PortType> = ss.into_iter().map(|s| d.source_type(s).cloned().expect("typed")).collect();
        v.sort();
        v
    };
    (types(ins), types(outs))
}

/// Atomic boxes at any depth.
pub fn leaf_count(d: &WiringDiagram) -> usize {
    d.boxes()
        .values()
        .map(|b| match &b.content {
            BoxContent::Atomic { .. } => 1,
            BoxContent::Nested { inner, .. } => leaf_count(inner),
        })
        .sum()
}

/// Whether `set` is convex, by checking every outside box for a path from
/// the set into it and from it back into the set.
pub fn convex_oracle(d: &WiringDiagram, set: &BTreeSet<BoxId>) -> bool {
    let mut reach: BTreeMap<BoxId, BTreeSet<BoxId>> = BTreeMap::new();
    for b in d.boxes().keys() {
        let mut seen = BTreeSet::new();
        let mut stack = vec![*b];
        while let Some(x) = stack.pop() {
            for w in d.wires() {
                if let (Source::BoxOut(p, _), Target::BoxIn(q, _)) = (w.src, w.tgt) {
                    if p == x && seen.insert(q) {
                        stack.push(q);
                    }
                }
            }
        }
        reach.insert(*b, seen);
    }
    d.boxes().keys().filter(|b| !set.contains(b)).all(|o| {
        let from_set = set.iter().any(|s| reach[s].contains(o));
        let to_set = set.iter().any(|s| reach[o].contains(s));
        !(from_set && to_set)
    })
}

/// Every subset of boxes that is convex, for diagrams small enough to
/// enumerate.
pub fn convex_subsets(d: &WiringDiagram) -> Vec<BTreeSet<BoxId>> {
    let ids: Vec<BoxId> = d.boxes().keys().copied().collect();
    assert!(ids.len() <= 12, "too many boxes to enumerate");
    (1u32..(1 << ids.len()))
        .map(|mask| ids.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, b)| *b).collect())
        .filter(|s| convex_oracle(d, s))
        .collect()
}

/// Labeled boxes with their wiring, where any route through unlabeled
/// boxes counts as a single edge. Nodes are described by
/// (label, name, inputs, outputs); edges by node index and port.
pub type Collapsed = (Vec<(String, String, Vec<PortType>, Vec<PortType>)>, BTreeSet<((usize, usize), (usize, usize))>);

/// Collapse unlabeled regions: an edge joins labeled output `(a, j)` to
/// labeled input `(b, i)` when a wire joins them directly or when `(a, j)`
/// feeds an unlabeled box that is connected, through wires among unlabeled
/// boxes in either direction, to one that feeds `(b, i)`.
pub fn collapsed_labeled(d: &WiringDiagram) -> Collapsed {
    let labeled: Vec<BoxId> = d.boxes().iter().filter(|(_, b)| b.label().is_some()).map(|(id, _)| *id).collect();
    let idx: BTreeMap<BoxId, usize> = labeled.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let dark = |b: &BoxId| d.boxes().contains_key(b) && !idx.contains_key(b);
    let region = |start: BoxId| {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for w in d.wires() {
                if let (Source::BoxOut(p, _), Target::BoxIn(q, _)) = (w.src, w.tgt) {
                    for (from, to) in [(p, q), (q, p)] {
                        if from == x && dark(&to) && seen.insert(to) {
                            stack.push(to);
                        }
                    }
                }
            }
        }
        seen
    };
    let mut edges = BTreeSet::new();
    for w in d.wires() {
        let (Source::BoxOut(a, j), Target::BoxIn(b, i)) = (w.src, w.tgt) else {
            continue;
        };
        let Some(&ia) = idx.get(&a) else { continue };
        if let Some(&ib) = idx.get(&b) {
            edges.insert(((ia, j), (ib, i)));
            continue;
        }
        let r = region(b);
        for w2 in d.wires() {
            if let (Source::BoxOut(p, _), Target::BoxIn(q, m)) = (w2.src, w2.tgt) {
                if r.contains(&p) {
                    if let Some(&iq) = idx.get(&q) {
                        edges.insert(((ia, j), (iq, m)));
                    }
                }
            }
        }
    }
    let nodes = labeled
        .iter()
        .map(|id| {
            let b = &d.boxes()[id];
            (b.label().unwrap_or("").to_string(), b.name().to_string(), b.inputs.clone(), b.outputs.clone())
        })
        .collect();
    (nodes, edges)
}

/// Whether two collapsed graphs are equal under some relabeling of nodes.
pub fn collapsed_isomorphic(a: &Collapsed, b: &Collapsed) -> bool {
    if a.0.len() != b.0.len() || a.1.len() != b.1.len() {
        return false;
    }
    fn go(a: &Collapsed, b: &Collapsed, i: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if i == a.0.len() {
            let mapped: BTreeSet<_> = a.1.iter().map(|((x, j), (y, k))| ((map[*x], *j), (map[*y], *k))).collect();
            return mapped == b.1;
        }
        for j in 0..b.0.len() {
            if used[j] || a.0[i] != b.0[j] {
                continue;
            }
            used[j] = true;
            map.push(j);
            if go(a, b, i + 1, map, used) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    go(a, b, 0, &mut Vec::new(), &mut vec![false; b.0.len()])
}

// ---------------------------------------------------------------- traces

/// Top-level variable table after replaying assigns and deletes in order,
/// skipping events inside user-defined calls.
pub fn replay_variables(events: &[TraceEvent]) -> BTreeMap<String, Option<String>> {
    let mut vars = BTreeMap::new();
    let mut user_depth = 0usize;
    let mut open: Vec<bool> = Vec::new();
    for e in events {
        match e {
            TraceEvent::CallBegin(b) => {
                open.push(b.user_defined);
                if b.user_defined {
                    user_depth += 1;
                }
            }
            TraceEvent::CallReturn(_) => {
                if open.pop() == Some(true) {
                    user_depth -= 1;
                }
            }
            TraceEvent::Assign { name, object_id } if user_depth == 0 => {
                vars.insert(name.clone(), object_id.clone());
            }
            TraceEvent::Delete { name } if user_depth == 0 => {
                vars.remove(name);
            }
            _ => {}
        }
    }
    vars
}

/// Number of call-begin events for calls that are not user defined.
pub fn library_call_count(events: &[TraceEvent]) -> usize {
    events
        .iter()
        .filter(|e| matches!(e, TraceEvent::CallBegin(b) if !b.user_defined))
        .count()
}

/// Deepest nesting of user-defined calls.
pub fn user_depth(events: &[TraceEvent]) -> usize {
    let mut open: Vec<bool> = Vec::new();
    let mut best = 0;
    for e in events {
        match e {
            TraceEvent::CallBegin(b) => {
                open.push(b.user_defined);
                best = best.max(open.iter().filter(|u| **u).count());
            }
            TraceEvent::CallReturn(_) => {
                open.pop();
            }
            _ => {}
        }
    }
    best
}

// ----------------------------------------------------------- annotations

/// Annotation lookup by scanning every annotation: member calls take the
/// matches owned by the earliest lineage class, other calls the matches on
/// package. `Err` carries the ids when more than one ties.
pub fn scan_annotation<'a>(
    o: &'a Ontology,
    key: &ConcreteCallKey,
    lineage: &[String],
) -> Result<Option<&'a FunctionAnnotation>, Vec<String>> {
    let all: Vec<&FunctionAnnotation> = o
        .function_annotations()
        .values()
        .filter(|a| a.language == key.language && a.function == key.name && a.kind == key.kind)
        .collect();
    let pick = |found: Vec<&'a FunctionAnnotation>| match found.len() {
        0 => Ok(None),
        1 => Ok(Some(found[0])),
        _ => Err(found.iter().map(|a| a.id.clone()).collect()),
    };
    if key.kind.is_member() {
        for class in lineage {
            let found: Vec<_> = all.iter().copied().filter(|a| a.owner_type.as_deref() == Some(class)).collect();
            if !found.is_empty() {
                return pick(found);
            }
        }
        Ok(None)
    } else {
        pick(all.into_iter().filter(|a| a.package == key.package).collect())
    }
}
