//! Seeded random inputs: type DAGs and type expressions, acyclic wiring
//! diagrams drawn from a box catalog, well-typed cartesian terms and
//! rewrite pairs, and traces.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use semflow::concrete::{CallKind, CallSite, ResultSlot};
use semflow::diagram::{Block, BoxId, PortType, Source, Target, WiringDiagram};
use semflow::ontology::{MorTerm, ObType, Signature};
use semflow::trace::{Arg, CallBegin, CallReturn, FunctionRef, ReturnValue, TraceEvent};

use crate::Rng;

// ---------------------------------------------------------------- types

/// A random DAG on `n` basics named `t0..`: edges `(sub, super)`.
pub fn basic_dag(rng: &mut Rng, n: usize, density: f64) -> (Vec<String>, Vec<(String, String)>) {
    let mut names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    names.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    names.sort();
    (names, edges)
}

pub fn obtype(rng: &mut Rng, basics: &[String], depth: usize) -> ObType {
    let leaf = depth == 0 || rng.gen_bool(0.45);
    if leaf {
        if rng.gen_bool(0.08) {
            return ObType::Unit;
        }
        return ObType::basic(basics.choose(rng).expect("basics").clone());
    }
    if rng.gen_bool(0.6) {
        let n = rng.gen_range(2..=3);
        ObType::product((0..n).map(|_| obtype(rng, basics, depth - 1)).collect())
    } else {
        ObType::hom(obtype(rng, basics, depth - 1), obtype(rng, basics, depth - 1))
    }
}

/// A random type above (`up`) or below `t` under the basic relation
/// `leq[i][j]` over `basics`.
pub fn shift_type(rng: &mut Rng, t: &ObType, basics: &[String], leq: &[Vec<bool>], up: bool) -> ObType {
    match t {
        ObType::Basic(b) => {
            let i = basics.iter().position(|x| x == b).expect("known basic");
            let choices: Vec<usize> = (0..basics.len())
                .filter(|&j| if up { leq[i][j] } else { leq[j][i] })
                .collect();
            ObType::basic(basics[*choices.choose(rng).expect("reflexive")].clone())
        }
        ObType::Unit => ObType::Unit,
        ObType::Product(fs) => {
            ObType::product(fs.iter().map(|f| shift_type(rng, f, basics, leq, up)).collect())
        }
        ObType::Hom(d, c) => ObType::hom(
            shift_type(rng, d, basics, leq, !up),
            shift_type(rng, c, basics, leq, up),
        ),
    }
}

// ------------------------------------------------------------- diagrams

/// One kind of box a random diagram may contain.
#[derive(Debug, Clone)]
pub struct BoxKind {
    pub label: Option<String>,
    pub name: String,
    pub inputs: Vec<PortType>,
    pub outputs: Vec<PortType>,
    pub call: Option<CallSite>,
}

impl BoxKind {
    pub fn labeled(label: &str, inputs: &[&str], outputs: &[&str]) -> Self {
        BoxKind {
            label: Some(label.into()),
            name: label.into(),
            inputs: inputs.iter().map(|t| PortType::labeled(*t)).collect(),
            outputs: outputs.iter().map(|t| PortType::labeled(*t)).collect(),
            call: None,
        }
    }

    pub fn unlabeled(name: &str, inputs: &[&str], outputs: &[&str]) -> Self {
        BoxKind {
            label: None,
            ..BoxKind::labeled(name, inputs, outputs)
        }
    }

    /// A concrete Python function call box `python:pkg:<name>`, with
    /// positional slots `a0..` and one return per output.
    pub fn concrete(name: &str, inputs: &[&str], outputs: &[&str]) -> Self {
        let q = |t: &&str| PortType::labeled(format!("python:{t}"));
        BoxKind {
            label: Some(format!("python:pkg:{name}")),
            name: name.into(),
            inputs: inputs.iter().map(q).collect(),
            outputs: outputs.iter().map(q).collect(),
            call: Some(CallSite {
                language: "python".into(),
                package: "pkg".into(),
                name: name.into(),
                kind: CallKind::Function,
                lineage: vec![],
                args: (0..inputs.len()).map(|i| Some(format!("a{i}"))).collect(),
                results: (0..outputs.len()).map(|k| vec![ResultSlot::Return(k)]).collect(),
            }),
        }
    }

    pub fn block(&self) -> Block {
        let b = Block::atomic(self.label.clone(), self.name.clone(), self.inputs.clone(), self.outputs.clone());
        match &self.call {
            Some(c) => b.with_call(c.clone()),
            None => b,
        }
    }
}

/// A small catalog over two wire types `x`, `y` with a mix of labeled and
/// unlabeled boxes, zero-input producers for both types, and repeated
/// shapes so that symmetric diagrams are common.
pub fn structural_catalog() -> Vec<BoxKind> {
    vec![
        BoxKind::labeled("f", &["x"], &["x"]),
        BoxKind::labeled("g", &["x", "y"], &["y"]),
        BoxKind::labeled("h", &[], &["x"]),
        BoxKind::labeled("k", &["y"], &["x", "y"]),
        BoxKind::labeled("m", &["x", "x"], &["x"]),
        BoxKind::labeled("c", &[], &["y"]),
        BoxKind::unlabeled("u", &["x"], &["y"]),
        BoxKind::unlabeled("v", &["x", "y"], &["x"]),
        BoxKind::unlabeled("w", &["y"], &["y"]),
        BoxKind::unlabeled("", &["x"], &["x"]),
    ]
}

/// Shape of a random diagram's boundary.
#[derive(Debug, Clone)]
pub enum Boundary {
    /// Outer inputs are created on demand; dangling box outputs become outer
    /// outputs with probability one half.
    Free,
    Fixed(Vec<PortType>, Vec<PortType>),
}

fn pick_source(rng: &mut Rng, sources: &[(Source, PortType)], t: &PortType) -> Option<Source> {
    let c: Vec<Source> = sources.iter().filter(|(_, u)| u == t).map(|(s, _)| *s).collect();
    c.choose(rng).copied()
}

/// A random acyclic diagram with about `n_boxes` boxes from `catalog`.
///
/// Box inputs are fed from earlier sources of the same type; with a free
/// boundary a missing type becomes a new outer input. A fixed output whose
/// type has no source gets a zero-input producer from the catalog.
pub fn diagram(rng: &mut Rng, catalog: &[BoxKind], n_boxes: usize, boundary: &Boundary) -> WiringDiagram {
    let (mut d, free) = match boundary {
        Boundary::Free => (WiringDiagram::new(vec![], vec![]), true),
        Boundary::Fixed(i, o) => (WiringDiagram::new(i.clone(), o.clone()), false),
    };
    let mut sources: Vec<(Source, PortType)> =
        d.inputs().iter().enumerate().map(|(k, t)| (Source::OuterIn(k), t.clone())).collect();
    let mut consumed: Vec<Source> = Vec::new();
    for _ in 0..n_boxes {
        let usable: Vec<&BoxKind> = catalog
            .iter()
            .filter(|k| free || k.inputs.iter().all(|t| sources.iter().any(|(_, u)| u == t)))
            .collect();
        let kind = (*usable.choose(rng).expect("catalog has zero-input kinds")).clone();
        let id = d.add_box(kind.block());
        for (i, t) in kind.inputs.iter().enumerate() {
            let src = match pick_source(rng, &sources, t) {
                Some(s) if !free || rng.gen_bool(0.85) => s,
                _ => {
                    let k = d.add_input(t.clone());
                    sources.push((Source::OuterIn(k), t.clone()));
                    Source::OuterIn(k)
                }
            };
            d.add_wire(src, Target::BoxIn(id, i));
            consumed.push(src);
        }
        for (j, t) in kind.outputs.iter().enumerate() {
            sources.push((Source::BoxOut(id, j), t.clone()));
        }
    }
    match boundary {
        Boundary::Free => {
            let dangling: Vec<(Source, PortType)> = sources
                .iter()
                .filter(|(s, _)| matches!(s, Source::BoxOut(..)) && !consumed.contains(s))
                .cloned()
                .collect();
            for (s, t) in dangling {
                if rng.gen_bool(0.5) {
                    let k = d.add_output(t);
                    d.add_wire(s, Target::OuterOut(k));
                }
            }
        }
        Boundary::Fixed(_, outputs) => {
            for (k, t) in outputs.iter().enumerate() {
                let src = match pick_source(rng, &sources, t) {
                    Some(s) => s,
                    None => {
                        let kind = catalog
                            .iter()
                            .find(|c| c.inputs.is_empty() && c.outputs.contains(t))
                            .expect("catalog has a producer for every output type");
                        let id = d.add_box(kind.block());
                        for (j, u) in kind.outputs.iter().enumerate() {
                            sources.push((Source::BoxOut(id, j), u.clone()));
                        }
                        Source::BoxOut(id, kind.outputs.iter().position(|u| u == t).expect("found"))
                    }
                };
                d.add_wire(src, Target::OuterOut(k));
            }
        }
    }
    d
}

/// Random port-type list over the catalog's wire types.
pub fn port_types(rng: &mut Rng, types: &[&str], len: usize) -> Vec<PortType> {
    (0..len).map(|_| PortType::labeled(*types.choose(rng).expect("types"))).collect()
}

/// Replace some boxes by nested boxes holding random diagrams with the same
/// boundary, down to `depth` levels.
pub fn nest(rng: &mut Rng, d: &WiringDiagram, catalog: &[BoxKind], depth: usize) -> WiringDiagram {
    if depth == 0 {
        return d.clone();
    }
    let mut out = d.clone();
    let ids: Vec<BoxId> = d.boxes().keys().copied().collect();
    for id in ids {
        if !rng.gen_bool(0.4) {
            continue;
        }
        let b = &d.boxes()[&id];
        let boundary = Boundary::Fixed(b.inputs.clone(), b.outputs.clone());
        let n = rng.gen_range(1..=3);
        let inner = diagram(rng, catalog, n, &boundary);
        let inner = nest(rng, &inner, catalog, depth - 1);
        out.insert_box(id, Block::nested(format!("n{}", id.0), inner));
    }
    out
}

/// The same diagram under a random renumbering of its boxes.
pub fn shuffle_ids(rng: &mut Rng, d: &WiringDiagram) -> WiringDiagram {
    let ids: Vec<BoxId> = d.boxes().keys().copied().collect();
    let mut fresh: Vec<u32> = (0..ids.len() as u32).map(|i| i * 3 + 7).collect();
    fresh.shuffle(rng);
    let map: BTreeMap<BoxId, BoxId> = ids.iter().zip(fresh).map(|(a, b)| (*a, BoxId(b))).collect();
    d.rename_boxes(|b| map[&b])
}

/// A small structural change: move one wire to another source of the same
/// type, or swap the kinds of two boxes with the same shape. May produce an
/// isomorphic diagram.
pub fn perturb(rng: &mut Rng, d: &WiringDiagram, catalog: &[BoxKind]) -> WiringDiagram {
    let mut out = d.clone();
    let wires: Vec<_> = d.wires().iter().copied().collect();
    if !wires.is_empty() && rng.gen_bool(0.6) {
        let w = *wires.choose(rng).expect("non-empty");
        let t = d.target_type(w.tgt).cloned().expect("wired target");
        let tgt_box = match w.tgt {
            Target::BoxIn(b, _) => Some(b),
            Target::OuterOut(_) => None,
        };
        let order = semflow::diagram::topological_order(d).expect("acyclic");
        let before: Vec<BoxId> = match tgt_box {
            Some(b) => order.iter().take_while(|x| **x != b).copied().collect(),
            None => order.clone(),
        };
        let mut cands: Vec<Source> = (0..d.inputs().len())
            .filter(|k| d.inputs()[*k] == t)
            .map(Source::OuterIn)
            .collect();
        for b in before {
            for (j, u) in d.boxes()[&b].outputs.iter().enumerate() {
                if *u == t {
                    cands.push(Source::BoxOut(b, j));
                }
            }
        }
        if let Some(s) = cands.choose(rng) {
            out = rebuild_with(d, w.tgt, *s);
        }
        return out;
    }
    let ids: Vec<BoxId> = d.boxes().keys().copied().collect();
    if let Some(id) = ids.choose(rng) {
        let b = &d.boxes()[id];
        let same: Vec<&BoxKind> = catalog
            .iter()
            .filter(|k| k.inputs == b.inputs && k.outputs == b.outputs)
            .collect();
        if let Some(k) = same.choose(rng) {
            out.insert_box(*id, k.block());
        }
    }
    out
}

fn rebuild_with(d: &WiringDiagram, tgt: Target, src: Source) -> WiringDiagram {
    let mut out = WiringDiagram::new(d.inputs().to_vec(), d.outputs().to_vec());
    for (id, b) in d.boxes() {
        out.insert_box(*id, b.clone());
    }
    for w in d.wires() {
        if w.tgt == tgt {
            out.add_wire(src, tgt);
        } else {
            out.add_wire(w.src, w.tgt);
        }
    }
    out
}

/// Corpus of pairs over at most six boxes: renumberings, small
/// perturbations and unrelated diagrams of equal size.
pub fn iso_corpus(seed: u64, n: usize) -> Vec<(WiringDiagram, WiringDiagram)> {
    let cat = structural_catalog();
    let small: Vec<_> = cat.iter().filter(|k| ["f", "h", "u", ""].contains(&k.name.as_str())).cloned().collect();
    let mut r = crate::rng(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let c = if r.gen_bool(0.5) { &cat } else { &small };
        let boxes = r.gen_range(0..=6);
        let d = diagram(&mut r, c, boxes, &Boundary::Free);
        if d.box_count() > 6 {
            continue;
        }
        let e = match out.len() % 3 {
            0 => shuffle_ids(&mut r, &d),
            1 => {
                let p = perturb(&mut r, &d, c);
                shuffle_ids(&mut r, &p)
            }
            _ => {
                let e = diagram(&mut r, c, d.box_count(), &Boundary::Free);
                if e.box_count() > 6 {
                    continue;
                }
                e
            }
        };
        out.push((d, e));
    }
    out
}

// ---------------------------------------------------------------- terms

/// A signature over basics `a`, `b`, `c` with exact (discrete) subtyping.
#[derive(Debug, Clone)]
pub struct TermSig {
    pub gens: BTreeMap<String, (ObType, ObType)>,
}

impl TermSig {
    pub fn standard() -> Self {
        let b = ObType::basic;
        let mut gens = BTreeMap::new();
        gens.insert("f".to_string(), (b("a"), b("b")));
        gens.insert("g".to_string(), (b("b"), b("a")));
        gens.insert("h".to_string(), (ObType::product(vec![b("a"), b("b")]), b("c")));
        gens.insert("k".to_string(), (b("c"), ObType::product(vec![b("a"), b("a")])));
        gens.insert("e".to_string(), (b("a"), b("a")));
        gens.insert("z".to_string(), (ObType::Unit, b("c")));
        TermSig { gens }
    }

    pub fn basics(&self) -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }
}

impl Signature for TermSig {
    fn generator(&self, id: &str) -> Option<(ObType, ObType)> {
        self.gens.get(id).cloned()
    }

    fn leq(&self, a: &ObType, b: &ObType) -> bool {
        a == b
    }
}

fn ty(ports: &[ObType]) -> ObType {
    ObType::product(ports.to_vec())
}

#[derive(Clone, Copy)]
enum Step {
    Gen,
    Split,
    Compose,
    Copy,
    Delete,
    Braid,
    Id,
}

/// A random well-typed term with domain `dom` (listed by port); returns the
/// term and its codomain ports. Generators and composites dominate so that
/// terms produce diagrams with several boxes.
pub fn term_from(rng: &mut Rng, sig: &TermSig, dom: &[ObType], depth: usize) -> (MorTerm, Vec<ObType>) {
    let gens: Vec<(&String, &(ObType, ObType))> =
        sig.gens.iter().filter(|(_, (d, _))| d.ports() == dom).collect();
    let mut steps: Vec<(u32, Step)> = vec![(1, Step::Id)];
    if !gens.is_empty() {
        steps.push((6, Step::Gen));
    }
    if depth > 0 {
        steps.push((4, Step::Compose));
        if dom.len() >= 2 {
            steps.push((5, Step::Split));
        }
    }
    match dom.len() {
        1 => steps.extend([(1, Step::Copy), (1, Step::Delete)]),
        2 => steps.push((1, Step::Braid)),
        _ => {}
    }
    let total: u32 = steps.iter().map(|(w, _)| w).sum();
    let mut roll = rng.gen_range(0..total);
    let step = steps
        .iter()
        .find(|(w, _)| {
            if roll < *w {
                true
            } else {
                roll -= w;
                false
            }
        })
        .map(|(_, s)| *s)
        .expect("roll is below the total");
    match step {
        Step::Gen => {
            let (id, (_, cod)) = gens.choose(rng).expect("non-empty");
            (MorTerm::generator(id.as_str()), cod.ports())
        }
        Step::Split => {
            let cut = rng.gen_range(1..dom.len());
            let (t1, c1) = term_from(rng, sig, &dom[..cut], depth - 1);
            let (t2, c2) = term_from(rng, sig, &dom[cut..], depth - 1);
            (MorTerm::product(vec![t1, t2]), [c1, c2].concat())
        }
        Step::Compose => {
            let (t1, c1) = term_from(rng, sig, dom, depth - 1);
            let (t2, c2) = term_from(rng, sig, &c1, depth - 1);
            (MorTerm::compose(vec![t1, t2]), c2)
        }
        Step::Copy => (MorTerm::Copy(dom[0].clone()), vec![dom[0].clone(), dom[0].clone()]),
        Step::Delete => (MorTerm::Delete(dom[0].clone()), vec![]),
        Step::Braid => (
            MorTerm::Braid(dom[0].clone(), dom[1].clone()),
            vec![dom[1].clone(), dom[0].clone()],
        ),
        Step::Id => (MorTerm::Id(ty(dom)), dom.to_vec()),
    }
}

pub fn random_dom(rng: &mut Rng, sig: &TermSig) -> Vec<ObType> {
    let basics = sig.basics();
    let n = rng.gen_range(1..=2);
    (0..n).map(|_| ObType::basic(basics.choose(rng).expect("basics").clone())).collect()
}

/// Which law a rewrite pair instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    ComposeAssoc,
    ComposeUnitLeft,
    ComposeUnitRight,
    ProductAssoc,
    ProductUnit,
    Interchange,
}

pub const LAWS: [Law; 6] = [
    Law::ComposeAssoc,
    Law::ComposeUnitLeft,
    Law::ComposeUnitRight,
    Law::ProductAssoc,
    Law::ProductUnit,
    Law::Interchange,
];

/// Two terms related by one application of `law`, optionally inside a
/// random context. Both sides are well typed with the same signature.
pub fn rewrite_pair(rng: &mut Rng, sig: &TermSig, law: Law, depth: usize) -> (MorTerm, MorTerm) {
    let d = depth.max(1);
    let dom = random_dom(rng, sig);
    let (lhs, rhs, cod) = match law {
        Law::ComposeAssoc => {
            let (t1, c1) = term_from(rng, sig, &dom, d);
            let (t2, c2) = term_from(rng, sig, &c1, d);
            let (t3, c3) = term_from(rng, sig, &c2, d);
            (
                MorTerm::compose(vec![t1.clone(), MorTerm::compose(vec![t2.clone(), t3.clone()])]),
                MorTerm::compose(vec![MorTerm::compose(vec![t1, t2]), t3]),
                c3,
            )
        }
        Law::ComposeUnitLeft => {
            let (t, c) = term_from(rng, sig, &dom, d);
            (MorTerm::compose(vec![MorTerm::Id(ty(&dom)), t.clone()]), t, c)
        }
        Law::ComposeUnitRight => {
            let (t, c) = term_from(rng, sig, &dom, d);
            (MorTerm::compose(vec![t.clone(), MorTerm::Id(ty(&c))]), t, c)
        }
        Law::ProductAssoc => {
            let d2 = random_dom(rng, sig);
            let d3 = random_dom(rng, sig);
            let (f, c1) = term_from(rng, sig, &dom, d);
            let (g, c2) = term_from(rng, sig, &d2, d);
            let (h, c3) = term_from(rng, sig, &d3, d);
            (
                MorTerm::product(vec![f.clone(), MorTerm::product(vec![g.clone(), h.clone()])]),
                MorTerm::product(vec![MorTerm::product(vec![f, g]), h]),
                [c1, c2, c3].concat(),
            )
        }
        Law::ProductUnit => {
            let (f, c) = term_from(rng, sig, &dom, d);
            (MorTerm::product(vec![f.clone(), MorTerm::Id(ObType::Unit)]), f, c)
        }
        Law::Interchange => {
            let d2 = random_dom(rng, sig);
            let (f, cf) = term_from(rng, sig, &dom, d);
            let (h, ch) = term_from(rng, sig, &cf, d);
            let (g, cg) = term_from(rng, sig, &d2, d);
            let (k, ck) = term_from(rng, sig, &cg, d);
            (
                MorTerm::compose(vec![
                    MorTerm::product(vec![f.clone(), g.clone()]),
                    MorTerm::product(vec![h.clone(), k.clone()]),
                ]),
                MorTerm::product(vec![MorTerm::compose(vec![f, h]), MorTerm::compose(vec![g, k])]),
                [ch, ck].concat(),
            )
        }
    };
    if rng.gen_bool(0.5) {
        let (after, _) = term_from(rng, sig, &cod, d);
        (
            MorTerm::compose(vec![lhs, after.clone()]),
            MorTerm::compose(vec![rhs, after]),
        )
    } else {
        (lhs, rhs)
    }
}

// ---------------------------------------------------------------- traces

/// A random well-nested trace of function calls over a handful of variables,
/// with assigns, accesses, deletes and primitive literal arguments.
pub fn trace(rng: &mut Rng, n_calls: usize, max_depth: usize) -> Vec<TraceEvent> {
    let mut events = Vec::new();
    let mut next_call = 1u64;
    let mut next_obj = 1u64;
    let mut live: Vec<(String, String)> = Vec::new();
    emit_calls(rng, &mut events, &mut next_call, &mut next_obj, &mut live, n_calls, max_depth);
    events
}

fn emit_calls(
    rng: &mut Rng,
    events: &mut Vec<TraceEvent>,
    next_call: &mut u64,
    next_obj: &mut u64,
    live: &mut Vec<(String, String)>,
    n_calls: usize,
    depth: usize,
) -> Option<String> {
    let mut last = None;
    const VARS: [&str; 4] = ["x", "y", "df", "model"];
    for _ in 0..n_calls {
        let call_id = *next_call;
        *next_call += 1;
        let user = depth > 0 && rng.gen_bool(0.25);
        let n_args = rng.gen_range(0..=2);
        let mut args = Vec::new();
        for i in 0..n_args {
            if !live.is_empty() && rng.gen_bool(0.7) {
                let (name, obj) = live.choose(rng).expect("non-empty").clone();
                events.push(TraceEvent::Access {
                    name: name.clone(),
                    object_id: Some(obj.clone()),
                });
                args.push(Arg {
                    slot: Some(format!("p{i}")),
                    object_id: Some(obj),
                    concrete_type: Some("Obj".into()),
                    value_repr: None,
                    var: Some(name),
                });
            } else {
                args.push(Arg {
                    slot: Some(format!("p{i}")),
                    object_id: None,
                    concrete_type: Some("int".into()),
                    value_repr: Some(rng.gen_range(0..10).to_string()),
                    var: None,
                });
            }
        }
        let name = if user { format!("user{call_id}") } else { format!("fn{}", rng.gen_range(0..5)) };
        events.push(TraceEvent::CallBegin(CallBegin {
            call_id,
            function: FunctionRef {
                language: "python".into(),
                package: "pkg".into(),
                name,
                qualname: None,
                kind: CallKind::Function,
                lineage: vec![],
            },
            user_defined: user,
            args,
            receiver: None,
        }));
        let mut inner_result = None;
        if user {
            let inner = rng.gen_range(1..=3);
            let mut inner_live = Vec::new();
            inner_result = emit_calls(rng, events, next_call, next_obj, &mut inner_live, inner, depth - 1)
                .filter(|_| rng.gen_bool(0.8));
        }
        let obj = inner_result.unwrap_or_else(|| {
            *next_obj += 1;
            format!("0x{:04x}", *next_obj - 1)
        });
        last = Some(obj.clone());
        events.push(TraceEvent::CallReturn(CallReturn {
            call_id,
            returns: vec![ReturnValue {
                object_id: Some(obj.clone()),
                concrete_type: Some("Obj".into()),
                value_repr: None,
            }],
            mutated: vec![],
        }));
        if rng.gen_bool(0.8) {
            let name = VARS.choose(rng).expect("vars").to_string();
            events.push(TraceEvent::Assign {
                name: name.clone(),
                object_id: Some(obj.clone()),
            });
            live.retain(|(n, _)| *n != name);
            live.push((name, obj));
        }
        if !live.is_empty() && rng.gen_bool(0.1) {
            let i = rng.gen_range(0..live.len());
            let (name, _) = live.remove(i);
            events.push(TraceEvent::Delete { name });
        }
    }
    last
}
