//! Replaying a trace into a raw flow graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{method_homogenize, Arg, CallBegin, CallReturn, TraceError, TraceEvent};
use crate::concrete::{qualify_type, CallSite, ResultSlot};
use crate::diagram::{Block, BoxId, ElementValue, PortType, Source, Target, WiringDiagram};

/// What a variable name points at within one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBinding {
    /// Output endpoint holding the value, when known.
    pub source: Option<Source>,
    pub object_id: Option<String>,
}

#[derive(Debug, Default)]
struct Frame {
    diagram: WiringDiagram,
    vars: BTreeMap<String, VarBinding>,
    objects: BTreeMap<String, Source>,
    free_inputs: BTreeMap<String, usize>,
    /// Inputs created for values first seen inside this frame, with what
    /// the parent needs to resolve them.
    free_args: Vec<(usize, Arg)>,
    /// Returned values of the last finished call, for assigns that carry no
    /// object id.
    pending: VecDeque<Source>,
}

#[derive(Debug)]
enum Open {
    Atomic {
        call_id: u64,
        box_id: BoxId,
        begin: CallBegin,
    },
    User {
        call_id: u64,
        begin: CallBegin,
        sources: Vec<Source>,
    },
}

impl Open {
    fn call_id(&self) -> u64 {
        match self {
            Open::Atomic { call_id, .. } | Open::User { call_id, .. } => *call_id,
        }
    }
}

fn port_type(language: &str, concrete: Option<&str>) -> PortType {
    match concrete {
        Some(c) => PortType::labeled(qualify_type(language, c)),
        None => PortType::Unlabeled,
    }
}

fn element(object_id: Option<&str>, value_repr: Option<&str>, concrete: Option<&str>) -> ElementValue {
    ElementValue {
        object_id: object_id.map(str::to_string),
        value_repr: value_repr.map(str::to_string),
        concrete_type_name: concrete.map(str::to_string),
    }
}

fn slot_name(a: &Arg, position: usize) -> String {
    a.slot.clone().unwrap_or_else(|| position.to_string())
}

impl Frame {
    fn with_inputs(language: &str, args: &[Arg]) -> Frame {
        let mut f = Frame::default();
        for (i, a) in args.iter().enumerate() {
            let k = f.diagram.add_input(port_type(language, a.concrete_type.as_deref()));
            debug_assert_eq!(k, i);
            f.diagram.set_element(
                Source::OuterIn(k),
                element(a.object_id.as_deref(), a.value_repr.as_deref(), a.concrete_type.as_deref()),
            );
            if let Some(obj) = &a.object_id {
                f.objects.entry(obj.clone()).or_insert(Source::OuterIn(k));
            }
        }
        f
    }

    /// Object table, then variable table, else a fresh outer input.
    fn resolve(&mut self, language: &str, a: &Arg) -> Source {
        if let Some(src) = a.object_id.as_ref().and_then(|o| self.objects.get(o)) {
            return *src;
        }
        if let Some(src) = a.var.as_ref().and_then(|v| self.vars.get(v)).and_then(|b| b.source) {
            return src;
        }
        let key = match (&a.object_id, &a.var) {
            (Some(o), _) => Some(format!("obj:{o}")),
            (None, Some(v)) => Some(format!("var:{v}")),
            _ => None,
        };
        if let Some(k) = key.as_ref().and_then(|k| self.free_inputs.get(k)) {
            return Source::OuterIn(*k);
        }
        let k = self.diagram.add_input(port_type(language, a.concrete_type.as_deref()));
        let src = Source::OuterIn(k);
        self.diagram.set_element(
            src,
            element(a.object_id.as_deref(), a.value_repr.as_deref(), a.concrete_type.as_deref()),
        );
        if let Some(key) = key {
            self.free_inputs.insert(key, k);
        }
        if let Some(o) = &a.object_id {
            self.objects.insert(o.clone(), src);
        }
        self.free_args.push((k, a.clone()));
        src
    }

    /// Record new versions of objects after a call and hand returns to the
    /// next assign.
    fn produced(&mut self, outputs: &[(Source, Option<String>)], returned: &[Source]) {
        for (src, obj) in outputs {
            if let Some(o) = obj {
                self.objects.insert(o.clone(), *src);
                for b in self.vars.values_mut() {
                    if b.object_id.as_deref() == Some(o.as_str()) {
                        b.source = Some(*src);
                    }
                }
            }
        }
        self.pending = returned.iter().copied().collect();
    }
}

/// One output port of a finished call, merging aliases of the same object.
struct OutPort {
    object_id: Option<String>,
    concrete: Option<String>,
    value_repr: Option<String>,
    results: Vec<ResultSlot>,
    /// Index into the call's argument list, for mutated inputs.
    arg: Option<usize>,
}

/// Returns first, then mutated inputs in slot order.
fn output_ports(begin: &CallBegin, ret: &CallReturn) -> Vec<OutPort> {
    let mut ports: Vec<OutPort> = Vec::new();
    let find = |ports: &[OutPort], obj: &Option<String>| {
        obj.as_ref()
            .and_then(|o| ports.iter().position(|p| p.object_id.as_ref() == Some(o)))
    };
    for (i, r) in ret.returns.iter().enumerate() {
        match find(&ports, &r.object_id) {
            Some(j) => ports[j].results.push(ResultSlot::Return(i)),
            None => ports.push(OutPort {
                object_id: r.object_id.clone(),
                concrete: r.concrete_type.clone(),
                value_repr: r.value_repr.clone(),
                results: vec![ResultSlot::Return(i)],
                arg: None,
            }),
        }
    }
    let mutated: BTreeSet<&str> = ret.mutated.iter().map(String::as_str).collect();
    for (i, a) in begin.args.iter().enumerate() {
        let Some(o) = a.object_id.as_deref().filter(|o| mutated.contains(o)) else {
            continue;
        };
        let slot = ResultSlot::Mutated(slot_name(a, i));
        match find(&ports, &a.object_id) {
            Some(j) => {
                if ports[j].arg.is_none() && !ports[j].results.iter().any(|r| matches!(r, ResultSlot::Mutated(_))) {
                    ports[j].arg = Some(i);
                    ports[j].results.push(slot);
                }
            }
            None => ports.push(OutPort {
                object_id: Some(o.to_string()),
                concrete: a.concrete_type.clone(),
                value_repr: None,
                results: vec![slot],
                arg: Some(i),
            }),
        }
    }
    ports
}

/// Incremental raw-graph construction, one event at a time.
#[derive(Debug)]
pub struct RawGraphBuilder {
    frames: Vec<Frame>,
    open: Vec<Open>,
    seen: BTreeSet<u64>,
}

impl Default for RawGraphBuilder {
    fn default() -> Self {
        RawGraphBuilder::new()
    }
}

impl RawGraphBuilder {
    pub fn new() -> Self {
        RawGraphBuilder {
            frames: vec![Frame::default()],
            open: Vec::new(),
            seen: BTreeSet::new(),
        }
    }

    /// Number of diagrams under construction: one per open user-defined
    /// call plus the top level.
    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    /// Variable table of the innermost frame.
    pub fn variables(&self) -> &BTreeMap<String, VarBinding> {
        &self.top().vars
    }

    fn top(&self) -> &Frame {
        self.frames.last().expect("top-level frame is never popped")
    }

    fn top_mut(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("top-level frame is never popped")
    }

    pub fn feed(&mut self, event: &TraceEvent) -> Result<(), TraceError> {
        match event {
            TraceEvent::CallBegin(b) => self.begin(method_homogenize(b.clone())),
            TraceEvent::CallReturn(r) => self.ret(r),
            TraceEvent::Assign { name, object_id } => {
                let f = self.top_mut();
                let source = match object_id.as_ref().and_then(|o| f.objects.get(o)) {
                    Some(src) => Some(*src),
                    None if object_id.is_none() => f.pending.pop_front(),
                    None => None,
                };
                f.vars.insert(
                    name.clone(),
                    VarBinding {
                        source,
                        object_id: object_id.clone(),
                    },
                );
                Ok(())
            }
            TraceEvent::Delete { name } => {
                self.top_mut().vars.remove(name);
                Ok(())
            }
            TraceEvent::Access { name, object_id } => {
                let f = self.top_mut();
                if let (Some(o), Some(src)) = (object_id, f.vars.get(name).and_then(|b| b.source)) {
                    f.objects.entry(o.clone()).or_insert(src);
                }
                Ok(())
            }
        }
    }

    fn begin(&mut self, b: CallBegin) -> Result<(), TraceError> {
        if !self.seen.insert(b.call_id) {
            return Err(TraceError::NestingViolation(format!("call id {} begins twice", b.call_id)));
        }
        let lang = b.function.language.clone();
        let f = self.top_mut();
        let sources: Vec<Source> = b.args.iter().map(|a| f.resolve(&lang, a)).collect();
        if b.user_defined {
            self.frames.push(Frame::with_inputs(&lang, &b.args));
            self.open.push(Open::User {
                call_id: b.call_id,
                begin: b,
                sources,
            });
            return Ok(());
        }
        let fun = &b.function;
        let name = fun.qualname.clone().unwrap_or_else(|| fun.name.clone());
        let label = format!("{}:{}:{}", fun.language, fun.package, name);
        let inputs: Vec<PortType> = sources
            .iter()
            .map(|s| f.diagram.source_type(*s).cloned().unwrap_or(PortType::Unlabeled))
            .collect();
        let site = CallSite {
            language: fun.language.clone(),
            package: fun.package.clone(),
            name: fun.name.clone(),
            kind: fun.kind,
            lineage: fun.lineage.clone(),
            args: b.args.iter().enumerate().map(|(i, a)| Some(slot_name(a, i))).collect(),
            results: vec![],
        };
        let id = f
            .diagram
            .add_box(Block::atomic(Some(label), name, inputs, vec![]).with_call(site));
        for (i, s) in sources.into_iter().enumerate() {
            f.diagram.add_wire(s, Target::BoxIn(id, i));
        }
        self.open.push(Open::Atomic {
            call_id: b.call_id,
            box_id: id,
            begin: b,
        });
        Ok(())
    }

    fn ret(&mut self, r: &CallReturn) -> Result<(), TraceError> {
        match self.open.last() {
            Some(o) if o.call_id() == r.call_id => {}
            Some(o) if self.open.iter().any(|x| x.call_id() == r.call_id) => {
                return Err(TraceError::NestingViolation(format!(
                    "call {} returns while call {} is still open",
                    r.call_id,
                    o.call_id()
                )))
            }
            _ => return Err(TraceError::DanglingReturn(r.call_id)),
        }
        match self.open.pop().expect("checked above") {
            Open::Atomic { box_id, begin, .. } => {
                self.finish_atomic(box_id, &begin, r);
                Ok(())
            }
            Open::User { begin, sources, .. } => {
                self.finish_user(&begin, sources, r);
                Ok(())
            }
        }
    }

    fn finish_atomic(&mut self, id: BoxId, begin: &CallBegin, r: &CallReturn) {
        let lang = &begin.function.language;
        let ports = output_ports(begin, r);
        let f = self.top_mut();
        let block = f.diagram.block_mut(id).expect("box added at call begin");
        let input_types = block.inputs.clone();
        block.outputs = ports
            .iter()
            .map(|p| match (&p.concrete, p.arg) {
                (Some(c), _) => port_type(lang, Some(c)),
                (None, Some(i)) => input_types[i].clone(),
                (None, None) => PortType::Unlabeled,
            })
            .collect();
        if let crate::diagram::BoxContent::Atomic { call: Some(site), .. } = &mut block.content {
            site.results = ports.iter().map(|p| p.results.clone()).collect();
        }
        let mut produced = Vec::new();
        let mut returned = Vec::new();
        for (j, p) in ports.iter().enumerate() {
            let src = Source::BoxOut(id, j);
            let value_repr = p.value_repr.clone().or_else(|| {
                p.arg.and_then(|i| begin.args[i].value_repr.clone())
            });
            f.diagram.set_element(
                src,
                element(p.object_id.as_deref(), value_repr.as_deref(), p.concrete.as_deref()),
            );
            produced.push((src, p.object_id.clone()));
            if p.results.iter().any(|s| matches!(s, ResultSlot::Return(_))) {
                returned.push(src);
            }
        }
        f.produced(&produced, &returned);
    }

    fn finish_user(&mut self, begin: &CallBegin, sources: Vec<Source>, r: &CallReturn) {
        let lang = begin.function.language.clone();
        let mut inner = self.frames.pop().expect("user frame pushed at begin");
        let ports = output_ports(begin, r);
        for p in &ports {
            let known = p.object_id.as_ref().and_then(|o| inner.objects.get(o)).copied();
            let src = match (known, p.arg) {
                (Some(s), _) => s,
                (None, Some(i)) => Source::OuterIn(i),
                (None, None) if p.object_id.is_none() && !inner.pending.is_empty() => {
                    inner.pending.pop_front().expect("non-empty")
                }
                (None, None) => inner.resolve(
                    &lang,
                    &Arg {
                        object_id: p.object_id.clone(),
                        concrete_type: p.concrete.clone(),
                        value_repr: p.value_repr.clone(),
                        ..Default::default()
                    },
                ),
            };
            let ty = inner.diagram.source_type(src).cloned().unwrap_or(PortType::Unlabeled);
            let k = inner.diagram.add_output(ty);
            inner.diagram.add_wire(src, Target::OuterOut(k));
        }
        let free_args = std::mem::take(&mut inner.free_args);
        let arity = begin.args.len();
        let fun = &begin.function;
        let name = fun.qualname.clone().unwrap_or_else(|| fun.name.clone());
        let parent = self.top_mut();
        let mut all_sources = sources;
        for (k, a) in free_args.iter().filter(|(k, _)| *k >= arity) {
            debug_assert_eq!(*k, all_sources.len());
            all_sources.push(parent.resolve(&lang, a));
        }
        let id = parent.diagram.add_box(Block::nested(name, inner.diagram));
        for (i, s) in all_sources.into_iter().enumerate() {
            parent.diagram.add_wire(s, Target::BoxIn(id, i));
        }
        let mut produced = Vec::new();
        let mut returned = Vec::new();
        for (j, p) in ports.iter().enumerate() {
            let src = Source::BoxOut(id, j);
            let value_repr = p
                .value_repr
                .clone()
                .or_else(|| p.arg.and_then(|i| begin.args[i].value_repr.clone()));
            parent.diagram.set_element(
                src,
                element(p.object_id.as_deref(), value_repr.as_deref(), p.concrete.as_deref()),
            );
            produced.push((src, p.object_id.clone()));
            if p.results.iter().any(|s| matches!(s, ResultSlot::Return(_))) {
                returned.push(src);
            }
        }
        parent.produced(&produced, &returned);
    }

    /// Close the top-level diagram: every unconsumed box output becomes an
    /// outer output, in box then port order.
    pub fn finish(mut self) -> Result<WiringDiagram, TraceError> {
        if let Some(o) = self.open.last() {
            return Err(TraceError::NestingViolation(format!("call {} never returns", o.call_id())));
        }
        let mut d = self.frames.pop().expect("top-level frame").diagram;
        let used: BTreeSet<Source> = d.wires().iter().map(|w| w.src).collect();
        let dangling: Vec<(Source, PortType)> = d
            .boxes()
            .iter()
            .flat_map(|(id, b)| {
                b.outputs
                    .iter()
                    .enumerate()
                    .map(move |(j, t)| (Source::BoxOut(*id, j), t.clone()))
            })
            .filter(|(s, _)| !used.contains(s))
            .collect();
        for (src, ty) in dangling {
            let k = d.add_output(ty);
            d.add_wire(src, Target::OuterOut(k));
        }
        Ok(d)
    }
}

/// Replay a whole trace.
pub fn build_raw_graph(events: &[TraceEvent]) -> Result<WiringDiagram, TraceError> {
    let mut b = RawGraphBuilder::new();
    for e in events {
        b.feed(e)?;
    }
    b.finish()
}
