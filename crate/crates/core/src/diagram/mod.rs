//! Wiring diagrams for morphisms in a cartesian category.
//!
//! A diagram has ordered outer input and output ports, a set of boxes with
//! ordered ports of their own, and wires from sources (outer inputs, box
//! outputs) to targets (box inputs, outer outputs). Copying and deleting are
//! implicit: a source may feed any number of wires, including none, while
//! every target receives exactly one.
//!
//! Observed runtime values ride along on source endpoints, which pairs each
//! wire with an element of its type.

mod canon;
mod dot;
mod json;
mod ops;
mod order;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::concrete::CallSite;

pub use canon::{
    canonicalize, is_isomorphic, labeled_isomorphic, labeled_substructure, port_graph,
    CanonicalForm, End, PortGraph,
};
pub use dot::to_dot;
pub use json::{from_json_str, from_json_value, to_json_string, to_json_value, JsonError};
pub use ops::{compose, encapsulate, flatten, product, substitute, topological_order};
pub(crate) use ops::{encapsulate_as, is_convex};
pub use order::{compatible, AnyOrder, Discrete, PortOrder};

/// Type carried by a port: a reference into a type table, or unknown.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortType {
    Labeled(String),
    Unlabeled,
}

impl PortType {
    pub fn labeled(s: impl Into<String>) -> Self {
        PortType::Labeled(s.into())
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            PortType::Labeled(s) => Some(s),
            PortType::Unlabeled => None,
        }
    }
}

impl fmt::Display for PortType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PortType::Labeled(s) => f.write_str(s),
            PortType::Unlabeled => f.write_str("?"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxId(pub u32);

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where a wire starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    OuterIn(usize),
    BoxOut(BoxId, usize),
}

/// Where a wire ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    BoxIn(BoxId, usize),
    OuterOut(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wire {
    pub src: Source,
    pub tgt: Target,
}

impl Wire {
    pub fn new(src: Source, tgt: Target) -> Self {
        Wire { src, tgt }
    }
}

/// An observed value. Only `object_id` carries identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ElementValue {
    pub object_id: Option<String>,
    pub value_repr: Option<String>,
    pub concrete_type_name: Option<String>,
}

impl ElementValue {
    pub fn same_object(&self, other: &ElementValue) -> bool {
        self.object_id.is_some() && self.object_id == other.object_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoxContent {
    /// An indecomposable computation. `label` references a function (an
    /// ontology concept or a concrete function); `None` means unknown.
    Atomic {
        label: Option<String>,
        name: String,
        call: Option<CallSite>,
    },
    Nested {
        name: String,
        inner: WiringDiagram,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub content: BoxContent,
    pub inputs: Vec<PortType>,
    pub outputs: Vec<PortType>,
}

impl Block {
    pub fn atomic(
        label: Option<String>,
        name: impl Into<String>,
        inputs: Vec<PortType>,
        outputs: Vec<PortType>,
    ) -> Self {
        Block {
            content: BoxContent::Atomic {
                label,
                name: name.into(),
                call: None,
            },
            inputs,
            outputs,
        }
    }

    /// An atomic box whose reference and display name coincide.
    pub fn labeled(label: &str, inputs: Vec<PortType>, outputs: Vec<PortType>) -> Self {
        Block::atomic(Some(label.to_string()), label, inputs, outputs)
    }

    /// A blank box: no reference, no display name.
    pub fn unlabeled(inputs: Vec<PortType>, outputs: Vec<PortType>) -> Self {
        Block::atomic(None, "", inputs, outputs)
    }

    pub fn nested(name: impl Into<String>, inner: WiringDiagram) -> Self {
        Block {
            inputs: inner.inputs.clone(),
            outputs: inner.outputs.clone(),
            content: BoxContent::Nested {
                name: name.into(),
                inner,
            },
        }
    }

    pub fn with_call(mut self, site: CallSite) -> Self {
        if let BoxContent::Atomic { call, .. } = &mut self.content {
            *call = Some(site);
        }
        self
    }

    pub fn label(&self) -> Option<&str> {
        match &self.content {
            BoxContent::Atomic { label, .. } => label.as_deref(),
            BoxContent::Nested { .. } => None,
        }
    }

    pub fn name(&self) -> &str {
        match &self.content {
            BoxContent::Atomic { name, .. } | BoxContent::Nested { name, .. } => name,
        }
    }

    pub fn call(&self) -> Option<&CallSite> {
        match &self.content {
            BoxContent::Atomic { call, .. } => call.as_ref(),
            BoxContent::Nested { .. } => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.content, BoxContent::Atomic { .. })
    }

    /// Atomic with no function reference.
    pub fn is_unlabeled(&self) -> bool {
        matches!(self.content, BoxContent::Atomic { label: None, .. })
    }

    /// Unlabeled and without a display name, the shape encapsulation produces.
    pub fn is_blank(&self) -> bool {
        matches!(&self.content, BoxContent::Atomic { label: None, name, .. } if name.is_empty())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("arity mismatch: expected {expected} ports, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("type mismatch at port {index}: {source_type} is not a subtype of {target_type}")]
    TypeMismatch {
        index: usize,
        source_type: PortType,
        target_type: PortType,
    },
    #[error("unknown box {0}")]
    UnknownBox(BoxId),
    #[error("subset is not convex: a path leaves it and re-enters")]
    NonConvexSubset,
    #[error("cannot encapsulate an empty subset")]
    EmptySubset,
    #[error("diagram contains a directed cycle")]
    Cycle,
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

/// A wiring diagram. Operations return new diagrams; the builder methods
/// below are for constructing one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WiringDiagram {
    pub(crate) inputs: Vec<PortType>,
    pub(crate) outputs: Vec<PortType>,
    pub(crate) boxes: BTreeMap<BoxId, Block>,
    pub(crate) wires: BTreeSet<Wire>,
    pub(crate) elements: BTreeMap<Source, ElementValue>,
}

impl WiringDiagram {
    pub fn new(inputs: Vec<PortType>, outputs: Vec<PortType>) -> Self {
        WiringDiagram {
            inputs,
            outputs,
            ..Default::default()
        }
    }

    /// The monoidal unit: no ports, no boxes.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Identity on the given port list.
    pub fn identity(types: Vec<PortType>) -> Self {
        let n = types.len();
        let mut d = WiringDiagram::new(types.clone(), types);
        for k in 0..n {
            d.add_wire(Source::OuterIn(k), Target::OuterOut(k));
        }
        d
    }

    /// A single box with its ports exposed in order.
    pub fn from_block(block: Block) -> Self {
        let mut d = WiringDiagram::new(block.inputs.clone(), block.outputs.clone());
        let (ni, no) = (block.inputs.len(), block.outputs.len());
        let id = d.add_box(block);
        for i in 0..ni {
            d.add_wire(Source::OuterIn(i), Target::BoxIn(id, i));
        }
        for j in 0..no {
            d.add_wire(Source::BoxOut(id, j), Target::OuterOut(j));
        }
        d
    }

    pub fn inputs(&self) -> &[PortType] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[PortType] {
        &self.outputs
    }

    pub fn boxes(&self) -> &BTreeMap<BoxId, Block> {
        &self.boxes
    }

    pub fn wires(&self) -> &BTreeSet<Wire> {
        &self.wires
    }

    pub fn elements(&self) -> &BTreeMap<Source, ElementValue> {
        &self.elements
    }

    pub fn block(&self, id: BoxId) -> Option<&Block> {
        self.boxes.get(&id)
    }

    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }

    pub fn next_box_id(&self) -> BoxId {
        BoxId(self.boxes.keys().next_back().map_or(0, |b| b.0 + 1))
    }

    pub fn add_box(&mut self, block: Block) -> BoxId {
        let id = self.next_box_id();
        self.boxes.insert(id, block);
        id
    }

    pub fn insert_box(&mut self, id: BoxId, block: Block) {
        self.boxes.insert(id, block);
    }

    pub fn add_input(&mut self, ty: PortType) -> usize {
        self.inputs.push(ty);
        self.inputs.len() - 1
    }

    pub fn add_output(&mut self, ty: PortType) -> usize {
        self.outputs.push(ty);
        self.outputs.len() - 1
    }

    pub fn add_wire(&mut self, src: Source, tgt: Target) {
        self.wires.insert(Wire { src, tgt });
    }

    pub fn set_element(&mut self, at: Source, value: ElementValue) {
        self.elements.insert(at, value);
    }

    pub fn set_input_type(&mut self, k: usize, ty: PortType) {
        self.inputs[k] = ty;
    }

    pub fn set_output_type(&mut self, k: usize, ty: PortType) {
        self.outputs[k] = ty;
    }

    pub fn block_mut(&mut self, id: BoxId) -> Option<&mut Block> {
        self.boxes.get_mut(&id)
    }

    /// Type of the port a wire starts from.
    pub fn source_type(&self, src: Source) -> Option<&PortType> {
        match src {
            Source::OuterIn(k) => self.inputs.get(k),
            Source::BoxOut(b, j) => self.boxes.get(&b)?.outputs.get(j),
        }
    }

    pub fn target_type(&self, tgt: Target) -> Option<&PortType> {
        match tgt {
            Target::OuterOut(k) => self.outputs.get(k),
            Target::BoxIn(b, i) => self.boxes.get(&b)?.inputs.get(i),
        }
    }

    /// The unique source feeding a target, if wired.
    pub fn source_of(&self, tgt: Target) -> Option<Source> {
        self.wires.iter().find(|w| w.tgt == tgt).map(|w| w.src)
    }

    pub fn targets_of(&self, src: Source) -> impl Iterator<Item = Target> + '_ {
        self.wires
            .iter()
            .filter(move |w| w.src == src)
            .map(|w| w.tgt)
    }

    /// Map from every wired target to its source.
    pub fn incoming(&self) -> BTreeMap<Target, Source> {
        self.wires.iter().map(|w| (w.tgt, w.src)).collect()
    }

    /// Number of atomic boxes, counting inside nested boxes.
    pub fn atomic_count(&self) -> usize {
        self.boxes
            .values()
            .map(|b| match &b.content {
                BoxContent::Atomic { .. } => 1,
                BoxContent::Nested { inner, .. } => inner.atomic_count(),
            })
            .sum()
    }

    /// Depth of box nesting; a flat diagram has depth 0.
    pub fn nesting_depth(&self) -> usize {
        self.boxes
            .values()
            .map(|b| match &b.content {
                BoxContent::Atomic { .. } => 0,
                BoxContent::Nested { inner, .. } => 1 + inner.nesting_depth(),
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_flat(&self) -> bool {
        self.boxes.values().all(Block::is_atomic)
    }

    /// Check structure, acyclicity and wire types under `order`.
    pub fn validate(&self, order: &dyn PortOrder) -> Result<(), DiagramError> {
        self.validate_structure()?;
        topological_order(self)?;
        for w in &self.wires {
            let s = self.source_type(w.src).expect("checked");
            let t = self.target_type(w.tgt).expect("checked");
            if !compatible(order, s, t) {
                let index = match w.tgt {
                    Target::BoxIn(_, i) | Target::OuterOut(i) => i,
                };
                return Err(DiagramError::TypeMismatch {
                    index,
                    source_type: s.clone(),
                    target_type: t.clone(),
                });
            }
        }
        for b in self.boxes.values() {
            if let BoxContent::Nested { inner, .. } = &b.content {
                if inner.inputs != b.inputs || inner.outputs != b.outputs {
                    return Err(DiagramError::Invalid(
                        "nested box ports differ from its inner diagram".into(),
                    ));
                }
                inner.validate(order)?;
            }
        }
        Ok(())
    }

    /// Endpoint references and the one-wire-per-target rule.
    pub fn validate_structure(&self) -> Result<(), DiagramError> {
        let mut seen = BTreeSet::new();
        for w in &self.wires {
            if self.source_type(w.src).is_none() {
                return Err(DiagramError::Invalid(format!("dangling source {:?}", w.src)));
            }
            if self.target_type(w.tgt).is_none() {
                return Err(DiagramError::Invalid(format!("dangling target {:?}", w.tgt)));
            }
            if !seen.insert(w.tgt) {
                return Err(DiagramError::Invalid(format!(
                    "target {:?} has more than one incoming wire",
                    w.tgt
                )));
            }
        }
        for (id, b) in &self.boxes {
            for i in 0..b.inputs.len() {
                if !seen.contains(&Target::BoxIn(*id, i)) {
                    return Err(DiagramError::Invalid(format!(
                        "input {i} of box {id} is not wired"
                    )));
                }
            }
        }
        for k in 0..self.outputs.len() {
            if !seen.contains(&Target::OuterOut(k)) {
                return Err(DiagramError::Invalid(format!("outer output {k} is not wired")));
            }
        }
        for src in self.elements.keys() {
            if self.source_type(*src).is_none() {
                return Err(DiagramError::Invalid(format!("element on missing port {src:?}")));
            }
        }
        Ok(())
    }

    /// Rename boxes through `f`, which must be injective.
    pub fn rename_boxes(&self, f: impl Fn(BoxId) -> BoxId) -> WiringDiagram {
        let src = |s: Source| match s {
            Source::BoxOut(b, j) => Source::BoxOut(f(b), j),
            s => s,
        };
        let tgt = |t: Target| match t {
            Target::BoxIn(b, i) => Target::BoxIn(f(b), i),
            t => t,
        };
        WiringDiagram {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            boxes: self.boxes.iter().map(|(b, x)| (f(*b), x.clone())).collect(),
            wires: self
                .wires
                .iter()
                .map(|w| Wire::new(src(w.src), tgt(w.tgt)))
                .collect(),
            elements: self
                .elements
                .iter()
                .map(|(s, e)| (src(*s), e.clone()))
                .collect(),
        }
    }

    /// Drop all element values.
    pub fn without_elements(&self) -> WiringDiagram {
        let mut d = self.clone();
        d.elements.clear();
        for b in d.boxes.values_mut() {
            if let BoxContent::Nested { inner, .. } = &mut b.content {
                *inner = inner.without_elements();
            }
        }
        d
    }
}
