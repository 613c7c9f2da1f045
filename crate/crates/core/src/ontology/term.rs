use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::{ObType, TermError};
use crate::diagram::{canonicalize, Block, PortType, Source, Target, WiringDiagram};

/// A morphism expression in the free cartesian closed category on the
/// ontology's generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MorTerm {
    Generator(String),
    Id(ObType),
    Compose(Vec<MorTerm>),
    Product(Vec<MorTerm>),
    Braid(ObType, ObType),
    Copy(ObType),
    Delete(ObType),
    Coerce(ObType, ObType),
    /// `term: W×X → Y` curried to `W → [X,Y]`.
    Curry {
        term: Box<MorTerm>,
        w: ObType,
        x: ObType,
        y: ObType,
    },
    /// `term: W → [X,Y]` uncurried to `W×X → Y`.
    Uncurry {
        term: Box<MorTerm>,
        w: ObType,
        x: ObType,
        y: ObType,
    },
}

/// What terms are typed against: generator signatures and a subtype test.
pub trait Signature {
    fn generator(&self, id: &str) -> Option<(ObType, ObType)>;
    fn leq(&self, a: &ObType, b: &ObType) -> bool;
}

impl MorTerm {
    pub fn generator(id: impl Into<String>) -> Self {
        MorTerm::Generator(id.into())
    }

    pub fn compose(terms: Vec<MorTerm>) -> Self {
        MorTerm::Compose(terms)
    }

    pub fn product(terms: Vec<MorTerm>) -> Self {
        MorTerm::Product(terms)
    }

    /// Generator ids used anywhere in the term.
    pub fn generators(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let MorTerm::Generator(id) = t {
                out.push(id.as_str());
            }
        });
        out
    }

    /// Every type written explicitly in the term.
    pub fn mentioned_types(&self) -> Vec<&ObType> {
        let mut out = Vec::new();
        self.visit(&mut |t| match t {
            MorTerm::Id(x) | MorTerm::Copy(x) | MorTerm::Delete(x) => out.push(x),
            MorTerm::Braid(x, y) | MorTerm::Coerce(x, y) => {
                out.push(x);
                out.push(y);
            }
            MorTerm::Curry { w, x, y, .. } | MorTerm::Uncurry { w, x, y, .. } => {
                out.extend([w, x, y]);
            }
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a MorTerm)) {
        f(self);
        match self {
            MorTerm::Compose(ts) | MorTerm::Product(ts) => ts.iter().for_each(|t| t.visit(f)),
            MorTerm::Curry { term, .. } | MorTerm::Uncurry { term, .. } => term.visit(f),
            _ => {}
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MorTerm::Compose(ts) | MorTerm::Product(ts) => {
                1 + ts.iter().map(MorTerm::depth).max().unwrap_or(0)
            }
            MorTerm::Curry { term, .. } | MorTerm::Uncurry { term, .. } => 1 + term.depth(),
            _ => 0,
        }
    }

    pub fn to_json(&self) -> Value {
        let closed = |tag: &str, term: &MorTerm, w: &ObType, x: &ObType, y: &ObType| {
            json!({ tag: { "term": term.to_json(), "w": w.to_json(), "x": x.to_json(), "y": y.to_json() } })
        };
        match self {
            MorTerm::Generator(id) => json!({ "generator": id }),
            MorTerm::Id(x) => json!({ "id": x.to_json() }),
            MorTerm::Compose(ts) => json!({ "compose": ts.iter().map(MorTerm::to_json).collect::<Vec<_>>() }),
            MorTerm::Product(ts) => json!({ "product": ts.iter().map(MorTerm::to_json).collect::<Vec<_>>() }),
            MorTerm::Braid(x, y) => json!({ "braid": [x.to_json(), y.to_json()] }),
            MorTerm::Copy(x) => json!({ "copy": x.to_json() }),
            MorTerm::Delete(x) => json!({ "delete": x.to_json() }),
            MorTerm::Coerce(x, y) => json!({ "coerce": [x.to_json(), y.to_json()] }),
            MorTerm::Curry { term, w, x, y } => closed("curry", term, w, x, y),
            MorTerm::Uncurry { term, w, x, y } => closed("uncurry", term, w, x, y),
        }
    }

    /// Parse the JSON term form. A bare string is a generator.
    pub fn from_json(v: &Value) -> Result<MorTerm, String> {
        let m = match v {
            Value::String(id) => return Ok(MorTerm::Generator(id.clone())),
            Value::Object(m) if m.len() == 1 => m,
            other => return Err(format!("not a term: {other}")),
        };
        let (tag, body) = m.iter().next().expect("one entry");
        let list = |body: &Value| -> Result<Vec<MorTerm>, String> {
            body.as_array()
                .ok_or_else(|| format!("\"{tag}\" expects an array"))?
                .iter()
                .map(MorTerm::from_json)
                .collect()
        };
        let pair = |body: &Value| -> Result<(ObType, ObType), String> {
            match body.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((ObType::from_json(a)?, ObType::from_json(b)?)),
                _ => Err(format!("\"{tag}\" expects two types")),
            }
        };
        let closed = |body: &Value| -> Result<(MorTerm, ObType, ObType, ObType), String> {
            let o: &Map<String, Value> = body
                .as_object()
                .ok_or_else(|| format!("\"{tag}\" expects an object"))?;
            let field = |k: &str| o.get(k).ok_or_else(|| format!("\"{tag}\" lacks \"{k}\""));
            if o.len() != 4 {
                return Err(format!("\"{tag}\" takes exactly term, w, x, y"));
            }
            Ok((
                MorTerm::from_json(field("term")?)?,
                ObType::from_json(field("w")?)?,
                ObType::from_json(field("x")?)?,
                ObType::from_json(field("y")?)?,
            ))
        };
        Ok(match tag.as_str() {
            "generator" => MorTerm::Generator(
                body.as_str()
                    .ok_or("\"generator\" expects a string")?
                    .to_string(),
            ),
            "id" => MorTerm::Id(ObType::from_json(body)?),
            "compose" => MorTerm::Compose(list(body)?),
            "product" => MorTerm::Product(list(body)?),
            "braid" => {
                let (x, y) = pair(body)?;
                MorTerm::Braid(x, y)
            }
            "copy" => MorTerm::Copy(ObType::from_json(body)?),
            "delete" => MorTerm::Delete(ObType::from_json(body)?),
            "coerce" => {
                let (x, y) = pair(body)?;
                MorTerm::Coerce(x, y)
            }
            "curry" => {
                let (term, w, x, y) = closed(body)?;
                MorTerm::Curry { term: Box::new(term), w, x, y }
            }
            "uncurry" => {
                let (term, w, x, y) = closed(body)?;
                MorTerm::Uncurry { term: Box::new(term), w, x, y }
            }
            other => return Err(format!("unknown term constructor {other:?}")),
        })
    }
}

impl Serialize for MorTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MorTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        MorTerm::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Domain and codomain of a term. Composition checks each codomain against
/// the next domain up to subtyping.
pub fn infer_type(t: &MorTerm, sig: &dyn Signature) -> Result<(ObType, ObType), TermError> {
    let not_sub = |a: &ObType, b: &ObType| TermError::NotASubtype {
        sub: a.to_string(),
        sup: b.to_string(),
    };
    Ok(match t {
        MorTerm::Generator(id) => sig
            .generator(id)
            .ok_or_else(|| TermError::UnknownGenerator(id.clone()))?,
        MorTerm::Id(x) => (x.clone().normalize(), x.clone().normalize()),
        MorTerm::Compose(ts) => {
            let mut iter = ts.iter();
            let first = iter.next().ok_or(TermError::EmptyComposite)?;
            let (dom, mut cod) = infer_type(first, sig)?;
            for (i, next) in iter.enumerate() {
                let (d, c) = infer_type(next, sig)?;
                if !sig.leq(&cod, &d) {
                    return Err(TermError::CompositionTypeError {
                        position: i + 1,
                        cod: cod.to_string(),
                        dom: d.to_string(),
                    });
                }
                cod = c;
            }
            (dom, cod)
        }
        MorTerm::Product(ts) => {
            let mut doms = Vec::new();
            let mut cods = Vec::new();
            for t in ts {
                let (d, c) = infer_type(t, sig)?;
                doms.push(d);
                cods.push(c);
            }
            (ObType::product(doms), ObType::product(cods))
        }
        MorTerm::Braid(x, y) => (
            ObType::product(vec![x.clone(), y.clone()]),
            ObType::product(vec![y.clone(), x.clone()]),
        ),
        MorTerm::Copy(x) => (
            x.clone().normalize(),
            ObType::product(vec![x.clone(), x.clone()]),
        ),
        MorTerm::Delete(x) => (x.clone().normalize(), ObType::Unit),
        MorTerm::Coerce(x, y) => {
            let (x, y) = (x.clone().normalize(), y.clone().normalize());
            if !sig.leq(&x, &y) {
                return Err(not_sub(&x, &y));
            }
            (x, y)
        }
        MorTerm::Curry { term, w, x, y } => {
            let (d, c) = infer_type(term, sig)?;
            let wx = ObType::product(vec![w.clone(), x.clone()]);
            let y = y.clone().normalize();
            if !sig.leq(&wx, &d) {
                return Err(not_sub(&wx, &d));
            }
            if !sig.leq(&c, &y) {
                return Err(not_sub(&c, &y));
            }
            (w.clone().normalize(), ObType::hom(x.clone(), y))
        }
        MorTerm::Uncurry { term, w, x, y } => {
            let (d, c) = infer_type(term, sig)?;
            let w = w.clone().normalize();
            let xy = ObType::hom(x.clone(), y.clone());
            if !sig.leq(&w, &d) {
                return Err(not_sub(&w, &d));
            }
            if !sig.leq(&c, &xy) {
                return Err(not_sub(&c, &xy));
            }
            (ObType::product(vec![w, x.clone()]), y.clone().normalize())
        }
    })
}

pub(crate) fn port_types(t: &ObType) -> Vec<PortType> {
    t.ports().iter().map(|p| PortType::Labeled(p.to_string())).collect()
}

fn build(
    t: &MorTerm,
    sig: &dyn Signature,
    d: &mut WiringDiagram,
    inputs: Vec<Source>,
) -> Result<Vec<Source>, TermError> {
    let box_outputs = |d: &mut WiringDiagram, block: Block, inputs: &[Source]| {
        let n = block.outputs.len();
        let b = d.add_box(block);
        for (i, s) in inputs.iter().enumerate() {
            d.add_wire(*s, Target::BoxIn(b, i));
        }
        (0..n).map(|j| Source::BoxOut(b, j)).collect::<Vec<_>>()
    };
    Ok(match t {
        MorTerm::Generator(id) => {
            let (dom, cod) = infer_type(t, sig)?;
            let block = Block::labeled(id, port_types(&dom), port_types(&cod));
            box_outputs(d, block, &inputs)
        }
        MorTerm::Id(_) | MorTerm::Coerce(..) => inputs,
        MorTerm::Compose(ts) => {
            let mut cur = inputs;
            for t in ts {
                cur = build(t, sig, d, cur)?;
            }
            cur
        }
        MorTerm::Product(ts) => {
            let mut out = Vec::new();
            let mut rest = inputs.as_slice();
            for t in ts {
                let n = infer_type(t, sig)?.0.ports().len();
                let (mine, tail) = rest.split_at(n);
                out.extend(build(t, sig, d, mine.to_vec())?);
                rest = tail;
            }
            out
        }
        MorTerm::Braid(x, _) => {
            let n = x.ports().len();
            let mut out = inputs[n..].to_vec();
            out.extend_from_slice(&inputs[..n]);
            out
        }
        MorTerm::Copy(_) => {
            let mut out = inputs.clone();
            out.extend(inputs);
            out
        }
        MorTerm::Delete(_) => vec![],
        MorTerm::Curry { term, .. } | MorTerm::Uncurry { term, .. } => {
            let (dom, cod) = infer_type(t, sig)?;
            let inner = term_to_diagram(term, sig)?;
            let tag = if matches!(t, MorTerm::Curry { .. }) { "curry" } else { "uncurry" };
            let label = format!("{tag}:{}", &canonicalize(&inner).digest()[..16]);
            let block = Block::labeled(&label, port_types(&dom), port_types(&cod));
            box_outputs(d, block, &inputs)
        }
    })
}

/// The string diagram of a well-typed term. Copies and deletions become
/// fan-out, braids become crossings and coercions disappear into wires.
/// Curried and uncurried subterms are kept as opaque boxes.
pub fn term_to_diagram(t: &MorTerm, sig: &dyn Signature) -> Result<WiringDiagram, TermError> {
    let (dom, cod) = infer_type(t, sig)?;
    let mut d = WiringDiagram::new(port_types(&dom), port_types(&cod));
    let ins = (0..d.inputs().len()).map(Source::OuterIn).collect();
    let outs = build(t, sig, &mut d, ins)?;
    if outs.len() != d.outputs().len() {
        return Err(TermError::IllTypedTerm(format!(
            "term yields {} outputs for codomain {cod}",
            outs.len()
        )));
    }
    for (k, s) in outs.into_iter().enumerate() {
        d.add_wire(s, Target::OuterOut(k));
    }
    Ok(d)
}
