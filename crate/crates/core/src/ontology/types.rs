use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

/// A type expression over basic concepts.
///
/// Construct through [`ObType::product`] and [`ObType::hom`] to keep the
/// normal form: products are flat, contain no units, and have at least two
/// factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObType {
    Basic(String),
    Unit,
    Product(Vec<ObType>),
    Hom(Box<ObType>, Box<ObType>),
}

impl ObType {
    pub fn basic(id: impl Into<String>) -> Self {
        ObType::Basic(id.into())
    }

    pub fn product(factors: Vec<ObType>) -> Self {
        let mut flat = Vec::new();
        for f in factors {
            match f.normalize() {
                ObType::Unit => {}
                ObType::Product(inner) => flat.extend(inner),
                t => flat.push(t),
            }
        }
        match flat.len() {
            0 => ObType::Unit,
            1 => flat.pop().expect("one factor"),
            _ => ObType::Product(flat),
        }
    }

    pub fn hom(dom: ObType, cod: ObType) -> Self {
        ObType::Hom(Box::new(dom.normalize()), Box::new(cod.normalize()))
    }

    pub fn normalize(self) -> Self {
        match self {
            ObType::Product(fs) => ObType::product(fs),
            ObType::Hom(d, c) => ObType::hom(*d, *c),
            t => t,
        }
    }

    /// Outermost factors, one per diagram port.
    pub fn ports(&self) -> Vec<ObType> {
        match self {
            ObType::Unit => vec![],
            ObType::Product(fs) => fs.clone(),
            t => vec![t.clone()],
        }
    }

    /// Basic concept ids mentioned anywhere in the type.
    pub fn basics(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_basics(&mut out);
        out
    }

    fn collect_basics<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ObType::Basic(id) => out.push(id),
            ObType::Unit => {}
            ObType::Product(fs) => fs.iter().for_each(|f| f.collect_basics(out)),
            ObType::Hom(d, c) => {
                d.collect_basics(out);
                c.collect_basics(out);
            }
        }
    }

    /// Parse the textual form used for port labels: `id`, `1`, `(a*b)`,
    /// `[dom,cod]`.
    pub fn parse(s: &str) -> Result<ObType, String> {
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let t = p.ty()?;
        if p.i != p.s.len() {
            return Err(format!("trailing input at {} in {s:?}", p.i));
        }
        Ok(t.normalize())
    }
}

impl fmt::Display for ObType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObType::Basic(id) => f.write_str(id),
            ObType::Unit => f.write_str("1"),
            ObType::Product(fs) => {
                f.write_str("(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            ObType::Hom(d, c) => write!(f, "[{d},{c}]"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected {:?} at {}", c as char, self.i))
        }
    }

    fn ty(&mut self) -> Result<ObType, String> {
        if self.eat(b'(') {
            let mut fs = vec![self.ty()?];
            while self.eat(b'*') {
                fs.push(self.ty()?);
            }
            self.expect(b')')?;
            return Ok(ObType::Product(fs));
        }
        if self.eat(b'[') {
            let d = self.ty()?;
            self.expect(b',')?;
            let c = self.ty()?;
            self.expect(b']')?;
            return Ok(ObType::Hom(Box::new(d), Box::new(c)));
        }
        let start = self.i;
        while self
            .s
            .get(self.i)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'-')
        {
            self.i += 1;
        }
        match &self.s[start..self.i] {
            b"" => Err(format!("expected a type at {start}")),
            b"1" => Ok(ObType::Unit),
            id => Ok(ObType::Basic(String::from_utf8_lossy(id).into_owned())),
        }
    }
}

impl ObType {
    pub fn to_json(&self) -> Value {
        match self {
            ObType::Basic(id) => Value::String(id.clone()),
            ObType::Unit => json!({ "product": [] }),
            ObType::Product(fs) => json!({ "product": fs.iter().map(ObType::to_json).collect::<Vec<_>>() }),
            ObType::Hom(d, c) => json!({ "hom": [d.to_json(), c.to_json()] }),
        }
    }

    /// Accepts a string in label syntax, `{"product": [...]}` or
    /// `{"hom": [dom, cod]}`.
    pub fn from_json(v: &Value) -> Result<ObType, String> {
        match v {
            Value::String(s) => ObType::parse(s),
            Value::Object(m) if m.len() == 1 => {
                let (k, v) = m.iter().next().expect("one entry");
                let items = v
                    .as_array()
                    .ok_or_else(|| format!("\"{k}\" expects an array"))?;
                match k.as_str() {
                    "product" => Ok(ObType::product(
                        items.iter().map(ObType::from_json).collect::<Result<_, _>>()?,
                    )),
                    "hom" if items.len() == 2 => Ok(ObType::hom(
                        ObType::from_json(&items[0])?,
                        ObType::from_json(&items[1])?,
                    )),
                    "hom" => Err("\"hom\" expects [dom, cod]".into()),
                    _ => Err(format!("unknown type constructor {k:?}")),
                }
            }
            other => Err(format!("not a type: {other}")),
        }
    }
}

impl Serialize for ObType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ObType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        ObType::from_json(&v).map_err(serde::de::Error::custom)
    }
}
