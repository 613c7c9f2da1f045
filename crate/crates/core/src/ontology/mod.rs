//! Ontology language: type expressions, morphism terms, the subtype
//! preorder and subfunctions, and the reduction of terms to diagrams.

mod preorder;
mod term;
mod types;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diagram::is_isomorphic;

pub(crate) use preorder::closure;
pub use preorder::SubtypePreorder;
pub use term::{infer_type, term_to_diagram, MorTerm, Signature};
pub use types::ObType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("composite is ill-typed at position {position}: {cod} is not a subtype of {dom}")]
    CompositionTypeError {
        position: usize,
        cod: String,
        dom: String,
    },
    #[error("{sub} is not a subtype of {sup}")]
    NotASubtype { sub: String, sup: String },
    #[error("empty composite has no type")]
    EmptyComposite,
    #[error("ill-typed term: {0}")]
    IllTypedTerm(String),
    #[error("terms have different types: {0} vs {1}")]
    TypeMismatch(String, String),
    #[error("equality is only decided for free ontologies; {0} equations are declared")]
    UnsupportedEquations(usize),
    #[error("unknown function concept {0:?}")]
    UnknownFunctionConcept(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("duplicate concept id {0:?}")]
    DuplicateId(String),
    #[error("reference to undefined concept {0:?}")]
    UnresolvedReference(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeConcept {
    pub id: String,
    pub supertypes: Vec<String>,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionConcept {
    pub id: String,
    pub dom: ObType,
    pub cod: ObType,
    pub subfunction_of: Vec<String>,
    pub definition: Option<MorTerm>,
    pub description: Option<String>,
}

/// A declared equality between two terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub id: String,
    pub lhs: MorTerm,
    pub rhs: MorTerm,
}

/// A finite presentation: basic types with subtypings, generating functions
/// with subfunction declarations, and equations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Presentation {
    types: BTreeMap<String, TypeConcept>,
    functions: BTreeMap<String, FunctionConcept>,
    equations: Vec<Equation>,
    preorder: SubtypePreorder,
    subfunctions: BTreeMap<String, BTreeSet<String>>,
}

impl Presentation {
    /// Link concepts, checking ids are unique per kind and every reference
    /// resolves.
    pub fn new(
        types: Vec<TypeConcept>,
        functions: Vec<FunctionConcept>,
        equations: Vec<Equation>,
    ) -> Result<Self, PresentationError> {
        let mut tmap = BTreeMap::new();
        for t in types {
            if tmap.contains_key(&t.id) {
                return Err(PresentationError::DuplicateId(t.id));
            }
            tmap.insert(t.id.clone(), t);
        }
        let mut fmap = BTreeMap::new();
        for f in functions {
            if fmap.contains_key(&f.id) {
                return Err(PresentationError::DuplicateId(f.id));
            }
            fmap.insert(f.id.clone(), f);
        }
        let unresolved = |id: &str| PresentationError::UnresolvedReference(id.to_string());
        for t in tmap.values() {
            if let Some(s) = t.supertypes.iter().find(|s| !tmap.contains_key(*s)) {
                return Err(unresolved(s));
            }
        }
        for f in fmap.values() {
            for b in f.dom.basics().into_iter().chain(f.cod.basics()) {
                if !tmap.contains_key(b) {
                    return Err(unresolved(b));
                }
            }
            if let Some(s) = f.subfunction_of.iter().find(|s| !fmap.contains_key(*s)) {
                return Err(unresolved(s));
            }
            if let Some(def) = &f.definition {
                check_term_refs(def, &tmap, &fmap)?;
            }
        }
        for e in &equations {
            check_term_refs(&e.lhs, &tmap, &fmap)?;
            check_term_refs(&e.rhs, &tmap, &fmap)?;
        }
        let preorder = SubtypePreorder::new(
            tmap.keys().cloned(),
            tmap.values()
                .flat_map(|t| t.supertypes.iter().map(|s| (t.id.clone(), s.clone()))),
        );
        let subfunctions = closure(
            &fmap.keys().cloned().collect(),
            &fmap
                .values()
                .flat_map(|f| f.subfunction_of.iter().map(|s| (f.id.clone(), s.clone())))
                .collect(),
        );
        Ok(Presentation {
            types: tmap,
            functions: fmap,
            equations,
            preorder,
            subfunctions,
        })
    }

    pub fn types(&self) -> &BTreeMap<String, TypeConcept> {
        &self.types
    }

    pub fn functions(&self) -> &BTreeMap<String, FunctionConcept> {
        &self.functions
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn preorder(&self) -> &SubtypePreorder {
        &self.preorder
    }

    pub fn function(&self, id: &str) -> Option<&FunctionConcept> {
        self.functions.get(id)
    }

    /// Whether `f ≤ g` follows from declared subfunctions by reflexivity
    /// and transitivity.
    pub fn declared_subfunction(&self, f: &str, g: &str) -> bool {
        f == g || self.subfunctions.get(f).is_some_and(|s| s.contains(g))
    }
}

fn check_term_refs(
    t: &MorTerm,
    types: &BTreeMap<String, TypeConcept>,
    functions: &BTreeMap<String, FunctionConcept>,
) -> Result<(), PresentationError> {
    for g in t.generators() {
        if !functions.contains_key(g) {
            return Err(PresentationError::UnresolvedReference(g.to_string()));
        }
    }
    for ty in t.mentioned_types() {
        for b in ty.basics() {
            if !types.contains_key(b) {
                return Err(PresentationError::UnresolvedReference(b.to_string()));
            }
        }
    }
    Ok(())
}

impl Signature for Presentation {
    fn generator(&self, id: &str) -> Option<(ObType, ObType)> {
        self.functions
            .get(id)
            .map(|f| (f.dom.clone().normalize(), f.cod.clone().normalize()))
    }

    fn leq(&self, a: &ObType, b: &ObType) -> bool {
        self.preorder.leq(a, b)
    }
}

impl Signature for SubtypePreorder {
    fn generator(&self, _: &str) -> Option<(ObType, ObType)> {
        None
    }

    fn leq(&self, a: &ObType, b: &ObType) -> bool {
        SubtypePreorder::leq(self, a, b)
    }
}

pub fn leq(t1: &ObType, t2: &ObType, p: &SubtypePreorder) -> bool {
    p.leq(&t1.clone().normalize(), &t2.clone().normalize())
}

/// `f ≤ g` as function concepts: declared (up to reflexive-transitive
/// closure) and both domain and codomain compatible.
pub fn check_subfunction(f: &str, g: &str, p: &Presentation) -> Result<bool, TermError> {
    let unknown = |id: &str| TermError::UnknownFunctionConcept(id.to_string());
    let ff = p.function(f).ok_or_else(|| unknown(f))?;
    let gg = p.function(g).ok_or_else(|| unknown(g))?;
    Ok(p.declared_subfunction(f, g)
        && p.preorder.leq(&ff.dom, &gg.dom)
        && p.preorder.leq(&ff.cod, &gg.cod))
}

/// Type-level submorphism test between two terms: both typecheck and the
/// domains and codomains are related by subtyping.
pub fn is_type_level_submorphism(
    t1: &MorTerm,
    t2: &MorTerm,
    sig: &dyn Signature,
) -> Result<bool, TermError> {
    let (d1, c1) = infer_type(t1, sig)?;
    let (d2, c2) = infer_type(t2, sig)?;
    Ok(sig.leq(&d1, &d2) && sig.leq(&c1, &c2))
}

/// Equality of morphisms in the free cartesian category, by comparing
/// string diagrams. Opaque curry boxes make this sound but incomplete for
/// closed terms.
pub fn terms_equal(t1: &MorTerm, t2: &MorTerm, p: &Presentation) -> Result<bool, TermError> {
    if !p.equations.is_empty() {
        return Err(TermError::UnsupportedEquations(p.equations.len()));
    }
    terms_equal_free(t1, t2, p)
}

/// [`terms_equal`] for any signature, ignoring equations.
pub fn terms_equal_free(t1: &MorTerm, t2: &MorTerm, sig: &dyn Signature) -> Result<bool, TermError> {
    let a = infer_type(t1, sig)?;
    let b = infer_type(t2, sig)?;
    if a != b {
        return Err(TermError::TypeMismatch(
            format!("{} -> {}", a.0, a.1),
            format!("{} -> {}", b.0, b.1),
        ));
    }
    Ok(is_isomorphic(&term_to_diagram(t1, sig)?, &term_to_diagram(t2, sig)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> ObType {
        ObType::basic(s)
    }

    fn ty(id: &str, sup: &[&str]) -> TypeConcept {
        TypeConcept {
            id: id.into(),
            supertypes: sup.iter().map(|s| s.to_string()).collect(),
            description: None,
        }
    }

    fn func(id: &str, dom: ObType, cod: ObType, sub: &[&str]) -> FunctionConcept {
        FunctionConcept {
            id: id.into(),
            dom,
            cod,
            subfunction_of: sub.iter().map(|s| s.to_string()).collect(),
            definition: None,
            description: None,
        }
    }

    fn pres() -> Presentation {
        Presentation::new(
            vec![
                ty("data", &[]),
                ty("table", &["data"]),
                ty("file", &[]),
                ty("tabular-file", &["file"]),
                ty("x", &[]),
            ],
            vec![
                func("read-data", b("file"), b("data"), &[]),
                func("read-tabular-file", b("tabular-file"), b("table"), &["read-data"]),
                func("f", b("x"), b("x"), &[]),
                func("g", b("x"), b("x"), &[]),
                func("h", b("x"), b("x"), &[]),
                func("k", b("x"), b("x"), &[]),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn read_tabular_file_is_a_subfunction() {
        let p = pres();
        assert!(check_subfunction("read-tabular-file", "read-data", &p).unwrap());
        assert!(!check_subfunction("read-data", "read-tabular-file", &p).unwrap());
        assert!(check_subfunction("f", "f", &p).unwrap());
        assert_eq!(
            check_subfunction("nope", "f", &p),
            Err(TermError::UnknownFunctionConcept("nope".into()))
        );
    }

    #[test]
    fn presentation_errors() {
        let dup = Presentation::new(vec![ty("a", &[]), ty("a", &[])], vec![], vec![]);
        assert_eq!(dup, Err(PresentationError::DuplicateId("a".into())));
        let dangling = Presentation::new(vec![ty("a", &["b"])], vec![], vec![]);
        assert_eq!(dangling, Err(PresentationError::UnresolvedReference("b".into())));
    }

    #[test]
    fn word_problem_examples() {
        let p = pres();
        let g = MorTerm::generator;
        let x = || b("x");
        let assoc_l = MorTerm::compose(vec![MorTerm::compose(vec![g("f"), g("g")]), g("h")]);
        let assoc_r = MorTerm::compose(vec![g("f"), MorTerm::compose(vec![g("g"), g("h")])]);
        assert!(terms_equal(&assoc_l, &assoc_r, &p).unwrap());

        let lhs = MorTerm::compose(vec![
            MorTerm::product(vec![g("f"), g("g")]),
            MorTerm::product(vec![g("h"), g("k")]),
        ]);
        let rhs = MorTerm::product(vec![
            MorTerm::compose(vec![g("f"), g("h")]),
            MorTerm::compose(vec![g("g"), g("k")]),
        ]);
        assert!(terms_equal(&lhs, &rhs, &p).unwrap());

        let copy_first = MorTerm::compose(vec![MorTerm::Copy(x()), MorTerm::product(vec![g("f"), g("f")])]);
        let copy_after = MorTerm::compose(vec![g("f"), MorTerm::Copy(x())]);
        assert!(!terms_equal(&copy_first, &copy_after, &p).unwrap());

        assert!(matches!(
            terms_equal(&g("f"), &g("read-data"), &p),
            Err(TermError::TypeMismatch(..))
        ));
    }

    #[test]
    fn equations_are_refused() {
        let base = pres();
        let p = Presentation::new(
            base.types().values().cloned().collect(),
            base.functions().values().cloned().collect(),
            vec![Equation {
                id: "e".into(),
                lhs: MorTerm::generator("f"),
                rhs: MorTerm::generator("g"),
            }],
        )
        .unwrap();
        assert_eq!(
            terms_equal(&MorTerm::generator("f"), &MorTerm::generator("g"), &p),
            Err(TermError::UnsupportedEquations(1))
        );
    }
}
