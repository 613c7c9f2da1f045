//! Batch entry points over many independent diagrams.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! thread pool; without it, or with [`Exec::Sequential`], items are processed
//! in order on the calling thread. Results are always in input order.

use crate::annotation::Ontology;
use crate::diagram::{canonicalize, labeled_substructure, port_graph, CanonicalForm, WiringDiagram};
use crate::enrich::{enrich_with, EnrichError, EnrichmentReport, Strictness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Data-parallel when built with the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Map `f` over `items`, keeping order.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub fn canonicalize_all(diagrams: &[WiringDiagram]) -> Vec<CanonicalForm> {
    canonicalize_all_with(Exec::default(), diagrams)
}

pub fn canonicalize_all_with(exec: Exec, diagrams: &[WiringDiagram]) -> Vec<CanonicalForm> {
    map(exec, diagrams, canonicalize)
}

/// Pairwise isomorphism, full or on the labeled sub-structure. Each
/// diagram is canonicalized once.
pub fn iso_matrix(diagrams: &[WiringDiagram], labeled_only: bool) -> Vec<Vec<bool>> {
    iso_matrix_with(Exec::default(), diagrams, labeled_only)
}

pub fn iso_matrix_with(exec: Exec, diagrams: &[WiringDiagram], labeled_only: bool) -> Vec<Vec<bool>> {
    let forms = map(exec, diagrams, |d| {
        if labeled_only {
            labeled_substructure(d).canonical_form()
        } else {
            port_graph(d).canonical_form()
        }
    });
    let rows: Vec<usize> = (0..forms.len()).collect();
    map(exec, &rows, |i| forms.iter().map(|f| *f == forms[*i]).collect())
}

pub fn enrich_all(
    raws: &[WiringDiagram],
    o: &Ontology,
    mode: Strictness,
) -> Vec<Result<(WiringDiagram, EnrichmentReport), EnrichError>> {
    enrich_all_with(Exec::default(), raws, o, mode)
}

pub fn enrich_all_with(
    exec: Exec,
    raws: &[WiringDiagram],
    o: &Ontology,
    mode: Strictness,
) -> Vec<Result<(WiringDiagram, EnrichmentReport), EnrichError>> {
    map(exec, raws, |d| enrich_with(d, o, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Block, PortType, Source, Target};

    fn unary(label: &str) -> WiringDiagram {
        let t = PortType::labeled("x");
        let mut d = WiringDiagram::new(vec![t.clone()], vec![t.clone()]);
        let b = d.add_box(Block::labeled(label, vec![t.clone()], vec![t]));
        d.add_wire(Source::OuterIn(0), Target::BoxIn(b, 0));
        d.add_wire(Source::BoxOut(b, 0), Target::OuterOut(0));
        d
    }

    #[test]
    fn modes_agree() {
        let ds: Vec<_> = ["f", "g", "f", "h"].iter().map(|l| unary(l)).collect();
        assert_eq!(
            canonicalize_all_with(Exec::Sequential, &ds),
            canonicalize_all_with(Exec::Parallel, &ds)
        );
        let m = iso_matrix_with(Exec::Sequential, &ds, false);
        assert_eq!(m, iso_matrix_with(Exec::Parallel, &ds, false));
        assert!(m[0][2] && !m[0][1] && m[3][3]);
    }
}
