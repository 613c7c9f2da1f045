//! The fixture programs end to end against their hand-encoded graphs.

use semflow::annotation::load_ontology;
use semflow::diagram::{is_isomorphic, labeled_isomorphic, WiringDiagram};
use semflow::enrich::{enrich, enrich_with, Strictness};
use semflow::trace::{build_raw_graph, parse_trace_str, TraceEvent};
use semflow_testkit::{figures, fixture, oracle};

fn events(stem: &str) -> Vec<TraceEvent> {
    let text = std::fs::read_to_string(fixture(&format!("traces/{stem}.jsonl"))).unwrap();
    parse_trace_str(&text).unwrap()
}

fn raw(stem: &str) -> WiringDiagram {
    build_raw_graph(&events(stem)).unwrap()
}

fn ontology() -> semflow::annotation::Ontology {
    load_ontology(&[fixture("ontology")]).unwrap()
}

#[test]
fn raw_graphs_match_figures() {
    for (stem, expected) in figures::raw_figures() {
        let got = raw(stem);
        assert!(oracle::brute_isomorphic(&got, &expected), "{stem}");
        assert!(is_isomorphic(&got, &expected), "{stem}");
        assert_eq!(got.atomic_count(), oracle::library_call_count(&events(stem)), "{stem}");
    }
}

#[test]
fn kmeans_programs_share_one_semantic_graph() {
    let o = ontology();
    let fig = figures::semantic_kmeans();
    let sem: Vec<WiringDiagram> = ["kmeans-scipy", "kmeans-sklearn", "kmeans-r"]
        .iter()
        .map(|s| enrich(&raw(s), &o).unwrap().0)
        .collect();
    for (i, a) in sem.iter().enumerate() {
        assert!(labeled_isomorphic(a, &fig), "program {i}");
        let (ca, cf) = (oracle::collapsed_labeled(a), oracle::collapsed_labeled(&fig));
        assert!(oracle::collapsed_isomorphic(&ca, &cf), "program {i}");
        for b in &sem {
            assert!(labeled_isomorphic(a, b));
        }
    }
}

#[test]
fn regression_enriches_to_figure() {
    let got = enrich(&raw("regression-sklearn"), &ontology()).unwrap().0;
    let fig = figures::semantic_regression();
    assert!(oracle::brute_isomorphic(&got, &fig));
    assert!(is_isomorphic(&got, &fig));
}

#[test]
fn reports_count_what_happened() {
    let o = ontology();
    let (_, rep) = enrich_with(&raw("kmeans-sklearn"), &o, Strictness::Strict).unwrap();
    assert_eq!((rep.expanded_boxes, rep.unannotated_boxes, rep.contracted_groups), (5, 2, 1));
    assert_eq!(rep.provenance, vec![vec!["NDFrame.drop".to_string(), "NDFrame.values".to_string()]]);
    assert!(rep.skipped.is_empty());
}
