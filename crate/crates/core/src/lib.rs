//! Raw and semantic flow graphs for data science programs.
//!
//! Traces of program execution become wiring diagrams over concrete
//! functions ([`trace`]); an ontology of abstract types and functions
//! ([`ontology`], [`annotation`]) then rewrites them into diagrams over
//! abstract concepts ([`enrich`]).

pub mod concrete;
pub mod diagram;
pub mod ontology;
pub mod annotation;
pub mod trace;
pub mod enrich;
pub mod batch;
