//! Core engine for turning hierarchical regulatory documents into an
//! executable knowledge graph.
//!
//! The pipeline runs in fixed stages: ingest sources into a paragraph
//! model ([`corpus`]), enrich paragraphs by resolving anaphora ([`coref`]),
//! tag concept spans with glossary/lexicon/pattern taggers ([`taggers`]),
//! link occurrences into canonical tags by normalized lemma ([`linker`]),
//! extract labeled relations between co-sentence occurrences
//! ([`relations`]), and assemble everything into a property graph
//! ([`graph`]) with persistence ([`dump`]), Cypher export ([`cypher`]),
//! cleanup ([`clean`]), and analytical queries ([`query`]).

pub mod clean;
pub mod coref;
pub mod corpus;
pub mod cypher;
pub mod dump;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ids;
pub mod lemma;
pub mod linker;
pub mod query;
pub mod relations;
pub mod sentences;
pub mod taggers;
pub mod taxonomy;
pub mod tokens;

pub use error::{Error, Result};
