//! Deterministic synthetic data: random graphs, OME-XML corpora and
//! reordered schemas.

mod corpus;
mod graphs;
mod schema;

pub use corpus::{
    electron_wavelength_pm, generate_corpus, write_corpus, CorpusFile, CorpusLedger, CorpusSpec, GUN_TYPES,
    PHENOTYPES, STAINING_METHODS,
};
pub use graphs::{random_graph, shuffle_blank_labels, GraphShape};
pub use schema::permute_schema_declarations;
