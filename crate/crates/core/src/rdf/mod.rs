//! RDF terms, graphs, isomorphism and the N-Triples / Turtle formats.

mod graph;
pub mod iso;
mod lexer;
pub mod ntriples;
mod term;
pub mod turtle;
pub mod vocab;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use graph::{is_prefix_name, Graph, GraphError};
pub use iso::{isomorphic, isomorphic_brute_force, IsoError};
pub use term::{BlankNode, Iri, Literal, Subject, Term, TermError, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    Turtle,
    NTriples,
}

impl RdfFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RdfFormat::Turtle => "ttl",
            RdfFormat::NTriples => "nt",
        }
    }

    /// Guesses the format from a file name.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "ttl" => Some(RdfFormat::Turtle),
            "nt" => Some(RdfFormat::NTriples),
            _ => None,
        }
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            "ntriples" | "n-triples" | "nt" => Ok(RdfFormat::NTriples),
            other => Err(format!("unknown RDF format {other:?} (expected turtle or ntriples)")),
        }
    }
}

impl fmt::Display for RdfFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfFormat::Turtle => "turtle",
            RdfFormat::NTriples => "ntriples",
        })
    }
}

pub fn serialize(graph: &Graph, format: RdfFormat) -> String {
    match format {
        RdfFormat::Turtle => turtle::serialize(graph),
        RdfFormat::NTriples => ntriples::serialize(graph),
    }
}

pub fn parse(text: &str, format: RdfFormat) -> Result<Graph, ParseError> {
    match format {
        RdfFormat::Turtle => turtle::parse(text),
        RdfFormat::NTriples => ntriples::parse(text),
    }
}
