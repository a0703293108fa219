//! Canonical N-Triples: one statement per line, lines sorted by byte value,
//! LF terminated.

use super::graph::Graph;
use super::lexer::Cursor;
use super::term::{Subject, Term, Triple};
use super::ParseError;

/// Sorted statement lines of `graph`, without terminators.
pub fn canonical_lines(graph: &Graph) -> Vec<String> {
    let mut lines: Vec<String> = graph.iter().map(Triple::to_ntriples).collect();
    lines.sort_unstable();
    lines
}

pub fn serialize(graph: &Graph) -> String {
    let lines = canonical_lines(graph);
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<Graph, ParseError> {
    let mut graph = Graph::new();
    for (idx, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut cur = Cursor::at_line(line, idx + 1);
        cur.skip_inline_ws();
        if cur.at_end() || cur.peek() == Some('#') {
            continue;
        }
        graph.insert(statement(&mut cur)?);
    }
    Ok(graph)
}

/// Parses a single statement line.
pub fn parse_line(line: &str) -> Result<Triple, ParseError> {
    let mut cur = Cursor::new(line);
    cur.skip_inline_ws();
    statement(&mut cur)
}

fn statement(cur: &mut Cursor) -> Result<Triple, ParseError> {
    let subject = match cur.peek() {
        Some('<') if cur.peek_nth(1) == Some('<') => return Err(cur.unsupported("quoted triple")),
        Some('<') => Subject::Iri(cur.iri_ref()?),
        Some('_') => Subject::Blank(cur.blank_node()?),
        Some('"') => return Err(cur.error("literal in subject position")),
        _ => return Err(cur.error("expected subject")),
    };
    cur.skip_inline_ws();
    if cur.peek() != Some('<') {
        return Err(cur.error("expected predicate IRI"));
    }
    let predicate = cur.iri_ref()?;
    cur.skip_inline_ws();
    let object = match cur.peek() {
        Some('<') if cur.peek_nth(1) == Some('<') => return Err(cur.unsupported("quoted triple")),
        Some('<') => Term::Iri(cur.iri_ref()?),
        Some('_') => Term::Blank(cur.blank_node()?),
        Some('"') => {
            let lexical = cur.string(false)?;
            let (lang, datatype) = match cur.peek() {
                Some('@') => (Some(cur.lang_tag()?), None),
                Some('^') => {
                    if !cur.eat_str("^^") {
                        return Err(cur.error("expected '^^'"));
                    }
                    (None, Some(cur.iri_ref()?))
                }
                _ => (None, None),
            };
            Term::Literal(cur.make_literal(lexical, lang, datatype)?)
        }
        _ => return Err(cur.error("expected object")),
    };
    cur.skip_inline_ws();
    cur.expect('.')?;
    cur.skip_inline_ws();
    if !(cur.at_end() || cur.peek() == Some('#')) {
        return Err(cur.error("trailing content after '.'"));
    }
    Ok(Triple::new(subject, predicate, object))
}
