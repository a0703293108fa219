//! Turtle reader and writer for a fixed subset of the language: prefix
//! declarations, IRIs, prefixed names, blank node labels, `a`, predicate and
//! object lists, and quoted, numeric and boolean literals. Collections,
//! anonymous `[]` nodes, quoted triples and `@base` are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::graph::Graph;
use super::lexer::Cursor;
use super::term::{write_escaped, Iri, Literal, Subject, Term, Triple};
use super::vocab::{rdf, xsd};
use super::ParseError;

struct Abbreviator<'a> {
    // namespaces sorted longest first, ties by prefix name
    namespaces: Vec<(&'a str, &'a str)>,
}

impl<'a> Abbreviator<'a> {
    fn new(prefixes: &'a BTreeMap<String, Iri>) -> Self {
        let mut namespaces: Vec<(&str, &str)> = prefixes
            .iter()
            .map(|(p, ns)| (p.as_str(), ns.as_str()))
            .collect();
        namespaces.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
        Abbreviator { namespaces }
    }

    fn iri(&self, iri: &Iri) -> String {
        for (prefix, ns) in &self.namespaces {
            if let Some(local) = iri.as_str().strip_prefix(ns) {
                if is_safe_local(local) {
                    return format!("{prefix}:{local}");
                }
            }
        }
        iri.to_string()
    }

    fn subject(&self, s: &Subject) -> String {
        match s {
            Subject::Iri(iri) => self.iri(iri),
            Subject::Blank(b) => b.to_string(),
        }
    }

    fn object(&self, o: &Term) -> String {
        match o {
            Term::Iri(iri) => self.iri(iri),
            Term::Blank(b) => b.to_string(),
            Term::Literal(lit) => {
                let mut out = String::from("\"");
                write_escaped(&mut out, lit.lexical()).expect("writing to a String");
                out.push('"');
                if let Some(tag) = lit.language() {
                    out.push('@');
                    out.push_str(tag);
                } else if lit.datatype().as_str() != xsd::STRING {
                    out.push_str("^^");
                    out.push_str(&self.iri(lit.datatype()));
                }
                out
            }
        }
    }
}

/// Local names emitted unescaped. Everything else falls back to `<...>`.
fn is_safe_local(local: &str) -> bool {
    let bytes = local.as_bytes();
    if bytes.is_empty() {
        return true;
    }
    let inner_ok = |b: &u8| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.');
    bytes.iter().all(inner_ok)
        && (bytes[0].is_ascii_alphanumeric() || bytes[0] == b'_')
        && *bytes.last().unwrap() != b'.'
}

pub fn serialize(graph: &Graph) -> String {
    let abbr = Abbreviator::new(graph.prefixes());
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        writeln!(out, "@prefix {prefix}: {ns} .").expect("writing to a String");
    }

    let mut groups: BTreeMap<String, Vec<(bool, String, String, &Triple)>> = BTreeMap::new();
    for t in graph.iter() {
        groups.entry(t.subject.to_string()).or_default().push((
            t.predicate.as_str() != rdf::TYPE,
            t.predicate.to_string(),
            t.object.to_string(),
            t,
        ));
    }

    for mut triples in groups.into_values() {
        triples.sort_unstable_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&abbr.subject(&triples[0].3.subject));
        for (i, (is_not_type, _, _, t)) in triples.iter().enumerate() {
            let same_predicate = i > 0 && triples[i - 1].3.predicate == t.predicate;
            if same_predicate {
                out.push_str(" , ");
            } else {
                if i > 0 {
                    out.push_str(" ;\n    ");
                } else {
                    out.push(' ');
                }
                if *is_not_type {
                    out.push_str(&abbr.iri(&t.predicate));
                } else {
                    out.push('a');
                }
                out.push(' ');
            }
            out.push_str(&abbr.object(&t.object));
        }
        out.push_str(" .\n");
    }
    out
}

pub fn parse(text: &str) -> Result<Graph, ParseError> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        prefixes: BTreeMap::new(),
        graph: Graph::new(),
    };
    parser.document()?;
    let mut graph = parser.graph;
    for (prefix, ns) in parser.prefixes {
        graph
            .bind_prefix(&prefix, ns)
            .expect("fresh graph accepts declared prefixes");
    }
    Ok(graph)
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: BTreeMap<String, Iri>,
    graph: Graph,
}

impl Parser<'_> {
    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            self.cur.skip_ws_and_comments();
            if self.cur.at_end() {
                return Ok(());
            }
            if self.cur.eat_str("@prefix") {
                self.prefix_decl()?;
                self.cur.skip_ws_and_comments();
                self.cur.expect('.')?;
            } else if self.keyword("PREFIX") {
                self.prefix_decl()?;
            } else if self.cur.rest().starts_with("@base") || self.keyword_ahead("BASE") {
                return Err(self.cur.unsupported("base IRI declaration"));
            } else {
                self.triples()?;
            }
        }
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        let rest = self.cur.rest();
        rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..].starts_with([' ', '\t', '\n', '\r'])
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if self.keyword_ahead(kw) {
            for _ in 0..kw.len() {
                self.cur.bump();
            }
            true
        } else {
            false
        }
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
        self.cur.skip_ws_and_comments();
        let mut name = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                name.push(c);
                self.cur.bump();
            } else {
                return Err(self.cur.error("invalid prefix name"));
            }
        }
        self.cur.expect(':')?;
        if !super::graph::is_prefix_name(&name) {
            return Err(self.cur.unsupported(format!("prefix name {name:?}")));
        }
        self.cur.skip_ws_and_comments();
        let ns = self.cur.iri_ref()?;
        self.prefixes.insert(name, ns);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        let subject = match self.cur.peek() {
            Some('[') => return Err(self.cur.unsupported("anonymous blank node")),
            Some('(') => return Err(self.cur.unsupported("collection")),
            Some('<') if self.cur.peek_nth(1) == Some('<') => {
                return Err(self.cur.unsupported("quoted triple"))
            }
            Some('<') => Subject::Iri(self.cur.iri_ref()?),
            Some('_') if self.cur.peek_nth(1) == Some(':') => Subject::Blank(self.cur.blank_node()?),
            Some('"' | '\'') => return Err(self.cur.error("literal in subject position")),
            _ => Subject::Iri(self.prefixed_name()?),
        };
        self.cur.skip_ws_and_comments();
        loop {
            let predicate = self.verb()?;
            loop {
                self.cur.skip_ws_and_comments();
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.cur.skip_ws_and_comments();
                if !self.cur.eat(',') {
                    break;
                }
            }
            let mut saw_semicolon = false;
            while self.cur.eat(';') {
                saw_semicolon = true;
                self.cur.skip_ws_and_comments();
            }
            if !saw_semicolon || self.cur.peek() == Some('.') {
                break;
            }
        }
        self.cur.skip_ws_and_comments();
        self.cur.expect('.')
    }

    fn verb(&mut self) -> Result<Iri, ParseError> {
        self.cur.skip_ws_and_comments();
        if self.cur.peek() == Some('a')
            && matches!(self.cur.peek_nth(1), Some(' ' | '\t' | '\n' | '\r' | '<' | '"'))
        {
            self.cur.bump();
            return Ok(rdf::type_());
        }
        match self.cur.peek() {
            Some('<') => self.cur.iri_ref(),
            _ => self.prefixed_name(),
        }
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        match self.cur.peek() {
            Some('[') => Err(self.cur.unsupported("anonymous blank node")),
            Some('(') => Err(self.cur.unsupported("collection")),
            Some('<') if self.cur.peek_nth(1) == Some('<') => {
                Err(self.cur.unsupported("quoted triple"))
            }
            Some('<') => Ok(Term::Iri(self.cur.iri_ref()?)),
            Some('_') if self.cur.peek_nth(1) == Some(':') => Ok(Term::Blank(self.cur.blank_node()?)),
            Some('"' | '\'') => {
                let lexical = self.cur.string(true)?;
                let (lang, datatype) = match self.cur.peek() {
                    Some('@') => (Some(self.cur.lang_tag()?), None),
                    Some('^') => {
                        if !self.cur.eat_str("^^") {
                            return Err(self.cur.error("expected '^^'"));
                        }
                        let dt = match self.cur.peek() {
                            Some('<') => self.cur.iri_ref()?,
                            _ => self.prefixed_name()?,
                        };
                        (None, Some(dt))
                    }
                    _ => (None, None),
                };
                Ok(Term::Literal(self.cur.make_literal(lexical, lang, datatype)?))
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric(),
            _ => {
                for (word, value) in [("true", "true"), ("false", "false")] {
                    if self.cur.rest().starts_with(word)
                        && !self
                            .cur
                            .rest()
                            .chars()
                            .nth(word.len())
                            .is_some_and(|c| c.is_alphanumeric() || c == ':' || c == '_')
                    {
                        self.cur.eat_str(word);
                        return Ok(Term::Literal(
                            Literal::typed(value, xsd::boolean()).expect("boolean lexical"),
                        ));
                    }
                }
                Ok(Term::Iri(self.prefixed_name()?))
            }
        }
    }

    fn numeric(&mut self) -> Result<Term, ParseError> {
        let mut lexical = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur.peek() {
            lexical.push(sign);
            self.cur.bump();
        }
        let digits = |cur: &mut Cursor, out: &mut String| {
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                out.push(c);
                cur.bump();
            }
        };
        digits(&mut self.cur, &mut lexical);
        let mut datatype = xsd::integer();
        if self.cur.peek() == Some('.') && self.cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            lexical.push('.');
            self.cur.bump();
            digits(&mut self.cur, &mut lexical);
            datatype = xsd::decimal();
        }
        if let Some(e @ ('e' | 'E')) = self.cur.peek() {
            lexical.push(e);
            self.cur.bump();
            if let Some(sign @ ('+' | '-')) = self.cur.peek() {
                lexical.push(sign);
                self.cur.bump();
            }
            digits(&mut self.cur, &mut lexical);
            datatype = xsd::double();
        }
        Literal::typed(lexical.clone(), datatype)
            .map(Term::Literal)
            .map_err(|_| self.cur.error(format!("malformed number {lexical:?}")))
    }

    fn prefixed_name(&mut self) -> Result<Iri, ParseError> {
        let (line, column) = self.cur.position();
        let mut prefix = String::new();
        while let Some(c) = self.cur.peek() {
            if c == ':' {
                break;
            }
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                prefix.push(c);
                self.cur.bump();
            } else {
                return Err(self.cur.error("expected IRI, prefixed name or literal"));
            }
        }
        if !self.cur.eat(':') {
            return Err(self.cur.error("expected ':' in prefixed name"));
        }
        let mut local = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%') {
                local.push(c);
                self.cur.bump();
            } else if c == '\\' {
                self.cur.bump();
                match self.cur.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.cur.error("invalid local name escape")),
                }
            } else {
                break;
            }
        }
        while local.ends_with('.') {
            local.pop();
            self.cur.unbump_ascii();
        }
        let ns = self.prefixes.get(&prefix).ok_or_else(|| ParseError::Syntax {
            line,
            column,
            message: format!("undeclared prefix {prefix:?}"),
        })?;
        Iri::new(format!("{}{}", ns.as_str(), local)).map_err(|e| ParseError::Syntax {
            line,
            column,
            message: e.to_string(),
        })
    }
}
