use std::fmt;

use thiserror::Error;

use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {value:?}: {reason}")]
    InvalidIri { value: String, reason: &'static str },
    #[error("invalid blank node label {0:?}")]
    InvalidBlankLabel(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("lexical form {lexical:?} is not valid for datatype <{datatype}>")]
    InvalidLexical { lexical: String, datatype: String },
    #[error("a literal cannot be the subject of a triple")]
    LiteralSubject,
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        match check_iri(&value) {
            Ok(()) => Ok(Iri(value)),
            Err(reason) => Err(TermError::InvalidIri { value, reason }),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Appends `suffix` to this IRI and validates the result.
    pub fn join(&self, suffix: &str) -> Result<Iri, TermError> {
        Iri::new(format!("{}{}", self.0, suffix))
    }

    pub fn starts_with(&self, namespace: &Iri) -> bool {
        self.0.starts_with(namespace.as_str())
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Iri {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

/// Validates an IRI string. Characters that N-Triples cannot carry inside
/// `<...>` are rejected along with whitespace.
fn check_iri(s: &str) -> Result<(), &'static str> {
    if s.is_empty() {
        return Err("empty string");
    }
    let Some(colon) = s.find(':') else {
        return Err("missing scheme");
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return Err("missing scheme"),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Err("malformed scheme");
    }
    for c in s.chars() {
        if c.is_whitespace() || c.is_control() {
            return Err("contains whitespace or control character");
        }
        if matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            return Err("contains forbidden character");
        }
    }
    Ok(())
}

/// A blank node, identified by a label local to its graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        let mut chars = label.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric());
        if ok {
            Ok(BlankNode(label))
        } else {
            Err(TermError::InvalidBlankLabel(label))
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A literal of the given datatype. Numeric datatypes check their lexical form.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        let lexical = lexical.into();
        if datatype.as_str() == rdf::LANG_STRING {
            return Err(TermError::InvalidLexical {
                lexical,
                datatype: datatype.into_string(),
            });
        }
        if !lexical_is_valid(&lexical, datatype.as_str()) {
            return Err(TermError::InvalidLexical {
                lexical,
                datatype: datatype.into_string(),
            });
        }
        Ok(Literal {
            lexical,
            datatype,
            language: None,
        })
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: xsd::string(),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, TermError> {
        let tag = tag.into();
        if !is_language_tag(&tag) {
            return Err(TermError::InvalidLanguageTag(tag));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: rdf::lang_string(),
            language: Some(tag),
        })
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: xsd::integer(),
            language: None,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value of the lexical form, if the datatype is numeric.
    pub fn as_f64(&self) -> Option<f64> {
        if !xsd::is_numeric(self.datatype.as_str()) {
            return None;
        }
        match self.lexical.as_str() {
            "INF" | "+INF" => Some(f64::INFINITY),
            "-INF" => Some(f64::NEG_INFINITY),
            other => other.parse().ok(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        match &self.language {
            Some(tag) => write!(f, "@{tag}"),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

pub(crate) fn write_escaped(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '\\' => out.write_str("\\\\")?,
            '"' => out.write_str("\\\"")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c if c.is_control() => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let primary = parts.next().unwrap_or_default();
    (1..=8).contains(&primary.len())
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

fn lexical_is_valid(lexical: &str, datatype: &str) -> bool {
    if xsd::is_integer_type(datatype) {
        let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
        return !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit());
    }
    if datatype == xsd::DECIMAL {
        let body = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        return !(int.is_empty() && frac.is_empty())
            && int.bytes().all(|b| b.is_ascii_digit())
            && frac.bytes().all(|b| b.is_ascii_digit());
    }
    if datatype == xsd::DOUBLE || datatype == xsd::FLOAT {
        return matches!(lexical, "INF" | "+INF" | "-INF" | "NaN")
            || (lexical.parse::<f64>().is_ok()
                && lexical.bytes().any(|b| b.is_ascii_digit())
                && !lexical.contains(['i', 'I', 'n', 'N']));
    }
    if datatype == xsd::BOOLEAN {
        return matches!(lexical, "true" | "false" | "1" | "0");
    }
    true
}

/// Any RDF term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankNode> {
        match self {
            Term::Blank(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

/// Subject position: an IRI or a blank node, never a literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(iri) => iri.fmt(f),
            Subject::Blank(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::Blank(b)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(iri) => Term::Iri(iri),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

impl TryFrom<Term> for Subject {
    type Error = TermError;

    fn try_from(t: Term) -> Result<Self, Self::Error> {
        match t {
            Term::Iri(iri) => Ok(Subject::Iri(iri)),
            Term::Blank(b) => Ok(Subject::Blank(b)),
            Term::Literal(_) => Err(TermError::LiteralSubject),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    pub fn blank_nodes(&self) -> impl Iterator<Item = &BlankNode> {
        let s = match &self.subject {
            Subject::Blank(b) => Some(b),
            Subject::Iri(_) => None,
        };
        s.into_iter().chain(self.object.as_blank())
    }

    pub fn is_ground(&self) -> bool {
        self.blank_nodes().next().is_none()
    }

    /// The triple as one N-Triples statement, without the line terminator.
    pub fn to_ntriples(&self) -> String {
        format!("{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_iri_examples() {
        assert!(Iri::new("http://example.org/a").is_ok());
        assert!(matches!(
            Iri::new("no scheme here"),
            Err(TermError::InvalidIri { .. })
        ));
        assert!(Iri::new("http://metadb.riken.jp/metadb/db/rikenbrc_mouse").is_ok());
    }

    #[test]
    fn iri_rejects_forbidden_characters() {
        for bad in ["", "http://a b", "http://a<b", "http://a>b", "http://a\"b", ":x", "1ab:x"] {
            assert!(Iri::new(bad).is_err(), "{bad:?} accepted");
        }
        assert!(Iri::new("urn:uuid:1234").is_ok());
    }

    #[test]
    fn blank_labels() {
        assert!(BlankNode::new("b0").is_ok());
        assert!(BlankNode::new("0b").is_err());
        assert!(BlankNode::new("a-b").is_err());
        assert!(BlankNode::new("").is_err());
    }

    #[test]
    fn numeric_literals_are_checked() {
        assert!(Literal::typed("5.0", xsd::decimal()).is_ok());
        assert!(Literal::typed("-.5", xsd::decimal()).is_ok());
        assert!(Literal::typed("abc", xsd::decimal()).is_err());
        assert!(Literal::typed(".", xsd::decimal()).is_err());
        assert!(Literal::typed("12", xsd::integer()).is_ok());
        assert!(Literal::typed("1.5", xsd::integer()).is_err());
        assert!(Literal::typed("1e3", xsd::double()).is_ok());
        assert!(Literal::typed("inf", xsd::double()).is_err());
        assert!(Literal::typed("anything", xsd::string()).is_ok());
    }

    #[test]
    fn language_tag_only_on_lang_string() {
        let l = Literal::lang("hello", "en-GB").unwrap();
        assert_eq!(l.datatype().as_str(), rdf::LANG_STRING);
        assert!(Literal::lang("x", "not a tag").is_err());
        assert!(Literal::typed("x", rdf::lang_string()).is_err());
    }

    #[test]
    fn literal_escaping() {
        let l = Literal::string("a\"b\\c\nd\te\u{1}");
        assert_eq!(
            l.to_string(),
            "\"a\\\"b\\\\c\\nd\\te\\u0001\"^^<http://www.w3.org/2001/XMLSchema#string>"
        );
    }

    #[test]
    fn literal_cannot_be_subject() {
        let t = Term::Literal(Literal::string("x"));
        assert_eq!(Subject::try_from(t), Err(TermError::LiteralSubject));
    }
}
