use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::term::{BlankNode, Iri, Subject, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("blank node _:{0} occurs in both graphs")]
    BlankNodeCollision(String),
    #[error("invalid prefix name {0:?}")]
    InvalidPrefix(String),
    #[error("prefix {prefix:?} is already bound to <{existing}>")]
    PrefixConflict { prefix: String, existing: String },
}

/// Whether `name` can be used as a Turtle prefix label.
pub fn is_prefix_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

/// A set of triples plus the prefix bindings used to abbreviate them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a triple. Returns `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    /// Shorthand for inserting `(s, p, o)`.
    pub fn add(&mut self, s: impl Into<Subject>, p: Iri, o: impl Into<Term>) -> bool {
        self.insert(Triple::new(s, p, o))
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    /// Binds `prefix` to `namespace`. Rebinding a prefix to the same namespace
    /// is a no-op; rebinding it elsewhere is an error.
    pub fn bind_prefix(&mut self, prefix: &str, namespace: Iri) -> Result<(), GraphError> {
        if !is_prefix_name(prefix) {
            return Err(GraphError::InvalidPrefix(prefix.to_string()));
        }
        match self.prefixes.get(prefix) {
            Some(existing) if *existing != namespace => Err(GraphError::PrefixConflict {
                prefix: prefix.to_string(),
                existing: existing.as_str().to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.prefixes.insert(prefix.to_string(), namespace);
                Ok(())
            }
        }
    }

    /// Triples matching the given pattern; `None` is a wildcard.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&'a Subject>,
        predicate: Option<&'a Iri>,
        object: Option<&'a Term>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.iter().filter(move |t| {
            subject.is_none_or(|s| t.subject == *s)
                && predicate.is_none_or(|p| t.predicate == *p)
                && object.is_none_or(|o| t.object == *o)
        })
    }

    pub fn blank_nodes(&self) -> BTreeSet<&BlankNode> {
        self.triples.iter().flat_map(|t| t.blank_nodes()).collect()
    }

    /// Applies `f` to every blank node, producing a new graph.
    pub fn map_blank_nodes(&self, mut f: impl FnMut(&BlankNode) -> BlankNode) -> Graph {
        let triples = self
            .triples
            .iter()
            .map(|t| {
                let subject = match &t.subject {
                    Subject::Blank(b) => Subject::Blank(f(b)),
                    s => s.clone(),
                };
                let object = match &t.object {
                    Term::Blank(b) => Term::Blank(f(b)),
                    o => o.clone(),
                };
                Triple::new(subject, t.predicate.clone(), object)
            })
            .collect();
        Graph {
            triples,
            prefixes: self.prefixes.clone(),
        }
    }

    /// Set union of two graphs.
    ///
    /// Prefixes of `other` that clash with a different binding in `self` are
    /// renamed by appending the smallest free numeric suffix (`ex` becomes
    /// `ex1`). Shared blank node labels are an error unless `relabel_blanks`
    /// is set, in which case the colliding nodes of `other` are renamed the
    /// same way.
    pub fn merge(&self, other: &Graph, relabel_blanks: bool) -> Result<Graph, GraphError> {
        let mut merged = self.clone();

        for (prefix, ns) in &other.prefixes {
            match merged.prefixes.get(prefix) {
                None => {
                    merged.prefixes.insert(prefix.clone(), ns.clone());
                }
                Some(existing) if existing == ns => {}
                Some(_) => {
                    let base = if prefix.is_empty() { "ns" } else { prefix.as_str() };
                    let renamed = (1..)
                        .map(|n| format!("{base}{n}"))
                        .find(|p| !merged.prefixes.contains_key(p) && !other.prefixes.contains_key(p))
                        .expect("unbounded search");
                    merged.prefixes.insert(renamed, ns.clone());
                }
            }
        }

        let ours: BTreeSet<String> = self.blank_nodes().into_iter().map(|b| b.label().to_string()).collect();
        let theirs: BTreeSet<String> = other.blank_nodes().into_iter().map(|b| b.label().to_string()).collect();
        let clashes: Vec<&String> = theirs.intersection(&ours).collect();

        let other = if clashes.is_empty() {
            std::borrow::Cow::Borrowed(other)
        } else if !relabel_blanks {
            return Err(GraphError::BlankNodeCollision(clashes[0].clone()));
        } else {
            let mut taken: BTreeSet<String> = ours.union(&theirs).cloned().collect();
            let mut renames = BTreeMap::new();
            for label in clashes {
                let fresh = (1..)
                    .map(|n| format!("{label}{n}"))
                    .find(|l| !taken.contains(l))
                    .expect("unbounded search");
                taken.insert(fresh.clone());
                renames.insert(label.clone(), fresh);
            }
            std::borrow::Cow::Owned(other.map_blank_nodes(|b| match renames.get(b.label()) {
                Some(fresh) => BlankNode::new(fresh.clone()).expect("suffixed label stays valid"),
                None => b.clone(),
            }))
        };

        merged.triples.extend(other.triples.iter().cloned());
        Ok(merged)
    }

    /// Absorbs every triple and prefix of `other`, assuming no blank node
    /// labels are shared. Prefix clashes keep the existing binding.
    pub fn extend_from(&mut self, other: &Graph) {
        self.triples.extend(other.triples.iter().cloned());
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter);
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
            prefixes: BTreeMap::new(),
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}
