//! Graph isomorphism up to blank node renaming.
//!
//! Two strategies are provided. [`isomorphic_brute_force`] searches the
//! bijections between blank nodes directly (with partial-assignment pruning)
//! and is limited to [`BRUTE_FORCE_LIMIT`] blank nodes. [`refine`] colours
//! blank nodes by iterated neighbourhood hashing; when every colour class is
//! a singleton the colouring fixes the only candidate bijection.
//! [`isomorphic`] combines the two.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::{DefaultHasher, Hash, Hasher};

use thiserror::Error;

use super::graph::Graph;
use super::term::{BlankNode, Subject, Term, Triple};

pub const BRUTE_FORCE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("{0} blank nodes exceed the exact-check bound and refinement was inconclusive")]
    TooLargeForExactCheck(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

struct Split<'g> {
    ground: BTreeSet<&'g Triple>,
    other: Vec<&'g Triple>,
    blanks: Vec<&'g BlankNode>,
}

fn split(g: &Graph) -> Split<'_> {
    let (ground, other): (Vec<_>, Vec<_>) = g.iter().partition(|t| t.is_ground());
    Split {
        ground: ground.into_iter().collect(),
        other,
        blanks: g.blank_nodes().into_iter().collect(),
    }
}

/// Cheap necessary conditions. `Some(false)` settles the question.
fn prefilter(a: &Split, b: &Split) -> Option<bool> {
    if a.ground != b.ground || a.other.len() != b.other.len() || a.blanks.len() != b.blanks.len() {
        return Some(false);
    }
    if a.blanks.is_empty() {
        return Some(true);
    }
    None
}

fn map_triple(t: &Triple, map: &HashMap<&BlankNode, &BlankNode>) -> Triple {
    let subject = match &t.subject {
        Subject::Blank(b) => Subject::Blank(map[b].clone()),
        s => s.clone(),
    };
    let object = match &t.object {
        Term::Blank(b) => Term::Blank(map[b].clone()),
        o => o.clone(),
    };
    Triple::new(subject, t.predicate.clone(), object)
}

/// Backtracking search over bijections `a.blanks -> b.blanks`, restricted to
/// pairs accepted by `allowed`. A triple of `a` is checked as soon as all of
/// its blank nodes are assigned.
fn search(a: &Split, b: &Split, allowed: &dyn Fn(usize, usize) -> bool) -> bool {
    let index: HashMap<&BlankNode, usize> =
        a.blanks.iter().enumerate().map(|(i, bn)| (*bn, i)).collect();
    let mut due: Vec<Vec<&Triple>> = vec![Vec::new(); a.blanks.len()];
    for t in &a.other {
        let last = t.blank_nodes().map(|bn| index[bn]).max().expect("non-ground");
        due[last].push(t);
    }
    let target: HashSet<&Triple> = b.other.iter().copied().collect();
    let mut map: HashMap<&BlankNode, &BlankNode> = HashMap::new();
    let mut used = vec![false; b.blanks.len()];

    #[allow(clippy::too_many_arguments)]
    fn step<'g>(
        depth: usize,
        a: &Split<'g>,
        b: &Split<'g>,
        due: &[Vec<&Triple>],
        target: &HashSet<&Triple>,
        map: &mut HashMap<&'g BlankNode, &'g BlankNode>,
        used: &mut [bool],
        allowed: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if depth == a.blanks.len() {
            return true;
        }
        for j in 0..b.blanks.len() {
            if used[j] || !allowed(depth, j) {
                continue;
            }
            map.insert(a.blanks[depth], b.blanks[j]);
            let consistent = due[depth]
                .iter()
                .all(|t| target.contains(&map_triple(t, map)));
            if consistent {
                used[j] = true;
                if step(depth + 1, a, b, due, target, map, used, allowed) {
                    return true;
                }
                used[j] = false;
            }
            map.remove(a.blanks[depth]);
        }
        false
    }

    step(0, a, b, &due, &target, &mut map, &mut used, allowed)
}

/// Exact check by exhaustive search over blank node bijections.
pub fn isomorphic_brute_force(a: &Graph, b: &Graph) -> Result<bool, IsoError> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let (sa, sb) = (split(a), split(b));
    if sa.blanks.len() > BRUTE_FORCE_LIMIT || sb.blanks.len() > BRUTE_FORCE_LIMIT {
        return Err(IsoError::TooLargeForExactCheck(sa.blanks.len().max(sb.blanks.len())));
    }
    if let Some(answer) = prefilter(&sa, &sb) {
        return Ok(answer);
    }
    Ok(search(&sa, &sb, &|_, _| true))
}

fn hash_of(value: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// One refinement round: each blank node's new colour hashes its old colour
/// with the sorted multiset of its incident edges.
fn next_colors<'g>(s: &Split<'g>, colors: &HashMap<&'g BlankNode, u64>) -> HashMap<&'g BlankNode, u64> {
    let mut signatures: HashMap<&BlankNode, Vec<u64>> = HashMap::new();
    let key = |t: &Term, me: &BlankNode| -> u64 {
        match t {
            Term::Blank(b) if b == me => hash_of(("self", colors[b])),
            Term::Blank(b) => hash_of(("blank", colors[b])),
            other => hash_of(("ground", other)),
        }
    };
    for t in &s.other {
        if let Subject::Blank(sb) = &t.subject {
            signatures
                .entry(sb)
                .or_default()
                .push(hash_of((0u8, &t.predicate, key(&t.object, sb))));
        }
        if let Term::Blank(ob) = &t.object {
            let subject_term = Term::from(t.subject.clone());
            signatures
                .entry(ob)
                .or_default()
                .push(hash_of((1u8, &t.predicate, key(&subject_term, ob))));
        }
    }
    s.blanks
        .iter()
        .map(|bn| {
            let mut sig = signatures.remove(bn).unwrap_or_default();
            sig.sort_unstable();
            (*bn, hash_of((colors[bn], sig)))
        })
        .collect()
}

fn histogram(colors: &HashMap<&BlankNode, u64>) -> Vec<u64> {
    let mut h: Vec<u64> = colors.values().copied().collect();
    h.sort_unstable();
    h
}

type Coloring<'g> = HashMap<&'g BlankNode, u64>;

fn class_count(colors: &HashMap<&BlankNode, u64>) -> usize {
    colors.values().collect::<HashSet<_>>().len()
}

/// Runs colour refinement on both graphs in lockstep until the partitions
/// stop splitting. Returns the stable colourings, or `None` when the colour
/// histograms diverge (which proves non-isomorphism).
fn stable_colors<'g>(
    sa: &Split<'g>,
    sb: &Split<'g>,
) -> Option<(Coloring<'g>, Coloring<'g>)> {
    let mut ca: HashMap<&BlankNode, u64> = sa.blanks.iter().map(|b| (*b, 0)).collect();
    let mut cb: HashMap<&BlankNode, u64> = sb.blanks.iter().map(|b| (*b, 0)).collect();
    let mut classes = 1;
    loop {
        let na = next_colors(sa, &ca);
        let nb = next_colors(sb, &cb);
        if histogram(&na) != histogram(&nb) {
            return None;
        }
        let new_classes = class_count(&na);
        ca = na;
        cb = nb;
        if new_classes == classes {
            return Some((ca, cb));
        }
        classes = new_classes;
    }
}

/// Decides isomorphism by colour refinement alone, when it can.
pub fn refine(a: &Graph, b: &Graph) -> Refinement {
    if a.len() != b.len() {
        return Refinement::NotIsomorphic;
    }
    let (sa, sb) = (split(a), split(b));
    match prefilter(&sa, &sb) {
        Some(true) => return Refinement::Isomorphic,
        Some(false) => return Refinement::NotIsomorphic,
        None => {}
    }
    let Some((ca, cb)) = stable_colors(&sa, &sb) else {
        return Refinement::NotIsomorphic;
    };
    if class_count(&ca) != sa.blanks.len() {
        return Refinement::Inconclusive;
    }
    let by_color: HashMap<u64, &BlankNode> = cb.iter().map(|(b, c)| (*c, *b)).collect();
    let map: HashMap<&BlankNode, &BlankNode> = ca.iter().map(|(b, c)| (*b, by_color[c])).collect();
    let target: HashSet<&Triple> = sb.other.iter().copied().collect();
    if sa.other.iter().all(|t| target.contains(&map_triple(t, &map))) {
        Refinement::Isomorphic
    } else {
        Refinement::NotIsomorphic
    }
}

/// True iff some bijection over blank nodes maps `a` onto `b`.
///
/// Refinement answers most cases outright. Otherwise a colour-constrained
/// exhaustive search runs when the blank node count is within
/// [`BRUTE_FORCE_LIMIT`].
pub fn isomorphic(a: &Graph, b: &Graph) -> Result<bool, IsoError> {
    match refine(a, b) {
        Refinement::Isomorphic => return Ok(true),
        Refinement::NotIsomorphic => return Ok(false),
        Refinement::Inconclusive => {}
    }
    let (sa, sb) = (split(a), split(b));
    if sa.blanks.len() > BRUTE_FORCE_LIMIT {
        return Err(IsoError::TooLargeForExactCheck(sa.blanks.len()));
    }
    let (ca, cb) = stable_colors(&sa, &sb).expect("refinement already compared histograms");
    let allowed = |i: usize, j: usize| ca[sa.blanks[i]] == cb[sb.blanks[j]];
    Ok(search(&sa, &sb, &allowed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{ntriples, Iri, Literal};

    fn nt(s: &str) -> Graph {
        ntriples::parse(s).unwrap()
    }

    #[test]
    fn identity() {
        let g = nt("_:a <http://e/p> _:b .\n_:b <http://e/p> \"x\" .\n");
        assert_eq!(isomorphic(&g, &g), Ok(true));
        assert_eq!(isomorphic_brute_force(&g, &g), Ok(true));
    }

    #[test]
    fn renamed_blank_nodes() {
        let a = nt("_:a <http://e/p> _:b .\n_:b <http://e/q> <http://e/o> .\n");
        let b = nt("_:x <http://e/p> _:y .\n_:y <http://e/q> <http://e/o> .\n");
        assert_eq!(isomorphic_brute_force(&a, &b), Ok(true));
        assert_eq!(isomorphic(&a, &b), Ok(true));
        assert_eq!(refine(&a, &b), Refinement::Isomorphic);
    }

    #[test]
    fn different_sizes() {
        let a = nt("<http://e/s> <http://e/p> <http://e/o> .\n");
        let b = Graph::new();
        assert_eq!(isomorphic(&a, &b), Ok(false));
        assert_eq!(isomorphic_brute_force(&a, &b), Ok(false));
    }

    #[test]
    fn ground_mismatch() {
        let a = nt("<http://e/s> <http://e/p> <http://e/o> .\n");
        let b = nt("<http://e/s> <http://e/p> <http://e/x> .\n");
        assert_eq!(isomorphic(&a, &b), Ok(false));
    }

    // Two 3-cycles versus one 6-cycle: every node looks alike to refinement.
    #[test]
    fn regular_graphs_need_search() {
        let cycle = |labels: &[&str]| -> String {
            (0..labels.len())
                .map(|i| format!("_:{} <http://e/p> _:{} .\n", labels[i], labels[(i + 1) % labels.len()]))
                .collect()
        };
        let two_triangles = nt(&(cycle(&["a", "b", "c"]) + &cycle(&["d", "e", "f"])));
        let hexagon = nt(&cycle(&["a", "b", "c", "d", "e", "f"]));
        assert_eq!(refine(&two_triangles, &hexagon), Refinement::Inconclusive);
        assert_eq!(isomorphic(&two_triangles, &hexagon), Ok(false));
        assert_eq!(isomorphic_brute_force(&two_triangles, &hexagon), Ok(false));

        let hexagon2 = nt(&cycle(&["u", "v", "w", "x", "y", "z"]));
        assert_eq!(isomorphic(&hexagon, &hexagon2), Ok(true));
    }

    #[test]
    fn too_large_and_symmetric() {
        let p = Iri::new("http://e/p").unwrap();
        let mut g = Graph::new();
        for i in 0..13 {
            g.add(
                BlankNode::new(format!("n{i}")).unwrap(),
                p.clone(),
                Literal::string("same"),
            );
        }
        assert!(matches!(
            isomorphic(&g, &g),
            Err(IsoError::TooLargeForExactCheck(13))
        ));
        assert!(isomorphic_brute_force(&g, &g).is_err());
    }
}
