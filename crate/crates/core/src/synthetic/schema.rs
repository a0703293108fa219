//! Reordering of top-level schema declarations.

use rand::seq::SliceRandom;
use rand::Rng;

/// Rewrites `xsd_text` with its top-level declarations (every element child
/// of the root) in a random order. Text between declarations stays in
/// place, so comments and whitespace are kept. Input that is not
/// well-formed XML is returned unchanged.
pub fn permute_schema_declarations(xsd_text: &str, rng: &mut impl Rng) -> String {
    let Ok(doc) = roxmltree::Document::parse(xsd_text) else {
        return xsd_text.to_string();
    };
    let slots: Vec<std::ops::Range<usize>> = doc
        .root_element()
        .children()
        .filter(|n| n.is_element())
        .map(|n| n.range())
        .collect();
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.shuffle(rng);

    let mut out = String::with_capacity(xsd_text.len());
    let mut cursor = 0;
    for (slot, &source) in slots.iter().zip(&order) {
        out.push_str(&xsd_text[cursor..slot.start]);
        out.push_str(&xsd_text[slots[source].clone()]);
        cursor = slot.end;
    }
    out.push_str(&xsd_text[cursor..]);
    out
}
