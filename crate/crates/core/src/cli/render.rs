//! Canonical text rendering: terms in ascending graded-lex order,
//! coefficients in `[0, p)`, joined by `" + "`.

/// Joins `(coefficient, factors)` pairs; a unit coefficient is omitted
/// unless the term has no factors, and the empty sum renders as `0`.
pub fn render_terms(terms: impl IntoIterator<Item = (u64, Vec<String>)>) -> String {
    let parts: Vec<String> = terms
        .into_iter()
        .map(|(c, factors)| match (c, factors.is_empty()) {
            (_, true) => c.to_string(),
            (1, false) => factors.join("*"),
            _ => format!("{}*{}", c, factors.join("*")),
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
