//! Case folding, whitespace normalization and token splitting.

/// Simple (single character) lowercase mapping. Keeps the character count
/// unchanged, so character offsets survive folding.
pub fn fold_char(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

pub fn fold(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

/// Case folds, collapses whitespace runs to a single space and trims.
pub fn normalize_surface(s: &str) -> String {
    let folded = fold(s);
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits on every non-alphanumeric character. Yields `(folded surface, char offset)`.
pub fn split_tokens(text: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, c) in text.chars().enumerate() {
        if c.is_alphanumeric() {
            if current.is_empty() {
                start = i;
            }
            current.push(fold_char(c));
        } else if !current.is_empty() {
            out.push((std::mem::take(&mut current), start));
        }
    }
    if !current.is_empty() {
        out.push((current, start));
    }
    out
}
