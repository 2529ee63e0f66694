//! Slow, obviously-correct reference implementations. Tests compare the
//! fast paths against these on generated inputs.

use crate::content::NoiseSelectorList;
use crate::dom::{MarkupTree, Node};
use crate::matcher::{KeySet, MatchOptions, MatchSpan};
use crate::text::{fold, is_word_char};

/// Every whole-word occurrence of every key, found by comparing each
/// substring against each key, then resolved longest-first, leftmost
/// on ties, exact before plural on the same span.
pub fn matches(text: &str, keys: &KeySet, options: MatchOptions) -> Vec<MatchSpan> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let word_at = |i: usize| i < n && is_word_char(chars[i]);
    let mut found: Vec<(usize, usize, String, bool)> = Vec::new();
    for key in keys.iter() {
        let k: Vec<char> = key.chars().map(fold).collect();
        if k.len() > n {
            continue;
        }
        for start in 0..=n - k.len() {
            let end = start + k.len();
            let equal = chars[start..end].iter().map(|&c| fold(c)).eq(k.iter().copied());
            if !equal || (start > 0 && word_at(start - 1)) {
                continue;
            }
            if !word_at(end) {
                found.push((start, end, key.to_string(), false));
            } else if options.match_plural
                && matches!(chars[end], 's' | 'S')
                && !word_at(end + 1)
            {
                found.push((start, end + 1, key.to_string(), true));
            }
        }
    }

    let mut taken = vec![false; n];
    let mut kept = Vec::new();
    while !found.is_empty() {
        // Pick the longest, then leftmost, then exact remaining candidate.
        let best = (0..found.len())
            .max_by(|&a, &b| {
                let (la, lb) = (found[a].1 - found[a].0, found[b].1 - found[b].0);
                la.cmp(&lb)
                    .then(found[b].0.cmp(&found[a].0))
                    .then(found[b].3.cmp(&found[a].3))
            })
            .expect("non-empty");
        let (s, e, key, _) = found.swap_remove(best);
        if taken[s..e].iter().all(|t| !t) {
            taken[s..e].iter_mut().for_each(|t| *t = true);
            kept.push(MatchSpan {
                key,
                start: s,
                end: e,
                surface: chars[s..e].iter().collect(),
            });
        }
    }
    kept.sort_by_key(|m| m.start);
    kept
}

/// Text that survives noise removal: every text node with no noisy
/// element on its ancestor path, evaluated by walking the path.
pub fn surviving_text(tree: &MarkupTree, selectors: &NoiseSelectorList) -> String {
    fn walk(nodes: &[Node], noisy_path: bool, sel: &NoiseSelectorList, out: &mut String) {
        for n in nodes {
            match n {
                Node::Text(t) if !noisy_path => out.push_str(t),
                Node::Element(e) => walk(&e.children, noisy_path || sel.is_noise(e), sel, out),
                _ => {}
            }
        }
    }
    let mut out = String::new();
    walk(&tree.children, false, selectors, &mut out);
    out
}

/// Textbook two-pass statistics: (mean, median, sample sd, min, max).
pub fn stats(xs: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mid = s.len() / 2;
    let median = if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    };
    let sd = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, median, sd, s[0], s[s.len() - 1])
}
