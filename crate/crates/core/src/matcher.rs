//! Whole-word, case-insensitive multi-key matching over clean text.
//!
//! Offsets are character offsets (not bytes). A match is accepted only when
//! the characters immediately outside it are not word characters
//! (alphanumeric or `_`). When accepted matches overlap, the longest wins,
//! then the leftmost; on an identical span an exact key beats a plural.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::text::{fold, fold_str, is_word_char};

/// Acronym keys, unique under case-insensitive comparison. The first-seen
/// casing of a key is its canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeySet {
    keys: Vec<String>,
    folded: HashMap<String, usize>,
}

impl KeySet {
    pub fn new<I, S>(keys: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = KeySet::default();
        for k in keys {
            set.insert(k.into());
        }
        set
    }

    /// Insert `key` unless it is empty or already present under another
    /// casing. Returns whether it was added.
    pub fn insert(&mut self, key: String) -> bool {
        if key.is_empty() {
            return false;
        }
        let f = fold_str(&key);
        if self.folded.contains_key(&f) {
            return false;
        }
        self.folded.insert(f, self.keys.len());
        self.keys.push(key);
        true
    }

    pub fn contains(&self, key: &str) -> bool {
        self.folded.contains_key(&fold_str(key))
    }

    /// Canonical casing of `key`, if present.
    pub fn canonical(&self, key: &str) -> Option<&str> {
        self.folded
            .get(&fold_str(key))
            .map(|&i| self.keys[i].as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.keys.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.keys
    }
}

impl<S: Into<String>> FromIterator<S> for KeySet {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        KeySet::new(iter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchSpan {
    /// Canonical dictionary key.
    pub key: String,
    /// Character offset of the first matched character.
    pub start: usize,
    /// Character offset one past the last matched character.
    pub end: usize,
    /// The text as it appeared.
    pub surface: String,
}

impl MatchSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Also accept a key followed by a single `s` (e.g. "CPUs" for "CPU").
    pub match_plural: bool,
}

#[derive(Debug, Default)]
struct TrieNode {
    next: Vec<(char, usize)>,
    key: Option<usize>,
}

/// Compiled matcher for one key set.
#[derive(Debug)]
pub struct KeyMatcher {
    keys: KeySet,
    nodes: Vec<TrieNode>,
    options: MatchOptions,
}

impl KeyMatcher {
    pub fn new(keys: &KeySet, options: MatchOptions) -> Self {
        let mut nodes = vec![TrieNode::default()];
        for (idx, key) in keys.iter().enumerate() {
            let mut cur = 0;
            for c in key.chars().map(fold) {
                cur = match nodes[cur].next.iter().find(|(ch, _)| *ch == c) {
                    Some(&(_, n)) => n,
                    None => {
                        nodes.push(TrieNode::default());
                        let n = nodes.len() - 1;
                        nodes[cur].next.push((c, n));
                        n
                    }
                };
            }
            nodes[cur].key = Some(idx);
        }
        KeyMatcher {
            keys: keys.clone(),
            nodes,
            options,
        }
    }

    pub fn keys(&self) -> &KeySet {
        &self.keys
    }

    pub fn find(&self, text: &str) -> Vec<MatchSpan> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let boundary_after = |end: usize| end == n || !is_word_char(chars[end]);

        // Every boundary-respecting occurrence: (start, end, key index).
        let mut cands: Vec<(usize, usize, usize)> = Vec::new();
        for start in 0..n {
            if start > 0 && is_word_char(chars[start - 1]) {
                continue;
            }
            let mut cur = 0;
            let mut pos = start;
            while pos < n {
                let c = fold(chars[pos]);
                match self.nodes[cur].next.iter().find(|(ch, _)| *ch == c) {
                    Some(&(_, nxt)) => cur = nxt,
                    None => break,
                }
                pos += 1;
                if let Some(k) = self.nodes[cur].key {
                    if boundary_after(pos) {
                        // An exact key beats a shorter key's plural on the same span.
                        if cands.last().is_some_and(|&(s, e, _)| (s, e) == (start, pos)) {
                            cands.pop();
                        }
                        cands.push((start, pos, k));
                    } else if self.options.match_plural
                        && matches!(chars[pos], 's' | 'S')
                        && boundary_after(pos + 1)
                    {
                        cands.push((start, pos + 1, k));
                    }
                }
            }
        }
        select_non_overlapping(&mut cands);
        cands
            .into_iter()
            .map(|(s, e, k)| MatchSpan {
                key: self.keys.keys[k].clone(),
                start: s,
                end: e,
                surface: chars[s..e].iter().collect(),
            })
            .collect()
    }
}

/// Keep the longest candidates first (leftmost on ties), dropping any that
/// overlap an already kept one; result is sorted by start.
fn select_non_overlapping(cands: &mut Vec<(usize, usize, usize)>) {
    cands.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, usize, usize)> = Vec::with_capacity(cands.len());
    for &c in cands.iter() {
        if kept.iter().all(|k| c.1 <= k.0 || k.1 <= c.0) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|c| c.0);
    *cands = kept;
}

/// One-shot convenience over [`KeyMatcher`] with default options.
pub fn find_matches(text: &str, keys: &KeySet) -> Vec<MatchSpan> {
    KeyMatcher::new(keys, MatchOptions::default()).find(text)
}

/// Whole-word tokens shaped like acronyms (2 to 6 characters, uppercase
/// letters and digits only, at least two letters) that are not already
/// known. Deduplicated, in first-occurrence order.
pub fn discover_candidates(text: &str, known: &KeySet) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for token in text.split(|c: char| !is_word_char(c)) {
        let len = token.chars().count();
        if !(2..=6).contains(&len) {
            continue;
        }
        let letters = token.chars().filter(|c| c.is_uppercase()).count();
        let shaped = letters >= 2
            && token
                .chars()
                .all(|c| c.is_uppercase() || c.is_ascii_digit());
        if shaped && !known.contains(token) && !out.iter().any(|t| t == token) {
            out.push(token.to_string());
        }
    }
    out
}
