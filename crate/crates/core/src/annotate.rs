//! Phase D: wrap acronym occurrences in `<dfn><abbr title="...">` markup.
//! Only text nodes are rewritten; attributes and text under excluded
//! ancestors are never touched.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dom::{is_text_only, Element, MarkupTree, Node};
use crate::matcher::{KeyMatcher, KeySet, MatchOptions};
use crate::resolve::ResolvedTerm;
use crate::text::fold_str;

pub const WRAPPER_OUTER: &str = "dfn";
pub const WRAPPER_INNER: &str = "abbr";

pub const DEFAULT_EXCLUDED_ANCESTORS: &[&str] = &[
    "a", "script", "style", "abbr", "dfn", "code", "pre", "textarea", "input", "button",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "PolicyFields", into = "PolicyFields")]
pub struct AnnotationPolicy {
    excluded_ancestors: BTreeSet<String>,
    pub annotate_every_occurrence: bool,
    pub match_options: MatchOptions,
}

#[derive(Serialize, Deserialize)]
struct PolicyFields {
    excluded_ancestors: Vec<String>,
    #[serde(default = "yes")]
    annotate_every_occurrence: bool,
    #[serde(default)]
    match_plural: bool,
}

fn yes() -> bool {
    true
}

impl From<PolicyFields> for AnnotationPolicy {
    fn from(f: PolicyFields) -> Self {
        let mut p = AnnotationPolicy::with_excluded(f.excluded_ancestors);
        p.annotate_every_occurrence = f.annotate_every_occurrence;
        p.match_options.match_plural = f.match_plural;
        p
    }
}

impl From<AnnotationPolicy> for PolicyFields {
    fn from(p: AnnotationPolicy) -> Self {
        PolicyFields {
            excluded_ancestors: p.excluded_ancestors.into_iter().collect(),
            annotate_every_occurrence: p.annotate_every_occurrence,
            match_plural: p.match_options.match_plural,
        }
    }
}

impl AnnotationPolicy {
    /// The wrapper's own tags are always added to `excluded`.
    pub fn with_excluded<I, S>(excluded: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set: BTreeSet<String> = excluded
            .into_iter()
            .map(|s| s.as_ref().to_ascii_lowercase())
            .collect();
        set.insert(WRAPPER_OUTER.to_string());
        set.insert(WRAPPER_INNER.to_string());
        AnnotationPolicy {
            excluded_ancestors: set,
            annotate_every_occurrence: true,
            match_options: MatchOptions::default(),
        }
    }

    pub fn excluded_ancestors(&self) -> &BTreeSet<String> {
        &self.excluded_ancestors
    }

    fn excludes(&self, el: &Element) -> bool {
        self.excluded_ancestors.contains(&el.name) || is_text_only(&el.name)
    }
}

impl Default for AnnotationPolicy {
    fn default() -> Self {
        Self::with_excluded(DEFAULT_EXCLUDED_ANCESTORS)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDocument {
    pub tree: MarkupTree,
    /// (key, wrappers inserted), in term order, for keys with at least one.
    pub annotations: Vec<(String, usize)>,
}

impl AnnotatedDocument {
    pub fn total(&self) -> usize {
        self.annotations.iter().map(|(_, n)| n).sum()
    }
}

pub fn wrapper(surface: &str, title: &str) -> Node {
    Node::Element(
        Element::new(WRAPPER_OUTER).with_child(Node::Element(
            Element::new(WRAPPER_INNER)
                .with_attr("title", title)
                .with_child(Node::text(surface)),
        )),
    )
}

/// The exact shape produced by [`wrapper`]: a bare `dfn` whose only child
/// is an `abbr` carrying only a `title`.
pub fn is_wrapper(el: &Element) -> bool {
    el.name == WRAPPER_OUTER
        && el.attrs.is_empty()
        && el.children.len() == 1
        && matches!(&el.children[0], Node::Element(inner)
            if inner.name == WRAPPER_INNER
                && inner.attrs.len() == 1
                && inner.attrs[0].0 == "title")
}

struct Annotator<'a> {
    matcher: KeyMatcher,
    titles: HashMap<String, String>,
    policy: &'a AnnotationPolicy,
    /// Folded keys already wrapped (first-occurrence mode only).
    done: HashSet<String>,
    counts: HashMap<String, usize>,
}

impl Annotator<'_> {
    fn rewrite(&mut self, nodes: Vec<Node>, excluded: bool) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        for node in nodes {
            match node {
                Node::Element(mut el) => {
                    let ex = excluded || self.policy.excludes(&el);
                    let children = std::mem::take(&mut el.children);
                    el.children = self.rewrite(children, ex);
                    out.push(Node::Element(el));
                }
                Node::Text(t) if !excluded => self.split_text(t, &mut out),
                other => out.push(other),
            }
        }
        out
    }

    fn split_text(&mut self, text: String, out: &mut Vec<Node>) {
        let mut matches = self.matcher.find(&text);
        if !self.policy.annotate_every_occurrence {
            matches.retain(|m| self.done.insert(fold_str(&m.key)));
        }
        if matches.is_empty() {
            out.push(Node::Text(text));
            return;
        }
        let offsets: Vec<usize> = text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(text.len()))
            .collect();
        let mut cursor = 0;
        for m in matches {
            let (s, e) = (offsets[m.start], offsets[m.end]);
            if s > cursor {
                out.push(Node::text(&text[cursor..s]));
            }
            let title = &self.titles[&fold_str(&m.key)];
            out.push(wrapper(&text[s..e], title));
            *self.counts.entry(m.key).or_default() += 1;
            cursor = e;
        }
        if cursor < text.len() {
            out.push(Node::text(&text[cursor..]));
        }
    }
}

/// Wrap every whole-word occurrence of each term's key in eligible text
/// nodes. The title carries the term tooltip.
pub fn annotate(
    tree: &MarkupTree,
    terms: &[ResolvedTerm],
    policy: &AnnotationPolicy,
) -> AnnotatedDocument {
    let keys = KeySet::new(terms.iter().map(|t| t.key.clone()));
    let titles = terms
        .iter()
        .map(|t| (fold_str(&t.key), t.tooltip()))
        .collect();
    let matcher = KeyMatcher::new(&keys, policy.match_options);
    let mut done = HashSet::new();
    if !policy.annotate_every_occurrence {
        collect_wrapped(&tree.children, &matcher, &mut done);
    }
    let mut a = Annotator {
        matcher,
        titles,
        policy,
        done,
        counts: HashMap::new(),
    };
    let children = a.rewrite(tree.children.clone(), false);
    let annotations = keys
        .iter()
        .filter_map(|k| a.counts.get(k).map(|&n| (k.to_string(), n)))
        .collect();
    AnnotatedDocument {
        tree: MarkupTree::new(children),
        annotations,
    }
}

/// Keys already wrapped in the input. Surfaces go back through the matcher
/// so plural forms map to their key.
fn collect_wrapped(nodes: &[Node], matcher: &KeyMatcher, into: &mut HashSet<String>) {
    for n in nodes {
        if let Node::Element(el) = n {
            if is_wrapper(el) {
                for m in matcher.find(&n.concat_text()) {
                    into.insert(fold_str(&m.key));
                }
            } else {
                collect_wrapped(&el.children, matcher, into);
            }
        }
    }
}

/// Replace every wrapper pair by its inner content, merging the freed text
/// back into its neighbours.
pub fn strip_annotations(tree: &MarkupTree) -> MarkupTree {
    MarkupTree::new(strip_nodes(tree.children.clone()))
}

fn strip_nodes(nodes: Vec<Node>) -> Vec<Node> {
    let mut out: Vec<Node> = Vec::with_capacity(nodes.len());
    // Whether the last node in `out` is text that came from an unwrap.
    let mut spliced = false;
    for node in nodes {
        match node {
            Node::Element(el) if is_wrapper(&el) => {
                let Some(Node::Element(inner)) = el.children.into_iter().next() else {
                    unreachable!("is_wrapper checked the shape");
                };
                for child in strip_nodes(inner.children) {
                    match (out.last_mut(), child) {
                        (Some(Node::Text(prev)), Node::Text(t)) => prev.push_str(&t),
                        (_, c) => out.push(c),
                    }
                }
                spliced = matches!(out.last(), Some(Node::Text(_)));
            }
            Node::Text(t) => {
                match out.last_mut() {
                    Some(Node::Text(prev)) if spliced => prev.push_str(&t),
                    _ => out.push(Node::Text(t)),
                }
                spliced = false;
            }
            Node::Element(mut el) => {
                el.children = strip_nodes(el.children);
                out.push(Node::Element(el));
                spliced = false;
            }
            other => {
                out.push(other);
                spliced = false;
            }
        }
    }
    out
}
