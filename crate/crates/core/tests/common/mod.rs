#![allow(dead_code)]

use acro_core::dom::{parse_html, Element, MarkupTree, Node};
use acro_core::resolve::{ResolvedTerm, TermSource};
use proptest::prelude::*;

const TAGS: &[&str] = &[
    "div", "p", "span", "a", "script", "style", "nav", "code", "article", "section", "ul", "li",
    "b", "em", "footer", "aside", "h2", "td", "pre", "header",
];
const CLASSES: &[&str] = &["", "ad-slot", "main", "share-bar", "x", "Cookie-banner", "body"];
const WORDS: &[&str] = &[
    "CPU", "cpu", "SSD", "API", "GPU", "CPUs", "RAM", "the", "a", "driver", "_x", "é", "&", "<",
    "\"q\"", "x2", "\u{a0}", "\n", "  ",
];

pub fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..8).prop_map(|w| w.join(" "))
}

fn leaf() -> impl Strategy<Value = Node> {
    text().prop_map(Node::Text)
}

pub fn node() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(4, 48, 5, |inner| {
        (
            prop::sample::select(TAGS),
            prop::sample::select(CLASSES),
            prop::sample::select(CLASSES),
            prop::collection::vec(inner, 0..5),
        )
            .prop_map(|(tag, class, id, children)| {
                let mut el = Element::new(tag);
                if !class.is_empty() {
                    el = el.with_attr("class", class);
                }
                if !id.is_empty() {
                    el = el.with_attr("id", id);
                }
                if tag == "a" {
                    el = el.with_attr("href", "/x?a=1&b=2");
                }
                el.children = children;
                Node::Element(el)
            })
    })
}

/// A generated tree after one serialize/parse pass, so implied end tags and
/// raw-text rules have already been applied.
pub fn tree() -> impl Strategy<Value = MarkupTree> {
    prop::collection::vec(node(), 1..5).prop_map(|nodes| {
        parse_html(&MarkupTree::new(nodes).to_html()).expect("serializer output parses")
    })
}

pub fn terms() -> Vec<ResolvedTerm> {
    [
        ("CPU", "Central Processing Unit", "Executes \"instructions\" & more."),
        ("SSD", "Solid State Drive", "Flash <storage>."),
        ("API", "Application Programming Interface", "A contract."),
    ]
    .into_iter()
    .map(|(k, e, d)| ResolvedTerm {
        key: k.into(),
        expansion: e.into(),
        definition: d.into(),
        source: TermSource::Dictionary,
    })
    .collect()
}
