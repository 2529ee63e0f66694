//! Phase A: strip page chrome, pick the main article block, and flatten it
//! to clean text.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dom::{parse_html, Element, MarkupTree, Node};
use crate::error::{ConfigError, PipelineError};
use crate::text::normalize_whitespace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    /// URL or file path; informational only.
    pub locator: String,
    pub html: String,
}

impl SourceDocument {
    pub fn new(locator: impl Into<String>, html: impl Into<String>) -> Self {
        SourceDocument {
            locator: locator.into(),
            html: html.into(),
        }
    }

    pub fn from_bytes(locator: impl Into<String>, bytes: Vec<u8>) -> Result<Self, PipelineError> {
        let locator = locator.into();
        let html = String::from_utf8(bytes).map_err(|e| {
            PipelineError::ParseFailure(format!(
                "{locator}: not UTF-8 (invalid byte at offset {})",
                e.utf8_error().valid_up_to()
            ))
        })?;
        Ok(SourceDocument { locator, html })
    }
}

/// One noise selector. Supported forms: `tag`, `[class*=text]`,
/// `[id*=text]`. Substring tests are ASCII case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Selector {
    Tag(String),
    ClassContains(String),
    IdContains(String),
}

impl Selector {
    pub fn matches(&self, el: &Element) -> bool {
        match self {
            Selector::Tag(t) => el.name == *t,
            Selector::ClassContains(s) => el
                .attr("class")
                .is_some_and(|v| v.to_ascii_lowercase().contains(s.as_str())),
            Selector::IdContains(s) => el
                .attr("id")
                .is_some_and(|v| v.to_ascii_lowercase().contains(s.as_str())),
        }
    }
}

impl FromStr for Selector {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ConfigError(format!("unsupported selector {s:?}"));
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (attr, value) = inner.split_once("*=").ok_or_else(bad)?;
            let value = value.trim().trim_matches(|c| c == '"' || c == '\'');
            if value.is_empty() {
                return Err(bad());
            }
            let value = value.to_ascii_lowercase();
            return match attr.trim() {
                "class" => Ok(Selector::ClassContains(value)),
                "id" => Ok(Selector::IdContains(value)),
                _ => Err(bad()),
            };
        }
        if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Ok(Selector::Tag(s.to_ascii_lowercase()));
        }
        Err(bad())
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Tag(t) => f.write_str(t),
            Selector::ClassContains(v) => write!(f, "[class*={v}]"),
            Selector::IdContains(v) => write!(f, "[id*={v}]"),
        }
    }
}

impl Serialize for Selector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Selector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const DEFAULT_NOISE_TAGS: &[&str] = &[
    "header", "footer", "nav", "aside", "script", "style", "noscript", "form", "iframe",
];
const DEFAULT_NOISE_SUBSTRINGS: &[&str] = &[
    "cookie", "banner", "sidebar", "menu", "nav", "footer", "header", "ad-",
];

/// Ordered, non-empty selector list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Selector>", into = "Vec<Selector>")]
pub struct NoiseSelectorList(Vec<Selector>);

impl NoiseSelectorList {
    pub fn new(selectors: Vec<Selector>) -> Result<Self, ConfigError> {
        if selectors.is_empty() {
            return Err(ConfigError("noise selector list must not be empty".into()));
        }
        Ok(NoiseSelectorList(selectors))
    }

    pub fn parse_all<S: AsRef<str>>(items: &[S]) -> Result<Self, ConfigError> {
        let sels = items
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sels)
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.0
    }

    /// True when `el` must be removed: it matches a selector or is a
    /// script/style element.
    pub fn is_noise(&self, el: &Element) -> bool {
        el.name == "script" || el.name == "style" || self.0.iter().any(|s| s.matches(el))
    }
}

impl Default for NoiseSelectorList {
    fn default() -> Self {
        let mut v: Vec<Selector> = DEFAULT_NOISE_TAGS
            .iter()
            .map(|t| Selector::Tag(t.to_string()))
            .collect();
        for sub in DEFAULT_NOISE_SUBSTRINGS {
            v.push(Selector::ClassContains(sub.to_string()));
            v.push(Selector::IdContains(sub.to_string()));
        }
        NoiseSelectorList(v)
    }
}

impl TryFrom<Vec<Selector>> for NoiseSelectorList {
    type Error = ConfigError;
    fn try_from(v: Vec<Selector>) -> Result<Self, ConfigError> {
        Self::new(v)
    }
}

impl From<NoiseSelectorList> for Vec<Selector> {
    fn from(l: NoiseSelectorList) -> Self {
        l.0
    }
}

/// Parse `doc` and remove every noise element together with its subtree.
pub fn sanitize(
    doc: &SourceDocument,
    selectors: &NoiseSelectorList,
) -> Result<MarkupTree, PipelineError> {
    if doc.html.trim().is_empty() {
        return Err(PipelineError::EmptyDocument);
    }
    let tree = parse_html(&doc.html)?;
    sanitize_tree(tree, selectors)
}

pub fn sanitize_tree(
    mut tree: MarkupTree,
    selectors: &NoiseSelectorList,
) -> Result<MarkupTree, PipelineError> {
    fn strip(nodes: &mut Vec<Node>, selectors: &NoiseSelectorList) {
        nodes.retain(|n| !matches!(n, Node::Element(e) if selectors.is_noise(e)));
        for n in nodes.iter_mut() {
            if let Node::Element(e) = n {
                strip(&mut e.children, selectors);
            }
        }
    }
    strip(&mut tree.children, selectors);
    if tree.concat_text().trim().is_empty() {
        return Err(PipelineError::EmptyDocument);
    }
    Ok(tree)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedArticle {
    pub body: MarkupTree,
    pub clean_text: String,
}

/// Block elements considered as main-content candidates.
const CANDIDATE_TAGS: &[&str] = &[
    "article", "main", "section", "div", "p", "td", "blockquote", "pre", "li",
];

/// Candidates with fewer normalized characters than this are ineligible.
pub const MIN_CANDIDATE_CHARS: usize = 25;

/// Bonus per paragraph in a candidate's subtree (itself included).
pub const PARAGRAPH_BONUS: f64 = 25.0;

/// Score breakdown for one candidate block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockScore {
    pub text_len: usize,
    pub anchor_len: usize,
    pub paragraphs: usize,
}

impl BlockScore {
    pub fn of(el: &Element) -> Self {
        let text_len = normalize_whitespace(&Node::Element(el.clone()).concat_text())
            .chars()
            .count();
        let mut anchor_len = 0;
        let mut paragraphs = usize::from(el.name == "p");
        fn walk(nodes: &[Node], anchor_len: &mut usize, paragraphs: &mut usize) {
            for n in nodes {
                if let Node::Element(e) = n {
                    if e.name == "a" {
                        *anchor_len += normalize_whitespace(&n.concat_text()).chars().count();
                    } else {
                        walk(&e.children, anchor_len, paragraphs);
                    }
                    if e.name == "p" {
                        *paragraphs += 1;
                    }
                }
            }
        }
        walk(&el.children, &mut anchor_len, &mut paragraphs);
        BlockScore {
            text_len,
            anchor_len,
            paragraphs,
        }
    }

    pub fn link_density(&self) -> f64 {
        if self.text_len == 0 {
            return 0.0;
        }
        (self.anchor_len as f64 / self.text_len as f64).min(1.0)
    }

    pub fn eligible(&self) -> bool {
        self.text_len >= MIN_CANDIDATE_CHARS
    }

    /// `text_len * (1 - link_density) + 25 * paragraphs`.
    pub fn score(&self) -> f64 {
        self.text_len as f64 * (1.0 - self.link_density()) + PARAGRAPH_BONUS * self.paragraphs as f64
    }
}

/// Choose the highest-scoring candidate block; ties go to the earliest in
/// document order. Falls back to the whole tree when no block element is
/// eligible but the document as a whole carries enough text.
pub fn extract_main_content(tree: &MarkupTree) -> Result<ExtractedArticle, PipelineError> {
    let mut best: Option<(&Element, f64)> = None;
    tree.for_each_element(|el| {
        if !CANDIDATE_TAGS.contains(&el.name.as_str()) {
            return;
        }
        let s = BlockScore::of(el);
        if !s.eligible() {
            return;
        }
        let score = s.score();
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((el, score));
        }
    });
    let body = match best {
        Some((el, _)) => MarkupTree::new(vec![Node::Element(el.clone())]),
        None => {
            let whole = normalize_whitespace(&tree.concat_text());
            if whole.chars().count() < MIN_CANDIDATE_CHARS {
                return Err(PipelineError::NoContent);
            }
            tree.clone()
        }
    };
    let clean_text = normalize_whitespace(&body.concat_text());
    Ok(ExtractedArticle { body, clean_text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sanitized(html: &str) -> MarkupTree {
        sanitize(&SourceDocument::new("test", html), &NoiseSelectorList::default()).unwrap()
    }

    #[test]
    fn nav_removed() {
        assert_eq!(
            sanitized("<nav>menu</nav><p>body</p>").to_html(),
            "<p>body</p>"
        );
    }

    #[test]
    fn script_removed() {
        assert_eq!(
            sanitized("<p>keep</p><script>x()</script>").to_html(),
            "<p>keep</p>"
        );
    }

    #[test]
    fn cookie_banner_removed() {
        // `cookie-banner` hits [class*=cookie] and [class*=banner]; the
        // article matches nothing.
        assert_eq!(
            sanitized("<div class=\"cookie-banner\">accept</div><article>text</article>").to_html(),
            "<article>text</article>"
        );
    }

    #[test]
    fn style_removed_even_with_custom_selectors() {
        let sels = NoiseSelectorList::parse_all(&["nav"]).unwrap();
        let tree = sanitize(
            &SourceDocument::new("t", "<style>p{}</style><p>x</p>"),
            &sels,
        )
        .unwrap();
        assert_eq!(tree.to_html(), "<p>x</p>");
    }

    #[test]
    fn empty_after_stripping() {
        let err = sanitize(
            &SourceDocument::new("t", "<nav>only chrome</nav>"),
            &NoiseSelectorList::default(),
        )
        .unwrap_err();
        assert_eq!(err, PipelineError::EmptyDocument);
        assert_eq!(
            sanitize(&SourceDocument::new("t", "  "), &NoiseSelectorList::default()).unwrap_err(),
            PipelineError::EmptyDocument
        );
    }

    #[test]
    fn invalid_utf8_is_parse_failure() {
        let err = SourceDocument::from_bytes("x", vec![b'<', 0xff, 0xfe]).unwrap_err();
        assert!(matches!(err, PipelineError::ParseFailure(_)));
    }

    #[test]
    fn selector_grammar() {
        assert_eq!("nav".parse::<Selector>().unwrap(), Selector::Tag("nav".into()));
        assert_eq!(
            "[class*=Cookie]".parse::<Selector>().unwrap(),
            Selector::ClassContains("cookie".into())
        );
        assert_eq!(
            "[id*='ad-']".parse::<Selector>().unwrap(),
            Selector::IdContains("ad-".into())
        );
        for bad in ["", "div > p", "[title*=x]", "[class=x]", ".menu", "[class*=]"] {
            assert!(bad.parse::<Selector>().is_err(), "{bad:?} should be rejected");
        }
        assert!(NoiseSelectorList::new(vec![]).is_err());
    }

    #[test]
    fn default_list_round_trips_through_display() {
        let list = NoiseSelectorList::default();
        let strings: Vec<String> = list.selectors().iter().map(|s| s.to_string()).collect();
        assert_eq!(NoiseSelectorList::parse_all(&strings).unwrap(), list);
    }

    #[test]
    fn single_paragraph_is_extracted() {
        let text = "x".repeat(300);
        let tree = sanitized(&format!("<html><body><p>{text}</p></body></html>"));
        let art = extract_main_content(&tree).unwrap();
        assert_eq!(art.body.to_html(), format!("<p>{text}</p>"));
        assert_eq!(art.clean_text, text);
    }

    #[test]
    fn plain_text_beats_link_farm() {
        // Plain div: 500 chars, no links, no paragraphs -> 500.
        // Link div: 500 chars, 450 inside anchors -> 500 * (1 - 0.9) = 50.
        let plain = "a".repeat(500);
        let linked = format!("{}<a href=\"#\">{}</a>", "b".repeat(50), "c".repeat(450));
        let html = format!("<body><div id=\"links\">{linked}</div><div id=\"plain\">{plain}</div></body>");
        let tree = sanitized(&html);
        let divs: Vec<&Element> = tree.children[0].as_element().unwrap().children
            .iter()
            .filter_map(Node::as_element)
            .collect();
        assert!((BlockScore::of(divs[0]).score() - 50.0).abs() < 1e-9);
        assert_eq!(BlockScore::of(divs[1]).score(), 500.0);
        let art = extract_main_content(&tree).unwrap();
        assert_eq!(art.clean_text, plain);
    }

    #[test]
    fn too_little_text_is_no_content() {
        let tree = sanitized("<p>ten chars!</p>");
        assert_eq!(extract_main_content(&tree).unwrap_err(), PipelineError::NoContent);
    }

    #[test]
    fn ties_go_to_document_order() {
        let a = "a".repeat(40);
        let b = "b".repeat(40);
        let tree = sanitized(&format!("<section>{a}</section><section>{b}</section>"));
        assert_eq!(extract_main_content(&tree).unwrap().clean_text, a);
    }

    #[test]
    fn bare_text_document_falls_back_to_whole_tree() {
        let tree = sanitized("just some loose text without any block element around it");
        let art = extract_main_content(&tree).unwrap();
        assert_eq!(art.body, tree);
    }

    #[test]
    fn paragraph_bonus_counts_nested_paragraphs() {
        let tree = sanitized("<div><p>first paragraph here.</p> <p>second paragraph here</p></div>");
        let div = tree.children[0].as_element().unwrap();
        let s = BlockScore::of(div);
        assert_eq!(s.paragraphs, 2);
        assert_eq!(s.score(), s.text_len as f64 + 50.0);
    }
}
