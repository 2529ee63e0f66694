//! Owned markup tree with a tolerant HTML parser and a stable serializer.
//!
//! The parser follows the browser recovery rules that matter for article
//! pages (implied `</p>`, `</li>`, table cell closes, stray end tags, EOF
//! auto-close) without building the implicit `html`/`head`/`body` scaffold.
//! A fragment parses to a fragment, so a serialized tree reparses to the
//! same tree.

use std::fmt::Write as _;

use crate::error::PipelineError;

/// A parsed document: an ordered list of top-level nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MarkupTree {
    pub children: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
    Comment(String),
    /// Raw content between `<!` and `>`, e.g. `DOCTYPE html`.
    Doctype(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    /// Lowercase tag name.
    pub name: String,
    /// Attributes in source order; names are lowercase.
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Element {
            name: name.into(),
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.push((name.into(), value.into()));
        self
    }

    pub fn with_child(mut self, child: Node) -> Self {
        self.children.push(child);
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

impl Node {
    pub fn text(s: impl Into<String>) -> Node {
        Node::Text(s.into())
    }

    pub fn as_element(&self) -> Option<&Element> {
        match self {
            Node::Element(e) => Some(e),
            _ => None,
        }
    }

    fn append_text(&self, out: &mut String) {
        match self {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => e.children.iter().for_each(|c| c.append_text(out)),
            Node::Comment(_) | Node::Doctype(_) => {}
        }
    }

    /// Concatenation of every descendant text node, in document order.
    pub fn concat_text(&self) -> String {
        let mut out = String::new();
        self.append_text(&mut out);
        out
    }
}

impl MarkupTree {
    pub fn new(children: Vec<Node>) -> Self {
        MarkupTree { children }
    }

    pub fn concat_text(&self) -> String {
        let mut out = String::new();
        self.children.iter().for_each(|c| c.append_text(&mut out));
        out
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn has_text(&self) -> bool {
        fn any_text(nodes: &[Node]) -> bool {
            nodes.iter().any(|n| match n {
                Node::Text(t) => !t.is_empty(),
                Node::Element(e) => any_text(&e.children),
                _ => false,
            })
        }
        any_text(&self.children)
    }

    /// Depth-first visit of every element in document order.
    pub fn for_each_element<'a>(&'a self, mut f: impl FnMut(&'a Element)) {
        fn walk<'a>(nodes: &'a [Node], f: &mut impl FnMut(&'a Element)) {
            for n in nodes {
                if let Node::Element(e) = n {
                    f(e);
                    walk(&e.children, f);
                }
            }
        }
        walk(&self.children, &mut f);
    }

    pub fn element_count(&self) -> usize {
        let mut n = 0;
        self.for_each_element(|_| n += 1);
        n
    }

    pub fn to_html(&self) -> String {
        let mut out = String::new();
        for n in &self.children {
            serialize_node(n, None, &mut out);
        }
        out
    }
}

pub(crate) const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link", "meta", "param",
    "source", "track", "wbr",
];

/// Content is literal text up to the matching end tag; no entity decoding.
const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style", "xmp", "iframe", "noembed", "noframes"];

/// Content is text up to the matching end tag; entities are decoded.
const RCDATA_ELEMENTS: &[&str] = &["title", "textarea"];

/// Start tags that implicitly close an open `<p>`.
const CLOSES_P: &[&str] = &[
    "address", "article", "aside", "blockquote", "details", "dialog", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "summary", "table", "ul",
];

/// Elements that bound the search for an implicitly closed element.
const SCOPE_BOUNDARIES: &[&str] = &[
    "applet", "button", "caption", "html", "marquee", "object", "table", "td", "template", "th",
];

pub fn is_void(name: &str) -> bool {
    VOID_ELEMENTS.contains(&name)
}

/// True for elements whose children are character data only (never markup).
pub fn is_text_only(name: &str) -> bool {
    RAW_TEXT_ELEMENTS.contains(&name) || RCDATA_ELEMENTS.contains(&name)
}

/// Parse HTML text into a tree, repairing malformed markup the way a
/// browser would for the common cases.
///
/// Fails only for content that is not markup at all (NUL bytes, which
/// indicate binary input).
pub fn parse_html(input: &str) -> Result<MarkupTree, PipelineError> {
    if let Some(pos) = input.find('\0') {
        return Err(PipelineError::ParseFailure(format!(
            "binary content (NUL byte at offset {pos})"
        )));
    }
    let mut builder = TreeBuilder::default();
    let mut tok = Tokenizer::new(input);
    while let Some(token) = tok.next_token() {
        match token {
            Token::Text(t) => builder.text(t),
            Token::Comment(c) => builder.leaf(Node::Comment(c)),
            Token::Doctype(d) => builder.leaf(Node::Doctype(d)),
            Token::EndTag(name) => builder.end_tag(&name),
            Token::StartTag {
                name,
                attrs,
                self_closing,
            } => {
                let text_only = is_text_only(&name);
                builder.start_tag(&name, attrs, self_closing);
                if text_only && !self_closing {
                    let raw = tok.consume_raw_text(&name);
                    let content = if RCDATA_ELEMENTS.contains(&name.as_str()) {
                        decode_entities(&raw)
                    } else {
                        raw
                    };
                    builder.text(content);
                    builder.end_tag(&name);
                }
            }
        }
    }
    Ok(builder.finish())
}

#[derive(Debug)]
enum Token {
    Text(String),
    Comment(String),
    Doctype(String),
    StartTag {
        name: String,
        attrs: Vec<(String, String)>,
        self_closing: bool,
    },
    EndTag(String),
}

struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(src: &'a str) -> Self {
        Tokenizer { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn next_token(&mut self) -> Option<Token> {
        let rest = self.rest();
        if rest.is_empty() {
            return None;
        }
        if rest.starts_with('<') {
            if let Some(tok) = self.try_markup() {
                return Some(tok);
            }
            // A `<` that does not open markup is literal text.
            let after = rest.strip_prefix('<').unwrap_or(rest);
            let next_lt = after.find('<').map(|i| i + 1).unwrap_or(rest.len());
            self.pos += next_lt;
            return Some(Token::Text(decode_entities(&rest[..next_lt])));
        }
        let end = rest.find('<').unwrap_or(rest.len());
        self.pos += end;
        Some(Token::Text(decode_entities(&rest[..end])))
    }

    fn try_markup(&mut self) -> Option<Token> {
        let rest = self.rest();
        let bytes = rest.as_bytes();
        if let Some(body) = rest.strip_prefix("<!--") {
            let (content, consumed) = match body.find("-->") {
                Some(i) => (&body[..i], 4 + i + 3),
                None => (body, rest.len()),
            };
            self.pos += consumed;
            return Some(Token::Comment(content.to_string()));
        }
        if rest.starts_with("<!") {
            let end = rest.find('>').map(|i| i + 1).unwrap_or(rest.len());
            let inner = rest[2..end].trim_end_matches('>');
            self.pos += end;
            return Some(if inner.len() >= 7 && inner[..7].eq_ignore_ascii_case("doctype") {
                Token::Doctype(inner.to_string())
            } else {
                Token::Comment(inner.to_string())
            });
        }
        if rest.starts_with("<?") {
            let end = rest.find('>').map(|i| i + 1).unwrap_or(rest.len());
            let inner = rest[1..end].trim_end_matches('>');
            self.pos += end;
            return Some(Token::Comment(inner.to_string()));
        }
        if rest.starts_with("</") {
            if bytes.get(2).is_some_and(|b| b.is_ascii_alphabetic()) {
                let end = rest.find('>').map(|i| i + 1).unwrap_or(rest.len());
                let name: String = rest[2..end]
                    .chars()
                    .take_while(|c| !c.is_whitespace() && *c != '/' && *c != '>')
                    .collect();
                self.pos += end;
                return Some(Token::EndTag(name.to_ascii_lowercase()));
            }
            if bytes.get(2) == Some(&b'>') {
                // `</>` is dropped entirely.
                self.pos += 3;
                return Some(Token::Text(String::new()));
            }
            let end = rest.find('>').map(|i| i + 1).unwrap_or(rest.len());
            let inner = rest[2..end].trim_end_matches('>');
            self.pos += end;
            return Some(Token::Comment(inner.to_string()));
        }
        if bytes.get(1).is_some_and(|b| b.is_ascii_alphabetic()) {
            return Some(self.start_tag());
        }
        None
    }

    fn start_tag(&mut self) -> Token {
        let s = self.src;
        let mut i = self.pos + 1;
        let name_start = i;
        while i < s.len() {
            let c = s.as_bytes()[i];
            if c.is_ascii_whitespace() || c == b'/' || c == b'>' {
                break;
            }
            i += 1;
        }
        let name = s[name_start..i].to_ascii_lowercase();
        let mut attrs: Vec<(String, String)> = Vec::new();
        let mut self_closing = false;
        loop {
            while i < s.len() && s.as_bytes()[i].is_ascii_whitespace() {
                i += 1;
            }
            if i >= s.len() {
                break;
            }
            match s.as_bytes()[i] {
                b'>' => {
                    i += 1;
                    break;
                }
                b'/' => {
                    i += 1;
                    if s.as_bytes().get(i) == Some(&b'>') {
                        self_closing = true;
                        i += 1;
                        break;
                    }
                    continue;
                }
                _ => {}
            }
            // Attribute name.
            let an_start = i;
            i += 1;
            while i < s.len() {
                let c = s.as_bytes()[i];
                if c.is_ascii_whitespace() || c == b'/' || c == b'>' || c == b'=' {
                    break;
                }
                i += 1;
            }
            let attr_name = s[an_start..i].to_ascii_lowercase();
            let mut j = i;
            while j < s.len() && s.as_bytes()[j].is_ascii_whitespace() {
                j += 1;
            }
            let mut value = String::new();
            if s.as_bytes().get(j) == Some(&b'=') {
                j += 1;
                while j < s.len() && s.as_bytes()[j].is_ascii_whitespace() {
                    j += 1;
                }
                match s.as_bytes().get(j) {
                    Some(&q) if q == b'"' || q == b'\'' => {
                        let vstart = j + 1;
                        let vend = s[vstart..]
                            .find(q as char)
                            .map(|k| vstart + k)
                            .unwrap_or(s.len());
                        value = decode_entities(&s[vstart..vend]);
                        j = (vend + 1).min(s.len());
                    }
                    _ => {
                        let vstart = j;
                        while j < s.len() {
                            let c = s.as_bytes()[j];
                            if c.is_ascii_whitespace() || c == b'>' {
                                break;
                            }
                            j += 1;
                        }
                        value = decode_entities(&s[vstart..j]);
                    }
                }
                i = j;
            }
            if !attrs.iter().any(|(n, _)| *n == attr_name) {
                attrs.push((attr_name, value));
            }
        }
        self.pos = i.min(s.len());
        Token::StartTag {
            name,
            attrs,
            self_closing,
        }
    }

    /// Consume text up to (not including) `</name`, case-insensitively.
    fn consume_raw_text(&mut self, name: &str) -> String {
        let rest = self.rest();
        let needle = format!("</{name}");
        let lower = rest.to_ascii_lowercase();
        let mut search_from = 0;
        let end = loop {
            match lower[search_from..].find(&needle) {
                Some(k) => {
                    let at = search_from + k;
                    let after = lower.as_bytes().get(at + needle.len());
                    if matches!(after, None | Some(b'>') | Some(b'/'))
                        || after.is_some_and(|b| b.is_ascii_whitespace())
                    {
                        break at;
                    }
                    search_from = at + needle.len();
                }
                None => break rest.len(),
            }
        };
        self.pos += end;
        rest[..end].to_string()
    }
}

#[derive(Default)]
struct TreeBuilder {
    root: Vec<Node>,
    stack: Vec<Element>,
}

impl TreeBuilder {
    fn current_children(&mut self) -> &mut Vec<Node> {
        match self.stack.last_mut() {
            Some(e) => &mut e.children,
            None => &mut self.root,
        }
    }

    fn text(&mut self, t: String) {
        if t.is_empty() {
            return;
        }
        let children = self.current_children();
        if let Some(Node::Text(prev)) = children.last_mut() {
            prev.push_str(&t);
        } else {
            children.push(Node::Text(t));
        }
    }

    fn leaf(&mut self, node: Node) {
        self.current_children().push(node);
    }

    fn pop(&mut self) {
        if let Some(e) = self.stack.pop() {
            self.current_children().push(Node::Element(e));
        }
    }

    /// Index of the innermost open element named `name`, not looking past
    /// any of `boundaries`.
    fn in_scope(&self, name: &str, boundaries: &[&str]) -> Option<usize> {
        for (i, e) in self.stack.iter().enumerate().rev() {
            if e.name == name {
                return Some(i);
            }
            if boundaries.contains(&e.name.as_str()) {
                return None;
            }
        }
        None
    }

    fn close_to(&mut self, idx: usize) {
        while self.stack.len() > idx {
            self.pop();
        }
    }

    fn implied_closes(&mut self, name: &str) {
        if CLOSES_P.contains(&name) {
            if let Some(i) = self.in_scope("p", SCOPE_BOUNDARIES) {
                self.close_to(i);
            }
        }
        match name {
            "li" => {
                if let Some(i) = self.in_scope("li", &["ul", "ol", "menu", "td", "th", "table"]) {
                    self.close_to(i);
                }
            }
            "dt" | "dd" => {
                let a = self.in_scope("dt", &["dl", "td", "th", "table"]);
                let b = self.in_scope("dd", &["dl", "td", "th", "table"]);
                if let Some(i) = a.max(b) {
                    self.close_to(i);
                }
            }
            "tr" => {
                if let Some(i) = self.in_scope("tr", &["table", "thead", "tbody", "tfoot"]) {
                    self.close_to(i);
                }
            }
            "td" | "th" => {
                let a = self.in_scope("td", &["tr", "table"]);
                let b = self.in_scope("th", &["tr", "table"]);
                if let Some(i) = a.max(b) {
                    self.close_to(i);
                }
            }
            "thead" | "tbody" | "tfoot" => {
                for sect in ["thead", "tbody", "tfoot"] {
                    if let Some(i) = self.in_scope(sect, &["table"]) {
                        self.close_to(i);
                    }
                }
            }
            "option" => {
                if let Some(i) = self.in_scope("option", &["select", "datalist", "optgroup"]) {
                    self.close_to(i);
                }
            }
            _ => {}
        }
    }

    fn start_tag(&mut self, name: &str, attrs: Vec<(String, String)>, self_closing: bool) {
        self.implied_closes(name);
        let el = Element {
            name: name.to_string(),
            attrs,
            children: Vec::new(),
        };
        if is_void(name) || self_closing {
            self.current_children().push(Node::Element(el));
        } else {
            self.stack.push(el);
        }
    }

    fn end_tag(&mut self, name: &str) {
        // Stray end tags with no matching open element are ignored.
        if let Some(i) = self.stack.iter().rposition(|e| e.name == name) {
            self.close_to(i);
        }
    }

    fn finish(mut self) -> MarkupTree {
        self.close_to(0);
        MarkupTree { children: self.root }
    }
}

const NAMED_ENTITIES: &[(&str, &str)] = &[
    ("amp", "&"),
    ("lt", "<"),
    ("gt", ">"),
    ("quot", "\""),
    ("apos", "'"),
    ("nbsp", "\u{a0}"),
    ("copy", "\u{a9}"),
    ("reg", "\u{ae}"),
    ("trade", "\u{2122}"),
    ("mdash", "\u{2014}"),
    ("ndash", "\u{2013}"),
    ("hellip", "\u{2026}"),
    ("lsquo", "\u{2018}"),
    ("rsquo", "\u{2019}"),
    ("ldquo", "\u{201c}"),
    ("rdquo", "\u{201d}"),
    ("laquo", "\u{ab}"),
    ("raquo", "\u{bb}"),
    ("middot", "\u{b7}"),
    ("bull", "\u{2022}"),
    ("deg", "\u{b0}"),
    ("times", "\u{d7}"),
    ("euro", "\u{20ac}"),
    ("pound", "\u{a3}"),
    ("cent", "\u{a2}"),
    ("sect", "\u{a7}"),
    ("para", "\u{b6}"),
    ("thinsp", "\u{2009}"),
    ("ensp", "\u{2002}"),
    ("emsp", "\u{2003}"),
    ("shy", "\u{ad}"),
    ("zwj", "\u{200d}"),
    ("zwnj", "\u{200c}"),
];

/// Decode character references. Unknown or unterminated references are
/// kept literally.
pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let semi = rest[1..].find(';').map(|i| i + 1).filter(|&i| i <= 12);
        let decoded = semi.and_then(|semi| {
            let body = &rest[1..semi];
            let ch = if let Some(num) = body.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse::<u32>().ok(),
                };
                code.map(|c| match char::from_u32(c) {
                    Some(ch) if c != 0 => ch.to_string(),
                    _ => "\u{fffd}".to_string(),
                })
            } else {
                NAMED_ENTITIES
                    .iter()
                    .find(|(n, _)| *n == body)
                    .map(|(_, v)| v.to_string())
            };
            ch.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((text, consumed)) => {
                out.push_str(&text);
                rest = &rest[consumed..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\u{a0}' => out.push_str("&nbsp;"),
            c => out.push(c),
        }
    }
}

pub fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\u{a0}' => out.push_str("&nbsp;"),
            c => out.push(c),
        }
    }
}

fn serialize_node(node: &Node, parent: Option<&str>, out: &mut String) {
    match node {
        Node::Text(t) => match parent {
            Some(p) if RAW_TEXT_ELEMENTS.contains(&p) => out.push_str(t),
            _ => escape_text(t, out),
        },
        Node::Comment(c) => {
            let _ = write!(out, "<!--{c}-->");
        }
        Node::Doctype(d) => {
            let _ = write!(out, "<!{d}>");
        }
        Node::Element(e) => {
            out.push('<');
            out.push_str(&e.name);
            for (n, v) in &e.attrs {
                out.push(' ');
                out.push_str(n);
                out.push_str("=\"");
                escape_attr(v, out);
                out.push('"');
            }
            out.push('>');
            if is_void(&e.name) {
                return;
            }
            for c in &e.children {
                serialize_node(c, Some(&e.name), out);
            }
            let _ = write!(out, "</{}>", e.name);
        }
    }
}
