//! S-expression derivation trees.
//!
//! The accepted grammar is deliberately small:
//!
//! ```text
//! tree  := '(' label tree+ ')'     internal node (rule or lexical entry)
//!        | '(' string ')'          leaf carrying a surface token
//! label := bare atom, backslash escapes any character
//! string:= '"' ... '"', backslash escapes '"' and '\'
//! ```
//!
//! A node whose children are all leaves is a preterminal (a lexical entry);
//! every other node is a construction.

use std::fmt;

use thiserror::Error;

/// Nesting deeper than this is rejected so that recursive traversal and drop
/// stay within the default thread stack.
pub const MAX_DEPTH: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DerivationTree {
    Node {
        label: String,
        children: Vec<DerivationTree>,
    },
    Leaf {
        surface: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("empty input at byte {offset}")]
    EmptyInput { offset: usize },
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParens { offset: usize },
    #[error("empty label at byte {offset}")]
    EmptyLabel { offset: usize },
    #[error("unterminated string starting at byte {offset}")]
    UnterminatedString { offset: usize },
    #[error("node without children at byte {offset}")]
    ChildlessNode { offset: usize },
    #[error("unexpected {found} at byte {offset}")]
    Unexpected { offset: usize, found: String },
    #[error("nesting deeper than {MAX_DEPTH} at byte {offset}")]
    TooDeep { offset: usize },
}

impl DerivationError {
    pub fn offset(&self) -> usize {
        match self {
            DerivationError::EmptyInput { offset }
            | DerivationError::UnbalancedParens { offset }
            | DerivationError::EmptyLabel { offset }
            | DerivationError::UnterminatedString { offset }
            | DerivationError::ChildlessNode { offset }
            | DerivationError::Unexpected { offset, .. }
            | DerivationError::TooDeep { offset } => *offset,
        }
    }
}

impl DerivationTree {
    pub fn node(label: impl Into<String>, children: Vec<DerivationTree>) -> Self {
        DerivationTree::Node {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(surface: impl Into<String>) -> Self {
        DerivationTree::Leaf {
            surface: surface.into(),
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            DerivationTree::Node { label, .. } => Some(label),
            DerivationTree::Leaf { .. } => None,
        }
    }

    pub fn children(&self) -> &[DerivationTree] {
        match self {
            DerivationTree::Node { children, .. } => children,
            DerivationTree::Leaf { .. } => &[],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, DerivationTree::Leaf { .. })
    }

    /// True for a node whose children are all surface leaves.
    pub fn is_preterminal(&self) -> bool {
        match self {
            DerivationTree::Node { children, .. } => children.iter().all(DerivationTree::is_leaf),
            DerivationTree::Leaf { .. } => false,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(DerivationTree::node_count).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DerivationTree::Leaf { .. } => 1,
            DerivationTree::Node { children, .. } => {
                children.iter().map(DerivationTree::leaf_count).sum()
            }
        }
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(DerivationTree::depth)
            .max()
            .unwrap_or(0)
    }

    /// Surface tokens in left-to-right order.
    pub fn surfaces(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_surfaces(&mut out);
        out
    }

    fn collect_surfaces<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            DerivationTree::Leaf { surface } => out.push(surface),
            DerivationTree::Node { children, .. } => {
                for child in children {
                    child.collect_surfaces(out);
                }
            }
        }
    }

    /// Canonical single-line form; re-parses to an equal tree.
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationTree::Leaf { surface } => {
                f.write_str("(\"")?;
                for c in surface.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\")")
            }
            DerivationTree::Node { label, children } => {
                f.write_str("(")?;
                for c in label.chars() {
                    if needs_label_escape(c) {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                for child in children {
                    write!(f, " {child}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn needs_label_escape(c: char) -> bool {
    matches!(c, '(' | ')' | '"' | '\\') || c.is_whitespace()
}

enum Frame {
    /// `(` seen, nothing else yet.
    Open { offset: usize },
    Node {
        offset: usize,
        label: String,
        children: Vec<DerivationTree>,
    },
    Leaf {
        surface: String,
    },
}

/// Parse a single derivation tree from `text`.
pub fn parse_derivation(text: &str) -> Result<DerivationTree, DerivationError> {
    let bytes = text.as_bytes();
    let mut pos = skip_ws(text, 0);
    if pos >= bytes.len() {
        return Err(DerivationError::EmptyInput { offset: pos });
    }
    if bytes[pos] != b'(' {
        return Err(unexpected(text, pos));
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut root: Option<DerivationTree> = None;

    while pos < bytes.len() {
        match bytes[pos] {
            b if (b as char).is_ascii_whitespace() => pos += 1,
            b'(' => {
                if root.is_some() {
                    return Err(unexpected(text, pos));
                }
                match stack.last() {
                    None | Some(Frame::Node { .. }) => {}
                    Some(Frame::Open { .. }) => {
                        // `((` — a node must start with its label
                        return Err(DerivationError::EmptyLabel { offset: pos });
                    }
                    Some(Frame::Leaf { .. }) => return Err(unexpected(text, pos)),
                }
                if stack.len() >= MAX_DEPTH {
                    return Err(DerivationError::TooDeep { offset: pos });
                }
                stack.push(Frame::Open { offset: pos });
                pos += 1;
            }
            b')' => {
                let frame = match stack.pop() {
                    Some(frame) => frame,
                    None => return Err(DerivationError::UnbalancedParens { offset: pos }),
                };
                let tree = match frame {
                    Frame::Open { .. } => {
                        return Err(DerivationError::EmptyLabel { offset: pos });
                    }
                    Frame::Node {
                        offset,
                        label,
                        children,
                    } => {
                        if children.is_empty() {
                            return Err(DerivationError::ChildlessNode { offset });
                        }
                        DerivationTree::Node { label, children }
                    }
                    Frame::Leaf { surface } => DerivationTree::Leaf { surface },
                };
                pos += 1;
                match stack.last_mut() {
                    Some(Frame::Node { children, .. }) => children.push(tree),
                    Some(_) => unreachable!("only node frames can hold children"),
                    None => root = Some(tree),
                }
            }
            b'"' => {
                let start = pos;
                let (surface, next) = read_string(text, pos)?;
                match stack.pop() {
                    Some(Frame::Open { .. }) => stack.push(Frame::Leaf { surface }),
                    Some(other) => {
                        stack.push(other);
                        return Err(unexpected(text, start));
                    }
                    None => return Err(unexpected(text, start)),
                }
                pos = next;
            }
            _ => {
                let start = pos;
                let (label, next) = read_atom(text, pos);
                match stack.pop() {
                    Some(Frame::Open { offset }) => {
                        if label.is_empty() {
                            return Err(DerivationError::EmptyLabel { offset: start });
                        }
                        stack.push(Frame::Node {
                            offset,
                            label,
                            children: Vec::new(),
                        });
                    }
                    Some(other) => {
                        stack.push(other);
                        return Err(unexpected(text, start));
                    }
                    None => return Err(unexpected(text, start)),
                }
                pos = next;
            }
        }
    }

    if !stack.is_empty() {
        return Err(DerivationError::UnbalancedParens { offset: bytes.len() });
    }
    root.ok_or(DerivationError::EmptyInput { offset: bytes.len() })
}

fn skip_ws(text: &str, mut pos: usize) -> usize {
    let bytes = text.as_bytes();
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

fn unexpected(text: &str, pos: usize) -> DerivationError {
    let found = text[pos..]
        .chars()
        .next()
        .map(|c| format!("{c:?}"))
        .unwrap_or_else(|| "end of input".to_string());
    DerivationError::Unexpected { offset: pos, found }
}

fn read_string(text: &str, start: usize) -> Result<(String, usize), DerivationError> {
    let mut out = String::new();
    let mut chars = text[start + 1..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Ok((out, start + 1 + i + 1)),
            '\\' => match chars.next() {
                Some((_, escaped)) => out.push(escaped),
                None => break,
            },
            _ => out.push(c),
        }
    }
    Err(DerivationError::UnterminatedString { offset: start })
}

fn read_atom(text: &str, start: usize) -> (String, usize) {
    let mut out = String::new();
    let mut chars = text[start..].char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '(' | ')' | '"' => return (out, start + i),
            c if c.is_whitespace() => return (out, start + i),
            '\\' => {
                chars.next();
                match chars.next() {
                    Some((_, escaped)) => out.push(escaped),
                    None => return (out, text.len()),
                }
            }
            _ => {
                out.push(c);
                chars.next();
            }
        }
    }
    (out, text.len())
}
