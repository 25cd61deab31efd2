//! Grammar-backed parsing shared by the detector, the reward oracle, and the
//! metrics.
//!
//! Parsing never aborts: malformed regions show up as error or missing nodes
//! in the tree. Method snippets are hosted in a synthetic class shell before
//! parsing because the grammar has no top-level rule for bare methods.

use std::ops::Range;

use tree_sitter::{Language, Node, Parser, Tree};

pub const COMMENT_KINDS: [&str; 2] = ["line_comment", "block_comment"];

/// Name of the synthetic class that hosts method snippets.
pub const SHELL_CLASS: &str = "__Gen";

fn java() -> Language {
    Language::new(tree_sitter_java::LANGUAGE)
}

/// A parsed compilation unit plus the source it came from.
pub struct SyntaxTree {
    tree: Tree,
    source: String,
}

impl SyntaxTree {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    /// Number of error-flagged and missing-placeholder nodes.
    pub fn error_count(&self) -> usize {
        if !self.root().has_error() {
            return 0;
        }
        let mut n = 0;
        for_each_node(self.root(), &mut |node| {
            if node.is_error() || node.is_missing() {
                n += 1;
            }
        });
        n
    }

    pub fn has_errors(&self) -> bool {
        self.root().has_error()
    }

    /// Byte spans of error and missing nodes, in document order.
    pub fn error_spans(&self) -> Vec<(usize, usize)> {
        let mut spans = Vec::new();
        if !self.root().has_error() {
            return spans;
        }
        for_each_node(self.root(), &mut |node| {
            if node.is_error() || node.is_missing() {
                spans.push((node.start_byte(), node.end_byte()));
            }
        });
        spans
    }
}

/// Parse a full compilation unit. Never fails; parse errors are in-tree.
pub fn parse_source(text: &str) -> SyntaxTree {
    let mut parser = Parser::new();
    parser
        .set_language(&java())
        .expect("java grammar is ABI-compatible with the linked tree-sitter");
    let tree = parser
        .parse(text, None)
        .expect("parsing is infallible without a cancellation flag");
    SyntaxTree {
        tree,
        source: text.to_string(),
    }
}

/// Host a method-level snippet in the synthetic class shell.
///
/// Returns the wrapped source and the byte range the snippet occupies in it.
pub fn wrap_in_class(code: &str) -> (String, Range<usize>) {
    let prefix = format!("class {SHELL_CLASS} {{\n");
    let start = prefix.len();
    let wrapped = format!("{prefix}{code}\n}}");
    (wrapped, start..start + code.len())
}

/// Parse a method-level snippet inside the class shell.
pub fn parse_snippet(code: &str) -> (SyntaxTree, Range<usize>) {
    let (wrapped, range) = wrap_in_class(code);
    (parse_source(&wrapped), range)
}

/// Lexical tokens of a snippet: parse-tree leaves with comments excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSeq { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Tokenize a method-level snippet (or a whole unit; the shell nests fine).
pub fn tokenize(code: &str) -> TokenSeq {
    let (tree, range) = parse_snippet(code);
    let mut tokens = Vec::new();
    for_each_node(tree.root(), &mut |node| {
        if node.child_count() == 0
            && !node.is_missing()
            && node.start_byte() >= range.start
            && node.end_byte() <= range.end
            && !COMMENT_KINDS.contains(&node.kind())
        {
            let text = &tree.source()[node.byte_range()];
            if !text.is_empty() {
                tokens.push(text.to_string());
            }
        }
    });
    TokenSeq::new(tokens)
}

/// Token count used by the miner's length filter.
pub fn token_count(code: &str) -> usize {
    tokenize(code).len()
}

/// Pre-order traversal over every node, tokens included.
pub fn for_each_node<'t>(root: Node<'t>, f: &mut dyn FnMut(Node<'t>)) {
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        f(node);
        for i in (0..node.child_count()).rev() {
            stack.push(node.child(i as u32).expect("child index in range"));
        }
    }
}

/// Non-comment leaf token texts under `node`, in document order.
pub(crate) fn node_token_texts<'s>(node: Node<'_>, source: &'s str) -> Vec<&'s str> {
    let mut out = Vec::new();
    for_each_node(node, &mut |n| {
        if n.child_count() == 0 && !n.is_missing() && !COMMENT_KINDS.contains(&n.kind()) {
            let text = &source[n.byte_range()];
            if !text.is_empty() {
                out.push(text);
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_class_has_no_errors() {
        let tree = parse_source("class A { }");
        assert_eq!(tree.error_count(), 0);
        assert!(!tree.has_errors());
    }

    #[test]
    fn malformed_class_has_error_nodes() {
        let tree = parse_source("class A { void m( {");
        assert!(tree.error_count() >= 1);
        assert!(!tree.error_spans().is_empty());
    }

    #[test]
    fn empty_input_parses_clean() {
        let tree = parse_source("");
        assert_eq!(tree.root().kind(), "program");
        assert_eq!(tree.error_count(), 0);
    }

    #[test]
    fn snippet_wrapping_locates_code() {
        let code = "void m() { int x = 1; }";
        let (wrapped, range) = wrap_in_class(code);
        assert_eq!(&wrapped[range.clone()], code);
        let (tree, _) = parse_snippet(code);
        assert_eq!(tree.error_count(), 0);
    }

    #[test]
    fn tokens_come_from_tree_leaves() {
        let toks = tokenize("void m() { int x = 1; }");
        assert_eq!(
            toks.tokens,
            vec!["void", "m", "(", ")", "{", "int", "x", "=", "1", ";", "}"]
        );
    }

    #[test]
    fn tokens_ignore_comments_and_whitespace() {
        let a = tokenize("void m() { int x = 1; }");
        let b = tokenize("void m()  {\n  // comment\n  int x /* inline */ = 1;\n}");
        assert_eq!(a, b);
    }

    #[test]
    fn tokens_of_empty_snippet() {
        assert_eq!(tokenize("").len(), 0);
    }

    #[test]
    fn whole_unit_tokenizes_via_nested_shell() {
        let toks = tokenize("class A { void m() { } }");
        assert_eq!(toks.tokens[0], "class");
        assert_eq!(toks.len(), 11);
    }
}
