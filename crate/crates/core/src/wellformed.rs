//! Single-file well-formedness checking.
//!
//! A lightweight stand-in for a compiler's front half, used as the compile
//! check of the micro-language reward mode and, through the `check` CLI
//! subcommand, as a subprocess compile command on machines without a JDK.
//!
//! A unit is well-formed when:
//! 1. it parses with zero error or missing nodes,
//! 2. every simple-name use inside a method body is preceded by a
//!    declaration of that name (parameter, local, catch/for variable, or a
//!    field declared anywhere in the unit), and
//! 3. every receiver-less method call targets a method declared in the unit.
//!
//! The check is name-based and control-flow-insensitive: no type checking,
//! no definite-return analysis, no resolution of external classes. Code that
//! references library types (e.g. `System.out`) is outside the checked
//! subset and will be reported.

use std::collections::HashSet;

use tree_sitter::Node;

use crate::lang::{self, SyntaxTree};

/// Diagnostics for a full compilation unit. Empty means well-formed.
pub fn check_unit(source: &str) -> Vec<String> {
    let tree = lang::parse_source(source);
    let mut diagnostics = Vec::new();

    if tree.has_errors() {
        for (start, end) in tree.error_spans() {
            let line = source[..start].matches('\n').count() + 1;
            diagnostics.push(format!(
                "line {line}: parse error near {:?}",
                source[start..end.min(start + 24)].trim()
            ));
        }
        return diagnostics;
    }

    let method_names = declared_method_names(&tree);
    let field_names = declared_field_names(&tree);

    lang::for_each_node(tree.root(), &mut |node| {
        if node.kind() != "method_declaration" && node.kind() != "constructor_declaration" {
            return;
        }
        if let Some(body) = node.child_by_field_name("body") {
            check_body(node, body, source, &method_names, &field_names, &mut diagnostics);
        }
    });
    diagnostics.sort();
    diagnostics.dedup();
    diagnostics
}

/// Diagnostics for a method-level snippet, hosted in the class shell.
pub fn check_snippet(code: &str) -> Vec<String> {
    let (wrapped, _) = lang::wrap_in_class(code);
    check_unit(&wrapped)
}

pub fn is_well_formed_snippet(code: &str) -> bool {
    check_snippet(code).is_empty()
}

fn declared_method_names(tree: &SyntaxTree) -> HashSet<String> {
    let source = tree.source();
    let mut names = HashSet::new();
    lang::for_each_node(tree.root(), &mut |node| {
        if node.kind() == "method_declaration" || node.kind() == "constructor_declaration" {
            if let Some(name) = node.child_by_field_name("name") {
                names.insert(source[name.byte_range()].to_string());
            }
        }
    });
    names
}

fn declared_field_names(tree: &SyntaxTree) -> HashSet<String> {
    let source = tree.source();
    let mut names = HashSet::new();
    lang::for_each_node(tree.root(), &mut |node| {
        if node.kind() != "field_declaration" {
            return;
        }
        lang::for_each_node(node, &mut |n| {
            if n.kind() == "variable_declarator" {
                if let Some(name) = n.child_by_field_name("name") {
                    names.insert(source[name.byte_range()].to_string());
                }
            }
        });
    });
    names
}

fn check_body(
    decl: Node<'_>,
    body: Node<'_>,
    source: &str,
    method_names: &HashSet<String>,
    field_names: &HashSet<String>,
    diagnostics: &mut Vec<String>,
) {
    // (name, position of declaration) for parameters and body-local names.
    let mut declarations: Vec<(String, usize)> = Vec::new();
    lang::for_each_node(decl, &mut |node| {
        let name_node = match node.kind() {
            "formal_parameter" | "spread_parameter" | "catch_formal_parameter"
            | "enhanced_for_statement" => node.child_by_field_name("name"),
            "variable_declarator" => node.child_by_field_name("name"),
            "lambda_expression" => match node.child_by_field_name("parameters") {
                Some(p) if p.kind() == "identifier" => Some(p),
                Some(p) if p.kind() == "inferred_parameters" => {
                    lang::for_each_node(p, &mut |id| {
                        if id.kind() == "identifier" {
                            declarations
                                .push((source[id.byte_range()].to_string(), id.start_byte()));
                        }
                    });
                    None
                }
                _ => None,
            },
            _ => None,
        };
        if let Some(name) = name_node {
            if name.kind() == "identifier" {
                declarations.push((source[name.byte_range()].to_string(), name.start_byte()));
            }
        }
    });

    lang::for_each_node(body, &mut |node| {
        if node.kind() == "method_invocation" && node.child_by_field_name("object").is_none() {
            if let Some(name) = node.child_by_field_name("name") {
                let text = &source[name.byte_range()];
                if !method_names.contains(text) {
                    diagnostics.push(format!(
                        "line {}: cannot find method {text}",
                        name.start_position().row + 1
                    ));
                }
            }
        }
        if node.kind() != "identifier" || !is_value_use(node) {
            return;
        }
        let text = &source[node.byte_range()];
        let pos = node.start_byte();
        let declared = field_names.contains(text)
            || declarations
                .iter()
                .any(|(name, decl_pos)| name == text && *decl_pos < pos);
        if !declared {
            diagnostics.push(format!(
                "line {}: cannot find symbol {text}",
                node.start_position().row + 1
            ));
        }
    });
}

/// Whether an identifier node denotes a value read or write, as opposed to a
/// declaration site, a member name, or a label.
fn is_value_use(node: Node<'_>) -> bool {
    let Some(parent) = node.parent() else {
        return false;
    };
    let is_field = |field: &str| {
        parent
            .child_by_field_name(field)
            .is_some_and(|n| n.id() == node.id())
    };
    match parent.kind() {
        "variable_declarator" | "formal_parameter" | "spread_parameter"
        | "catch_formal_parameter" => !is_field("name") && !is_field("type"),
        "enhanced_for_statement" => !is_field("name") && !is_field("type"),
        "method_invocation" => !is_field("name"),
        "method_reference" => false,
        "field_access" => !is_field("field"),
        "method_declaration" | "constructor_declaration" => false,
        "labeled_statement" | "break_statement" | "continue_statement" => false,
        "lambda_expression" => !is_field("parameters"),
        "inferred_parameters" => false,
        _ => true,
    }
}
