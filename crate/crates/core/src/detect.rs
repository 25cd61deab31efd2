//! Extract-method detection over before/after versions of a compilation
//! unit.
//!
//! The rule: a method is reported as extracted when (a) its name is absent
//! from the before version, (b) a method present in both versions (same name
//! and arity) invokes it in the after version, and (c) the longest common
//! subsequence between its statement fingerprints and the before-version
//! caller's covers enough of its body. Statements are fingerprinted with
//! comments stripped and whitespace collapsed, so detection is invariant
//! under formatting changes.

use std::collections::HashSet;

use tree_sitter::Node;

use crate::lang::{self, SyntaxTree};

/// Statement node kinds that participate in fingerprint matching. Nested
/// statements are flattened in document order so extractions that move the
/// body of a loop (not the loop itself) still match.
const STATEMENT_KINDS: [&str; 18] = [
    "expression_statement",
    "local_variable_declaration",
    "if_statement",
    "while_statement",
    "do_statement",
    "for_statement",
    "enhanced_for_statement",
    "return_statement",
    "throw_statement",
    "try_statement",
    "try_with_resources_statement",
    "switch_expression",
    "synchronized_statement",
    "labeled_statement",
    "break_statement",
    "continue_statement",
    "assert_statement",
    "yield_statement",
];

#[derive(Debug, Clone)]
pub struct DetectConfig {
    /// Minimum fraction of the new method's statements that must appear in
    /// the before-version caller.
    pub min_match_fraction: f64,
    /// Minimum number of matched statements.
    pub min_statements: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            min_match_fraction: 0.5,
            min_statements: 1,
        }
    }
}

/// A statement with comments stripped and whitespace runs collapsed to one
/// space. Identifiers are kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatementFingerprint {
    pub normalized_text: String,
    pub kind: String,
}

/// A method or constructor declaration with a body.
#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    /// (type, name) per formal parameter.
    pub parameters: Vec<(String, String)>,
    pub body_statements: Vec<StatementFingerprint>,
    /// 1-based inclusive line span of the whole declaration.
    pub source_span: (usize, usize),
    pub source_text: String,
    /// Byte span of the whole declaration in its unit.
    pub byte_span: (usize, usize),
    /// True when an ancestor of the declaration is an error node.
    pub in_error_region: bool,
    /// True when the declaration's own subtree contains parse errors.
    pub has_parse_errors: bool,
    /// Names of methods this declaration invokes without a receiver or with
    /// one (call sites by name).
    invoked_names: HashSet<String>,
}

impl MethodDecl {
    pub fn arity(&self) -> usize {
        self.parameters.len()
    }

    pub fn invokes(&self, name: &str) -> bool {
        self.invoked_names.contains(name)
    }
}

/// Detection verdict for one (caller, new-method) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractMethodFinding {
    pub caller_name: String,
    pub extracted_name: String,
    pub matched_statements: usize,
    pub extracted_statements: usize,
    /// matched_statements / extracted_statements.
    pub match_score: f64,
    /// 1-based line spans, in the before unit, of the caller statements the
    /// extracted body matched.
    pub caller_spans: Vec<(usize, usize)>,
}

/// All method and constructor declarations with bodies, in source order,
/// including those in nested and anonymous classes. Bodyless members
/// (abstract/interface signatures) are excluded.
pub fn index_methods(tree: &SyntaxTree) -> Vec<MethodDecl> {
    let source = tree.source();
    let mut methods = Vec::new();
    lang::for_each_node(tree.root(), &mut |node| {
        if node.kind() != "method_declaration" && node.kind() != "constructor_declaration" {
            return;
        }
        let Some(name_node) = node.child_by_field_name("name") else {
            return;
        };
        let Some(body) = node.child_by_field_name("body") else {
            return;
        };
        let name = source[name_node.byte_range()].to_string();
        if name.is_empty() {
            return;
        }
        let parameters = node
            .child_by_field_name("parameters")
            .map(|params| formal_parameters(params, source))
            .unwrap_or_default();
        methods.push(MethodDecl {
            name,
            parameters,
            body_statements: statement_fingerprints(body, source),
            source_span: (
                node.start_position().row + 1,
                node.end_position().row + 1,
            ),
            source_text: source[node.byte_range()].to_string(),
            byte_span: (node.start_byte(), node.end_byte()),
            in_error_region: has_error_ancestor(node),
            has_parse_errors: node.has_error(),
            invoked_names: invocation_names(body, source),
        });
    });
    methods.sort_by_key(|m| m.byte_span.0);
    methods
}

fn formal_parameters(params: Node<'_>, source: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..params.named_child_count() {
        let p = params.named_child(i as u32).expect("named child in range");
        if p.kind() != "formal_parameter" && p.kind() != "spread_parameter" {
            continue;
        }
        let ty = p
            .child_by_field_name("type")
            .map(|t| lang::node_token_texts(t, source).join(" "))
            .unwrap_or_default();
        let name = p
            .child_by_field_name("name")
            .map(|n| source[n.byte_range()].to_string())
            .or_else(|| {
                // spread_parameter keeps the declarator as an unnamed child
                let mut found = None;
                lang::for_each_node(p, &mut |n| {
                    if found.is_none() && n.kind() == "variable_declarator" {
                        found = n
                            .child_by_field_name("name")
                            .map(|id| source[id.byte_range()].to_string());
                    }
                });
                found
            })
            .unwrap_or_default();
        out.push((ty, name));
    }
    out
}

fn has_error_ancestor(node: Node<'_>) -> bool {
    let mut cur = node.parent();
    while let Some(p) = cur {
        if p.is_error() {
            return true;
        }
        cur = p.parent();
    }
    false
}

/// Statement fingerprints under `body`, flattened in document order.
fn statement_fingerprints(body: Node<'_>, source: &str) -> Vec<StatementFingerprint> {
    let mut out = Vec::new();
    lang::for_each_node(body, &mut |node| {
        if STATEMENT_KINDS.contains(&node.kind()) {
            out.push(StatementFingerprint {
                normalized_text: lang::node_token_texts(node, source).join(" "),
                kind: node.kind().to_string(),
            });
        }
    });
    out
}

/// Statement nodes under `body` in document order, parallel to
/// `statement_fingerprints`, carrying their 1-based line spans.
fn statement_line_spans(body: Node<'_>, _source: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    lang::for_each_node(body, &mut |node| {
        if STATEMENT_KINDS.contains(&node.kind()) {
            out.push((node.start_position().row + 1, node.end_position().row + 1));
        }
    });
    out
}

fn invocation_names(body: Node<'_>, source: &str) -> HashSet<String> {
    let mut names = HashSet::new();
    lang::for_each_node(body, &mut |node| {
        if node.kind() == "method_invocation" {
            if let Some(name) = node.child_by_field_name("name") {
                names.insert(source[name.byte_range()].to_string());
            }
        }
    });
    names
}

/// Longest common subsequence between two fingerprint sequences. Returns the
/// matched indices on the `b` side, in order.
fn lcs_positions(a: &[StatementFingerprint], b: &[StatementFingerprint]) -> Vec<usize> {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 {
        return Vec::new();
    }
    let mut table = vec![0usize; (m + 1) * (n + 1)];
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    for i in 1..=m {
        for j in 1..=n {
            table[idx(i, j)] = if a[i - 1] == b[j - 1] {
                table[idx(i - 1, j - 1)] + 1
            } else {
                table[idx(i - 1, j)].max(table[idx(i, j - 1)])
            };
        }
    }
    let mut positions = Vec::new();
    let (mut i, mut j) = (m, n);
    while i > 0 && j > 0 {
        if a[i - 1] == b[j - 1] {
            positions.push(j - 1);
            i -= 1;
            j -= 1;
        } else if table[idx(i - 1, j)] >= table[idx(i, j - 1)] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    positions.reverse();
    positions
}

/// Detect extract-method refactorings between two versions of a unit.
///
/// Both inputs may contain parse errors; methods inside error regions are
/// ignored. Findings are sorted by (caller_name, extracted_name).
pub fn detect_extract_method(
    before_unit: &str,
    after_unit: &str,
    config: &DetectConfig,
) -> Vec<ExtractMethodFinding> {
    let before_tree = lang::parse_source(before_unit);
    let after_tree = lang::parse_source(after_unit);

    let before_methods: Vec<MethodDecl> = index_methods(&before_tree)
        .into_iter()
        .filter(|m| !m.in_error_region)
        .collect();
    let after_methods: Vec<MethodDecl> = index_methods(&after_tree)
        .into_iter()
        .filter(|m| !m.in_error_region)
        .collect();

    detect_between(&before_tree, &before_methods, &after_methods, config)
}

fn detect_between(
    before_tree: &SyntaxTree,
    before_methods: &[MethodDecl],
    after_methods: &[MethodDecl],
    config: &DetectConfig,
) -> Vec<ExtractMethodFinding> {
    let before_names: HashSet<&str> = before_methods.iter().map(|m| m.name.as_str()).collect();
    let before_spans = before_statement_spans(before_tree, before_methods);

    let mut findings: Vec<ExtractMethodFinding> = Vec::new();
    for new_method in after_methods {
        if before_names.contains(new_method.name.as_str()) {
            continue;
        }
        let extracted_count = new_method.body_statements.len();
        if extracted_count == 0 {
            continue;
        }
        for after_caller in after_methods {
            if after_caller.byte_span == new_method.byte_span
                || after_caller.name == new_method.name
                || !after_caller.invokes(&new_method.name)
            {
                continue;
            }
            // Best match among before-version methods with the caller's
            // name and arity (overloads differ only in parameter types).
            let mut best: Option<(usize, Vec<usize>, usize)> = None;
            for (bi, before_caller) in before_methods.iter().enumerate() {
                if before_caller.name != after_caller.name
                    || before_caller.arity() != after_caller.arity()
                {
                    continue;
                }
                let positions =
                    lcs_positions(&new_method.body_statements, &before_caller.body_statements);
                let matched = positions.len();
                if best.as_ref().is_none_or(|(m, _, _)| matched > *m) {
                    best = Some((matched, positions, bi));
                }
            }
            let Some((matched, positions, bi)) = best else {
                continue;
            };
            if matched < config.min_statements {
                continue;
            }
            let score = matched as f64 / extracted_count as f64;
            if score < config.min_match_fraction {
                continue;
            }
            let caller_spans = positions
                .iter()
                .map(|&p| before_spans[bi][p])
                .collect::<Vec<_>>();
            let finding = ExtractMethodFinding {
                caller_name: after_caller.name.clone(),
                extracted_name: new_method.name.clone(),
                matched_statements: matched,
                extracted_statements: extracted_count,
                match_score: score,
                caller_spans,
            };
            // Overloads collapse onto one (caller, extracted) key; keep the
            // best-scoring one.
            match findings.iter_mut().find(|f| {
                f.caller_name == finding.caller_name && f.extracted_name == finding.extracted_name
            }) {
                Some(existing) => {
                    if finding.match_score > existing.match_score {
                        *existing = finding;
                    }
                }
                None => findings.push(finding),
            }
        }
    }
    findings.sort_by(|a, b| {
        (a.caller_name.as_str(), a.extracted_name.as_str())
            .cmp(&(b.caller_name.as_str(), b.extracted_name.as_str()))
    });
    findings
}

/// Per-method statement line spans in the before unit, parallel to
/// `body_statements`.
fn before_statement_spans(tree: &SyntaxTree, methods: &[MethodDecl]) -> Vec<Vec<(usize, usize)>> {
    let source = tree.source();
    let mut spans = vec![Vec::new(); methods.len()];
    lang::for_each_node(tree.root(), &mut |node| {
        if node.kind() != "method_declaration" && node.kind() != "constructor_declaration" {
            return;
        }
        let byte_span = (node.start_byte(), node.end_byte());
        let Some(pos) = methods.iter().position(|m| m.byte_span == byte_span) else {
            return;
        };
        if let Some(body) = node.child_by_field_name("body") {
            spans[pos] = statement_line_spans(body, source);
        }
    });
    spans
}

/// Detect an extract-method refactoring between a pre-refactoring method and
/// a generated output expected to hold the modified caller plus the new
/// method.
///
/// Both snippets are hosted in the synthetic class shell. The generated side
/// is parse-gated: if it has any parse error, or fewer than two cleanly
/// parsed methods, nothing is detected.
pub fn detect_in_generated(
    before_method: &str,
    generated_output: &str,
    config: &DetectConfig,
) -> Vec<ExtractMethodFinding> {
    let (before_wrapped, _) = lang::wrap_in_class(before_method);
    let (gen_wrapped, _) = lang::wrap_in_class(generated_output);

    let gen_tree = lang::parse_source(&gen_wrapped);
    if gen_tree.has_errors() {
        return Vec::new();
    }
    let gen_methods: Vec<MethodDecl> = index_methods(&gen_tree)
        .into_iter()
        .filter(|m| !m.in_error_region && !m.has_parse_errors)
        .collect();
    if gen_methods.len() < 2 {
        return Vec::new();
    }

    let before_tree = lang::parse_source(&before_wrapped);
    let before_methods: Vec<MethodDecl> = index_methods(&before_tree)
        .into_iter()
        .filter(|m| !m.in_error_region)
        .collect();

    detect_between(&before_tree, &before_methods, &gen_methods, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BEFORE: &str = "class A {\n  void m() {\n    int a = 1;\n    int b = 2;\n    int c = 3;\n  }\n}";
    const AFTER: &str = "class A {\n  void m() {\n    int a = 1;\n    h();\n    int c = 3;\n  }\n  void h() {\n    int b = 2;\n  }\n}";

    #[test]
    fn single_statement_extraction_scores_one() {
        let findings = detect_extract_method(BEFORE, AFTER, &DetectConfig::default());
        assert_eq!(findings.len(), 1);
        let f = &findings[0];
        assert_eq!(f.caller_name, "m");
        assert_eq!(f.extracted_name, "h");
        assert_eq!(f.matched_statements, 1);
        assert_eq!(f.extracted_statements, 1);
        assert_eq!(f.match_score, 1.0);
        assert_eq!(f.caller_spans, vec![(4, 4)]);
    }

    #[test]
    fn identical_units_detect_nothing() {
        assert!(detect_extract_method(BEFORE, BEFORE, &DetectConfig::default()).is_empty());
        assert!(detect_extract_method(AFTER, AFTER, &DetectConfig::default()).is_empty());
    }

    #[test]
    fn uncalled_new_method_detects_nothing() {
        let after = "class A {\n  void m() {\n    int a = 1;\n    int b = 2;\n    int c = 3;\n  }\n  void h() {\n    int b = 2;\n  }\n}";
        assert!(detect_extract_method(BEFORE, after, &DetectConfig::default()).is_empty());
    }

    #[test]
    fn detection_invariant_under_whitespace_and_comments() {
        let noisy_after = "class A {\n  // caller\n  void m()   {\n    int a = 1;\n    h(); /* call */\n    int c = 3;\n  }\n  void h() {\n    int b = 2; // moved\n  }\n}";
        let base = detect_extract_method(BEFORE, AFTER, &DetectConfig::default());
        let noisy = detect_extract_method(BEFORE, noisy_after, &DetectConfig::default());
        assert_eq!(noisy.len(), base.len());
        assert_eq!(noisy[0].caller_name, base[0].caller_name);
        assert_eq!(noisy[0].extracted_name, base[0].extracted_name);
        assert_eq!(noisy[0].match_score, base[0].match_score);
    }

    #[test]
    fn renaming_extracted_method_changes_only_the_name() {
        let renamed = AFTER.replace("h()", "pulled()").replace("void h", "void pulled");
        let base = detect_extract_method(BEFORE, AFTER, &DetectConfig::default());
        let after = detect_extract_method(BEFORE, &renamed, &DetectConfig::default());
        assert_eq!(after.len(), 1);
        assert_eq!(after[0].extracted_name, "pulled");
        assert_eq!(after[0].match_score, base[0].match_score);
        assert_eq!(after[0].matched_statements, base[0].matched_statements);
    }

    #[test]
    fn index_methods_in_source_order() {
        let tree = lang::parse_source("class A { void m() {} void k() { int x = 0; } }");
        let methods = index_methods(&tree);
        assert_eq!(methods.len(), 2);
        assert_eq!(methods[0].name, "m");
        assert_eq!(methods[1].name, "k");
        assert_eq!(methods[1].body_statements.len(), 1);
    }

    #[test]
    fn bodyless_interface_members_are_excluded() {
        let tree = lang::parse_source("interface I { void sig(); int other(String s); }");
        assert!(index_methods(&tree).is_empty());
    }

    #[test]
    fn method_with_inner_error_still_indexed() {
        let tree = lang::parse_source("class A { void m() { int x = ; } void k() {} }");
        assert!(tree.has_errors());
        let methods = index_methods(&tree);
        let names: Vec<&str> = methods.iter().map(|m| m.name.as_str()).collect();
        assert!(names.contains(&"m"));
        assert!(names.contains(&"k"));
        let m = methods.iter().find(|m| m.name == "m").unwrap();
        assert!(m.has_parse_errors);
    }

    #[test]
    fn parameters_are_typed_and_named() {
        let tree = lang::parse_source("class A { void m(int a, String b) {} }");
        let methods = index_methods(&tree);
        assert_eq!(
            methods[0].parameters,
            vec![
                ("int".to_string(), "a".to_string()),
                ("String".to_string(), "b".to_string())
            ]
        );
    }

    #[test]
    fn loop_body_extraction_detected_in_generated() {
        let before = "void process(int n) {\n  int total = 0;\n  for (int i = 0; i < n; i++) {\n    total = total + i;\n    record(total);\n  }\n}";
        let generated = "void process(int n) {\n  int total = 0;\n  for (int i = 0; i < n; i++) {\n    step(total, i);\n  }\n}\n\nvoid step(int total, int i) {\n  total = total + i;\n  record(total);\n}";
        let findings = detect_in_generated(before, generated, &DetectConfig::default());
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].caller_name, "process");
        assert_eq!(findings[0].extracted_name, "step");
        assert_eq!(findings[0].match_score, 1.0);
    }

    #[test]
    fn verbatim_generated_output_detects_nothing() {
        let before = "void m() { int a = 1; }";
        assert!(detect_in_generated(before, before, &DetectConfig::default()).is_empty());
    }

    #[test]
    fn broken_generated_output_detects_nothing() {
        let before = "void m() { int a = 1; int b = 2; }";
        let generated = "void m() { int a = 1; h(); \nvoid h() { int b = 2; }";
        assert!(detect_in_generated(before, generated, &DetectConfig::default()).is_empty());
    }

    #[test]
    fn match_score_monotone_in_verbatim_statements() {
        let before = "class A { void m() { int a = 1; int b = 2; int c = 3; int d = 4; } }";
        let partial = "class A { void m() { h(); } void h() { int a = 1; int z = 9; } }";
        let fuller = "class A { void m() { h(); } void h() { int a = 1; int b = 2; } }";
        let s1 = detect_extract_method(before, partial, &DetectConfig::default())[0].match_score;
        let s2 = detect_extract_method(before, fuller, &DetectConfig::default())[0].match_score;
        assert!(s2 >= s1);
        assert!((0.0..=1.0).contains(&s1));
        assert!((0.0..=1.0).contains(&s2));
    }

    #[test]
    fn min_statements_threshold_filters_short_matches() {
        let config = DetectConfig {
            min_match_fraction: 0.5,
            min_statements: 3,
        };
        assert!(detect_extract_method(BEFORE, AFTER, &config).is_empty());
    }
}
