//! Plain-text file formats.
//!
//! Instance files (`.msp`) are line oriented; `#` starts a comment:
//!
//! ```text
//! msp 1
//! stages 3
//! vertex S 0
//! vertex a 1
//! vertex b 2
//! vertex D 3
//! edge 0 S a 1
//! edge 1 a b 2
//! edge 2 b D 3
//! eset a 0
//! eset b 0 1
//! eset D 0 1 2
//! ```
//!
//! Edge ids in a document only name edges for the `eset` lines; the parsed
//! graph renumbers them canonically. [`serialize_instance`] writes vertices
//! by `(stage, name)`, edges by id and eset members ascending, one `eset`
//! line per non-source vertex.
//!
//! Undirected graph files (`.graph`) hold one edge `u v` per line over
//! positive integer vertices, optionally preceded by `vertices N` to fix the
//! order (otherwise the largest vertex mentioned).

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::dense::Idx;
use crate::model::{DraftEdge, DraftEset, DraftVertex, GraphDraft, ModelError, MultistageGraph, ValidationReport};
use crate::reduction::{GraphError, UndirectedGraph};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntaxCode {
    Empty,
    Header,
    Version,
    Syntax,
    UnknownDirective,
    DuplicateId,
    UnknownEdge,
    MissingStages,
}

impl SyntaxCode {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntaxCode::Empty => "E_EMPTY",
            SyntaxCode::Header => "E_HEADER",
            SyntaxCode::Version => "E_VERSION",
            SyntaxCode::Syntax => "E_SYNTAX",
            SyntaxCode::UnknownDirective => "E_UNKNOWN_DIRECTIVE",
            SyntaxCode::DuplicateId => "E_DUPLICATE_ID",
            SyntaxCode::UnknownEdge => "E_UNKNOWN_EDGE",
            SyntaxCode::MissingStages => "E_MISSING_STAGES",
        }
    }
}

impl fmt::Display for SyntaxCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{code} at {line}:{column}: {message}")]
    Syntax {
        code: SyntaxCode,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
}

impl FormatError {
    pub fn code(&self) -> Option<SyntaxCode> {
        match self {
            FormatError::Syntax { code, .. } => Some(*code),
            FormatError::Invalid(_) => None,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Splits a line into whitespace-separated tokens, dropping any comment.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            column: content[..s].chars().count() + 1,
        });
    }
    out
}

fn syntax(code: SyntaxCode, line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        code,
        line,
        column,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &Token<'_>, line: usize, what: &str) -> Result<T, FormatError> {
    tok.text
        .parse()
        .map_err(|_| syntax(SyntaxCode::Syntax, line, tok.column, format!("expected {what}, found '{}'", tok.text)))
}

fn arity(toks: &[Token<'_>], line: usize, n: usize, usage: &str) -> Result<(), FormatError> {
    if toks.len() != n {
        let column = toks.get(n).map_or(toks[0].column, |t| t.column);
        return Err(syntax(SyntaxCode::Syntax, line, column, format!("expected `{usage}`")));
    }
    Ok(())
}

/// Parses an instance document into an unchecked draft.
pub fn parse_draft(text: &str) -> Result<GraphDraft, FormatError> {
    let mut header_seen = false;
    let mut stages: Option<usize> = None;
    let mut draft = GraphDraft::default();
    let mut edge_index: HashMap<u64, usize> = HashMap::new();
    let mut pending_esets: Vec<(usize, String, Vec<(u64, usize)>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        if !header_seen {
            if head.text != "msp" {
                return Err(syntax(SyntaxCode::Header, line, head.column, "document must start with `msp 1`"));
            }
            arity(&toks, line, 2, "msp VERSION")?;
            let version: u32 = number(&toks[1], line, "format version")?;
            if version != FORMAT_VERSION {
                return Err(syntax(
                    SyntaxCode::Version,
                    line,
                    toks[1].column,
                    format!("unsupported format version {version}"),
                ));
            }
            header_seen = true;
            continue;
        }
        match head.text {
            "stages" => {
                arity(&toks, line, 2, "stages L")?;
                if stages.is_some() {
                    return Err(syntax(SyntaxCode::Syntax, line, head.column, "`stages` given twice"));
                }
                stages = Some(number(&toks[1], line, "stage count")?);
            }
            "vertex" => {
                arity(&toks, line, 3, "vertex NAME STAGE")?;
                draft.vertices.push(DraftVertex {
                    name: toks[1].text.to_string(),
                    stage: number(&toks[2], line, "stage")?,
                });
            }
            "edge" => {
                arity(&toks, line, 5, "edge ID FROM TO STAGE")?;
                let id: u64 = number(&toks[1], line, "edge id")?;
                if edge_index.insert(id, draft.edges.len()).is_some() {
                    return Err(syntax(
                        SyntaxCode::DuplicateId,
                        line,
                        toks[1].column,
                        format!("edge id {id} defined twice"),
                    ));
                }
                draft.edges.push(DraftEdge {
                    from: toks[2].text.to_string(),
                    to: toks[3].text.to_string(),
                    stage: number(&toks[4], line, "stage")?,
                });
            }
            "eset" => {
                if toks.len() < 2 {
                    return Err(syntax(SyntaxCode::Syntax, line, head.column, "expected `eset VERTEX ID...`"));
                }
                let ids = toks[2..]
                    .iter()
                    .map(|t| Ok((number::<u64>(t, line, "edge id")?, t.column)))
                    .collect::<Result<Vec<_>, FormatError>>()?;
                pending_esets.push((line, toks[1].text.to_string(), ids));
            }
            "msp" => {
                return Err(syntax(SyntaxCode::Header, line, head.column, "header repeated"));
            }
            other => {
                return Err(syntax(
                    SyntaxCode::UnknownDirective,
                    line,
                    head.column,
                    format!("unknown directive '{other}'"),
                ));
            }
        }
    }

    if !header_seen {
        return Err(syntax(SyntaxCode::Empty, 1, 1, "document is empty"));
    }
    draft.stages = stages.ok_or_else(|| syntax(SyntaxCode::MissingStages, 1, 1, "missing `stages` line"))?;
    for (line, vertex, ids) in pending_esets {
        let members = ids
            .into_iter()
            .map(|(id, column)| {
                edge_index.get(&id).copied().ok_or_else(|| {
                    syntax(SyntaxCode::UnknownEdge, line, column, format!("eset references unknown edge {id}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        draft.esets.push(DraftEset { vertex, members });
    }
    Ok(draft)
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<MultistageGraph, FormatError> {
    let draft = parse_draft(text)?;
    MultistageGraph::from_draft(&draft).map_err(|e| match e {
        ModelError::Invalid(report) => FormatError::Invalid(report),
        other => unreachable!("from_draft only fails validation: {other}"),
    })
}

/// Canonical text of a graph.
pub fn serialize_instance(g: &MultistageGraph) -> String {
    let mut out = String::new();
    writeln!(out, "msp {FORMAT_VERSION}").unwrap();
    writeln!(out, "stages {}", g.stages()).unwrap();
    for v in g.vertex_ids() {
        writeln!(out, "vertex {} {}", g.name(v), g.stage_of(v)).unwrap();
    }
    for e in g.edge_ids() {
        let ed = g.edge(e);
        writeln!(out, "edge {} {} {} {}", e.index(), g.name(ed.from), g.name(ed.to), ed.stage).unwrap();
    }
    for v in g.vertex_ids().skip(1) {
        out.push_str("eset ");
        out.push_str(g.name(v));
        for e in g.eset(v).iter() {
            write!(out, " {}", e.index()).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

pub fn parse_ugraph(text: &str) -> Result<UndirectedGraph, GraphFormatError> {
    let mut declared: Option<u32> = None;
    let mut edges: Vec<(u32, u32, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let bad = |message: String| GraphFormatError::Syntax { line, message };
        match toks.as_slice() {
            [] => {}
            [kw, n] if kw.text == "vertices" => {
                if declared.is_some() || !edges.is_empty() {
                    return Err(bad("`vertices` must come first and only once".into()));
                }
                declared = Some(n.text.parse().map_err(|_| bad(format!("bad vertex count '{}'", n.text)))?);
            }
            [a, b] => {
                let parse = |t: &Token<'_>| -> Result<u32, GraphFormatError> {
                    match t.text.parse::<u32>() {
                        Ok(v) if v > 0 => Ok(v),
                        _ => Err(bad(format!("expected a positive vertex number, found '{}'", t.text))),
                    }
                };
                edges.push((parse(a)?, parse(b)?, line));
            }
            _ => return Err(bad("expected `u v`".into())),
        }
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(a, b, _)| a.max(b)).max().unwrap_or(0));
    let mut g = UndirectedGraph::new(n, [])
        .map_err(|source| GraphFormatError::Graph { line: 1, source })?;
    for &(a, b, line) in &edges {
        let next = g.edges().chain([(a, b)]);
        g = UndirectedGraph::new(n, next).map_err(|source| GraphFormatError::Graph { line, source })?;
    }
    Ok(g)
}

pub fn serialize_ugraph(g: &UndirectedGraph) -> String {
    let mut out = format!("vertices {}\n", g.order());
    for (a, b) in g.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    const CHAIN_C: &str = "\
# chain C
msp 1
stages 3
vertex S 0
vertex a 1
vertex b 2
vertex D 3
edge 0 S a 1
edge 1 a b 2
edge 2 b D 3
eset a 0
eset b 0 1
eset D 0 1 2
";

    #[test]
    fn chain_document_matches_builder() {
        let parsed = parse_instance(CHAIN_C).unwrap();
        let built = chain_c();
        assert_eq!(parsed, built);
        assert_eq!(serialize_instance(&parsed), serialize_instance(&built));
    }

    #[test]
    fn reordered_document_canonicalizes() {
        let doc = "msp 1\nstages 3\nvertex D 3\nvertex b 2\nvertex a 1\nvertex S 0\n\
                   edge 7 b D 3\nedge 5 S a 1\nedge 9 a b 2\n\
                   eset D 9 7 5\neset b 9 5\neset a 5\n";
        let g = parse_instance(doc).unwrap();
        assert_eq!(serialize_instance(&g), CHAIN_C.trim_start_matches("# chain C\n"));
    }

    #[test]
    fn error_codes() {
        let code = |t: &str| parse_instance(t).unwrap_err().code();
        assert_eq!(code(""), Some(SyntaxCode::Empty));
        assert_eq!(code("# only a comment\n\n"), Some(SyntaxCode::Empty));
        assert_eq!(code("stages 3\n"), Some(SyntaxCode::Header));
        assert_eq!(code("msp 2\n"), Some(SyntaxCode::Version));
        assert_eq!(code("msp 1\nvertex S 0\n"), Some(SyntaxCode::MissingStages));
        assert_eq!(code("msp 1\nstages 1\nfoo\n"), Some(SyntaxCode::UnknownDirective));
        assert_eq!(code("msp 1\nstages x\n"), Some(SyntaxCode::Syntax));
        let dup = CHAIN_C.replace("edge 2 b D 3", "edge 1 b D 3");
        assert_eq!(code(&dup), Some(SyntaxCode::DuplicateId));
        let unknown = CHAIN_C.replace("eset b 0 1", "eset b 0 42");
        match parse_instance(&unknown).unwrap_err() {
            FormatError::Syntax { code, line, column, .. } => {
                assert_eq!(code, SyntaxCode::UnknownEdge);
                assert_eq!((line, column), (12, 10));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn semantic_errors_come_from_validation() {
        let doc = CHAIN_C.replace("vertex b 2", "vertex b 2\nvertex S2 0");
        match parse_instance(&doc).unwrap_err() {
            FormatError::Invalid(report) => {
                assert!(report.has(crate::model::ViolationCode::MultiSource))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn ugraph_round_trip() {
        let text = "# triangle plus isolated vertex\nvertices 4\n1 2\n2 3 # inline\n3 1\n";
        let g = parse_ugraph(text).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(parse_ugraph(&serialize_ugraph(&g)).unwrap(), g);
        let implicit = parse_ugraph("1 2\n2 3\n").unwrap();
        assert_eq!(implicit.order(), 3);
        assert!(parse_ugraph("1 0\n").is_err());
        assert!(matches!(
            parse_ugraph("1 2\n2 1\n"),
            Err(GraphFormatError::Graph { line: 2, .. })
        ));
    }
}
