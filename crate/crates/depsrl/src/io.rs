//! Corpus file formats.
//!
//! Both formats are tab-separated, UTF-8, one token per line with a blank
//! line after every sentence; `#` introduces comments. A header comment
//! `# predicates = i,j,...` lists the sentence's predicate positions.
//!
//! FULL: `INDEX FORM POS HEAD DEPREL` plus one column per predicate. The
//! predicate's own row carries `V`; argument spans use `B-LABEL`/`I-LABEL`;
//! `_` elsewhere.
//!
//! JOINT: `INDEX FORM POS HEAD JLABEL` with the serialized joint label.
//!
//! Writers emit a canonical form (predicates ascending, arguments in
//! canonical order, newline-terminated, no trailing whitespace), so writing
//! a document twice produces identical bytes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::core::{
    parse_label, serialize_label, AnnotatedSentence, Argument, DepTree, JointLabel, JointSentence,
    JointTree, Span, SrlFrame, Token,
};
use crate::error::FormatError;

const UNSET: &str = "_";
const PRED_MARK: &str = "V";

fn syntax_err(path: &str, line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::syntax(path, line, msg)
}

fn check_form(path: &str, line: usize, form: &str) -> Result<(), FormatError> {
    if form.is_empty() {
        return Err(syntax_err(path, line, "empty token form"));
    }
    if form.contains('\t') || form.contains('\n') {
        return Err(syntax_err(path, line, "token form contains tab or newline"));
    }
    Ok(())
}

fn parse_predicates_header(
    path: &str,
    line_no: usize,
    line: &str,
) -> Result<Option<Vec<usize>>, FormatError> {
    let Some(rest) = line.strip_prefix('#') else {
        return Ok(None);
    };
    let rest = rest.trim();
    let Some(list) = rest.strip_prefix("predicates") else {
        return Ok(None);
    };
    let Some(list) = list.trim_start().strip_prefix('=') else {
        return Err(syntax_err(path, line_no, "malformed predicates header"));
    };
    let list = list.trim();
    if list.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let mut out = Vec::new();
    for part in list.split(',') {
        let idx: usize = part.trim().parse().map_err(|_| {
            syntax_err(
                path,
                line_no,
                format!("bad predicate index `{}` in header", part.trim()),
            )
        })?;
        out.push(idx);
    }
    Ok(Some(out))
}

/// One raw sentence block: shared columns plus per-line extras.
struct Block {
    start_line: usize,
    predicates: Option<Vec<usize>>,
    tokens: Vec<Token>,
    heads: Vec<usize>,
    extras: Vec<Vec<String>>,
    lines: Vec<usize>,
}

fn read_blocks(
    path: &str,
    text: &str,
    extra_cols: ExtraColumns,
) -> Result<Vec<Block>, FormatError> {
    let mut blocks = Vec::new();
    let mut current: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            if let Some(block) = current.take() {
                blocks.push(block);
            }
            continue;
        }
        if line.starts_with('#') {
            if current.as_ref().is_some_and(|b| !b.tokens.is_empty()) {
                return Err(syntax_err(path, line_no, "comment inside a sentence block"));
            }
            if let Some(preds) = parse_predicates_header(path, line_no, line)? {
                current
                    .get_or_insert_with(|| Block {
                        start_line: line_no,
                        predicates: None,
                        tokens: Vec::new(),
                        heads: Vec::new(),
                        extras: Vec::new(),
                        lines: Vec::new(),
                    })
                    .predicates = Some(preds);
            }
            continue;
        }
        let block = current.get_or_insert_with(|| Block {
            start_line: line_no,
            predicates: None,
            tokens: Vec::new(),
            heads: Vec::new(),
            extras: Vec::new(),
            lines: Vec::new(),
        });
        let cols: Vec<&str> = line.split('\t').collect();
        let expected = match extra_cols {
            ExtraColumns::PerPredicate => {
                5 + block.predicates.as_ref().map_or(0, |p| p.len())
            }
            ExtraColumns::One => 5,
        };
        if cols.len() != expected {
            return Err(syntax_err(
                path,
                line_no,
                format!("expected {expected} columns, found {}", cols.len()),
            ));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| syntax_err(path, line_no, format!("bad token index `{}`", cols[0])))?;
        if index != block.tokens.len() + 1 {
            return Err(syntax_err(
                path,
                line_no,
                format!(
                    "token index {index} out of order (expected {})",
                    block.tokens.len() + 1
                ),
            ));
        }
        check_form(path, line_no, cols[1])?;
        let head: usize = cols[3]
            .parse()
            .map_err(|_| syntax_err(path, line_no, format!("bad head `{}`", cols[3])))?;
        block.tokens.push(Token {
            index,
            form: cols[1].to_string(),
            pos: (cols[2] != UNSET).then(|| cols[2].to_string()),
        });
        block.heads.push(head);
        block
            .extras
            .push(cols[4..].iter().map(|c| c.to_string()).collect());
        block.lines.push(line_no);
    }
    if let Some(block) = current.take() {
        blocks.push(block);
    }
    Ok(blocks)
}

#[derive(Clone, Copy)]
enum ExtraColumns {
    /// DEPREL plus one column per predicate (FULL).
    PerPredicate,
    /// DEPREL replaced by the joint label (JOINT).
    One,
}

fn block_predicates(path: &str, block: &Block) -> Result<Vec<usize>, FormatError> {
    let n = block.tokens.len();
    let preds = block.predicates.clone().unwrap_or_default();
    for &p in &preds {
        if p == 0 || p > n {
            return Err(syntax_err(
                path,
                block.start_line,
                format!("predicate index {p} out of range 1..={n}"),
            ));
        }
    }
    Ok(preds)
}

fn column_to_arguments(
    path: &str,
    block: &Block,
    col: usize,
    predicate: usize,
) -> Result<Vec<Argument>, FormatError> {
    let mut args = Vec::new();
    let mut open: Option<(String, usize)> = None;
    let mut saw_v = false;
    for (row, extras) in block.extras.iter().enumerate() {
        let line_no = block.lines[row];
        let cell = extras[col].as_str();
        let tok = row + 1;
        if cell == PRED_MARK {
            if tok != predicate {
                return Err(syntax_err(
                    path,
                    line_no,
                    format!("V marker on row {tok} but the column belongs to predicate {predicate}"),
                ));
            }
            saw_v = true;
            if let Some((label, start)) = open.take() {
                args.push(Argument::new(label, start, tok - 1));
            }
            continue;
        }
        if cell == UNSET {
            if let Some((label, start)) = open.take() {
                args.push(Argument::new(label, start, tok - 1));
            }
            continue;
        }
        if let Some(label) = cell.strip_prefix("B-") {
            if let Some((prev, start)) = open.take() {
                args.push(Argument::new(prev, start, tok - 1));
            }
            if label.is_empty() {
                return Err(syntax_err(path, line_no, "empty label after B-"));
            }
            open = Some((label.to_string(), tok));
        } else if let Some(label) = cell.strip_prefix("I-") {
            match &open {
                Some((prev, _)) if prev == label => {}
                _ => {
                    return Err(syntax_err(
                        path,
                        line_no,
                        format!("I-{label} does not continue an open B-{label} span"),
                    ))
                }
            }
        } else {
            return Err(syntax_err(
                path,
                line_no,
                format!("bad predicate-column cell `{cell}`"),
            ));
        }
    }
    if let Some((label, start)) = open.take() {
        args.push(Argument::new(label, start, block.tokens.len()));
    }
    if !saw_v {
        return Err(syntax_err(
            path,
            block.start_line,
            format!("predicate {predicate} has no V marker in its column"),
        ));
    }
    Ok(args)
}

fn parse_full_text(path: &str, text: &str) -> Result<Vec<AnnotatedSentence>, FormatError> {
    let mut sentences = Vec::new();
    for block in read_blocks(path, text, ExtraColumns::PerPredicate)? {
        let preds = block_predicates(path, &block)?;
        let rels: Vec<String> = block.extras.iter().map(|e| e[0].clone()).collect();
        let tree = DepTree::new(block.heads.clone(), rels).map_err(|e| {
            syntax_err(
                path,
                block.start_line,
                format!("sentence starting here: {e}"),
            )
        })?;
        let mut frames = Vec::new();
        for (k, &p) in preds.iter().enumerate() {
            let args = column_to_arguments(path, &block, k + 1, p)?;
            let frame = SrlFrame::new(p, args);
            frame.validate(block.tokens.len()).map_err(|e| {
                syntax_err(path, block.start_line, format!("sentence starting here: {e}"))
            })?;
            frames.push(frame);
        }
        sentences.push(AnnotatedSentence::new(block.tokens, tree, frames));
    }
    Ok(sentences)
}

fn parse_joint_text(path: &str, text: &str) -> Result<Vec<JointSentence>, FormatError> {
    let mut sentences = Vec::new();
    for block in read_blocks(path, text, ExtraColumns::One)? {
        let preds = block_predicates(path, &block)?;
        let mut labels: Vec<JointLabel> = Vec::with_capacity(block.tokens.len());
        for (row, extras) in block.extras.iter().enumerate() {
            let line_no = block.lines[row];
            let label = parse_label(&extras[0])
                .map_err(|e| syntax_err(path, line_no, format!("bad joint label: {e}")))?;
            labels.push(label);
        }
        let tree = JointTree::new(block.heads.clone(), labels).map_err(|e| {
            syntax_err(
                path,
                block.start_line,
                format!("sentence starting here: {e}"),
            )
        })?;
        sentences.push(JointSentence {
            tokens: block.tokens,
            tree,
            predicates: preds.into_iter().collect(),
        });
    }
    Ok(sentences)
}

fn predicates_header(preds: &[usize]) -> String {
    if preds.is_empty() {
        "# predicates =".to_string()
    } else {
        format!(
            "# predicates = {}",
            preds
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Lays argument spans into a predicate column, dropping (deterministically)
/// anything that cannot be represented: spans overlapping an earlier one or
/// covering the predicate itself.
fn fill_predicate_column(n: usize, predicate: usize, args: &[Argument]) -> Vec<String> {
    let mut cells = vec![UNSET.to_string(); n];
    cells[predicate - 1] = PRED_MARK.to_string();
    for arg in args {
        let Span { start, end } = arg.span;
        if start == 0 || end > n || (start..=end).any(|t| cells[t - 1] != UNSET) {
            continue;
        }
        cells[start - 1] = format!("B-{}", arg.label);
        for t in start + 1..=end {
            cells[t - 1] = format!("I-{}", arg.label);
        }
    }
    cells
}

fn render_full(sentences: &[AnnotatedSentence]) -> Result<String, FormatError> {
    let mut out = String::new();
    for sentence in sentences {
        let n = sentence.len();
        // Merge frames per predicate, keeping canonical argument order.
        let preds: Vec<usize> = sentence.predicates().into_iter().collect();
        let mut columns: Vec<Vec<String>> = Vec::with_capacity(preds.len());
        for &p in &preds {
            let merged: BTreeSet<Argument> = sentence
                .frames
                .iter()
                .filter(|f| f.predicate == p)
                .flat_map(|f| f.arguments().iter().cloned())
                .collect();
            let merged: Vec<Argument> = merged.into_iter().collect();
            columns.push(fill_predicate_column(n, p, &merged));
        }
        out.push_str(&predicates_header(&preds));
        out.push('\n');
        for t in 1..=n {
            let token = &sentence.tokens[t - 1];
            check_form("<output>", t, &token.form)?;
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}",
                t,
                token.form,
                token.pos.as_deref().unwrap_or(UNSET),
                sentence.tree.head(t),
                sentence.tree.rel(t)
            ));
            for col in &columns {
                out.push('\t');
                out.push_str(&col[t - 1]);
            }
            out.push('\n');
        }
        out.push('\n');
    }
    Ok(out)
}

fn render_joint(sentences: &[JointSentence]) -> Result<String, FormatError> {
    let mut out = String::new();
    for sentence in sentences {
        let preds: Vec<usize> = sentence.predicates.iter().copied().collect();
        out.push_str(&predicates_header(&preds));
        out.push('\n');
        for t in 1..=sentence.tokens.len() {
            let token = &sentence.tokens[t - 1];
            check_form("<output>", t, &token.form)?;
            let label = serialize_label(sentence.tree.label(t))
                .map_err(|e| syntax_err("<output>", t, format!("unserializable label: {e}")))?;
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                t,
                token.form,
                token.pos.as_deref().unwrap_or(UNSET),
                sentence.tree.head(t),
                label
            ));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a FULL-format corpus; every sentence is fully validated and
/// errors carry file/line locations.
pub fn read_full(path: impl AsRef<Path>) -> Result<Vec<AnnotatedSentence>, FormatError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: name.clone(),
        source,
    })?;
    parse_full_text(&name, &text)
}

pub fn write_full(
    sentences: &[AnnotatedSentence],
    path: impl AsRef<Path>,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let text = render_full(sentences)?;
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_joint(path: impl AsRef<Path>) -> Result<Vec<JointSentence>, FormatError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: name.clone(),
        source,
    })?;
    parse_joint_text(&name, &text)
}

pub fn write_joint(
    sentences: &[JointSentence],
    path: impl AsRef<Path>,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    let text = render_joint(sentences)?;
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// In-memory variants, used by tests and the CLI's stdout mode.
pub fn full_to_string(sentences: &[AnnotatedSentence]) -> Result<String, FormatError> {
    render_full(sentences)
}

pub fn full_from_str(text: &str) -> Result<Vec<AnnotatedSentence>, FormatError> {
    parse_full_text("<input>", text)
}

pub fn joint_to_string(sentences: &[JointSentence]) -> Result<String, FormatError> {
    render_joint(sentences)
}

pub fn joint_from_str(text: &str) -> Result<Vec<JointSentence>, FormatError> {
    parse_joint_text("<input>", text)
}
