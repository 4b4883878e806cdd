//! Decision-table ingestion and dictionary encoding.
//!
//! A table is a set of objects described by categorical condition attributes
//! plus one decision attribute. Every raw token is dictionary-encoded into a
//! dense integer identifier per column, assigned in first-occurrence order, so
//! downstream partitioning only ever compares small integers.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};

/// How the first input line is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Header iff every first-line token is non-numeric and they are pairwise
    /// distinct.
    #[default]
    Auto,
    Yes,
    No,
}

/// What to do with rows containing the missing-value token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Treat the token as an ordinary category.
    #[default]
    Keep,
    /// Remove the row and report how many were removed.
    Drop,
}

/// Which raw column holds the decision attribute.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ColumnSelector {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

/// Parsing configuration for delimiter-separated text.
#[derive(Clone, Debug)]
pub struct SchemaConfig {
    /// Field delimiter. `' '` splits on arbitrary whitespace runs.
    pub delimiter: char,
    pub header: HeaderMode,
    pub decision: ColumnSelector,
    pub missing_token: String,
    pub missing: MissingPolicy,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        SchemaConfig {
            delimiter: ',',
            header: HeaderMode::Auto,
            decision: ColumnSelector::Last,
            missing_token: "?".to_string(),
            missing: MissingPolicy::Keep,
        }
    }
}

/// One attribute: its name and the dictionary mapping identifiers back to the
/// original tokens. Identifiers are dense: every id in `0..cardinality()`
/// occurs in at least one row.
#[derive(Clone, Debug)]
pub struct AttributeDescriptor {
    name: String,
    values: Vec<String>,
}

impl AttributeDescriptor {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of distinct values observed for this attribute.
    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    /// Original token for a value identifier.
    pub fn token(&self, id: u32) -> &str {
        &self.values[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.values
    }
}

/// A sorted, duplicate-free set of condition-attribute indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AttributeSubset {
    indices: Vec<usize>,
}

impl AttributeSubset {
    /// Builds a subset from arbitrary indices; sorts and deduplicates.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        AttributeSubset { indices }
    }

    pub fn empty() -> Self {
        AttributeSubset::default()
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        AttributeSubset {
            indices: (0..n).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, attr: usize) -> bool {
        self.indices.binary_search(&attr).is_ok()
    }

    pub fn is_subset_of(&self, other: &AttributeSubset) -> bool {
        self.indices.iter().all(|a| other.contains(*a))
    }

    /// Copy with `attr` inserted.
    pub fn with(&self, attr: usize) -> Self {
        let mut indices = self.indices.clone();
        if let Err(pos) = indices.binary_search(&attr) {
            indices.insert(pos, attr);
        }
        AttributeSubset { indices }
    }

    /// Copy with `attr` removed.
    pub fn without(&self, attr: usize) -> Self {
        let mut indices = self.indices.clone();
        if let Ok(pos) = indices.binary_search(&attr) {
            indices.remove(pos);
        }
        AttributeSubset { indices }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

impl fmt::Display for AttributeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// An immutable, dictionary-encoded decision table.
///
/// Rows are stored flattened, one `u32` identifier per cell, with the decision
/// identifier last. The table is safely shareable by concurrent readers.
#[derive(Clone, Debug)]
pub struct DecisionTable {
    condition_attrs: Vec<AttributeDescriptor>,
    decision_attr: AttributeDescriptor,
    rows: Vec<u32>,
    n_objects: usize,
}

impl DecisionTable {
    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_condition_attrs(&self) -> usize {
        self.condition_attrs.len()
    }

    pub fn condition_attrs(&self) -> &[AttributeDescriptor] {
        &self.condition_attrs
    }

    pub fn condition_attr(&self, attr: usize) -> &AttributeDescriptor {
        &self.condition_attrs[attr]
    }

    pub fn decision_attr(&self) -> &AttributeDescriptor {
        &self.decision_attr
    }

    pub fn decision_cardinality(&self) -> usize {
        self.decision_attr.cardinality()
    }

    /// Row width in storage: `|C| + 1`, decision identifier last.
    pub fn row_width(&self) -> usize {
        self.condition_attrs.len() + 1
    }

    /// The full encoded row of an object, decision last.
    pub fn row(&self, obj: usize) -> &[u32] {
        let w = self.row_width();
        &self.rows[obj * w..(obj + 1) * w]
    }

    /// Value identifier of `obj` on condition attribute `attr`.
    pub fn value(&self, obj: usize, attr: usize) -> u32 {
        debug_assert!(attr < self.condition_attrs.len());
        self.rows[obj * self.row_width() + attr]
    }

    /// Decision value identifier of `obj`.
    pub fn decision_value(&self, obj: usize) -> u32 {
        self.rows[obj * self.row_width() + self.row_width() - 1]
    }

    /// Projects an object onto `attrs` (ascending attribute order), appending
    /// the decision identifier when `include_decision` is set.
    ///
    /// Panics if `obj` or any attribute index is out of range.
    pub fn project_row(&self, obj: usize, attrs: &AttributeSubset, include_decision: bool) -> Vec<u32> {
        let mut out = Vec::with_capacity(attrs.len() + usize::from(include_decision));
        for a in attrs.iter() {
            out.push(self.value(obj, a));
        }
        if include_decision {
            out.push(self.decision_value(obj));
        }
        out
    }

    /// Resolves a condition attribute given by name, or by 0-based index when
    /// the token parses as an integer and no attribute carries that name.
    pub fn resolve_condition_attr(&self, token: &str) -> Option<usize> {
        if let Some(pos) = self.condition_attrs.iter().position(|d| d.name() == token) {
            return Some(pos);
        }
        token
            .parse::<usize>()
            .ok()
            .filter(|&i| i < self.condition_attrs.len())
    }
}

/// Incremental builder shared by the parser and the synthetic generator, so
/// both assign identifiers with the same first-occurrence rule.
pub(crate) struct TableBuilder {
    columns: Vec<ColumnBuilder>,
    rows: Vec<u32>,
    n_objects: usize,
}

struct ColumnBuilder {
    name: String,
    values: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl ColumnBuilder {
    fn new(name: String) -> Self {
        ColumnBuilder {
            name,
            values: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    fn encode(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.lookup.get(token) {
            return id;
        }
        let id = self.values.len() as u32;
        self.values.push(token.to_string());
        self.lookup.insert(token.to_string(), id);
        id
    }

    fn finish(self) -> AttributeDescriptor {
        AttributeDescriptor {
            name: self.name,
            values: self.values,
        }
    }
}

impl TableBuilder {
    /// `condition_names` in table order; the decision column is handled last.
    pub(crate) fn new(condition_names: Vec<String>, decision_name: String) -> Self {
        let mut columns: Vec<ColumnBuilder> = condition_names.into_iter().map(ColumnBuilder::new).collect();
        columns.push(ColumnBuilder::new(decision_name));
        TableBuilder {
            columns,
            rows: Vec::new(),
            n_objects: 0,
        }
    }

    /// Appends one row; `fields` must be in storage order (decision last) and
    /// match the column count.
    pub(crate) fn push_row(&mut self, fields: &[&str]) {
        debug_assert_eq!(fields.len(), self.columns.len());
        for (col, token) in self.columns.iter_mut().zip(fields) {
            let id = col.encode(token);
            self.rows.push(id);
        }
        self.n_objects += 1;
    }

    pub(crate) fn finish(mut self, context: &str) -> Result<DecisionTable> {
        if self.n_objects == 0 {
            return Err(Error::EmptyUniverse(context.to_string()));
        }
        let decision_attr = self.columns.pop().expect("builder has a decision column").finish();
        let condition_attrs = self.columns.into_iter().map(ColumnBuilder::finish).collect();
        Ok(DecisionTable {
            condition_attrs,
            decision_attr,
            rows: self.rows,
            n_objects: self.n_objects,
        })
    }
}

/// Result of [`parse_table`]: the table plus how many rows the missing-value
/// policy removed.
#[derive(Debug)]
pub struct Parsed {
    pub table: DecisionTable,
    pub dropped_rows: usize,
}

fn split_line(line: &str, delimiter: char) -> Vec<&str> {
    if delimiter == ' ' {
        line.split_whitespace().collect()
    } else {
        line.split(delimiter).collect()
    }
}

/// First line is a header iff no token parses as a number and all tokens are
/// pairwise distinct.
fn looks_like_header(fields: &[&str]) -> bool {
    if fields.iter().any(|f| f.parse::<f64>().is_ok()) {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    fields.iter().all(|f| seen.insert(*f))
}

/// Parses delimiter-separated text into a dictionary-encoded table.
///
/// Row order is preserved: object `i` corresponds to the `i`-th non-dropped
/// data line. Blank lines are ignored; a trailing `\r` is stripped so CRLF
/// files parse cleanly.
pub fn parse_table<R: BufRead>(reader: R, cfg: &SchemaConfig) -> Result<Parsed> {
    let mut lines = reader.lines();
    let mut line_no = 0usize;

    // First non-blank line fixes the arity and settles the header question.
    let first = loop {
        line_no += 1;
        match lines.next() {
            None => return Err(Error::EmptyUniverse("input has no data lines".to_string())),
            Some(line) => {
                let line = line?;
                let trimmed = line.trim_end_matches('\r');
                if !trimmed.trim().is_empty() {
                    break trimmed.to_string();
                }
            }
        }
    };

    let first_fields = split_line(&first, cfg.delimiter);
    let arity = first_fields.len();
    let has_header = match cfg.header {
        HeaderMode::Yes => true,
        HeaderMode::No => false,
        HeaderMode::Auto => looks_like_header(&first_fields),
    };

    let decision_col = match &cfg.decision {
        ColumnSelector::Last => arity - 1,
        ColumnSelector::Index(i) => {
            if *i >= arity {
                return Err(Error::domain(format!(
                    "decision column index {i} out of range for {arity} columns"
                )));
            }
            *i
        }
        ColumnSelector::Name(name) => {
            if !has_header {
                return Err(Error::domain(format!(
                    "decision column named {name:?} requires a header row"
                )));
            }
            match first_fields.iter().position(|f| f == name) {
                Some(i) => i,
                None => {
                    return Err(Error::domain(format!(
                        "decision column {name:?} not found in header"
                    )))
                }
            }
        }
    };

    let (condition_names, decision_name) = if has_header {
        let names: Vec<String> = first_fields
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != decision_col)
            .map(|(_, f)| f.to_string())
            .collect();
        (names, first_fields[decision_col].to_string())
    } else {
        let names = (1..arity).map(|i| format!("a{i}")).collect();
        (names, "d".to_string())
    };

    let mut builder = TableBuilder::new(condition_names, decision_name);
    let mut dropped_rows = 0usize;

    let mut handle_row = |fields: Vec<&str>, line_no: usize, builder: &mut TableBuilder| -> Result<()> {
        if fields.len() != arity {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {arity} fields, found {}", fields.len()),
            });
        }
        if cfg.missing == MissingPolicy::Drop && fields.iter().any(|f| *f == cfg.missing_token) {
            dropped_rows += 1;
            return Ok(());
        }
        let mut reordered: Vec<&str> = Vec::with_capacity(arity);
        reordered.extend(fields.iter().enumerate().filter(|(i, _)| *i != decision_col).map(|(_, f)| *f));
        reordered.push(fields[decision_col]);
        builder.push_row(&reordered);
        Ok(())
    };

    if !has_header {
        handle_row(first_fields, line_no, &mut builder)?;
    }
    for line in lines {
        line_no += 1;
        let line = line?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }
        handle_row(split_line(trimmed, cfg.delimiter), line_no, &mut builder)?;
    }

    let context = if dropped_rows > 0 {
        format!("all {dropped_rows} data rows were dropped by the missing-value policy")
    } else {
        "input has no data lines".to_string()
    };
    let table = builder.finish(&context)?;
    Ok(Parsed { table, dropped_rows })
}

/// Convenience wrapper over [`parse_table`] for in-memory text.
pub fn parse_table_str(text: &str, cfg: &SchemaConfig) -> Result<Parsed> {
    parse_table(text.as_bytes(), cfg)
}
