//! Parsing of project metadata dumps and ports inventories, name
//! normalization, and success labeling.
//!
//! Project dumps are header-bearing delimited text (default comma) whose
//! columns are `project_id`, `name` and a subset of the schema's attribute
//! names. Multi-valued cells use `|` as the inner separator. Ports
//! inventories are newline-delimited package names with `#` comments.

mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use schema::{AttrKind, AttrSpec, Schema};

/// Which portal a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repository {
    FreshMeat,
    SourceForge,
}

impl std::fmt::Display for Repository {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Repository::FreshMeat => write!(f, "freshmeat"),
            Repository::SourceForge => write!(f, "sourceforge"),
        }
    }
}

/// Success label: a project is successful when it is ported into both
/// FreeBSD Ports and Gentoo Portage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Successful,
    Unsuccessful,
}

/// Source of a ports inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortsSource {
    FreeBsdPorts,
    GentooPortage,
}

/// One raw attribute value. Unparseable or empty cells become `Missing`,
/// never an empty string or zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttrValue {
    Text(String),
    Number(f64),
    Date(NaiveDate),
    Set(BTreeSet<String>),
    Missing,
}

impl AttrValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, AttrValue::Missing)
    }
}

/// One project's raw metadata plus an optional success label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub project_id: String,
    pub repository: Repository,
    pub name: String,
    pub raw_fields: BTreeMap<String, AttrValue>,
    pub label: Option<Label>,
}

impl ProjectRecord {
    pub fn field(&self, name: &str) -> &AttrValue {
        self.raw_fields.get(name).unwrap_or(&AttrValue::Missing)
    }
}

/// Deduplicated, normalized package names from one ports tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortsInventory {
    pub source: PortsSource,
    pub names: BTreeSet<String>,
}

impl PortsInventory {
    pub fn contains(&self, normalized_name: &str) -> bool {
        self.names.contains(normalized_name)
    }
}

/// Records plus any non-fatal parse warnings (duplicate names, skipped rows).
#[derive(Debug)]
pub struct ParseOutcome {
    pub records: Vec<ProjectRecord>,
    pub warnings: Vec<String>,
}

/// Match-count summary produced alongside labeling so the operator can
/// audit how many projects were found in each inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelStats {
    pub total: usize,
    pub successful: usize,
    pub freebsd_matches: usize,
    pub gentoo_matches: usize,
}

/// Lowercase and strip every non-alphanumeric character.
pub fn normalize_name(raw: &str) -> String {
    raw.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(|c| c.to_lowercase())
        .collect()
}

/// Parse a project dump against a schema descriptor.
///
/// The header must contain `project_id` and `name`; every other column must
/// be declared in the schema. Cells that fail to parse under the declared
/// kind become [`AttrValue::Missing`]. Duplicate project ids are an error;
/// duplicate normalized names keep the first occurrence and add a warning.
pub fn parse_projects<R: Read>(input: R, schema: &Schema, delimiter: u8) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(false)
        .from_reader(input);

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("unreadable header: {e}")))?
        .clone();

    let mut id_col = None;
    let mut name_col = None;
    let mut attr_cols: Vec<(usize, AttrSpec)> = Vec::new();
    for (idx, column) in headers.iter().enumerate() {
        match column {
            "project_id" => id_col = Some(idx),
            "name" => name_col = Some(idx),
            other => match schema.attr(other) {
                Some(spec) => attr_cols.push((idx, spec.clone())),
                None => {
                    return Err(Error::Schema(format!(
                        "unknown column '{other}' for {} schema",
                        schema.repository
                    )))
                }
            },
        }
    }
    let id_col = id_col.ok_or_else(|| Error::Schema("missing 'project_id' column".into()))?;
    let name_col = name_col.ok_or_else(|| Error::Schema("missing 'name' column".into()))?;

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen_names: BTreeSet<String> = BTreeSet::new();
    let mut duplicate_ids: BTreeSet<String> = BTreeSet::new();

    for (row_idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", row_idx + 1)))?;
        let project_id = row.get(id_col).unwrap_or("").trim().to_string();
        if project_id.is_empty() {
            return Err(Error::Parse(format!(
                "row {}: empty project_id",
                row_idx + 1
            )));
        }
        if seen_ids.insert(project_id.clone(), row_idx).is_some() {
            duplicate_ids.insert(project_id.clone());
            continue;
        }

        let raw_name = row.get(name_col).unwrap_or("");
        let name = normalize_name(raw_name);
        if name.is_empty() {
            return Err(Error::Parse(format!(
                "row {}: name '{raw_name}' normalizes to empty",
                row_idx + 1
            )));
        }
        if !seen_names.insert(name.clone()) {
            warnings.push(format!(
                "row {}: duplicate project name '{name}' (id {project_id}), keeping first occurrence",
                row_idx + 1
            ));
            continue;
        }

        let mut raw_fields = BTreeMap::new();
        for (col, spec) in &attr_cols {
            let cell = row.get(*col).unwrap_or("");
            raw_fields.insert(spec.name.clone(), parse_cell(cell, spec.kind));
        }

        records.push(ProjectRecord {
            project_id,
            repository: schema.repository,
            name,
            raw_fields,
            label: None,
        });
    }

    if !duplicate_ids.is_empty() {
        return Err(Error::DuplicateKey(duplicate_ids.into_iter().collect()));
    }

    Ok(ParseOutcome { records, warnings })
}

fn parse_cell(cell: &str, kind: AttrKind) -> AttrValue {
    let cell = cell.trim();
    if cell.is_empty() {
        return AttrValue::Missing;
    }
    match kind {
        AttrKind::Numeric => match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => AttrValue::Number(v),
            _ => AttrValue::Missing,
        },
        AttrKind::Categorical => AttrValue::Text(cell.to_string()),
        AttrKind::MultiCategorical => {
            let set: BTreeSet<String> = cell
                .split('|')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            if set.is_empty() {
                AttrValue::Missing
            } else {
                AttrValue::Set(set)
            }
        }
        AttrKind::Date => match NaiveDate::parse_from_str(cell, "%Y-%m-%d") {
            Ok(d) => AttrValue::Date(d),
            Err(_) => AttrValue::Missing,
        },
    }
}

/// Serialize records back to dump format (header row, schema column order).
/// `parse_projects(write_projects(r)) == r` for unlabeled collections.
pub fn write_projects<W: Write>(
    out: W,
    records: &[ProjectRecord],
    schema: &Schema,
    delimiter: u8,
) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);

    let mut header = vec!["project_id".to_string(), "name".to_string()];
    header.extend(schema.attributes.iter().map(|a| a.name.clone()));
    writer
        .write_record(&header)
        .map_err(|e| Error::Parse(format!("write header: {e}")))?;

    for record in records {
        let mut row = vec![record.project_id.clone(), record.name.clone()];
        for attr in &schema.attributes {
            row.push(render_cell(record.field(&attr.name)));
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::Parse(format!("write row: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}

fn render_cell(value: &AttrValue) -> String {
    match value {
        AttrValue::Text(s) => s.clone(),
        AttrValue::Number(n) => format!("{n}"),
        AttrValue::Date(d) => d.format("%Y-%m-%d").to_string(),
        AttrValue::Set(s) => s.iter().cloned().collect::<Vec<_>>().join("|"),
        AttrValue::Missing => String::new(),
    }
}

/// Parse a newline-delimited ports inventory. Blank lines and `#` comments
/// are ignored; names are normalized and deduplicated.
pub fn parse_ports<R: Read>(mut input: R, source: PortsSource) -> Result<PortsInventory> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;

    let mut names = BTreeSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let name = normalize_name(line);
        if !name.is_empty() {
            names.insert(name);
        }
    }
    Ok(PortsInventory { source, names })
}

/// Label every record: `Successful` iff its normalized name appears in both
/// inventories, `Unsuccessful` otherwise. Pure; input order preserved.
pub fn label_projects(
    records: Vec<ProjectRecord>,
    freebsd: &PortsInventory,
    gentoo: &PortsInventory,
) -> Vec<ProjectRecord> {
    records
        .into_iter()
        .map(|mut record| {
            let successful = freebsd.contains(&record.name) && gentoo.contains(&record.name);
            record.label = Some(if successful {
                Label::Successful
            } else {
                Label::Unsuccessful
            });
            record
        })
        .collect()
}

/// Match counts for auditing the labeling run.
pub fn label_stats(
    records: &[ProjectRecord],
    freebsd: &PortsInventory,
    gentoo: &PortsInventory,
) -> LabelStats {
    let mut stats = LabelStats {
        total: records.len(),
        successful: 0,
        freebsd_matches: 0,
        gentoo_matches: 0,
    };
    for record in records {
        let in_fb = freebsd.contains(&record.name);
        let in_gt = gentoo.contains(&record.name);
        if in_fb {
            stats.freebsd_matches += 1;
        }
        if in_gt {
            stats.gentoo_matches += 1;
        }
        if in_fb && in_gt {
            stats.successful += 1;
        }
    }
    stats
}
