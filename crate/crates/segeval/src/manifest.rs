//! Cohort manifests: CSV with header `case_id,role,path`.
//!
//! Roles are `reference`, `method:<name>` or `rater:<id>:<session>`. Relative
//! paths resolve against the manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Reference,
    Method(String),
    Rater { rater: String, session: String },
}

impl Role {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "reference" {
            return Some(Role::Reference);
        }
        if let Some(name) = s.strip_prefix("method:") {
            return (!name.is_empty()).then(|| Role::Method(name.to_string()));
        }
        let rest = s.strip_prefix("rater:")?;
        let (rater, session) = rest.split_once(':')?;
        (!rater.is_empty() && !session.is_empty())
            .then(|| Role::Rater { rater: rater.to_string(), session: session.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub case_id: String,
    pub role: Role,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub entries: Vec<Entry>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed manifest: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: unknown role {role:?} (expected reference, method:<name> or rater:<id>:<session>)")]
    BadRole { line: usize, role: String },
    #[error("line {line}: empty case_id or path")]
    EmptyField { line: usize },
    #[error("manifest has no rows")]
    Empty,
}

impl ManifestError {
    pub fn is_io(&self) -> bool {
        matches!(self, ManifestError::Io(_))
    }
}

#[derive(Deserialize)]
struct RawRow {
    case_id: String,
    role: String,
    path: String,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ManifestError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, row) in reader.deserialize::<RawRow>().enumerate() {
            let row = row?;
            // header is line 1
            let line = i + 2;
            if row.case_id.is_empty() || row.path.is_empty() {
                return Err(ManifestError::EmptyField { line });
            }
            let role = Role::parse(&row.role).ok_or_else(|| ManifestError::BadRole { line, role: row.role.clone() })?;
            let p = PathBuf::from(&row.path);
            let path = if p.is_absolute() { p } else { base.join(p) };
            entries.push(Entry { case_id: row.case_id, role, path });
        }
        if entries.is_empty() {
            return Err(ManifestError::Empty);
        }
        Ok(Self { entries })
    }

    /// Entries grouped by case id, cases in sorted order.
    pub fn cases(&self) -> BTreeMap<&str, Vec<&Entry>> {
        let mut out: BTreeMap<&str, Vec<&Entry>> = BTreeMap::new();
        for e in &self.entries {
            out.entry(e.case_id.as_str()).or_default().push(e);
        }
        out
    }
}
