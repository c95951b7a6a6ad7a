use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Repository;

/// Kind of a raw project attribute as declared by a repository schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttrKind {
    Numeric,
    Categorical,
    MultiCategorical,
    Date,
}

/// One attribute declaration: name, kind and whether the attribute is
/// emitted as a feature on its own. Attributes that only feed composite
/// scores (e.g. `url_hits`) ship with `emit: false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrSpec {
    pub name: String,
    pub kind: AttrKind,
    #[serde(default = "default_emit")]
    pub emit: bool,
}

fn default_emit() -> bool {
    true
}

impl AttrSpec {
    pub fn new(name: &str, kind: AttrKind) -> Self {
        AttrSpec {
            name: name.to_string(),
            kind,
            emit: true,
        }
    }

    pub fn hidden(name: &str, kind: AttrKind) -> Self {
        AttrSpec {
            name: name.to_string(),
            kind,
            emit: false,
        }
    }
}

/// Declarative description of one portal's project dump: which attributes
/// exist and how each one is typed. Loadable from JSON so operators can
/// override the built-in descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub repository: Repository,
    pub attributes: Vec<AttrSpec>,
}

impl Schema {
    /// Built-in descriptor for the given portal.
    pub fn builtin(repository: Repository) -> Schema {
        match repository {
            Repository::FreshMeat => Schema::freshmeat(),
            Repository::SourceForge => Schema::sourceforge(),
        }
    }

    /// FreshMeat attributes. The hidden ones feed the vitality, popularity
    /// and weighted-rating composites and are not emitted standalone.
    pub fn freshmeat() -> Schema {
        Schema {
            repository: Repository::FreshMeat,
            attributes: vec![
                AttrSpec::new("license", AttrKind::Categorical),
                AttrSpec::hidden("versions", AttrKind::Numeric),
                AttrSpec::hidden("first_release", AttrKind::Date),
                AttrSpec::hidden("latest_release", AttrKind::Date),
                AttrSpec::hidden("url_hits", AttrKind::Numeric),
                AttrSpec::hidden("portal_hits", AttrKind::Numeric),
                AttrSpec::new("subscriptions", AttrKind::Numeric),
                AttrSpec::hidden("rating", AttrKind::Numeric),
                AttrSpec::new("votes", AttrKind::Numeric),
                AttrSpec::new("developers", AttrKind::Numeric),
                AttrSpec::new("registration_date", AttrKind::Date),
            ],
        }
    }

    /// SourceForge attributes.
    pub fn sourceforge() -> Schema {
        Schema {
            repository: Repository::SourceForge,
            attributes: vec![
                AttrSpec::new("license", AttrKind::Categorical),
                AttrSpec::new("developers", AttrKind::Numeric),
                AttrSpec::new("audience", AttrKind::MultiCategorical),
                AttrSpec::new("operating_system", AttrKind::MultiCategorical),
                AttrSpec::new("dbms", AttrKind::MultiCategorical),
                AttrSpec::new("language", AttrKind::MultiCategorical),
                AttrSpec::new("downloads", AttrKind::Numeric),
                AttrSpec::new("interface", AttrKind::MultiCategorical),
                AttrSpec::new("natural_language", AttrKind::MultiCategorical),
                AttrSpec::new("topic", AttrKind::MultiCategorical),
                AttrSpec::new("registration_date", AttrKind::Date),
                AttrSpec::new("status", AttrKind::Categorical),
                AttrSpec::new("donors", AttrKind::Numeric),
                AttrSpec::new("rank", AttrKind::Numeric),
            ],
        }
    }

    pub fn from_json<R: Read>(reader: R) -> Result<Schema> {
        let schema: Schema = serde_json::from_reader(reader)
            .map_err(|e| Error::Schema(format!("invalid schema document: {e}")))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for attr in &self.attributes {
            if attr.name.is_empty() {
                return Err(Error::Schema("attribute with empty name".into()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::Schema(format!(
                    "attribute '{}' declared twice",
                    attr.name
                )));
            }
        }
        Ok(())
    }

    pub fn attr(&self, name: &str) -> Option<&AttrSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// True when `name` is declared with the given kind.
    pub fn has(&self, name: &str, kind: AttrKind) -> bool {
        self.attr(name).map(|a| a.kind == kind).unwrap_or(false)
    }
}
