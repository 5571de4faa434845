//! Subfield-specific priors for δ and τ, embedded as a versioned data file.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::distributions::PriorSpec;
use crate::error::{Error, Result};

/// The embedded catalog file.
pub const CATALOG_JSON: &str = include_str!("../data/subfield_priors.json");

/// Schema version this build understands.
pub const SCHEMA_VERSION: u32 = 1;

/// Topic name of the entry used when a topic is unknown.
pub const POOLED_TOPIC: &str = "Pooled estimate";

/// Priors estimated for one subfield.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubfieldEntry {
    pub topic: String,
    pub comparisons: u32,
    pub studies: u32,
    pub delta_prior: PriorSpec,
    pub tau_prior: PriorSpec,
}

/// The full catalog: one entry per topic plus the pooled estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema_version: u32,
    pub topics: Vec<SubfieldEntry>,
    pub pooled: SubfieldEntry,
}

/// Result of a topic lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lookup {
    pub entry: SubfieldEntry,
    /// True when the topic was not found and the pooled entry was returned.
    pub unmatched: bool,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Catalog = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "catalog schema version {} is not supported (expected {SCHEMA_VERSION})",
                c.schema_version
            )));
        }
        for e in c.topics.iter().chain(std::iter::once(&c.pooled)) {
            e.delta_prior.validate()?;
            e.tau_prior.validate()?;
        }
        Ok(c)
    }

    /// Case-insensitive exact-name lookup falling back to the pooled entry.
    pub fn lookup(&self, topic: &str) -> Lookup {
        let wanted = topic.trim().to_lowercase();
        if wanted == POOLED_TOPIC.to_lowercase() {
            return Lookup { entry: self.pooled.clone(), unmatched: false };
        }
        match self.topics.iter().find(|e| e.topic.to_lowercase() == wanted) {
            Some(e) => Lookup { entry: e.clone(), unmatched: false },
            None => Lookup { entry: self.pooled.clone(), unmatched: true },
        }
    }
}

/// The embedded catalog, parsed once.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| Catalog::from_json(CATALOG_JSON).expect("embedded catalog is valid"))
}

/// Looks up `topic` in the embedded catalog.
pub fn lookup(topic: &str) -> Lookup {
    catalog().lookup(topic)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oral_health() {
        let l = lookup("oral health");
        assert!(!l.unmatched);
        assert_eq!(l.entry.delta_prior, PriorSpec::StudentT { location: 0.0, scale: 0.51, df: 5.0 });
        assert_eq!(l.entry.tau_prior, PriorSpec::InverseGamma { shape: 1.79, scale: 0.28 });
    }

    #[test]
    fn unknown_topic_falls_back() {
        let l = lookup("No Such Field");
        assert!(l.unmatched);
        assert_eq!(l.entry.topic, POOLED_TOPIC);
        assert_eq!(l.entry.delta_prior, PriorSpec::StudentT { location: 0.0, scale: 0.43, df: 5.0 });
        assert_eq!(l.entry.tau_prior, PriorSpec::InverseGamma { shape: 1.71, scale: 0.40 });
        assert!(lookup("Multiple Sclerosis and Rare Diseases of the CNS").unmatched);
    }

    #[test]
    fn shape_of_catalog() {
        let c = catalog();
        assert_eq!(c.topics.len(), 46);
        for e in &c.topics {
            assert!(matches!(e.delta_prior, PriorSpec::StudentT { location, .. } if location == 0.0));
            assert!(matches!(e.tau_prior, PriorSpec::InverseGamma { .. }));
        }
    }

    #[test]
    fn rejects_other_schema_versions() {
        let text = CATALOG_JSON.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
        assert!(Catalog::from_json(&text).is_err());
    }
}
