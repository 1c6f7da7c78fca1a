//! Proposals extracted from OpenAPI documents and Kubernetes manifests, and
//! merging them into a repository.

mod k8s;
mod merge;
mod openapi;

use std::path::Path;

use crate::format::{Diagnostic, Location};
use crate::model::{slugify, Concern, Entity, Link};

pub use k8s::ingest_k8s;
pub use merge::{merge_proposal, MergeStrategy};
pub use openapi::ingest_openapi;

/// Where a proposal came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub source: String,
    pub extractor: String,
}

/// Elements an extractor proposes to add. References resolve within the
/// proposal or within the repository it was extracted against.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IngestProposal {
    pub entities: Vec<Entity>,
    pub links: Vec<Link>,
    pub concerns: Vec<Concern>,
    pub provenance: Provenance,
}

impl IngestProposal {
    fn new(source: &str, extractor: &str) -> Self {
        IngestProposal {
            provenance: Provenance {
                source: source.to_string(),
                extractor: extractor.to_string(),
            },
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.links.is_empty() && self.concerns.is_empty()
    }
}

/// Slug of a file name without directories or extensions, for concern ids.
fn file_slug(path: &str) -> String {
    let name = Path::new(path).file_name().and_then(|n| n.to_str()).unwrap_or(path);
    let stem = name.split('.').next().unwrap_or(name);
    match slugify(stem) {
        s if s.is_empty() => "source".to_string(),
        s => s,
    }
}

fn at(path: &str, mark: crate::format::yaml::Mark) -> Location {
    Location::new(path, mark)
}

fn yaml_error(path: &str, e: crate::format::yaml::YamlError) -> Diagnostic {
    Diagnostic::error(at(path, e.mark), format!("invalid YAML: {}", e.message))
}
