//! Architecture-as-code toolkit for linking stakeholder viewpoint concerns to
//! microservices and APIs.
//!
//! A repository holds typed entities (microservices, apis, business
//! functions, ...), typed links between them, and concerns placed in the
//! cells of a five-view by seven-interrogative grid. The crate parses and
//! writes repositories as YAML, ingests OpenAPI documents and Kubernetes
//! manifests, checks structural rules, and computes coverage, elicitation
//! plans, value scores, clusters, and retirement or reuse candidates.

pub mod analysis;
pub mod format;
pub mod ingest;
pub mod model;
pub mod report;
pub mod validation;

pub use format::{parse_repository, serialize_elements, serialize_repository, Diagnostic, Severity, SourceDocument};
pub use model::{Concern, Entity, EntityKind, Id, Interrogative, Link, LinkKind, Repository, View, ViewCell};
