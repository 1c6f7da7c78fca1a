//! Repository files: a YAML document stream (JSON is accepted too) with the
//! top-level sections `meta`, `entities`, `links`, and `concerns`.
//!
//! Parsing is order independent: documents are processed in path order and
//! entities may be referenced from any file. Serialization is canonical, so
//! equal repositories always produce identical text.

mod diagnostic;
mod emit;
mod parse;
pub mod yaml;

use std::collections::BTreeMap;

pub use diagnostic::{has_errors, Diagnostic, Location, Severity};

use emit::{emit, Out};
use parse::{assemble, read_fragment, Fragment};

use crate::model::{Concern, Entity, Link, Meta, Repository, Value};

/// A named UTF-8 input text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceDocument {
    pub path: String,
    pub text: String,
}

impl SourceDocument {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceDocument {
            path: path.into(),
            text: text.into(),
        }
    }

    /// Decodes `bytes`, reporting invalid UTF-8 at the offending line.
    pub fn from_bytes(path: impl Into<String>, bytes: Vec<u8>) -> Result<Self, Diagnostic> {
        let path = path.into();
        match String::from_utf8(bytes) {
            Ok(text) => Ok(SourceDocument { path, text }),
            Err(e) => {
                let valid = &e.as_bytes()[..e.utf8_error().valid_up_to()];
                let line = 1 + valid.iter().filter(|&&b| b == b'\n').count();
                let column = 1 + valid.iter().rev().take_while(|&&b| b != b'\n').count();
                Err(Diagnostic::error(
                    Location {
                        file: path,
                        line,
                        column,
                    },
                    "file is not valid UTF-8",
                ))
            }
        }
    }
}

fn sorted_docs(docs: &[SourceDocument]) -> Vec<&SourceDocument> {
    let mut sorted: Vec<_> = docs.iter().collect();
    sorted.sort();
    sorted
}

/// Parses and cross-checks a set of files.
///
/// Returns `None` whenever any error diagnostic was produced. Diagnostics
/// come back sorted by location.
pub fn parse_repository(docs: &[SourceDocument]) -> (Option<Repository>, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut fragments = Vec::new();
    for doc in sorted_docs(docs) {
        let (fragment, diags) = read_fragment(doc);
        diagnostics.extend(diags);
        fragments.extend(fragment);
    }
    let repo = assemble(&fragments, &mut diagnostics);
    diagnostics.sort();
    diagnostics.dedup();
    if has_errors(&diagnostics) {
        (None, diagnostics)
    } else {
        (Some(repo), diagnostics)
    }
}

/// Canonical text for `repo`: schema fields in fixed order, free-form maps
/// with sorted keys, and every collection sorted by id.
pub fn serialize_repository(repo: &Repository) -> String {
    let entities: Vec<&Entity> = repo.entities().collect();
    let links: Vec<&Link> = repo.links().collect();
    let concerns: Vec<&Concern> = repo.concerns().collect();
    emit(&document_out(
        Some(repo.meta()),
        &entities,
        &links,
        &concerns,
        &BTreeMap::new(),
    ))
}

/// Canonical text for a loose set of elements, without a `meta` section.
/// The output is a valid repository file when its references resolve.
pub fn serialize_elements(entities: &[Entity], links: &[Link], concerns: &[Concern]) -> String {
    let mut entities: Vec<&Entity> = entities.iter().collect();
    let mut links: Vec<&Link> = links.iter().collect();
    let mut concerns: Vec<&Concern> = concerns.iter().collect();
    entities.sort_by(|a, b| a.id().cmp(b.id()));
    links.sort_by(|a, b| a.id().cmp(b.id()));
    concerns.sort_by(|a, b| a.id().cmp(b.id()));
    emit(&document_out(None, &entities, &links, &concerns, &BTreeMap::new()))
}

/// Rewrites a single file canonically without resolving references across
/// files. Fails with the file's own diagnostics if it has errors.
pub fn format_document(doc: &SourceDocument) -> Result<String, Vec<Diagnostic>> {
    let (fragment, mut diagnostics) = read_fragment(doc);
    diagnostics.sort();
    match fragment {
        Some(f) if !has_errors(&diagnostics) => Ok(fragment_text(&f)),
        _ => Err(diagnostics),
    }
}

fn fragment_text(f: &Fragment) -> String {
    let mut entities: Vec<&Entity> = f.entities.iter().map(|d| &d.entity).collect();
    let mut links: Vec<&Link> = f.links.iter().map(|d| &d.link).collect();
    let mut concerns: Vec<&Concern> = f.concerns.iter().map(|d| &d.concern).collect();
    entities.sort_by(|a, b| a.id().cmp(b.id()));
    links.sort_by(|a, b| a.id().cmp(b.id()));
    concerns.sort_by(|a, b| a.id().cmp(b.id()));
    emit(&document_out(
        f.meta.as_ref().map(|(m, _)| m),
        &entities,
        &links,
        &concerns,
        &f.extras,
    ))
}

fn document_out(
    meta: Option<&Meta>,
    entities: &[&Entity],
    links: &[&Link],
    concerns: &[&Concern],
    extras: &BTreeMap<String, Value>,
) -> Out {
    let mut root = Vec::new();
    if let Some(meta) = meta {
        root.push((
            "meta".to_string(),
            Out::map(vec![
                ("name", Out::str(&meta.name)),
                ("version", Out::str(&meta.version)),
            ]),
        ));
    }
    root.push((
        "entities".to_string(),
        Out::List(entities.iter().map(|e| entity_out(e)).collect()),
    ));
    root.push((
        "links".to_string(),
        Out::List(links.iter().map(|l| link_out(l)).collect()),
    ));
    root.push((
        "concerns".to_string(),
        Out::List(concerns.iter().map(|c| concern_out(c)).collect()),
    ));
    root.extend(extras.iter().map(|(k, v)| (k.clone(), Out::from(v))));
    Out::Map(root)
}

fn entity_out(e: &Entity) -> Out {
    let mut fields = vec![("kind", Out::str(e.kind().name())), ("name", Out::str(e.name()))];
    if !e.attributes().is_empty() {
        fields.push(("attributes", Out::sorted_map(e.attributes())));
    }
    Out::map(fields)
}

fn link_out(l: &Link) -> Out {
    Out::map(vec![
        ("kind", Out::str(l.kind().name())),
        ("source", Out::str(l.source().as_str())),
        ("target", Out::str(l.target().as_str())),
        ("weight", Out::Scalar(Value::Float(l.weight()))),
    ])
}

fn concern_out(c: &Concern) -> Out {
    let cell = c.cell();
    let mut fields = vec![
        ("id", Out::str(c.id().as_str())),
        ("view", Out::str(cell.view().name())),
    ];
    if let Some(i) = cell.interrogative() {
        fields.push(("interrogative", Out::str(i.name())));
    }
    fields.push(("statement", Out::str(c.statement())));
    if !c.entity_refs().is_empty() {
        fields.push((
            "entity_refs",
            Out::List(c.entity_refs().iter().map(|r| Out::str(r.as_str())).collect()),
        ));
    }
    if !c.records().is_empty() {
        fields.push(("records", Out::List(c.records().iter().map(Out::sorted_map).collect())));
    }
    Out::map(fields)
}
