use std::collections::BTreeMap;

use crate::format::yaml::{load_stream, Node};
use crate::format::{Diagnostic, SourceDocument};
use crate::model::{slugify, Concern, Entity, EntityKind, Id, Interrogative, Row, Value, View, ViewCell};

use super::{at, file_slug, yaml_error, IngestProposal};

const VERBS: [&str; 8] = ["get", "put", "post", "delete", "options", "head", "patch", "trace"];
const DESIGN_TECH: &str = "OpenAPI";

/// One api entity per tag when the document uses tags, otherwise one for the
/// document title. Every (path, verb) pair becomes a method record, and all
/// records are gathered in a designer/how concern.
pub fn ingest_openapi(doc: &SourceDocument) -> (IngestProposal, Vec<Diagnostic>) {
    let path = doc.path.as_str();
    let mut proposal = IngestProposal::new(path, "openapi");
    let mut diags = Vec::new();

    let root = match load_stream(&doc.text) {
        Ok(docs) => docs.into_iter().find(|d| !d.is_null()),
        Err(e) => {
            diags.push(yaml_error(path, e));
            return (proposal, diags);
        }
    };
    let Some(root) = root.filter(|r| r.as_map().is_some()) else {
        diags.push(Diagnostic::error(
            super::Location::start_of(path),
            "an OpenAPI document must be a map",
        ));
        return (proposal, diags);
    };

    if let Some(v) = root.get("swagger") {
        diags.push(Diagnostic::error(
            at(path, v.mark),
            format!(
                "Swagger {} documents are not supported; convert to OpenAPI 3.x",
                v.scalar_text().unwrap_or("2.0")
            ),
        ));
        return (proposal, diags);
    }
    match root.get("openapi") {
        Some(v) if v.scalar_text().is_some_and(|t| t.trim().starts_with("3.")) => {}
        Some(v) => {
            diags.push(Diagnostic::error(
                at(path, v.mark),
                format!(
                    "unsupported OpenAPI version `{}`; only 3.x is read",
                    v.scalar_text().unwrap_or("?")
                ),
            ));
            return (proposal, diags);
        }
        None => diags.push(Diagnostic::warning(
            at(path, root.mark),
            "no `openapi` version field; reading as OpenAPI 3.x",
        )),
    }

    let info = root.get("info");
    let title = match info.and_then(|i| i.get("title")).and_then(Node::scalar_text) {
        Some(t) if !slugify(t).is_empty() => t.trim().to_string(),
        _ => {
            diags.push(Diagnostic::warning(
                at(path, info.unwrap_or(&root).mark),
                "`info.title` is missing; naming the api after the file",
            ));
            file_slug(path)
        }
    };
    let description = info
        .and_then(|i| i.get("description"))
        .and_then(Node::scalar_text)
        .map(str::trim)
        .filter(|d| !d.is_empty());

    let mut groups: Vec<Group> = Vec::new();
    for tag in root.get("tags").and_then(Node::as_seq).unwrap_or_default() {
        match tag.get("name").and_then(Node::scalar_text) {
            Some(name) if !slugify(name).is_empty() => {
                let d = tag.get("description").and_then(Node::scalar_text);
                group_of(name.trim(), d.map(str::trim), &mut groups);
            }
            _ => diags.push(Diagnostic::warning(
                at(path, tag.mark),
                "tag without a usable `name` ignored",
            )),
        }
    }

    let mut untagged = Vec::new();
    let paths = root.get("paths");
    let entries = match paths {
        None => &[][..],
        Some(p) if p.is_null() => &[][..],
        Some(p) => match p.as_map() {
            Some(entries) => entries,
            None => {
                diags.push(Diagnostic::warning(at(path, p.mark), "`paths` must be a map; ignored"));
                &[][..]
            }
        },
    };
    for (key, item) in entries {
        let Some(route) = key.scalar_text().filter(|r| r.starts_with('/')) else {
            diags.push(Diagnostic::warning(
                at(path, key.mark),
                format!(
                    "path `{}` does not start with `/`; skipped",
                    key.scalar_text().unwrap_or("?")
                ),
            ));
            continue;
        };
        let Some(ops) = item.as_map() else {
            diags.push(Diagnostic::warning(
                at(path, item.mark),
                format!("path item for `{route}` must be a map; skipped"),
            ));
            continue;
        };
        for (verb_node, op) in ops {
            let Some(verb) = verb_node.scalar_text().map(str::to_ascii_lowercase) else {
                continue;
            };
            if !VERBS.contains(&verb.as_str()) {
                continue;
            }
            if op.as_map().is_none() {
                diags.push(Diagnostic::warning(
                    at(path, op.mark),
                    format!("operation `{verb} {route}` must be a map; skipped"),
                ));
                continue;
            }
            let record = method_record(&verb, route, op);
            let tag = op
                .get("tags")
                .and_then(Node::as_seq)
                .and_then(|t| t.first())
                .and_then(Node::scalar_text)
                .filter(|t| !slugify(t).is_empty());
            match tag {
                Some(t) => {
                    let i = group_of(t.trim(), None, &mut groups);
                    groups[i].2.push(record);
                }
                None => untagged.push(record),
            }
        }
    }

    if groups.is_empty() || !untagged.is_empty() {
        let i = group_of(&title, description, &mut groups);
        groups[i].2.append(&mut untagged);
    }
    let total: usize = groups.iter().map(|g| g.2.len()).sum();
    if total == 0 {
        diags.push(Diagnostic::warning(
            at(path, paths.unwrap_or(&root).mark),
            "document declares no operations",
        ));
    }

    let mut rows = Vec::new();
    for (name, description, methods) in groups {
        let mut entity = Entity::new(EntityKind::Api, name)
            .with_attribute("methods", Value::List(methods.clone()))
            .with_attribute("documentation", path);
        if let Some(d) = description {
            entity = entity.with_attribute("description", d);
        }
        for m in methods {
            let mut row: Row = m.as_map().cloned().unwrap_or_default();
            row.insert("api".into(), Value::Str(entity.id().to_string()));
            rows.push(row);
        }
        proposal.entities.push(entity);
    }
    if !rows.is_empty() {
        let id = Id::parse(&format!("designer-how.openapi-{}", file_slug(path))).expect("slug parts are valid");
        let concern = Concern::new(
            id,
            ViewCell::at(View::Designer, Interrogative::How),
            format!("API design details extracted from {path}"),
        )
        .with_refs(proposal.entities.iter().map(|e| e.id().clone()))
        .with_records(rows);
        proposal.concerns.push(concern);
    }
    (proposal, diags)
}

/// Api name, description, method records.
type Group = (String, Option<String>, Vec<Value>);

fn group_of(name: &str, description: Option<&str>, groups: &mut Vec<Group>) -> usize {
    let key = slugify(name);
    match groups.iter().position(|(n, _, _)| slugify(n) == key) {
        Some(i) => {
            if groups[i].1.is_none() {
                groups[i].1 = description.map(str::to_string);
            }
            i
        }
        None => {
            groups.push((name.to_string(), description.map(str::to_string), Vec::new()));
            groups.len() - 1
        }
    }
}

fn method_record(verb: &str, route: &str, op: &Node) -> Value {
    let codes: Vec<String> = op
        .get("responses")
        .and_then(Node::as_map)
        .unwrap_or_default()
        .iter()
        .filter_map(|(k, _)| k.scalar_text().map(|t| t.trim().to_string()))
        .collect();
    let mut record = BTreeMap::new();
    record.insert("verb".to_string(), Value::Str(verb.to_string()));
    record.insert("path".to_string(), Value::Str(route.to_string()));
    record.insert("design_tech".to_string(), Value::Str(DESIGN_TECH.to_string()));
    if let Some(code) = codes.iter().find_map(|c| c.parse::<i64>().ok()) {
        record.insert("status_code".to_string(), Value::Int(code));
    }
    if !codes.is_empty() {
        record.insert("status_codes".to_string(), Value::list_of_strs(codes));
    }
    Value::Map(record)
}
