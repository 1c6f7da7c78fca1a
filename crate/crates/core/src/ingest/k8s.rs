use std::collections::{BTreeMap, BTreeSet};

use crate::format::yaml::{load_stream, Node};
use crate::format::{Diagnostic, SourceDocument};
use crate::model::{
    slugify, Concern, Entity, EntityKind, Id, Interrogative, Link, LinkKind, Repository, Row, Value, View, ViewCell,
};

use super::{at, file_slug, yaml_error, IngestProposal};

/// Label keys whose values name the application a workload runs.
const APP_LABELS: [&str; 2] = ["app", "app.kubernetes.io/name"];

struct Workload {
    kind: String,
    name: String,
    namespace: String,
    replicas: i64,
    images: Vec<String>,
    labels: BTreeMap<String, String>,
    endpoints: Vec<String>,
}

impl Workload {
    /// Entity name, qualified by namespace outside `default`.
    fn entity_name(&self) -> String {
        if self.namespace == "default" {
            self.name.clone()
        } else {
            format!("{}/{}", self.namespace, self.name)
        }
    }
}

struct Service {
    name: String,
    namespace: String,
    selector: BTreeMap<String, String>,
    ports: Vec<String>,
    doc: Node,
}

/// Reads Deployments, StatefulSets, and Services from manifest streams.
///
/// Each workload becomes a `deployment_target`; each Service adds its ports
/// as `endpoints` on the workloads it selects. Workloads whose app label
/// matches a microservice of `target` get a proposed `deployed_on` link, and
/// a builder/where concern tabulates the pods.
pub fn ingest_k8s(docs: &[SourceDocument], target: &Repository) -> (IngestProposal, Vec<Diagnostic>) {
    let mut sorted: Vec<&SourceDocument> = docs.iter().collect();
    sorted.sort();
    let source = sorted.iter().map(|d| d.path.as_str()).collect::<Vec<_>>().join(", ");
    let mut proposal = IngestProposal::new(&source, "k8s");
    let mut diags = Vec::new();
    let mut workloads: Vec<Workload> = Vec::new();
    let mut services: Vec<(String, Service)> = Vec::new();

    for doc in &sorted {
        let path = doc.path.as_str();
        let nodes = match load_stream(&doc.text) {
            Ok(n) => n,
            Err(e) => {
                diags.push(yaml_error(path, e));
                continue;
            }
        };
        for node in nodes.into_iter().filter(|n| !n.is_null()) {
            let Some(kind) = node.get("kind").and_then(Node::scalar_text).map(str::to_string) else {
                diags.push(Diagnostic::warning(
                    at(path, node.mark),
                    "manifest without `kind` skipped",
                ));
                continue;
            };
            let meta = node.get("metadata");
            let Some(name) = meta
                .and_then(|m| m.get("name"))
                .and_then(Node::scalar_text)
                .map(str::to_string)
            else {
                diags.push(Diagnostic::warning(
                    at(path, node.mark),
                    format!("{kind} without `metadata.name` skipped"),
                ));
                continue;
            };
            let namespace = meta
                .and_then(|m| m.get("namespace"))
                .and_then(Node::scalar_text)
                .unwrap_or("default")
                .to_string();
            match kind.as_str() {
                "Deployment" | "StatefulSet" => {
                    let spec = node.get("spec");
                    let replicas = match spec.and_then(|s| s.get("replicas")) {
                        None => 1,
                        Some(r) => match r.to_value().ok().and_then(|v| v.as_i64()).filter(|n| *n >= 0) {
                            Some(n) => n,
                            None => {
                                diags.push(Diagnostic::warning(
                                    at(path, r.mark),
                                    format!("{kind} `{name}` has a malformed replica count; using 1"),
                                ));
                                1
                            }
                        },
                    };
                    let template = spec.and_then(|s| s.get("template"));
                    let mut labels = string_map(meta.and_then(|m| m.get("labels")));
                    labels.extend(string_map(
                        template.and_then(|t| t.get("metadata")).and_then(|m| m.get("labels")),
                    ));
                    labels.extend(string_map(
                        spec.and_then(|s| s.get("selector")).and_then(|s| s.get("matchLabels")),
                    ));
                    let images = template
                        .and_then(|t| t.get("spec"))
                        .and_then(|s| s.get("containers"))
                        .and_then(Node::as_seq)
                        .unwrap_or_default()
                        .iter()
                        .filter_map(|c| c.get("image").and_then(Node::scalar_text))
                        .map(str::to_string)
                        .collect();
                    workloads.push(Workload {
                        kind,
                        name,
                        namespace,
                        replicas,
                        images,
                        labels,
                        endpoints: Vec::new(),
                    });
                }
                "Service" => {
                    let spec = node.get("spec");
                    let selector = string_map(spec.and_then(|s| s.get("selector")));
                    let ports = spec
                        .and_then(|s| s.get("ports"))
                        .and_then(Node::as_seq)
                        .unwrap_or_default()
                        .iter()
                        .filter_map(|p| port_text(&name, p))
                        .collect();
                    services.push((
                        path.to_string(),
                        Service {
                            name,
                            namespace,
                            selector,
                            ports,
                            doc: node,
                        },
                    ));
                }
                "Namespace" => {}
                other => diags.push(Diagnostic::warning(
                    at(path, node.mark),
                    format!("unsupported kind `{other}` (`{name}`) skipped"),
                )),
            }
        }
    }

    for (path, svc) in &services {
        let selected: Vec<usize> = workloads
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                w.namespace == svc.namespace
                    && !svc.selector.is_empty()
                    && svc.selector.iter().all(|(k, v)| w.labels.get(k) == Some(v))
            })
            .map(|(i, _)| i)
            .collect();
        if selected.is_empty() {
            diags.push(Diagnostic::warning(
                at(path, svc.doc.mark),
                format!(
                    "Service `{}` selects no Deployment or StatefulSet in the input",
                    svc.name
                ),
            ));
        }
        for i in selected {
            workloads[i].endpoints.extend(svc.ports.iter().cloned());
        }
    }

    let mut rows = Vec::new();
    let mut refs = BTreeSet::new();
    for w in &workloads {
        let mut entity = Entity::new(EntityKind::DeploymentTarget, w.entity_name())
            .with_attribute("namespace", w.namespace.as_str())
            .with_attribute("workload", w.kind.as_str())
            .with_attribute("replicas", w.replicas)
            .with_attribute("images", Value::list_of_strs(&w.images));
        if !w.labels.is_empty() {
            let labels = w
                .labels
                .iter()
                .map(|(k, v)| (k.clone(), Value::Str(v.clone())))
                .collect();
            entity = entity.with_attribute("labels", Value::Map(labels));
        }
        if !w.endpoints.is_empty() {
            entity = entity.with_attribute("endpoints", Value::list_of_strs(&w.endpoints));
        }
        let apps: BTreeSet<String> = APP_LABELS
            .iter()
            .filter_map(|k| w.labels.get(*k))
            .map(|v| slugify(v))
            .filter(|s| !s.is_empty())
            .collect();
        for app in apps {
            let ms = Entity::derive_id(EntityKind::Microservice, &app);
            if target.entity(ms.as_str()).is_some() {
                proposal
                    .links
                    .push(Link::new(LinkKind::DeployedOn, ms, entity.id().clone()));
            }
        }
        let mut row = Row::new();
        row.insert("pod".into(), Value::Str(w.entity_name()));
        row.insert("deployment_target".into(), Value::Str(entity.id().to_string()));
        row.insert("replicas".into(), Value::Int(w.replicas));
        row.insert("containers".into(), Value::list_of_strs(&w.images));
        row.insert("endpoints".into(), Value::list_of_strs(&w.endpoints));
        rows.push(row);
        refs.insert(entity.id().clone());
        proposal.entities.push(entity);
    }
    if !rows.is_empty() {
        let first = sorted.first().map(|d| d.path.as_str()).unwrap_or("manifests");
        let id = Id::parse(&format!("builder-where.k8s-{}", file_slug(first))).expect("slug parts are valid");
        proposal.concerns.push(
            Concern::new(
                id,
                ViewCell::at(View::Builder, Interrogative::Where),
                format!("Cluster pods and networking extracted from {source}"),
            )
            .with_refs(refs)
            .with_records(rows),
        );
    }
    (proposal, diags)
}

fn string_map(node: Option<&Node>) -> BTreeMap<String, String> {
    node.and_then(Node::as_map)
        .unwrap_or_default()
        .iter()
        .filter_map(|(k, v)| Some((k.scalar_text()?.to_string(), v.scalar_text()?.to_string())))
        .collect()
}

/// `service:port->targetPort/PROTOCOL`, e.g. `cart:80->8080/TCP`.
fn port_text(service: &str, port: &Node) -> Option<String> {
    let number = port.get("port")?.scalar_text()?;
    let target = port.get("targetPort").and_then(Node::scalar_text).unwrap_or(number);
    let protocol = port.get("protocol").and_then(Node::scalar_text).unwrap_or("TCP");
    Some(format!("{service}:{number}->{target}/{protocol}"))
}
