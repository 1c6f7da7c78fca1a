//! Reading repository files into fragments and assembling fragments into a
//! checked [`Repository`].

use std::collections::{BTreeMap, BTreeSet};

use super::diagnostic::{Diagnostic, Location};
use super::yaml::{load_stream, Mark, Node};
use super::SourceDocument;
use crate::model::{
    Concern, Entity, EntityKind, Id, Interrogative, Link, LinkKind, Meta, ModelError, Repository, Row, Value, View,
    ViewCell,
};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct EntityDecl {
    pub entity: Entity,
    pub mark: Mark,
    pub attribute_marks: BTreeMap<String, Mark>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LinkDecl {
    pub link: Link,
    pub mark: Mark,
    pub source_mark: Mark,
    pub target_mark: Mark,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ConcernDecl {
    pub concern: Concern,
    pub mark: Mark,
    pub ref_marks: BTreeMap<Id, Mark>,
}

/// The declarations of one file, structurally valid but not yet
/// cross-checked against other files.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct Fragment {
    pub path: String,
    pub meta: Option<(Meta, Mark)>,
    pub entities: Vec<EntityDecl>,
    pub links: Vec<LinkDecl>,
    pub concerns: Vec<ConcernDecl>,
    /// Unknown top-level keys, kept so a rewrite does not lose them.
    pub extras: BTreeMap<String, Value>,
}

struct Reader<'a> {
    path: &'a str,
    diagnostics: Vec<Diagnostic>,
}

/// Accessor over a mapping node that reports missing, mistyped, and unknown keys.
struct Fields<'n> {
    node: &'n Node,
    entries: &'n [(Node, Node)],
}

impl<'a> Reader<'a> {
    fn error(&mut self, mark: Mark, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::error(Location::new(self.path, mark), message));
    }

    fn warning(&mut self, mark: Mark, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::warning(Location::new(self.path, mark), message));
    }

    fn fields<'n>(&mut self, node: &'n Node, what: &str, allowed: &[&str]) -> Option<Fields<'n>> {
        let Some(entries) = node.as_map() else {
            self.error(node.mark, format!("{what} must be a map, found {}", node.type_name()));
            return None;
        };
        let mut seen = BTreeSet::new();
        let mut ok = true;
        for (k, _) in entries {
            match k.scalar_text() {
                Some(key) if !seen.insert(key) => {
                    self.error(k.mark, format!("duplicate key `{key}` in {what}"));
                    ok = false;
                }
                Some(key) if !allowed.contains(&key) => {
                    self.error(
                        k.mark,
                        format!("unknown key `{key}` in {what}; expected one of {}", allowed.join(", ")),
                    );
                    ok = false;
                }
                Some(_) => {}
                None => {
                    self.error(k.mark, format!("keys of {what} must be scalars"));
                    ok = false;
                }
            }
        }
        ok.then_some(Fields { node, entries })
    }

    fn required<'n>(&mut self, fields: &Fields<'n>, key: &str, what: &str) -> Option<&'n Node> {
        let found = fields.get(key);
        if found.is_none() {
            self.error(fields.node.mark, format!("{what} is missing `{key}`"));
        }
        found
    }

    /// Any non-null scalar, read as its source text.
    fn text(&mut self, node: &Node, what: &str) -> Option<String> {
        match node.scalar_text() {
            Some(t) if !node.is_null() => Some(t.to_string()),
            _ => {
                self.error(
                    node.mark,
                    format!("{what} must be a string, found {}", node.type_name()),
                );
                None
            }
        }
    }

    fn id(&mut self, node: &Node, what: &str) -> Option<Id> {
        let text = self.text(node, what)?;
        let id = Id::parse(&text);
        if id.is_none() {
            self.error(node.mark, ModelError::InvalidId(text).to_string());
        }
        id
    }

    fn parsed<T: std::str::FromStr<Err = ModelError>>(&mut self, node: &Node, what: &str) -> Option<T> {
        let text = self.text(node, what)?;
        match text.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(node.mark, e.to_string());
                None
            }
        }
    }

    fn value(&mut self, node: &Node) -> Option<Value> {
        match node.to_value() {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(e.mark, e.message);
                None
            }
        }
    }

    fn items<'n>(&mut self, node: &'n Node, section: &str) -> &'n [Node] {
        if node.is_null() {
            return &[];
        }
        match node.as_seq() {
            Some(items) => items,
            None => {
                self.error(
                    node.mark,
                    format!("`{section}` must be a list, found {}", node.type_name()),
                );
                &[]
            }
        }
    }

    fn meta(&mut self, node: &Node) -> Option<Meta> {
        let f = self.fields(node, "meta", &["name", "version"])?;
        let mut meta = Meta::default();
        if let Some(n) = f.get("name") {
            meta.name = self.text(n, "meta name")?;
        }
        if let Some(v) = f.get("version") {
            meta.version = self.text(v, "meta version")?;
        }
        Some(meta)
    }

    fn entity(&mut self, node: &Node) -> Option<EntityDecl> {
        let f = self.fields(node, "entity", &["kind", "name", "id", "attributes"])?;
        let kind_node = self.required(&f, "kind", "entity");
        let name_node = self.required(&f, "name", "entity");
        let kind: EntityKind = self.parsed(kind_node?, "entity kind")?;
        let name = self.text(name_node?, "entity name")?;
        let mut attribute_marks = BTreeMap::new();
        let mut attributes = BTreeMap::new();
        if let Some(attrs) = f.get("attributes").filter(|n| !n.is_null()) {
            let Some(Value::Map(map)) = self.value(attrs) else {
                self.error(attrs.mark, "entity attributes must be a map");
                return None;
            };
            for (k, _) in attrs.as_map().unwrap_or_default() {
                if let Some(key) = k.scalar_text() {
                    attribute_marks.insert(key.to_string(), k.mark);
                }
            }
            attributes = map;
        }
        let entity = Entity::new(kind, name).with_attributes(attributes);
        if let Some(id_node) = f.get("id") {
            let given = self.text(id_node, "entity id")?;
            if given != entity.id().as_str() {
                self.error(
                    id_node.mark,
                    format!(
                        "entity id `{given}` does not match the id derived from its kind and name (`{}`)",
                        entity.id()
                    ),
                );
                return None;
            }
        }
        Some(EntityDecl {
            entity,
            mark: node.mark,
            attribute_marks,
        })
    }

    fn link(&mut self, node: &Node) -> Option<LinkDecl> {
        let f = self.fields(node, "link", &["kind", "source", "target", "weight"])?;
        let kind_node = self.required(&f, "kind", "link");
        let source_node = self.required(&f, "source", "link");
        let target_node = self.required(&f, "target", "link");
        let kind: LinkKind = self.parsed(kind_node?, "link kind")?;
        let (source_node, target_node) = (source_node?, target_node?);
        let source = self.id(source_node, "link source")?;
        let target = self.id(target_node, "link target")?;
        let mut link = Link::new(kind, source, target);
        if let Some(w) = f.get("weight") {
            match w.to_value() {
                Ok(v) if v.as_f64().is_some() => link = link.with_weight(v.as_f64().unwrap_or(1.0)),
                _ => {
                    self.error(w.mark, format!("link weight must be a number, found {}", w.type_name()));
                    return None;
                }
            }
        }
        Some(LinkDecl {
            link,
            mark: node.mark,
            source_mark: source_node.mark,
            target_mark: target_node.mark,
        })
    }

    fn concern(&mut self, node: &Node) -> Option<ConcernDecl> {
        let f = self.fields(
            node,
            "concern",
            &["id", "view", "interrogative", "statement", "entity_refs", "records"],
        )?;
        let id_node = self.required(&f, "id", "concern");
        let view_node = self.required(&f, "view", "concern");
        let id = self.id(id_node?, "concern id")?;
        let view: View = self.parsed(view_node?, "view")?;
        let interrogative: Option<Interrogative> = match f.get("interrogative").filter(|n| !n.is_null()) {
            Some(n) => Some(self.parsed(n, "interrogative")?),
            None => None,
        };
        let cell = match ViewCell::new(view, interrogative) {
            Ok(cell) => cell,
            Err(e) => {
                self.error(node.mark, format!("concern `{id}`: {e}"));
                return None;
            }
        };
        let statement = match f.get("statement").filter(|n| !n.is_null()) {
            Some(n) => self.text(n, "statement")?,
            None => String::new(),
        };
        let mut ref_marks = BTreeMap::new();
        if let Some(refs) = f.get("entity_refs") {
            for r in self.items(refs, "entity_refs") {
                let rid = self.id(r, "entity reference")?;
                if ref_marks.insert(rid.clone(), r.mark).is_some() {
                    self.warning(r.mark, format!("`{rid}` is listed twice in entity_refs"));
                }
            }
        }
        let mut records: Vec<Row> = Vec::new();
        if let Some(rows) = f.get("records") {
            for row in self.items(rows, "records") {
                match self.value(row)? {
                    Value::Map(m) => records.push(m.into_iter().map(|(k, v)| (k, mark_flag(v))).collect()),
                    other => {
                        self.error(row.mark, format!("records must be maps, found {}", other.type_name()));
                        return None;
                    }
                }
            }
        }
        let concern = Concern::new(id, cell, statement)
            .with_refs(ref_marks.keys().cloned())
            .with_records(records);
        Some(ConcernDecl {
            concern,
            mark: node.mark,
            ref_marks,
        })
    }

    fn document(&mut self, root: &Node, fragment: &mut Fragment) {
        if root.is_null() {
            return;
        }
        let Some(entries) = root.as_map() else {
            self.error(
                root.mark,
                format!("a repository document must be a map, found {}", root.type_name()),
            );
            return;
        };
        for (k, v) in entries {
            let Some(key) = k.scalar_text() else {
                self.error(k.mark, "top-level keys must be scalars");
                continue;
            };
            match key {
                "meta" => {
                    if let Some(meta) = self.meta(v) {
                        if let Some((_, first)) = &fragment.meta {
                            self.error(
                                k.mark,
                                format!("`meta` declared twice in this file (first at line {})", first.line),
                            );
                        } else {
                            fragment.meta = Some((meta, k.mark));
                        }
                    }
                }
                "entities" => {
                    for item in self.items(v, "entities") {
                        if let Some(d) = self.entity(item) {
                            fragment.entities.push(d);
                        }
                    }
                }
                "links" => {
                    for item in self.items(v, "links") {
                        if let Some(d) = self.link(item) {
                            fragment.links.push(d);
                        }
                    }
                }
                "concerns" => {
                    for item in self.items(v, "concerns") {
                        if let Some(d) = self.concern(item) {
                            fragment.concerns.push(d);
                        }
                    }
                }
                other => {
                    self.warning(k.mark, format!("unknown top-level key `{other}` ignored"));
                    if let Some(value) = self.value(v) {
                        fragment.extras.insert(other.to_string(), value);
                    }
                }
            }
        }
    }
}

impl<'n> Fields<'n> {
    fn get(&self, key: &str) -> Option<&'n Node> {
        self.entries
            .iter()
            .find(|(k, _)| k.scalar_text() == Some(key))
            .map(|(_, v)| v)
    }
}

/// Reads one file. `None` means the file could not be read as YAML at all;
/// otherwise the fragment holds every declaration that was well-formed.
pub(crate) fn read_fragment(doc: &SourceDocument) -> (Option<Fragment>, Vec<Diagnostic>) {
    let mut reader = Reader {
        path: &doc.path,
        diagnostics: Vec::new(),
    };
    let docs = match load_stream(&doc.text) {
        Ok(docs) => docs,
        Err(e) => {
            reader.error(e.mark, format!("YAML syntax error: {}", e.message));
            return (None, reader.diagnostics);
        }
    };
    let mut fragment = Fragment {
        path: doc.path.clone(),
        ..Default::default()
    };
    for root in &docs {
        reader.document(root, &mut fragment);
    }
    (Some(fragment), reader.diagnostics)
}

/// Table cells ticked with a bare `x` are flags.
fn mark_flag(v: Value) -> Value {
    match v {
        Value::Str(s) if s == "x" || s == "X" => Value::Bool(true),
        other => other,
    }
}

/// Cross-file assembly: meta reconciliation, duplicate detection, and
/// referential integrity. Fragments must already be in path order.
pub(crate) fn assemble(fragments: &[Fragment], diagnostics: &mut Vec<Diagnostic>) -> Repository {
    let mut repo = Repository::default();
    let mut meta_origin: Option<(Meta, Location)> = None;
    for frag in fragments {
        if let Some((meta, mark)) = &frag.meta {
            let here = Location::new(&frag.path, *mark);
            match &meta_origin {
                Some((first, at)) if first != meta => diagnostics.push(Diagnostic::error(
                    here,
                    format!("conflicting `meta` (already declared at {at})"),
                )),
                Some(_) => {}
                None => meta_origin = Some((meta.clone(), here)),
            }
        }
    }
    if let Some((meta, _)) = meta_origin {
        repo.set_meta(meta);
    }

    // Ids that were declared but rejected; references to them are not
    // reported again.
    let mut failed: BTreeSet<Id> = BTreeSet::new();
    let mut declared_at: BTreeMap<Id, Location> = BTreeMap::new();

    for frag in fragments {
        for decl in &frag.entities {
            let here = Location::new(&frag.path, decl.mark);
            match repo.add_entity(decl.entity.clone()) {
                Ok(added) => {
                    for w in added.warnings {
                        let crate::model::ModelWarning::UnknownAttribute { key, .. } = &w;
                        let mark = decl.attribute_marks.get(key).copied().unwrap_or(decl.mark);
                        diagnostics.push(Diagnostic::warning(Location::new(&frag.path, mark), w.to_string()));
                    }
                    declared_at.insert(added.id, here);
                }
                Err(e) => {
                    let message = match (&e, declared_at.get(decl.entity.id())) {
                        (ModelError::DuplicateEntity(_), Some(first)) => {
                            format!("{e} (first declared at {first})")
                        }
                        _ => {
                            failed.insert(decl.entity.id().clone());
                            e.to_string()
                        }
                    };
                    diagnostics.push(Diagnostic::error(here, message));
                }
            }
        }
    }

    for frag in fragments {
        for decl in &frag.concerns {
            let id = decl.concern.id().clone();
            let here = Location::new(&frag.path, decl.mark);
            let mut dangling = false;
            for (r, mark) in &decl.ref_marks {
                if repo.entity(r.as_str()).is_some() || failed.contains(r) {
                    continue;
                }
                dangling = true;
                let message = if repo.concern(r.as_str()).is_some() {
                    format!("concern `{id}` lists `{r}` in entity_refs, but it is a concern, not an entity")
                } else {
                    format!("concern `{id}` references undeclared id `{r}`")
                };
                diagnostics.push(Diagnostic::error(Location::new(&frag.path, *mark), message));
            }
            if dangling || decl.ref_marks.keys().any(|r| failed.contains(r)) {
                failed.insert(id);
                continue;
            }
            match repo.add_concern(decl.concern.clone()) {
                Ok(_) => {
                    declared_at.insert(id, here);
                }
                Err(e) => {
                    let message = match declared_at.get(&id) {
                        Some(first) => format!("{e} (first declared at {first})"),
                        None => e.to_string(),
                    };
                    diagnostics.push(Diagnostic::error(here, message));
                }
            }
        }
    }

    for frag in fragments {
        for decl in &frag.links {
            let link = &decl.link;
            if failed.contains(link.source()) || failed.contains(link.target()) {
                continue;
            }
            if let Err(err) = repo.add_link(link.clone()) {
                let mark = match &err {
                    ModelError::DanglingReference { missing, .. } if missing == link.source() => decl.source_mark,
                    ModelError::DanglingReference { .. } => decl.target_mark,
                    ModelError::KindMismatch { end: "source", .. } => decl.source_mark,
                    ModelError::KindMismatch { .. } => decl.target_mark,
                    _ => decl.mark,
                };
                diagnostics.push(Diagnostic::error(Location::new(&frag.path, mark), err.to_string()));
            }
        }
    }
    repo
}
