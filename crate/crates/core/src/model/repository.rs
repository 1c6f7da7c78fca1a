use std::collections::{BTreeMap, BTreeSet};

use super::concern::Concern;
use super::entity::{Entity, EntityKind};
use super::id::Id;
use super::link::{ElementKind, Link, LinkKind};
use super::value::Value;
use super::view::ViewCell;
use super::{ModelError, ModelWarning};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Meta {
    pub name: String,
    pub version: String,
}

/// Result of a successful [`Repository::add_entity`].
#[derive(Debug, Clone, PartialEq)]
pub struct AddedEntity {
    pub id: Id,
    pub warnings: Vec<ModelWarning>,
}

/// An integrity problem found by a full scan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntegrityViolation {
    pub subject: Id,
    pub message: String,
}

/// The in-memory architecture repository.
///
/// Entities, links, and concerns live in id-keyed ordered maps. All ids share
/// one namespace. The `add_*` methods keep referential integrity; the only
/// way to break it is [`Repository::insert_link_unchecked`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Repository {
    meta: Meta,
    entities: BTreeMap<Id, Entity>,
    links: BTreeMap<Id, Link>,
    concerns: BTreeMap<Id, Concern>,
    by_cell: BTreeMap<ViewCell, BTreeSet<Id>>,
}

impl Repository {
    pub fn new(meta: Meta) -> Self {
        Repository {
            meta,
            ..Default::default()
        }
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn set_meta(&mut self, meta: Meta) {
        self.meta = meta;
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.links.is_empty() && self.concerns.is_empty()
    }

    pub fn add_entity(&mut self, entity: Entity) -> Result<AddedEntity, ModelError> {
        if entity.name().trim().is_empty() || entity.id().as_str().ends_with('.') {
            return Err(ModelError::EmptyName { kind: entity.kind() });
        }
        let id = entity.id().clone();
        if self.entities.contains_key(&id) {
            return Err(ModelError::DuplicateEntity(id));
        }
        if self.concerns.contains_key(&id) {
            return Err(ModelError::DuplicateId(id));
        }
        entity.check_attributes()?;
        let warnings = entity
            .unknown_attributes()
            .into_iter()
            .map(|key| ModelWarning::UnknownAttribute {
                entity: id.clone(),
                key: key.to_string(),
            })
            .collect();
        self.entities.insert(id.clone(), entity);
        Ok(AddedEntity { id, warnings })
    }

    pub fn add_link(&mut self, link: Link) -> Result<Id, ModelError> {
        check_weight(link.weight())?;
        self.check_link_endpoints(&link)?;
        if self.links.contains_key(link.id()) {
            return Err(ModelError::DuplicateLink {
                kind: link.kind(),
                from: link.source().clone(),
                to: link.target().clone(),
            });
        }
        let id = link.id().clone();
        self.links.insert(id.clone(), link);
        Ok(id)
    }

    pub fn add_concern(&mut self, concern: Concern) -> Result<Id, ModelError> {
        let id = concern.id().clone();
        if self.concerns.contains_key(&id) {
            return Err(ModelError::DuplicateConcern(id));
        }
        if self.entities.contains_key(&id) {
            return Err(ModelError::DuplicateId(id));
        }
        if let Some(missing) = concern.entity_refs().iter().find(|r| !self.entities.contains_key(*r)) {
            return Err(ModelError::DanglingReference {
                from: id,
                missing: missing.clone(),
            });
        }
        self.by_cell.entry(concern.cell()).or_default().insert(id.clone());
        self.concerns.insert(id.clone(), concern);
        Ok(id)
    }

    /// Stores a link without checking its endpoints. Intended for tests and
    /// tools that need to reproduce hand-edited, inconsistent data; the
    /// `LINK_INTEGRITY` rule reports whatever this lets through.
    #[doc(hidden)]
    pub fn insert_link_unchecked(&mut self, link: Link) {
        self.links.insert(link.id().clone(), link);
    }

    /// Replaces an entity's attribute map, keeping its id and links.
    pub fn replace_attributes(
        &mut self,
        id: &str,
        attributes: BTreeMap<String, Value>,
    ) -> Result<Vec<ModelWarning>, ModelError> {
        let current = self
            .entities
            .get(id)
            .ok_or_else(|| ModelError::UnknownId(Id::from_raw(id.to_string())))?;
        let candidate = current.clone().with_attributes(attributes);
        candidate.check_attributes()?;
        let warnings = candidate
            .unknown_attributes()
            .into_iter()
            .map(|key| ModelWarning::UnknownAttribute {
                entity: candidate.id().clone(),
                key: key.to_string(),
            })
            .collect();
        let attributes = candidate.attributes().clone();
        if let Some(e) = self.entities.get_mut(id) {
            e.set_attributes(attributes);
        }
        Ok(warnings)
    }

    /// Swaps in a new version of an existing concern (same id).
    pub fn replace_concern(&mut self, concern: Concern) -> Result<(), ModelError> {
        let id = concern.id().clone();
        let old = self
            .concerns
            .remove(&id)
            .ok_or_else(|| ModelError::UnknownId(id.clone()))?;
        self.unindex(&old);
        match self.add_concern(concern) {
            Ok(_) => Ok(()),
            Err(e) => {
                self.by_cell.entry(old.cell()).or_default().insert(id.clone());
                self.concerns.insert(id, old);
                Err(e)
            }
        }
    }

    pub fn set_link_weight(&mut self, id: &str, weight: f64) -> Result<(), ModelError> {
        check_weight(weight)?;
        let link = self
            .links
            .get_mut(id)
            .ok_or_else(|| ModelError::UnknownId(Id::from_raw(id.to_string())))?;
        link.set_weight(weight);
        Ok(())
    }

    fn unindex(&mut self, concern: &Concern) {
        if let Some(ids) = self.by_cell.get_mut(&concern.cell()) {
            ids.remove(concern.id());
            if ids.is_empty() {
                self.by_cell.remove(&concern.cell());
            }
        }
    }

    fn check_link_endpoints(&self, link: &Link) -> Result<(), ModelError> {
        let (sources, targets) = link.kind().signature();
        for (end, id, allowed) in [("source", link.source(), sources), ("target", link.target(), targets)] {
            let found = self.resolve(id.as_str()).ok_or_else(|| ModelError::DanglingReference {
                from: link.id().clone(),
                missing: id.clone(),
            })?;
            if !allowed.contains(&found) {
                return Err(ModelError::KindMismatch {
                    kind: link.kind(),
                    end,
                    id: id.clone(),
                    found,
                    expected: allowed.to_vec(),
                });
            }
        }
        Ok(())
    }

    /// What kind of element `id` names, if any.
    pub fn resolve(&self, id: &str) -> Option<ElementKind> {
        if let Some(e) = self.entities.get(id) {
            Some(ElementKind::Entity(e.kind()))
        } else if self.concerns.contains_key(id) {
            Some(ElementKind::Concern)
        } else {
            None
        }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.resolve(id).is_some() || self.links.contains_key(id)
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn link(&self, id: &str) -> Option<&Link> {
        self.links.get(id)
    }

    pub fn concern(&self, id: &str) -> Option<&Concern> {
        self.concerns.get(id)
    }

    /// Entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &Entity> {
        self.entities.values().filter(move |e| e.kind() == kind)
    }

    /// Microservices and apis, in id order.
    pub fn services(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values().filter(|e| e.kind().is_service())
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.values()
    }

    pub fn links_of(&self, kind: LinkKind) -> impl Iterator<Item = &Link> {
        self.links.values().filter(move |l| l.kind() == kind)
    }

    pub fn links_from<'a>(&'a self, source: &'a str) -> impl Iterator<Item = &'a Link> {
        self.links.values().filter(move |l| l.source() == source)
    }

    pub fn links_to<'a>(&'a self, target: &'a str) -> impl Iterator<Item = &'a Link> {
        self.links.values().filter(move |l| l.target() == target)
    }

    pub fn concerns(&self) -> impl Iterator<Item = &Concern> {
        self.concerns.values()
    }

    pub fn concerns_at(&self, cell: ViewCell) -> impl Iterator<Item = &Concern> {
        self.by_cell
            .get(&cell)
            .into_iter()
            .flatten()
            .filter_map(|id| self.concerns.get(id))
    }

    pub fn concern_count_at(&self, cell: ViewCell) -> usize {
        self.by_cell.get(&cell).map_or(0, BTreeSet::len)
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn concern_count(&self) -> usize {
        self.concerns.len()
    }

    /// Full scan for dangling or mistyped references.
    pub fn integrity_violations(&self) -> Vec<IntegrityViolation> {
        let mut out = Vec::new();
        for link in self.links.values() {
            if let Err(e) = self.check_link_endpoints(link) {
                out.push(IntegrityViolation {
                    subject: link.id().clone(),
                    message: e.to_string(),
                });
            }
            if let Err(e) = check_weight(link.weight()) {
                out.push(IntegrityViolation {
                    subject: link.id().clone(),
                    message: e.to_string(),
                });
            }
        }
        for concern in self.concerns.values() {
            for r in concern.entity_refs() {
                if !self.entities.contains_key(r) {
                    out.push(IntegrityViolation {
                        subject: concern.id().clone(),
                        message: format!("entity reference `{r}` does not resolve"),
                    });
                }
            }
        }
        out.sort();
        out
    }
}

fn check_weight(weight: f64) -> Result<(), ModelError> {
    if !weight.is_finite() {
        Err(ModelError::InvalidWeight(weight))
    } else if weight < 0.0 {
        Err(ModelError::NegativeWeight(weight))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Interrogative, View};

    fn id(s: &str) -> Id {
        Id::parse(s).unwrap()
    }

    fn base() -> Repository {
        let mut repo = Repository::default();
        repo.add_entity(Entity::new(EntityKind::Api, "orders")).unwrap();
        repo.add_entity(Entity::new(EntityKind::Microservice, "cart")).unwrap();
        repo.add_entity(Entity::new(EntityKind::BusinessFunction, "billing"))
            .unwrap();
        repo
    }

    #[test]
    fn add_entity_slugs_and_rejects_duplicates() {
        let mut repo = Repository::default();
        let added = repo
            .add_entity(Entity::new(EntityKind::Microservice, "payments").with_attribute("category", "integrity"))
            .unwrap();
        assert_eq!(added.id, "microservice.payments");
        assert!(added.warnings.is_empty());
        assert_eq!(
            repo.add_entity(Entity::new(EntityKind::Microservice, "payments")),
            Err(ModelError::DuplicateEntity(id("microservice.payments")))
        );
        assert_eq!(
            repo.add_entity(Entity::new(EntityKind::Api, "")),
            Err(ModelError::EmptyName { kind: EntityKind::Api })
        );
        assert_eq!(
            repo.add_entity(Entity::new(EntityKind::Api, "?!")),
            Err(ModelError::EmptyName { kind: EntityKind::Api })
        );
        // same kind, same slug
        assert!(repo
            .add_entity(Entity::new(EntityKind::Microservice, "Payments"))
            .is_err());
        // other kind, same name is fine
        assert!(repo.add_entity(Entity::new(EntityKind::Api, "payments")).is_ok());
    }

    #[test]
    fn unknown_attribute_is_a_warning() {
        let mut repo = Repository::default();
        let added = repo
            .add_entity(Entity::new(EntityKind::Microservice, "x").with_attribute("colour", "red"))
            .unwrap();
        assert_eq!(
            added.warnings,
            vec![ModelWarning::UnknownAttribute {
                entity: id("microservice.x"),
                key: "colour".into()
            }]
        );
        assert!(repo.entity("microservice.x").is_some());
    }

    #[test]
    fn add_link_checks_signature() {
        let mut repo = base();
        let lid = repo
            .add_link(Link::new(LinkKind::Exposes, id("api.orders"), id("microservice.cart")))
            .unwrap();
        assert_eq!(lid, "exposes--api.orders--microservice.cart");
        assert!(matches!(
            repo.add_link(Link::new(
                LinkKind::Automates,
                id("api.orders"),
                id("business_function.billing")
            )),
            Err(ModelError::KindMismatch { end: "source", .. })
        ));
        assert!(matches!(
            repo.add_link(Link::new(LinkKind::Exposes, id("api.orders"), id("microservice.nope"))),
            Err(ModelError::DanglingReference { .. })
        ));
        assert!(matches!(
            repo.add_link(Link::new(LinkKind::Exposes, id("api.orders"), id("microservice.cart"))),
            Err(ModelError::DuplicateLink { .. })
        ));
        assert!(matches!(
            repo.add_link(
                Link::new(
                    LinkKind::Automates,
                    id("microservice.cart"),
                    id("business_function.billing")
                )
                .with_weight(-1.0)
            ),
            Err(ModelError::NegativeWeight(_))
        ));
        assert!(repo.integrity_violations().is_empty());
    }

    #[test]
    fn add_concern_checks_refs() {
        let mut repo = base();
        let c = Concern::new(
            id("owner-how"),
            ViewCell::at(View::Owner, Interrogative::How),
            "billing automated by cart",
        )
        .with_refs([id("business_function.billing"), id("microservice.cart")]);
        repo.add_concern(c).unwrap();
        assert_eq!(repo.concern_count_at(ViewCell::at(View::Owner, Interrogative::How)), 1);

        let why = Concern::new(id("why-orders"), ViewCell::at(View::Scope, Interrogative::Why), "")
            .with_ref(id("api.orders"));
        assert!(repo.add_concern(why).is_ok());

        let dangling =
            Concern::new(id("c2"), ViewCell::at(View::Scope, Interrogative::What), "").with_ref(id("api.missing"));
        assert!(matches!(
            repo.add_concern(dangling),
            Err(ModelError::DanglingReference { .. })
        ));
        let clash = Concern::new(id("api.orders"), ViewCell::consumer(), "");
        assert_eq!(repo.add_concern(clash), Err(ModelError::DuplicateId(id("api.orders"))));
    }

    #[test]
    fn unchecked_links_show_up_in_scan() {
        let mut repo = base();
        repo.insert_link_unchecked(Link::new(
            LinkKind::Automates,
            id("api.orders"),
            id("business_function.gone"),
        ));
        let v = repo.integrity_violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].subject, "automates--api.orders--business_function.gone");
    }

    #[test]
    fn replace_concern_reindexes() {
        let mut repo = base();
        let cell_a = ViewCell::at(View::Scope, Interrogative::Who);
        let cell_b = ViewCell::at(View::Scope, Interrogative::What);
        repo.add_concern(Concern::new(id("c"), cell_a, "x")).unwrap();
        repo.replace_concern(Concern::new(id("c"), cell_b, "y")).unwrap();
        assert_eq!(repo.concern_count_at(cell_a), 0);
        assert_eq!(repo.concern_count_at(cell_b), 1);
        let mut fresh = base();
        fresh.add_concern(Concern::new(id("c"), cell_b, "y")).unwrap();
        assert_eq!(repo, fresh);
    }
}
