//! Domain types: interrogatives, views and cells, entities, links,
//! concerns, and the repository that ties them together.

mod concern;
mod entity;
mod id;
mod interrogative;
mod link;
mod repository;
mod value;
mod view;

use thiserror::Error;

pub use concern::Concern;
pub use entity::{Category, Entity, EntityKind, Exposure, METHOD_RECORD_KEYS};
pub use id::{is_valid_id, slugify, Id};
pub use interrogative::{interrogative_order, prerequisites, Alias, Interrogative, PrecedenceGraph};
pub use link::{ElementKind, Link, LinkKind};
pub use repository::{AddedEntity, IntegrityViolation, Meta, Repository};
pub use value::{Row, Value};
pub use view::{cells, View, ViewCell, CELL_COUNT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown interrogative `{0}`")]
    UnknownInterrogative(String),
    #[error("unknown view `{0}`")]
    UnknownView(String),
    #[error("unknown entity kind `{0}`")]
    UnknownEntityKind(String),
    #[error("unknown link kind `{0}`")]
    UnknownLinkKind(String),
    #[error("`{0}` is not a valid id (lowercase slug segments separated by `.`)")]
    InvalidId(String),
    #[error("{}", invalid_cell_message(*view, *interrogative))]
    InvalidCell {
        view: View,
        interrogative: Option<Interrogative>,
    },
    #[error("{kind} name must not be empty")]
    EmptyName { kind: EntityKind },
    #[error("duplicate entity `{0}`")]
    DuplicateEntity(Id),
    #[error("duplicate concern `{0}`")]
    DuplicateConcern(Id),
    #[error("id `{0}` is already used by another element")]
    DuplicateId(Id),
    #[error("duplicate {kind} link from `{from}` to `{to}`")]
    DuplicateLink { kind: LinkKind, from: Id, to: Id },
    #[error("`{from}` references `{missing}`, which is not declared")]
    DanglingReference { from: Id, missing: Id },
    #[error("{kind} {end} `{id}` is a {found}; expected {}", kind_list(expected))]
    KindMismatch {
        kind: LinkKind,
        end: &'static str,
        id: Id,
        found: ElementKind,
        expected: Vec<ElementKind>,
    },
    #[error("link weight {0} is negative")]
    NegativeWeight(f64),
    #[error("link weight {0} is not a finite number")]
    InvalidWeight(f64),
    #[error("attribute `{key}` of `{entity}` must be {expected}")]
    InvalidAttribute { entity: Id, key: String, expected: String },
    #[error("no element with id `{0}`")]
    UnknownId(Id),
}

/// Non-fatal observations made while adding elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Error)]
pub enum ModelWarning {
    #[error("`{entity}` has attribute `{key}`, which is not in the vocabulary for its kind")]
    UnknownAttribute { entity: Id, key: String },
}

fn invalid_cell_message(view: View, interrogative: Option<Interrogative>) -> String {
    match interrogative {
        Some(i) => format!("({view}, {i}) is not a framework cell; the consumer row is a single merged cell"),
        None => format!("{view} view needs an interrogative"),
    }
}

fn kind_list(kinds: &[ElementKind]) -> String {
    kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join(" or ")
}
