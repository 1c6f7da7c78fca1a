use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::entity::EntityKind;
use super::id::Id;
use super::ModelError;

/// What a link endpoint may resolve to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Entity(EntityKind),
    Concern,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKind::Entity(k) => write!(f, "{k}"),
            ElementKind::Concern => f.write_str("concern"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Automates,
    Exposes,
    OwnsData,
    ResidesAt,
    DeployedOn,
    MotivatedBy,
    ScheduledOn,
    ImplementsRule,
    Serves,
    Documents,
}

use ElementKind::{Concern as C, Entity as E};
use EntityKind::*;

impl LinkKind {
    pub const ALL: [LinkKind; 10] = [
        LinkKind::Automates,
        LinkKind::Exposes,
        LinkKind::OwnsData,
        LinkKind::ResidesAt,
        LinkKind::DeployedOn,
        LinkKind::MotivatedBy,
        LinkKind::ScheduledOn,
        LinkKind::ImplementsRule,
        LinkKind::Serves,
        LinkKind::Documents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Automates => "automates",
            LinkKind::Exposes => "exposes",
            LinkKind::OwnsData => "owns_data",
            LinkKind::ResidesAt => "resides_at",
            LinkKind::DeployedOn => "deployed_on",
            LinkKind::MotivatedBy => "motivated_by",
            LinkKind::ScheduledOn => "scheduled_on",
            LinkKind::ImplementsRule => "implements_rule",
            LinkKind::Serves => "serves",
            LinkKind::Documents => "documents",
        }
    }

    /// Allowed source kinds and target kinds.
    pub fn signature(self) -> (&'static [ElementKind], &'static [ElementKind]) {
        match self {
            LinkKind::Automates => (&[E(Microservice)], &[E(BusinessFunction)]),
            LinkKind::Exposes => (&[E(Api)], &[E(Microservice)]),
            LinkKind::OwnsData => (&[E(Microservice)], &[E(DataElement)]),
            LinkKind::ResidesAt => (&[E(Microservice), E(DeploymentTarget)], &[E(Location)]),
            LinkKind::DeployedOn => (&[E(Microservice)], &[E(DeploymentTarget)]),
            LinkKind::MotivatedBy => (&[E(Microservice), E(Api)], &[C]),
            LinkKind::ScheduledOn => (&[E(Microservice), E(Api)], &[E(BusinessCycle)]),
            LinkKind::ImplementsRule => (&[E(Microservice), E(Api)], &[E(BusinessRule)]),
            LinkKind::Serves => (&[E(Api)], &[E(Organization)]),
            LinkKind::Documents => (&[E(Sdk), E(CodeSample)], &[E(Microservice), E(Api)]),
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ModelError::UnknownLinkKind(s.to_string()))
    }
}

/// A typed, weighted relation between two repository elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    id: Id,
    kind: LinkKind,
    source: Id,
    target: Id,
    weight: f64,
}

impl Link {
    pub fn new(kind: LinkKind, source: Id, target: Id) -> Self {
        Link {
            id: Self::derive_id(kind, &source, &target),
            kind,
            source,
            target,
            weight: 1.0,
        }
    }

    /// `kind--source--target`.
    pub fn derive_id(kind: LinkKind, source: &Id, target: &Id) -> Id {
        Id::from_raw(format!("{}--{}--{}", kind.name(), source, target))
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn id(&self) -> &Id {
        &self.id
    }

    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    pub fn source(&self) -> &Id {
        &self.source
    }

    pub fn target(&self) -> &Id {
        &self.target
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub(crate) fn set_weight(&mut self, weight: f64) {
        self.weight = weight;
    }
}
