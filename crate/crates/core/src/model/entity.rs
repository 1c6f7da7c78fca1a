use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::id::{slugify, Id};
use super::value::Value;
use super::view::View;
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Microservice,
    Api,
    BusinessFunction,
    BusinessProcess,
    Organization,
    DataElement,
    Location,
    DeploymentTarget,
    BusinessCycle,
    BusinessRule,
    StakeholderGroup,
    Sdk,
    CodeSample,
}

/// Keys every kind accepts.
const COMMON_ATTRIBUTES: &[&str] = &["description", "owner", "tags"];

impl EntityKind {
    pub const ALL: [EntityKind; 13] = [
        EntityKind::Microservice,
        EntityKind::Api,
        EntityKind::BusinessFunction,
        EntityKind::BusinessProcess,
        EntityKind::Organization,
        EntityKind::DataElement,
        EntityKind::Location,
        EntityKind::DeploymentTarget,
        EntityKind::BusinessCycle,
        EntityKind::BusinessRule,
        EntityKind::StakeholderGroup,
        EntityKind::Sdk,
        EntityKind::CodeSample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Microservice => "microservice",
            EntityKind::Api => "api",
            EntityKind::BusinessFunction => "business_function",
            EntityKind::BusinessProcess => "business_process",
            EntityKind::Organization => "organization",
            EntityKind::DataElement => "data_element",
            EntityKind::Location => "location",
            EntityKind::DeploymentTarget => "deployment_target",
            EntityKind::BusinessCycle => "business_cycle",
            EntityKind::BusinessRule => "business_rule",
            EntityKind::StakeholderGroup => "stakeholder_group",
            EntityKind::Sdk => "sdk",
            EntityKind::CodeSample => "code_sample",
        }
    }

    /// Kind-specific attribute keys, excluding the common ones.
    pub fn attribute_vocabulary(self) -> &'static [&'static str] {
        match self {
            EntityKind::Microservice => &["category", "tech_stack", "interchange_format", "containers"],
            EntityKind::Api => &[
                "methods",
                "exposure",
                "gateway_rules",
                "endpoint_mappings",
                "design_tech",
                "documentation",
            ],
            EntityKind::BusinessFunction | EntityKind::BusinessProcess => &["priority"],
            EntityKind::Organization => &["relationship", "audience", "priority"],
            EntityKind::DataElement => &["pattern", "persisted", "format"],
            EntityKind::Location => &["region", "datacenter"],
            EntityKind::DeploymentTarget => &[
                "namespace",
                "workload",
                "replicas",
                "images",
                "labels",
                "endpoints",
                "cni",
                "ips",
                "service_mesh",
            ],
            EntityKind::BusinessCycle => &["cadence", "provide", "delete", "update"],
            EntityKind::BusinessRule => &["rule", "engine"],
            EntityKind::StakeholderGroup => &["views"],
            EntityKind::Sdk => &["language", "url", "version"],
            EntityKind::CodeSample => &["language", "url", "snippet"],
        }
    }

    pub fn accepts_attribute(self, key: &str) -> bool {
        COMMON_ATTRIBUTES.contains(&key) || self.attribute_vocabulary().contains(&key)
    }

    pub fn is_service(self) -> bool {
        matches!(self, EntityKind::Microservice | EntityKind::Api)
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ModelError::UnknownEntityKind(s.to_string()))
    }
}

/// Microservice category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Presentation,
    System,
    Integrity,
}

impl Category {
    pub const NAMES: [&'static str; 3] = ["presentation", "system", "integrity"];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exposure {
    Internal,
    External,
}

/// Key names allowed inside an api `methods` record.
pub const METHOD_RECORD_KEYS: &[&str] = &["verb", "design_tech", "status_code", "status_codes", "path"];

/// A typed architecture element.
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    id: Id,
    kind: EntityKind,
    name: String,
    attributes: BTreeMap<String, Value>,
}

impl Entity {
    pub fn new(kind: EntityKind, name: impl Into<String>) -> Self {
        let name = name.into();
        Entity {
            id: Self::derive_id(kind, &name),
            kind,
            name,
            attributes: BTreeMap::new(),
        }
    }

    /// `kind.slug-of-name`; the slug part is empty when the name has no
    /// alphanumerics, which `add_entity` rejects.
    pub fn derive_id(kind: EntityKind, name: &str) -> Id {
        Id::from_raw(format!("{}.{}", kind.name(), slugify(name)))
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }

    pub fn with_attributes(mut self, attributes: BTreeMap<String, Value>) -> Self {
        self.attributes = attributes;
        self
    }

    pub fn id(&self) -> &Id {
        &self.id
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &BTreeMap<String, Value> {
        &self.attributes
    }

    pub fn attribute(&self, key: &str) -> Option<&Value> {
        self.attributes.get(key)
    }

    pub(crate) fn set_attributes(&mut self, attributes: BTreeMap<String, Value>) {
        self.attributes = attributes;
    }

    pub fn category(&self) -> Option<Category> {
        match self.attribute("category")?.as_str()? {
            "presentation" => Some(Category::Presentation),
            "system" => Some(Category::System),
            "integrity" => Some(Category::Integrity),
            _ => None,
        }
    }

    pub fn exposure(&self) -> Option<Exposure> {
        match self.attribute("exposure")?.as_str()? {
            "internal" => Some(Exposure::Internal),
            "external" => Some(Exposure::External),
            _ => None,
        }
    }

    pub fn is_persisted(&self) -> bool {
        self.attribute("persisted").and_then(Value::as_bool) == Some(true)
    }

    /// Views named by a stakeholder group's `views` attribute.
    pub fn views(&self) -> Vec<View> {
        self.attribute("views")
            .and_then(Value::as_list)
            .unwrap_or_default()
            .iter()
            .filter_map(|v| v.as_str()?.parse().ok())
            .collect()
    }

    /// Unknown keys, in key order. These are warnings, not errors.
    pub fn unknown_attributes(&self) -> Vec<&str> {
        self.attributes
            .keys()
            .map(String::as_str)
            .filter(|k| !self.kind.accepts_attribute(k))
            .collect()
    }

    /// Type checks for the attributes the rule engine relies on.
    pub fn check_attributes(&self) -> Result<(), ModelError> {
        for (key, value) in &self.attributes {
            if let Err(expected) = check_attribute(self.kind, key, value) {
                return Err(ModelError::InvalidAttribute {
                    entity: self.id.clone(),
                    key: key.clone(),
                    expected,
                });
            }
        }
        Ok(())
    }
}

fn one_of(value: &Value, allowed: &[&str]) -> bool {
    value.as_str().is_some_and(|s| allowed.contains(&s))
}

fn string_list(value: &Value) -> bool {
    value
        .as_list()
        .is_some_and(|items| items.iter().all(|v| v.as_str().is_some()))
}

fn check_attribute(kind: EntityKind, key: &str, value: &Value) -> Result<(), String> {
    use EntityKind::*;
    let ok = match (kind, key) {
        (_, "description" | "owner") => value.as_str().is_some(),
        (_, "tags") => string_list(value),
        (Microservice, "category") => one_of(value, &Category::NAMES),
        (Microservice, "tech_stack") => string_list(value),
        (Api, "exposure") => one_of(value, &["internal", "external"]),
        (Api, "gateway_rules" | "endpoint_mappings") => string_list(value),
        (Api, "methods") => {
            return value
                .as_list()
                .ok_or("a list of method records")?
                .iter()
                .try_for_each(check_method_record)
        }
        (DataElement, "pattern") => one_of(value, &["event_sourcing", "side_car"]),
        (DataElement, "persisted") => value.as_bool().is_some(),
        (DeploymentTarget, "replicas") => value.as_i64().is_some_and(|n| n >= 0),
        (DeploymentTarget, "images") => string_list(value),
        (StakeholderGroup, "views") => value.as_list().is_some_and(|items| {
            items
                .iter()
                .all(|v| v.as_str().is_some_and(|s| s.parse::<View>().is_ok()))
        }),
        _ => return Ok(()),
    };
    if ok {
        Ok(())
    } else {
        Err(expected_for(kind, key).to_string())
    }
}

fn check_method_record(record: &Value) -> Result<(), String> {
    let fields = record.as_map().ok_or("method records to be maps")?;
    if fields.get("verb").and_then(Value::as_str).is_none() {
        return Err("every method record to have a string `verb`".into());
    }
    if let Some(extra) = fields.keys().find(|k| !METHOD_RECORD_KEYS.contains(&k.as_str())) {
        return Err(format!(
            "method record keys from {METHOD_RECORD_KEYS:?}, found `{extra}`"
        ));
    }
    Ok(())
}

fn expected_for(kind: EntityKind, key: &str) -> &'static str {
    match (kind, key) {
        (_, "description" | "owner") => "a string",
        (EntityKind::Microservice, "category") => "one of presentation, system, integrity",
        (EntityKind::Api, "exposure") => "one of internal, external",
        (EntityKind::DataElement, "pattern") => "one of event_sourcing, side_car",
        (EntityKind::DataElement, "persisted") => "a boolean",
        (EntityKind::DeploymentTarget, "replicas") => "a non-negative integer",
        (EntityKind::StakeholderGroup, "views") => "a list of view names",
        _ => "a list of strings",
    }
}
