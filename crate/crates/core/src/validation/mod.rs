//! Structural rules over a loaded repository.
//!
//! [`validate`] runs the rule catalog; [`check_precedence`] separately checks
//! that dependent cells only hold concerns once their prerequisite cells do.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::model::{
    Category, EntityKind, Exposure, Id, Interrogative, LinkKind, PrecedenceGraph, Repository, View, ViewCell,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    MotivationMissing,
    FunctionUnlinked,
    DataOwnership,
    CategoryExposure,
    LifecycleMissing,
    LinkIntegrity,
    PrecedenceViolation,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::MotivationMissing,
        Rule::FunctionUnlinked,
        Rule::DataOwnership,
        Rule::CategoryExposure,
        Rule::LifecycleMissing,
        Rule::LinkIntegrity,
        Rule::PrecedenceViolation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::MotivationMissing => "MOTIVATION_MISSING",
            Rule::FunctionUnlinked => "FUNCTION_UNLINKED",
            Rule::DataOwnership => "DATA_OWNERSHIP",
            Rule::CategoryExposure => "CATEGORY_EXPOSURE",
            Rule::LifecycleMissing => "LIFECYCLE_MISSING",
            Rule::LinkIntegrity => "LINK_INTEGRITY",
            Rule::PrecedenceViolation => "PRECEDENCE_VIOLATION",
        }
    }

    pub fn severity(self) -> FindingSeverity {
        match self {
            Rule::MotivationMissing | Rule::DataOwnership | Rule::CategoryExposure | Rule::LinkIntegrity => {
                FindingSeverity::Error
            }
            Rule::FunctionUnlinked | Rule::PrecedenceViolation => FindingSeverity::Warning,
            Rule::LifecycleMissing => FindingSeverity::Info,
        }
    }
}

// Ordered by catalog id so sorted findings group alphabetically.
impl Ord for Rule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id().cmp(other.id())
    }
}

impl PartialOrd for Rule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FindingSeverity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for FindingSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FindingSeverity::Error => "error",
            FindingSeverity::Warning => "warning",
            FindingSeverity::Info => "info",
        })
    }
}

/// What a finding is about: a repository element or a matrix cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Element(Id),
    Cell(ViewCell),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Element(id) => write!(f, "{id}"),
            Subject::Cell(cell) => write!(f, "{cell}"),
        }
    }
}

impl Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Finding {
    pub rule_id: Rule,
    pub subject: Subject,
    pub severity: FindingSeverity,
    pub message: String,
}

impl Finding {
    pub fn new(rule: Rule, subject: Subject, message: impl Into<String>) -> Self {
        Finding {
            rule_id: rule,
            severity: rule.severity(),
            subject,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == FindingSeverity::Error
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            self.rule_id, self.severity, self.subject, self.message
        )
    }
}

/// Sorts by rule id, then subject, then message.
pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort();
}

/// Runs every rule of the catalog. An empty result means the repository is
/// fully compliant.
pub fn validate(repo: &Repository) -> Vec<Finding> {
    let mut findings = Vec::new();
    motivation_missing(repo, &mut findings);
    function_unlinked(repo, &mut findings);
    data_ownership(repo, &mut findings);
    category_exposure(repo, &mut findings);
    lifecycle_missing(repo, &mut findings);
    link_integrity(repo, &mut findings);
    findings.sort();
    findings
}

fn element(id: &Id) -> Subject {
    Subject::Element(id.clone())
}

/// Outgoing links of `kind` whose target is present with the right kind.
fn has_link(repo: &Repository, source: &Id, kind: LinkKind, target_ok: impl Fn(&Id) -> bool) -> bool {
    repo.links_from(source.as_str())
        .any(|l| l.kind() == kind && target_ok(l.target()))
}

fn motivation_missing(repo: &Repository, out: &mut Vec<Finding>) {
    for s in repo.services() {
        let motivated = has_link(repo, s.id(), LinkKind::MotivatedBy, |t| {
            repo.concern(t.as_str())
                .is_some_and(|c| c.cell().interrogative() == Some(Interrogative::Why))
        });
        if !motivated {
            out.push(Finding::new(
                Rule::MotivationMissing,
                element(s.id()),
                format!("{} `{}` has no motivated_by link to a why concern", s.kind(), s.name()),
            ));
        }
    }
}

fn function_unlinked(repo: &Repository, out: &mut Vec<Finding>) {
    for m in repo.entities_of(EntityKind::Microservice) {
        let linked = has_link(repo, m.id(), LinkKind::Automates, |t| {
            repo.entity(t.as_str())
                .is_some_and(|e| e.kind() == EntityKind::BusinessFunction)
        });
        if !linked {
            out.push(Finding::new(
                Rule::FunctionUnlinked,
                element(m.id()),
                format!("microservice `{}` automates no business function", m.name()),
            ));
        }
    }
}

fn data_ownership(repo: &Repository, out: &mut Vec<Finding>) {
    let mut owners: BTreeMap<&Id, BTreeSet<&Id>> = BTreeMap::new();
    for l in repo.links_of(LinkKind::OwnsData) {
        let is_ms = repo
            .entity(l.source().as_str())
            .is_some_and(|e| e.kind() == EntityKind::Microservice);
        if is_ms {
            owners.entry(l.target()).or_default().insert(l.source());
        }
    }
    for (data, by) in owners {
        let Some(d) = repo.entity(data.as_str()) else { continue };
        if d.kind() != EntityKind::DataElement || !d.is_persisted() || by.len() < 2 {
            continue;
        }
        let names: Vec<String> = by.iter().map(|id| format!("`{id}`")).collect();
        out.push(Finding::new(
            Rule::DataOwnership,
            element(data),
            format!("persisted data element `{}` is owned by {}", d.name(), names.join(", ")),
        ));
    }
}

fn category_exposure(repo: &Repository, out: &mut Vec<Finding>) {
    for m in repo.entities_of(EntityKind::Microservice) {
        if m.category() != Some(Category::Integrity) {
            continue;
        }
        let apis: BTreeSet<&Id> = repo
            .links_to(m.id().as_str())
            .filter(|l| l.kind() == LinkKind::Exposes)
            .filter(|l| {
                repo.entity(l.source().as_str())
                    .is_some_and(|a| a.kind() == EntityKind::Api && a.exposure() == Some(Exposure::External))
            })
            .map(|l| l.source())
            .collect();
        if !apis.is_empty() {
            let names: Vec<String> = apis.iter().map(|id| format!("`{id}`")).collect();
            out.push(Finding::new(
                Rule::CategoryExposure,
                element(m.id()),
                format!(
                    "integrity microservice `{}` is exposed by external {}",
                    m.name(),
                    names.join(", ")
                ),
            ));
        }
    }
}

fn lifecycle_missing(repo: &Repository, out: &mut Vec<Finding>) {
    for s in repo.services() {
        let scheduled = has_link(repo, s.id(), LinkKind::ScheduledOn, |t| {
            repo.entity(t.as_str())
                .is_some_and(|e| e.kind() == EntityKind::BusinessCycle)
        });
        if !scheduled {
            out.push(Finding::new(
                Rule::LifecycleMissing,
                element(s.id()),
                format!("{} `{}` is not scheduled on any business cycle", s.kind(), s.name()),
            ));
        }
    }
}

fn link_integrity(repo: &Repository, out: &mut Vec<Finding>) {
    for v in repo.integrity_violations() {
        out.push(Finding::new(
            Rule::LinkIntegrity,
            Subject::Element(v.subject),
            v.message,
        ));
    }
}

/// Flags every occupied cell whose prerequisite cells, within the same view,
/// do not satisfy any disjunct of its interrogative's prerequisites.
pub fn check_precedence(repo: &Repository) -> Vec<Finding> {
    let graph = PrecedenceGraph::standard();
    let mut findings = Vec::new();
    for view in View::ALL.into_iter().filter(|v| !v.is_merged()) {
        let occupied = |i: Interrogative| repo.concern_count_at(ViewCell::at(view, i)) > 0;
        for i in Interrogative::ALL {
            if !occupied(i) || graph.is_satisfied(i, occupied) {
                continue;
            }
            let options: Vec<String> = graph
                .prerequisites(i)
                .iter()
                .map(|d| {
                    let names: Vec<_> = d.iter().map(|p| p.name()).collect();
                    format!("{{{}}}", names.join(", "))
                })
                .collect();
            findings.push(Finding::new(
                Rule::PrecedenceViolation,
                Subject::Cell(ViewCell::at(view, i)),
                format!(
                    "{view}/{i} holds concerns but no prerequisite set ({}) is fully populated in the {view} view",
                    options.join(" or ")
                ),
            ));
        }
    }
    findings.sort();
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Concern, Entity, Link, Meta};

    fn id(s: &str) -> Id {
        Id::parse(s).unwrap()
    }

    fn concern(repo: &mut Repository, name: &str, cell: ViewCell) -> Id {
        repo.add_concern(Concern::new(id(name), cell, "s")).unwrap()
    }

    #[test]
    fn unmotivated_api() {
        let mut repo = Repository::new(Meta::default());
        repo.add_entity(Entity::new(EntityKind::Api, "orders")).unwrap();
        let f = validate(&repo);
        let mm: Vec<_> = f.iter().filter(|f| f.rule_id == Rule::MotivationMissing).collect();
        assert_eq!(mm.len(), 1);
        assert_eq!(mm[0].subject, Subject::Element(id("api.orders")));
        assert!(mm[0].is_error());
    }

    #[test]
    fn motivation_must_be_a_why_concern() {
        let mut repo = Repository::new(Meta::default());
        let api = repo.add_entity(Entity::new(EntityKind::Api, "orders")).unwrap().id;
        let what = concern(&mut repo, "c-what", ViewCell::at(View::Scope, Interrogative::What));
        repo.add_link(Link::new(LinkKind::MotivatedBy, api.clone(), what))
            .unwrap();
        assert!(validate(&repo).iter().any(|f| f.rule_id == Rule::MotivationMissing));
        let why = concern(&mut repo, "c-why", ViewCell::at(View::Owner, Interrogative::Why));
        repo.add_link(Link::new(LinkKind::MotivatedBy, api, why)).unwrap();
        assert!(!validate(&repo).iter().any(|f| f.rule_id == Rule::MotivationMissing));
    }

    #[test]
    fn shared_ledger() {
        let mut repo = Repository::new(Meta::default());
        let ledger = repo
            .add_entity(Entity::new(EntityKind::DataElement, "ledger").with_attribute("persisted", true))
            .unwrap()
            .id;
        for name in ["billing", "payments"] {
            let m = repo.add_entity(Entity::new(EntityKind::Microservice, name)).unwrap().id;
            repo.add_link(Link::new(LinkKind::OwnsData, m, ledger.clone())).unwrap();
        }
        let f: Vec<_> = validate(&repo)
            .into_iter()
            .filter(|f| f.rule_id == Rule::DataOwnership)
            .collect();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].subject, Subject::Element(ledger));
        assert!(f[0].message.contains("microservice.billing"));
        assert!(f[0].message.contains("microservice.payments"));
    }

    #[test]
    fn transient_data_may_be_shared() {
        let mut repo = Repository::new(Meta::default());
        let cache = repo
            .add_entity(Entity::new(EntityKind::DataElement, "cache"))
            .unwrap()
            .id;
        for name in ["a", "b"] {
            let m = repo.add_entity(Entity::new(EntityKind::Microservice, name)).unwrap().id;
            repo.add_link(Link::new(LinkKind::OwnsData, m, cache.clone())).unwrap();
        }
        assert!(!validate(&repo).iter().any(|f| f.rule_id == Rule::DataOwnership));
    }

    #[test]
    fn external_api_on_integrity_service() {
        let mut repo = Repository::new(Meta::default());
        let m = repo
            .add_entity(Entity::new(EntityKind::Microservice, "audit").with_attribute("category", "integrity"))
            .unwrap()
            .id;
        let ext = repo
            .add_entity(Entity::new(EntityKind::Api, "public").with_attribute("exposure", "external"))
            .unwrap()
            .id;
        let int = repo
            .add_entity(Entity::new(EntityKind::Api, "ops").with_attribute("exposure", "internal"))
            .unwrap()
            .id;
        repo.add_link(Link::new(LinkKind::Exposes, int, m.clone())).unwrap();
        let before = validate(&repo);
        assert!(!before.iter().any(|f| f.rule_id == Rule::CategoryExposure));
        repo.add_link(Link::new(LinkKind::Exposes, ext, m.clone())).unwrap();
        let after: Vec<_> = validate(&repo)
            .into_iter()
            .filter(|f| f.rule_id == Rule::CategoryExposure)
            .collect();
        assert_eq!(after.len(), 1);
        assert_eq!(after[0].subject, Subject::Element(m));
    }

    #[test]
    fn dangling_links_reported() {
        let mut repo = Repository::new(Meta::default());
        let m = repo
            .add_entity(Entity::new(EntityKind::Microservice, "cart"))
            .unwrap()
            .id;
        repo.insert_link_unchecked(Link::new(LinkKind::Automates, m, id("business_function.gone")));
        let f: Vec<_> = validate(&repo)
            .into_iter()
            .filter(|f| f.rule_id == Rule::LinkIntegrity)
            .collect();
        assert_eq!(f.len(), 1);
        // the dangling automates link does not count as automation
        assert!(validate(&repo).iter().any(|f| f.rule_id == Rule::FunctionUnlinked));
    }

    #[test]
    fn findings_are_sorted() {
        let mut repo = Repository::new(Meta::default());
        for name in ["z", "a", "m"] {
            repo.add_entity(Entity::new(EntityKind::Microservice, name)).unwrap();
        }
        let f = validate(&repo);
        let mut sorted = f.clone();
        sorted.sort_by(|a, b| (a.rule_id.id(), &a.subject).cmp(&(b.rule_id.id(), &b.subject)));
        assert_eq!(f, sorted);
        assert_eq!(f[0].rule_id, Rule::FunctionUnlinked);
    }

    #[test]
    fn lone_how_is_flagged() {
        let mut repo = Repository::new(Meta::default());
        concern(&mut repo, "h", ViewCell::at(View::Scope, Interrogative::How));
        let f = check_precedence(&repo);
        assert_eq!(f.len(), 1);
        assert_eq!(
            f[0].subject,
            Subject::Cell(ViewCell::at(View::Scope, Interrogative::How))
        );
        assert_eq!(f[0].severity, FindingSeverity::Warning);
    }

    #[test]
    fn what_and_where_satisfy_how() {
        let mut repo = Repository::new(Meta::default());
        concern(&mut repo, "h", ViewCell::at(View::Scope, Interrogative::How));
        concern(&mut repo, "w1", ViewCell::at(View::Scope, Interrogative::What));
        assert_eq!(check_precedence(&repo).len(), 1);
        concern(&mut repo, "w2", ViewCell::at(View::Scope, Interrogative::Where));
        assert!(check_precedence(&repo).is_empty());
    }

    #[test]
    fn precedence_is_per_view() {
        let mut repo = Repository::new(Meta::default());
        concern(&mut repo, "h", ViewCell::at(View::Owner, Interrogative::How));
        concern(&mut repo, "a", ViewCell::at(View::Scope, Interrogative::What));
        concern(&mut repo, "b", ViewCell::at(View::Scope, Interrogative::Which));
        assert_eq!(check_precedence(&repo).len(), 1);
    }

    #[test]
    fn early_columns_never_flagged() {
        let mut repo = Repository::new(Meta::default());
        for (n, i) in [
            Interrogative::Who,
            Interrogative::What,
            Interrogative::Which,
            Interrogative::Where,
        ]
        .into_iter()
        .enumerate()
        {
            concern(&mut repo, &format!("c{n}"), ViewCell::at(View::Designer, i));
        }
        concern(&mut repo, "k", ViewCell::consumer());
        assert!(check_precedence(&repo).is_empty());
    }
}
