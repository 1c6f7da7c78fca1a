use std::collections::{BTreeMap, BTreeSet};

use crate::model::{EntityKind, Id, LinkKind, Repository, View};

use super::AnalysisError;

/// Per-view multipliers applied to concern contributions. Defaults to 1.0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewWeights([f64; 5]);

impl Default for ViewWeights {
    fn default() -> Self {
        ViewWeights([1.0; 5])
    }
}

impl ViewWeights {
    pub fn get(&self, view: View) -> f64 {
        self.0[usize::from(view.rank() - 1)]
    }

    pub fn set(&mut self, view: View, weight: f64) -> Result<(), AnalysisError> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(AnalysisError::InvalidWeight { view, weight });
        }
        self.0[usize::from(view.rank() - 1)] = weight;
        Ok(())
    }

    /// Starts from the defaults and applies `(view name, weight)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self, AnalysisError> {
        let mut weights = ViewWeights::default();
        for (name, weight) in pairs {
            let view: View = name.parse().map_err(|_| AnalysisError::UnknownView(name.to_string()))?;
            weights.set(view, weight)?;
        }
        Ok(weights)
    }

    /// Parses `owner=2,scope=0.5`.
    pub fn parse(spec: &str) -> Result<Self, AnalysisError> {
        let mut pairs = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| AnalysisError::Syntax(format!("expected view=weight, got `{part}`")))?;
            let weight: f64 = value
                .trim()
                .parse()
                .map_err(|_| AnalysisError::Syntax(format!("`{}` is not a number", value.trim())))?;
            pairs.push((name.trim(), weight));
        }
        Self::from_pairs(pairs)
    }
}

/// Stakeholder value of every microservice and api.
///
/// A service earns the view weight of each concern that references it
/// directly, plus `weight(view) * link weight` for each `motivated_by` link
/// to a concern. A microservice also earns, for each `exposes` link from an
/// api, the link weight times the api's direct concern credit.
pub fn value_scores(repo: &Repository, weights: &ViewWeights) -> BTreeMap<Id, f64> {
    let mut direct: BTreeMap<&Id, f64> = BTreeMap::new();
    for c in repo.concerns() {
        let w = weights.get(c.cell().view());
        for r in c.entity_refs() {
            *direct.entry(r).or_default() += w;
        }
    }
    let mut scores = BTreeMap::new();
    for s in repo.services() {
        let mut score = direct.get(s.id()).copied().unwrap_or(0.0);
        for l in repo.links_from(s.id().as_str()) {
            if l.kind() == LinkKind::MotivatedBy {
                if let Some(c) = repo.concern(l.target().as_str()) {
                    score += weights.get(c.cell().view()) * l.weight();
                }
            }
        }
        if s.kind() == EntityKind::Microservice {
            for l in repo.links_to(s.id().as_str()) {
                let from_api = repo
                    .entity(l.source().as_str())
                    .is_some_and(|e| e.kind() == EntityKind::Api);
                if l.kind() == LinkKind::Exposes && from_api {
                    score += l.weight() * direct.get(l.source()).copied().unwrap_or(0.0);
                }
            }
        }
        scores.insert(s.id().clone(), score);
    }
    scores
}

/// Services scoring strictly below `threshold`, ascending by score then id.
pub fn retirement_candidates(
    repo: &Repository,
    weights: &ViewWeights,
    threshold: f64,
) -> Result<Vec<(Id, f64)>, AnalysisError> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(AnalysisError::InvalidThreshold(threshold));
    }
    let mut weak: Vec<(Id, f64)> = value_scores(repo, weights)
        .into_iter()
        .filter(|(_, s)| *s < threshold)
        .collect();
    weak.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(weak)
}

/// Services tied to two or more distinct business functions or
/// organizations, with that count, most connected first.
///
/// A microservice counts the functions it automates. An api counts the
/// organizations it serves plus the functions automated by the
/// microservices it exposes.
pub fn reuse_candidates(repo: &Repository) -> Vec<(Id, usize)> {
    let is_kind = |id: &Id, kind: EntityKind| repo.entity(id.as_str()).is_some_and(|e| e.kind() == kind);
    let automated = |ms: &Id| -> BTreeSet<Id> {
        repo.links_from(ms.as_str())
            .filter(|l| l.kind() == LinkKind::Automates && is_kind(l.target(), EntityKind::BusinessFunction))
            .map(|l| l.target().clone())
            .collect()
    };
    let mut found = Vec::new();
    for s in repo.services() {
        let reached: BTreeSet<Id> = match s.kind() {
            EntityKind::Microservice => automated(s.id()),
            _ => repo
                .links_from(s.id().as_str())
                .flat_map(|l| match l.kind() {
                    LinkKind::Serves if is_kind(l.target(), EntityKind::Organization) => {
                        BTreeSet::from([l.target().clone()])
                    }
                    LinkKind::Exposes if is_kind(l.target(), EntityKind::Microservice) => automated(l.target()),
                    _ => BTreeSet::new(),
                })
                .collect(),
        };
        if reached.len() >= 2 {
            found.push((s.id().clone(), reached.len()));
        }
    }
    found.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Concern, Entity, Interrogative, Link, Meta, ViewCell};

    fn owner_how() -> ViewCell {
        ViewCell::at(View::Owner, Interrogative::How)
    }

    fn sample() -> (Repository, Id, Id) {
        let mut repo = Repository::new(Meta::default());
        let m = repo
            .add_entity(Entity::new(EntityKind::Microservice, "cart"))
            .unwrap()
            .id;
        let idle = repo
            .add_entity(Entity::new(EntityKind::Microservice, "idle"))
            .unwrap()
            .id;
        for n in ["c1", "c2"] {
            repo.add_concern(Concern::new(Id::parse(n).unwrap(), owner_how(), "x").with_ref(m.clone()))
                .unwrap();
        }
        (repo, m, idle)
    }

    #[test]
    fn direct_references() {
        let (repo, m, idle) = sample();
        let s = value_scores(&repo, &ViewWeights::default());
        assert_eq!(s[&m], 2.0);
        assert_eq!(s[&idle], 0.0);
    }

    #[test]
    fn view_weights_scale_linearly() {
        let (repo, m, _) = sample();
        let w = ViewWeights::parse("owner=2").unwrap();
        assert_eq!(value_scores(&repo, &w)[&m], 4.0);
        let w = ViewWeights::parse("scope=5").unwrap();
        assert_eq!(value_scores(&repo, &w)[&m], 2.0);
    }

    #[test]
    fn one_hop_credit() {
        let (mut repo, m, idle) = sample();
        let api = repo.add_entity(Entity::new(EntityKind::Api, "orders")).unwrap().id;
        let why = repo
            .add_concern(
                Concern::new(
                    Id::parse("why").unwrap(),
                    ViewCell::at(View::Scope, Interrogative::Why),
                    "x",
                )
                .with_ref(api.clone()),
            )
            .unwrap();
        repo.add_link(Link::new(LinkKind::MotivatedBy, idle.clone(), why).with_weight(0.5))
            .unwrap();
        repo.add_link(Link::new(LinkKind::Exposes, api.clone(), m.clone()).with_weight(3.0))
            .unwrap();
        let s = value_scores(&repo, &ViewWeights::default());
        assert_eq!(s[&idle], 0.5);
        assert_eq!(s[&api], 1.0);
        assert_eq!(s[&m], 2.0 + 3.0);
    }

    #[test]
    fn weights_reject_bad_input() {
        assert_eq!(
            ViewWeights::parse("boss=1"),
            Err(AnalysisError::UnknownView("boss".into()))
        );
        assert!(matches!(
            ViewWeights::parse("owner=-1"),
            Err(AnalysisError::InvalidWeight { .. })
        ));
        assert!(matches!(ViewWeights::parse("owner"), Err(AnalysisError::Syntax(_))));
        assert_eq!(ViewWeights::parse("").unwrap(), ViewWeights::default());
    }

    #[test]
    fn retirement_is_strict() {
        let (repo, _, idle) = sample();
        let w = ViewWeights::default();
        assert_eq!(retirement_candidates(&repo, &w, 1.0).unwrap(), vec![(idle, 0.0)]);
        assert!(retirement_candidates(&repo, &w, 0.0).unwrap().is_empty());
        assert!(retirement_candidates(&repo, &w, -1.0).is_err());
    }

    #[test]
    fn reuse() {
        let mut repo = Repository::new(Meta::default());
        let api = repo.add_entity(Entity::new(EntityKind::Api, "orders")).unwrap().id;
        let m = repo
            .add_entity(Entity::new(EntityKind::Microservice, "cart"))
            .unwrap()
            .id;
        for org in ["acme", "globex"] {
            let o = repo.add_entity(Entity::new(EntityKind::Organization, org)).unwrap().id;
            repo.add_link(Link::new(LinkKind::Serves, api.clone(), o)).unwrap();
        }
        let f = repo
            .add_entity(Entity::new(EntityKind::BusinessFunction, "billing"))
            .unwrap()
            .id;
        repo.add_link(Link::new(LinkKind::Automates, m.clone(), f)).unwrap();
        assert_eq!(reuse_candidates(&repo), vec![(api.clone(), 2)]);
        repo.add_link(Link::new(LinkKind::Exposes, api.clone(), m)).unwrap();
        assert_eq!(reuse_candidates(&repo), vec![(api, 3)]);
    }

    #[test]
    fn reuse_ties_in_id_order() {
        let mut repo = Repository::new(Meta::default());
        let fs: Vec<Id> = ["f1", "f2"]
            .iter()
            .map(|n| {
                repo.add_entity(Entity::new(EntityKind::BusinessFunction, *n))
                    .unwrap()
                    .id
            })
            .collect();
        for name in ["zeta", "alpha"] {
            let m = repo.add_entity(Entity::new(EntityKind::Microservice, name)).unwrap().id;
            for f in &fs {
                repo.add_link(Link::new(LinkKind::Automates, m.clone(), f.clone()))
                    .unwrap();
            }
        }
        let ids: Vec<_> = reuse_candidates(&repo).into_iter().map(|(id, _)| id).collect();
        assert_eq!(
            ids,
            vec![
                Id::parse("microservice.alpha").unwrap(),
                Id::parse("microservice.zeta").unwrap()
            ]
        );
    }
}
