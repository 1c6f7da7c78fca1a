use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::Index;

use w6h_core::analysis::{
    cluster_graph, coverage_matrix, elicitation_plan, retirement_candidates, value_graph, value_scores, ViewWeights,
};
use w6h_core::format::has_errors;
use w6h_core::ingest::{merge_proposal, IngestProposal, MergeStrategy};
use w6h_core::model::{cells, prerequisites, ElementKind, Meta, Value};
use w6h_core::report::{export_findings_json, export_graph_dot, render_matrix};
use w6h_core::validation::{check_precedence, validate, Rule, Subject};
use w6h_core::{
    parse_repository, serialize_elements, serialize_repository, Concern, Entity, EntityKind, Id, Interrogative, Link,
    LinkKind, Repository, SourceDocument, View, ViewCell,
};

const KINDS: [EntityKind; 7] = [
    EntityKind::Microservice,
    EntityKind::Api,
    EntityKind::BusinessFunction,
    EntityKind::DataElement,
    EntityKind::Organization,
    EntityKind::StakeholderGroup,
    EntityKind::DeploymentTarget,
];

const NAMES: [&str; 8] = [
    "cart",
    "orders",
    "Billing Core",
    "ledger",
    "auth",
    "ops",
    "search",
    "pay",
];

#[derive(Debug, Clone)]
struct EntityPlan {
    kind: Index,
    name: Index,
    flag: bool,
    text: Option<String>,
}

#[derive(Debug, Clone)]
struct ConcernPlan {
    cell: Index,
    refs: Vec<Index>,
    statement: String,
}

#[derive(Debug, Clone)]
struct LinkPlan {
    kind: Index,
    source: Index,
    target: Index,
    weight: f64,
}

#[derive(Debug, Clone)]
struct Plan {
    entities: Vec<EntityPlan>,
    concerns: Vec<ConcernPlan>,
    links: Vec<LinkPlan>,
}

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "\\PC{0,12}",
        "[a-z ]{1,10}",
        Just(String::new()),
        Just("true".into()),
        Just("1.50".into()),
        Just("null".into()),
        Just("~".into()),
        Just("a: b".into()),
        Just("- item".into()),
        Just(" padded ".into()),
        Just("#hash".into()),
        Just("line\nbreak".into()),
        Just("quote \" and 'tick'".into()),
        Just("0x1F".into()),
    ]
}

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.0), Just(0.5), 0.0..10.0f64]
}

fn plan(max_entities: usize, max_concerns: usize, max_refs: usize, max_links: usize) -> impl Strategy<Value = Plan> {
    let entity = (
        any::<Index>(),
        any::<Index>(),
        any::<bool>(),
        proptest::option::of(text()),
    )
        .prop_map(|(kind, name, flag, text)| EntityPlan { kind, name, flag, text });
    let concern = (
        any::<Index>(),
        proptest::collection::vec(any::<Index>(), 0..=max_refs),
        text(),
    )
        .prop_map(|(cell, refs, statement)| ConcernPlan { cell, refs, statement });
    let link = (any::<Index>(), any::<Index>(), any::<Index>(), weight()).prop_map(|(kind, source, target, weight)| {
        LinkPlan {
            kind,
            source,
            target,
            weight,
        }
    });
    (
        proptest::collection::vec(entity, 0..=max_entities),
        proptest::collection::vec(concern, 0..=max_concerns),
        proptest::collection::vec(link, 0..=max_links),
    )
        .prop_map(|(entities, concerns, links)| Plan {
            entities,
            concerns,
            links,
        })
}

fn make_entity(p: &EntityPlan) -> Entity {
    let kind = *p.kind.get(&KINDS);
    let mut e = Entity::new(kind, *p.name.get(&NAMES));
    e = match kind {
        EntityKind::Microservice => e.with_attribute("category", if p.flag { "integrity" } else { "presentation" }),
        EntityKind::Api => e.with_attribute("exposure", if p.flag { "external" } else { "internal" }),
        EntityKind::DataElement => e.with_attribute("persisted", p.flag),
        EntityKind::StakeholderGroup if p.flag => e.with_attribute("views", Value::list_of_strs(["owner", "scope"])),
        EntityKind::DeploymentTarget => e.with_attribute("replicas", Value::Int(i64::from(p.flag) + 1)),
        _ => e,
    };
    match &p.text {
        Some(t) => e.with_attribute("description", t.as_str()),
        None => e,
    }
}

fn accepts(allowed: &[ElementKind], repo: &Repository, id: &Id) -> bool {
    match repo.entity(id.as_str()) {
        Some(e) => allowed.contains(&ElementKind::Entity(e.kind())),
        None => repo.concern(id.as_str()).is_some() && allowed.contains(&ElementKind::Concern),
    }
}

fn build(p: &Plan) -> Repository {
    let mut repo = Repository::new(Meta {
        name: "generated".into(),
        version: "1".into(),
    });
    for e in &p.entities {
        let _ = repo.add_entity(make_entity(e));
    }
    let ids: Vec<Id> = repo.entities().map(|e| e.id().clone()).collect();
    let all_cells = cells();
    for (n, c) in p.concerns.iter().enumerate() {
        let refs: Vec<Id> = if ids.is_empty() {
            Vec::new()
        } else {
            c.refs.iter().map(|i| i.get(&ids).clone()).collect()
        };
        let concern = Concern::new(
            Id::parse(&format!("concern-{n}")).unwrap(),
            *c.cell.get(&all_cells),
            &c.statement,
        )
        .with_refs(refs);
        repo.add_concern(concern).unwrap();
    }
    let elements: Vec<Id> = repo
        .entities()
        .map(|e| e.id().clone())
        .chain(repo.concerns().map(|c| c.id().clone()))
        .collect();
    for l in &p.links {
        let kind = *l.kind.get(&LinkKind::ALL);
        let (from, to) = kind.signature();
        let sources: Vec<&Id> = elements.iter().filter(|id| accepts(from, &repo, id)).collect();
        let targets: Vec<&Id> = elements.iter().filter(|id| accepts(to, &repo, id)).collect();
        if sources.is_empty() || targets.is_empty() {
            continue;
        }
        let link = Link::new(
            kind,
            (*l.source.get(&sources)).clone(),
            (*l.target.get(&targets)).clone(),
        )
        .with_weight(l.weight);
        // duplicates are expected from random picks
        let _ = repo.add_link(link);
    }
    repo
}

fn reparse(docs: &[SourceDocument]) -> Repository {
    let (repo, diags) = parse_repository(docs);
    assert!(!has_errors(&diags), "{diags:?}");
    repo.unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn round_trip_and_canonical_form(p in plan(10, 6, 4, 10)) {
        let repo = build(&p);
        let first = serialize_repository(&repo);
        let again = reparse(&[SourceDocument::new("r.ea.yaml", first.clone())]);
        prop_assert_eq!(&again, &repo);
        prop_assert_eq!(serialize_repository(&again), first);
    }

    #[test]
    fn adds_keep_integrity_and_ids_are_stable(p in plan(10, 6, 4, 10)) {
        let repo = build(&p);
        prop_assert!(repo.integrity_violations().is_empty());
        prop_assert_eq!(&build(&p), &repo);
        for e in repo.entities() {
            prop_assert_eq!(&Entity::derive_id(e.kind(), e.name()), e.id());
        }
    }

    #[test]
    fn coverage_is_monotone(p in plan(6, 8, 3, 0), cell in any::<Index>(), with_ref in any::<bool>()) {
        let mut repo = build(&p);
        let before = coverage_matrix(&repo);
        let mut c = Concern::new(Id::parse("extra").unwrap(), *cell.get(&cells()), "added");
        if with_ref {
            if let Some(e) = repo.entities().next() {
                c = c.with_ref(e.id().clone());
            }
        }
        repo.add_concern(c).unwrap();
        let after = coverage_matrix(&repo);
        prop_assert!(after.filled() >= before.filled());
        prop_assert!(after.occupied() >= before.occupied());
        prop_assert_eq!(after.total(), 29);
    }

    #[test]
    fn scores_grow_with_references(p in plan(10, 6, 4, 10), cell in any::<Index>(), target in any::<Index>()) {
        let mut repo = build(&p);
        let ids: Vec<Id> = repo.entities().map(|e| e.id().clone()).collect();
        prop_assume!(!ids.is_empty());
        let w = ViewWeights::default();
        let before = value_scores(&repo, &w);
        let c = Concern::new(Id::parse("extra").unwrap(), *cell.get(&cells()), "added")
            .with_ref(target.get(&ids).clone());
        repo.add_concern(c).unwrap();
        let after = value_scores(&repo, &w);
        for (id, s) in &before {
            prop_assert!(after[id] >= *s, "{} dropped from {} to {}", id, s, after[id]);
        }
    }

    #[test]
    fn scores_scale_with_view_weights(
        p in plan(10, 6, 4, 10),
        a in proptest::collection::vec(0.0..5.0f64, 5),
        b in proptest::collection::vec(0.0..5.0f64, 5),
        k in 0.0..4.0f64,
    ) {
        let repo = build(&p);
        let make = |f: &dyn Fn(usize) -> f64| {
            let mut w = ViewWeights::default();
            for (i, v) in View::ALL.into_iter().enumerate() {
                w.set(v, f(i)).unwrap();
            }
            w
        };
        let sa = value_scores(&repo, &make(&|i| a[i]));
        let sb = value_scores(&repo, &make(&|i| b[i]));
        let sum = value_scores(&repo, &make(&|i| a[i] + b[i]));
        let scaled = value_scores(&repo, &make(&|i| k * a[i]));
        for id in sa.keys() {
            prop_assert!(close(sum[id], sa[id] + sb[id]));
            prop_assert!(close(scaled[id], k * sa[id]));
        }
    }

    #[test]
    fn retirement_is_a_filter(p in plan(10, 6, 4, 10), t in 0.0..6.0f64) {
        let repo = build(&p);
        let w = ViewWeights::default();
        let scores = value_scores(&repo, &w);
        let expected: BTreeSet<&Id> = scores.iter().filter(|(_, s)| **s < t).map(|(id, _)| id).collect();
        let got = retirement_candidates(&repo, &w, t).unwrap();
        let ids: BTreeSet<&Id> = got.iter().map(|(id, _)| id).collect();
        prop_assert_eq!(ids, expected);
        prop_assert!(got.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn clusters_partition_and_refine_components(p in plan(10, 6, 4, 12), seed in any::<u64>()) {
        let g = value_graph(&build(&p));
        for (a, b, w) in g.edges() {
            prop_assert!(w >= 0.0);
            prop_assert!(g.kind(a).is_some() && g.kind(b).is_some());
        }
        let clusters = cluster_graph(&g, seed);
        prop_assert_eq!(&cluster_graph(&g, seed), &clusters);
        let mut seen = BTreeSet::new();
        for c in &clusters {
            prop_assert!(!c.is_empty());
            for n in c {
                prop_assert!(seen.insert(n.clone()), "{} in two clusters", n);
            }
        }
        let all: BTreeSet<String> = g.nodes().map(|(id, _)| id.to_string()).collect();
        prop_assert_eq!(&seen, &all);
        let component: BTreeMap<String, usize> = g
            .components()
            .into_iter()
            .enumerate()
            .flat_map(|(i, c)| c.into_iter().map(move |n| (n, i)))
            .collect();
        for c in &clusters {
            let parts: BTreeSet<usize> = c.iter().map(|n| component[n]).collect();
            prop_assert_eq!(parts.len(), 1);
        }
    }

    #[test]
    fn prompts_follow_view_then_interrogative(p in plan(6, 10, 2, 0)) {
        let plan = elicitation_plan(&build(&p), None);
        prop_assert_eq!(plan.prompts.len(), 29);
        let key = |c: ViewCell| (c.view().rank(), c.interrogative().map_or(0, |i| i.rank()));
        prop_assert!(plan.prompts.windows(2).all(|w| key(w[0].cell) < key(w[1].cell)));
    }

    #[test]
    fn findings_ignore_file_order(p in plan(10, 6, 4, 10), split in proptest::collection::vec(any::<bool>(), 40)) {
        let repo = build(&p);
        let mut halves = [(vec![], vec![], vec![]), (vec![], vec![], vec![])];
        let mut pick = split.iter().cycle();
        for e in repo.entities() {
            halves[usize::from(*pick.next().unwrap())].0.push(e.clone());
        }
        for l in repo.links() {
            halves[usize::from(*pick.next().unwrap())].1.push(l.clone());
        }
        for c in repo.concerns() {
            halves[usize::from(*pick.next().unwrap())].2.push(c.clone());
        }
        let docs: Vec<SourceDocument> = halves
            .iter()
            .enumerate()
            .map(|(i, (e, l, c))| SourceDocument::new(format!("part{i}.ea.yaml"), serialize_elements(e, l, c)))
            .collect();
        let forward = reparse(&docs);
        let backward = reparse(&[docs[1].clone(), docs[0].clone()]);
        let expected = validate(&repo);
        prop_assert_eq!(validate(&forward), expected.clone());
        prop_assert_eq!(validate(&backward), expected);
    }

    #[test]
    fn adding_an_entity_keeps_other_findings(p in plan(10, 6, 4, 10), extra in any::<Index>(), flag in any::<bool>()) {
        let mut repo = build(&p);
        let before = validate(&repo);
        let entity = make_entity(&EntityPlan { kind: extra, name: extra, flag, text: None });
        let entity = Entity::new(entity.kind(), "fresh addition").with_attributes(entity.attributes().clone());
        let id = repo.add_entity(entity).unwrap().id;
        let after = validate(&repo);
        for f in &before {
            prop_assert!(after.contains(f), "lost {:?}", f);
        }
        for f in after.iter().filter(|f| !before.contains(f)) {
            prop_assert_eq!(&f.subject, &Subject::Element(id.clone()));
        }
    }

    #[test]
    fn precedence_findings_once_per_cell(p in plan(6, 12, 2, 0)) {
        let repo = build(&p);
        let findings = check_precedence(&repo);
        let subjects: BTreeSet<String> = findings.iter().map(|f| f.subject.to_string()).collect();
        prop_assert_eq!(subjects.len(), findings.len());
        for f in &findings {
            let Subject::Cell(cell) = f.subject else { panic!("{f:?}") };
            prop_assert!(repo.concern_count_at(cell) > 0);
        }
    }

    #[test]
    fn motivated_services_pass(p in plan(10, 6, 4, 10), view in any::<Index>()) {
        let mut repo = build(&p);
        let why = ViewCell::at(*view.get(&[View::Scope, View::Owner]), Interrogative::Why);
        repo.add_concern(Concern::new(Id::parse("reason").unwrap(), why, "because")).unwrap();
        let services: Vec<Id> = repo.services().map(|s| s.id().clone()).collect();
        for s in services {
            let _ = repo.add_link(Link::new(LinkKind::MotivatedBy, s, Id::parse("reason").unwrap()));
        }
        prop_assert!(validate(&repo).iter().all(|f| f.rule_id != Rule::MotivationMissing));
    }

    #[test]
    fn merging_twice_equals_once(base in plan(6, 3, 2, 6), extra in plan(6, 3, 2, 6), overwrite in any::<bool>()) {
        let repo = build(&base);
        let donor = build(&extra);
        let proposal = IngestProposal {
            entities: donor.entities().cloned().collect(),
            links: donor.links().cloned().collect(),
            concerns: donor
                .concerns()
                .map(|c| Concern::new(Id::parse(&format!("x{}", c.id())).unwrap(), c.cell(), c.statement())
                    .with_refs(c.entity_refs().iter().cloned()))
                .collect(),
            ..Default::default()
        };
        let strategy = if overwrite { MergeStrategy::OverwriteAttributes } else { MergeStrategy::AddOnly };
        if let Ok((once, _)) = merge_proposal(&repo, &proposal, strategy) {
            prop_assert!(once.integrity_violations().is_empty());
            let (twice, _) = merge_proposal(&once, &proposal, strategy).unwrap();
            prop_assert_eq!(twice, once);
        }
    }

    #[test]
    fn exports_are_stable(p in plan(10, 6, 4, 10)) {
        let a = build(&p);
        let b = build(&p);
        prop_assert_eq!(render_matrix(&coverage_matrix(&a)), render_matrix(&coverage_matrix(&b)));
        prop_assert_eq!(export_graph_dot(&value_graph(&a)), export_graph_dot(&value_graph(&b)));
        let findings = validate(&a);
        let json = export_findings_json(&findings);
        prop_assert_eq!(&json, &export_findings_json(&validate(&b)));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = parsed.as_array().unwrap();
        prop_assert_eq!(rows.len(), findings.len());
        for (row, f) in rows.iter().zip(&findings) {
            prop_assert_eq!(row["rule_id"].as_str(), Some(f.rule_id.id()));
            prop_assert_eq!(row["subject"].as_str().map(str::to_string), Some(f.subject.to_string()));
            prop_assert_eq!(row["severity"].as_str().map(str::to_string), Some(f.severity.to_string()));
            prop_assert_eq!(row["message"].as_str(), Some(f.message.as_str()));
        }
    }
}

#[test]
fn prerequisites_rank_below() {
    for i in Interrogative::ALL {
        for set in prerequisites(i) {
            assert!(!set.is_empty());
            for p in *set {
                assert!(p.rank() < i.rank(), "{p} before {i}");
            }
        }
    }
}

#[test]
fn cells_are_distinct() {
    let all = cells();
    assert_eq!(all.len(), 29);
    assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), 29);
    assert_eq!(all.iter().filter(|c| c.is_consumer()).count(), 1);
}
