use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{slugify, EntityKind, Repository, View};

use super::AnalysisError;

const MAX_ROUNDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Entity(EntityKind),
    Concern,
    /// A stakeholder group known only from a view's defaults.
    StakeholderGroup,
}

/// Undirected weighted graph over repository elements and stakeholder groups.
///
/// Parallel edges are merged by summing their weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueGraph {
    nodes: BTreeMap<String, NodeKind>,
    edges: BTreeMap<(String, String), f64>,
}

impl ValueGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node; re-adding keeps the first kind.
    pub fn add_node(&mut self, id: impl Into<String>, kind: NodeKind) {
        self.nodes.entry(id.into()).or_insert(kind);
    }

    /// Adds `weight` to the edge between `a` and `b`. Self-loops are ignored.
    pub fn add_edge(&mut self, a: &str, b: &str, weight: f64) -> Result<(), AnalysisError> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(AnalysisError::InvalidEdgeWeight(weight));
        }
        for end in [a, b] {
            if !self.nodes.contains_key(end) {
                return Err(AnalysisError::UnknownNode(end.to_string()));
            }
        }
        if a != b {
            let key = if a < b { (a, b) } else { (b, a) };
            *self.edges.entry((key.0.to_string(), key.1.to_string())).or_default() += weight;
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, NodeKind)> {
        self.nodes.iter().map(|(id, k)| (id.as_str(), *k))
    }

    /// Edges with `a < b`, in order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.edges.iter().map(|((a, b), w)| (a.as_str(), b.as_str(), *w))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self, id: &str) -> Option<NodeKind> {
        self.nodes.get(id).copied()
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<String>> {
        let index = self.index();
        let adj = self.adjacency(&index);
        let mut seen = vec![false; index.len()];
        let ids: Vec<&String> = self.nodes.keys().collect();
        let mut out = Vec::new();
        for start in 0..ids.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = Vec::new();
            while let Some(n) = stack.pop() {
                members.push(n);
                for &(m, _) in &adj[n] {
                    if !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
            members.sort_unstable();
            out.push(members.into_iter().map(|i| ids[i].clone()).collect());
        }
        out
    }

    fn index(&self) -> BTreeMap<&str, usize> {
        self.nodes.keys().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }

    fn adjacency(&self, index: &BTreeMap<&str, usize>) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); index.len()];
        for (a, b, w) in self.edges() {
            let (i, j) = (index[a], index[b]);
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }
}

/// Builds the stakeholder value graph of a repository.
///
/// Nodes are entities, concerns, and stakeholder groups. Stakeholder groups
/// for a view are the `stakeholder_group` entities naming that view, or,
/// when there are none and the view holds concerns, its defaults. Edges come
/// from links (link weight), concern references (1.0), and concern-to-group
/// membership (1.0).
pub fn value_graph(repo: &Repository) -> ValueGraph {
    let mut g = ValueGraph::new();
    for e in repo.entities() {
        g.add_node(e.id().as_str(), NodeKind::Entity(e.kind()));
    }
    for c in repo.concerns() {
        g.add_node(c.id().as_str(), NodeKind::Concern);
    }
    let mut groups: BTreeMap<View, BTreeSet<String>> = BTreeMap::new();
    for e in repo.entities_of(EntityKind::StakeholderGroup) {
        for v in e.views() {
            groups.entry(v).or_default().insert(e.id().to_string());
        }
    }
    let in_use: BTreeSet<View> = repo.concerns().map(|c| c.cell().view()).collect();
    for view in View::ALL {
        if groups.contains_key(&view) || !in_use.contains(&view) {
            continue;
        }
        let defaults = groups.entry(view).or_default();
        for name in view.stakeholder_groups() {
            let id = format!("{}.{}", EntityKind::StakeholderGroup.name(), slugify(name));
            g.add_node(id.clone(), NodeKind::StakeholderGroup);
            defaults.insert(id);
        }
    }

    let mut add = |a: &str, b: &str, w: f64| {
        // links into missing ids only exist in unchecked repositories
        if g.kind(a).is_some() && g.kind(b).is_some() {
            g.add_edge(a, b, w).expect("weights are validated on insert");
        }
    };
    for l in repo.links() {
        add(l.source().as_str(), l.target().as_str(), l.weight());
    }
    for c in repo.concerns() {
        for r in c.entity_refs() {
            add(c.id().as_str(), r.as_str(), 1.0);
        }
        for group in groups.get(&c.cell().view()).into_iter().flatten() {
            add(c.id().as_str(), group, 1.0);
        }
    }
    g
}

/// Partitions the graph by weighted label propagation.
///
/// Each round visits nodes in an order shuffled by a generator seeded with
/// `seed`; a node adopts the label with the largest total edge weight among
/// its neighbours, keeping its own label when that is among the best and
/// taking the smallest label otherwise. Stops when a round changes nothing.
///
/// Clusters are sorted internally and listed by smallest member.
pub fn cluster_graph(g: &ValueGraph, seed: u64) -> Vec<Vec<String>> {
    let index = g.index();
    let adj = g.adjacency(&index);
    let n = adj.len();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..MAX_ROUNDS {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &node in &order {
            let mut totals: BTreeMap<usize, f64> = BTreeMap::new();
            for &(m, w) in &adj[node] {
                *totals.entry(labels[m]).or_default() += w;
            }
            let best = totals.values().copied().fold(0.0, f64::max);
            if best <= 0.0 {
                continue;
            }
            let winners = totals.iter().filter(|(_, w)| **w >= best).map(|(l, _)| *l);
            let current = labels[node];
            if totals.get(&current).is_some_and(|w| *w >= best) {
                continue;
            }
            let next = winners.min().expect("best is attained");
            labels[node] = next;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let ids: Vec<&String> = g.nodes.keys().collect();
    let mut clusters: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, label) in labels.into_iter().enumerate() {
        clusters.entry(label).or_default().push(ids[i].clone());
    }
    let mut out: Vec<Vec<String>> = clusters.into_values().collect();
    out.sort();
    out
}
