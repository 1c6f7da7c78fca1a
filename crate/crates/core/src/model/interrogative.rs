//! The seven w6h interrogatives and the precedence rules between them.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// One of the seven viewpoints an enterprise is questioned from.
///
/// The declaration order is the canonical column order, so the derived
/// `Ord` agrees with [`Interrogative::rank`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interrogative {
    Who,
    What,
    Which,
    Where,
    How,
    Why,
    When,
}

impl Interrogative {
    pub const ALL: [Interrogative; 7] = [
        Interrogative::Who,
        Interrogative::What,
        Interrogative::Which,
        Interrogative::Where,
        Interrogative::How,
        Interrogative::Why,
        Interrogative::When,
    ];

    /// Column number, 1 through 7.
    pub fn rank(self) -> u8 {
        match self {
            Interrogative::Who => 1,
            Interrogative::What => 2,
            Interrogative::Which => 3,
            Interrogative::Where => 4,
            Interrogative::How => 5,
            Interrogative::Why => 6,
            Interrogative::When => 7,
        }
    }

    pub fn from_rank(rank: u8) -> Option<Self> {
        Self::ALL.get(usize::from(rank).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Interrogative::Who => "who",
            Interrogative::What => "what",
            Interrogative::Which => "which",
            Interrogative::Where => "where",
            Interrogative::How => "how",
            Interrogative::Why => "why",
            Interrogative::When => "when",
        }
    }

    /// The material category the interrogative asks about.
    pub fn alias(self) -> Alias {
        match self {
            Interrogative::Who => Alias::People,
            Interrogative::What => Alias::Data,
            Interrogative::Which => Alias::Selection,
            Interrogative::Where => Alias::Network,
            Interrogative::How => Alias::Function,
            Interrogative::Why => Alias::Motivation,
            Interrogative::When => Alias::Time,
        }
    }

    /// Column heading used in rendered matrices, e.g. `People (who)`.
    pub fn heading(self) -> &'static str {
        match self {
            Interrogative::Who => "People (who)",
            Interrogative::What => "Data (what)",
            Interrogative::Which => "Selection (which)",
            Interrogative::Where => "Network (where)",
            Interrogative::How => "Function (How)",
            Interrogative::Why => "Motivation (Why)",
            Interrogative::When => "Time (when)",
        }
    }

    /// Prerequisites in disjunctive normal form. See [`PrecedenceGraph`].
    pub fn prerequisites(self) -> &'static [&'static [Interrogative]] {
        PrecedenceGraph::standard().prerequisites(self)
    }
}

impl fmt::Display for Interrogative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Interrogative {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|i| i.name() == lower || i.alias().name() == lower)
            .ok_or_else(|| ModelError::UnknownInterrogative(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Alias {
    People,
    Data,
    Selection,
    Network,
    Function,
    Motivation,
    Time,
}

impl Alias {
    pub fn name(self) -> &'static str {
        match self {
            Alias::People => "people",
            Alias::Data => "data",
            Alias::Selection => "selection",
            Alias::Network => "network",
            Alias::Function => "function",
            Alias::Motivation => "motivation",
            Alias::Time => "time",
        }
    }
}

use Interrogative::{How, What, Where, Which};

const HOW_REQUIRES: &[&[Interrogative]] = &[&[What, Which], &[What, Where]];
const WHY_REQUIRES: &[&[Interrogative]] = &[&[What, How]];
const WHEN_REQUIRES: &[&[Interrogative]] = &[&[Where, How]];

/// Which interrogatives must be answered before another can be.
///
/// Each interrogative maps to a disjunction of prerequisite sets: the
/// interrogative is satisfiable when every member of at least one set is
/// satisfied. An empty disjunction means no prerequisites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceGraph {
    requirements: [&'static [&'static [Interrogative]]; 7],
}

static STANDARD: PrecedenceGraph = PrecedenceGraph {
    requirements: [&[], &[], &[], &[], HOW_REQUIRES, WHY_REQUIRES, WHEN_REQUIRES],
};

impl PrecedenceGraph {
    /// The column dependencies of the framework table:
    /// `how <- {what, which} | {what, where}`, `why <- {what, how}`,
    /// `when <- {where, how}`.
    pub fn standard() -> &'static PrecedenceGraph {
        &STANDARD
    }

    pub fn prerequisites(&self, i: Interrogative) -> &'static [&'static [Interrogative]] {
        self.requirements[usize::from(i.rank() - 1)]
    }

    /// Edges `p -> q` for every `p` in any disjunct of `q`, deduplicated and sorted.
    pub fn edges(&self) -> Vec<(Interrogative, Interrogative)> {
        let mut edges: Vec<_> = Interrogative::ALL
            .into_iter()
            .flat_map(|q| {
                self.prerequisites(q)
                    .iter()
                    .flat_map(move |d| d.iter().map(move |&p| (p, q)))
            })
            .collect();
        edges.sort();
        edges.dedup();
        edges
    }

    /// Kahn's algorithm, always releasing the lowest-ranked ready node.
    ///
    /// Returns `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<Interrogative>> {
        let edges = self.edges();
        let mut indegree = [0usize; 7];
        for &(_, q) in &edges {
            indegree[usize::from(q.rank() - 1)] += 1;
        }
        let mut ready: BinaryHeap<Reverse<Interrogative>> = Interrogative::ALL
            .into_iter()
            .filter(|i| indegree[usize::from(i.rank() - 1)] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(7);
        while let Some(Reverse(p)) = ready.pop() {
            order.push(p);
            for &(_, q) in edges.iter().filter(|(from, _)| *from == p) {
                let slot = &mut indegree[usize::from(q.rank() - 1)];
                *slot -= 1;
                if *slot == 0 {
                    ready.push(Reverse(q));
                }
            }
        }
        (order.len() == 7).then_some(order)
    }

    /// True if some disjunct of `i`'s prerequisites is fully contained in `answered`.
    /// Interrogatives without prerequisites are always satisfied.
    pub fn is_satisfied(&self, i: Interrogative, answered: impl Fn(Interrogative) -> bool) -> bool {
        let dnf = self.prerequisites(i);
        dnf.is_empty() || dnf.iter().any(|d| d.iter().all(|&p| answered(p)))
    }
}

/// The canonical elicitation order, who through when.
pub fn interrogative_order() -> Vec<Interrogative> {
    PrecedenceGraph::standard()
        .topological_order()
        .expect("standard precedence graph is acyclic")
}

/// Shorthand for [`PrecedenceGraph::prerequisites`] on the standard graph.
pub fn prerequisites(i: Interrogative) -> &'static [&'static [Interrogative]] {
    PrecedenceGraph::standard().prerequisites(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Interrogative::*;

    #[test]
    fn order_matches_columns() {
        assert_eq!(interrogative_order(), vec![Who, What, Which, Where, How, Why, When]);
        assert_eq!(interrogative_order()[0].rank(), 1);
        assert_eq!(*interrogative_order().last().unwrap(), When);
    }

    #[test]
    fn header_formulas() {
        assert_eq!(prerequisites(How), &[&[What, Which][..], &[What, Where][..]]);
        assert_eq!(prerequisites(Why), &[&[What, How][..]]);
        assert_eq!(prerequisites(When), &[&[Where, How][..]]);
        for i in [Who, What, Which, Where] {
            assert!(prerequisites(i).is_empty(), "{i}");
        }
    }

    #[test]
    fn prerequisites_rank_lower() {
        for i in Interrogative::ALL {
            for d in prerequisites(i) {
                assert!(d.iter().all(|p| p.rank() < i.rank()), "{i}");
            }
        }
    }

    #[test]
    fn ranks_and_aliases_are_bijective() {
        let mut ranks: Vec<_> = Interrogative::ALL.iter().map(|i| i.rank()).collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 2, 3, 4, 5, 6, 7]);
        for i in Interrogative::ALL {
            assert_eq!(Interrogative::from_rank(i.rank()), Some(i));
            assert_eq!(i.alias().name().parse::<Interrogative>().unwrap(), i);
        }
        assert_eq!(Interrogative::from_rank(0), None);
        assert_eq!(Interrogative::from_rank(8), None);
        assert_eq!(Where.alias(), Alias::Network);
    }

    #[test]
    fn satisfaction_uses_any_disjunct() {
        let g = PrecedenceGraph::standard();
        assert!(g.is_satisfied(How, |p| matches!(p, What | Where)));
        assert!(g.is_satisfied(How, |p| matches!(p, What | Which)));
        assert!(!g.is_satisfied(How, |p| matches!(p, Which | Where)));
        assert!(g.is_satisfied(Who, |_| false));
    }
}
