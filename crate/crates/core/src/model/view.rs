use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::interrogative::{interrogative_order, Interrogative};
use super::ModelError;

/// A stakeholder perspective on the enterprise; the rows of the framework.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Scope,
    Owner,
    Designer,
    Builder,
    Consumer,
}

impl View {
    pub const ALL: [View; 5] = [View::Scope, View::Owner, View::Designer, View::Builder, View::Consumer];

    pub fn rank(self) -> u8 {
        match self {
            View::Scope => 1,
            View::Owner => 2,
            View::Designer => 3,
            View::Builder => 4,
            View::Consumer => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            View::Scope => "scope",
            View::Owner => "owner",
            View::Designer => "designer",
            View::Builder => "builder",
            View::Consumer => "consumer",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            View::Scope => "Scope (Ballpark View)",
            View::Owner => "Business Model (Owner's View)",
            View::Designer => "System Model (Designer's View)",
            View::Builder => "Technology Model (Builder's View)",
            View::Consumer => "Detailed Representations (Consumer's View)",
        }
    }

    /// Default stakeholder groups holding this view. A repository can
    /// override them with `stakeholder_group` entities carrying a `views`
    /// attribute.
    pub fn stakeholder_groups(self) -> &'static [&'static str] {
        match self {
            View::Scope => &[
                "Business Development Directors",
                "Delivery Managers",
                "CIOs",
                "CFOs",
                "CSOs",
            ],
            View::Owner => &["Shareholders", "Investors", "Founders", "Board of Governors"],
            View::Designer => &[
                "Enterprise Architects",
                "Requirements Engineers",
                "Project Managers",
                "Security Architects",
                "Privacy Specialists",
                "Regulators",
                "Auditors",
                "BCP Planners",
            ],
            View::Builder => &[
                "Developers",
                "Programmers",
                "DevOps Engineers",
                "Network Engineers",
                "SRE Engineers",
            ],
            View::Consumer => &[
                "External Business Owners",
                "External Architects",
                "External Developer Community",
            ],
        }
    }

    /// The consumer row is a single merged cell.
    pub fn is_merged(self) -> bool {
        self == View::Consumer
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for View {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|v| v.name() == lower)
            .ok_or_else(|| ModelError::UnknownView(s.to_string()))
    }
}

/// One cell of the view x interrogative grid.
///
/// Ordering is row-major: view rank first, then interrogative rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ViewCell {
    view: View,
    interrogative: Option<Interrogative>,
}

impl ViewCell {
    /// Builds a cell, rejecting combinations outside the grid: the consumer
    /// view takes no interrogative and every other view requires one.
    pub fn new(view: View, interrogative: Option<Interrogative>) -> Result<Self, ModelError> {
        if view.is_merged() != interrogative.is_none() {
            return Err(ModelError::InvalidCell { view, interrogative });
        }
        Ok(ViewCell { view, interrogative })
    }

    /// Panics when `view` is the consumer view.
    pub fn at(view: View, interrogative: Interrogative) -> Self {
        Self::new(view, Some(interrogative)).expect("consumer view has no interrogative columns")
    }

    pub fn consumer() -> Self {
        ViewCell {
            view: View::Consumer,
            interrogative: None,
        }
    }

    pub fn view(self) -> View {
        self.view
    }

    pub fn interrogative(self) -> Option<Interrogative> {
        self.interrogative
    }

    pub fn is_consumer(self) -> bool {
        self.view.is_merged()
    }
}

impl fmt::Display for ViewCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.interrogative {
            Some(i) => write!(f, "{}/{}", self.view, i),
            None => write!(f, "{}", self.view),
        }
    }
}

impl FromStr for ViewCell {
    type Err = ModelError;

    /// Parses `view/interrogative` or a bare `consumer`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((v, i)) => ViewCell::new(v.parse()?, Some(i.parse()?)),
            None => ViewCell::new(s.parse()?, None),
        }
    }
}

/// All 29 cells in row-major order; the merged consumer cell comes last.
pub fn cells() -> Vec<ViewCell> {
    let order = interrogative_order();
    View::ALL
        .into_iter()
        .filter(|v| !v.is_merged())
        .flat_map(|v| order.iter().map(move |&i| ViewCell::at(v, i)))
        .chain(std::iter::once(ViewCell::consumer()))
        .collect()
}

pub const CELL_COUNT: usize = 29;

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn grid_has_29_unique_cells() {
        let all = cells();
        assert_eq!(all.len(), CELL_COUNT);
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), CELL_COUNT);
        assert_eq!(all[0], ViewCell::at(View::Scope, Interrogative::Who));
        assert_eq!(*all.last().unwrap(), ViewCell::consumer());
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn consumer_cell_is_merged() {
        assert!(matches!(
            ViewCell::new(View::Consumer, Some(Interrogative::Who)),
            Err(ModelError::InvalidCell { .. })
        ));
        assert!(ViewCell::new(View::Owner, None).is_err());
        assert_eq!("consumer".parse::<ViewCell>().unwrap(), ViewCell::consumer());
        assert_eq!(
            "owner/how".parse::<ViewCell>().unwrap(),
            ViewCell::at(View::Owner, Interrogative::How)
        );
    }

    #[test]
    fn view_ranks() {
        for (n, v) in View::ALL.into_iter().enumerate() {
            assert_eq!(usize::from(v.rank()), n + 1);
            assert_eq!(v.name().parse::<View>().unwrap(), v);
        }
    }
}
