//! Coverage, elicitation plans, value scoring, and graph clustering.

mod coverage;
mod elicit;
mod graph;
mod scoring;

use thiserror::Error;

use crate::model::View;

pub use coverage::{coverage_matrix, CellCoverage, CellStatus, CoverageMatrix};
pub use elicit::{elicitation_plan, elicitation_plan_with, ElicitationPlan, Prompt, PromptCatalog, PromptStatus};
pub use graph::{cluster_graph, value_graph, NodeKind, ValueGraph};
pub use scoring::{retirement_candidates, reuse_candidates, value_scores, ViewWeights};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("unknown view `{0}` in weights")]
    UnknownView(String),
    #[error("weight {weight} for the {view} view must be a non-negative number")]
    InvalidWeight { view: View, weight: f64 },
    #[error("{0}")]
    Syntax(String),
    #[error("threshold {0} must be a non-negative number")]
    InvalidThreshold(f64),
    #[error("edge weight {0} must be a non-negative number")]
    InvalidEdgeWeight(f64),
    #[error("no node `{0}` in the graph")]
    UnknownNode(String),
}
