//! Markdown, JSON, and DOT renderings. Output is deterministic; nothing
//! here reads the clock or the environment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{CoverageMatrix, NodeKind, ValueGraph};
use crate::model::{interrogative_order, EntityKind, Id, View, ViewCell};
use crate::validation::Finding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    MatrixMd,
    FindingsJson,
    GraphDot,
    ScoresJson,
}

impl ReportKind {
    /// Conventional output file name.
    pub fn file_name(self) -> &'static str {
        match self {
            ReportKind::MatrixMd => "matrix.md",
            ReportKind::FindingsJson => "findings.json",
            ReportKind::GraphDot => "graph.dot",
            ReportKind::ScoresJson => "scores.json",
        }
    }

    /// Whether the format has comments, and so can carry a provenance stamp.
    pub fn accepts_stamp(self) -> bool {
        matches!(self, ReportKind::MatrixMd | ReportKind::GraphDot)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub kind: ReportKind,
    pub body: String,
}

impl Report {
    pub fn new(kind: ReportKind, body: String) -> Self {
        Report { kind, body }
    }

    /// Prepends `stamp` as a comment line. JSON reports are left unchanged.
    pub fn stamped(mut self, stamp: &str) -> Self {
        let line = match self.kind {
            ReportKind::MatrixMd => format!("<!-- {} -->\n", stamp.replace("--", "- -")),
            ReportKind::GraphDot => format!("// {}\n", stamp.replace('\n', " ")),
            ReportKind::FindingsJson | ReportKind::ScoresJson => return self,
        };
        self.body.insert_str(0, &line);
        self
    }
}

/// Markdown table with one row per view and one column per interrogative.
/// The consumer row holds its single merged cell in the first column.
pub fn render_matrix(m: &CoverageMatrix) -> String {
    let columns = interrogative_order();
    let mut out = String::new();
    out.push_str("| View |");
    for i in &columns {
        let _ = write!(out, " {} |", i.heading());
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(columns.len()));
    out.push('\n');
    for view in View::ALL {
        let _ = write!(out, "| {} |", view.label());
        if view.is_merged() {
            let _ = write!(out, " {} |", cell_text(m, ViewCell::consumer()));
            out.push_str(&" |".repeat(columns.len() - 1));
        } else {
            for &i in &columns {
                let _ = write!(out, " {} |", cell_text(m, ViewCell::at(view, i)));
            }
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "\nCoverage: {}/{} cells ({} filled, {} partial)",
        m.occupied(),
        m.total(),
        m.filled(),
        m.partial()
    );
    out
}

fn cell_text(m: &CoverageMatrix, cell: ViewCell) -> String {
    let c = m.get(cell);
    format!("{} ({})", c.status.name(), c.concerns)
}

/// Pretty-printed JSON array of findings in canonical order.
pub fn export_findings_json(findings: &[Finding]) -> String {
    let mut sorted = findings.to_vec();
    sorted.sort();
    serde_json::to_string_pretty(&sorted).expect("findings serialize")
}

/// Pretty-printed JSON object from id to score.
pub fn scores_json(scores: &BTreeMap<Id, f64>) -> String {
    serde_json::to_string_pretty(scores).expect("scores serialize")
}

/// Undirected DOT graph. Node shape encodes the node kind; every edge carries
/// its `weight`.
pub fn export_graph_dot(g: &ValueGraph) -> String {
    let mut out = String::from("graph w6h {\n");
    for (id, kind) in g.nodes() {
        let style = if kind == NodeKind::StakeholderGroup {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(out, "  {} [shape={}{}];", quote(id), shape(kind), style);
    }
    for (a, b, w) in g.edges() {
        let _ = writeln!(out, "  {} -- {} [weight={}];", quote(a), quote(b), w);
    }
    out.push_str("}\n");
    out
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Concern => "note",
        NodeKind::StakeholderGroup => "ellipse",
        NodeKind::Entity(k) => match k {
            EntityKind::Microservice => "box",
            EntityKind::Api => "hexagon",
            EntityKind::BusinessFunction => "component",
            EntityKind::BusinessProcess => "cds",
            EntityKind::Organization => "house",
            EntityKind::DataElement => "cylinder",
            EntityKind::Location => "tab",
            EntityKind::DeploymentTarget => "box3d",
            EntityKind::BusinessCycle => "circle",
            EntityKind::BusinessRule => "diamond",
            EntityKind::StakeholderGroup => "ellipse",
            EntityKind::Sdk => "folder",
            EntityKind::CodeSample => "septagon",
        },
    }
}

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::coverage_matrix;
    use crate::model::Repository;
    use crate::validation::{Rule, Subject};

    #[test]
    fn empty_matrix() {
        let md = render_matrix(&coverage_matrix(&Repository::default()));
        assert_eq!(md.matches("empty (0)").count(), 29);
        assert!(md.contains("Motivation (Why)"));
        assert!(md.contains("| People (who) |"));
        assert!(md.contains("Coverage: 0/29"));
        let rows: Vec<_> = md.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().all(|r| r.matches('|').count() == 9));
    }

    #[test]
    fn findings_json() {
        assert_eq!(export_findings_json(&[]), "[]");
        let a = Finding::new(
            Rule::MotivationMissing,
            Subject::Element(Id::parse("api.b").unwrap()),
            "m",
        );
        let b = Finding::new(
            Rule::DataOwnership,
            Subject::Element(Id::parse("data_element.x").unwrap()),
            "n",
        );
        let one: serde_json::Value = serde_json::from_str(&export_findings_json(std::slice::from_ref(&a))).unwrap();
        let obj = one[0].as_object().unwrap();
        assert_eq!(obj.len(), 4);
        assert_eq!(obj["rule_id"], "MOTIVATION_MISSING");
        assert_eq!(obj["severity"], "error");
        assert_eq!(obj["subject"], "api.b");
        assert_eq!(
            export_findings_json(&[a.clone(), b.clone()]),
            export_findings_json(&[b, a])
        );
    }

    #[test]
    fn dot_counts() {
        assert_eq!(export_graph_dot(&ValueGraph::new()), "graph w6h {\n}\n");
        let mut g = ValueGraph::new();
        for n in ["a", "b", "c"] {
            g.add_node(n, NodeKind::Entity(EntityKind::Api));
        }
        g.add_edge("a", "b", 2.5).unwrap();
        g.add_edge("b", "c", 1.0).unwrap();
        let dot = export_graph_dot(&g);
        assert_eq!(dot.lines().filter(|l| l.contains("[shape=")).count(), 3);
        assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 2);
        assert!(dot.contains("\"a\" -- \"b\" [weight=2.5];"));
    }

    #[test]
    fn stamps() {
        let r = Report::new(ReportKind::GraphDot, "graph w6h {\n}\n".into()).stamped("at 1 on h");
        assert!(r.body.starts_with("// at 1 on h\n"));
        let j = Report::new(ReportKind::FindingsJson, "[]".into()).stamped("x");
        assert_eq!(j.body, "[]");
    }
}
