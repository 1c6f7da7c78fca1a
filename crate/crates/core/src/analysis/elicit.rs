use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::model::{cells, interrogative_order, Repository, View, ViewCell};

static STANDARD_PROMPTS: &str = include_str!("../../data/prompts.toml");

/// Key of the merged consumer cell in a prompt catalog.
const MERGED_KEY: &str = "all";

/// One question per framework cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptCatalog {
    questions: BTreeMap<ViewCell, String>,
}

impl PromptCatalog {
    /// The bundled catalog.
    pub fn standard() -> &'static PromptCatalog {
        static CATALOG: OnceLock<PromptCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| PromptCatalog::parse(STANDARD_PROMPTS).expect("bundled prompt catalog is complete"))
    }

    /// Reads a catalog with one table per view and one key per
    /// interrogative (`all` for the consumer cell). Every cell must be present.
    pub fn parse(text: &str) -> Result<PromptCatalog, String> {
        let tables: BTreeMap<String, BTreeMap<String, String>> = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut questions = BTreeMap::new();
        for (view_name, entries) in &tables {
            let view: View = view_name.parse().map_err(|e| format!("{e}"))?;
            for (key, question) in entries {
                let cell = if view.is_merged() {
                    if key != MERGED_KEY {
                        return Err(format!("the {view} table only takes the key `{MERGED_KEY}`"));
                    }
                    ViewCell::consumer()
                } else {
                    ViewCell::at(view, key.parse().map_err(|e| format!("{e}"))?)
                };
                questions.insert(cell, question.trim().to_string());
            }
        }
        if let Some(missing) = cells().into_iter().find(|c| !questions.contains_key(c)) {
            return Err(format!("no question for cell {missing}"));
        }
        Ok(PromptCatalog { questions })
    }

    pub fn question(&self, cell: ViewCell) -> &str {
        &self.questions[&cell]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptStatus {
    Answered,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub cell: ViewCell,
    pub question: String,
    pub status: PromptStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ElicitationPlan {
    pub prompts: Vec<Prompt>,
}

impl ElicitationPlan {
    pub fn open(&self) -> impl Iterator<Item = &Prompt> {
        self.prompts.iter().filter(|p| p.status == PromptStatus::Open)
    }
}

/// Prompts for `view` (or every view) in view rank, then interrogative order.
pub fn elicitation_plan(repo: &Repository, view: Option<View>) -> ElicitationPlan {
    elicitation_plan_with(repo, view, PromptCatalog::standard())
}

pub fn elicitation_plan_with(repo: &Repository, view: Option<View>, catalog: &PromptCatalog) -> ElicitationPlan {
    let views: Vec<View> = match view {
        Some(v) => vec![v],
        None => View::ALL.to_vec(),
    };
    let mut prompts = Vec::new();
    for v in views {
        let row: Vec<ViewCell> = if v.is_merged() {
            vec![ViewCell::consumer()]
        } else {
            interrogative_order().into_iter().map(|i| ViewCell::at(v, i)).collect()
        };
        for cell in row {
            let status = if repo.concern_count_at(cell) > 0 {
                PromptStatus::Answered
            } else {
                PromptStatus::Open
            };
            prompts.push(Prompt {
                cell,
                question: catalog.question(cell).to_string(),
                status,
            });
        }
    }
    ElicitationPlan { prompts }
}
