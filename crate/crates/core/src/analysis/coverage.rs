use serde::Serialize;

use crate::model::{cells, Repository, ViewCell, CELL_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Empty,
    /// Concerns exist but none of them references an entity.
    Partial,
    Filled,
}

impl CellStatus {
    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Empty => "empty",
            CellStatus::Partial => "partial",
            CellStatus::Filled => "filled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCoverage {
    pub cell: ViewCell,
    pub status: CellStatus,
    pub concerns: usize,
}

/// Status of every framework cell, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    cells: Vec<CellCoverage>,
}

impl CoverageMatrix {
    pub fn cells(&self) -> &[CellCoverage] {
        &self.cells
    }

    pub fn get(&self, cell: ViewCell) -> &CellCoverage {
        self.cells
            .iter()
            .find(|c| c.cell == cell)
            .expect("matrix covers every cell")
    }

    /// Cells holding at least one concern, partial or filled.
    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|c| c.status != CellStatus::Empty).count()
    }

    pub fn filled(&self) -> usize {
        self.count(CellStatus::Filled)
    }

    pub fn partial(&self) -> usize {
        self.count(CellStatus::Partial)
    }

    pub fn total(&self) -> usize {
        CELL_COUNT
    }

    fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }
}

pub fn coverage_matrix(repo: &Repository) -> CoverageMatrix {
    let cells = cells()
        .into_iter()
        .map(|cell| {
            let mut concerns = 0;
            let mut referenced = false;
            for c in repo.concerns_at(cell) {
                concerns += 1;
                referenced |= !c.entity_refs().is_empty();
            }
            let status = match (concerns, referenced) {
                (0, _) => CellStatus::Empty,
                (_, false) => CellStatus::Partial,
                (_, true) => CellStatus::Filled,
            };
            CellCoverage { cell, status, concerns }
        })
        .collect();
    CoverageMatrix { cells }
}
