use std::collections::BTreeSet;

use super::id::Id;
use super::value::Row;
use super::view::ViewCell;

/// A stakeholder viewpoint-concern statement placed in one framework cell.
///
/// `entity_refs` is kept as a sorted set; `records` holds the optional
/// tabular payload (one map per row).
#[derive(Debug, Clone, PartialEq)]
pub struct Concern {
    id: Id,
    cell: ViewCell,
    statement: String,
    entity_refs: BTreeSet<Id>,
    records: Vec<Row>,
}

impl Concern {
    pub fn new(id: Id, cell: ViewCell, statement: impl Into<String>) -> Self {
        Concern {
            id,
            cell,
            statement: statement.into(),
            entity_refs: BTreeSet::new(),
            records: Vec::new(),
        }
    }

    pub fn with_ref(mut self, entity: Id) -> Self {
        self.entity_refs.insert(entity);
        self
    }

    pub fn with_refs(mut self, entities: impl IntoIterator<Item = Id>) -> Self {
        self.entity_refs.extend(entities);
        self
    }

    pub fn with_records(mut self, records: Vec<Row>) -> Self {
        self.records = records;
        self
    }

    pub fn id(&self) -> &Id {
        &self.id
    }

    pub fn cell(&self) -> ViewCell {
        self.cell
    }

    pub fn statement(&self) -> &str {
        &self.statement
    }

    pub fn entity_refs(&self) -> &BTreeSet<Id> {
        &self.entity_refs
    }

    pub fn records(&self) -> &[Row] {
        &self.records
    }
}
