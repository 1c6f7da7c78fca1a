use crate::format::{Diagnostic, Location};
use crate::model::{ModelError, Repository};

use super::IngestProposal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MergeStrategy {
    /// Existing elements are never changed; differing proposals are reported.
    AddOnly,
    /// Existing entities take the proposed attribute map, existing concerns
    /// the proposed concern, existing links the proposed weight.
    OverwriteAttributes,
}

/// Applies a proposal to a copy of `repo`.
///
/// Entities go in first, then concerns, then links. The merge is all or
/// nothing: any rejected element aborts it. Merging the same proposal again
/// changes nothing.
pub fn merge_proposal(
    repo: &Repository,
    proposal: &IngestProposal,
    strategy: MergeStrategy,
) -> Result<(Repository, Vec<Diagnostic>), ModelError> {
    let mut out = repo.clone();
    let mut diags = Vec::new();
    let here = || Location::start_of(proposal.provenance.source.as_str());
    let mut warn = |message: String| diags.push(Diagnostic::warning(here(), message));

    for e in &proposal.entities {
        let Some(existing) = out.entity(e.id().as_str()) else {
            let added = out.add_entity(e.clone())?;
            added.warnings.iter().for_each(|w| warn(w.to_string()));
            continue;
        };
        if existing.attributes() == e.attributes() {
            continue;
        }
        match strategy {
            MergeStrategy::AddOnly => warn(format!("`{}` already exists with other attributes; kept as is", e.id())),
            MergeStrategy::OverwriteAttributes => {
                let warnings = out.replace_attributes(e.id().as_str(), e.attributes().clone())?;
                warnings.iter().for_each(|w| warn(w.to_string()));
            }
        }
    }

    for c in &proposal.concerns {
        let Some(existing) = out.concern(c.id().as_str()) else {
            out.add_concern(c.clone())?;
            continue;
        };
        if existing == c {
            continue;
        }
        match strategy {
            MergeStrategy::AddOnly => warn(format!(
                "concern `{}` already exists with other content; kept as is",
                c.id()
            )),
            MergeStrategy::OverwriteAttributes => out.replace_concern(c.clone())?,
        }
    }

    for l in &proposal.links {
        let Some(existing) = out.link(l.id().as_str()) else {
            out.add_link(l.clone())?;
            continue;
        };
        if existing.weight() == l.weight() {
            continue;
        }
        match strategy {
            MergeStrategy::AddOnly => warn(format!(
                "link `{}` already exists with weight {}; kept as is",
                l.id(),
                existing.weight()
            )),
            MergeStrategy::OverwriteAttributes => out.set_link_weight(l.id().as_str(), l.weight())?,
        }
    }

    diags.sort();
    Ok((out, diags))
}
