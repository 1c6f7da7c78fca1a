use std::borrow::Borrow;
use std::fmt;

use serde::Serialize;

/// Repository-wide identifier for an entity, link, or concern.
///
/// Ids are lowercase slugs: runs of `[a-z0-9_]` joined by single dashes, with
/// `.` separating segments (`microservice.payments`, `api.orders-v2`).
/// Because a slug never contains `--`, link ids can join their parts with
/// a double dash without ambiguity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Id(String);

impl Id {
    /// Accepts `s` only if it is already a well-formed id.
    pub fn parse(s: &str) -> Option<Id> {
        is_valid_id(s).then(|| Id(s.to_string()))
    }

    pub(crate) fn from_raw(s: String) -> Id {
        Id(s)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Id {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Id {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Id {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Lowercases `name` and collapses every run of non-alphanumeric characters
/// into one dash. Leading and trailing dashes are dropped, so the result is
/// empty when `name` has no alphanumerics.
pub fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_dash = false;
    for c in name.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            out.push(c);
        } else {
            pending_dash = true;
        }
    }
    out
}

fn is_valid_segment(seg: &str) -> bool {
    !seg.is_empty()
        && seg.split('-').all(|part| {
            !part.is_empty()
                && part
                    .bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        })
}

pub fn is_valid_id(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_valid_segment)
}
