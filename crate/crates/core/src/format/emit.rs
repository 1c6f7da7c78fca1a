//! Canonical block-style YAML writer.
//!
//! Input is an [`Out`] tree whose map entries are already in their final
//! order. Strings are written plain only when they read back as the same
//! string; everything else is double-quoted with JSON escaping, which is
//! valid YAML.

use std::collections::BTreeMap;

use super::yaml::scalar_value;
use crate::model::Value;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Out {
    Scalar(Value),
    List(Vec<Out>),
    Map(Vec<(String, Out)>),
}

impl Out {
    pub(crate) fn str(s: impl Into<String>) -> Out {
        Out::Scalar(Value::Str(s.into()))
    }

    pub(crate) fn map(entries: Vec<(&str, Out)>) -> Out {
        Out::Map(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub(crate) fn sorted_map(m: &BTreeMap<String, Value>) -> Out {
        Out::Map(m.iter().map(|(k, v)| (k.clone(), Out::from(v))).collect())
    }
}

impl From<&Value> for Out {
    fn from(v: &Value) -> Self {
        match v {
            Value::List(items) => Out::List(items.iter().map(Out::from).collect()),
            Value::Map(m) => Out::sorted_map(m),
            scalar => Out::Scalar(scalar.clone()),
        }
    }
}

/// Writes `root` as a YAML document ending in a newline.
pub(crate) fn emit(root: &Out) -> String {
    let mut buf = String::new();
    match root {
        Out::Map(entries) if !entries.is_empty() => emit_map(&mut buf, entries, 0, false),
        Out::List(items) if !items.is_empty() => emit_list(&mut buf, items, 0),
        other => {
            buf.push_str(&inline(other).unwrap_or_default());
            buf.push('\n');
        }
    }
    buf
}

/// Scalars and empty collections fit on one line.
fn inline(node: &Out) -> Option<String> {
    match node {
        Out::Scalar(v) => Some(scalar(v)),
        Out::List(items) if items.is_empty() => Some("[]".into()),
        Out::Map(entries) if entries.is_empty() => Some("{}".into()),
        _ => None,
    }
}

fn pad(buf: &mut String, indent: usize) {
    buf.extend(std::iter::repeat_n(' ', indent));
}

fn emit_map(buf: &mut String, entries: &[(String, Out)], indent: usize, first_inline: bool) {
    for (n, (key, value)) in entries.iter().enumerate() {
        if n > 0 || !first_inline {
            pad(buf, indent);
        }
        buf.push_str(&string_scalar(key));
        buf.push(':');
        match (inline(value), value) {
            (Some(text), _) => {
                buf.push(' ');
                buf.push_str(&text);
                buf.push('\n');
            }
            (None, Out::List(items)) => {
                buf.push('\n');
                emit_list(buf, items, indent + 2);
            }
            (None, Out::Map(inner)) => {
                buf.push('\n');
                emit_map(buf, inner, indent + 2, false);
            }
            (None, Out::Scalar(_)) => unreachable!("scalars are always inline"),
        }
    }
}

fn emit_list(buf: &mut String, items: &[Out], indent: usize) {
    for item in items {
        pad(buf, indent);
        buf.push('-');
        match (inline(item), item) {
            (Some(text), _) => {
                buf.push(' ');
                buf.push_str(&text);
                buf.push('\n');
            }
            (None, Out::Map(entries)) => {
                buf.push(' ');
                emit_map(buf, entries, indent + 2, true);
            }
            (None, Out::List(inner)) => {
                buf.push('\n');
                emit_list(buf, inner, indent + 2);
            }
            (None, Out::Scalar(_)) => unreachable!("scalars are always inline"),
        }
    }
}

pub(crate) fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Int(n) => n.to_string(),
        Value::Float(x) => float(*x),
        Value::Str(s) => string_scalar(s),
        Value::List(_) | Value::Map(_) => unreachable!("collections are not scalars"),
    }
}

fn float(x: f64) -> String {
    if x.is_nan() {
        ".nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { ".inf" } else { "-.inf" }.into()
    } else {
        // Debug keeps a `.0` or exponent, so the text never reads back as an int.
        format!("{x:?}")
    }
}

const YAML11_WORDS: &[&str] = &["yes", "no", "on", "off", "y", "n"];

fn plain_ok(s: &str) -> bool {
    let Some(first) = s.chars().next() else {
        return false;
    };
    (first.is_ascii_alphanumeric() || first == '_' || first == '/')
        && !s.ends_with(' ')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || " _./()+,-".contains(c))
        && !s.contains("  ")
        && !YAML11_WORDS.contains(&s.to_ascii_lowercase().as_str())
        && matches!(scalar_value(s, false), Value::Str(_))
}

pub(crate) fn string_scalar(s: &str) -> String {
    if plain_ok(s) {
        s.to_string()
    } else {
        serde_json::to_string(s).expect("strings always serialize")
    }
}
