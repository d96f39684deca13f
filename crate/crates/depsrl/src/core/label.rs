//! The joint label codec.
//!
//! A joint label has four components joined by `|`: the syntactic relation,
//! the (D) slot, the (C) slot and the (R) slot. Unspecified slots render as
//! `_`. The (C) slot is a tuple `(a,b)`, optionally suffixed `+m` when all
//! ARGM arguments propagate along the edge; `0` in the `a` position is the
//! null marker that pairs with the internal dummy relation.
//!
//! `|` is used as the separator rather than `-` because SRL labels
//! themselves contain hyphens (ARGM-TMP, C-ARG1); the codec must stay
//! unambiguous over the full PropBank alphabet.

use crate::error::CodecError;

/// Slot separator in serialized labels.
pub const SEPARATOR: char = '|';
/// Marker for an unspecified slot.
pub const UNSPECIFIED: &str = "_";
/// Null marker inside (C) tuples, pairing with the dummy relation.
pub const NULL_MARKER: &str = "0";
/// Suffix on a (C) tuple indicating ARGM propagation.
pub const ARGM_SUFFIX: &str = "+m";
/// Internal sentinel inserted in (D) slots by the dummy-relation mechanism.
/// It must never appear in decoded frames.
pub const DUMMY_LABEL: &str = "NULL-ARG";

/// The (C) slot: the argument the governor holds under `parent_label` is
/// also an argument of the dependent, labeled `child_label`. A
/// `parent_label` of `None` is the null marker and resolves against the
/// dummy relation. `propagate_argm` additionally copies every ARGM-*
/// argument of the governor to the dependent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CShare {
    pub parent_label: Option<String>,
    pub child_label: String,
    pub propagate_argm: bool,
}

impl CShare {
    pub fn new(parent_label: impl Into<String>, child_label: impl Into<String>) -> Self {
        CShare {
            parent_label: Some(parent_label.into()),
            child_label: child_label.into(),
            propagate_argm: false,
        }
    }

    pub fn with_dummy(child_label: impl Into<String>) -> Self {
        CShare {
            parent_label: None,
            child_label: child_label.into(),
            propagate_argm: false,
        }
    }

    pub fn propagating(mut self) -> Self {
        self.propagate_argm = true;
        self
    }
}

/// The four-component edge label: syntactic relation plus (D), (C) and (R)
/// SRL slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointLabel {
    pub syn: String,
    pub d: Option<String>,
    pub c: Option<CShare>,
    pub r: Option<String>,
}

impl JointLabel {
    /// A purely syntactic label with all SRL slots unspecified.
    pub fn syntactic(syn: impl Into<String>) -> Self {
        JointLabel {
            syn: syn.into(),
            d: None,
            c: None,
            r: None,
        }
    }

    pub fn has_srl(&self) -> bool {
        self.d.is_some() || self.c.is_some() || self.r.is_some()
    }
}

impl std::fmt::Display for JointLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match serialize_label(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => f.write_str("<invalid label>"),
        }
    }
}

fn check_component(field: &'static str, s: &str, in_tuple: bool) -> Result<(), CodecError> {
    if s.is_empty() {
        return Err(CodecError::Component {
            field,
            reason: "empty string".into(),
        });
    }
    if s == UNSPECIFIED {
        return Err(CodecError::Component {
            field,
            reason: "collides with the unspecified marker `_`".into(),
        });
    }
    if in_tuple && s == NULL_MARKER {
        return Err(CodecError::Component {
            field,
            reason: "collides with the null marker `0`".into(),
        });
    }
    if let Some(bad) = s
        .chars()
        .find(|c| *c == SEPARATOR || *c == '(' || *c == ')' || *c == ',' || c.is_whitespace())
    {
        return Err(CodecError::Component {
            field,
            reason: format!("contains reserved character {bad:?}"),
        });
    }
    Ok(())
}

/// Renders a joint label as `syn|d|c|r`.
pub fn serialize_label(label: &JointLabel) -> Result<String, CodecError> {
    check_component("syn", &label.syn, false)?;
    let d = match &label.d {
        Some(d) => {
            check_component("d", d, false)?;
            d.as_str()
        }
        None => UNSPECIFIED,
    };
    let c = match &label.c {
        Some(share) => {
            let a = match &share.parent_label {
                Some(a) => {
                    check_component("c.parent", a, true)?;
                    a.as_str()
                }
                None => NULL_MARKER,
            };
            check_component("c.child", &share.child_label, true)?;
            let suffix = if share.propagate_argm { ARGM_SUFFIX } else { "" };
            format!("({a},{}){suffix}", share.child_label)
        }
        None => UNSPECIFIED.to_string(),
    };
    let r = match &label.r {
        Some(r) => {
            check_component("r", r, false)?;
            r.as_str()
        }
        None => UNSPECIFIED,
    };
    Ok(format!(
        "{}{sep}{}{sep}{}{sep}{}",
        label.syn,
        d,
        c,
        r,
        sep = SEPARATOR
    ))
}

fn parse_tuple(s: &str) -> Result<CShare, CodecError> {
    let malformed = |reason: &str| CodecError::Parse {
        field: "c",
        reason: format!("malformed tuple {s:?}: {reason}"),
    };
    let (body, propagate_argm) = match s.strip_suffix(ARGM_SUFFIX) {
        Some(body) => (body, true),
        None => (s, false),
    };
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| malformed("expected `(a,b)`"))?;
    let mut parts = inner.split(',');
    let (a, b) = match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => (a, b),
        _ => return Err(malformed("expected exactly two comma-separated labels")),
    };
    let parent_label = if a == NULL_MARKER {
        None
    } else {
        check_component("c.parent", a, true)?;
        Some(a.to_string())
    };
    check_component("c.child", b, true)?;
    Ok(CShare {
        parent_label,
        child_label: b.to_string(),
        propagate_argm,
    })
}

/// Parses the output of [`serialize_label`]; the inverse on its image.
pub fn parse_label(s: &str) -> Result<JointLabel, CodecError> {
    let fields: Vec<&str> = s.split(SEPARATOR).collect();
    if fields.len() != 4 {
        return Err(CodecError::Parse {
            field: "label",
            reason: format!("expected 4 `|`-separated fields, found {}", fields.len()),
        });
    }
    check_component("syn", fields[0], false)?;
    let d = if fields[1] == UNSPECIFIED {
        None
    } else {
        check_component("d", fields[1], false)?;
        Some(fields[1].to_string())
    };
    let c = if fields[2] == UNSPECIFIED {
        None
    } else {
        Some(parse_tuple(fields[2])?)
    };
    let r = if fields[3] == UNSPECIFIED {
        None
    } else {
        check_component("r", fields[3], false)?;
        Some(fields[3].to_string())
    };
    Ok(JointLabel {
        syn: fields[0].to_string(),
        d,
        c,
        r,
    })
}
