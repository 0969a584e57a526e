//! Loading and validating system description files.

use compfn::factor::MpwOrder;
use compfn::{FactorCode, ShiftSpace};
use serde_json::{Map, Value};
use std::fmt;

/// A validated factor triple plus everything needed to describe it in a
/// report.
#[derive(Debug)]
pub struct System {
    pub space: ShiftSpace,
    pub code: FactorCode,
    pub order: MpwOrder,
    pub sha256: String,
    pub warnings: Vec<String>,
}

/// A problem in the description file, with the line where it was found when
/// that can be determined.
#[derive(Debug)]
pub struct SpecError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if !self.field.is_empty() {
            write!(f, "field `{}`: ", self.field)?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for SpecError {}

struct Locator<'a>(&'a str);

impl Locator<'_> {
    /// Line of the first `"key"` in the source text.
    fn line_of(&self, key: &str) -> Option<usize> {
        let needle = format!("\"{key}\"");
        self.0.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
    }

    fn err(&self, field: &str, message: impl Into<String>) -> SpecError {
        let top = field.split(['.', '[']).next().unwrap_or(field);
        SpecError { line: self.line_of(top), column: None, field: field.to_string(), message: message.into() }
    }
}

fn strings<'a>(loc: &Locator, field: &str, v: &'a Value) -> Result<Vec<&'a str>, SpecError> {
    let arr = v.as_array().ok_or_else(|| loc.err(field, "expected an array of strings"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| x.as_str().ok_or_else(|| loc.err(&format!("{field}[{i}]"), "expected a string")))
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses and validates a description:
/// `{"alphabet": [...], "transitions": [[s, t], ...] | "full": true,
///   "code": {symbol: label}, "order": [...]}`.
/// `order` may be omitted, in which case the alphabet order is used.
pub fn parse_system(text: &str) -> Result<System, SpecError> {
    let loc = Locator(text);
    let root: Value = serde_json::from_str(text).map_err(|e| SpecError {
        line: Some(e.line()),
        column: Some(e.column()),
        field: String::new(),
        message: format!("invalid JSON: {e}"),
    })?;
    let obj: &Map<String, Value> = root.as_object().ok_or_else(|| loc.err("", "top level must be an object"))?;
    for key in obj.keys() {
        if !["alphabet", "transitions", "full", "code", "order", "name", "description"].contains(&key.as_str()) {
            return Err(loc.err(key, "unknown field"));
        }
    }
    let alphabet = strings(&loc, "alphabet", obj.get("alphabet").ok_or_else(|| loc.err("alphabet", "missing"))?)?;
    if alphabet.is_empty() {
        return Err(loc.err("alphabet", "alphabet is empty"));
    }
    for (i, a) in alphabet.iter().enumerate() {
        if alphabet[..i].contains(a) {
            return Err(loc.err(&format!("alphabet[{i}]"), format!("duplicate symbol `{a}`")));
        }
    }
    let index = |field: &str, name: &str| -> Result<usize, SpecError> {
        alphabet.iter().position(|a| *a == name).ok_or_else(|| loc.err(field, format!("unknown symbol `{name}`")))
    };

    let full = match obj.get("full") {
        None => false,
        Some(v) => v.as_bool().ok_or_else(|| loc.err("full", "expected true or false"))?,
    };
    let mut pairs = Vec::new();
    match (obj.get("transitions"), full) {
        (Some(_), true) => return Err(loc.err("full", "give either `full: true` or `transitions`, not both")),
        (None, true) => {
            let k = alphabet.len();
            pairs = (0..k).flat_map(|s| (0..k).map(move |t| (s, t))).collect();
        }
        (None, false) => return Err(loc.err("transitions", "missing (or set `full: true`)")),
        (Some(v), false) => {
            let arr = v.as_array().ok_or_else(|| loc.err("transitions", "expected an array of [s, t] pairs"))?;
            for (i, p) in arr.iter().enumerate() {
                let field = format!("transitions[{i}]");
                let pair = strings(&loc, &field, p)?;
                if pair.len() != 2 {
                    return Err(loc.err(&field, "expected a pair [s, t]"));
                }
                pairs.push((index(&field, pair[0])?, index(&field, pair[1])?));
            }
        }
    }
    let space = ShiftSpace::new(alphabet.iter().map(|s| s.to_string()).collect(), &pairs)
        .map_err(|e| loc.err("transitions", e.to_string()))?;
    let mut warnings: Vec<String> = space
        .trimmed()
        .iter()
        .map(|s| format!("symbol `{s}` lies on no bi-infinite path and was removed"))
        .collect();

    let code_obj = obj
        .get("code")
        .ok_or_else(|| loc.err("code", "missing"))?
        .as_object()
        .ok_or_else(|| loc.err("code", "expected an object {symbol: label}"))?;
    for (sym, label) in code_obj {
        index(&format!("code.{sym}"), sym)?;
        if !label.is_string() {
            return Err(loc.err(&format!("code.{sym}"), "label must be a string"));
        }
    }
    let mut code_pairs = Vec::new();
    for name in alphabet.iter() {
        let label = code_obj.get(*name).and_then(Value::as_str);
        match label {
            Some(l) => {
                if space.index_of(name).is_some() {
                    code_pairs.push((*name, l));
                }
            }
            None => return Err(loc.err("code", format!("no label for symbol `{name}`"))),
        }
    }
    let code = FactorCode::from_names(&space, &code_pairs).map_err(|e| loc.err("code", e.to_string()))?;

    let order = match obj.get("order") {
        None => {
            warnings.push("no `order` given; using the alphabet order".into());
            MpwOrder::declared(&space)
        }
        Some(v) => {
            let names = strings(&loc, "order", v)?;
            for (i, n) in names.iter().enumerate() {
                index(&format!("order[{i}]"), n)?;
                if names[..i].contains(n) {
                    return Err(loc.err(&format!("order[{i}]"), format!("symbol `{n}` listed twice")));
                }
            }
            if let Some(missing) = alphabet.iter().find(|a| !names.contains(a)) {
                return Err(loc.err("order", format!("symbol `{missing}` missing from the order")));
            }
            let kept: Vec<&str> = names.into_iter().filter(|n| space.index_of(n).is_some()).collect();
            MpwOrder::from_names(&space, &kept).map_err(|e| loc.err("order", e.to_string()))?
        }
    };
    Ok(System { space, code, order, sha256: sha256_hex(text.as_bytes()), warnings })
}
