use crate::error::{invalid, Error, Result};
use crate::shift::{format_names, parse_names, FactorCode, ShiftSpace, Symbol};
use serde_json::{Map, Value};

/// Largest table a potential may hold.
pub const MAX_TABLE: usize = 1 << 24;

/// A locally constant function: `f(x) = table[x_offset .. x_offset+range-1]`.
///
/// The table is dense over all `alphabet^range` words, indexed in
/// lexicographic order; entries for words the space forbids are `NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    alphabet: usize,
    range: usize,
    offset: i64,
    table: Vec<f64>,
}

pub(crate) fn table_len(alphabet: usize, range: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..range {
        n = n
            .checked_mul(alphabet)
            .filter(|&n| n <= MAX_TABLE)
            .ok_or_else(|| Error::InvalidArgument(format!("table for range {range} exceeds {MAX_TABLE} entries")))?;
    }
    Ok(n)
}

/// Lexicographic index of a word over `alphabet` symbols.
#[inline]
pub fn word_index(alphabet: usize, w: &[Symbol]) -> usize {
    w.iter().fold(0, |acc, &s| acc * alphabet + s)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn index_word(alphabet: usize, len: usize, mut idx: usize) -> Vec<Symbol> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = idx % alphabet;
        idx /= alphabet;
    }
    w
}

impl Potential {
    pub fn new(alphabet: usize, range: usize, offset: i64, table: Vec<f64>) -> Result<Self> {
        if alphabet == 0 || range == 0 {
            return invalid("potential needs a nonempty alphabet and range at least 1");
        }
        let n = table_len(alphabet, range)?;
        if table.len() != n {
            return invalid(format!("table has {} entries, expected {n}", table.len()));
        }
        if table.iter().any(|v| v.is_infinite()) {
            return invalid("potential values must be finite");
        }
        Ok(Potential { alphabet, range, offset, table })
    }

    pub fn constant(alphabet: usize, c: f64) -> Self {
        Potential { alphabet, range: 1, offset: 0, table: vec![c; alphabet] }
    }

    /// Range-1 potential with one value per symbol.
    pub fn per_symbol(values: Vec<f64>) -> Result<Self> {
        Self::new(values.len(), 1, 0, values)
    }

    /// Tabulates `f` on the allowed `range`-words of `space`.
    pub fn from_fn(space: &ShiftSpace, range: usize, offset: i64, f: impl Fn(&[Symbol]) -> f64) -> Result<Self> {
        let k = space.len();
        let mut table = vec![f64::NAN; table_len(k, range)?];
        for w in space.words(range) {
            table[word_index(k, &w)] = f(&w);
        }
        Self::new(k, range, offset, table)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn range(&self) -> usize {
        self.range
    }

    /// Coordinate of the first table symbol relative to the origin.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn value(&self, w: &[Symbol]) -> f64 {
        self.table[word_index(self.alphabet, w)]
    }

    /// Errors unless every allowed `range`-word has a value.
    pub fn check_total(&self, space: &ShiftSpace) -> Result<()> {
        if space.len() != self.alphabet {
            return invalid(format!(
                "potential is over {} symbols, space has {}",
                self.alphabet,
                space.len()
            ));
        }
        for w in space.words(self.range) {
            if self.value(&w).is_nan() {
                return invalid(format!("potential has no value on `{}`", space.format_word(&w)));
            }
        }
        Ok(())
    }

    /// `f + c`.
    pub fn plus_constant(&self, c: f64) -> Potential {
        let table = self.table.iter().map(|v| v + c).collect();
        Potential { table, ..self.clone() }
    }

    pub fn scaled(&self, c: f64) -> Potential {
        let table = self.table.iter().map(|v| v * c).collect();
        Potential { table, ..self.clone() }
    }

    /// The same function read through a wider window `[offset, offset+range)`.
    pub fn widened(&self, offset: i64, range: usize) -> Result<Potential> {
        let lead = self.offset - offset;
        if lead < 0 || lead as usize + self.range > range {
            return invalid("window does not contain the potential's window");
        }
        let lead = lead as usize;
        let k = self.alphabet;
        let n = table_len(k, range)?;
        let table = (0..n)
            .map(|i| {
                let w = index_word(k, range, i);
                self.value(&w[lead..lead + self.range])
            })
            .collect();
        Ok(Potential { alphabet: k, range, offset, table })
    }

    /// Pointwise sum, on the smallest window containing both.
    pub fn add(&self, other: &Potential) -> Result<Potential> {
        if self.alphabet != other.alphabet {
            return invalid("potentials over different alphabets");
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.range as i64).max(other.offset + other.range as i64);
        let range = (hi - lo) as usize;
        let a = self.widened(lo, range)?;
        let b = other.widened(lo, range)?;
        let table = a.table.iter().zip(&b.table).map(|(x, y)| x + y).collect();
        Ok(Potential { table, ..a })
    }

    /// `self ∘ σ` for a symbol map `σ` from a larger alphabet, e.g. `φ ∘ π`.
    pub fn pull_back(&self, map: &[Symbol]) -> Result<Potential> {
        if map.iter().any(|&l| l >= self.alphabet) {
            return invalid("symbol map leaves the potential's alphabet");
        }
        let k = map.len();
        let n = table_len(k, self.range)?;
        let table = (0..n)
            .map(|i| {
                let w: Vec<Symbol> = index_word(k, self.range, i).into_iter().map(|s| map[s]).collect();
                self.value(&w)
            })
            .collect();
        Ok(Potential { alphabet: k, range: self.range, offset: self.offset, table })
    }

    /// `φ ∘ π` for a potential `φ` on the image alphabet.
    pub fn compose(&self, code: &FactorCode) -> Result<Potential> {
        if self.alphabet != code.label_count() {
            return invalid("potential is not over the code's image alphabet");
        }
        self.pull_back(code.labels())
    }

    pub fn min_value(&self) -> f64 {
        self.table.iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.table.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `{"range": r, "offset": o, "table": {"word": value, ...}}`; words the
    /// table leaves undefined are omitted.
    pub fn to_json(&self, names: &[String]) -> Value {
        let mut table = Map::new();
        for (i, v) in self.table.iter().enumerate() {
            if !v.is_nan() {
                let w = index_word(self.alphabet, self.range, i);
                table.insert(format_names(names, &w), Value::from(*v));
            }
        }
        serde_json::json!({ "range": self.range, "offset": self.offset, "table": table })
    }

    /// Reads the JSON form above; `offset` defaults to 0.
    pub fn from_json(names: &[String], value: &Value) -> Result<Potential> {
        let obj = value.as_object().ok_or_else(|| Error::Parse("potential must be an object".into()))?;
        let range = obj
            .get("range")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("potential.range must be a positive integer".into()))?
            as usize;
        let offset = match obj.get("offset") {
            None => 0,
            Some(v) => v.as_i64().ok_or_else(|| Error::Parse("potential.offset must be an integer".into()))?,
        };
        let entries = obj
            .get("table")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("potential.table must be an object".into()))?;
        let k = names.len();
        let mut table = vec![f64::NAN; table_len(k, range)?];
        for (word, v) in entries {
            let w = parse_names(names, word).map_err(|e| Error::Parse(format!("potential.table: {e}")))?;
            if w.len() != range {
                return Err(Error::Parse(format!("potential.table: `{word}` does not have length {range}")));
            }
            let v = v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("potential.table[`{word}`] must be a number")))?;
            table[word_index(k, &w)] = v;
        }
        Potential::new(k, range, offset, table).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for i in 0..81 {
            assert_eq!(word_index(3, &index_word(3, 4, i)), i);
        }
        assert_eq!(word_index(3, &[1, 0, 2]), 11);
    }

    #[test]
    fn sums_align_windows() {
        let f = Potential::per_symbol(vec![1.0, 2.0]).unwrap();
        let g = Potential::new(2, 2, -1, vec![0.0, 10.0, 20.0, 30.0]).unwrap();
        let h = f.add(&g).unwrap();
        assert_eq!((h.range(), h.offset()), (2, -1));
        // h(x_{-1} x_0) = f(x_0) + g(x_{-1} x_0)
        assert_eq!(h.value(&[1, 0]), 1.0 + 20.0);
        assert_eq!(h.value(&[0, 1]), 2.0 + 10.0);
    }

    #[test]
    fn composition_reads_labels() {
        let x = ShiftSpace::full(&["a", "b", "c"]).unwrap();
        let pi = FactorCode::from_names(&x, &[("a", "0"), ("b", "0"), ("c", "1")]).unwrap();
        let phi = Potential::per_symbol(vec![0.5, -1.0]).unwrap();
        let lifted = phi.compose(&pi).unwrap();
        assert_eq!(lifted.table(), &[0.5, 0.5, -1.0]);
    }

    #[test]
    fn json_round_trip() {
        let x = ShiftSpace::from_names(&["0", "1"], &[("0", "0"), ("0", "1"), ("1", "0")]).unwrap();
        let f = Potential::from_fn(&x, 2, 0, |w| w[0] as f64 - 0.25 * w[1] as f64).unwrap();
        let back = Potential::from_json(x.names(), &f.to_json(x.names())).unwrap();
        assert_eq!(back.value(&[0, 1]), -0.25);
        assert!(back.value(&[1, 1]).is_nan());
        back.check_total(&x).unwrap();
        let bad = serde_json::json!({"range": 2, "table": {"00": 1.0}});
        assert!(Potential::from_json(x.names(), &bad).unwrap().check_total(&x).is_err());
    }
}
