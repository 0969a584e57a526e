//! One-step shifts of finite type, words and 1-block factor codes.

mod sofic;

pub use sofic::SoficPresentation;

use crate::error::{invalid, Error, Result};
use std::collections::{HashMap, VecDeque};
use std::fmt;

/// Index of a symbol in its alphabet's declared order.
pub type Symbol = usize;

/// A vertex shift: an ordered alphabet plus the allowed length-2 words.
///
/// Construction trims symbols that cannot occur in any bi-infinite point,
/// so every remaining symbol has a predecessor and a successor. The names of
/// trimmed symbols are kept in [`ShiftSpace::trimmed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpace {
    names: Vec<String>,
    allowed: Vec<bool>,
    succ: Vec<Vec<Symbol>>,
    pred: Vec<Vec<Symbol>>,
    trimmed: Vec<String>,
}

impl ShiftSpace {
    /// Builds a space from symbol names and allowed transitions given as
    /// indices into `names`.
    pub fn new(names: Vec<String>, transitions: &[(usize, usize)]) -> Result<Self> {
        if names.is_empty() {
            return invalid("alphabet is empty");
        }
        let mut seen = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return invalid(format!("symbol {i} has an empty name"));
            }
            if seen.insert(n.as_str(), i).is_some() {
                return invalid(format!("duplicate symbol `{n}`"));
            }
        }
        let k = names.len();
        let mut adj = vec![false; k * k];
        for &(s, t) in transitions {
            if s >= k || t >= k {
                return invalid(format!("transition ({s}, {t}) outside the alphabet"));
            }
            adj[s * k + t] = true;
        }

        // Iteratively drop symbols without an outgoing or incoming edge.
        let mut alive = vec![true; k];
        loop {
            let mut changed = false;
            for s in 0..k {
                if !alive[s] {
                    continue;
                }
                let has_out = (0..k).any(|t| alive[t] && adj[s * k + t]);
                let has_in = (0..k).any(|t| alive[t] && adj[t * k + s]);
                if !has_out || !has_in {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..k).filter(|&s| alive[s]).collect();
        if keep.is_empty() {
            return invalid("no symbol occurs in a bi-infinite point");
        }
        let trimmed = (0..k).filter(|&s| !alive[s]).map(|s| names[s].clone()).collect();
        let m = keep.len();
        let mut allowed = vec![false; m * m];
        for (i, &s) in keep.iter().enumerate() {
            for (j, &t) in keep.iter().enumerate() {
                allowed[i * m + j] = adj[s * k + t];
            }
        }
        let names = keep.iter().map(|&s| names[s].clone()).collect();
        Ok(Self::assemble(names, allowed, trimmed))
    }

    /// Builds a space from symbol names and name pairs.
    pub fn from_names(names: &[&str], transitions: &[(&str, &str)]) -> Result<Self> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut pairs = Vec::with_capacity(transitions.len());
        for (s, t) in transitions {
            let s = *index
                .get(s)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown symbol `{s}`")))?;
            let t = *index
                .get(t)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown symbol `{t}`")))?;
            pairs.push((s, t));
        }
        Self::new(names.iter().map(|s| s.to_string()).collect(), &pairs)
    }

    /// The full shift on the given symbols.
    pub fn full(names: &[&str]) -> Result<Self> {
        let k = names.len();
        let pairs: Vec<_> = (0..k).flat_map(|s| (0..k).map(move |t| (s, t))).collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), &pairs)
    }

    fn assemble(names: Vec<String>, allowed: Vec<bool>, trimmed: Vec<String>) -> Self {
        let k = names.len();
        let succ = (0..k)
            .map(|s| (0..k).filter(|&t| allowed[s * k + t]).collect())
            .collect();
        let pred = (0..k)
            .map(|t| (0..k).filter(|&s| allowed[s * k + t]).collect())
            .collect();
        ShiftSpace { names, allowed, succ, pred, trimmed }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s]
    }

    pub fn index_of(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name)
    }

    /// Names of symbols removed because they cannot occur in any point.
    pub fn trimmed(&self) -> &[String] {
        &self.trimmed
    }

    #[inline]
    pub fn allows(&self, s: Symbol, t: Symbol) -> bool {
        self.allowed[s * self.len() + t]
    }

    #[inline]
    pub fn successors(&self, s: Symbol) -> &[Symbol] {
        &self.succ[s]
    }

    #[inline]
    pub fn predecessors(&self, t: Symbol) -> &[Symbol] {
        &self.pred[t]
    }

    pub fn transitions(&self) -> Vec<(Symbol, Symbol)> {
        (0..self.len())
            .flat_map(|s| self.succ[s].iter().map(move |&t| (s, t)))
            .collect()
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_full(&self) -> bool {
        self.allowed.iter().all(|&a| a)
    }

    /// True iff every consecutive pair of `w` is an allowed transition.
    pub fn is_allowed(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| s < self.len()) && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// Strong connectivity of the transition graph.
    pub fn is_irreducible(&self) -> bool {
        let reach = |adj: &Vec<Vec<Symbol>>| {
            let mut seen = vec![false; self.len()];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(s) = queue.pop_front() {
                for &t in &adj[s] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen.into_iter().all(|x| x)
        };
        reach(&self.succ) && reach(&self.pred)
    }

    /// All allowed words of length `n` as raw symbol vectors, sorted
    /// lexicographically in the declared alphabet order.
    pub fn words(&self, n: usize) -> Vec<Vec<Symbol>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(n);
        for s in 0..self.len() {
            stack.push(s);
            self.extend_words(&mut stack, n, &mut out);
            stack.pop();
        }
        out
    }

    fn extend_words(&self, stack: &mut Vec<Symbol>, n: usize, out: &mut Vec<Vec<Symbol>>) {
        if stack.len() == n {
            out.push(stack.clone());
            return;
        }
        let last = *stack.last().unwrap();
        for &t in &self.succ[last] {
            stack.push(t);
            self.extend_words(stack, n, out);
            stack.pop();
        }
    }

    /// Allowed `n`-words as [`Word`]s with origin 0.
    pub fn enumerate_words(&self, n: usize) -> Vec<Word> {
        self.words(n).into_iter().map(Word::new).collect()
    }

    /// The `n`-block presentation: symbol `i` of the result is the `i`-th
    /// allowed `n`-word of `self` in lexicographic order, and `v -> w` is
    /// allowed when the two blocks overlap in `n - 1` symbols.
    pub fn recode_higher_block(&self, n: usize) -> Result<ShiftSpace> {
        if n == 0 {
            return invalid("block length must be at least 1");
        }
        let blocks = self.words(n);
        let index: HashMap<&[Symbol], usize> =
            blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
        let mut pairs = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            let last = *b.last().unwrap();
            for &t in &self.succ[last] {
                let mut next = b[1..].to_vec();
                next.push(t);
                if let Some(&j) = index.get(next.as_slice()) {
                    pairs.push((i, j));
                }
            }
        }
        let names = blocks.iter().map(|b| self.format_word(b)).collect();
        ShiftSpace::new(names, &pairs)
    }

    /// Parses a word. Whitespace-separated tokens are read as symbol names;
    /// otherwise, when every name is a single character, each character is
    /// one symbol.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Ok(Word::new(parse_names(&self.names, text)?))
    }

    pub fn format_word(&self, w: &[Symbol]) -> String {
        format_names(&self.names, w)
    }
}

fn single_char(names: &[String]) -> bool {
    names.iter().all(|n| n.chars().count() == 1)
}

/// Joins symbol names, without a separator when every name is one character.
pub fn format_names(names: &[String], w: &[Symbol]) -> String {
    let sep = if single_char(names) { "" } else { " " };
    w.iter().map(|&s| names[s].as_str()).collect::<Vec<_>>().join(sep)
}

/// Inverse of [`format_names`]; whitespace always separates tokens.
pub fn parse_names(names: &[String], text: &str) -> Result<Vec<Symbol>> {
    let lookup = |tok: &str| {
        names
            .iter()
            .position(|n| n == tok)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown symbol `{tok}`")))
    };
    let text = text.trim();
    if text.contains(char::is_whitespace) || !single_char(names) {
        text.split_whitespace().map(lookup).collect()
    } else {
        text.chars().map(|c| lookup(c.encode_utf8(&mut [0; 4]))).collect()
    }
}

/// A finite word with the coordinate of its first symbol, so `[w]_i`
/// cylinders need no separate type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub symbols: Vec<Symbol>,
    pub origin: i64,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word { symbols, origin: 0 }
    }

    pub fn at(symbols: Vec<Symbol>, origin: i64) -> Self {
        Word { symbols, origin }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn shifted(&self, by: i64) -> Word {
        Word { symbols: self.symbols.clone(), origin: self.origin + by }
    }

    /// Appends `other` after `self`; the result keeps `self`'s origin.
    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { symbols, origin: self.origin }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}@{}", parts.join(","), self.origin)
    }
}

/// A 1-block code: every symbol of the domain gets a label in the image
/// alphabet. The image alphabet is exactly the set of labels used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCode {
    labels: Vec<Symbol>,
    label_names: Vec<String>,
    preimages: Vec<Vec<Symbol>>,
}

impl FactorCode {
    /// `labels[s]` is the image of domain symbol `s`. Every label index below
    /// `label_names.len()` must be hit.
    pub fn new(labels: Vec<Symbol>, label_names: Vec<String>) -> Result<Self> {
        let m = label_names.len();
        let mut preimages = vec![Vec::new(); m];
        for (s, &l) in labels.iter().enumerate() {
            if l >= m {
                return invalid(format!("label {l} of symbol {s} outside image alphabet"));
            }
            preimages[l].push(s);
        }
        if let Some(l) = preimages.iter().position(Vec::is_empty) {
            return invalid(format!("code is not surjective: label `{}` unused", label_names[l]));
        }
        Ok(FactorCode { labels, label_names, preimages })
    }

    /// Builds a code from `symbol name -> label name` pairs. The image
    /// alphabet is the sorted set of label names.
    pub fn from_names(space: &ShiftSpace, pairs: &[(&str, &str)]) -> Result<Self> {
        let map: HashMap<&str, &str> = pairs.iter().copied().collect();
        let mut label_names: Vec<String> = Vec::new();
        let mut raw = Vec::with_capacity(space.len());
        for name in space.names() {
            let l = map
                .get(name.as_str())
                .ok_or_else(|| Error::InvalidArgument(format!("code has no label for `{name}`")))?;
            raw.push(l.to_string());
            label_names.push(l.to_string());
        }
        label_names.sort();
        label_names.dedup();
        let labels = raw
            .iter()
            .map(|l| label_names.binary_search(l).unwrap())
            .collect();
        Self::new(labels, label_names)
    }

    pub fn identity(space: &ShiftSpace) -> Self {
        Self::new((0..space.len()).collect(), space.names().to_vec()).unwrap()
    }

    #[inline]
    pub fn label(&self, s: Symbol) -> Symbol {
        self.labels[s]
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn domain_len(&self) -> usize {
        self.labels.len()
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn preimages(&self, label: Symbol) -> &[Symbol] {
        &self.preimages[label]
    }

    pub fn is_injective(&self) -> bool {
        self.preimages.iter().all(|p| p.len() == 1)
    }

    /// Symbol-wise image, keeping length and origin.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        Ok(Word::at(self.apply_symbols(&w.symbols)?, w.origin))
    }

    pub fn apply_symbols(&self, w: &[Symbol]) -> Result<Vec<Symbol>> {
        w.iter()
            .map(|&s| {
                self.labels
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("symbol {s} outside code domain")))
            })
            .collect()
    }

    /// The code on the `n`-block recoding of `space`: a block is labelled by
    /// the image of its first symbol.
    pub fn lift_to_higher_block(&self, space: &ShiftSpace, n: usize) -> Result<FactorCode> {
        if n == 0 {
            return invalid("block length must be at least 1");
        }
        let labels = space.words(n).iter().map(|b| self.labels[b[0]]).collect();
        FactorCode::new(labels, self.label_names.clone())
    }

    pub fn format_image(&self, y: &[Symbol]) -> String {
        format_names(&self.label_names, y)
    }

    /// Parses a word over the image alphabet, with the same rules as
    /// [`ShiftSpace::parse_word`].
    pub fn parse_image(&self, text: &str) -> Result<Word> {
        Ok(Word::new(parse_names(&self.label_names, text)?))
    }
}
