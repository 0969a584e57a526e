use crate::error::{invalid, Error, Result};
use crate::shift::{FactorCode, ShiftSpace, Symbol, Word};
use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

/// A strict total order on the domain alphabet, used to compare words that
/// share length, endpoints and image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpwOrder {
    rank: Vec<usize>,
}

impl MpwOrder {
    /// `order` lists every symbol exactly once, smallest first.
    pub fn new(order: &[Symbol], alphabet_len: usize) -> Result<Self> {
        let mut rank = vec![usize::MAX; alphabet_len];
        for (r, &s) in order.iter().enumerate() {
            if s >= alphabet_len {
                return invalid(format!("order mentions symbol {s} outside the alphabet"));
            }
            if rank[s] != usize::MAX {
                return invalid(format!("order lists symbol {s} twice"));
            }
            rank[s] = r;
        }
        if let Some(s) = rank.iter().position(|&r| r == usize::MAX) {
            return invalid(format!("order omits symbol {s}"));
        }
        Ok(MpwOrder { rank })
    }

    pub fn from_names(space: &ShiftSpace, order: &[&str]) -> Result<Self> {
        let mut idx = Vec::with_capacity(order.len());
        for name in order {
            idx.push(
                space
                    .index_of(name)
                    .ok_or_else(|| Error::InvalidArgument(format!("order names unknown symbol `{name}`")))?,
            );
        }
        if let Some(missing) = space.names().iter().enumerate().find(|(s, _)| !idx.contains(s)) {
            return invalid(format!("order omits symbol `{}`", missing.1));
        }
        Self::new(&idx, space.len())
    }

    /// The declared alphabet order.
    pub fn declared(space: &ShiftSpace) -> Self {
        MpwOrder { rank: (0..space.len()).collect() }
    }

    #[inline]
    pub fn rank(&self, s: Symbol) -> usize {
        self.rank[s]
    }

    pub fn less(&self, a: &[Symbol], b: &[Symbol]) -> bool {
        a.iter().map(|&s| self.rank[s]).lt(b.iter().map(|&s| self.rank[s]))
    }
}

type ClassKey = (Symbol, Symbol, Vec<Symbol>);

/// Memoised MPW-minimality queries for one factor triple and order.
///
/// The lexicographic minimum of a class is found by a backward
/// reachability pass followed by a greedy forward pass, so the cost is
/// linear in the word length rather than in the class size.
pub struct MpwOracle<'a> {
    space: &'a ShiftSpace,
    code: &'a FactorCode,
    order: &'a MpwOrder,
    cache: RwLock<HashMap<ClassKey, Vec<Symbol>>>,
}

impl<'a> MpwOracle<'a> {
    pub fn new(space: &'a ShiftSpace, code: &'a FactorCode, order: &'a MpwOrder) -> Self {
        MpwOracle { space, code, order, cache: RwLock::new(HashMap::new()) }
    }

    pub fn space(&self) -> &'a ShiftSpace {
        self.space
    }

    pub fn code(&self) -> &'a FactorCode {
        self.code
    }

    pub fn order(&self) -> &'a MpwOrder {
        self.order
    }

    /// Smallest allowed word of the given image running from `first` to
    /// `last`, if any.
    pub fn class_minimum(&self, first: Symbol, last: Symbol, image: &[Symbol]) -> Option<Vec<Symbol>> {
        let key = (first, last, image.to_vec());
        if let Some(w) = self.cache.read().unwrap().get(&key) {
            return Some(w.clone());
        }
        let w = lex_min_in_class(self.space, self.code, self.order, first, last, image)?;
        self.cache.write().unwrap().insert(key, w.clone());
        Some(w)
    }

    /// Membership in the set of MPW-minimal words. `w` is assumed allowed.
    pub fn is_minimal(&self, w: &[Symbol]) -> bool {
        is_minimal_scan(self.space, self.code, self.order, w)
    }
}

/// Follows a word as it grows to the right and records where some allowed
/// word with the same first symbol and image, strictly smaller than the
/// prefix read so far, can end.
#[derive(Clone, Debug)]
pub struct TwinFrontier<'a> {
    space: &'a ShiftSpace,
    code: &'a FactorCode,
    order: &'a MpwOrder,
    below: Vec<bool>,
    last: Symbol,
}

impl<'a> TwinFrontier<'a> {
    pub fn new(space: &'a ShiftSpace, code: &'a FactorCode, order: &'a MpwOrder, first: Symbol) -> Self {
        TwinFrontier { space, code, order, below: vec![false; space.len()], last: first }
    }

    fn reaches(&self, u: Symbol, t: Symbol) -> bool {
        (self.space.allows(self.last, u) && self.order.rank(u) < self.order.rank(t))
            || self.space.predecessors(u).iter().any(|&s| self.below[s])
    }

    /// Whether appending `t` would make the word non-minimal.
    pub fn would_break(&self, t: Symbol) -> bool {
        self.reaches(t, t)
    }

    /// Appends `t`; returns true iff the extended word is not minimal.
    pub fn push(&mut self, t: Symbol) -> bool {
        let mut next = vec![false; self.space.len()];
        for &u in self.code.preimages(self.code.label(t)) {
            next[u] = self.reaches(u, t);
        }
        self.below = next;
        self.last = t;
        self.below[t]
    }
}

/// Minimality by a single left-to-right scan, `O(|w| · |A|²)`.
pub fn is_minimal_scan(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, w: &[Symbol]) -> bool {
    let Some((&first, rest)) = w.split_first() else {
        return true;
    };
    let mut scan = TwinFrontier::new(space, code, order, first);
    let mut broken = false;
    for &t in rest {
        broken = scan.push(t);
    }
    !broken
}

/// Backward feasibility table: `ok[i][s]` iff a path can sit at `s` in
/// position `i` and still reach `last` at the end reading `image`.
fn feasibility(
    space: &ShiftSpace,
    code: &FactorCode,
    last: Symbol,
    image: &[Symbol],
) -> Vec<Vec<bool>> {
    let n = image.len();
    let k = space.len();
    let mut ok = vec![vec![false; k]; n];
    if n == 0 {
        return ok;
    }
    if code.label(last) == image[n - 1] {
        ok[n - 1][last] = true;
    }
    for i in (0..n - 1).rev() {
        for &s in code.preimages(image[i]) {
            ok[i][s] = space.successors(s).iter().any(|&t| ok[i + 1][t]);
        }
    }
    ok
}

pub(crate) fn lex_min_in_class(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    first: Symbol,
    last: Symbol,
    image: &[Symbol],
) -> Option<Vec<Symbol>> {
    let n = image.len();
    if n == 0 {
        return None;
    }
    let ok = feasibility(space, code, last, image);
    if !ok[0][first] {
        return None;
    }
    let mut w = Vec::with_capacity(n);
    w.push(first);
    for row in ok.iter().skip(1) {
        let cur = *w.last().unwrap();
        let next = space
            .successors(cur)
            .iter()
            .copied()
            .filter(|&t| row[t])
            .min_by_key(|&t| order.rank(t))?;
        w.push(next);
    }
    Some(w)
}

/// Every allowed word with the given endpoints and image, in declared
/// lexicographic order.
pub fn class_members(
    space: &ShiftSpace,
    code: &FactorCode,
    first: Symbol,
    last: Symbol,
    image: &[Symbol],
) -> Vec<Vec<Symbol>> {
    let n = image.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let ok = feasibility(space, code, last, image);
    if !ok[0][first] {
        return out;
    }
    fn rec(
        space: &ShiftSpace,
        ok: &[Vec<bool>],
        stack: &mut Vec<Symbol>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        if stack.len() == ok.len() {
            out.push(stack.clone());
            return;
        }
        let cur = *stack.last().unwrap();
        for &t in space.successors(cur) {
            if ok[stack.len()][t] {
                stack.push(t);
                rec(space, ok, stack, out);
                stack.pop();
            }
        }
    }
    let mut stack = vec![first];
    rec(space, &ok, &mut stack, &mut out);
    out
}

/// True iff `w` is the lexicographic minimum of its (length, endpoints,
/// image) class. Words of length at most 2 are always minimal.
pub fn is_mpw_minimal(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, w: &Word) -> Result<bool> {
    if let Some(s) = w.symbols.iter().find(|&&s| s >= space.len()) {
        return invalid(format!("symbol {s} outside the alphabet"));
    }
    if !space.is_allowed(&w.symbols) {
        return invalid(format!("word `{}` is not allowed", space.format_word(&w.symbols)));
    }
    Ok(MpwOracle::new(space, code, order).is_minimal(&w.symbols))
}

/// Minimal forbidden list of the length-`max_len` approximation of the
/// MPW subshift: non-minimal words of length at most `max_len` whose proper
/// subwords are all minimal. Sorted by length, then lexicographically.
pub fn mpw_forbidden(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    max_len: usize,
) -> Result<Vec<Word>> {
    if max_len < 3 {
        return invalid("max_len must be at least 3");
    }
    let oracle = MpwOracle::new(space, code, order);
    let mut level: Vec<Vec<Symbol>> = space.words(2);
    let mut forbidden = Vec::new();
    for _ in 3..=max_len {
        let members: HashSet<&[Symbol]> = level.iter().map(Vec::as_slice).collect();
        let mut next = Vec::new();
        for w in &level {
            for &t in space.successors(*w.last().unwrap()) {
                let mut cand = w.clone();
                cand.push(t);
                if !members.contains(&cand[1..]) {
                    continue;
                }
                if oracle.is_minimal(&cand) {
                    next.push(cand);
                } else {
                    forbidden.push(Word::new(cand));
                }
            }
        }
        level = next;
    }
    Ok(forbidden)
}
