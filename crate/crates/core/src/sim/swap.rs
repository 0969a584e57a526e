use crate::error::{invalid, Result};
use crate::shift::{FactorCode, ShiftSpace, Symbol, Word};
use serde::Serialize;

/// Replaces `u` by `v` at marked positions. Both words share their endpoints
/// and image, so a swap keeps the point allowed and its image unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapMap {
    pub u: Vec<Symbol>,
    pub v: Vec<Symbol>,
    /// Also turn marked `v`s into `u`s, making the swap an involution.
    pub both_ways: bool,
}

impl SwapMap {
    pub fn new(space: &ShiftSpace, code: &FactorCode, u: &Word, v: &Word, both_ways: bool) -> Result<Self> {
        let (u, v) = (&u.symbols, &v.symbols);
        if u.is_empty() || u.len() != v.len() {
            return invalid("swap words must be nonempty and of equal length");
        }
        if u == v {
            return invalid("swap words must differ");
        }
        if u[0] != v[0] || u[u.len() - 1] != v[v.len() - 1] {
            return invalid("swap words must share their first and last symbols");
        }
        if !space.is_allowed(u) || !space.is_allowed(v) {
            return invalid("swap words must be allowed");
        }
        if code.apply_symbols(u)? != code.apply_symbols(v)? {
            return invalid("swap words must have the same image");
        }
        if both_ways && (overlaps(u, u) || overlaps(v, v) || overlaps(u, v) || overlaps(v, u)) {
            return invalid("a two-way swap needs words without self or mutual overlaps");
        }
        Ok(SwapMap { u: u.clone(), v: v.clone(), both_ways })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn inverse(&self) -> SwapMap {
        SwapMap { u: self.v.clone(), v: self.u.clone(), both_ways: self.both_ways }
    }
}

/// Some proper suffix of `a` of length at least 2 is a prefix of `b`.
/// Sharing the single endpoint symbol is harmless since swaps keep it.
fn overlaps(a: &[Symbol], b: &[Symbol]) -> bool {
    (1..a.len().saturating_sub(1)).any(|k| b.starts_with(&a[k..]))
}

fn check_marks(x: &[Symbol], s: &[bool], gap: usize) -> Result<()> {
    if s.len() != x.len() {
        return invalid(format!("marker length {} differs from word length {}", s.len(), x.len()));
    }
    let mut last: Option<usize> = None;
    for (i, _) in s.iter().enumerate().filter(|e| *e.1) {
        if let Some(l) = last {
            if i - l < gap {
                return invalid(format!("markers at {l} and {i} are closer than {gap}"));
            }
        }
        last = Some(i);
    }
    Ok(())
}

/// Swaps at every marked position where `x` reads `u` (or `v`, two-way).
/// Also returns the number of positions changed.
pub fn apply_swap(x: &[Symbol], s: &[bool], sm: &SwapMap) -> Result<(Vec<Symbol>, usize)> {
    let m = sm.len();
    check_marks(x, s, m)?;
    let mut out = x.to_vec();
    let mut swaps = 0;
    for i in (0..x.len().saturating_sub(m - 1)).filter(|&i| s[i]) {
        let w = &x[i..i + m];
        if w == sm.u.as_slice() {
            out[i..i + m].copy_from_slice(&sm.v);
            swaps += 1;
        } else if sm.both_ways && w == sm.v.as_slice() {
            out[i..i + m].copy_from_slice(&sm.u);
            swaps += 1;
        }
    }
    Ok((out, swaps))
}

/// Undoes [`apply_swap`] when `x` had no `v` at a marked position (always,
/// for a two-way swap).
pub fn unswap(y: &[Symbol], s: &[bool], sm: &SwapMap) -> Result<Vec<Symbol>> {
    Ok(apply_swap(y, s, &sm.inverse())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::e1;

    #[test]
    fn swap_examples() {
        let (x, pi, _) = e1();
        let w = |s: &str| x.parse_word(s).unwrap();
        let sm = SwapMap::new(&x, &pi, &w("aaa"), &w("aba"), false).unwrap();
        let base = w("aaaaa").symbols;
        let marks = [false, true, false, false, false];
        let (out, n) = apply_swap(&base, &marks, &sm).unwrap();
        assert_eq!((x.format_word(&out), n), ("aabaa".to_string(), 1));
        assert_eq!(unswap(&out, &marks, &sm).unwrap(), base);
        assert_eq!(apply_swap(&base, &[false; 5], &sm).unwrap().0, base);
        let ccc = w("acaca").symbols;
        assert_eq!(apply_swap(&ccc, &marks, &sm).unwrap().0, ccc);
        assert!(apply_swap(&base, &[true, true, false, false, false], &sm).is_err());
        assert!(SwapMap::new(&x, &pi, &w("aaa"), &w("aca"), false).is_err());
        assert!(SwapMap::new(&x, &pi, &w("aaa"), &w("aba"), true).is_err());
        let two = SwapMap::new(&x, &pi, &w("cac"), &w("cbc"), true).unwrap();
        let y = w("cacacbc").symbols;
        let m = [true, false, false, false, true, false, false];
        let (z, n) = apply_swap(&y, &m, &two).unwrap();
        assert_eq!((x.format_word(&z), n), ("cbcacac".to_string(), 2));
        assert_eq!(unswap(&z, &m, &two).unwrap(), y);
    }
}
