use super::mpw::{class_members, mpw_forbidden, MpwOrder};
use crate::error::{invalid, Error, Result};
use crate::shift::{FactorCode, ShiftSpace, Symbol, Word};
use serde::Serialize;
use std::collections::BTreeSet;

/// A finite-type approximation of a subshift `Z ⊂ X`: the points of `base`
/// avoiding every word in `forbidden`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubshiftApprox {
    base: ShiftSpace,
    forbidden: Vec<Vec<Symbol>>,
}

impl SubshiftApprox {
    /// Every forbidden word must be nonempty and allowed in `base`.
    pub fn new(base: ShiftSpace, forbidden: Vec<Word>) -> Result<Self> {
        let mut list = Vec::with_capacity(forbidden.len());
        for w in forbidden {
            if w.is_empty() {
                return invalid("forbidden word is empty");
            }
            if !base.is_allowed(&w.symbols) {
                return invalid(format!(
                    "forbidden word `{}` is already excluded by the base space",
                    base.format_word(&w.symbols)
                ));
            }
            list.push(w.symbols);
        }
        Ok(SubshiftApprox { base, forbidden: list })
    }

    /// The length-`max_len` approximation of the MPW subshift.
    pub fn mpw(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, max_len: usize) -> Result<Self> {
        Self::new(space.clone(), mpw_forbidden(space, code, order, max_len)?)
    }

    pub fn base(&self) -> &ShiftSpace {
        &self.base
    }

    pub fn forbidden(&self) -> &[Vec<Symbol>] {
        &self.forbidden
    }

    pub fn is_proper(&self) -> bool {
        !self.forbidden.is_empty()
    }

    /// Allowed in the base and free of forbidden subwords.
    pub fn admits(&self, w: &[Symbol]) -> bool {
        self.base.is_allowed(w) && !self.forbidden.iter().any(|f| contains(w, f))
    }

    /// Words of length `n` admitted by the approximation, lexicographic.
    pub fn words(&self, n: usize) -> Vec<Vec<Symbol>> {
        let mut out = Vec::new();
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut stack = Vec::with_capacity(n);
        for s in 0..self.base.len() {
            stack.push(s);
            self.grow(&mut stack, n, &mut out);
            stack.pop();
        }
        out
    }

    fn grow(&self, stack: &mut Vec<Symbol>, n: usize, out: &mut Vec<Vec<Symbol>>) {
        if self.forbidden.iter().any(|f| ends_with(stack, f)) {
            return;
        }
        if stack.len() == n {
            out.push(stack.clone());
            return;
        }
        let last = *stack.last().unwrap();
        for &t in self.base.successors(last) {
            stack.push(t);
            self.grow(stack, n, out);
            stack.pop();
        }
    }

    /// Left contexts `s` with `|s| <= max`, such that `s w` is admitted.
    fn left_contexts(&self, w: &[Symbol], max: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..max {
            let mut next = Vec::new();
            for s in &frontier {
                let head = s.first().copied().unwrap_or(w[0]);
                for &p in self.base.predecessors(head) {
                    let mut cand = Vec::with_capacity(s.len() + 1);
                    cand.push(p);
                    cand.extend_from_slice(s);
                    let mut full = cand.clone();
                    full.extend_from_slice(w);
                    if !self.forbidden.iter().any(|f| full.starts_with(f)) {
                        next.push(cand);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    fn right_contexts(&self, w: &[Symbol], max: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..max {
            let mut next = Vec::new();
            for t in &frontier {
                let tail = t.last().copied().unwrap_or(w[w.len() - 1]);
                for &q in self.base.successors(tail) {
                    let mut cand = t.clone();
                    cand.push(q);
                    let mut full = w.to_vec();
                    full.extend_from_slice(&cand);
                    if !self.forbidden.iter().any(|f| ends_with(&full, f)) {
                        next.push(cand);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Admitted and extendable by `depth` symbols on both sides.
    fn in_language(&self, w: &[Symbol], depth: usize) -> bool {
        if !self.admits(w) {
            return false;
        }
        let left = self.left_contexts(w, depth);
        let right = self.right_contexts(w, depth);
        left.iter().filter(|s| s.len() == depth).any(|s| {
            right.iter().filter(|t| t.len() == depth).any(|t| {
                let mut full = s.clone();
                full.extend_from_slice(w);
                full.extend_from_slice(t);
                self.admits(&full)
            })
        })
    }
}

fn contains(w: &[Symbol], f: &[Symbol]) -> bool {
    f.len() <= w.len() && w.windows(f.len()).any(|x| x == f)
}

fn ends_with(w: &[Symbol], f: &[Symbol]) -> bool {
    w.len() >= f.len() && &w[w.len() - f.len()..] == f
}

fn occurrences(w: &[Symbol], f: &[Symbol]) -> usize {
    if f.len() > w.len() {
        return 0;
    }
    w.windows(f.len()).filter(|x| *x == f).count()
}

/// Words `u` (in `Z`) and `v` (not in `Z`) with equal image and endpoints,
/// such that `v` occurs exactly once in `s v t` whenever `s u t` is in `Z`.
/// That last condition was checked for contexts up to `verified_length`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapPair {
    pub u: Vec<Symbol>,
    pub v: Vec<Symbol>,
    pub verified_length: usize,
}

impl SwapPair {
    pub fn u_word(&self) -> Word {
        Word::new(self.u.clone())
    }

    pub fn v_word(&self) -> Word {
        Word::new(self.v.clone())
    }
}

/// Shortest swap pair with `|u| <= max_len`, with the uniqueness condition
/// checked exhaustively for contexts of length at most `context_len`.
///
/// `None` means only that nothing was found within `max_len`.
pub fn find_swap_pair(
    space: &ShiftSpace,
    code: &FactorCode,
    z: &SubshiftApprox,
    max_len: usize,
    context_len: usize,
) -> Result<Option<SwapPair>> {
    if z.base() != space {
        return invalid("approximation is not built on this space");
    }
    if !z.is_proper() {
        return Err(Error::PreconditionViolation("subshift forbids no allowed word".into()));
    }
    for n in 1..=context_len.max(1) {
        let want: BTreeSet<Vec<Symbol>> =
            space.words(n).iter().map(|w| code.apply_symbols(w).unwrap()).collect();
        let got: BTreeSet<Vec<Symbol>> =
            z.words(n).iter().map(|w| code.apply_symbols(w).unwrap()).collect();
        if want != got {
            return Err(Error::PreconditionViolation(format!(
                "image of the subshift misses words of length {n}"
            )));
        }
    }
    for n in 3..=max_len {
        for u in z.words(n) {
            if !z.in_language(&u, context_len) {
                continue;
            }
            let image = code.apply_symbols(&u)?;
            for v in class_members(space, code, u[0], u[n - 1], &image) {
                if v == u || z.admits(&v) {
                    continue;
                }
                if unique_in_contexts(z, &u, &v, context_len) {
                    return Ok(Some(SwapPair { u, v, verified_length: context_len }));
                }
            }
        }
    }
    Ok(None)
}

fn unique_in_contexts(z: &SubshiftApprox, u: &[Symbol], v: &[Symbol], depth: usize) -> bool {
    let left = z.left_contexts(u, depth);
    let right = z.right_contexts(u, depth);
    for s in &left {
        for t in &right {
            let mut sut = s.clone();
            sut.extend_from_slice(u);
            sut.extend_from_slice(t);
            if !z.admits(&sut) {
                continue;
            }
            let mut svt = s.clone();
            svt.extend_from_slice(v);
            svt.extend_from_slice(t);
            if occurrences(&svt, v) != 1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::e1;

    #[test]
    fn forbid_b_gives_aaa_aba() {
        let (x, pi, _) = e1();
        let z = SubshiftApprox::new(x.clone(), vec![x.parse_word("b").unwrap()]).unwrap();
        let sp = find_swap_pair(&x, &pi, &z, 5, 4).unwrap().unwrap();
        assert_eq!(x.format_word(&sp.u), "aaa");
        assert_eq!(x.format_word(&sp.v), "aba");
        assert_eq!(sp.verified_length, 4);
    }

    #[test]
    fn forbid_a_gives_bbb_bab() {
        let (x, pi, _) = e1();
        let z = SubshiftApprox::new(x.clone(), vec![x.parse_word("a").unwrap()]).unwrap();
        let sp = find_swap_pair(&x, &pi, &z, 5, 4).unwrap().unwrap();
        assert_eq!(x.format_word(&sp.u), "bbb");
        assert_eq!(x.format_word(&sp.v), "bab");
    }

    #[test]
    fn whole_space_is_not_proper() {
        let (x, pi, _) = e1();
        let z = SubshiftApprox::new(x.clone(), vec![]).unwrap();
        assert!(matches!(
            find_swap_pair(&x, &pi, &z, 5, 3),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn image_must_be_preserved() {
        let (x, pi, _) = e1();
        let z = SubshiftApprox::new(x.clone(), vec![x.parse_word("c").unwrap()]).unwrap();
        assert!(matches!(
            find_swap_pair(&x, &pi, &z, 5, 3),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn mpw_approximation_admits_only_minimal_words() {
        let (x, pi, ord) = e1();
        let z = SubshiftApprox::mpw(&x, &pi, &ord, 4).unwrap();
        for w in z.words(5) {
            assert!(w[1..4].iter().all(|&s| s != 1), "interior b in {w:?}");
        }
    }
}
