//! Diamonds, finite-to-one classification, MPW minimal words, fiber counts
//! and swap-pair search.

mod mpw;
mod swap;

pub use mpw::{
    class_members, is_minimal_scan, is_mpw_minimal, mpw_forbidden, MpwOracle, MpwOrder, TwinFrontier,
};
pub use swap::{find_swap_pair, SubshiftApprox, SwapPair};

use crate::error::{invalid, Error, Result};
use crate::shift::{FactorCode, ShiftSpace, Symbol, Word};
use serde::Serialize;

/// Two distinct words with equal length, endpoints and image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diamond {
    pub u: Word,
    pub v: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    FiniteToOne,
    InfiniteToOne,
}

/// Pair-graph states `(s, t)` with `π(s) = π(t)`, encoded as `s * k + t`.
struct PairGraph<'a> {
    space: &'a ShiftSpace,
    code: &'a FactorCode,
}

impl PairGraph<'_> {
    fn k(&self) -> usize {
        self.space.len()
    }

    /// Successor pairs in lexicographic `(s, t)` order.
    fn successors(&self, p: usize) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        let (s, t) = (p / self.k(), p % self.k());
        self.space.successors(s).iter().flat_map(move |&a| {
            self.space
                .successors(t)
                .iter()
                .filter(move |&&b| self.code.label(a) == self.code.label(b))
                .map(move |&b| (a, b))
        })
    }
}

/// A shortest diamond of length at most `max_len`, or `None`.
///
/// Among shortest diamonds the one whose sequence of symbol pairs
/// `(u_i, v_i)` is lexicographically least (declared order, `u < v`) is
/// returned, so the answer is deterministic.
pub fn find_diamond(space: &ShiftSpace, code: &FactorCode, max_len: usize) -> Result<Option<Diamond>> {
    if max_len < 2 {
        return invalid("max_len must be at least 2");
    }
    if !space.is_irreducible() {
        return Err(Error::RequiresIrreducible);
    }
    let k = space.len();
    let g = PairGraph { space, code };
    let off = |a: Symbol, b: Symbol| a != b;

    // finish[r][p]: from off-diagonal p, r more symbols reach the diagonal
    // with every intermediate pair off the diagonal.
    let mut finish: Vec<Vec<bool>> = vec![vec![false; k * k]];
    for len in 3..=max_len {
        let r = len - 2;
        let prev = &finish[r - 1];
        let mut cur = vec![false; k * k];
        for s in 0..k {
            for t in 0..k {
                if s == t || code.label(s) != code.label(t) {
                    continue;
                }
                cur[s * k + t] = g.successors(s * k + t).any(|(a, b)| {
                    if r == 1 {
                        a == b
                    } else {
                        off(a, b) && prev[a * k + b]
                    }
                });
            }
        }
        finish.push(cur);

        // Start on the diagonal, leave it with u_1 < v_1.
        for a in 0..k {
            let first = g
                .successors(a * k + a)
                .find(|&(s, t)| s < t && finish[r][s * k + t]);
            let Some((s, t)) = first else { continue };
            let mut u = vec![a, s];
            let mut v = vec![a, t];
            let mut p = s * k + t;
            for rem in (1..=r).rev() {
                let (s, t) = g
                    .successors(p)
                    .find(|&(s, t)| if rem == 1 { s == t } else { off(s, t) && finish[rem - 1][s * k + t] })
                    .expect("finish table guarantees a continuation");
                u.push(s);
                v.push(t);
                p = s * k + t;
            }
            return Ok(Some(Diamond { u: Word::new(u), v: Word::new(v) }));
        }
    }
    Ok(None)
}

/// Infinite-to-one iff a diamond exists; searching up to `|A|^2 + 1`
/// symbols is enough since a shortest diamond visits each off-diagonal
/// pair at most once.
pub fn classify_factor(space: &ShiftSpace, code: &FactorCode) -> Result<Classification> {
    let bound = space.len() * space.len() + 1;
    Ok(match find_diamond(space, code, bound.max(3))? {
        Some(_) => Classification::InfiniteToOne,
        None => Classification::FiniteToOne,
    })
}

/// Number of allowed words of `space` mapping onto `y`.
pub fn fiber_count(space: &ShiftSpace, code: &FactorCode, y: &Word) -> Result<u128> {
    check_image_word(code, y)?;
    let Some((&y0, rest)) = y.symbols.split_first() else {
        return Ok(1);
    };
    let mut v = vec![0u128; space.len()];
    for &s in code.preimages(y0) {
        v[s] = 1;
    }
    for &label in rest {
        let mut next = vec![0u128; space.len()];
        for &t in code.preimages(label) {
            let mut acc: u128 = 0;
            for &s in space.predecessors(t) {
                acc = acc.checked_add(v[s]).ok_or(Error::Overflow("fiber words"))?;
            }
            next[t] = acc;
        }
        v = next;
    }
    v.iter()
        .try_fold(0u128, |a, &b| a.checked_add(b))
        .ok_or(Error::Overflow("fiber words"))
}

/// `(1/|y|) log |π⁻¹(y)|`, computed with rescaling so long words do not
/// overflow. Returns `-inf` when `y` has no preimage.
pub fn relative_entropy_profile(space: &ShiftSpace, code: &FactorCode, y: &Word) -> Result<f64> {
    check_image_word(code, y)?;
    if y.is_empty() {
        return invalid("empty word");
    }
    let mut v = vec![0f64; space.len()];
    for &s in code.preimages(y.symbols[0]) {
        v[s] = 1.0;
    }
    let mut log_scale = 0.0;
    for &label in &y.symbols[1..] {
        let mut next = vec![0f64; space.len()];
        for &t in code.preimages(label) {
            next[t] = space.predecessors(t).iter().map(|&s| v[s]).sum();
        }
        let norm: f64 = next.iter().sum();
        if norm == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        next.iter_mut().for_each(|x| *x /= norm);
        log_scale += norm.ln();
        v = next;
    }
    let total: f64 = v.iter().sum();
    Ok((log_scale + total.ln()) / y.len() as f64)
}

fn check_image_word(code: &FactorCode, y: &Word) -> Result<()> {
    match y.symbols.iter().find(|&&l| l >= code.label_count()) {
        Some(l) => invalid(format!("label {l} outside the image alphabet")),
        None => Ok(()),
    }
}
