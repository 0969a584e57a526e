use super::potential::Potential;
use crate::error::{invalid, Error, Result};
use crate::shift::{FactorCode, ShiftSpace, Symbol};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;

/// Tolerance on row sums and stationarity.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A stationary Markov chain on `block`-words of a shift space.
///
/// State `i` is the word `states[i]`; the chain sits on `x_t .. x_{t+block-1}`
/// at time `t`, so transitions only join overlapping blocks and the emitted
/// symbol is the first one of the block. With `block == 1` this is an
/// ordinary 1-step chain on symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure {
    alphabet: usize,
    block: usize,
    states: Vec<Vec<Symbol>>,
    rows: Vec<Vec<(usize, f64)>>,
    stationary: Vec<f64>,
    index: HashMap<Vec<Symbol>, usize>,
}

impl MarkovMeasure {
    /// A 1-step chain from a dense `|A| × |A|` transition matrix.
    pub fn from_matrix(space: &ShiftSpace, p: &[Vec<f64>]) -> Result<Self> {
        let k = space.len();
        if p.len() != k || p.iter().any(|r| r.len() != k) {
            return invalid(format!("transition matrix must be {k}×{k}"));
        }
        let mut rows = Vec::with_capacity(k);
        for (i, r) in p.iter().enumerate() {
            let mut row = Vec::new();
            for (j, &v) in r.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return invalid(format!("entry ({i}, {j}) is not a probability"));
                }
                if v > 0.0 {
                    if !space.allows(i, j) {
                        return invalid(format!(
                            "positive probability on forbidden transition {}{}",
                            space.name(i),
                            space.name(j)
                        ));
                    }
                    row.push((j, v));
                }
            }
            rows.push(row);
        }
        let states = (0..k).map(|s| vec![s]).collect();
        let stationary = stationary_vector(&rows)?;
        Self::from_parts(k, 1, states, rows, stationary)
    }

    /// i.i.d. symbols with the given marginal; every pair of symbols with
    /// positive mass must be an allowed transition.
    pub fn iid(space: &ShiftSpace, probs: &[f64]) -> Result<Self> {
        if probs.len() != space.len() {
            return invalid("one probability per symbol required");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL || probs.iter().any(|&p| !(p >= 0.0)) {
            return invalid("probabilities must be nonnegative and sum to 1");
        }
        let p: Vec<Vec<f64>> = (0..space.len()).map(|_| probs.to_vec()).collect();
        let mut m = Self::from_matrix(space, &p)?;
        m.stationary = probs.to_vec();
        Ok(m)
    }

    /// A chain with independent uniform weights on allowed transitions.
    pub fn random(space: &ShiftSpace, rng: &mut impl Rng) -> Self {
        let k = space.len();
        let p: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let w: Vec<f64> = (0..k)
                    .map(|j| if space.allows(i, j) { rng.random::<f64>() + 1e-3 } else { 0.0 })
                    .collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect();
        Self::from_matrix(space, &p).expect("random chain is valid")
    }

    pub(crate) fn from_parts(
        alphabet: usize,
        block: usize,
        states: Vec<Vec<Symbol>>,
        rows: Vec<Vec<(usize, f64)>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let m = MarkovMeasure { alphabet, block, states, rows, stationary, index };
        m.validate()?;
        Ok(m)
    }

    /// Checks row sums, stationarity and block compatibility.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.rows.len() != n || self.stationary.len() != n {
            return invalid("inconsistent chain dimensions");
        }
        for (i, row) in self.rows.iter().enumerate() {
            let s: f64 = row.iter().map(|e| e.1).sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return invalid(format!("row {i} sums to {s}"));
            }
            for &(j, _) in row {
                if self.states[i][1..] != self.states[j][..self.block - 1] {
                    return invalid(format!("transition {i} -> {j} joins non-overlapping blocks"));
                }
            }
        }
        let total: f64 = self.stationary.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL || self.stationary.iter().any(|&p| p < 0.0) {
            return invalid("stationary vector is not a probability vector");
        }
        let mut next = vec![0.0; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                next[j] += self.stationary[i] * p;
            }
        }
        if next.iter().zip(&self.stationary).any(|(a, b)| (a - b).abs() > STOCHASTIC_TOL) {
            return invalid("stationary vector is not invariant");
        }
        Ok(())
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn states(&self) -> &[Vec<Symbol>] {
        &self.states
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Transition probability between two states.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    /// Dense transition matrix (only sensible for small chains).
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.states.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                m[i][j] = p;
            }
        }
        m
    }

    /// `μ([w]_0)`.
    pub fn word_probability(&self, w: &[Symbol]) -> f64 {
        if w.len() <= self.block {
            return self
                .states
                .iter()
                .zip(&self.stationary)
                .filter(|(s, _)| s.starts_with(w))
                .map(|(_, p)| p)
                .sum();
        }
        let Some(&start) = self.index.get(&w[..self.block]) else {
            return 0.0;
        };
        let mut p = self.stationary[start];
        let mut cur = start;
        for i in 1..=w.len() - self.block {
            let Some(&next) = self.index.get(&w[i..i + self.block]) else {
                return 0.0;
            };
            p *= self.transition(cur, next);
            cur = next;
        }
        p
    }

    /// Every word of length `len` with positive mass, with its mass.
    pub fn word_measures(&self, len: usize) -> Vec<(Vec<Symbol>, f64)> {
        if len <= self.block {
            let mut acc: HashMap<Vec<Symbol>, f64> = HashMap::new();
            for (s, &p) in self.states.iter().zip(&self.stationary) {
                if p > 0.0 {
                    *acc.entry(s[..len].to_vec()).or_default() += p;
                }
            }
            let mut out: Vec<_> = acc.into_iter().collect();
            out.sort_by(|a, b| a.0.cmp(&b.0));
            return out;
        }
        let mut out = Vec::new();
        for (s, &p) in self.stationary.iter().enumerate() {
            if p > 0.0 {
                let mut word = self.states[s].clone();
                self.extend(s, p, len, &mut word, &mut out);
            }
        }
        out
    }

    fn extend(&self, s: usize, p: f64, len: usize, word: &mut Vec<Symbol>, out: &mut Vec<(Vec<Symbol>, f64)>) {
        if word.len() == len {
            out.push((word.clone(), p));
            return;
        }
        for &(t, q) in &self.rows[s] {
            if q > 0.0 {
                word.push(*self.states[t].last().unwrap());
                self.extend(t, p * q, len, word, out);
                word.pop();
            }
        }
    }

    /// `∫ f dμ = Σ_w μ(w) f(w)` over words of the potential's range.
    pub fn integral(&self, f: &Potential) -> Result<f64> {
        if f.alphabet() != self.alphabet {
            return invalid("potential and measure use different alphabets");
        }
        let mut total = 0.0;
        for (w, p) in self.word_measures(f.range()) {
            let v = f.value(&w);
            if v.is_nan() {
                return invalid(format!("potential undefined on a word of positive measure: {w:?}"));
            }
            total += p * v;
        }
        Ok(total)
    }

    /// `-Σ_i π_i Σ_j P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (row, &pi) in self.rows.iter().zip(&self.stationary) {
            if pi > 0.0 {
                h -= pi * row.iter().filter(|e| e.1 > 0.0).map(|e| e.1 * e.1.ln()).sum::<f64>();
            }
        }
        h
    }

    /// A stationary sample path of `len` symbols.
    pub fn sample(&self, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return out;
        }
        let mut s = pick(self.stationary.iter().copied().enumerate(), rng);
        out.push(self.states[s][0]);
        while out.len() < len {
            s = pick(self.rows[s].iter().copied(), rng);
            out.push(self.states[s][0]);
        }
        out
    }
}

fn pick(weights: impl Iterator<Item = (usize, f64)> + Clone, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Stationary vector of a row-stochastic matrix: direct solve for small
/// chains, lazy power iteration otherwise.
fn stationary_vector(rows: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let n = rows.len();
    if n <= 400 {
        if let Some(v) = solve_stationary(rows) {
            return Ok(v);
        }
    }
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let mut next: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
        for (i, row) in rows.iter().enumerate() {
            for &(j, p) in row {
                next[j] += 0.5 * v[i] * p;
            }
        }
        let diff: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if diff < 1e-15 {
            return Ok(v);
        }
    }
    Err(Error::PreconditionViolation("stationary vector did not converge".into()))
}

/// Solves `π (P - I) = 0`, `Σ π = 1` by Gaussian elimination.
fn solve_stationary(rows: &[Vec<(usize, f64)>]) -> Option<Vec<f64>> {
    let n = rows.len();
    // a[j][i] = P_ij - δ_ij; last equation replaced by normalisation.
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, p) in row {
            a[j][i] += p;
        }
        a[i][i] -= 1.0;
    }
    for c in a[n - 1].iter_mut() {
        *c = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| (a[i][n] / a[i][i]).max(0.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    Some(v)
}

/// Bounds on the entropy of the image process `ν = μ ∘ π⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
}

/// `upper = H(Y_0 | Y_{-n..-1})`, `lower = H(Y_0 | Y_{-n..-1}, S_{-n-1})`
/// where `S` is the hidden chain state. Both converge to `h(ν)`.
pub fn pushforward_entropy_bracket(m: &MarkovMeasure, code: &FactorCode, n: usize) -> Result<EntropyBracket> {
    if n == 0 {
        return invalid("conditioning depth must be at least 1");
    }
    if code.domain_len() != m.alphabet() {
        return invalid("code domain does not match the measure's alphabet");
    }
    let emit: Vec<Symbol> = m.states().iter().map(|s| code.label(s[0])).collect();
    let walker = ImageWalker { m, emit: &emit, labels: code.label_count() };

    let mut joint = [0.0; 2];
    walker.walk(m.stationary().to_vec(), n + 1, &mut joint);
    let upper = joint[1] - joint[0];

    let mut cond = [0.0; 2];
    for (s0, &p0) in m.stationary().iter().enumerate() {
        if p0 <= 0.0 {
            continue;
        }
        let mut alpha = vec![0.0; m.states().len()];
        for &(t, q) in &m.rows()[s0] {
            alpha[t] += p0 * q;
        }
        walker.walk(alpha, n + 1, &mut cond);
    }
    let lower = cond[1] - cond[0];
    Ok(EntropyBracket { lower, upper })
}

struct ImageWalker<'a> {
    m: &'a MarkovMeasure,
    emit: &'a [Symbol],
    labels: usize,
}

impl ImageWalker<'_> {
    /// Adds `-Σ p log p` over label words of length `depth - 1` and `depth`
    /// into `acc[0]` and `acc[1]`, where `start` is the (unnormalised) law
    /// of the state emitting the first label.
    fn walk(&self, start: Vec<f64>, depth: usize, acc: &mut [f64; 2]) {
        for y in 0..self.labels {
            let alpha: Vec<f64> =
                start.iter().enumerate().map(|(s, &p)| if self.emit[s] == y { p } else { 0.0 }).collect();
            self.descend(alpha, 1, depth, acc);
        }
    }

    fn descend(&self, alpha: Vec<f64>, level: usize, depth: usize, acc: &mut [f64; 2]) {
        let p: f64 = alpha.iter().sum();
        if p <= 0.0 {
            return;
        }
        if level + 1 >= depth {
            acc[level + 1 - depth] -= p * p.ln();
        }
        if level == depth {
            return;
        }
        let n = alpha.len();
        let mut next = vec![vec![0.0; n]; self.labels];
        for (s, &a) in alpha.iter().enumerate() {
            if a > 0.0 {
                for &(t, q) in &self.m.rows()[s] {
                    next[self.emit[t]][t] += a * q;
                }
            }
        }
        for branch in next {
            self.descend(branch, level + 1, depth, acc);
        }
    }
}

/// `[h(μ) - upper, h(μ) - lower]`, a bracket on `h(μ | μ ∘ π⁻¹)`.
pub fn relative_entropy_bracket(m: &MarkovMeasure, code: &FactorCode, n: usize) -> Result<EntropyBracket> {
    let b = pushforward_entropy_bracket(m, code, n)?;
    let h = m.entropy();
    Ok(EntropyBracket { lower: h - b.upper, upper: h - b.lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{e1, golden_mean};
    use rand::SeedableRng;

    fn h(ps: &[f64]) -> f64 {
        -ps.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
    }

    #[test]
    fn iid_entropy_and_words() {
        let x = ShiftSpace::full(&["0", "1"]).unwrap();
        let m = MarkovMeasure::iid(&x, &[0.5, 0.5]).unwrap();
        assert!((m.entropy() - 2f64.ln()).abs() < 1e-15);
        assert!((m.word_probability(&[1, 0, 1]) - 0.125).abs() < 1e-15);
        let total: f64 = m.word_measures(4).iter().map(|e| e.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let x = ShiftSpace::full(&["0", "1"]).unwrap();
        let m = MarkovMeasure::from_matrix(&x, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.stationary(), &[1.0, 0.0]);
        assert_eq!(m.entropy(), 0.0);
    }

    #[test]
    fn forbidden_mass_is_rejected() {
        let g = golden_mean();
        assert!(MarkovMeasure::from_matrix(&g, &[vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(MarkovMeasure::from_matrix(&g, &[vec![0.5, 0.4], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn uniform_brackets_are_exact() {
        let (x, pi, _) = e1();
        let m = MarkovMeasure::iid(&x, &[1.0 / 3.0; 3]).unwrap();
        for n in [1, 4, 8] {
            let b = pushforward_entropy_bracket(&m, &pi, n).unwrap();
            let want = h(&[2.0 / 3.0, 1.0 / 3.0]);
            assert!((b.lower - want).abs() < 1e-12 && (b.upper - want).abs() < 1e-12, "{b:?}");
            let r = relative_entropy_bracket(&m, &pi, n).unwrap();
            assert!((r.lower - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_bracket_collapses() {
        let x = golden_mean();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = MarkovMeasure::random(&x, &mut rng);
        let b = pushforward_entropy_bracket(&m, &FactorCode::identity(&x), 1).unwrap();
        assert!((b.lower - m.entropy()).abs() < 1e-12);
        assert!((b.upper - m.entropy()).abs() < 1e-12);
    }

    #[test]
    fn bracket_narrows() {
        let (x, pi, _) = e1();
        let m = MarkovMeasure::from_matrix(
            &x,
            &[vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6], vec![0.3, 0.5, 0.2]],
        )
        .unwrap();
        let mut prev = pushforward_entropy_bracket(&m, &pi, 1).unwrap();
        for n in 2..=10 {
            let b = pushforward_entropy_bracket(&m, &pi, n).unwrap();
            assert!(b.lower <= b.upper + 1e-12);
            assert!(b.upper <= prev.upper + 1e-12 && b.lower >= prev.lower - 1e-12);
            prev = b;
        }
        assert!(prev.upper - prev.lower < 1e-3);
    }

    #[test]
    fn sampling_matches_marginals() {
        let x = ShiftSpace::full(&["0", "1"]).unwrap();
        let m = MarkovMeasure::iid(&x, &[0.25, 0.75]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = m.sample(100_000, &mut rng);
        let ones = s.iter().filter(|&&v| v == 1).count() as f64 / 1e5;
        assert!((ones - 0.75).abs() < 0.01);
    }
}
