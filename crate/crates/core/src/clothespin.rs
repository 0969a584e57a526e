//! The clothespinning process on finite windows, `n(x)`, pinning counts and
//! induced return statistics.
//!
//! From a pin at `p` the next pin is the least `i > p` such that
//! `x_p .. x_{i+1}` is not MPW-minimal. Windows stand in for points, so every
//! result says whether the window edge cut the computation short.

use crate::error::{invalid, Error, Result};
use crate::factor::{is_minimal_scan, MpwOrder, TwinFrontier};
use crate::rng::{experiment, stream};
use crate::shift::{format_names, FactorCode, ShiftSpace, Symbol, Word};
use crate::stats::Estimate;
use crate::thermo::MarkovMeasure;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Pins of one process run over a window, as positions in the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinSequence {
    #[serde(skip)]
    pub window: Word,
    pub pins: Vec<usize>,
    /// Some continuation of the window would put a pin at its last position.
    pub truncated: bool,
}

/// Result of searching for the pin after `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NextPin {
    At(usize),
    /// No pin inside the window; `truncated` as in [`PinSequence`].
    Open { truncated: bool },
}

#[derive(Clone, Copy, Debug)]
pub struct Pinner<'a> {
    space: &'a ShiftSpace,
    code: &'a FactorCode,
    order: &'a MpwOrder,
}

impl<'a> Pinner<'a> {
    pub fn new(space: &'a ShiftSpace, code: &'a FactorCode, order: &'a MpwOrder) -> Self {
        Pinner { space, code, order }
    }

    /// One step of the process, linear in the distance scanned.
    pub fn next_pin(&self, w: &[Symbol], p: usize) -> NextPin {
        let mut scan = TwinFrontier::new(self.space, self.code, self.order, w[p]);
        for (j, &s) in w.iter().enumerate().skip(p + 1) {
            if scan.push(s) {
                return NextPin::At(j - 1);
            }
        }
        let last = w[w.len() - 1];
        let truncated = self.space.successors(last).iter().any(|&e| scan.would_break(e));
        NextPin::Open { truncated }
    }

    /// Every pin from `start` until the window runs out.
    pub fn pins(&self, w: &[Symbol], start: usize) -> (Vec<usize>, bool) {
        let mut pins = vec![start];
        loop {
            match self.next_pin(w, *pins.last().unwrap()) {
                NextPin::At(i) => pins.push(i),
                NextPin::Open { truncated } => return (pins, truncated),
            }
        }
    }
}

fn check_window(space: &ShiftSpace, w: &Word) -> Result<()> {
    if w.is_empty() {
        return invalid("empty window");
    }
    if !space.is_allowed(&w.symbols) {
        return invalid(format!("window `{}` is not allowed", space.format_word(&w.symbols)));
    }
    Ok(())
}

pub fn pin_process(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    w: &Word,
    start: usize,
) -> Result<PinSequence> {
    check_window(space, w)?;
    if start >= w.len() {
        return invalid(format!("start {start} outside a window of length {}", w.len()));
    }
    let (pins, truncated) = Pinner::new(space, code, order).pins(&w.symbols, start);
    Ok(PinSequence { window: w.clone(), pins, truncated })
}

/// `n(x)` read from a window. When `exact` is false the window edge was
/// reached with every central word minimal, and `value` is a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NValue {
    pub value: usize,
    pub exact: bool,
}

pub fn n_of(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, w: &Word, center: usize) -> Result<NValue> {
    check_window(space, w)?;
    if center >= w.len() {
        return invalid(format!("center {center} outside a window of length {}", w.len()));
    }
    let x = &w.symbols;
    let mut r = 1;
    loop {
        if center < r || center + r >= x.len() {
            return Ok(NValue { value: r - 1, exact: false });
        }
        if !is_minimal_scan(space, code, order, &x[center - r..=center + r]) {
            return Ok(NValue { value: r - 1, exact: true });
        }
        r += 1;
    }
}

/// Distinct pinnings seen in a window: one representative process per
/// rightmost pin, taken from the earliest start producing it. Processes that
/// never leave their start are not counted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pinnings {
    pub representatives: Vec<PinSequence>,
}

impl Pinnings {
    /// At least 1: a window with no pinned process has the single empty class.
    pub fn count(&self) -> usize {
        self.representatives.len().max(1)
    }

    /// 0/1 pin indicators of each representative on the positions from the
    /// latest representative start onwards, one row per representative.
    pub fn patterns(&self, len: usize) -> (usize, Vec<Vec<bool>>) {
        let from = self.representatives.iter().map(|p| p.pins[0]).max().unwrap_or(0);
        let rows = self
            .representatives
            .iter()
            .map(|p| {
                let mut v = vec![false; len - from];
                for &i in p.pins.iter().filter(|&&i| i >= from) {
                    v[i - from] = true;
                }
                v
            })
            .collect();
        (from, rows)
    }
}

pub fn pinnings(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, w: &Word) -> Result<Pinnings> {
    check_window(space, w)?;
    let pinner = Pinner::new(space, code, order);
    let mut by_last: BTreeMap<usize, PinSequence> = BTreeMap::new();
    for start in 0..w.len() {
        let (pins, truncated) = pinner.pins(&w.symbols, start);
        if pins.len() < 2 {
            continue;
        }
        by_last
            .entry(*pins.last().unwrap())
            .or_insert_with(|| PinSequence { window: w.clone(), pins, truncated });
    }
    Ok(Pinnings { representatives: by_last.into_values().collect() })
}

/// Number of distinct pin classes at the right edge of the window.
pub fn count_pinnings(space: &ShiftSpace, code: &FactorCode, order: &MpwOrder, w: &Word) -> Result<usize> {
    Ok(pinnings(space, code, order, w)?.count())
}

/// Number of patterns that read `v` starting at `pos`.
pub fn pattern_count(patterns: &[Vec<bool>], v: &[bool], pos: usize) -> usize {
    patterns.iter().filter(|p| p.get(pos..pos + v.len()) == Some(v)).count()
}

/// Empirical law of consecutive pin pairs: pins `0 < n_1 < n_2` after a pin
/// at `0`, with the symbols `a, b, c` under the three pins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnStatistics {
    pub counts: BTreeMap<(usize, usize, Symbol, Symbol, Symbol), u64>,
    pub total: u64,
    pub pins: usize,
    pub length: usize,
}

impl ReturnStatistics {
    pub fn from_pins(x: &[Symbol], pins: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for t in pins.windows(3) {
            let key = (t[1] - t[0], t[2] - t[0], x[t[0]], x[t[1]], x[t[2]]);
            *counts.entry(key).or_insert(0) += 1;
        }
        let total = counts.values().sum();
        ReturnStatistics { counts, total, pins: pins.len(), length: x.len() }
    }

    /// Adds the counts of an independent sample.
    pub fn merge(&mut self, other: &ReturnStatistics) {
        for (k, v) in &other.counts {
            *self.counts.entry(*k).or_insert(0) += v;
        }
        self.total += other.total;
        self.pins += other.pins;
        self.length += other.length;
    }

    /// Counts of `(n_1, n_2)`.
    pub fn pair_counts(&self) -> BTreeMap<(usize, usize), u64> {
        let mut out = BTreeMap::new();
        for (&(n1, n2, ..), &c) in &self.counts {
            *out.entry((n1, n2)).or_insert(0) += c;
        }
        out
    }

    /// Counts of the second return time `n_2`.
    pub fn second_return_counts(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (&(_, n2, ..), &c) in &self.counts {
            *out.entry(n2).or_insert(0) += c;
        }
        out
    }

    /// Mean first return time `Σ n · p̂(n_1 = n)`.
    pub fn mean_first_return(&self) -> f64 {
        let s: u64 = self.counts.iter().map(|(k, c)| k.0 as u64 * c).sum();
        s as f64 / self.total as f64
    }

    /// Rows `n1,n2,a,b,c,count`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("n1,n2,a,b,c,count\n");
        for (&(n1, n2, a, b, c), &count) in &self.counts {
            let sym = |s: Symbol| format_names(names, &[s]);
            out.push_str(&format!("{n1},{n2},{},{},{},{count}\n", sym(a), sym(b), sym(c)));
        }
        out
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        let rows: Vec<Value> = self
            .counts
            .iter()
            .map(|(&(n1, n2, a, b, c), &count)| {
                let sym = |s: Symbol| format_names(names, &[s]);
                json!({"n1": n1, "n2": n2, "a": sym(a), "b": sym(b), "c": sym(c), "count": count})
            })
            .collect();
        json!({"total": self.total, "pins": self.pins, "length": self.length, "counts": rows})
    }
}

fn pinned_sample(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    sampler: &MarkovMeasure,
    length: usize,
    seed: u64,
    tag: u64,
) -> Result<(Vec<Symbol>, Vec<usize>)> {
    if sampler.alphabet() != space.len() {
        return invalid("sampler alphabet does not match the space");
    }
    if length < 3 {
        return invalid("sample length must be at least 3");
    }
    let x = sampler.sample(length, &mut stream(seed, tag, 0));
    let (pins, _) = Pinner::new(space, code, order).pins(&x, 0);
    if pins.len() < 3 {
        return Err(Error::DegenerateSample(format!(
            "{} pin(s) in a sample of length {length}; the sampler may live on the minimal subshift",
            pins.len()
        )));
    }
    Ok((x, pins))
}

/// Samples a path, pins it from its left edge, and tabulates pin triples.
pub fn return_statistics(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    sampler: &MarkovMeasure,
    length: usize,
    seed: u64,
) -> Result<ReturnStatistics> {
    let (x, pins) = pinned_sample(space, code, order, sampler, length, seed, experiment::RETURNS)?;
    Ok(ReturnStatistics::from_pins(&x, &pins))
}

/// Kac's formula for the pin set: the mean gap between pins against the
/// reciprocal pin density, measured on an independent sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PinKacCheck {
    pub mean_gap: Estimate,
    pub density: Estimate,
    pub inverse_density: f64,
    pub inverse_density_stderr: f64,
    pub sigmas: f64,
    pub pass: bool,
}

pub fn pin_kac_check(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    sampler: &MarkovMeasure,
    length: usize,
    seed: u64,
    sigmas: f64,
) -> Result<PinKacCheck> {
    let (_, pins) = pinned_sample(space, code, order, sampler, length, seed, experiment::RETURNS)?;
    let gaps: Vec<f64> = pins.windows(2).map(|p| (p[1] - p[0]) as f64).collect();
    let mean_gap = Estimate::batched(&gaps, 50);

    let (x, pins) = pinned_sample(space, code, order, sampler, length, seed, experiment::PIN_DENSITY)?;
    let mut marks = vec![0.0; x.len()];
    for &p in &pins {
        marks[p] = 1.0;
    }
    let density = Estimate::batched(&marks, 50);
    let inverse_density = 1.0 / density.mean;
    let inverse_density_stderr = density.stderr / (density.mean * density.mean);
    let pass = (mean_gap.mean - inverse_density).abs() <= sigmas * mean_gap.stderr.hypot(inverse_density_stderr);
    Ok(PinKacCheck { mean_gap, density, inverse_density, inverse_density_stderr, sigmas, pass })
}
