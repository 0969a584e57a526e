use crate::error::{invalid, Result};
use crate::rng::{experiment, stream};
use crate::stats::Estimate;
use rand::Rng;
use serde::Serialize;

/// Markers pushed forward from i.i.d. Bernoulli(`p`) bits `ω`: `s_i = 1`
/// when `ω_i = 1` and the `gap - 1` bits before it are all 0, so two
/// markers are always at least `gap` apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkerProcess {
    pub p: f64,
    pub gap: usize,
    pub seed: u64,
}

impl MarkerProcess {
    pub fn new(p: f64, gap: usize, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return invalid(format!("marker probability {p} outside (0, 1)"));
        }
        if gap == 0 {
            return invalid("marker gap must be at least 1");
        }
        Ok(MarkerProcess { p, gap, seed })
    }

    /// Replicate `replicate` of the process, `length` symbols long.
    pub fn sample(&self, length: usize, replicate: u64) -> Result<Vec<bool>> {
        sample_marker(self, length, &mut stream(self.seed, experiment::MARKER, replicate))
    }
}

/// Applies the marker rule to `ω`; the first `gap - 1` bits only serve as
/// history, so the output is `gap - 1` shorter.
pub fn marker_from_omega(omega: &[bool], gap: usize) -> Vec<bool> {
    let h = gap.saturating_sub(1);
    if omega.len() <= h {
        return Vec::new();
    }
    let mut zeros_before = 0usize;
    let mut out = Vec::with_capacity(omega.len() - h);
    for (i, &w) in omega.iter().enumerate() {
        if i >= h {
            out.push(w && zeros_before >= h);
        }
        zeros_before = if w { 0 } else { zeros_before + 1 };
    }
    out
}

pub fn sample_marker(mp: &MarkerProcess, length: usize, rng: &mut impl Rng) -> Result<Vec<bool>> {
    if length < mp.gap {
        return invalid(format!("length {length} shorter than the marker gap {}", mp.gap));
    }
    let omega: Vec<bool> = (0..length + mp.gap - 1).map(|_| rng.random::<f64>() < mp.p).collect();
    Ok(marker_from_omega(&omega, mp.gap))
}

/// `P(s_0 = 1) = p (1-p)^{gap-1}`.
pub fn marker_density(p: f64, gap: usize) -> f64 {
    p * (1.0 - p).powi(gap as i32 - 1)
}

/// `P(s_0 ≠ ω_0) = p (1 - (1-p)^{n-1})` under the joining `(ω, ψ(ω))`.
pub fn dbar_exact(p: f64, n: usize) -> f64 {
    p * (1.0 - (1.0 - p).powi(n as i32 - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DbarReport {
    pub p: f64,
    pub n: usize,
    pub samples: usize,
    pub exact: f64,
    pub estimate: f64,
    /// Binomial standard error at the exact mismatch probability.
    pub stderr: f64,
    /// `(n-1) p²`.
    pub quadratic_bound: f64,
    pub within_bound: bool,
    pub agrees: bool,
    pub marker_frequency: Estimate,
    pub marker_exact: f64,
    pub omega_frequency: Estimate,
    pub sigmas: f64,
}

fn binomial(hits: usize, samples: usize, p_null: f64) -> Estimate {
    Estimate {
        mean: hits as f64 / samples as f64,
        stderr: (p_null * (1.0 - p_null) / samples as f64).sqrt(),
        n: samples,
    }
}

fn agrees(e: &Estimate, target: f64, sigmas: f64) -> bool {
    if e.stderr == 0.0 {
        e.mean == target
    } else {
        e.within(target, sigmas)
    }
}

/// Monte Carlo estimate of the mismatch probability of the explicit joining
/// of the marker process with its Bernoulli source. Each sample draws a fresh
/// window of `n` bits, so samples are independent.
pub fn dbar_marker_vs_bernoulli(p: f64, n: usize, samples: usize, seed: u64) -> Result<DbarReport> {
    if !(0.0..1.0).contains(&p) {
        return invalid(format!("p = {p} outside [0, 1)"));
    }
    if n == 0 {
        return invalid("marker gap must be at least 1");
    }
    if samples < 1000 {
        return invalid("at least 1000 samples required");
    }
    const SIGMAS: f64 = 3.0;
    let mut rng = stream(seed, experiment::DBAR, 0);
    let (mut mismatch, mut marks, mut ones) = (0, 0, 0);
    let mut window = vec![false; n];
    for _ in 0..samples {
        window.iter_mut().for_each(|b| *b = rng.random::<f64>() < p);
        let omega = window[n - 1];
        let s = marker_from_omega(&window, n)[0];
        mismatch += usize::from(s != omega);
        marks += usize::from(s);
        ones += usize::from(omega);
    }
    let exact = dbar_exact(p, n);
    let marker_exact = marker_density(p, n);
    let est = binomial(mismatch, samples, exact);
    let marker_frequency = binomial(marks, samples, marker_exact);
    let omega_frequency = binomial(ones, samples, p);
    let quadratic_bound = (n as f64 - 1.0) * p * p;
    Ok(DbarReport {
        p,
        n,
        samples,
        exact,
        estimate: est.mean,
        stderr: est.stderr,
        quadratic_bound,
        within_bound: exact <= quadratic_bound * (1.0 + 1e-12),
        agrees: agrees(&est, exact, SIGMAS)
            && agrees(&marker_frequency, marker_exact, SIGMAS)
            && agrees(&omega_frequency, p, SIGMAS),
        marker_frequency,
        marker_exact,
        omega_frequency,
        sigmas: SIGMAS,
    })
}
