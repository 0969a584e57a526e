use super::entropy::empirical_entropy;
use super::marker::marker_from_omega;
use super::swap::{apply_swap, SwapMap};
use crate::error::{invalid, Error, Result};
use crate::par::Execution;
use crate::rng::{experiment, stream};
use crate::shift::{ShiftSpace, Symbol};
use crate::stats::Estimate;
use crate::thermo::{MarkovMeasure, Potential};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffConfig {
    /// Marker probabilities in `[0, 1)`.
    pub p_grid: Vec<f64>,
    /// Symbols per sample path.
    pub length: usize,
    /// Independent replicates per `p`.
    pub replicates: usize,
    pub seed: u64,
    /// Conditioning depth for the reported entropy gain; depth 1 is always
    /// reported alongside.
    pub k: usize,
    /// Confidence multiplier for the sign and monotonicity verdicts.
    pub sigmas: f64,
}

/// One `(p, replicate)` measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub p: f64,
    pub replicate: usize,
    pub swaps: usize,
    pub entropy_gain: f64,
    pub entropy_gain_k1: f64,
    /// `|A_N f(x) - A_N f(x̄)|`.
    pub integral_change: f64,
    /// `entropy_gain / integral_change`; NaN when nothing changed.
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointSummary {
    pub p: f64,
    pub entropy_gain: Estimate,
    pub entropy_gain_k1: Estimate,
    pub integral_change: Estimate,
    pub ratio: Estimate,
    pub mean_swaps: f64,
}

/// Least-squares constants for `gain ≈ c1 · p log(1/p)` and
/// `change ≈ c2 · p`. Diagnostic only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffFit {
    pub c1: f64,
    pub c2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffReport {
    pub config: TradeoffConfig,
    pub points: Vec<PointSummary>,
    pub fit: TradeoffFit,
    /// Every `p > 0` has a gain more than `sigmas` standard errors above 0.
    pub gains_positive: bool,
    /// Going down the grid, each ratio exceeds the previous one by more than
    /// `sigmas` combined standard errors.
    pub ratio_increasing: bool,
    pub rows: Vec<TradeoffRow>,
}

impl TradeoffReport {
    pub fn pass(&self) -> bool {
        self.gains_positive && self.ratio_increasing
    }

    /// One row per `(p, replicate)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,replicate,swaps,entropy_gain,entropy_gain_k1,integral_change,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.p, r.replicate, r.swaps, r.entropy_gain, r.entropy_gain_k1, r.integral_change, r.ratio
            ));
        }
        out
    }
}

/// `(1/M) Σ_i f(x_{i+offset} ..)` over the `M` positions whose window fits.
pub fn ergodic_average(f: &Potential, x: &[Symbol]) -> f64 {
    let r = f.range();
    if x.len() < r {
        return f64::NAN;
    }
    let windows = x.len() - r + 1;
    x.windows(r).map(|w| f.value(w)).sum::<f64>() / windows as f64
}

/// Perturbs samples of `base` by marked `u → v` swaps at each `p` and
/// compares the entropy gained with the change in the average of `f`.
/// All `p` share the same base path and the same uniforms behind the
/// marker bits within a replicate.
pub fn tradeoff_experiment(
    space: &ShiftSpace,
    base: &MarkovMeasure,
    sm: &SwapMap,
    f: &Potential,
    config: &TradeoffConfig,
    exec: Execution,
) -> Result<TradeoffReport> {
    if config.p_grid.is_empty() || config.p_grid.iter().any(|p| !(0.0..1.0).contains(p)) {
        return invalid("p grid must be nonempty with values in [0, 1)");
    }
    if config.replicates < 2 {
        return invalid("at least 2 replicates are needed for error bars");
    }
    if config.k == 0 {
        return invalid("conditioning depth must be at least 1");
    }
    if base.alphabet() != space.len() || f.alphabet() != space.len() {
        return invalid("alphabet mismatch between space, base measure and potential");
    }
    if config.length < 10 * sm.len().max(f.range()) {
        return invalid("sample length too short");
    }
    let gap = sm.len();
    let per_rep = exec.map_range(config.replicates, |r| -> Result<Vec<TradeoffRow>> {
        let x = base.sample(config.length, &mut stream(config.seed, experiment::TRADEOFF_BASE, r as u64));
        if !x.windows(gap).any(|w| w == sm.u.as_slice()) {
            return Err(Error::DegenerateExperiment(format!("replicate {r} never visits u")));
        }
        let mut rng = stream(config.seed, experiment::TRADEOFF_MARKER, r as u64);
        let uniforms: Vec<f64> = (0..config.length + gap - 1).map(|_| rng.random()).collect();
        let h = empirical_entropy(std::slice::from_ref(&x), config.k, space.len())?.estimate;
        let h1 = empirical_entropy(std::slice::from_ref(&x), 1, space.len())?.estimate;
        let a = ergodic_average(f, &x);
        config
            .p_grid
            .iter()
            .map(|&p| {
                let omega: Vec<bool> = uniforms.iter().map(|&u| u < p).collect();
                let s = marker_from_omega(&omega, gap);
                let (y, swaps) = apply_swap(&x, &s, sm)?;
                let (gain, gain1, change) = if swaps == 0 {
                    (0.0, 0.0, 0.0)
                } else {
                    let slice = std::slice::from_ref(&y);
                    (
                        empirical_entropy(slice, config.k, space.len())?.estimate - h,
                        empirical_entropy(slice, 1, space.len())?.estimate - h1,
                        (a - ergodic_average(f, &y)).abs(),
                    )
                };
                let ratio = if change > 0.0 { gain / change } else { f64::NAN };
                Ok(TradeoffRow {
                    p,
                    replicate: r,
                    swaps,
                    entropy_gain: gain,
                    entropy_gain_k1: gain1,
                    integral_change: change,
                    ratio,
                })
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_rep {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| b.p.total_cmp(&a.p).then(a.replicate.cmp(&b.replicate)));

    let mut grid = config.p_grid.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    let points: Vec<PointSummary> = grid
        .iter()
        .map(|&p| {
            let at: Vec<&TradeoffRow> = rows.iter().filter(|r| r.p == p).collect();
            let col = |g: fn(&TradeoffRow) -> f64| Estimate::of(&at.iter().map(|r| g(r)).collect::<Vec<_>>());
            let ratios: Vec<f64> = at.iter().map(|r| r.ratio).filter(|x| x.is_finite()).collect();
            PointSummary {
                p,
                entropy_gain: col(|r| r.entropy_gain),
                entropy_gain_k1: col(|r| r.entropy_gain_k1),
                integral_change: col(|r| r.integral_change),
                ratio: Estimate::of(&ratios),
                mean_swaps: col(|r| r.swaps as f64).mean,
            }
        })
        .collect();

    let positive: Vec<&PointSummary> = points.iter().filter(|s| s.p > 0.0).collect();
    let gains_positive =
        positive.iter().all(|s| s.entropy_gain.mean > config.sigmas * s.entropy_gain.stderr && s.entropy_gain.mean > 0.0);
    let ratio_increasing = positive.windows(2).all(|w| {
        let d = w[1].ratio.minus(&w[0].ratio);
        d.mean > config.sigmas * d.stderr
    });
    let (mut g_num, mut g_den, mut c_num, mut c_den) = (0.0, 0.0, 0.0, 0.0);
    for s in &positive {
        let z = s.p * (1.0 / s.p).ln();
        g_num += s.entropy_gain.mean * z;
        g_den += z * z;
        c_num += s.integral_change.mean * s.p;
        c_den += s.p * s.p;
    }
    let fit = TradeoffFit { c1: g_num / g_den, c2: c_num / c_den };
    Ok(TradeoffReport { config: config.clone(), points, fit, gains_positive, ratio_increasing, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::e1;
    use crate::thermo::dini_potential;

    fn setup() -> (ShiftSpace, MarkovMeasure, SwapMap, Potential) {
        let (x, pi, ord) = e1();
        let w = |s: &str| x.parse_word(s).unwrap();
        let sm = SwapMap::new(&x, &pi, &w("aaa"), &w("aba"), false).unwrap();
        let base = MarkovMeasure::iid(&x, &[0.5, 0.0, 0.5]).unwrap();
        let f = dini_potential(&x, &pi, &ord, 4.0, 2).unwrap();
        (x, base, sm, f)
    }

    #[test]
    fn zero_p_changes_nothing() {
        let (x, base, sm, f) = setup();
        let cfg = TradeoffConfig { p_grid: vec![0.0, 0.1], length: 20_000, replicates: 3, seed: 1, k: 2, sigmas: 3.0 };
        let r = tradeoff_experiment(&x, &base, &sm, &f, &cfg, Execution::Sequential).unwrap();
        let zero = r.points.iter().find(|s| s.p == 0.0).unwrap();
        assert_eq!((zero.entropy_gain.mean, zero.integral_change.mean), (0.0, 0.0));
        assert!(r.points[0].entropy_gain.mean > 0.0);
        let par = tradeoff_experiment(&x, &base, &sm, &f, &cfg, Execution::Parallel).unwrap();
        assert_eq!(format!("{r:?}"), format!("{par:?}"));
        assert!(r.to_csv().lines().count() == 7);
    }

    #[test]
    fn base_without_u() {
        let (x, _, sm, f) = setup();
        let only_c = MarkovMeasure::iid(&x, &[0.0, 0.0, 1.0]).unwrap();
        let cfg = TradeoffConfig { p_grid: vec![0.1], length: 1000, replicates: 2, seed: 1, k: 2, sigmas: 3.0 };
        assert!(matches!(
            tradeoff_experiment(&x, &only_c, &sm, &f, &cfg, Execution::Sequential),
            Err(Error::DegenerateExperiment(_))
        ));
    }

    #[test]
    fn averages() {
        let f = Potential::per_symbol(vec![0.0, 1.0]).unwrap();
        assert_eq!(ergodic_average(&f, &[0, 1, 1, 0]), 0.5);
    }
}
