use super::potential::{index_word, table_len, Potential};
use crate::error::{invalid, Result};
use crate::factor::{is_minimal_scan, MpwOrder};
use crate::par::Execution;
use crate::shift::{FactorCode, ShiftSpace};
use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ur};

/// `log(n+2)/(n+2)`: the profile of the compensation function at `n(x) = n`.
pub fn dini_profile(n: usize) -> f64 {
    let m = (n + 2) as f64;
    m.ln() / m
}

/// The function `-t·log(n(x)+2)/(n(x)+2)`, tabulated on windows of radius
/// `radius` around the origin.
///
/// A window whose central words of every radius up to `radius` are minimal
/// gets 0; these are the windows that look like the MPW subshift.
pub fn dini_potential(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    t: f64,
    radius: usize,
) -> Result<Potential> {
    if !(t > 0.0) || !t.is_finite() {
        return invalid("t must be positive");
    }
    if radius == 0 {
        return invalid("radius must be at least 1");
    }
    let k = space.len();
    let range = 2 * radius + 1;
    let n = table_len(k, range)?;
    const CHUNK: usize = 4096;
    let chunks = Execution::default().map_range(n.div_ceil(CHUNK), |c| {
        (c * CHUNK..((c + 1) * CHUNK).min(n))
            .map(|i| {
                let w = index_word(k, range, i);
                if !space.is_allowed(&w) {
                    return f64::NAN;
                }
                (1..=radius)
                    .find(|&r| !is_minimal_scan(space, code, order, &w[radius - r..=radius + r]))
                    .map_or(0.0, |r| -t * dini_profile(r - 1))
            })
            .collect::<Vec<f64>>()
    });
    Potential::new(k, range, -(radius as i64), chunks.concat())
}

/// What is known about `var_n` beyond the computed values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TailModel {
    /// `var_n = 0` for every later `n`.
    Zero,
    /// `var_n <= scale·log(n+shift)/(n+shift)` for every later `n`; when
    /// `lower_bound` holds, also `>=`.
    LogOverLinear { scale: f64, shift: f64, lower_bound: bool },
}

/// `var_0, var_1, ...` where `var_n` is the largest change of `f` between
/// points agreeing on all coordinates `|i| < n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationSequence {
    pub values: Vec<f64>,
    pub tail: Option<TailModel>,
}

/// `var_0 ..= var_{n_max}` of a locally constant potential.
pub fn variation_sequence(space: &ShiftSpace, f: &Potential, n_max: usize) -> Result<VariationSequence> {
    f.check_total(space)?;
    let k = space.len();
    let range = f.range() as i64;
    let lo_f = f.offset();
    let mut values = Vec::with_capacity(n_max + 1);
    let mut covered = false;
    for n in 0..=n_max as i64 {
        // Table positions whose coordinate satisfies |offset + j| < n.
        let lo = (-n + 1 - lo_f).clamp(0, range) as usize;
        let hi = (n - lo_f).clamp(0, range) as usize;
        let (lo, hi) = if lo < hi { (lo, hi) } else { (0, 0) };
        covered = lo == 0 && hi == range as usize;
        let width = hi - lo;
        let groups = table_len(k, width)?;
        let mut min = vec![f64::INFINITY; groups];
        let mut max = vec![f64::NEG_INFINITY; groups];
        for (i, &v) in f.table().iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let w = index_word(k, f.range(), i);
            let g = super::potential::word_index(k, &w[lo..hi]);
            min[g] = min[g].min(v);
            max[g] = max[g].max(v);
        }
        let var = min
            .iter()
            .zip(&max)
            .filter(|(a, _)| a.is_finite())
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max);
        values.push(var);
    }
    Ok(VariationSequence { values, tail: covered.then_some(TailModel::Zero) })
}

/// Variations of the compensation function with parameter `t`, computed
/// exactly for `n <= n_max` from the table of radius `n_max + 1`.
///
/// Beyond `n_max` the general bound `var_n <= t·log(n+1)/(n+1)` holds (two
/// points agreeing on `|i| < n` share every `n(x) <= n-2`). When the computed
/// values equal `t·log(n+2)/(n+2)` for every `1 <= n <= n_max`, that profile
/// is attached instead, as a two-sided model.
pub fn dini_variation(
    space: &ShiftSpace,
    code: &FactorCode,
    order: &MpwOrder,
    t: f64,
    n_max: usize,
) -> Result<VariationSequence> {
    if n_max < 2 {
        return invalid("n_max must be at least 2");
    }
    let f = dini_potential(space, code, order, t, n_max + 1)?;
    let mut v = variation_sequence(space, &f, n_max)?;
    let exact = (1..=n_max).all(|n| (v.values[n] - t * dini_profile(n)).abs() <= 1e-12 * t);
    v.tail = Some(if exact {
        TailModel::LogOverLinear { scale: t, shift: 2.0, lower_bound: true }
    } else {
        TailModel::LogOverLinear { scale: t, shift: 1.0, lower_bound: false }
    });
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiniVerdict {
    ConvergentCertified,
    DivergentCertified,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiniReport {
    pub p: f64,
    pub verdict: DiniVerdict,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
}

/// Decides whether `Σ var_n^p` converges, using the computed values plus the
/// tail model. For `p > 1` the tail of `(c·log y / y)^p` is bounded by the
/// integral `c^p Γ(p+1, (p-1) log Y) / (p-1)^{p+1}`.
pub fn p_dini_report(v: &VariationSequence, p: f64) -> Result<DiniReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid("p must be at least 1");
    }
    let partial_sum: f64 = v.values.iter().map(|x| x.powf(p)).sum();
    let n_max = v.values.len().saturating_sub(1) as f64;
    let (verdict, tail_bound) = match v.tail {
        Some(TailModel::Zero) => (DiniVerdict::ConvergentCertified, Some(0.0)),
        Some(TailModel::LogOverLinear { scale, shift, lower_bound }) => {
            let y = n_max + shift;
            if p > 1.0 && y >= std::f64::consts::E {
                let q = p - 1.0;
                let integral = gamma_ur(p + 1.0, q * y.ln()) * gamma(p + 1.0) / q.powf(p + 1.0);
                (DiniVerdict::ConvergentCertified, Some(scale.powf(p) * integral))
            } else if p == 1.0 && lower_bound && scale > 0.0 {
                (DiniVerdict::DivergentCertified, None)
            } else {
                (DiniVerdict::Undetermined, None)
            }
        }
        None => (DiniVerdict::Undetermined, None),
    };
    Ok(DiniReport { p, verdict, partial_sum, tail_bound })
}

/// How many first-pin positions `n_1` accompany a second pin at `n_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GapMultiplicity {
    /// Every `1 <= n_1 < n_2`, i.e. `n_2 - 1` of them.
    AllEarlier,
    /// One per `n_2`.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TSelection {
    pub t: f64,
    /// Upper bound on `log(d · Σ_{n>=2} m(n) n^{-t})`.
    pub log_bound: f64,
    /// False when no grid point reached the target.
    pub certified: bool,
}

pub const T_GRID_START: f64 = 2.0;
pub const T_GRID_RATIO: f64 = 1.005;
pub const T_GRID_MAX: f64 = 64.0;
const PARTIAL_TERMS: usize = 10_000;

/// Upper bound on `Σ_{n>=2} m(n) n^{-t}`: a partial sum plus the integral
/// of the (decreasing) tail.
pub fn gap_sum_bound(t: f64, multiplicity: GapMultiplicity) -> f64 {
    let n = PARTIAL_TERMS as f64;
    let (partial, tail) = match multiplicity {
        GapMultiplicity::AllEarlier => (
            (2..=PARTIAL_TERMS).map(|k| (k - 1) as f64 * (k as f64).powf(-t)).sum::<f64>(),
            n.powf(2.0 - t) / (t - 2.0),
        ),
        GapMultiplicity::Single => (
            (2..=PARTIAL_TERMS).map(|k| (k as f64).powf(-t)).sum::<f64>(),
            n.powf(1.0 - t) / (t - 1.0),
        ),
    };
    partial + tail
}

/// Smallest `t` on the grid `2·1.005^k` (up to 64) with
/// `log(d · Σ m(n) n^{-t}) <= -epsilon`, `d = |A|^3`.
pub fn select_t(space: &ShiftSpace, code: &FactorCode, epsilon: f64) -> Result<TSelection> {
    select_t_with(space, code, epsilon, GapMultiplicity::AllEarlier)
}

pub fn select_t_with(
    space: &ShiftSpace,
    code: &FactorCode,
    epsilon: f64,
    multiplicity: GapMultiplicity,
) -> Result<TSelection> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return invalid("epsilon must be nonnegative");
    }
    if code.domain_len() != space.len() {
        return invalid("code domain does not match the space");
    }
    let d = (space.len() as f64).powi(3);
    let bound = |t: f64| (d * gap_sum_bound(t, multiplicity)).ln();
    let mut t = T_GRID_START * T_GRID_RATIO;
    let mut last = t;
    while t <= T_GRID_MAX {
        let b = bound(t);
        if b <= -epsilon {
            return Ok(TSelection { t, log_bound: b, certified: true });
        }
        last = t;
        t *= T_GRID_RATIO;
    }
    Ok(TSelection { t: last, log_bound: bound(last), certified: false })
}

/// `(Σ p_n log(a_n / p_n), log Σ a_n)`; the first never exceeds the second,
/// with equality iff `p ∝ a`. Terms with `p_n = 0` contribute 0.
pub fn tangent_bound(p: &[f64], a: &[f64]) -> Result<(f64, f64)> {
    if p.len() != a.len() || p.is_empty() {
        return invalid("p and a must be nonempty and of equal length");
    }
    if p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return invalid("p must be a probability vector");
    }
    if a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return invalid("a must be finite and positive");
    }
    let lhs = p.iter().zip(a).filter(|(&pn, _)| pn > 0.0).map(|(pn, an)| pn * (an / pn).ln()).sum();
    Ok((lhs, a.iter().sum::<f64>().ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::e1;

    #[test]
    fn potential_values() {
        let (x, pi, ord) = e1();
        let f = dini_potential(&x, &pi, &ord, 1.0, 2).unwrap();
        assert_eq!((f.range(), f.offset()), (5, -2));
        let at = |s: &str| f.value(&x.parse_word(s).unwrap().symbols);
        assert!((at("aabaa") + 2f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(at("aaaaa"), 0.0);
        assert_eq!(at("acaca"), 0.0);
        assert!((at("abaaa") + 3f64.ln() / 3.0).abs() < 1e-15);
        assert!((at("baaab") - 0.0).abs() < 1e-15);
        // Nearest non-minimal central word at radius 4, so n(x) = 3.
        let g = dini_potential(&x, &pi, &ord, 2.0, 4).unwrap();
        assert!((g.value(&x.parse_word("abaaaaaaa").unwrap().symbols) + 2.0 * 5f64.ln() / 5.0).abs() < 1e-15);
    }

    #[test]
    fn variations_of_simple_potentials() {
        let x = ShiftSpace::full(&["0", "1"]).unwrap();
        let c = Potential::constant(2, 0.7);
        let v = variation_sequence(&x, &c, 4).unwrap();
        assert_eq!(v.values, vec![0.0; 5]);
        assert_eq!(v.tail, Some(TailModel::Zero));
        let f = Potential::per_symbol(vec![0.0, 1.0]).unwrap();
        let v = variation_sequence(&x, &f, 3).unwrap();
        assert_eq!(v.values, vec![1.0, 0.0, 0.0, 0.0]);
        let r = p_dini_report(&variation_sequence(&x, &c, 2).unwrap(), 1.0).unwrap();
        assert_eq!((r.verdict, r.partial_sum), (DiniVerdict::ConvergentCertified, 0.0));
    }

    #[test]
    fn dini_variations_follow_profile() {
        let (x, pi, ord) = e1();
        let v = dini_variation(&x, &pi, &ord, 1.0, 4).unwrap();
        assert!((v.values[0] - dini_profile(1)).abs() < 1e-15);
        for n in 1..=4 {
            assert!((v.values[n] - dini_profile(n)).abs() < 1e-15);
        }
        assert!(matches!(v.tail, Some(TailModel::LogOverLinear { lower_bound: true, .. })));
        assert_eq!(p_dini_report(&v, 1.0).unwrap().verdict, DiniVerdict::DivergentCertified);
        for p in [1.1, 1.5, 2.0] {
            let r = p_dini_report(&v, p).unwrap();
            assert_eq!(r.verdict, DiniVerdict::ConvergentCertified);
            assert!(r.tail_bound.unwrap().is_finite());
        }
        assert!(p_dini_report(&v, 0.5).is_err());
    }

    #[test]
    fn tail_integral_bounds_the_sum() {
        let v = VariationSequence {
            values: vec![0.0; 4],
            tail: Some(TailModel::LogOverLinear { scale: 1.0, shift: 2.0, lower_bound: true }),
        };
        let r = p_dini_report(&v, 2.0).unwrap();
        let direct: f64 = (4..2_000_000).map(|n| dini_profile(n).powi(2)).sum();
        assert!(direct <= r.tail_bound.unwrap());
        assert!(r.tail_bound.unwrap() < direct * 1.2);
    }

    #[test]
    fn t_selection() {
        let (x, pi, _) = e1();
        let s = select_t(&x, &pi, 0.1).unwrap();
        assert!(s.certified && s.log_bound <= -0.1);
        let prev = s.t / T_GRID_RATIO;
        assert!((27.0 * gap_sum_bound(prev, GapMultiplicity::AllEarlier)).ln() > -0.1);
        let never = select_t(&x, &pi, f64::INFINITY).unwrap();
        assert!(!never.certified);
        assert!(never.t <= T_GRID_MAX && never.t * T_GRID_RATIO > T_GRID_MAX);
        // Σ (n-1) n^{-4} = ζ(3) - ζ(4).
        let z = 1.2020569031595942 - std::f64::consts::PI.powi(4) / 90.0;
        assert!((gap_sum_bound(4.0, GapMultiplicity::AllEarlier) - z).abs() < 1e-7);
    }

    #[test]
    fn tangent_examples() {
        let (l, r) = tangent_bound(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!((l - r).abs() < 1e-15 && (r - 2f64.ln()).abs() < 1e-15);
        let (l, r) = tangent_bound(&[0.9, 0.1], &[0.5, 0.5]).unwrap();
        assert!((l - (0.9 * (0.5f64 / 0.9).ln() + 0.1 * 5f64.ln())).abs() < 1e-15);
        assert_eq!(r, 0.0);
        let e = std::f64::consts::E;
        let (l, r) = tangent_bound(&[1.0, 0.0], &[e, e]).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - (1.0 + 2f64.ln())).abs() < 1e-15);
    }
}
