use crate::error::{invalid, Error, Result};
use crate::rng::{experiment, stream};
use crate::shift::{Symbol, Word};
use crate::stats::Estimate;
use crate::thermo::MarkovMeasure;
use serde::Serialize;

const SIGMAS: f64 = 3.0;
const BATCHES: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KacAbramovReport {
    pub cylinder_measure: f64,
    pub visits: usize,
    /// Mean first return time to the cylinder.
    pub mean_return: Estimate,
    /// `1 / μ(C)`.
    pub kac_target: f64,
    pub kac_pass: bool,
    /// Mean log-likelihood of an excursion, times `μ(C)`.
    pub abramov: Estimate,
    /// `h(μ)`.
    pub abramov_target: f64,
    pub abramov_pass: bool,
    pub sigmas: f64,
}

impl KacAbramovReport {
    pub fn pass(&self) -> bool {
        self.kac_pass && self.abramov_pass
    }
}

/// Checks Kac's return-time formula and Abramov's formula for the map
/// induced on a cylinder, on one sample path of `m`.
///
/// The induced entropy is estimated by the average of
/// `-log μ(excursion | past)` over excursions between successive visits,
/// which is unbiased because excursions of a Markov chain from a cylinder
/// form a stationary sequence whose entropy is the induced entropy.
pub fn kac_abramov_check(m: &MarkovMeasure, cylinder: &Word, length: usize, seed: u64) -> Result<KacAbramovReport> {
    let c = &cylinder.symbols;
    if c.is_empty() {
        return invalid("empty cylinder");
    }
    let mu = m.word_probability(c);
    if mu <= 0.0 {
        return invalid("cylinder has measure zero");
    }
    let x = m.sample(length, &mut stream(seed, experiment::KAC, 0));
    let visits: Vec<usize> = (0..x.len().saturating_sub(c.len() - 1)).filter(|&i| x[i..].starts_with(c)).collect();
    if visits.len() < 3 {
        return Err(Error::DegenerateSample(format!("{} visit(s) to the cylinder", visits.len())));
    }
    let info = surprisal(m, &x);
    let mut returns = Vec::with_capacity(visits.len() - 1);
    let mut excursions = Vec::with_capacity(visits.len() - 1);
    for v in visits.windows(2) {
        returns.push((v[1] - v[0]) as f64);
        let (a, b) = (v[0] + c.len(), v[1] + c.len());
        excursions.push(info[a..b].iter().sum::<f64>() * mu);
    }
    let mean_return = Estimate::batched(&returns, BATCHES);
    let abramov = Estimate::batched(&excursions, BATCHES);
    let kac_target = 1.0 / mu;
    let abramov_target = m.entropy();
    Ok(KacAbramovReport {
        cylinder_measure: mu,
        visits: visits.len(),
        kac_pass: mean_return.within(kac_target, SIGMAS),
        abramov_pass: abramov.within(abramov_target, SIGMAS) || abramov.mean == abramov_target,
        mean_return,
        kac_target,
        abramov,
        abramov_target,
        sigmas: SIGMAS,
    })
}

/// `-log μ(x_i | x_{i-b} .. x_{i-1})` at every position past the first
/// block, 0 before it.
fn surprisal(m: &MarkovMeasure, x: &[Symbol]) -> Vec<f64> {
    let b = m.block();
    let mut out = vec![0.0; x.len()];
    for i in b..x.len() {
        let ctx = m.word_probability(&x[i - b..i]);
        out[i] = -(m.word_probability(&x[i - b..=i]) / ctx).ln();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::ShiftSpace;
    use crate::systems::golden_mean;
    use crate::thermo::{equilibrium_markov, Potential};

    #[test]
    fn fair_coin() {
        let f2 = ShiftSpace::full(&["0", "1"]).unwrap();
        let m = MarkovMeasure::iid(&f2, &[0.5, 0.5]).unwrap();
        let r = kac_abramov_check(&m, &f2.parse_word("1").unwrap(), 200_000, 1).unwrap();
        assert_eq!(r.kac_target, 2.0);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn parry_measure() {
        let g = golden_mean();
        let m = equilibrium_markov(&g, &Potential::constant(2, 0.0)).unwrap();
        let r = kac_abramov_check(&m, &g.parse_word("1").unwrap(), 200_000, 2).unwrap();
        // μ(1) = 1/(1+φ²), so the mean return is 1+φ² rather than φ².
        assert!((r.kac_target - 3.618_033_988_749_895).abs() < 1e-9);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn unseen_cylinder() {
        let f2 = ShiftSpace::full(&["0", "1"]).unwrap();
        let m = MarkovMeasure::iid(&f2, &[1.0, 0.0]).unwrap();
        assert!(kac_abramov_check(&m, &f2.parse_word("1").unwrap(), 1000, 1).is_err());
    }
}
