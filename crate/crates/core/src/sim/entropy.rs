use crate::error::{invalid, Error, Result};
use crate::shift::Symbol;
use crate::stats::Estimate;
use serde::Serialize;

/// Contexts seen fewer times than this make the estimate flag itself.
pub const MIN_CONTEXT_COUNT: u64 = 30;
/// Batches used when a single sample has to supply its own error bar.
const SELF_BATCHES: usize = 20;
const MAX_CELLS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Plug-in `H(X_0 | X_{-k} .. X_{-1})` from pooled counts.
    pub estimate: f64,
    /// Batch-means standard error, doubled when `sparse`.
    pub stderr: f64,
    pub k: usize,
    pub symbols: usize,
    /// Some observed context occurred fewer than [`MIN_CONTEXT_COUNT`] times.
    pub sparse: bool,
}

struct Counts {
    joint: Vec<u64>,
    alphabet: usize,
}

impl Counts {
    fn new(alphabet: usize, k: usize) -> Self {
        Counts { joint: vec![0; alphabet.pow(k as u32 + 1)], alphabet }
    }

    fn add(&mut self, x: &[Symbol], k: usize) {
        let a = self.alphabet;
        let top = a.pow(k as u32);
        if x.len() <= k {
            return;
        }
        let mut code = x[..k].iter().fold(0, |c, &s| c * a + s);
        for &s in &x[k..] {
            self.joint[code * a + s] += 1;
            code = (code * a + s) % top.max(1);
        }
    }

    /// Conditional entropy, total count, and whether some context is rare.
    fn entropy(&self) -> (f64, u64, bool) {
        let mut h = 0.0;
        let mut total = 0u64;
        let mut sparse = false;
        for row in self.joint.chunks(self.alphabet) {
            let n: u64 = row.iter().sum();
            if n == 0 {
                continue;
            }
            sparse |= n < MIN_CONTEXT_COUNT;
            total += n;
            h += row.iter().filter(|&&c| c > 0).map(|&c| c as f64 * (n as f64 / c as f64).ln()).sum::<f64>();
        }
        (if total == 0 { f64::NAN } else { h / total as f64 }, total, sparse)
    }
}

fn single(x: &[Symbol], k: usize, alphabet: usize) -> f64 {
    let mut c = Counts::new(alphabet, k);
    c.add(x, k);
    c.entropy().0
}

/// Conditional block entropy of order `k`, pooled over `samples`.
pub fn empirical_entropy(samples: &[Vec<Symbol>], k: usize, alphabet: usize) -> Result<EntropyEstimate> {
    if k == 0 {
        return invalid("conditioning depth must be at least 1");
    }
    if alphabet == 0 || (alphabet as f64).powi(k as i32 + 1) > MAX_CELLS as f64 {
        return invalid(format!("{alphabet}^{} count cells is too many", k + 1));
    }
    if let Some(s) = samples.iter().flatten().find(|&&s| s >= alphabet) {
        return invalid(format!("symbol {s} outside an alphabet of size {alphabet}"));
    }
    let mut pooled = Counts::new(alphabet, k);
    for x in samples {
        pooled.add(x, k);
    }
    let (estimate, total, sparse) = pooled.entropy();
    if total == 0 {
        return Err(Error::DegenerateSample(format!("no sample longer than {k}")));
    }
    let parts: Vec<f64> = if samples.len() >= 2 {
        samples.iter().filter(|x| x.len() > k).map(|x| single(x, k, alphabet)).collect()
    } else {
        let x = &samples[0];
        let size = x.len() / SELF_BATCHES;
        if size <= k {
            vec![estimate]
        } else {
            x.chunks(size).filter(|c| c.len() == size).map(|c| single(c, k, alphabet)).collect()
        }
    };
    let mut stderr = Estimate::of(&parts).stderr;
    if sparse {
        stderr *= 2.0;
    }
    Ok(EntropyEstimate { estimate, stderr, k, symbols: total as usize, sparse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::systems::golden_mean;
    use crate::thermo::equilibrium_markov;
    use crate::thermo::Potential;
    use rand::Rng;

    #[test]
    fn fair_bits() {
        let mut rng = stream(1, 99, 0);
        let x: Vec<Symbol> = (0..1_000_000).map(|_| rng.random_range(0..2)).collect();
        let e = empirical_entropy(&[x], 1, 2).unwrap();
        assert!((e.estimate - 2f64.ln()).abs() <= 3.0 * e.stderr, "{e:?}");
        assert!(!e.sparse);
    }

    #[test]
    fn constant_sequence() {
        let e = empirical_entropy(&[vec![1; 1000]], 2, 3).unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn parry_samples() {
        let g = golden_mean();
        let m = equilibrium_markov(&g, &Potential::constant(2, 0.0)).unwrap();
        let xs: Vec<Vec<Symbol>> = (0..10).map(|r| m.sample(100_000, &mut stream(2, 99, r))).collect();
        let e = empirical_entropy(&xs, 2, 2).unwrap();
        assert!((e.estimate - m.entropy()).abs() <= 3.0 * e.stderr, "{e:?} vs {}", m.entropy());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(empirical_entropy(&[vec![0, 1]], 0, 2).is_err());
        assert!(empirical_entropy(&[vec![0, 2]], 1, 2).is_err());
        assert!(matches!(empirical_entropy(&[vec![0]], 1, 2), Err(Error::DegenerateSample(_))));
    }
}
