//! Sample means with standard errors.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// Mean and standard error of independent observations.
    pub fn of(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, stderr: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate { mean, stderr: f64::INFINITY, n };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Estimate { mean, stderr: (var / n as f64).sqrt(), n }
    }

    /// Standard error from `batches` contiguous batch means, for serially
    /// dependent observations.
    pub fn batched(xs: &[f64], batches: usize) -> Estimate {
        let b = batches.max(2).min(xs.len().max(1));
        let size = xs.len() / b;
        if size == 0 {
            return Estimate::of(xs);
        }
        let means: Vec<f64> = (0..b).map(|i| xs[i * size..(i + 1) * size].iter().sum::<f64>() / size as f64).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        Estimate { mean, stderr: Estimate::of(&means).stderr, n: xs.len() }
    }

    /// `|self - target| <= k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    /// Difference of two independent estimates.
    pub fn minus(&self, other: &Estimate) -> Estimate {
        Estimate {
            mean: self.mean - other.mean,
            stderr: self.stderr.hypot(other.stderr),
            n: self.n.min(other.n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_moments() {
        let e = Estimate::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.0, 1.0));
        let b = Estimate::batched(&[1.0, 1.0, 3.0, 3.0], 2);
        assert_eq!((b.mean, b.stderr), (2.0, 1.0));
    }
}
