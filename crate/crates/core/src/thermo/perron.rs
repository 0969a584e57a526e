use crate::error::{Error, Result};

/// Nonnegative square matrix stored as sparse rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(rows: Vec<Vec<(usize, f64)>>) -> Self {
        SparseMatrix { rows }
    }

    pub fn from_dense(m: &[Vec<f64>]) -> Self {
        let rows = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).collect())
            .collect();
        SparseMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v));
            }
        }
        SparseMatrix { rows }
    }

    fn apply(&self, v: &[f64], shift: f64, out: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            out[i] = shift * v[i] + row.iter().map(|&(j, w)| w * v[j]).sum::<f64>();
        }
    }
}

/// Perron root with a positive right eigenvector, normalised to max 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronVector {
    pub root: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

pub const PERRON_TOL: f64 = 1e-13;
pub const PERRON_MAX_ITER: usize = 1_000_000;

/// Power iteration on `M + sI` for an irreducible nonnegative `M`.
///
/// The shift makes the matrix primitive, so periodic graphs converge too.
/// Iteration stops when the Collatz–Wielandt bracket
/// `min (Mv)_i / v_i <= ρ <= max (Mv)_i / v_i` has relative width below
/// [`PERRON_TOL`].
pub fn perron(m: &SparseMatrix) -> Result<PerronVector> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let sums: Vec<f64> = m.rows.iter().map(|r| r.iter().map(|e| e.1).sum()).collect();
    if sums.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::RequiresIrreducible);
    }
    let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sums.iter().copied().fold(0.0, f64::max);
    let shift = 0.5 * (lo + hi);

    let mut v = vec![1.0; n];
    let mut w = vec![0.0; n];
    for it in 1..=PERRON_MAX_ITER {
        m.apply(&v, shift, &mut w);
        let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = w[i] / v[i];
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
        let top = w.iter().copied().fold(0.0, f64::max);
        if !(top > 0.0) || !top.is_finite() {
            return Err(Error::RequiresIrreducible);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / top;
        }
        if v.iter().any(|&x| x <= 0.0) {
            // Positive start vectors stay positive for irreducible input.
            return Err(Error::RequiresIrreducible);
        }
        if rmax - rmin <= PERRON_TOL * rmax {
            return Ok(PerronVector { root: 0.5 * (rmin + rmax) - shift, vector: v, iterations: it });
        }
    }
    Err(Error::PreconditionViolation(format!(
        "power iteration did not converge in {PERRON_MAX_ITER} steps"
    )))
}
