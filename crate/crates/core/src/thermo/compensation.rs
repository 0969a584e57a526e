use super::potential::{table_len, Potential};
use super::pressure_sft;
use crate::error::{invalid, Result};
use crate::par::Execution;
use crate::shift::{FactorCode, ShiftSpace, SoficPresentation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A finite list of potentials on the image alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiFamily {
    pub description: String,
    pub members: Vec<(String, Potential)>,
}

/// Cap on the number of grid potentials in one family.
pub const MAX_FAMILY: usize = 200_000;

impl PhiFamily {
    pub fn new(description: impl Into<String>, members: Vec<(String, Potential)>) -> Self {
        PhiFamily { description: description.into(), members }
    }

    /// Every range-`range` table with values in `values`.
    pub fn grid(labels: usize, range: usize, values: &[f64]) -> Result<Self> {
        let cells = table_len(labels, range)?;
        let count = (values.len() as f64).powi(cells as i32);
        if values.is_empty() || count > MAX_FAMILY as f64 {
            return invalid(format!("grid would have {count} members"));
        }
        let count = count as usize;
        let mut members = Vec::with_capacity(count);
        for mut c in 0..count {
            let mut table = vec![0.0; cells];
            for slot in table.iter_mut().rev() {
                *slot = values[c % values.len()];
                c /= values.len();
            }
            let name = format!("grid{range}:{}", join(&table));
            members.push((name, Potential::new(labels, range, 0, table)?));
        }
        Ok(PhiFamily::new(format!("range-{range} grid over {values:?}"), members))
    }

    /// `count` tables with independent uniform values in `[lo, hi]`.
    pub fn random(labels: usize, range: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        let cells = table_len(labels, range)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members = Vec::with_capacity(count);
        for i in 0..count {
            let table: Vec<f64> = (0..cells).map(|_| rng.random_range(lo..=hi)).collect();
            members.push((format!("random{range}:{i}"), Potential::new(labels, range, 0, table)?));
        }
        Ok(PhiFamily::new(format!("{count} random range-{range} tables in [{lo}, {hi}], seed {seed}"), members))
    }

    /// Range-1 and range-2 grids on `values` plus `random` range-2 tables.
    pub fn standard(labels: usize, values: &[f64], random: usize, seed: u64) -> Result<Self> {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let parts = [
            PhiFamily::grid(labels, 1, values)?,
            PhiFamily::grid(labels, 2, values)?,
            PhiFamily::random(labels, 2, random, lo, hi, seed)?,
        ];
        let description = parts.iter().map(|p| p.description.as_str()).collect::<Vec<_>>().join("; ");
        Ok(PhiFamily::new(description, parts.into_iter().flat_map(|p| p.members).collect()))
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiGap {
    pub phi: String,
    pub pressure_x: f64,
    pub pressure_y: f64,
    /// `P_X(f + φ∘π) - P_Y(φ)`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompensationReport {
    /// `max |gap|` over the family.
    pub max_gap: f64,
    /// `max gap`, an estimate of the maximal relative pressure from below.
    pub w_estimate: f64,
    pub tested_family: String,
    pub tol: f64,
    pub pass: bool,
    pub gaps: Vec<PhiGap>,
}

/// Compares `P_X(f + φ∘π)` with `P_Y(φ)` for every `φ` in the family.
/// Passing means only that the identity holds within `tol` on this family.
pub fn compensation_check(
    space: &ShiftSpace,
    code: &FactorCode,
    f: &Potential,
    family: &PhiFamily,
    tol: f64,
    exec: Execution,
) -> Result<CompensationReport> {
    if family.members.is_empty() {
        return invalid("empty potential family");
    }
    let (edges, labels) = SoficPresentation::new(space, code)?.edge_shift()?;
    let gaps = exec.map(&family.members, |(name, phi)| -> Result<PhiGap> {
        let pressure_x = pressure_sft(space, &f.add(&phi.compose(code)?)?)?;
        let pressure_y = pressure_sft(&edges, &phi.pull_back(&labels)?)?;
        Ok(PhiGap { phi: name.clone(), pressure_x, pressure_y, gap: pressure_x - pressure_y })
    });
    let gaps = gaps.into_iter().collect::<Result<Vec<_>>>()?;
    let max_gap = gaps.iter().map(|g| g.gap.abs()).fold(0.0, f64::max);
    let w_estimate = gaps.iter().map(|g| g.gap).fold(f64::NEG_INFINITY, f64::max);
    Ok(CompensationReport {
        max_gap,
        w_estimate,
        tested_family: family.description.clone(),
        tol,
        pass: max_gap <= tol,
        gaps,
    })
}
