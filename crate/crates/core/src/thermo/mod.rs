//! Pressure, equilibrium states, entropy brackets and the compensation
//! function with its p-Dini analysis.

mod compensation;
mod dini;
mod markov;
mod perron;
mod potential;

pub use compensation::{compensation_check, CompensationReport, PhiFamily, PhiGap};
pub use dini::{
    dini_potential, dini_profile, dini_variation, gap_sum_bound, p_dini_report, select_t, select_t_with,
    tangent_bound, variation_sequence, DiniReport, DiniVerdict, GapMultiplicity, TSelection, TailModel,
    VariationSequence, T_GRID_MAX, T_GRID_RATIO, T_GRID_START,
};
pub use markov::{
    pushforward_entropy_bracket, relative_entropy_bracket, EntropyBracket, MarkovMeasure, STOCHASTIC_TOL,
};
pub use perron::{perron, PerronVector, SparseMatrix, PERRON_MAX_ITER, PERRON_TOL};
pub use potential::{index_word, word_index, Potential, MAX_TABLE};

use crate::error::{Error, Result};
use crate::shift::{ShiftSpace, SoficPresentation, Symbol};

/// The transfer matrix of `f`: states are the `(range-1)`-words (symbols
/// when `range == 1`), and the edge for the `range`-word `w` carries
/// `exp f(w)`, so the weight sits on the source block.
pub fn transfer_matrix(space: &ShiftSpace, f: &Potential) -> Result<(Vec<Vec<Symbol>>, SparseMatrix)> {
    f.check_total(space)?;
    let k = space.len();
    if f.range() == 1 {
        let rows = (0..k)
            .map(|i| {
                let w = f.value(&[i]).exp();
                space.successors(i).iter().map(|&j| (j, w)).collect()
            })
            .collect();
        return Ok(((0..k).map(|s| vec![s]).collect(), SparseMatrix::new(rows)));
    }
    let m = f.range() - 1;
    let states = space.words(m);
    let mut index = vec![usize::MAX; potential::table_len(k, m)?];
    for (i, s) in states.iter().enumerate() {
        index[word_index(k, s)] = i;
    }
    let mut word = vec![0; m + 1];
    let rows = states
        .iter()
        .map(|s| {
            word[..m].copy_from_slice(s);
            space
                .successors(s[m - 1])
                .iter()
                .map(|&t| {
                    word[m] = t;
                    (index[word_index(k, &word[1..])], f.value(&word).exp())
                })
                .collect()
        })
        .collect();
    Ok((states, SparseMatrix::new(rows)))
}

/// `P_X(f)`: log of the Perron root of the transfer matrix.
pub fn pressure_sft(space: &ShiftSpace, f: &Potential) -> Result<f64> {
    if !space.is_irreducible() {
        return Err(Error::RequiresIrreducible);
    }
    let (_, b) = transfer_matrix(space, f)?;
    Ok(perron(&b)?.root.ln())
}

/// `P_Y(φ)` on the edge shift of the presentation, with `φ` read through
/// the edge labels.
pub fn pressure_sofic(presentation: &SoficPresentation, phi: &Potential) -> Result<f64> {
    let (edges, labels) = presentation.edge_shift()?;
    pressure_sft(&edges, &phi.pull_back(&labels)?)
}

/// The equilibrium state of a locally constant `f`:
/// `P(i,j) = B(i,j) r_j / (λ r_i)` with stationary vector `∝ l_i r_i`.
pub fn equilibrium_markov(space: &ShiftSpace, f: &Potential) -> Result<MarkovMeasure> {
    if !space.is_irreducible() {
        return Err(Error::RequiresIrreducible);
    }
    let (states, b) = transfer_matrix(space, f)?;
    let right = perron(&b)?;
    let left = perron(&b.transpose())?;
    let lambda = right.root;
    let r = &right.vector;
    let rows: Vec<Vec<(usize, f64)>> = b
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out: Vec<(usize, f64)> = row.iter().map(|&(j, w)| (j, w * r[j] / (lambda * r[i]))).collect();
            let s: f64 = out.iter().map(|e| e.1).sum();
            out.iter_mut().for_each(|e| e.1 /= s);
            out
        })
        .collect();
    let mut pi: Vec<f64> = left.vector.iter().zip(r).map(|(l, r)| l * r).collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= s);
    let block = states[0].len();
    MarkovMeasure::from_parts(space.len(), block, states, rows, pi)
}

/// `h(μ)` of a Markov measure.
pub fn markov_entropy(m: &MarkovMeasure) -> f64 {
    m.entropy()
}
