//! Small reference systems used throughout the tests, benches and CLI docs.

use crate::factor::MpwOrder;
use crate::shift::{FactorCode, ShiftSpace};

/// Full 3-shift on `{a, b, c}` with `a, b -> 0`, `c -> 1` and order `a < b < c`.
pub fn e1() -> (ShiftSpace, FactorCode, MpwOrder) {
    let x = ShiftSpace::full(&["a", "b", "c"]).unwrap();
    let pi = FactorCode::from_names(&x, &[("a", "0"), ("b", "0"), ("c", "1")]).unwrap();
    let order = MpwOrder::declared(&x);
    (x, pi, order)
}

pub fn full_shift(k: usize) -> ShiftSpace {
    let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    ShiftSpace::full(&refs).unwrap()
}

/// `{0, 1}` with `11` forbidden.
pub fn golden_mean() -> ShiftSpace {
    ShiftSpace::from_names(&["0", "1"], &[("0", "0"), ("0", "1"), ("1", "0")]).unwrap()
}

/// Edge shift of the standard even-shift graph with its labelling.
pub fn even_shift_cover() -> (ShiftSpace, FactorCode) {
    let x = ShiftSpace::from_names(
        &["e1", "e2", "e3"],
        &[("e1", "e1"), ("e1", "e2"), ("e2", "e3"), ("e3", "e1"), ("e3", "e2")],
    )
    .unwrap();
    let pi = FactorCode::from_names(&x, &[("e1", "1"), ("e2", "0"), ("e3", "0")]).unwrap();
    (x, pi)
}
