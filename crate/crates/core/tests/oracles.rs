//! Values computed independently (brute-force enumeration and closed forms
//! in mpmath) and frozen here.

use compfn::systems::e1;
use compfn::thermo::{
    gap_sum_bound, pushforward_entropy_bracket, relative_entropy_bracket, select_t, tangent_bound, GapMultiplicity,
    MarkovMeasure,
};

const P: [[f64; 3]; 3] = [
    [0.5906457781518458, 0.29636949255138934, 0.11298472929676485],
    [0.05704998095107719, 0.44712183091370855, 0.4958281881352143],
    [0.3241809382264235, 0.3805453709210202, 0.29527369085255634],
];

/// Brute-force `H(Y_{-n..0}) - H(Y_{-n..-1})` and the state-conditioned
/// lower bound for the chain `P` pushed through `a, b -> 0, c -> 1`.
const BRACKETS: [(f64, f64); 4] = [
    (0.6121989367664828, 0.6235260097891056),
    (0.6210470484929802, 0.6234969108972828),
    (0.6229553148947735, 0.6234911651762141),
    (0.6233745592462578, 0.6234900098409870),
];

#[test]
fn hidden_markov_brackets() {
    let (x, pi, _) = e1();
    let m = MarkovMeasure::from_matrix(&x, &P.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    for (n, &(lo, up)) in (1..).zip(BRACKETS.iter()) {
        let b = pushforward_entropy_bracket(&m, &pi, n).unwrap();
        assert!((b.lower - lo).abs() < 1e-10 && (b.upper - up).abs() < 1e-10, "n = {n}: {b:?}");
        let r = relative_entropy_bracket(&m, &pi, n).unwrap();
        assert!((r.lower - (m.entropy() - up)).abs() < 1e-10);
    }
}

#[test]
fn tangent_direct_value() {
    let (lhs, rhs) = tangent_bound(&[0.9, 0.1], &[0.5, 0.5]).unwrap();
    assert!((lhs + 0.36806420716849697).abs() < 1e-14);
    assert_eq!(rhs, 0.0);
}

#[test]
fn gap_sums() {
    // Σ_{n>=2} (n-1) n^{-4} = ζ(3) - ζ(4).
    assert!((gap_sum_bound(4.0, GapMultiplicity::AllEarlier) - 0.11973366944845609).abs() < 1e-8);
    let (x, pi, _) = e1();
    let s = select_t(&x, &pi, 0.1).unwrap();
    // First grid point 2·1.005^k with log(27 (ζ(t-1) - ζ(t))) <= -0.1.
    assert!((s.t - 5.369207936297256).abs() < 1e-9, "{s:?}");
    assert!(s.certified && s.log_bound <= -0.1);
}
