//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p compfn-core --test acceptance`.

use compfn::clothespin::pin_process;
use compfn::factor::{is_mpw_minimal, MpwOrder};
use compfn::rng::stream;
use compfn::sim::{dbar_exact, dbar_marker_vs_bernoulli, kac_abramov_check, tradeoff_experiment, SwapMap, TradeoffConfig};
use compfn::systems::{e1, golden_mean};
use compfn::thermo::{
    compensation_check, dini_potential, dini_variation, equilibrium_markov, p_dini_report, pressure_sft,
    relative_entropy_bracket, select_t, DiniVerdict, MarkovMeasure, PhiFamily, Potential,
};
use compfn::{Execution, FactorCode, ShiftSpace, Symbol, Word};
use rand::Rng;
use std::time::{Duration, Instant};

// Pinned tolerances and budgets.
const PRESSURE_TOL: f64 = 1e-10;
const PRESSURE_TIME: Duration = Duration::from_millis(100);
const VARIATIONAL_TOL: f64 = 1e-9;
const COMPENSATION_TOL: f64 = 1e-9;
const COMPENSATION_TIME: Duration = Duration::from_secs(5);
const DESK_ZERO_TOL: f64 = 1e-9;
const DESK_TIME: Duration = Duration::from_secs(30);
const SIGMAS: f64 = 3.0;
const TRADEOFF_TIME: Duration = Duration::from_secs(300);
const CLOSED_FORM_TOL: f64 = 1e-6;
/// Relative rounding slack where a bound is attained exactly (n = 2 in d̄).
const ROUNDING: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn f0(x: &ShiftSpace) -> Potential {
    let half = -(2f64.ln());
    Potential::per_symbol((0..x.len()).map(|s| if x.name(s) == "c" { 0.0 } else { half }).collect()).unwrap()
}

fn c1_pressure() -> Outcome {
    let f2 = ShiftSpace::full(&["0", "1"]).unwrap();
    let g = golden_mean();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let mut worst_err: f64 = 0.0;
    let mut worst_time = Duration::ZERO;
    for (space, want) in [(&f2, 2f64.ln()), (&g, golden.ln())] {
        let start = Instant::now();
        let p = pressure_sft(space, &Potential::constant(2, 0.0)).unwrap();
        worst_time = worst_time.max(start.elapsed());
        worst_err = worst_err.max((p - want).abs());
    }
    outcome(
        worst_err <= PRESSURE_TOL && worst_time < PRESSURE_TIME,
        format!("max error {worst_err:.2e}, slowest {worst_time:?}"),
    )
}

fn c2_variational() -> Outcome {
    let (x, _, _) = e1();
    let mut rng = stream(2026, 100, 0);
    let (mut identity_err, mut excess): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for _ in 0..20 {
        let table: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
        let f = Potential::new(x.len(), 2, 0, table).unwrap();
        let p = pressure_sft(&x, &f).unwrap();
        let m = equilibrium_markov(&x, &f).unwrap();
        identity_err = identity_err.max((m.entropy() + m.integral(&f).unwrap() - p).abs());
        for _ in 0..100 {
            let q = MarkovMeasure::random(&x, &mut rng);
            excess = excess.max(q.entropy() + q.integral(&f).unwrap() - p);
        }
    }
    outcome(
        identity_err <= VARIATIONAL_TOL && excess <= VARIATIONAL_TOL,
        format!("identity error {identity_err:.2e}, largest excess over P(f) {excess:.3e}"),
    )
}

fn c3_compensation() -> Outcome {
    let start = Instant::now();
    let (x, pi, _) = e1();
    let fam = PhiFamily::standard(2, &[-2.0, -1.0, 0.0, 1.0, 2.0], 50, 2026).unwrap();
    let r = compensation_check(&x, &pi, &f0(&x), &fam, COMPENSATION_TOL, Execution::default()).unwrap();
    let t = start.elapsed();
    outcome(
        r.pass && r.max_gap < COMPENSATION_TOL && t < COMPENSATION_TIME,
        format!("{} potentials, max gap {:.2e}, {t:?}", r.gaps.len(), r.max_gap),
    )
}

fn e1_iid(x: &ShiftSpace, eps: f64) -> MarkovMeasure {
    let ac = (1.0 - eps) / 2.0;
    MarkovMeasure::iid(x, &[ac, eps, ac]).unwrap()
}

/// A random chain on {a, c}; the b row is never visited.
fn random_ac(x: &ShiftSpace, rng: &mut impl Rng) -> MarkovMeasure {
    let row = |rng: &mut dyn FnMut() -> f64| {
        let (a, c) = (rng() + 1e-3, rng() + 1e-3);
        vec![a / (a + c), 0.0, c / (a + c)]
    };
    let mut u = || rng.random::<f64>();
    let p = vec![row(&mut u), vec![1.0 / 3.0; 3], row(&mut u)];
    MarkovMeasure::from_matrix(x, &p).unwrap()
}

fn c4_desk_theorem() -> Outcome {
    let start = Instant::now();
    let (x, pi, ord) = e1();
    let sel = select_t(&x, &pi, 0.1).unwrap();
    let f = dini_potential(&x, &pi, &ord, sel.t, 3).unwrap();
    let mut worst_neg = f64::NEG_INFINITY;
    for eps in [0.05, 0.1, 0.2] {
        let m = e1_iid(&x, eps);
        let q = relative_entropy_bracket(&m, &pi, 8).unwrap().upper + m.integral(&f).unwrap();
        worst_neg = worst_neg.max(q);
    }
    let mut rng = stream(2026, 101, 0);
    let mut worst_zero: f64 = 0.0;
    for _ in 0..5 {
        let m = random_ac(&x, &mut rng);
        let q = relative_entropy_bracket(&m, &pi, 8).unwrap().upper + m.integral(&f).unwrap();
        worst_zero = worst_zero.max(q.abs());
    }
    let t = start.elapsed();
    outcome(
        worst_neg < 0.0 && worst_zero <= DESK_ZERO_TOL && t < DESK_TIME,
        format!(
            "t = {:.4}, largest value with b {worst_neg:.4}, largest |value| on {{a,c}} {worst_zero:.1e}, {t:?}",
            sel.t
        ),
    )
}

fn c5_dini_boundary() -> Outcome {
    let (x, pi, ord) = e1();
    let v = dini_variation(&x, &pi, &ord, 1.0, 6).unwrap();
    let verdicts: Vec<(f64, DiniVerdict)> =
        [1.0, 1.1, 1.5, 2.0].iter().map(|&p| (p, p_dini_report(&v, p).unwrap().verdict)).collect();
    let pass = verdicts[0].1 == DiniVerdict::DivergentCertified
        && verdicts[1..].iter().all(|v| v.1 == DiniVerdict::ConvergentCertified);
    outcome(pass, format!("{verdicts:?}"))
}

fn random_word(x: &ShiftSpace, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
    let mut w = vec![rng.random_range(0..x.len())];
    while w.len() < len {
        let succ = x.successors(*w.last().unwrap());
        w.push(succ[rng.random_range(0..succ.len())]);
    }
    w
}

fn clothespin_violations(x: &ShiftSpace, pi: &FactorCode, ord: &MpwOrder, w: &[Symbol]) -> usize {
    let word = Word::new(w.to_vec());
    let minimal = |a: usize, b: usize| is_mpw_minimal(x, pi, ord, &Word::new(w[a..=b].to_vec())).unwrap();
    let runs: Vec<Vec<usize>> = (0..w.len()).map(|s| pin_process(x, pi, ord, &word, s).unwrap().pins).collect();
    let mut bad = 0;
    for pins in &runs {
        for p in pins.windows(2) {
            let (i, j) = (p[0], p[1]);
            if !minimal(i, j) || (j + 1 < w.len() && minimal(i, j + 1)) {
                bad += 1;
            }
        }
    }
    for (a, pa) in runs.iter().enumerate() {
        for pb in &runs[a + 1..] {
            if let Some(k) = pa.iter().position(|q| pb.contains(q)) {
                let l = pb.iter().position(|q| *q == pa[k]).unwrap();
                bad += usize::from(pa[k..] != pb[l..]);
            }
            for i in pa.windows(2) {
                for j in pb.windows(2) {
                    bad += usize::from(j[0] <= i[0] && j[1] > i[1]);
                    bad += usize::from(i[0] <= j[0] && i[1] > j[1]);
                }
            }
        }
    }
    bad
}

fn c6_clothespin() -> Outcome {
    let (x, pi, ord) = e1();
    let mut rng = stream(2026, 102, 0);
    let mut violations = 0;
    for _ in 0..10_000 {
        let len = rng.random_range(1..=20);
        let w = random_word(&x, len, &mut rng);
        violations += clothespin_violations(&x, &pi, &ord, &w);
    }
    outcome(violations == 0, format!("10000 words, {violations} violations"))
}

fn c7_dbar() -> Outcome {
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_sigma: f64 = 0.0;
    let mut pass = true;
    for (i, p) in [0.01, 0.02, 0.05, 0.1, 0.15, 0.2].into_iter().enumerate() {
        for n in 2..=6 {
            let r = dbar_marker_vs_bernoulli(p, n, 100_000, 2026 + (10 * i + n) as u64).unwrap();
            let closed = p * (1.0 - (1.0 - p).powi(n as i32 - 1));
            let sigma = (r.estimate - r.exact).abs() / r.stderr;
            pass &= (r.exact - closed).abs() <= 1e-15 && r.exact == dbar_exact(p, n);
            pass &= r.exact <= r.quadratic_bound * (1.0 + ROUNDING) && sigma <= SIGMAS;
            worst_bound = worst_bound.max(r.exact / r.quadratic_bound);
            worst_sigma = worst_sigma.max(sigma);
        }
    }
    outcome(
        pass,
        format!("30 grid points, max exact/((n-1)p²) {worst_bound:.6}, max deviation {worst_sigma:.2} stderr"),
    )
}

fn c8_tradeoff() -> Outcome {
    let start = Instant::now();
    let (x, pi, ord) = e1();
    let w = |s: &str| x.parse_word(s).unwrap();
    let sm = SwapMap::new(&x, &pi, &w("aaa"), &w("aba"), false).unwrap();
    let base = MarkovMeasure::iid(&x, &[0.5, 0.0, 0.5]).unwrap();
    let sel = select_t(&x, &pi, 0.1).unwrap();
    let f = dini_potential(&x, &pi, &ord, sel.t, 3).unwrap();
    let cfg = TradeoffConfig {
        p_grid: vec![0.1, 0.05, 0.02, 0.01],
        length: 1_000_000,
        replicates: 20,
        seed: 2026,
        k: 2,
        sigmas: SIGMAS,
    };
    let r = tradeoff_experiment(&x, &base, &sm, &f, &cfg, Execution::default()).unwrap();
    let t = start.elapsed();
    let ratios: Vec<String> =
        r.points.iter().map(|s| format!("{}: {:.4}±{:.4}", s.p, s.ratio.mean, s.ratio.stderr)).collect();
    outcome(
        r.pass() && t < TRADEOFF_TIME,
        format!("gains positive {}, ratios [{}], {t:?}", r.gains_positive, ratios.join(", ")),
    )
}

fn c9_kac_abramov() -> Outcome {
    let f2 = ShiftSpace::full(&["0", "1"]).unwrap();
    let coin = MarkovMeasure::iid(&f2, &[0.5, 0.5]).unwrap();
    let g = golden_mean();
    let parry = equilibrium_markov(&g, &Potential::constant(2, 0.0)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, space, m) in [("coin", &f2, &coin), ("parry", &g, &parry)] {
        let r = kac_abramov_check(m, &space.parse_word("1").unwrap(), 1_000_000, 2026).unwrap();
        pass &= r.pass();
        parts.push(format!(
            "{name}: return {:.4} vs {:.4}, abramov {:.4} vs {:.4}",
            r.mean_return.mean, r.kac_target, r.abramov.mean, r.abramov_target
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c10_relative_entropy() -> Outcome {
    let (x, pi, _) = e1();
    let m = MarkovMeasure::iid(&x, &[1.0 / 3.0; 3]).unwrap();
    let b = relative_entropy_bracket(&m, &pi, 8).unwrap();
    let want = 2.0 / 3.0 * 2f64.ln();
    let err = (b.lower - want).abs().max((b.upper - want).abs());
    outcome(err <= CLOSED_FORM_TOL, format!("[{:.9}, {:.9}] vs {want:.9}", b.lower, b.upper))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("pressure exactness", c1_pressure),
        ("variational identity", c2_variational),
        ("compensation identity", c3_compensation),
        ("Walters-type desk theorem", c4_desk_theorem),
        ("p-Dini phase boundary", c5_dini_boundary),
        ("clothespin invariants", c6_clothespin),
        ("d-bar quadratic law", c7_dbar),
        ("tradeoff mechanism", c8_tradeoff),
        ("Kac and Abramov identities", c9_kac_abramov),
        ("relative entropy closed form", c10_relative_entropy),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {:<30} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
