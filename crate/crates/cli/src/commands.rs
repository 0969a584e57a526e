use crate::system::{parse_system, sha256_hex, System};
use crate::{Cli, Command};
use anyhow::{anyhow, bail, Context, Result};
use compfn::clothespin::{n_of, pin_kac_check, pin_process, pinnings, return_statistics};
use compfn::factor::{classify_factor, find_diamond, find_swap_pair, mpw_forbidden, SubshiftApprox};
use compfn::sim::{dbar_marker_vs_bernoulli, kac_abramov_check, tradeoff_experiment, SwapMap, TradeoffConfig};
use compfn::thermo::{
    compensation_check, dini_potential, dini_variation, equilibrium_markov, p_dini_report, pressure_sft, select_t,
    MarkovMeasure, PhiFamily, Potential, PERRON_TOL, STOCHASTIC_TOL,
};
use compfn::{Error, Execution};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::path::Path;

/// Confidence multiplier used by every Monte Carlo check.
const SIGMAS: f64 = 3.0;

pub struct Report {
    command: &'static str,
    spec_sha256: Option<String>,
    seed: Option<u64>,
    tolerances: Map<String, Value>,
    result: Value,
    csv_body: String,
    pub pass: Option<bool>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(command: &'static str, system: Option<&System>, result: Value, csv_body: String) -> Self {
        let mut tolerances = Map::new();
        tolerances.insert("perron_relative".into(), json!(PERRON_TOL));
        tolerances.insert("stochastic".into(), json!(STOCHASTIC_TOL));
        Report {
            command,
            spec_sha256: system.map(|s| s.sha256.clone()),
            seed: None,
            tolerances,
            result,
            csv_body,
            pass: None,
            warnings: system.map(|s| s.warnings.clone()).unwrap_or_default(),
        }
    }

    fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.into(), json!(value));
        self
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    fn header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!("compfn"));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        m.insert("spec_sha256".into(), json!(self.spec_sha256));
        m.insert("seed".into(), json!(self.seed));
        m.insert("tolerances".into(), Value::Object(self.tolerances.clone()));
        m.insert("pass".into(), json!(self.pass));
        m
    }

    pub fn json(&self) -> String {
        let mut m = self.header();
        m.insert("warnings".into(), json!(self.warnings));
        m.insert("result".into(), self.result.clone());
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
        s.push('\n');
        s
    }

    /// Header as `# key=value` comment lines, then the command's rows.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.header() {
            out.push_str(&format!("# {k}={}\n", scalar(&v)));
        }
        out.push_str(&self.csv_body);
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn load_system(path: &Path) -> Result<System> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_system(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_potential(system: &System, path: Option<&Path>) -> Result<(Potential, String)> {
    let Some(path) = path else {
        return Ok((Potential::constant(system.space.len(), 0.0), "zero".into()));
    };
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value =
        serde_json::from_slice(&bytes).map_err(|e| anyhow!("{}: line {}: {e}", path.display(), e.line()))?;
    let f = Potential::from_json(system.space.names(), &value).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    f.check_total(&system.space).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((f, format!("sha256:{}", sha256_hex(&bytes))))
}

fn parse_list(field: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("--{field}: `{s}` is not a number")))
        .collect()
}

fn require_seed(cli: &Cli) -> Result<u64> {
    cli.seed.ok_or_else(|| anyhow!("--seed is required for this command"))
}

fn choose_t(system: &System, t: Option<f64>, epsilon: f64) -> Result<(f64, Value)> {
    match t {
        Some(t) => Ok((t, json!({"source": "given"}))),
        None => {
            let s = select_t(&system.space, &system.code, epsilon)?;
            Ok((s.t, json!({"source": "selected", "epsilon": epsilon, "log_bound": s.log_bound, "certified": s.certified})))
        }
    }
}

fn iid_from_names(system: &System, spec: &str) -> Result<MarkovMeasure> {
    let mut probs = vec![0.0; system.space.len()];
    for part in spec.split(',') {
        let (name, p) = part.split_once(':').ok_or_else(|| anyhow!("--base: expected `symbol:probability`"))?;
        let s = system.space.index_of(name.trim()).ok_or_else(|| anyhow!("--base: unknown symbol `{name}`"))?;
        probs[s] = p.trim().parse().map_err(|_| anyhow!("--base: `{p}` is not a number"))?;
    }
    Ok(MarkovMeasure::iid(&system.space, &probs)?)
}

pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Analyze { spec, max_len } => {
            let sys = load_system(&spec.spec)?;
            let (x, pi) = (&sys.space, &sys.code);
            let diamond = find_diamond(x, pi, *max_len)?.map(|d| [x.format_word(&d.u.symbols), x.format_word(&d.v.symbols)]);
            let class = classify_factor(x, pi)?;
            let irreducible = x.is_irreducible();
            let result = json!({
                "irreducible": irreducible,
                "classification": class,
                "diamond": diamond,
                "diamond_max_len": max_len,
                "alphabet": x.names(),
                "image_alphabet": pi.label_names(),
                "trimmed": x.trimmed(),
            });
            let mut csv = format!("field,value\nirreducible,{irreducible}\nclassification,{class:?}\n");
            if let Some([u, v]) = &diamond {
                csv.push_str(&format!("diamond_u,{u}\ndiamond_v,{v}\n"));
            }
            Ok(Report::new("analyze", Some(&sys), result, csv))
        }
        Command::Mpw { spec, max_len, context_len } => {
            let sys = load_system(&spec.spec)?;
            let (x, pi, ord) = (&sys.space, &sys.code, &sys.order);
            let forbidden: Vec<String> =
                mpw_forbidden(x, pi, ord, *max_len)?.iter().map(|w| x.format_word(&w.symbols)).collect();
            let z = SubshiftApprox::mpw(x, pi, ord, *max_len)?;
            let swap = match find_swap_pair(x, pi, &z, *max_len, *context_len) {
                Ok(Some(p)) => json!({
                    "u": x.format_word(&p.u), "v": x.format_word(&p.v), "verified_length": p.verified_length
                }),
                Ok(None) => json!({"note": format!("no swap pair with |u| <= {max_len}")}),
                Err(Error::PreconditionViolation(m)) => json!({"note": m}),
                Err(e) => return Err(e.into()),
            };
            let result = json!({"max_len": max_len, "forbidden": forbidden, "swap_pair": swap});
            let mut csv = String::from("forbidden\n");
            forbidden.iter().for_each(|w| csv.push_str(&format!("{w}\n")));
            Ok(Report::new("mpw", Some(&sys), result, csv))
        }
        Command::Pressure { spec, potential } => {
            let sys = load_system(&spec.spec)?;
            let (f, source) = load_potential(&sys, potential.as_deref())?;
            let p = pressure_sft(&sys.space, &f)?;
            let result = json!({"pressure": p, "potential": source});
            Ok(Report::new("pressure", Some(&sys), result, format!("pressure\n{p}\n")))
        }
        Command::Equilibrium { spec, potential } => {
            let sys = load_system(&spec.spec)?;
            let (f, source) = load_potential(&sys, potential.as_deref())?;
            let m = equilibrium_markov(&sys.space, &f)?;
            let names: Vec<String> = m.states().iter().map(|s| sys.space.format_word(s)).collect();
            let mut rows = Vec::new();
            let mut csv = String::from("from,to,probability\n");
            for (i, row) in m.rows().iter().enumerate() {
                for &(j, p) in row {
                    rows.push(json!([names[i], names[j], p]));
                    csv.push_str(&format!("{},{},{p}\n", names[i], names[j]));
                }
            }
            let result = json!({
                "potential": source,
                "states": names,
                "transitions": rows,
                "stationary": m.stationary(),
                "entropy": m.entropy(),
                "integral": m.integral(&f)?,
                "pressure": pressure_sft(&sys.space, &f)?,
            });
            Ok(Report::new("equilibrium", Some(&sys), result, csv))
        }
        Command::CheckCompensation { spec, potential, t, radius, phi_grid, phi_range, phi_random, tol } => {
            let sys = load_system(&spec.spec)?;
            let (f, source, t_info) = match potential {
                Some(path) => {
                    let (f, s) = load_potential(&sys, Some(path))?;
                    (f, s, Value::Null)
                }
                None => {
                    let (t, info) = choose_t(&sys, *t, 0.1)?;
                    let f = dini_potential(&sys.space, &sys.code, &sys.order, t, *radius)?;
                    (f, format!("compensation function, t = {t}, radius {radius}"), info)
                }
            };
            if !(1..=2).contains(phi_range) {
                bail!("--phi-range must be 1 or 2");
            }
            let values = parse_list("phi-grid", phi_grid)?;
            let labels = sys.code.label_count();
            let mut parts = vec![PhiFamily::grid(labels, 1, &values)?];
            if *phi_range == 2 {
                parts.push(PhiFamily::grid(labels, 2, &values)?);
            }
            let mut report_seed = None;
            if *phi_random > 0 {
                let seed = require_seed(cli).context("random φ tables (use --phi-random 0 to skip them)")?;
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                parts.push(PhiFamily::random(labels, 2, *phi_random, lo, hi, seed)?);
                report_seed = Some(seed);
            }
            let description = parts.iter().map(|p| p.description.as_str()).collect::<Vec<_>>().join("; ");
            let family = PhiFamily::new(description, parts.into_iter().flat_map(|p| p.members).collect());
            let r = compensation_check(&sys.space, &sys.code, &f, &family, *tol, Execution::default())?;
            let mut csv = String::from("phi,pressure_x,pressure_y,gap\n");
            for g in &r.gaps {
                csv.push_str(&format!("{},{},{},{}\n", g.phi, g.pressure_x, g.pressure_y, g.gap));
            }
            let pass = r.pass;
            let result = json!({"potential": source, "t": t_info, "report": to_value(&r)});
            let mut rep = Report::new("check-compensation", Some(&sys), result, csv).tolerance("max_gap", *tol).pass(pass);
            if let Some(s) = report_seed {
                rep = rep.seed(s);
            }
            Ok(rep)
        }
        Command::Dini { spec, p, radius, t, epsilon } => {
            let sys = load_system(&spec.spec)?;
            let (t, info) = choose_t(&sys, *t, *epsilon)?;
            let v = dini_variation(&sys.space, &sys.code, &sys.order, t, *radius)?;
            let mut reports = Vec::new();
            let mut csv = String::from("p,verdict,partial_sum,tail_bound\n");
            for p in parse_list("p", p)? {
                let r = p_dini_report(&v, p)?;
                csv.push_str(&format!(
                    "{},{:?},{},{}\n",
                    r.p,
                    r.verdict,
                    r.partial_sum,
                    r.tail_bound.map(|b| b.to_string()).unwrap_or_default()
                ));
                reports.push(to_value(&r));
            }
            let result = json!({"t": t, "t_selection": info, "variations": to_value(&v), "reports": reports});
            Ok(Report::new("dini", Some(&sys), result, csv))
        }
        Command::Clothespin { spec, word, center, start } => {
            let sys = load_system(&spec.spec)?;
            let (x, pi, ord) = (&sys.space, &sys.code, &sys.order);
            let w = x.parse_word(word)?;
            let pins = pin_process(x, pi, ord, &w, *start)?;
            let center = center.unwrap_or(w.len() / 2);
            let n = n_of(x, pi, ord, &w, center)?;
            let classes = pinnings(x, pi, ord, &w)?;
            let result = json!({
                "word": word,
                "start": start,
                "pins": pins.pins,
                "truncated": pins.truncated,
                "center": center,
                "n": to_value(&n),
                "pinnings": classes.count(),
                "representatives": classes.representatives.iter().map(|p| p.pins.clone()).collect::<Vec<_>>(),
            });
            let mut csv = String::from("position,symbol,pin\n");
            for (i, &s) in w.symbols.iter().enumerate() {
                csv.push_str(&format!("{i},{},{}\n", x.name(s), u8::from(pins.pins.contains(&i))));
            }
            Ok(Report::new("clothespin", Some(&sys), result, csv))
        }
        Command::Returns { spec, potential, length } => {
            let sys = load_system(&spec.spec)?;
            let seed = require_seed(cli)?;
            let (f, source) = load_potential(&sys, potential.as_deref())?;
            let m = equilibrium_markov(&sys.space, &f)?;
            let (x, pi, ord) = (&sys.space, &sys.code, &sys.order);
            let stats = return_statistics(x, pi, ord, &m, *length, seed)?;
            let kac = pin_kac_check(x, pi, ord, &m, *length, seed, SIGMAS)?;
            let result = json!({
                "sampler": source,
                "statistics": stats.to_json(x.names()),
                "mean_first_return": stats.mean_first_return(),
                "kac": to_value(&kac),
            });
            Ok(Report::new("returns", Some(&sys), result, stats.to_csv(x.names()))
                .seed(seed)
                .tolerance("sigmas", SIGMAS)
                .pass(kac.pass))
        }
        Command::SimulateTradeoff { spec, p_grid, length, seeds, u, v, both_ways, base, t, epsilon, radius, k } => {
            let sys = load_system(&spec.spec)?;
            let seed = require_seed(cli)?;
            let (x, pi, ord) = (&sys.space, &sys.code, &sys.order);
            let sm = SwapMap::new(x, pi, &x.parse_word(u)?, &x.parse_word(v)?, *both_ways)?;
            let base_m = iid_from_names(&sys, base)?;
            let (t, info) = choose_t(&sys, *t, *epsilon)?;
            let f = dini_potential(x, pi, ord, t, *radius)?;
            let config = TradeoffConfig {
                p_grid: parse_list("p-grid", p_grid)?,
                length: *length,
                replicates: *seeds,
                seed,
                k: *k,
                sigmas: SIGMAS,
            };
            let r = tradeoff_experiment(x, &base_m, &sm, &f, &config, Execution::default())?;
            let result = json!({
                "u": u, "v": v, "base": base, "t": t, "t_selection": info, "radius": radius,
                "report": to_value(&r),
            });
            Ok(Report::new("simulate-tradeoff", Some(&sys), result, r.to_csv())
                .seed(seed)
                .tolerance("sigmas", SIGMAS)
                .pass(r.pass()))
        }
        Command::CheckKacAbramov { spec, cylinder, potential, length } => {
            let sys = load_system(&spec.spec)?;
            let seed = require_seed(cli)?;
            let (f, source) = load_potential(&sys, potential.as_deref())?;
            let m = equilibrium_markov(&sys.space, &f)?;
            let r = kac_abramov_check(&m, &sys.space.parse_word(cylinder)?, *length, seed)?;
            let csv = format!(
                "identity,estimate,stderr,target,pass\nkac,{},{},{},{}\nabramov,{},{},{},{}\n",
                r.mean_return.mean,
                r.mean_return.stderr,
                r.kac_target,
                r.kac_pass,
                r.abramov.mean,
                r.abramov.stderr,
                r.abramov_target,
                r.abramov_pass
            );
            let result = json!({"measure": format!("equilibrium state of {source}"), "cylinder": cylinder, "report": to_value(&r)});
            Ok(Report::new("check-kac-abramov", Some(&sys), result, csv)
                .seed(seed)
                .tolerance("sigmas", SIGMAS)
                .pass(r.pass()))
        }
        Command::Dbar { p, n, samples } => {
            let seed = require_seed(cli)?;
            let r = dbar_marker_vs_bernoulli(*p, *n, *samples, seed)?;
            let csv = format!(
                "p,n,samples,exact,estimate,stderr,quadratic_bound\n{},{},{},{},{},{},{}\n",
                r.p, r.n, r.samples, r.exact, r.estimate, r.stderr, r.quadratic_bound
            );
            Ok(Report::new("dbar", None, to_value(&r), csv)
                .seed(seed)
                .tolerance("sigmas", r.sigmas)
                .pass(r.agrees && r.within_bound))
        }
        Command::Validate { path } => {
            let sys = load_system(path)?;
            let result = json!({
                "valid": true,
                "alphabet": sys.space.names(),
                "image_alphabet": sys.code.label_names(),
                "transitions": sys.space.transition_count(),
                "trimmed": sys.space.trimmed(),
            });
            let csv = format!("field,value\nvalid,true\nsymbols,{}\n", sys.space.len());
            Ok(Report::new("validate", Some(&sys), result, csv))
        }
    }
}
