use anyhow::{bail, Context};
use serde_json::{json, Value as Json};
use symq::classical::{
    alpha_distance, exact_classical_bias, monte_carlo, sample_outcomes, BiasReport, Envelope, FnkClassical,
    FnklSampler, KravchukEstimator, Provenance, QueryAlgorithm, SamplerVariant,
};
use symq::exec::{self, Execution};
use symq::measures::{measure_report, paturi_bound};
use symq::numeric::{format_rational, rational_to_f64};
use symq::profile::{make_fnk, make_fnkl};
use symq::quantum::{fnkl_quantum, ChebyshevAlgorithm, FnkQuantum, FnklQuantum, FnklRegime, WeightClassifier};
use symq::verify::{run_suite, VerifyOptions};
use symq::{Rational, WeightProfile};

use crate::output::{emit, render, Format, Table};
use crate::{BiasArgs, Common, MeasuresArgs, Mode, Side, SimulateArgs, SweepArgs, VerifyArgs};

/// The two named families get dedicated algorithms; everything else goes through the generic ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Fnk { n: usize, k: usize },
    Fnkl { n: usize, k: usize, l: usize },
    Other,
}

fn family(f: &WeightProfile) -> Family {
    let n = f.n();
    let (ones, zeros) = (f.ones(), f.zeros());
    if let (&[l], &[k]) = (ones.as_slice(), zeros.as_slice()) {
        if k < l {
            return Family::Fnkl { n, k, l };
        }
    }
    if let Some(&k) = ones.first() {
        if make_fnk(n, k).is_ok_and(|g| &g == f) {
            return Family::Fnk { n, k };
        }
    }
    Family::Other
}

fn rational(r: &Rational) -> Json {
    Json::String(format_rational(r))
}

fn float(x: f64) -> Json {
    serde_json::Number::from_f64(x).map(Json::Number).unwrap_or(Json::Null)
}

fn opt_float(x: Option<f64>) -> Json {
    x.map(float).unwrap_or(Json::Null)
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::ProofExplicit => "proof-explicit",
        Provenance::Calibrated => "calibrated",
    }
}

fn regime_name(r: FnklRegime) -> &'static str {
    match r {
        FnklRegime::LinearGap => "linear-gap",
        FnklRegime::Direct => "direct",
        FnklRegime::Truncated => "truncated",
        FnklRegime::PhaseSelected => "phase-selected",
        FnklRegime::Capped => "capped",
    }
}

fn fnkl_regime_label(q: &FnklQuantum) -> String {
    let text = match q.plan.regime {
        FnklRegime::LinearGap => "4(l−k) ≥ n",
        FnklRegime::Direct => "T ≤ ¼√(n/l)",
        FnklRegime::Truncated => "¼√(n/l) < T < 3π√(n/l)",
        FnklRegime::PhaseSelected => "3π√(n/l) ≤ T ≤ √((n−k)l)/(4√3π(l−k))",
        FnklRegime::Capped => "T > √((n−k)l)/(4√3π(l−k))",
    };
    format!("{}: {text}", regime_name(q.plan.regime))
}

fn library_provenance() -> Json {
    json!({
        "library": format!("symq-core {}", env!("CARGO_PKG_VERSION")),
        "rationals": "exact values rendered as p/q",
        "envelope_constants": {
            "fnk_classical": "proof-explicit",
            "fnk_quantum": "proof-explicit",
            "fnkl_quantum": "proof-explicit",
            "fnkl_sampler": "proof-explicit"
        }
    })
}

fn finish(table: &Table, format: Format, out: Option<&std::path::Path>, config: Json) -> anyhow::Result<()> {
    let text = render(table, format, config, library_provenance())?;
    emit(&text, out)
}

fn common_config(command: &str, spec: &str, common: &Common) -> serde_json::Map<String, Json> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("spec".into(), json!(spec));
    m.insert("seed".into(), json!(common.seed.to_string()));
    m.insert("format".into(), json!(format!("{:?}", common.format).to_lowercase()));
    m
}

pub fn measures(args: &MeasuresArgs) -> anyhow::Result<bool> {
    let f = &args.spec.profile;
    let report = measure_report(f, &args.eps)?;
    let mut table = Table::new(vec!["measure", "value"]);
    table.push(vec![json!("bs"), json!(report.bs)]);
    table.push(vec![json!("fbs"), rational(&report.fbs)]);
    table.push(vec![json!("deg"), json!(report.deg)]);
    for (eps, d) in &report.adeg {
        table.push(vec![json!(format!("adeg[{eps}]")), json!(d)]);
    }
    table.push(vec![json!("tight_bs"), rational(&report.tight_bs_formula)]);
    table.push(vec![json!("tight_q"), float(report.tight_q_formula)]);
    if let Some(beta) = &args.beta {
        let b = rational_to_f64(beta);
        let mut best: Option<f64> = None;
        for p in f.sensitive_pairs() {
            let v = paturi_bound(f.n(), p.k, p.l, b)?;
            best = Some(best.map_or(v, |x: f64| x.max(v)));
        }
        table.push(vec![json!(format!("paturi_bound[{}]", format_rational(beta))), opt_float(best)]);
    }
    table.push(vec![json!("lp_backend"), json!(format!("{:?}", report.lp_backend).to_lowercase())]);
    let mut config = common_config("measures", &args.spec.text, &args.common);
    config.insert("eps".into(), json!(args.eps.iter().map(format_rational).collect::<Vec<_>>()));
    config.insert("beta".into(), args.beta.as_ref().map(rational).unwrap_or(Json::Null));
    finish(&table, args.common.format, args.common.out.as_deref(), Json::Object(config))?;
    Ok(true)
}

const BIAS_HEADERS: [&str; 9] =
    ["T", "bias", "bias_value", "lower_env", "upper_env", "envelope_provenance", "tv_half", "regime", "flag"];

struct BiasRow {
    t: usize,
    bias: Option<Json>,
    bias_value: Option<f64>,
    envelope: Envelope,
    tv_half: Option<Rational>,
    regime: String,
    flag: String,
}

impl BiasRow {
    fn flagged(t: usize, flag: impl Into<String>) -> Self {
        Self {
            t,
            bias: None,
            bias_value: None,
            envelope: Envelope::none(),
            tv_half: None,
            regime: String::new(),
            flag: flag.into(),
        }
    }

    fn exact(t: usize, bias: &Rational, envelope: Envelope, regime: String) -> Self {
        Self {
            t,
            bias: Some(rational(bias)),
            bias_value: Some(rational_to_f64(bias)),
            envelope,
            tv_half: None,
            regime,
            flag: String::new(),
        }
    }

    fn approx(t: usize, bias: f64, envelope: Envelope, regime: String) -> Self {
        Self { t, bias: Some(float(bias)), bias_value: Some(bias), envelope, tv_half: None, regime, flag: String::new() }
    }

    fn cells(self) -> Vec<Json> {
        let has_env = self.envelope.lower.is_some() || self.envelope.upper.is_some();
        vec![
            json!(self.t),
            self.bias.unwrap_or(Json::Null),
            opt_float(self.bias_value),
            opt_float(self.envelope.lower),
            opt_float(self.envelope.upper),
            if has_env { json!(provenance_name(self.envelope.provenance)) } else { Json::Null },
            self.tv_half.as_ref().map(rational).unwrap_or(Json::Null),
            json!(self.regime),
            json!(self.flag),
        ]
    }
}

fn fnk_classical_regime(n: usize, k: usize, t: usize) -> String {
    if t == 1 {
        "T = 1".into()
    } else if t * k <= n {
        "2 ≤ T ≤ n/k".into()
    } else {
        "T > n/k".into()
    }
}

fn fnk_quantum_regime(n: usize, k: usize, t: usize) -> String {
    if (t * t * k) as f64 <= n as f64 {
        "T ≤ √(n/k)".into()
    } else {
        "T > √(n/k)".into()
    }
}

fn sampler_regime(report: &BiasReport<Rational>) -> String {
    if report.envelope.lower.is_some() {
        "T·d_H² ≤ 1".into()
    } else {
        "T·d_H² > 1".into()
    }
}

fn classical_envelope(fam: Family, t: usize) -> symq::Result<(Envelope, String)> {
    Ok(match fam {
        Family::Fnk { n, k } => (FnkClassical::new(n, k, t)?.analytic().envelope, fnk_classical_regime(n, k, t)),
        Family::Fnkl { n, k, l } => {
            let r = FnklSampler::new(n, k, l, t, SamplerVariant::Padded)?.analytic();
            (r.envelope, sampler_regime(&r))
        }
        Family::Other => (Envelope::none(), String::new()),
    })
}

fn bias_row(args: &BiasArgs, fam: Family, t: usize) -> symq::Result<BiasRow> {
    let f = &args.spec.profile;
    let n = f.n();
    let tv_half = || -> symq::Result<Option<Rational>> {
        if t > n {
            return Ok(None);
        }
        Ok(Some(alpha_distance(f, t)? / Rational::from_integer(2.into())))
    };
    let mut row = match (args.side, args.mode) {
        (Side::Classical, Mode::Lp) => {
            if t > n {
                return Ok(BiasRow::flagged(t, "T > n"));
            }
            let lp = exact_classical_bias(f, t)?;
            let (env, regime) = classical_envelope(fam, t)?;
            BiasRow::exact(t, &lp.bias, env, regime)
        }
        (Side::Classical, Mode::Simulate) => match fam {
            Family::Fnk { n, k } => {
                let r = FnkClassical::new(n, k, t)?.analytic();
                BiasRow::exact(t, &r.worst_case_bias, r.envelope, fnk_classical_regime(n, k, t))
            }
            Family::Fnkl { n, k, l } => {
                let r = FnklSampler::new(n, k, l, t, SamplerVariant::Padded)?.analytic();
                let regime = sampler_regime(&r);
                BiasRow::exact(t, &r.worst_case_bias, r.envelope, regime)
            }
            Family::Other if f.is_total() => {
                let est = KravchukEstimator::new(f, &args.eps, &args.delta)?;
                let r = est.analytic(f);
                let mut row = BiasRow::exact(est.queries, &r.worst_case_bias, r.envelope, "Kravchuk estimator".into());
                if est.queries != t {
                    row.flag = format!("T fixed by algorithm (requested {t})");
                }
                return Ok(row);
            }
            Family::Other => return Ok(BiasRow::flagged(t, "no classical algorithm for this partial function")),
        },
        (Side::Classical, Mode::Bound) => {
            let (env, regime) = classical_envelope(fam, t)?;
            let mut row = BiasRow::flagged(t, "");
            row.envelope = env;
            row.regime = regime;
            row
        }
        (Side::Quantum, Mode::Simulate) => match fam {
            Family::Fnk { n, k } => {
                let r = FnkQuantum::new(n, k, t)?.analytic();
                BiasRow::approx(t, r.worst_case_bias, r.envelope, fnk_quantum_regime(n, k, t))
            }
            Family::Fnkl { n, k, l } => {
                let q = fnkl_quantum(n, k, l, t)?;
                let mut row = BiasRow::approx(t, q.report.worst_case_bias, q.report.envelope, fnkl_regime_label(&q));
                if q.plan.regime == FnklRegime::Capped {
                    row.flag = format!("capped: ran with T = {}", q.plan.t_used);
                }
                row
            }
            Family::Other if f.is_even() => {
                let alg = ChebyshevAlgorithm::new(f, &args.eps)?;
                let r = alg.analytic(f);
                let q = alg.witness.queries();
                let mut row = BiasRow::exact(q, &r.worst_case_bias, r.envelope, "Chebyshev walk".into());
                if q != t {
                    row.flag = format!("T fixed by algorithm (requested {t})");
                }
                return Ok(row);
            }
            Family::Other if f.is_total() => {
                let c = WeightClassifier::new(f)?;
                let mut worst = f64::INFINITY;
                for w in f.defined_weights() {
                    worst = worst.min(c.success(f, w)? - 0.5);
                }
                let mut row = BiasRow::approx(c.t, worst, Envelope::none(), "amplitude estimation".into());
                if c.t != t {
                    row.flag = format!("T fixed by algorithm (requested {t})");
                }
                return Ok(row);
            }
            Family::Other => return Ok(BiasRow::flagged(t, "no quantum algorithm for this partial function")),
        },
        (Side::Quantum, Mode::Bound) => match fam {
            Family::Fnk { n, k } => {
                let r = FnkQuantum::new(n, k, t)?.analytic();
                let mut row = BiasRow::flagged(t, "");
                row.envelope = r.envelope;
                row.regime = fnk_quantum_regime(n, k, t);
                row
            }
            Family::Fnkl { n, k, l } => {
                let q = fnkl_quantum(n, k, l, t)?;
                let mut row = BiasRow::flagged(t, "");
                row.envelope = q.report.envelope;
                row.regime = fnkl_regime_label(&q);
                row
            }
            Family::Other => BiasRow::flagged(t, "no envelope for this function"),
        },
        (Side::Quantum, Mode::Lp) => unreachable!("rejected during argument parsing"),
    };
    if args.side == Side::Classical {
        row.tv_half = tv_half()?;
    }
    Ok(row)
}

pub fn bias(args: &BiasArgs) -> anyhow::Result<bool> {
    let fam = family(&args.spec.profile);
    let mut table = Table::new(BIAS_HEADERS.to_vec());
    for &t in &args.t.0 {
        let row = bias_row(args, fam, t).unwrap_or_else(|e| BiasRow::flagged(t, e.to_string()));
        table.push(row.cells());
    }
    let mut config = common_config("bias", &args.spec.text, &args.common);
    config.insert("side".into(), json!(args.side));
    config.insert("mode".into(), json!(args.mode));
    config.insert("T".into(), json!(args.t));
    config.insert("eps".into(), rational(&args.eps));
    config.insert("delta".into(), rational(&args.delta));
    finish(&table, args.common.format, args.common.out.as_deref(), Json::Object(config))?;
    Ok(true)
}

enum Simulated {
    Classical(Box<dyn QueryAlgorithm>, BiasReport<f64>),
    Quantum(BiasReport<f64>),
}

fn simulated(args: &SimulateArgs, t: usize) -> anyhow::Result<(usize, Simulated)> {
    let f = &args.spec.profile;
    let fam = family(f);
    Ok(match (args.side, fam) {
        (Side::Classical, Family::Fnk { n, k }) => {
            let alg = FnkClassical::new(n, k, t)?;
            let r = alg.analytic().to_f64();
            (t, Simulated::Classical(Box::new(alg), r))
        }
        (Side::Classical, Family::Fnkl { n, k, l }) => {
            let alg = FnklSampler::new(n, k, l, t, SamplerVariant::Padded)?;
            let r = alg.analytic().to_f64();
            (t, Simulated::Classical(Box::new(alg), r))
        }
        (Side::Classical, Family::Other) => {
            let alg = KravchukEstimator::new(f, &args.eps, &args.delta)?;
            let r = alg.analytic(f).to_f64();
            (alg.queries, Simulated::Classical(Box::new(alg), r))
        }
        (Side::Quantum, Family::Fnk { n, k }) => (t, Simulated::Quantum(FnkQuantum::new(n, k, t)?.analytic())),
        (Side::Quantum, Family::Fnkl { n, k, l }) => (t, Simulated::Quantum(fnkl_quantum(n, k, l, t)?.report)),
        (Side::Quantum, Family::Other) if f.is_even() => {
            let alg = ChebyshevAlgorithm::new(f, &args.eps)?;
            (alg.witness.queries(), Simulated::Quantum(alg.analytic(f).to_f64()))
        }
        (Side::Quantum, Family::Other) => {
            let c = WeightClassifier::new(f)?;
            let per = f.defined_weights().into_iter().map(|w| Ok((w, c.success(f, w)?))).collect::<symq::Result<_>>()?;
            (c.t, Simulated::Quantum(BiasReport::new(per, Envelope::none())))
        }
    })
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<bool> {
    let f = &args.spec.profile;
    let weights = match &args.weight {
        Some(list) => list.0.clone(),
        None => f.defined_weights(),
    };
    for &w in &weights {
        if f.bit(w).is_none() {
            bail!("weight {w} is outside the promise of {}", args.spec.text);
        }
    }
    let mut table =
        Table::new(vec!["T", "weight", "value", "analytic_success", "empirical_success", "ci_half_width", "consistent"]);
    let exec = Execution::default();
    let mut row_index = 0u64;
    let mut seen = Vec::new();
    for &requested in &args.t.0 {
        let (t, sim) = simulated(args, requested).with_context(|| format!("T = {requested}"))?;
        if seen.contains(&t) {
            continue;
        }
        seen.push(t);
        for &w in &weights {
            let seed = args.common.seed.wrapping_add(row_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            row_index += 1;
            let (analytic, est) = match &sim {
                Simulated::Classical(alg, r) => {
                    let p = *r.success(w).context("weight missing from report")?;
                    (p, monte_carlo(alg.as_ref(), f, w, args.trials, seed, exec)?)
                }
                Simulated::Quantum(r) => {
                    let p = *r.success(w).context("weight missing from report")?;
                    (p, sample_outcomes(p.clamp(0.0, 1.0), args.trials, seed, exec)?)
                }
            };
            table.push(vec![
                json!(t),
                json!(w),
                json!(u8::from(f.bit(w) == Some(true))),
                float(analytic),
                float(est.success_rate),
                float(est.ci_half_width),
                json!(est.contains(analytic)),
            ]);
        }
    }
    let mut config = common_config("simulate", &args.spec.text, &args.common);
    config.insert("side".into(), json!(args.side));
    config.insert("T".into(), json!(args.t));
    config.insert("trials".into(), json!(args.trials));
    config.insert("eps".into(), rational(&args.eps));
    config.insert("delta".into(), rational(&args.delta));
    finish(&table, args.common.format, args.common.out.as_deref(), Json::Object(config))?;
    Ok(true)
}

pub fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let opts = VerifyOptions { tolerance: args.tolerance, seed: args.common.seed, exec: Execution::default() };
    let mut table = Table::new(vec!["suite", "checks", "passed", "ok", "failures"]);
    let mut all_ok = true;
    for &suite in &args.suites.0 {
        let r = run_suite(suite, &opts)?;
        all_ok &= r.ok();
        table.push(vec![json!(suite.name()), json!(r.checks), json!(r.passed), json!(r.ok()), json!(r.failures)]);
    }
    let format = if args.json { Format::Json } else { args.common.format };
    let config = json!({
        "command": "verify",
        "suites": args.suites.0.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "tolerance": args.tolerance,
        "seed": args.common.seed.to_string(),
        "ok": all_ok,
    });
    finish(&table, format, args.common.out.as_deref(), config)?;
    Ok(all_ok)
}

pub const SWEEP_HEADERS: [&str; 11] = [
    "n",
    "k",
    "l",
    "T",
    "quantum_bias",
    "quantum_regime",
    "guaranteed_bias",
    "classical_bias",
    "classical_bias_T2",
    "ratio",
    "flag",
];

fn sweep_row(&(n, k, l, t): &(usize, usize, usize, usize)) -> Vec<Json> {
    let mut flags: Vec<String> = Vec::new();
    let mut cells = vec![json!(n), json!(k), json!(l), json!(t)];
    let f = match make_fnkl(n, k, l) {
        Ok(f) => f,
        Err(_) => {
            cells.extend(std::iter::repeat_n(Json::Null, 6));
            cells.push(json!("invalid: need k < l <= n"));
            return cells;
        }
    };
    let quantum = fnkl_quantum(n, k, l, t);
    let lp_at = |m: usize, flags: &mut Vec<String>, label: &str| -> Option<Rational> {
        if m > n {
            flags.push(format!("{label} > n"));
            return None;
        }
        match exact_classical_bias(&f, m) {
            Ok(lp) => Some(lp.bias),
            Err(e) => {
                flags.push(e.to_string());
                None
            }
        }
    };
    let classical = lp_at(t, &mut flags, "T");
    let classical_t2 = lp_at(t * t, &mut flags, "T^2");
    let mut q_bias = None;
    match &quantum {
        Ok(q) => {
            q_bias = Some(q.report.worst_case_bias);
            cells.push(float(q.report.worst_case_bias));
            cells.push(json!(regime_name(q.plan.regime)));
            cells.push(float(q.guaranteed_bias));
            if q.plan.regime == FnklRegime::Capped {
                flags.insert(0, format!("capped at T = {}", q.plan.t_used));
            }
        }
        Err(e) => {
            cells.extend([Json::Null, Json::Null, Json::Null]);
            flags.insert(0, e.to_string());
        }
    }
    cells.push(classical.as_ref().map(rational).unwrap_or(Json::Null));
    cells.push(classical_t2.as_ref().map(rational).unwrap_or(Json::Null));
    let ratio = match (&classical_t2, q_bias) {
        (Some(c), Some(q)) if q > 0.0 => Some(rational_to_f64(c) / (q * q)),
        _ => None,
    };
    cells.push(opt_float(ratio));
    cells.push(json!(flags.join("; ")));
    cells
}

pub fn sweep(args: &SweepArgs) -> anyhow::Result<bool> {
    let mut grid = Vec::new();
    for &n in &args.n.0 {
        for &k in &args.k.0 {
            for &l in &args.l.0 {
                for &t in &args.t.0 {
                    grid.push((n, k, l, t));
                }
            }
        }
    }
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let rows = exec::map(exec, &grid, sweep_row);
    let mut table = Table::new(SWEEP_HEADERS.to_vec());
    for r in rows {
        table.push(r);
    }
    let config = json!({ "command": "sweep", "n": args.n, "k": args.k, "l": args.l, "T": args.t });
    finish(&table, args.format, args.out.as_deref(), config)?;
    Ok(true)
}
