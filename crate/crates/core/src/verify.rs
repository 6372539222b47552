//! Invariant suites run by `symq verify`. Each suite counts individual checks and keeps the
//! first few failure messages.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::{amplify, exact_classical_bias, FnkClassical, OneSampleTest};
use crate::dist::{binom_hyper_tv_bound, binomial, hellinger_bernoulli_kl, hypergeometric, kravchuk_table, tv, DiscreteDistribution};
use crate::error::{invalid, Result, SymqError};
use crate::exec::{self, Execution};
use crate::measures::{approx_degree, block_sensitivity, degree, fractional_block_sensitivity, gap_witness, tight_bounds};
use crate::numeric::{binomial as binom, rat, rat_int, Rational, Scalar};
use crate::profile::{make_fnk, make_fnkl, Value, WeightProfile};
use crate::quantum::{
    amplitude_estimation_pmf, chebyshev_state_vector, elimination_all_patterns, fnk_driver_all_patterns, qe_fnk_window,
    weight_classifier, ChebyshevAlgorithm, FnkQuantum, OracleWiring,
};

const MAX_FAILURES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Distances,
    Kravchuk,
    Measures,
    Classical,
    Quantum,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Distances, Suite::Kravchuk, Suite::Measures, Suite::Classical, Suite::Quantum];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Distances => "distances",
            Suite::Kravchuk => "kravchuk",
            Suite::Measures => "measures",
            Suite::Classical => "classical",
            Suite::Quantum => "quantum",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SymqError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| SymqError::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Slack for floating-point comparisons. A negative value makes every float check fail.
    pub tolerance: f64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, seed: 0, exec: Execution::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: u64,
    pub passed: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks == self.passed
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    passed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg());
        }
    }

    fn at_least(&mut self, value: f64, bound: f64, tol: f64, what: &str) {
        self.check(value >= bound - tol, || format!("{what}: {value} < {bound}"));
    }

    fn close(&mut self, a: f64, b: f64, tol: f64, what: &str) {
        self.check((a - b).abs() <= tol, || format!("{what}: {a} != {b}"));
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.passed += other.passed;
        for f in other.failures {
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(f);
            }
        }
    }

    fn report(self, suite: Suite) -> SuiteReport {
        SuiteReport { suite, checks: self.checks, passed: self.passed, failures: self.failures }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let tally = match suite {
        Suite::Distances => distances(opts)?,
        Suite::Kravchuk => kravchuk(opts),
        Suite::Measures => measures(opts)?,
        Suite::Classical => classical(opts)?,
        Suite::Quantum => quantum(opts)?,
    };
    Ok(tally.report(suite))
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL.into_iter().map(|s| run_suite(s, opts)).collect()
}

/// `Σ_t C(T,t) K_l(t,T) K_m(t,T) = 2^T C(T,l) δ_{lm}` for every `0 ≤ l, m ≤ T ≤ 20`.
fn kravchuk(opts: &VerifyOptions) -> Tally {
    let per_len = exec::map_range(opts.exec, 21, |len| {
        let mut tally = Tally::default();
        let table = kravchuk_table(len);
        let weights: Vec<BigInt> = (0..=len as i64).map(|t| BigInt::from(binom(len as i64, t))).collect();
        for l in 0..=len as usize {
            for m in 0..=len as usize {
                let sum: BigInt = (0..=len as usize).map(|t| &weights[t] * &table[l][t] * &table[m][t]).sum();
                let expected = if l == m { (BigInt::from(1u8) << len) * &weights[l] } else { BigInt::from(0) };
                tally.check(sum == expected, || format!("orthogonality T={len} l={l} m={m}"));
            }
        }
        tally
    });
    let mut tally = Tally::default();
    for t in per_len {
        tally.merge(t);
    }
    tally
}

fn random_pair(rng: &mut ChaCha8Rng) -> Result<(DiscreteDistribution<Rational>, DiscreteDistribution<Rational>)> {
    let support = rng.gen_range(1..=8u64);
    let draw = |rng: &mut ChaCha8Rng| -> Result<DiscreteDistribution<Rational>> {
        let mut raw: Vec<i64> = (0..support).map(|_| rng.gen_range(0..20)).collect();
        if raw.iter().all(|&v| v == 0) {
            raw[0] = 1;
        }
        let total: i64 = raw.iter().sum();
        DiscreteDistribution::new(raw.into_iter().enumerate().map(|(i, v)| (i as u64, rat(v, total))))
    };
    Ok((draw(rng)?, draw(rng)?))
}

fn distances(opts: &VerifyOptions) -> Result<Tally> {
    let tol = opts.tolerance;
    let mut tally = Tally::default();
    for n in 1..=50u64 {
        for k in 0..n {
            for l in k + 1..=n {
                let h = hellinger_bernoulli_kl(n, k, l)?;
                tally.at_least(h.value, h.lower_env.to_f64(), tol, &format!("hellinger lower n={n} k={k} l={l}"));
                tally.at_least(h.upper_env.to_f64(), h.value, tol, &format!("hellinger upper n={n} k={k} l={l}"));
            }
        }
    }
    let rows = exec::map_range(opts.exec, 24, |i| -> Result<Tally> {
        let n = i + 1;
        let mut t = Tally::default();
        for draws in 1..=n {
            let bound = binom_hyper_tv_bound(n, draws)?;
            for k in 0..=n {
                let d = tv(&binomial(draws, rat(k as i64, n as i64))?, &hypergeometric(n, k, draws)?);
                t.check(d <= bound, || format!("binomial vs hypergeometric n={n} T={draws} k={k}"));
            }
        }
        Ok(t)
    });
    for r in rows {
        tally.merge(r?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..200 {
        let (p, q) = random_pair(&mut rng)?;
        let test = OneSampleTest::new(p.clone(), q.clone());
        let bias = test.worst_case_bias();
        tally.check(bias >= tv(&p, &q) / rat_int(4), || format!("one-sample guarantee pair {i}"));
        tally.check(bias == test.closed_form_bias(), || format!("one-sample closed form pair {i}"));
    }
    Ok(tally)
}

fn all_profiles(n: usize) -> impl Iterator<Item = WeightProfile> {
    let count = 3usize.pow(n as u32 + 1);
    (0..count).filter_map(move |mut code| {
        let values: Vec<Value> = (0..=n)
            .map(|_| {
                let v = match code % 3 {
                    0 => Value::Zero,
                    1 => Value::One,
                    _ => Value::Undefined,
                };
                code /= 3;
                v
            })
            .collect();
        WeightProfile::new(values).ok()
    })
}

fn measures(opts: &VerifyOptions) -> Result<Tally> {
    let mut tally = Tally::default();
    for n in 1..=6 {
        for f in all_profiles(n) {
            let bs = block_sensitivity(&f);
            let fbs = fractional_block_sensitivity(&f);
            let tb = tight_bounds(&f);
            tally.check(rat_int(bs as i64) <= fbs, || format!("bs <= fbs on {f}"));
            tally.check(fbs <= tb.tight_bs, || format!("fbs <= n/(l-k) on {f}"));
            tally.check(tb.tight_bs.clone() / rat_int(2) <= rat_int(bs as i64), || format!("bs >= n/(2(l-k)) on {f}"));
        }
    }
    for n in [8usize, 12] {
        let w = gap_witness(n)?;
        tally.check(degree(&w)? > n / 2, || format!("gap witness degree at n={n}"));
        tally.close(tight_bounds(&w).tight_q, 2f64.sqrt(), opts.tolerance, &format!("gap witness tight_q at n={n}"));
    }
    for n in 2..=10 {
        for k in 0..n {
            for l in k + 1..=n {
                let f = make_fnkl(n, k, l)?;
                let d = approx_degree(&f, &rat(1, 3))?;
                tally.check(d <= degree(&f)?, || format!("adeg <= deg on fnkl n={n} k={k} l={l}"));
            }
        }
    }
    Ok(tally)
}

fn classical(opts: &VerifyOptions) -> Result<Tally> {
    let tol = opts.tolerance;
    let mut tally = Tally::default();
    for n in 2..=12 {
        for k in 1..=n / 2 {
            let f = make_fnk(n, k)?;
            let mut prev = rat_int(-1);
            let mut first_half = None;
            for t in 1..=n {
                let v = exact_classical_bias(&f, t)?.bias;
                if t == 1 {
                    tally.check(v == rat_int(0), || format!("one-query bias n={n} k={k}"));
                }
                tally.check(v >= prev, || format!("LP monotone n={n} k={k} T={t}"));
                if first_half.is_none() && v == rat(1, 2) {
                    first_half = Some(t);
                }
                if t >= 2 && t * k <= n {
                    let alg = FnkClassical::new(n, k, t)?.analytic();
                    let b = v.to_f64();
                    tally.at_least(b, alg.worst_case_bias.to_f64(), tol, &format!("LP above sampler n={n} k={k} T={t}"));
                    tally.at_least(b, alg.envelope.lower.unwrap_or(0.0), tol, &format!("lower envelope n={n} k={k} T={t}"));
                    tally.at_least(alg.envelope.upper.unwrap_or(1.0), b, tol, &format!("upper envelope n={n} k={k} T={t}"));
                }
                prev = v;
            }
            tally.check(first_half == Some(n - k + 1), || format!("zero-error endpoint n={n} k={k}: {first_half:?}"));
        }
    }
    for num in 1..=10i64 {
        let eps = rat(num, 40);
        for runs in [1u64, 4, 9, 25, 100] {
            let a = amplify(&eps, runs)?;
            tally.at_least(a.bias.to_f64(), a.lower_env, tol, &format!("amplification eps={num}/40 N={runs}"));
        }
    }
    Ok(tally)
}

fn random_even(rng: &mut ChaCha8Rng, n: usize) -> Option<WeightProfile> {
    let half: Vec<u8> = (0..=n / 2).map(|_| rng.gen_range(0..3)).collect();
    let values = (0..=n)
        .map(|w| match half[w.min(n - w)] {
            0 => Value::Zero,
            1 => Value::One,
            _ => Value::Undefined,
        })
        .collect();
    WeightProfile::new(values).ok()
}

fn quantum(opts: &VerifyOptions) -> Result<Tally> {
    let tol = opts.tolerance;
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for n in [8usize, 16, 64] {
        for k in 1..=n / 2 {
            let w = qe_fnk_window(n, k)?;
            tally.check(w.upper.zip(w.lower).is_some_and(|(u, l)| u - l == 2), || format!("exact window width n={n} k={k}"));
            for t in 1..=6 {
                let q = FnkQuantum::new(n, k, t)?;
                tally.close(q.success(k)?, q.success(n - k)?, tol, &format!("fnk symmetry n={n} k={k} T={t}"));
            }
            let f = make_fnk(n, k)?;
            for w in f.defined_weights() {
                let ok = fnk_driver_all_patterns(n, k, w)?.iter().all(|r| Some(r.output) == f.bit(w));
                tally.check(ok, || format!("fnk exact driver n={n} k={k} w={w}"));
            }
        }
    }
    let guarantee = 8.0 / (PI * PI);
    for _ in 0..100 {
        let a: f64 = rng.gen();
        let t = rng.gen_range(1..=64);
        let pmf = amplitude_estimation_pmf(a, t)?;
        tally.close(pmf.dist.mass(|_| true), 1.0, tol, &format!("estimation mass a={a} t={t}"));
        tally.at_least(pmf.guarantee_mass(a), guarantee, tol, &format!("estimation guarantee a={a} t={t}"));
    }
    let mut profiles = 0;
    while profiles < 8 {
        let n = rng.gen_range(2..=32);
        let ones: Vec<usize> = (0..=n).filter(|_| rng.gen_bool(0.3)).collect();
        let zeros: Vec<usize> = (0..=n).filter(|w| !ones.contains(w) && rng.gen_bool(0.3)).collect();
        let Ok(f) = WeightProfile::from_sets(n, &ones, &zeros) else { continue };
        if f.sensitive_pairs().is_empty() {
            continue;
        }
        profiles += 1;
        for w in f.defined_weights() {
            tally.at_least(weight_classifier(&f, w)?, guarantee, tol, &format!("classifier {f} w={w}"));
            if f.zeros().len() + f.ones().len() <= 8 {
                let ok = elimination_all_patterns(&f, w, 1.0)?.iter().all(|r| Some(r.output) == f.bit(w));
                tally.check(ok, || format!("elimination {f} w={w}"));
            }
        }
    }
    let mut evens = 0;
    while evens < 5 {
        let n = rng.gen_range(2..=8);
        let Some(f) = random_even(&mut rng, n) else { continue };
        evens += 1;
        let alg = ChebyshevAlgorithm::new(&f, &rat(2, 5))?;
        let report = alg.analytic(&f);
        let floor = (alg.witness.beta.clone() / alg.witness.m_norm.clone()).to_f64();
        tally.at_least(report.worst_case_bias.to_f64(), floor, tol, &format!("chebyshev bias {f}"));
        tally.at_least(alg.norm_bound(), alg.witness.m_norm.to_f64(), tol, &format!("chebyshev norm {f}"));
        let coeffs: Vec<f64> = alg.witness.coeffs.iter().map(Scalar::to_f64).collect();
        for w in 0..=n {
            let sv = chebyshev_state_vector(n, w, &coeffs, OracleWiring::Controlled);
            tally.close(sv, alg.prob_zero(w).to_f64(), tol, &format!("chebyshev state vector {f} w={w}"));
        }
    }
    Ok(tally)
}

/// Parses a comma-separated suite list; `all` expands to every suite.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if part == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(invalid("no suite given"));
    }
    out.dedup();
    Ok(out)
}
