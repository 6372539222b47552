//! Randomized query algorithms, their exact success probabilities, the symmetric-strategy
//! minimax LP for the classical bias, and a seeded Monte Carlo harness.

use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dist::{binomial, kravchuk_table, tv, DiscreteDistribution};
use crate::error::{invalid, Result, SymqError};
use crate::exec::{self, Execution};
use crate::lp::{self, Direction, LinearProgram, Relation};
use crate::measures::{approx_degree_witness, PolyWitness};
use crate::numeric::{binomial_rat, rat, rat_int, Rational, Scalar};
use crate::profile::WeightProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Constant read off a complete proof.
    ProofExplicit,
    /// Constant fitted or chosen numerically.
    Calibrated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Envelope {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub provenance: Provenance,
}

impl Envelope {
    pub fn none() -> Self {
        Self { lower: None, upper: None, provenance: Provenance::ProofExplicit }
    }
}

/// Exact per-weight success probabilities of one algorithm on one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasReport<S> {
    pub per_weight_success: Vec<(usize, S)>,
    pub worst_case_bias: S,
    pub envelope: Envelope,
}

impl<S: Scalar> BiasReport<S> {
    pub fn new(per_weight_success: Vec<(usize, S)>, envelope: Envelope) -> Self {
        let worst = per_weight_success.iter().map(|e| e.1.clone()).fold(None::<S>, |m, v| match m {
            Some(m) if m <= v => Some(m),
            _ => Some(v),
        });
        let worst_case_bias = worst.unwrap_or_else(S::one) - S::one() / S::from_int(2);
        Self { per_weight_success, worst_case_bias, envelope }
    }

    pub fn success(&self, w: usize) -> Option<&S> {
        self.per_weight_success.iter().find(|e| e.0 == w).map(|e| &e.1)
    }

    pub fn to_f64(&self) -> BiasReport<f64> {
        BiasReport {
            per_weight_success: self.per_weight_success.iter().map(|(w, s)| (*w, s.to_f64())).collect(),
            worst_case_bias: self.worst_case_bias.to_f64(),
            envelope: self.envelope,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Guess {
    P,
    Q,
}

/// Single-sample test between `p` and `q`: split outcomes by `p(i) < q(i)` and randomize so the
/// two error probabilities coincide.
#[derive(Clone, Debug)]
pub struct OneSampleTest<S> {
    p: DiscreteDistribution<S>,
    q: DiscreteDistribution<S>,
    s1: Vec<u64>,
    a: S,
    b: S,
}

impl<S: Scalar> OneSampleTest<S> {
    pub fn new(p: DiscreteDistribution<S>, q: DiscreteDistribution<S>) -> Self {
        let mut labels = p.support();
        labels.extend(q.support());
        labels.sort_unstable();
        labels.dedup();
        let s1: Vec<u64> = labels.into_iter().filter(|&l| p.prob(l) < q.prob(l)).collect();
        let a = s1.iter().fold(S::zero(), |acc, &l| acc + p.prob(l));
        let b = s1.iter().fold(S::zero(), |acc, &l| acc + q.prob(l));
        Self { p, q, s1, a, b }
    }

    /// `(a, b) = (p(S_1), q(S_1))`.
    pub fn masses(&self) -> (S, S) {
        (self.a.clone(), self.b.clone())
    }

    pub fn in_s1(&self, label: u64) -> bool {
        self.s1.binary_search(&label).is_ok()
    }

    /// Probability of answering `q` after observing `label`.
    pub fn prob_guess_q(&self, label: u64) -> S {
        let sum = self.a.clone() + self.b.clone();
        let two = S::from_int(2);
        match (sum >= S::one(), self.in_s1(label)) {
            (true, true) => S::one() / sum,
            (true, false) => S::zero(),
            (false, true) => S::one(),
            (false, false) => (S::one() - sum.clone()) / (two - sum),
        }
    }

    pub fn success_p(&self) -> S {
        S::one() - self.p.expect(|l| self.prob_guess_q(l))
    }

    pub fn success_q(&self) -> S {
        self.q.expect(|l| self.prob_guess_q(l))
    }

    pub fn worst_case_bias(&self) -> S {
        let s = if self.success_p() <= self.success_q() { self.success_p() } else { self.success_q() };
        s - S::one() / S::from_int(2)
    }

    /// `(b−a)/(2(a+b))` when `a + b ≥ 1`, else `(b−a)/(2(2−a−b))`.
    pub fn closed_form_bias(&self) -> S {
        let sum = self.a.clone() + self.b.clone();
        let diff = self.b.clone() - self.a.clone();
        let two = S::from_int(2);
        if sum >= S::one() {
            diff / (two * sum)
        } else {
            diff / (two.clone() * (two - sum))
        }
    }

    pub fn decide<R: Rng>(&self, label: u64, rng: &mut R) -> Guess {
        let pq = self.prob_guess_q(label).to_f64();
        if rng.gen::<f64>() < pq {
            Guess::Q
        } else {
            Guess::P
        }
    }
}

/// Convenience wrapper: one guess for one observed sample.
pub fn distinguish_one_sample<S: Scalar, R: Rng>(
    p: &DiscreteDistribution<S>,
    q: &DiscreteDistribution<S>,
    sample: u64,
    rng: &mut R,
) -> Guess {
    OneSampleTest::new(p.clone(), q.clone()).decide(sample, rng)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("query budget {0} exhausted")]
    BudgetExceeded(usize),
    #[error("position {0} out of range")]
    OutOfRange(usize),
}

/// Hidden input with a query counter.
#[derive(Clone, Debug)]
pub struct Oracle {
    bits: Vec<bool>,
    budget: usize,
    used: usize,
}

impl Oracle {
    pub fn new(bits: Vec<bool>, budget: usize) -> Self {
        Self { bits, budget, used: 0 }
    }

    /// Uniformly random input of the given weight.
    pub fn random_of_weight<R: Rng>(n: usize, weight: usize, budget: usize, rng: &mut R) -> Self {
        let mut bits = vec![false; n];
        for i in sample(rng, n, weight.min(n)).into_iter() {
            bits[i] = true;
        }
        Self::new(bits, budget)
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn query(&mut self, i: usize) -> std::result::Result<bool, QueryError> {
        if self.used >= self.budget {
            return Err(QueryError::BudgetExceeded(self.budget));
        }
        let bit = *self.bits.get(i).ok_or(QueryError::OutOfRange(i))?;
        self.used += 1;
        Ok(bit)
    }
}

/// A randomized query algorithm producing one output bit.
pub trait QueryAlgorithm: Sync {
    fn budget(&self) -> usize;
    fn run(&self, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> std::result::Result<bool, QueryError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QueryTranscript {
    pub queries_used: usize,
    pub seed: u64,
    pub trial: u64,
    pub outcome: bool,
}

/// Generator for trial `trial` of a run seeded with `seed`: one ChaCha8 stream per trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trial(
    alg: &dyn QueryAlgorithm,
    n: usize,
    weight: usize,
    seed: u64,
    trial: u64,
) -> std::result::Result<QueryTranscript, QueryError> {
    let mut rng = trial_rng(seed, trial);
    let mut oracle = Oracle::random_of_weight(n, weight, alg.budget(), &mut rng);
    let outcome = alg.run(&mut oracle, &mut rng)?;
    Ok(QueryTranscript { queries_used: oracle.used(), seed, trial, outcome })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Half-width of the 99% Hoeffding interval.
    pub ci_half_width: f64,
}

impl MonteCarloEstimate {
    pub fn contains(&self, p: f64) -> bool {
        (self.success_rate - p).abs() <= self.ci_half_width
    }
}

pub fn hoeffding_half_width(trials: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt()
}

/// Empirical success of `alg` on a random input of weight `weight`.
pub fn monte_carlo(
    alg: &dyn QueryAlgorithm,
    f: &WeightProfile,
    weight: usize,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let expected = f.bit(weight).ok_or(SymqError::OutsidePromise(weight))?;
    let n = f.n();
    let failures = std::sync::atomic::AtomicBool::new(false);
    let successes = exec::sum_range(exec, trials, |t| match run_trial(alg, n, weight, seed, t) {
        Ok(tr) => u64::from(tr.outcome == expected),
        Err(_) => {
            failures.store(true, std::sync::atomic::Ordering::Relaxed);
            0
        }
    });
    if failures.into_inner() {
        return Err(invalid("algorithm exceeded its query budget"));
    }
    Ok(MonteCarloEstimate {
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        ci_half_width: hoeffding_half_width(trials, 0.01),
    })
}

/// Empirical rate of `trials` independent measurements that succeed with probability `p`.
pub fn sample_outcomes(p: f64, trials: u64, seed: u64, exec: Execution) -> Result<MonteCarloEstimate> {
    if trials == 0 || !(0.0..=1.0).contains(&p) {
        return Err(invalid("need trials >= 1 and 0 <= p <= 1"));
    }
    let successes = exec::sum_range(exec, trials, |t| u64::from(trial_rng(seed, t).gen::<f64>() < p));
    Ok(MonteCarloEstimate {
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        ci_half_width: hoeffding_half_width(trials, 0.01),
    })
}

fn check_fnk(n: usize, k: usize) -> Result<()> {
    if k < 1 || 2 * k > n {
        return Err(invalid(format!("need 1 <= k <= n/2, got n={n}, k={k}")));
    }
    Ok(())
}

/// Sampling algorithm for `f_n^k`: `T` queries with replacement; all-equal answers are read as
/// weight `0`/`n` and resolved by a biased coin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FnkClassical {
    pub n: usize,
    pub k: usize,
    pub t: usize,
}

impl FnkClassical {
    pub fn new(n: usize, k: usize, t: usize) -> Result<Self> {
        check_fnk(n, k)?;
        if t < 1 {
            return Err(invalid("T must be at least 1"));
        }
        Ok(Self { n, k, t })
    }

    /// Probability `p` of answering 1 after all-equal answers.
    pub fn p(&self) -> Rational {
        let a = self.all_equal_prob(self.k);
        a.clone() / (a + rat_int(1))
    }

    fn all_equal_prob(&self, w: usize) -> Rational {
        let r = rat(w as i64, self.n as i64);
        let s = rat_int(1) - r.clone();
        num_traits::pow(r, self.t) + num_traits::pow(s, self.t)
    }

    /// Probability of output 1 on an input of weight `w`.
    pub fn prob_one(&self, w: usize) -> Rational {
        if self.t == 1 {
            return rat(1, 2);
        }
        let same = self.all_equal_prob(w);
        same.clone() * self.p() + (rat_int(1) - same)
    }

    pub fn analytic(&self) -> BiasReport<Rational> {
        let f = crate::profile::make_fnk(self.n, self.k).expect("validated");
        let per = f
            .defined_weights()
            .into_iter()
            .map(|w| {
                let one = self.prob_one(w);
                (w, if f.bit(w) == Some(true) { one } else { rat_int(1) - one })
            })
            .collect();
        let (n, k, t) = (self.n as f64, self.k as f64, self.t as f64);
        let lower = (self.t >= 2 && t <= n / k).then(|| 0.25 * (k / n) * (t / std::f64::consts::E - 0.5));
        BiasReport::new(per, Envelope { lower, upper: Some(k * t / n), provenance: Provenance::ProofExplicit })
    }
}

impl QueryAlgorithm for FnkClassical {
    fn budget(&self) -> usize {
        self.t
    }

    fn run(&self, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> std::result::Result<bool, QueryError> {
        if self.t == 1 {
            return Ok(rng.gen::<bool>());
        }
        let mut ones = 0;
        for _ in 0..self.t {
            let i = rng.gen_range(0..oracle.n());
            ones += usize::from(oracle.query(i)?);
        }
        if ones == 0 || ones == self.t {
            Ok(rng.gen::<f64>() < self.p().to_f64())
        } else {
            Ok(true)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerVariant {
    /// Queries the input padded with `2n` zeros and `n` ones.
    Padded,
    Direct,
}

/// `T` queries with replacement followed by the single-sample test on the count statistic.
#[derive(Clone, Debug)]
pub struct FnklSampler {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub t: usize,
    pub variant: SamplerVariant,
    test: OneSampleTest<Rational>,
    guess_q: Vec<f64>,
}

impl FnklSampler {
    pub fn new(n: usize, k: usize, l: usize, t: usize, variant: SamplerVariant) -> Result<Self> {
        if k >= l || l > n || t < 1 {
            return Err(invalid(format!("need 0 <= k < l <= n and T >= 1 (n={n}, k={k}, l={l}, T={t})")));
        }
        let mut s = Self { n, k, l, t, variant, test: OneSampleTest::new(DiscreteDistribution::point_mass(0), DiscreteDistribution::point_mass(0)), guess_q: Vec::new() };
        s.test = OneSampleTest::new(s.count_distribution(k)?, s.count_distribution(l)?);
        s.guess_q = (0..=t as u64).map(|c| s.test.prob_guess_q(c).to_f64()).collect();
        Ok(s)
    }

    pub fn marked_fraction(&self, w: usize) -> Rational {
        match self.variant {
            SamplerVariant::Direct => rat(w as i64, self.n as i64),
            SamplerVariant::Padded => rat((self.n + w) as i64, 4 * self.n as i64),
        }
    }

    pub fn count_distribution(&self, w: usize) -> Result<DiscreteDistribution<Rational>> {
        binomial(self.t as u64, self.marked_fraction(w))
    }

    pub fn test(&self) -> &OneSampleTest<Rational> {
        &self.test
    }

    pub fn analytic(&self) -> BiasReport<Rational> {
        let pk = self.count_distribution(self.k).expect("validated");
        let pl = self.count_distribution(self.l).expect("validated");
        let h = crate::dist::hellinger_sq(&bernoulli_of(&self.marked_fraction(self.k)), &bernoulli_of(&self.marked_fraction(self.l)));
        let _ = (&pk, &pl);
        let t = self.t as f64;
        let lower = (t * h <= 1.0).then(|| h * t / (4.0 * std::f64::consts::E));
        BiasReport::new(
            vec![(self.k, self.test.success_p()), (self.l, self.test.success_q())],
            Envelope { lower, upper: Some(0.5 * tv(&pk, &pl).to_f64()), provenance: Provenance::ProofExplicit },
        )
    }
}

fn bernoulli_of(p: &Rational) -> DiscreteDistribution<Rational> {
    crate::dist::bernoulli(p.clone()).expect("probability in range")
}

impl QueryAlgorithm for FnklSampler {
    fn budget(&self) -> usize {
        self.t
    }

    fn run(&self, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> std::result::Result<bool, QueryError> {
        let n = oracle.n();
        let mut ones = 0usize;
        for _ in 0..self.t {
            let bit = match self.variant {
                SamplerVariant::Direct => oracle.query(rng.gen_range(0..n))?,
                SamplerVariant::Padded => {
                    let pos = rng.gen_range(0..4 * n);
                    if pos < n {
                        oracle.query(pos)?
                    } else {
                        pos >= 3 * n
                    }
                }
            };
            ones += usize::from(bit);
        }
        Ok(rng.gen::<f64>() < self.guess_q[ones])
    }
}

/// `c_l = 2^{−n} Σ_w C(n, w) g(w) K_l(w, n)` for `g` given per number of −1 coordinates.
pub fn fourier_level_coeffs(g: &[Rational]) -> Vec<Rational> {
    let n = g.len() - 1;
    let table = kravchuk_table(n as u64);
    let scale = Rational::new(1.into(), num_bigint::BigInt::from(1u8) << n);
    (0..=n)
        .map(|l| {
            let s = (0..=n).fold(rat_int(0), |acc, w| {
                acc + binomial_rat(n as i64, w as i64) * g[w].clone() * Rational::from_integer(table[l][w].clone())
            });
            s * scale.clone()
        })
        .collect()
}

/// Checks `|c_l| ≤ d^l / l!` for every level.
pub fn fourier_growth_holds(c: &[Rational], d: usize) -> bool {
    let mut bound = rat_int(1);
    for (l, cl) in c.iter().enumerate() {
        if l > 0 {
            bound *= rat(d as i64, l as i64);
        }
        if cl.abs() > bound {
            return false;
        }
    }
    true
}

/// `A_t = Σ_l c_l K_l(t, T) / C(T, l)` for `t = 0..=T`.
pub fn kravchuk_transform(c: &[Rational], t_len: usize) -> Result<Vec<Rational>> {
    if c.iter().enumerate().any(|(l, cl)| l > t_len && !cl.is_zero()) {
        return Err(SymqError::OutOfRegime(format!("T = {t_len} is below the degree")));
    }
    let table = kravchuk_table(t_len as u64);
    Ok((0..=t_len)
        .map(|t| {
            (0..=t_len.min(c.len() - 1)).fold(rat_int(0), |acc, l| {
                acc + c[l].clone() * Rational::from_integer(table[l][t].clone()) / binomial_rat(t_len as i64, l as i64)
            })
        })
        .collect())
}

/// `E_{t∼H(n, w, T)} A_t`.
pub fn hypergeometric_average(a: &[Rational], n: usize, w: usize) -> Rational {
    let t_len = a.len() - 1;
    crate::dist::hypergeometric_pmf(n as u64, w as u64, t_len as u64)
        .into_iter()
        .zip(a)
        .fold(rat_int(0), |acc, (p, at)| acc + p * at.clone())
}

/// `E_{t∼B(T, ½)} A_t²`.
pub fn binomial_second_moment(a: &[Rational]) -> Rational {
    let t_len = a.len() - 1;
    crate::dist::binomial_pmf(t_len as u64, &rat(1, 2))
        .into_iter()
        .zip(a)
        .fold(rat_int(0), |acc, (p, at)| acc + p * at.clone() * at.clone())
}

/// Distinct-position estimator for total symmetric functions built from an approximating
/// polynomial and its Kravchuk transform.
#[derive(Clone, Debug)]
pub struct KravchukEstimator {
    pub n: usize,
    pub eps: Rational,
    pub delta: Rational,
    pub beta: Rational,
    pub witness: PolyWitness,
    pub queries: usize,
    pub coeffs: Vec<Rational>,
    pub a: Vec<Rational>,
    pub clip: Rational,
    prob_zero: Vec<Rational>,
    prob_zero_f64: Vec<f64>,
}

impl KravchukEstimator {
    pub fn new(f: &WeightProfile, eps: &Rational, delta: &Rational) -> Result<Self> {
        if !f.is_total() {
            return Err(invalid("the estimator needs a total function"));
        }
        let beta = rat(1, 2) - eps.clone();
        if !beta.is_positive() || !delta.is_positive() || *delta >= rat_int(1) {
            return Err(invalid("need eps < 1/2 and 0 < delta < 1"));
        }
        let witness = approx_degree_witness(f, eps)?;
        let d = witness.degree;
        let queries = 2 * d * d + d;
        let n = f.n();
        if queries > n {
            return Err(SymqError::OutOfRegime(format!("T = 2d^2 + d = {queries} exceeds n = {n}")));
        }
        let g: Vec<Rational> = witness.values.iter().map(|q| rat_int(1) - rat_int(2) * q.clone()).collect();
        let coeffs = fourier_level_coeffs(&g);
        let a = kravchuk_transform(&coeffs, queries)?;
        let clip = rat_int(16) / (delta.clone() * beta.clone());
        let scale = delta.clone() * beta.clone() / rat_int(16);
        let prob_zero: Vec<Rational> = a
            .iter()
            .map(|at| {
                let clipped = if at.abs() > clip { clip.clone() * at.signum() } else { at.clone() };
                rat(1, 2) * (rat_int(1) + scale.clone() * clipped)
            })
            .collect();
        let prob_zero_f64 = prob_zero.iter().map(Scalar::to_f64).collect();
        Ok(Self { n, eps: eps.clone(), delta: delta.clone(), beta, witness, queries, coeffs, a, clip, prob_zero, prob_zero_f64 })
    }

    /// Probability of output 0 after seeing `t` ones.
    pub fn prob_zero(&self, t: usize) -> &Rational {
        &self.prob_zero[t]
    }

    pub fn analytic(&self, f: &WeightProfile) -> BiasReport<Rational> {
        let per = (0..=self.n)
            .map(|w| {
                let zero = hypergeometric_average(&self.prob_zero, self.n, w);
                (w, if f.bit(w) == Some(false) { zero } else { rat_int(1) - zero })
            })
            .collect();
        BiasReport::new(per, Envelope { lower: Some(self.guaranteed_bias().to_f64()), upper: None, provenance: Provenance::ProofExplicit })
    }

    /// `δβ²/16`.
    pub fn guaranteed_bias(&self) -> Rational {
        self.delta.clone() * self.beta.clone() * self.beta.clone() / rat_int(16)
    }

    /// Fraction of the `2^n` inputs whose weight reaches the guaranteed bias.
    pub fn good_mass(&self, f: &WeightProfile) -> Rational {
        let report = self.analytic(f);
        let target = self.guaranteed_bias() + rat(1, 2);
        let total = Rational::from_integer(num_bigint::BigInt::from(1u8) << self.n);
        report
            .per_weight_success
            .iter()
            .filter(|(_, s)| *s >= target)
            .fold(rat_int(0), |acc, (w, _)| acc + binomial_rat(self.n as i64, *w as i64))
            / total
    }
}

impl QueryAlgorithm for KravchukEstimator {
    fn budget(&self) -> usize {
        self.queries
    }

    fn run(&self, oracle: &mut Oracle, rng: &mut ChaCha8Rng) -> std::result::Result<bool, QueryError> {
        let n = oracle.n();
        let mut ones = 0usize;
        for i in sample(rng, n, self.queries).into_iter() {
            ones += usize::from(oracle.query(i)?);
        }
        Ok(rng.gen::<f64>() >= self.prob_zero_f64[ones])
    }
}

/// `1/(6√3) · 4e^{−2}/√(2π) / 2`: the amplification lower-bound constant obtained from the
/// normal-approximation chain with `v ≥ 1/4` and `Φ(x) − ½ ≥ x φ(2)` on `[0, 2]`.
pub fn amplify_constant() -> f64 {
    let pi = std::f64::consts::PI;
    1.0 / (6.0 * 3f64.sqrt()) * 4.0 * (-2.0f64).exp() / (2.0 * pi).sqrt() / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplifiedBias {
    pub bias: Rational,
    pub runs: u64,
    /// True when `N` was reduced to `⌊1/(4ε²)⌋`.
    pub clamped: bool,
    pub lower_env: f64,
}

/// Exact worst-case bias of majority vote (fair coin on ties) over `N` runs with per-run bias
/// `ε`, i.e. `½ d_TV(B(N, ½+ε), B(N, ½−ε))`.
pub fn amplify(eps_gap: &Rational, runs: u64) -> Result<AmplifiedBias> {
    if !eps_gap.is_positive() || *eps_gap > rat(1, 2) || runs == 0 {
        return Err(invalid("need 0 < eps <= 1/2 and N >= 1"));
    }
    let cap = (rat_int(1) / (rat_int(4) * eps_gap.clone() * eps_gap.clone())).floor().to_integer();
    let cap = u64::try_from(cap).unwrap_or(u64::MAX).max(1);
    let (runs, clamped) = if runs > cap { (cap, true) } else { (runs, false) };
    let pmf = crate::dist::binomial_pmf(runs, &(rat(1, 2) + eps_gap.clone()));
    let mut success = rat_int(0);
    for (c, p) in pmf.into_iter().enumerate() {
        let twice = 2 * c as u64;
        if twice > runs {
            success += p;
        } else if twice == runs {
            success += p / rat_int(2);
        }
    }
    let lower_env = amplify_constant() * eps_gap.to_f64() * (runs as f64).sqrt();
    Ok(AmplifiedBias { bias: success - rat(1, 2), runs, clamped, lower_env })
}

/// Optimal symmetric strategy found by the minimax LP.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalLp {
    pub bias: Rational,
    /// `q_t = P(output 1 | t ones among the T distinct queries)`.
    pub strategy: Vec<Rational>,
}

/// Best worst-case bias of a `T`-query algorithm that queries `T` uniformly random distinct
/// positions and answers based on the number of ones seen.
pub fn exact_classical_bias(f: &WeightProfile, t_len: usize) -> Result<ClassicalLp> {
    let n = f.n();
    if t_len > n {
        return Err(invalid(format!("T = {t_len} exceeds n = {n}")));
    }
    let nv = t_len + 2;
    let delta = t_len + 1;
    let mut objective = vec![rat_int(0); nv];
    objective[delta] = rat_int(1);
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    for t in 0..=t_len {
        lp.set_bounds(t, Some(rat_int(0)), Some(rat_int(1)));
    }
    lp.set_bounds(delta, None, None);
    for w in f.defined_weights() {
        let pmf = crate::dist::hypergeometric_pmf(n as u64, w as u64, t_len as u64);
        let mut row: Vec<Rational> = Vec::with_capacity(nv);
        let one = f.bit(w) == Some(true);
        for p in pmf {
            row.push(if one { p } else { -p });
        }
        row.push(rat_int(-1));
        let rhs = if one { rat(1, 2) } else { rat(-1, 2) };
        lp.add_constraint(row, Relation::Ge, rhs);
    }
    let sol = lp::solve(&lp)?;
    let mut point = sol.point;
    let bias = point.pop().ok_or_else(|| invalid("LP returned no point"))?;
    Ok(ClassicalLp { bias, strategy: point })
}

/// `d_TV` between the count distributions of `T` distinct queries under a uniformly random
/// zero-input and a uniformly random one-input.
pub fn alpha_distance(f: &WeightProfile, t_len: usize) -> Result<Rational> {
    let n = f.n();
    if t_len > n {
        return Err(invalid(format!("T = {t_len} exceeds n = {n}")));
    }
    let mixture = |weights: Vec<usize>| -> Result<DiscreteDistribution<Rational>> {
        let total = weights.iter().fold(rat_int(0), |a, &w| a + binomial_rat(n as i64, w as i64));
        let mut acc = vec![rat_int(0); t_len + 1];
        for w in weights {
            let wt = binomial_rat(n as i64, w as i64) / total.clone();
            for (slot, p) in acc.iter_mut().zip(crate::dist::hypergeometric_pmf(n as u64, w as u64, t_len as u64)) {
                *slot += wt.clone() * p;
            }
        }
        DiscreteDistribution::new(acc.into_iter().enumerate().map(|(t, p)| (t as u64, p)))
    };
    if f.is_constant() {
        return Ok(rat_int(0));
    }
    Ok(tv(&mixture(f.zeros())?, &mixture(f.ones())?))
}
