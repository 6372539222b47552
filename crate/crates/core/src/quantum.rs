//! Analytic simulation of the quantum query algorithms. Every circuit acts on a two-dimensional
//! invariant subspace per input weight, so success probabilities are closed-form in the rotation
//! angles. A small state-vector simulator cross-checks the Chebyshev algorithm.

use std::f64::consts::PI;

use num_traits::Signed;
use serde::Serialize;

use crate::classical::{BiasReport, Envelope, OneSampleTest, Provenance};
use crate::dist::{bernoulli, tv, DiscreteDistribution};
use crate::error::{invalid, Result, SymqError};
use crate::lp::{self, Direction, LinearProgram, LpStatus, Relation};
use crate::measures::{approx_degree, chebyshev_row, tight_bounds};
use crate::numeric::{rat, rat_int, snapped_ceil, Rational, Scalar};
use crate::profile::WeightProfile;

/// Comparison slack for region membership and angle conditions.
pub const ANGLE_TOL: f64 = 1e-12;

/// Rotation angles of the amplitude-amplification iterates for an input of weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotationTrace {
    pub n: usize,
    pub w: usize,
    /// `2·asin√(w/n)`.
    pub theta_alg2: f64,
    /// `asin√(w/n)`.
    pub theta_alg3: f64,
    /// `acos(1 − 2w/n)`.
    pub eta: f64,
}

impl RotationTrace {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        if n == 0 || w > n {
            return Err(invalid(format!("need 0 <= w <= n and n >= 1 (n={n}, w={w})")));
        }
        let frac = w as f64 / n as f64;
        let theta_alg3 = frac.sqrt().asin();
        let eta = (1.0 - 2.0 * frac).clamp(-1.0, 1.0).acos();
        Ok(Self { n, w, theta_alg2: 2.0 * theta_alg3, theta_alg3, eta })
    }
}

fn check_fnk(n: usize, k: usize) -> Result<()> {
    if k < 1 || 2 * k > n {
        return Err(invalid(format!("need 1 <= k <= n/2, got n={n}, k={k}")));
    }
    Ok(())
}

/// `(4/π²)`: lower constant for the `f_n^k` quantum bias in `(k/n)T²`.
pub const FNK_LOWER_CONSTANT: f64 = 4.0 / (PI * PI);
/// `π²/2`: upper constant for the `f_n^k` quantum bias in `(k/n)T²`, from `sin² x ≤ x²` and
/// `asin√u ≤ (π/2)√u`.
pub const FNK_UPPER_CONSTANT: f64 = PI * PI / 2.0;

/// Amplitude amplification for `f_n^k` followed by a biased coin on outcome 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FnkQuantum {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Queries actually used: `min(T, ⌈√(n/k)⌉)`.
    pub effective_t: usize,
    pub theta: f64,
}

impl FnkQuantum {
    pub fn new(n: usize, k: usize, t: usize) -> Result<Self> {
        check_fnk(n, k)?;
        if t < 1 {
            return Err(invalid("T must be at least 1"));
        }
        let cap = snapped_ceil((n as f64 / k as f64).sqrt()).max(1) as usize;
        let theta = RotationTrace::new(n, k)?.theta_alg2;
        Ok(Self { n, k, t, effective_t: t.min(cap), theta })
    }

    /// Probability of answering 0 after measuring outcome 0.
    pub fn coin(&self) -> f64 {
        1.0 / (2.0 - (self.effective_t as f64 * self.theta).sin().powi(2))
    }

    pub fn success(&self, w: usize) -> Result<f64> {
        let f = crate::profile::make_fnk(self.n, self.k)?;
        let value = f.bit(w).ok_or(SymqError::OutsidePromise(w))?;
        let theta_w = RotationTrace::new(self.n, w)?.theta_alg2;
        let stay = (self.effective_t as f64 * theta_w).cos().powi(2);
        let zero = stay * self.coin();
        Ok(if value { 1.0 - zero } else { zero })
    }

    pub fn analytic(&self) -> BiasReport<f64> {
        let per = [0, self.k, self.n - self.k, self.n]
            .into_iter()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|w| (w, self.success(w).expect("promised weight")))
            .collect();
        let (n, k, t) = (self.n as f64, self.k as f64, self.t as f64);
        let lower = (t <= (n / k).sqrt()).then(|| FNK_LOWER_CONSTANT * k / n * t * t);
        BiasReport::new(per, Envelope { lower, upper: Some(FNK_UPPER_CONSTANT * k / n * t * t), provenance: Provenance::ProofExplicit })
    }
}

pub fn simulate_fnk(n: usize, k: usize, t: usize, w: usize) -> Result<f64> {
    FnkQuantum::new(n, k, t)?.success(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FnklRegime {
    /// `4(l−k) ≥ n`: one classical query.
    LinearGap,
    /// `T ≤ ¼√(n/l)`.
    Direct,
    /// `¼√(n/l) < T < 3π√(n/l)`: run with `⌊¼√(n/l)⌋` queries.
    Truncated,
    /// Large `T` up to the cap: choose `T′ ∈ [T − ⌈π/(2θ_l)⌉, T)` with `sin 2α_{T′} ≥ ½`.
    PhaseSelected,
    /// `T` above `√((n−k)l)/(4√3π(l−k))`: rerun at the floor of the cap.
    Capped,
}

/// How the dispatcher reduced `(n, k, l, T)` before running the amplification circuit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FnklPlan {
    pub complemented: bool,
    pub padded: bool,
    /// Instance after the reductions.
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub regime: FnklRegime,
    /// Regime the truncated or capped budget finally ran in.
    pub final_regime: FnklRegime,
    /// Queries actually used.
    pub t_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FnklQuantum {
    pub plan: FnklPlan,
    /// Marked probabilities `(p_k, p_l)` of the final classical query.
    pub marked: (f64, f64),
    pub report: BiasReport<f64>,
    /// `¼ d_TV` of the two final Bernoullis.
    pub guaranteed_bias: f64,
}

/// `Δ = (2T−1)(θ_l − θ_k)` with `θ_w = asin√(w/n)`.
pub fn regime_delta(n: usize, k: usize, l: usize, t: usize) -> f64 {
    let th = |w: usize| (w as f64 / n as f64).sqrt().asin();
    (2.0 * t as f64 - 1.0) * (th(l) - th(k))
}

/// `√((n−k)l)/(4√3π(l−k))`.
pub fn fnkl_cap(n: usize, k: usize, l: usize) -> f64 {
    (((n - k) * l) as f64).sqrt() / (4.0 * 3f64.sqrt() * PI * (l - k) as f64)
}

/// Largest `t ≥ 1` with `16 t² l ≤ n`, or 1.
fn quarter_root_floor(n: usize, l: usize) -> usize {
    let mut t = 1;
    while 16 * (t + 1) * (t + 1) * l <= n {
        t += 1;
    }
    t
}

fn dispatch(n: usize, k: usize, l: usize, t: usize) -> (FnklRegime, FnklRegime, usize) {
    let direct = |t: usize| 16 * t * t * l <= n;
    let small = |t: usize| (t as f64) < 3.0 * PI * (n as f64 / l as f64).sqrt();
    let inner = |t: usize| -> (FnklRegime, usize) {
        if direct(t) {
            (FnklRegime::Direct, t)
        } else if small(t) {
            (FnklRegime::Truncated, quarter_root_floor(n, l))
        } else {
            let theta = (l as f64 / n as f64).sqrt().asin();
            let back = snapped_ceil(PI / (2.0 * theta)).max(1) as usize;
            let lo = t.saturating_sub(back).max(1);
            let alpha = |s: usize| (2.0 * s as f64 - 1.0) * theta;
            let chosen = (lo..t).rev().find(|&s| (2.0 * alpha(s)).sin() >= 0.5 - ANGLE_TOL).unwrap_or_else(|| {
                (lo..=t).max_by(|&a, &b| (2.0 * alpha(a)).sin().total_cmp(&(2.0 * alpha(b)).sin())).unwrap_or(t)
            });
            (FnklRegime::PhaseSelected, chosen)
        }
    };
    let cap = fnkl_cap(n, k, l);
    if (t as f64) > cap && !direct(t) && !small(t) {
        let capped = (cap.floor() as usize).max(1);
        let (final_regime, used) = inner(capped);
        return (FnklRegime::Capped, final_regime, used);
    }
    let (regime, used) = inner(t);
    let final_regime = match regime {
        FnklRegime::Truncated => FnklRegime::Direct,
        r => r,
    };
    (regime, final_regime, used)
}

/// Quantum algorithm for `f_n^{k,l}` (`f(k) = 0`, `f(l) = 1`): `T−1` amplification steps, one
/// final classical query, then the single-sample test on the two marked probabilities.
pub fn fnkl_quantum(n: usize, k: usize, l: usize, t: usize) -> Result<FnklQuantum> {
    if k >= l || l > n {
        return Err(invalid(format!("need 0 <= k < l <= n (n={n}, k={k}, l={l})")));
    }
    if t < 1 {
        return Err(invalid("T must be at least 1"));
    }
    let gap = (l - k) as f64;
    if 4 * (l - k) >= n {
        let plan = FnklPlan { complemented: false, padded: false, n, k, l, regime: FnklRegime::LinearGap, final_regime: FnklRegime::LinearGap, t_used: 1 };
        let marked = (k as f64 / n as f64, l as f64 / n as f64);
        let lower = gap / (4.0 * n as f64);
        return Ok(finish(plan, marked, lower));
    }
    let complemented = 2 * k > n;
    let (ck, cl) = if complemented { (n - l, n - k) } else { (k, l) };
    let padded = 4 * cl > n;
    let m = if padded { 4 * n } else { n };
    let (regime, final_regime, t_used) = dispatch(m, ck, cl, t);
    let marked_at = |w: usize| {
        let w = if complemented { n - w } else { w };
        ((2.0 * t_used as f64 - 1.0) * (w as f64 / m as f64).sqrt().asin()).sin().powi(2)
    };
    let (mf, tf, kf, lf) = (m as f64, t as f64, ck as f64, cl as f64);
    let tu = t_used as f64;
    let lower = match final_regime {
        FnklRegime::Direct if regime == FnklRegime::Direct => gap / (4.0 * PI * mf) * tf * tf,
        FnklRegime::Direct => gap / (4.0 * PI * mf) * tu * tu,
        _ => gap / (64.0 * PI * ((mf - kf) * lf).sqrt()) * if regime == FnklRegime::Capped { tu } else { tf },
    };
    let plan = FnklPlan { complemented, padded, n: m, k: ck, l: cl, regime, final_regime, t_used };
    Ok(finish(plan, (marked_at(k), marked_at(l)), lower))
}

fn finish(plan: FnklPlan, marked: (f64, f64), lower: f64) -> FnklQuantum {
    let (n0, k0, l0) = original_weights(&plan);
    let _ = n0;
    let pk = bernoulli(marked.0.clamp(0.0, 1.0)).expect("probability");
    let pl = bernoulli(marked.1.clamp(0.0, 1.0)).expect("probability");
    let test = OneSampleTest::new(pk.clone(), pl.clone());
    let report = BiasReport::new(
        vec![(k0, test.success_p()), (l0, test.success_q())],
        Envelope { lower: Some(lower), upper: None, provenance: Provenance::ProofExplicit },
    );
    FnklQuantum { guaranteed_bias: tv(&pk, &pl) / 4.0, plan, marked, report }
}

fn original_weights(plan: &FnklPlan) -> (usize, usize, usize) {
    let n = if plan.padded { plan.n / 4 } else { plan.n };
    if plan.complemented {
        (n, n - plan.l, n - plan.k)
    } else {
        (n, plan.k, plan.l)
    }
}

pub fn simulate_fnkl(n: usize, k: usize, l: usize, t: usize, w: usize) -> Result<f64> {
    let q = fnkl_quantum(n, k, l, t)?;
    q.report.success(w).copied().ok_or(SymqError::OutsidePromise(w))
}

/// Even Chebyshev approximant `h = Σ a_i T_{2i}` with `(1 − 2f(w))·h(cos η_w) ≥ 2β`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebyshevWitness {
    pub eps: Rational,
    pub beta: Rational,
    /// Degree `T` the algorithm is charged for; queries are `⌈T/2⌉`.
    pub degree: usize,
    pub coeffs: Vec<Rational>,
    /// `Σ |a_i|`.
    pub m_norm: Rational,
}

impl ChebyshevWitness {
    pub fn queries(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `h(x)`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let row = chebyshev_row(x, 2 * self.queries());
        self.coeffs.iter().enumerate().fold(rat_int(0), |acc, (i, a)| acc + a.clone() * row[2 * i].clone())
    }
}

fn cos_eta(n: usize, w: usize) -> Rational {
    rat_int(1) - rat(2 * w as i64, n as i64)
}

/// Rational approximation of `v` with denominator `2^40`.
fn dyadic(v: f64) -> Rational {
    let scale = (1u64 << 40) as f64;
    Rational::new(num_bigint::BigInt::from((v * scale).round() as i64), num_bigint::BigInt::from(1u64 << 40))
}

fn chebyshev_lp(f: &WeightProfile, beta: &Rational, m: usize) -> Result<Option<Vec<Rational>>> {
    let n = f.n();
    let nv = 2 * (m + 1);
    let objective = vec![rat_int(1); nv];
    let mut lp = LinearProgram::new(Direction::Minimize, objective);
    let split = |vals: &[Rational]| -> Vec<Rational> { vals.iter().cloned().chain(vals.iter().map(|v| -v.clone())).collect() };
    for w in 0..=n {
        let row = chebyshev_row(&cos_eta(n, w), 2 * m);
        let even: Vec<Rational> = (0..=m).map(|i| row[2 * i].clone()).collect();
        let coeffs = split(&even);
        match f.bit(w) {
            Some(false) => lp.add_constraint(coeffs.clone(), Relation::Ge, rat_int(2) * beta.clone()),
            Some(true) => lp.add_constraint(coeffs.clone(), Relation::Le, -rat_int(2) * beta.clone()),
            None => {}
        }
        lp.add_constraint(coeffs.clone(), Relation::Le, rat_int(1));
        lp.add_constraint(coeffs, Relation::Ge, rat_int(-1));
    }
    // Gauss–Chebyshev nodes: exact quadrature for h², which keeps Σ a_i² ≤ 2.
    let nodes = 4 * m + 2;
    for j in 0..nodes {
        let phi = (j as f64 + 0.5) * PI / nodes as f64;
        let even: Vec<Rational> = (0..=m).map(|i| dyadic((2.0 * i as f64 * phi).cos())).collect();
        let coeffs = split(&even);
        lp.add_constraint(coeffs.clone(), Relation::Le, rat_int(1));
        lp.add_constraint(coeffs, Relation::Ge, rat_int(-1));
    }
    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some((0..=m).map(|i| sol.point[i].clone() - sol.point[m + 1 + i].clone()).collect()))
}

/// Builds the witness starting at `T = adeg_ε(f)`, raising `T` until the node-bounded LP is
/// feasible; among feasible `h` it picks one minimizing `M`.
pub fn chebyshev_witness(f: &WeightProfile, eps: &Rational) -> Result<ChebyshevWitness> {
    if !f.is_even() {
        return Err(SymqError::NotEven);
    }
    if f.defined_weights().is_empty() {
        return Err(invalid("profile has no defined weight"));
    }
    let beta = rat(1, 2) - eps.clone();
    if !beta.is_positive() || eps.is_negative() {
        return Err(invalid("need 0 <= eps < 1/2"));
    }
    let start = approx_degree(f, eps)?;
    let limit = 4 * f.n() + 4;
    let mut degree = start;
    while degree <= limit {
        let m = degree.div_ceil(2);
        if let Some(coeffs) = chebyshev_lp(f, &beta, m)? {
            let m_norm = coeffs.iter().fold(rat_int(0), |acc, a| acc + a.abs());
            return Ok(ChebyshevWitness { eps: eps.clone(), beta, degree, coeffs, m_norm });
        }
        degree += 2 - degree % 2;
    }
    Err(SymqError::OutOfRegime(format!("no bounded even witness up to degree {limit}")))
}

/// Controlled-reflection algorithm for even functions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebyshevAlgorithm {
    pub n: usize,
    pub witness: ChebyshevWitness,
}

impl ChebyshevAlgorithm {
    pub fn new(f: &WeightProfile, eps: &Rational) -> Result<Self> {
        Ok(Self { n: f.n(), witness: chebyshev_witness(f, eps)? })
    }

    /// `p_w = ½ + h(cos η_w)/(2M)`, the probability of output 0.
    pub fn prob_zero(&self, w: usize) -> Rational {
        rat(1, 2) + self.witness.eval(&cos_eta(self.n, w)) / (rat_int(2) * self.witness.m_norm.clone())
    }

    pub fn analytic(&self, f: &WeightProfile) -> BiasReport<Rational> {
        let per = f
            .defined_weights()
            .into_iter()
            .map(|w| {
                let z = self.prob_zero(w);
                (w, if f.bit(w) == Some(false) { z } else { rat_int(1) - z })
            })
            .collect();
        let lower = (self.witness.beta.clone() / self.witness.m_norm.clone()).to_f64();
        BiasReport::new(per, Envelope { lower: Some(lower), upper: None, provenance: Provenance::ProofExplicit })
    }

    /// `√(2T + 2)`.
    pub fn norm_bound(&self) -> f64 {
        (2.0 * self.witness.degree as f64 + 2.0).sqrt()
    }
}

pub fn simulate_chebyshev(f: &WeightProfile, eps: &Rational, w: usize) -> Result<Rational> {
    let alg = ChebyshevAlgorithm::new(f, eps)?;
    alg.analytic(f).success(w).cloned().ok_or(SymqError::OutsidePromise(w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleWiring {
    /// Each step applies `O_x` only on the branch whose ancilla is `|−⟩`.
    Controlled,
    /// Each step applies `O_x` to every branch.
    Uncontrolled,
}

/// Probability of output 0 from a dense simulation of the `n·2^m`-dimensional circuit on the
/// input `1^w 0^{n−w}`.
pub fn chebyshev_state_vector(n: usize, w: usize, coeffs: &[f64], wiring: OracleWiring) -> f64 {
    let m = coeffs.len() - 1;
    let dim = 1usize << m;
    let total: f64 = coeffs.iter().map(|a| a.abs()).sum();
    let amp0 = 1.0 / (n as f64).sqrt();
    let phase: Vec<f64> = (0..n).map(|i| if i < w { -1.0 } else { 1.0 }).collect();
    // state[anc * n + i]; ancilla bit j set means |−⟩ on ancilla j.
    let mut state = vec![0.0; n * dim];
    for (i, a) in coeffs.iter().enumerate() {
        let anc = (1usize << i) - 1;
        let alpha = (a.abs() / total).sqrt();
        for q in 0..n {
            state[anc * n + q] = alpha * amp0;
        }
    }
    for step in 0..m {
        for anc in 0..dim {
            let block = &mut state[anc * n..(anc + 1) * n];
            let active = anc >> step & 1 == 1;
            if active {
                let overlap: f64 = block.iter().sum::<f64>() * amp0;
                for v in block.iter_mut() {
                    *v = 2.0 * overlap * amp0 - *v;
                }
            }
            if active || wiring == OracleWiring::Uncontrolled {
                for (v, p) in block.iter_mut().zip(&phase) {
                    *v *= p;
                }
            }
        }
    }
    let mut p0 = 0.0;
    for (i, a) in coeffs.iter().enumerate() {
        let anc = (1usize << i) - 1;
        let block = &state[anc * n..(anc + 1) * n];
        let on_psi = (block.iter().sum::<f64>() * amp0).powi(2);
        let norm: f64 = block.iter().map(|v| v * v).sum();
        p0 += if *a >= 0.0 { on_psi } else { norm - on_psi };
    }
    p0
}

/// Phase-estimation outcome law for amplitude `a` with a `t`-point register, merged on the
/// estimate axis (`y` and `t−y` give the same `sin²(πy/t)`).
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeEstimate {
    pub t: usize,
    pub dist: DiscreteDistribution<f64>,
}

impl AmplitudeEstimate {
    pub fn estimate(&self, label: u64) -> f64 {
        (PI * label as f64 / self.t as f64).sin().powi(2)
    }

    /// `2π√(a(1−a))/t + π²/t²`.
    pub fn radius(a: f64, t: usize) -> f64 {
        let t = t as f64;
        2.0 * PI * (a * (1.0 - a)).sqrt() / t + PI * PI / (t * t)
    }

    /// Mass of estimates within [`Self::radius`] of `a`.
    pub fn guarantee_mass(&self, a: f64) -> f64 {
        let r = Self::radius(a, self.t);
        self.dist.iter().filter(|(l, _)| (self.estimate(*l) - a).abs() <= r + ANGLE_TOL).map(|(_, p)| *p).sum()
    }
}

pub fn amplitude_estimation_pmf(a: f64, t: usize) -> Result<AmplitudeEstimate> {
    if !(0.0..=1.0).contains(&a) || t < 1 {
        return Err(invalid(format!("need 0 <= a <= 1 and t >= 1 (a={a}, t={t})")));
    }
    let theta = a.sqrt().asin() / PI;
    let tf = t as f64;
    let mut mass = vec![0.0; t / 2 + 1];
    for y in 0..t {
        let delta = theta - y as f64 / tf;
        let den = (PI * delta).sin();
        let p = if den.abs() < 1e-12 { 1.0 } else { ((PI * tf * delta).sin() / (tf * den)).powi(2) };
        mass[y.min(t - y)] += p;
    }
    let entries = mass.into_iter().enumerate().filter(|(_, p)| *p > 1e-24).map(|(l, p)| (l as u64, p));
    Ok(AmplitudeEstimate { t, dist: DiscreteDistribution::new(entries)? })
}

/// Approximate-counting classifier: estimate `|x|/n`, snap to the nearest defined weight (ties to
/// the smaller) and output its value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightClassifier {
    pub t: usize,
}

impl WeightClassifier {
    pub fn new(f: &WeightProfile) -> Result<Self> {
        if f.sensitive_pairs().is_empty() {
            return Err(invalid("classifier needs a nonconstant profile"));
        }
        let tq = tight_bounds(f).tight_q;
        Ok(Self { t: snapped_ceil(6.0 * PI * tq).max(1) as usize })
    }

    pub fn nearest(f: &WeightProfile, estimate: f64) -> usize {
        let target = estimate * f.n() as f64;
        let mut best = None::<(f64, usize)>;
        for w in f.defined_weights() {
            let d = (w as f64 - target).abs();
            if best.is_none_or(|(bd, _)| d < bd - ANGLE_TOL) {
                best = Some((d, w));
            }
        }
        best.expect("defined weight").1
    }

    pub fn success(&self, f: &WeightProfile, w: usize) -> Result<f64> {
        let value = f.bit(w).ok_or(SymqError::OutsidePromise(w))?;
        let pmf = amplitude_estimation_pmf(w as f64 / f.n() as f64, self.t)?;
        Ok(pmf
            .dist
            .iter()
            .filter(|(l, _)| f.bit(Self::nearest(f, pmf.estimate(*l))) == Some(value))
            .map(|(_, p)| *p)
            .sum())
    }
}

pub fn weight_classifier(f: &WeightProfile, w: usize) -> Result<f64> {
    WeightClassifier::new(f)?.success(f, w)
}

fn snap_cos(c: f64) -> f64 {
    for v in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        if (c - v).abs() < 1e-12 {
            return v;
        }
    }
    c
}

/// Corner points `(x, y)` of both cosine families.
pub fn sd_set(d: usize) -> Result<Vec<(f64, f64)>> {
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    let point = |g: usize, den: usize| {
        let f = |j: usize| 0.5 * (1.0 - snap_cos((j as f64 * PI / den as f64).cos()));
        (f(g), f(g + 1))
    };
    let mut out: Vec<(f64, f64)> = (0..2 * d).map(|g| point(g, 2 * d)).collect();
    out.extend((1..(2 * d).saturating_sub(2)).map(|g| point(g, 2 * d - 1)));
    Ok(out)
}

fn check_pair(kappa: f64, lambda: f64) -> Result<()> {
    if kappa >= lambda || kappa < 0.0 || lambda > 1.0 {
        return Err(invalid(format!("need 0 <= kappa < lambda <= 1 (got {kappa}, {lambda})")));
    }
    Ok(())
}

fn in_ul(kappa: f64, lambda: f64, (x, y): (f64, f64)) -> bool {
    lambda * x >= kappa * y - ANGLE_TOL && (1.0 - kappa) * (1.0 - y) >= (1.0 - lambda) * (1.0 - x) - ANGLE_TOL
}

fn in_lr(kappa: f64, lambda: f64, (x, y): (f64, f64)) -> bool {
    let same = (kappa - x).abs() <= ANGLE_TOL && (lambda - y).abs() <= ANGLE_TOL;
    !same && lambda * x <= kappa * y + ANGLE_TOL && (1.0 - kappa) * (1.0 - y) <= (1.0 - lambda) * (1.0 - x) + ANGLE_TOL
}

pub fn ul_member(kappa: f64, lambda: f64, d: usize) -> Result<bool> {
    check_pair(kappa, lambda)?;
    Ok(sd_set(d)?.into_iter().any(|p| in_ul(kappa, lambda, p)))
}

pub fn lr_member(kappa: f64, lambda: f64, d: usize) -> Result<bool> {
    check_pair(kappa, lambda)?;
    Ok(sd_set(d)?.into_iter().any(|p| in_lr(kappa, lambda, p)))
}

/// Bounds on an exact query count; `None` marks a side the search could not settle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactWindow {
    pub lower: Option<usize>,
    pub upper: Option<usize>,
}

pub fn qe_fnkl_window(n: usize, k: usize, l: usize, d_max: usize) -> Result<ExactWindow> {
    if k >= l || l > n {
        return Err(invalid(format!("need 0 <= k < l <= n (n={n}, k={k}, l={l})")));
    }
    let (kappa, lambda) = (k as f64 / n as f64, l as f64 / n as f64);
    let mut upper = None;
    let mut lower = None;
    for d in 1..=d_max {
        if upper.is_none() && ul_member(kappa, lambda, d)? {
            upper = Some(d);
        }
        if lr_member(kappa, lambda, d)? {
            lower = Some(d + 1);
        }
    }
    Ok(ExactWindow { lower, upper })
}

/// Exact queries to tell weight 0 from weight `m`: `⌈π/(2θ)⌉` with `θ = 2 asin√(m/n)`.
pub fn exact_zero_vs(n: usize, m: usize) -> Result<usize> {
    if m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n (n={n}, m={m})")));
    }
    let theta = RotationTrace::new(n, m)?.theta_alg2;
    Ok(snapped_ceil(PI / (2.0 * theta)).max(1) as usize)
}

pub fn qe_fnk_window(n: usize, k: usize) -> Result<ExactWindow> {
    check_fnk(n, k)?;
    let d = exact_zero_vs(n, k)?;
    Ok(ExactWindow { lower: Some(d), upper: Some(d + 2) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EliminationSchedule {
    pub zeros: Vec<usize>,
    pub ones: Vec<usize>,
    /// At most `|S_0| + |S_1| − 1` distinguisher runs.
    pub steps: usize,
    pub max_pair_cost: usize,
    pub total_query_bound: usize,
}

/// `⌈c·√((n−k)l)/(l−k)⌉`, the cost charged for one exact run on the pair `(k, l)`.
pub fn distinguisher_cost(n: usize, k: usize, l: usize, c: f64) -> usize {
    let (a, b) = (k.min(l), k.max(l));
    snapped_ceil(c * (((n - a) * b) as f64).sqrt() / (b - a) as f64).max(1) as usize
}

pub fn elimination_schedule(f: &WeightProfile, c: f64) -> Result<EliminationSchedule> {
    let pairs = f.sensitive_pairs();
    if pairs.is_empty() {
        return Err(invalid("constant profile needs no elimination"));
    }
    let (zeros, ones) = (f.zeros(), f.ones());
    let max_pair_cost = pairs.iter().map(|p| distinguisher_cost(f.n(), p.k, p.l, c)).max().unwrap_or(0);
    let steps = zeros.len() + ones.len() - 1;
    Ok(EliminationSchedule { zeros, ones, steps, max_pair_cost, total_query_bound: steps * max_pair_cost })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EliminationRun {
    pub output: bool,
    pub runs: usize,
    pub queries: usize,
}

/// Runs the elimination driver against `distinguish(a, b)`, which must return `a` or `b`;
/// returning `a` excludes `b` and vice versa.
pub fn run_elimination(
    f: &WeightProfile,
    c: f64,
    distinguish: &mut dyn FnMut(usize, usize) -> usize,
) -> Result<EliminationRun> {
    let (mut zeros, mut ones) = (f.zeros(), f.ones());
    if zeros.is_empty() && ones.is_empty() {
        return Err(invalid("profile has no defined weight"));
    }
    let (mut runs, mut queries) = (0, 0);
    while !zeros.is_empty() && !ones.is_empty() {
        let (k, l) = (zeros[0], ones[0]);
        queries += distinguisher_cost(f.n(), k, l, c);
        runs += 1;
        match distinguish(k, l) {
            a if a == k => ones.remove(0),
            b if b == l => zeros.remove(0),
            other => return Err(invalid(format!("distinguisher answered {other} for pair ({k}, {l})"))),
        };
    }
    Ok(EliminationRun { output: zeros.is_empty(), runs, queries })
}

/// Stub distinguisher: correct on `{a, b}`, otherwise answers from `pattern` bit by bit.
fn stub(w: usize, pattern: u64) -> impl FnMut(usize, usize) -> usize {
    let mut used = 0;
    move |a, b| {
        if w == a || w == b {
            return w;
        }
        let bit = pattern >> used & 1;
        used += 1;
        if bit == 0 {
            a
        } else {
            b
        }
    }
}

/// Driver outcomes at weight `w` under every off-promise answer pattern.
pub fn elimination_all_patterns(f: &WeightProfile, w: usize, c: f64) -> Result<Vec<EliminationRun>> {
    let bits = (f.zeros().len() + f.ones().len()).saturating_sub(1) as u32;
    (0..1u64 << bits).map(|p| run_elimination(f, c, &mut stub(w, p))).collect()
}

/// Four-case exact driver for `f_n^k` using `A_{0,m}` runs on `x` and its complement.
/// `distinguish(weight, m)` must return 0 or `m` and is exact when `weight ∈ {0, m}`.
pub fn run_fnk_driver(
    n: usize,
    k: usize,
    w: usize,
    distinguish: &mut dyn FnMut(usize, usize) -> usize,
) -> Result<EliminationRun> {
    check_fnk(n, k)?;
    let big = n - k;
    let cost_big = exact_zero_vs(n, big)?;
    let cost_small = exact_zero_vs(n, k)?;
    let r1 = distinguish(w, big);
    let r2 = distinguish(n - w, big);
    let (output, queries) = match (r1 == 0, r2 == 0) {
        (true, true) => (false, 2 * cost_big),
        (false, false) => (true, 2 * cost_big),
        (true, false) => (distinguish(w, k) != 0, 2 * cost_big + cost_small),
        (false, true) => (distinguish(n - w, k) != 0, 2 * cost_big + cost_small),
    };
    Ok(EliminationRun { output, runs: if queries > 2 * cost_big { 3 } else { 2 }, queries })
}

/// Outcomes of the `f_n^k` driver at weight `w` under every off-promise answer pattern.
pub fn fnk_driver_all_patterns(n: usize, k: usize, w: usize) -> Result<Vec<EliminationRun>> {
    (0..8u64)
        .map(|pattern| {
            let mut used = 0;
            let mut oracle = |weight: usize, m: usize| {
                if weight == 0 || weight == m {
                    return weight;
                }
                let bit = pattern >> used & 1;
                used += 1;
                if bit == 0 {
                    0
                } else {
                    m
                }
            };
            run_fnk_driver(n, k, w, &mut oracle)
        })
        .collect()
}
