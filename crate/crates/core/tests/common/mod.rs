//! Reference computations for the acceptance suite. Everything here is written from the
//! definitions and does not call into the library, except the generic LP solver used by the
//! full fractional-certificate formulation.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

pub fn choose(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn choose_q(n: i64, k: i64) -> Q {
    Q::from_integer(choose(n, k))
}

/// `K_l(t, T) = Σ_j (−1)^j C(t, j) C(T−t, l−j)`.
pub fn kravchuk(l: i64, t: i64, len: i64) -> BigInt {
    (0..=l).fold(BigInt::zero(), |acc, j| {
        let term = choose(t, j) * choose(len - t, l - j);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

pub fn binomial_pmf(trials: i64, p: &Q) -> Vec<Q> {
    let one_minus = Q::one() - p;
    (0..=trials)
        .map(|t| {
            choose_q(trials, t) * num_traits::pow(p.clone(), t as usize) * num_traits::pow(one_minus.clone(), (trials - t) as usize)
        })
        .collect()
}

/// Number of marked items among `draws` drawn without replacement from `n` items, `marked` of them marked.
pub fn hypergeometric_pmf(n: i64, marked: i64, draws: i64) -> Vec<Q> {
    let total = choose_q(n, draws);
    (0..=draws).map(|t| choose_q(marked, t) * choose_q(n - marked, draws - t) / total.clone()).collect()
}

pub fn tv(p: &[Q], r: &[Q]) -> Q {
    let len = p.len().max(r.len());
    let get = |v: &[Q], i: usize| v.get(i).cloned().unwrap_or_else(Q::zero);
    (0..len).fold(Q::zero(), |acc, i| acc + (get(p, i) - get(r, i)).abs()) / qi(2)
}

/// Single-sample test: guess `r` on `S1 = {p < r}` and randomize so both error rates agree.
/// Returns `(P(correct | p), P(correct | r), a, b)`.
pub fn one_sample_test(p: &[Q], r: &[Q]) -> (Q, Q, Q, Q) {
    let s1: Vec<usize> = (0..p.len()).filter(|&i| p[i] < r[i]).collect();
    let a = s1.iter().fold(Q::zero(), |acc, &i| acc + p[i].clone());
    let b = s1.iter().fold(Q::zero(), |acc, &i| acc + r[i].clone());
    let sum = a.clone() + b.clone();
    let (on_s1, off_s1) = if sum >= Q::one() {
        (Q::one() / sum.clone(), Q::zero())
    } else {
        (Q::one(), (Q::one() - sum.clone()) / (qi(2) - sum.clone()))
    };
    let guess_r = |i: usize| if s1.contains(&i) { on_s1.clone() } else { off_s1.clone() };
    let succ_p = Q::one() - (0..p.len()).fold(Q::zero(), |acc, i| acc + p[i].clone() * guess_r(i));
    let succ_r = (0..r.len()).fold(Q::zero(), |acc, i| acc + r[i].clone() * guess_r(i));
    (succ_p, succ_r, a, b)
}

/// Overlap `|⟨ψ|G^T|ψ⟩|²` for Grover iterates `G = (2|ψ⟩⟨ψ| − I)·O_x` on `1^w 0^{n−w}`, by
/// dense simulation over the `n` index states.
pub fn grover_return_prob(n: usize, w: usize, steps: usize) -> f64 {
    let amp = 1.0 / (n as f64).sqrt();
    let mut state = vec![amp; n];
    for _ in 0..steps {
        for s in state.iter_mut().take(w) {
            *s = -*s;
        }
        let overlap: f64 = state.iter().map(|s| s * amp).sum();
        for s in state.iter_mut() {
            *s = 2.0 * overlap * amp - *s;
        }
    }
    let overlap: f64 = state.iter().map(|s| s * amp).sum();
    overlap * overlap
}

/// Phase-estimation law with a `t`-point register on `(|ψ₊⟩ + |ψ₋⟩)/√2`, eigenphases `±θ`,
/// `a = sin²(πθ)`. Returns `(estimate sin²(πy/t), probability)` per outcome `y`.
pub fn amplitude_estimation(a: f64, t: usize) -> Vec<(f64, f64)> {
    let theta = a.sqrt().asin() / PI;
    let amp_sq = |phase: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for j in 0..t {
            let ang = 2.0 * PI * j as f64 * phase;
            re += ang.cos();
            im += ang.sin();
        }
        (re * re + im * im) / (t * t) as f64
    };
    (0..t)
        .map(|y| {
            let frac = y as f64 / t as f64;
            let p = 0.5 * amp_sq(theta - frac) + 0.5 * amp_sq(-theta - frac);
            ((PI * frac).sin().powi(2), p)
        })
        .collect()
}

/// Values per weight: `None` for undefined.
pub type Profile = Vec<Option<bool>>;

pub fn all_profiles(n: usize) -> impl Iterator<Item = Profile> {
    let count = 3usize.pow(n as u32 + 1);
    (0..count).map(move |mut code| {
        (0..=n)
            .map(|_| {
                let v = code % 3;
                code /= 3;
                match v {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                }
            })
            .collect()
    })
}

/// Weights reachable from `a` that carry the opposite defined value, as a bitmask.
fn flip_targets(f: &Profile, a: usize) -> Option<u64> {
    let va = f[a]?;
    Some(f.iter().enumerate().filter(|(_, v)| **v == Some(!va)).fold(0u64, |m, (w, _)| m | (1 << w)))
}

/// Most disjoint blocks at `1^a 0^{n−a}`: a block flips `u` ones and `v` zeros and must land on
/// a target weight. Two-dimensional unbounded knapsack over the numbers of ones and zeros used.
fn bs_knapsack(n: usize, a: usize, targets: u64) -> usize {
    let (ones, zeros) = (a, n - a);
    let mut best = vec![vec![0usize; zeros + 1]; ones + 1];
    for i in 0..=ones {
        for j in 0..=zeros {
            let mut b = 0;
            if i > 0 {
                b = b.max(best[i - 1][j]);
            }
            if j > 0 {
                b = b.max(best[i][j - 1]);
            }
            for u in 0..=i {
                for v in 0..=j {
                    if u + v == 0 {
                        continue;
                    }
                    let target = a + v - u;
                    if targets >> target & 1 == 1 {
                        b = b.max(best[i - u][j - v] + 1);
                    }
                }
            }
            best[i][j] = b;
        }
    }
    best[ones][zeros]
}

#[derive(Default)]
pub struct BsOracle {
    memo: HashMap<(usize, usize, u64), usize>,
}

impl BsOracle {
    pub fn bs(&mut self, f: &Profile) -> usize {
        let n = f.len() - 1;
        (0..=n)
            .filter_map(|a| {
                let t = flip_targets(f, a)?;
                Some(*self.memo.entry((n, a, t)).or_insert_with(|| bs_knapsack(n, a, t)))
            })
            .max()
            .unwrap_or(0)
    }
}

/// Block sensitivity by brute force over the cube: every input in the domain, every family of
/// disjoint sensitive blocks.
pub fn bs_cube(f: &Profile) -> usize {
    let n = f.len() - 1;
    let value = |x: u32| f[x.count_ones() as usize];
    fn most(x: u32, free: u32, vx: bool, value: &dyn Fn(u32) -> Option<bool>) -> usize {
        let mut best = 0;
        let mut block = free;
        while block != 0 {
            if value(x ^ block) == Some(!vx) {
                best = best.max(1 + most(x, free & !block, vx, value));
            }
            block = (block - 1) & free;
        }
        best
    }
    (0..1u32 << n)
        .filter_map(|x| value(x).map(|vx| most(x, (1 << n) - 1, vx, &value)))
        .max()
        .unwrap_or(0)
}

/// Fractional block sensitivity from the full certificate LP over every subset of `[n]`.
#[derive(Default)]
pub struct FbsOracle {
    memo: HashMap<(usize, usize, u64), Q>,
}

impl FbsOracle {
    pub fn fbs(&mut self, f: &Profile) -> Q {
        let n = f.len() - 1;
        let mut best = Q::zero();
        for a in 0..=n {
            if let Some(t) = flip_targets(f, a) {
                let v = self.memo.entry((n, a, t)).or_insert_with(|| fbs_lp(n, a, t)).clone();
                if v > best {
                    best = v;
                }
            }
        }
        best
    }
}

fn fbs_lp(n: usize, a: usize, targets: u64) -> Q {
    use symq::lp::{solve, Direction, LinearProgram, Relation};
    let ones_mask: u32 = (1u32 << a) - 1;
    let blocks: Vec<u32> = (1u32..1 << n)
        .filter(|&b| {
            let u = (b & ones_mask).count_ones() as usize;
            let v = (b & !ones_mask).count_ones() as usize;
            targets >> (a + v - u) & 1 == 1
        })
        .collect();
    if blocks.is_empty() {
        return Q::zero();
    }
    let mut lp = LinearProgram::new(Direction::Maximize, vec![qi(1); blocks.len()]);
    for i in 0..n {
        let row = blocks.iter().map(|b| if b >> i & 1 == 1 { qi(1) } else { qi(0) }).collect();
        lp.add_constraint(row, Relation::Le, qi(1));
    }
    for v in 0..blocks.len() {
        lp.set_bounds(v, Some(qi(0)), None);
    }
    solve(&lp).expect("fbs LP").value.expect("bounded")
}

/// Bias of the best strategy reading the count of ones among `T` distinct random positions,
/// restricted to strategies `q` supplied by the caller: `min_w P(correct | w) − ½`.
pub fn strategy_bias(f: &Profile, t_len: usize, strategy: &[Q]) -> Q {
    let n = f.len() - 1;
    let mut worst: Option<Q> = None;
    for (w, v) in f.iter().enumerate() {
        let Some(v) = *v else { continue };
        let pmf = hypergeometric_pmf(n as i64, w as i64, t_len as i64);
        let one = pmf.iter().zip(strategy).fold(Q::zero(), |acc, (p, s)| acc + p.clone() * s.clone());
        let correct = if v { one } else { Q::one() - one };
        worst = Some(match worst {
            Some(x) if x <= correct => x,
            _ => correct,
        });
    }
    worst.unwrap() - q(1, 2)
}

/// Whether some count-based strategy is always correct: the count supports of zero-inputs and
/// one-inputs are disjoint.
pub fn perfect_strategy_exists(f: &Profile, t_len: usize) -> bool {
    let n = f.len() - 1;
    let support = |w: usize| {
        let lo = t_len.saturating_sub(n - w);
        let hi = w.min(t_len);
        lo..=hi
    };
    let mut seen = vec![None::<bool>; t_len + 1];
    for (w, v) in f.iter().enumerate() {
        let Some(v) = *v else { continue };
        for t in support(w) {
            match seen[t] {
                Some(prev) if prev != v => return false,
                _ => seen[t] = Some(v),
            }
        }
    }
    true
}
