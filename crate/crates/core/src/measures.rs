//! Block sensitivity, fractional block sensitivity, (approximate) degree and the tight-bound
//! formulas for symmetric profiles.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dist::{Basis, UniPoly};
use crate::error::{invalid, Result};
use crate::lp::{self, Backend, Direction, LinearProgram, LpStatus, Relation};
use crate::numeric::{format_rational, rat, rat_int, Rational, Scalar};
use crate::profile::WeightProfile;

/// Distances from weight `a` to the nearest defined weight with a different value, below and above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gaps {
    pub down: Option<usize>,
    pub up: Option<usize>,
}

pub fn gaps(f: &WeightProfile, a: usize) -> Gaps {
    let Some(v) = f.bit(a) else { return Gaps { down: None, up: None } };
    let differs = |w: usize| f.bit(w).is_some_and(|b| b != v);
    Gaps {
        down: (0..a).rev().find(|&w| differs(w)).map(|w| a - w),
        up: (a + 1..=f.n()).find(|&w| differs(w)).map(|w| w - a),
    }
}

/// `bs(f, x)` for any input `x` of defined weight `a`.
pub fn block_sensitivity_at(f: &WeightProfile, a: usize) -> usize {
    let g = gaps(f, a);
    g.down.map_or(0, |d| a / d) + g.up.map_or(0, |u| (f.n() - a) / u)
}

pub fn block_sensitivity(f: &WeightProfile) -> usize {
    f.defined_weights().into_iter().map(|a| block_sensitivity_at(f, a)).max().unwrap_or(0)
}

/// `FC(f, x)` for any input `x` of defined weight `a`.
pub fn fbs_at(f: &WeightProfile, a: usize) -> Rational {
    let g = gaps(f, a);
    let down = g.down.map_or(rat_int(0), |d| rat(a as i64, d as i64));
    let up = g.up.map_or(rat_int(0), |u| rat((f.n() - a) as i64, u as i64));
    down + up
}

pub fn fractional_block_sensitivity(f: &WeightProfile) -> Rational {
    f.defined_weights().into_iter().map(|a| fbs_at(f, a)).max().unwrap_or_else(|| rat_int(0))
}

/// Feasible polynomial `q` of a given degree, in the Chebyshev basis of `x = 2w/n − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyWitness {
    pub degree: usize,
    pub eps: Rational,
    pub poly: UniPoly<Rational>,
    /// `q(w)` for `w = 0..=n`.
    pub values: Vec<Rational>,
}

/// Chebyshev values `T_0(x)..=T_d(x)`.
pub(crate) fn chebyshev_row<S: Scalar>(x: &S, d: usize) -> Vec<S> {
    let mut row = Vec::with_capacity(d + 1);
    row.push(S::one());
    if d >= 1 {
        row.push(x.clone());
    }
    for j in 2..=d {
        let next = S::from_int(2) * x.clone() * row[j - 1].clone() - row[j - 2].clone();
        row.push(next);
    }
    row
}

fn weight_point(n: usize, w: usize) -> Rational {
    rat(2 * w as i64 - n as i64, n as i64)
}

fn value_window(f: &WeightProfile, w: usize, eps: &Rational) -> (Rational, Rational) {
    match f.bit(w) {
        None => (rat_int(0), rat_int(1)),
        Some(b) => {
            let target = if b { rat_int(1) } else { rat_int(0) };
            let lo = target.clone() - eps.clone();
            let hi = target + eps.clone();
            (lo.max(rat_int(0)), hi.min(rat_int(1)))
        }
    }
}

fn degree_program(f: &WeightProfile, d: usize, eps: &Rational) -> LinearProgram<Rational> {
    let n = f.n();
    let mut lp = LinearProgram::new(Direction::Minimize, vec![rat_int(0); d + 1]);
    for j in 0..=d {
        lp.set_bounds(j, None, None);
    }
    for w in 0..=n {
        let row = chebyshev_row(&weight_point(n, w), d);
        let (lo, hi) = value_window(f, w, eps);
        if lo == hi {
            lp.add_constraint(row, Relation::Eq, lo);
        } else {
            lp.add_constraint(row.clone(), Relation::Ge, lo);
            lp.add_constraint(row, Relation::Le, hi);
        }
    }
    lp
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps.is_negative() || *eps >= rat(1, 2) {
        return Err(invalid(format!("eps must lie in [0, 1/2), got {}", format_rational(eps))));
    }
    Ok(())
}

/// Feasibility of the degree-`d` program; returns the witness when one exists.
pub fn degree_witness_at(f: &WeightProfile, d: usize, eps: &Rational) -> Result<Option<PolyWitness>> {
    check_eps(eps)?;
    let lp = degree_program(f, d, eps);
    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let poly = UniPoly::new(Basis::Chebyshev, sol.point);
    let values = (0..=f.n()).map(|w| poly.eval(&weight_point(f.n(), w))).collect();
    Ok(Some(PolyWitness { degree: d, eps: eps.clone(), poly, values }))
}

fn feasible_with(f: &WeightProfile, d: usize, eps: &Rational, backend: Backend) -> Result<bool> {
    let lp = degree_program(f, d, eps);
    Ok(lp::solve_with(&lp, backend)?.status == LpStatus::Optimal)
}

fn min_feasible_degree(f: &WeightProfile, mut pred: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (0usize, f.n());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Minimal-degree ε-approximating polynomial, solved exactly.
pub fn approx_degree_witness(f: &WeightProfile, eps: &Rational) -> Result<PolyWitness> {
    check_eps(eps)?;
    let d = min_feasible_degree(f, |d| feasible_with(f, d, eps, Backend::Rational))?;
    Ok(degree_witness_at(f, d, eps)?.expect("feasible degree has a witness"))
}

pub fn approx_degree_with(f: &WeightProfile, eps: &Rational, backend: Backend) -> Result<usize> {
    check_eps(eps)?;
    min_feasible_degree(f, |d| feasible_with(f, d, eps, backend))
}

pub fn approx_degree(f: &WeightProfile, eps: &Rational) -> Result<usize> {
    approx_degree_with(f, eps, Backend::Rational)
}

pub fn degree(f: &WeightProfile) -> Result<usize> {
    approx_degree(f, &rat_int(0))
}

/// `max{β√((n−k)l)/(l−k), √(βn/(l−k))}`.
pub fn paturi_bound(n: usize, k: usize, l: usize, beta: f64) -> Result<f64> {
    if k >= l || l > n || !(beta > 0.0 && beta <= 0.5) {
        return Err(invalid(format!("need 0 <= k < l <= n and 0 < beta <= 1/2 (n={n}, k={k}, l={l}, beta={beta})")));
    }
    let gap = (l - k) as f64;
    Ok((beta * (((n - k) * l) as f64).sqrt() / gap).max((beta * n as f64 / gap).sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightBounds {
    /// `max n/(l−k)` over sensitive pairs.
    pub tight_bs: Rational,
    /// `max √((n−k)l)/(l−k)` over sensitive pairs.
    pub tight_q: f64,
    /// Square of `tight_q`, exact.
    pub tight_q_sq: Rational,
}

pub fn tight_bounds(f: &WeightProfile) -> TightBounds {
    let n = f.n() as i64;
    let mut tight_bs = rat_int(0);
    let mut tight_q_sq = rat_int(0);
    for p in f.sensitive_pairs() {
        let gap = (p.l - p.k) as i64;
        tight_bs = tight_bs.max(rat(n, gap));
        tight_q_sq = tight_q_sq.max(rat((n - p.k as i64) * p.l as i64, gap * gap));
    }
    TightBounds { tight_q: tight_q_sq.to_f64().sqrt(), tight_bs, tight_q_sq }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub bs: usize,
    pub fbs: Rational,
    pub deg: usize,
    /// Approximate degree keyed by the ε used, rendered as `p/q`.
    pub adeg: BTreeMap<String, usize>,
    pub tight_bs_formula: Rational,
    pub tight_q_formula: f64,
    pub lp_backend: Backend,
}

/// Profiles up to this length use the exact LP backend in reports.
pub const EXACT_REPORT_MAX_N: usize = 40;

pub fn measure_report(f: &WeightProfile, eps_values: &[Rational]) -> Result<MeasureReport> {
    let backend = if f.n() <= EXACT_REPORT_MAX_N { Backend::Rational } else { Backend::Float };
    let tb = tight_bounds(f);
    let mut adeg = BTreeMap::new();
    for eps in eps_values {
        adeg.insert(format_rational(eps), approx_degree_with(f, eps, backend)?);
    }
    Ok(MeasureReport {
        bs: block_sensitivity(f),
        fbs: fractional_block_sensitivity(f),
        deg: approx_degree_with(f, &Rational::zero(), backend)?,
        adeg,
        tight_bs_formula: tb.tight_bs,
        tight_q_formula: tb.tight_q,
        lp_backend: backend,
    })
}

/// Degree-gap witness: zero on weights `0..=n/2`, one on weight `n`.
pub fn gap_witness(n: usize) -> Result<WeightProfile> {
    if n < 2 || n % 2 == 1 {
        return Err(invalid(format!("gap witness needs an even n >= 2, got {n}")));
    }
    WeightProfile::from_sets(n, &[n], &(0..=n / 2).collect::<Vec<_>>())
}

/// Evaluates a witness polynomial at weight `w`.
pub fn witness_value(w: &PolyWitness, n: usize, weight: usize) -> Rational {
    w.poly.eval(&weight_point(n, weight))
}

#[cfg(test)]
pub(crate) fn is_unit(r: &Rational) -> bool {
    !r.is_negative() && *r <= <Rational as num_traits::One>::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{make_fnk, make_fnkl};
    use crate::testutil::arb_profile;
    use proptest::prelude::*;

    #[test]
    fn bs_examples() {
        let f = make_fnk(4, 1).unwrap();
        assert_eq!(block_sensitivity(&f), 4);
        for n in 1..10 {
            assert_eq!(block_sensitivity(&make_fnkl(n, 0, n).unwrap()), 1);
        }
    }

    #[test]
    fn fbs_examples() {
        let f = make_fnk(4, 1).unwrap();
        assert_eq!(fractional_block_sensitivity(&f), rat_int(4));
        assert_eq!(fbs_at(&f, 1), rat_int(2));
    }

    #[test]
    fn degree_examples() {
        for n in 1..8 {
            let f = make_fnkl(n, 0, n).unwrap();
            assert_eq!(degree(&f).unwrap(), 1);
            let w = approx_degree_witness(&f, &rat_int(0)).unwrap();
            for weight in 0..=n {
                assert_eq!(w.values[weight], rat(weight as i64, n as i64));
            }
        }
        let witness = gap_witness(8).unwrap();
        assert!(degree(&witness).unwrap() >= 5);
        assert!(degree_witness_at(&witness, 4, &rat_int(0)).unwrap().is_none());
    }

    #[test]
    fn witness_respects_constraints() {
        let f = make_fnk(10, 3).unwrap();
        let eps = rat(1, 3);
        let w = approx_degree_witness(&f, &eps).unwrap();
        for (weight, q) in w.values.iter().enumerate() {
            assert!(is_unit(q));
            if let Some(b) = f.bit(weight) {
                let target = if b { rat_int(1) } else { rat_int(0) };
                assert!((q.clone() - target).abs() <= eps);
            }
        }
        assert!(degree_witness_at(&f, w.degree.saturating_sub(1), &eps).unwrap().is_none() || w.degree == 0);
    }

    #[test]
    fn adeg_at_least_paturi_shape() {
        // The Paturi expression is an Ω-argument; check the LP against it with constant 1/8.
        for (n, k, l) in [(12usize, 0usize, 6usize), (16, 2, 4), (20, 1, 3), (24, 5, 12)] {
            let f = make_fnkl(n, k, l).unwrap();
            let d = approx_degree(&f, &rat(1, 3)).unwrap() as f64;
            let p = paturi_bound(n, k, l, 1.0 / 6.0).unwrap();
            assert!(d >= p / 8.0, "n={n} k={k} l={l} d={d} p={p}");
        }
    }

    #[test]
    fn paturi_examples() {
        assert!((paturi_bound(100, 1, 2, 0.5).unwrap() - 50f64.sqrt()).abs() < 1e-12);
        let small = paturi_bound(4, 0, 4, 0.5).unwrap();
        assert!((small - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(paturi_bound(100, 1, 2, 1e-12).unwrap() < 2e-5);
        assert!(paturi_bound(4, 2, 1, 0.5).is_err());
    }

    #[test]
    fn tight_examples() {
        let t = tight_bounds(&make_fnk(4, 1).unwrap());
        assert_eq!(t.tight_bs, rat_int(4));
        assert!((t.tight_q - 2.0).abs() < 1e-15);
        let u = tight_bounds(&make_fnkl(9, 0, 9).unwrap());
        assert_eq!((u.tight_bs, u.tight_q_sq), (rat_int(1), rat_int(1)));
        for n in [8, 12, 20] {
            assert_eq!(tight_bounds(&gap_witness(n).unwrap()).tight_q_sq, rat_int(2));
        }
        let c = WeightProfile::from_sets(5, &[1, 2], &[]).unwrap();
        assert_eq!(tight_bounds(&c).tight_q, 0.0);
    }

    #[test]
    fn float_backend_matches_for_small_profiles() {
        for spec in ["fnk:n=12,k=3", "fnkl:n=10,k=2,l=7", "table:n=9,ones=0;4;9,zeros=2;6"] {
            let f: WeightProfile = spec.parse().unwrap();
            for eps in [rat(0, 1), rat(1, 3), rat(1, 10)] {
                assert_eq!(approx_degree_with(&f, &eps, Backend::Float).unwrap(), approx_degree(&f, &eps).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn measure_chain(f in arb_profile(12)) {
            let bs = block_sensitivity(&f);
            let fbs = fractional_block_sensitivity(&f);
            let tb = tight_bounds(&f);
            prop_assert!(rat_int(bs as i64) <= fbs);
            prop_assert!(fbs <= tb.tight_bs);
            let half = (tb.tight_bs.clone() / rat_int(2)).floor();
            prop_assert!(half <= rat_int(bs as i64));
            for p in f.sensitive_pairs() {
                prop_assert!(bs >= f.n() / (2 * (p.l - p.k)));
            }
        }

        #[test]
        fn adeg_monotone_in_eps(f in arb_profile(9)) {
            let d0 = degree(&f).unwrap();
            let d1 = approx_degree(&f, &rat(1, 10)).unwrap();
            let d2 = approx_degree(&f, &rat(1, 3)).unwrap();
            let d3 = approx_degree(&f, &rat(9, 20)).unwrap();
            prop_assert!(d0 >= d1 && d1 >= d2 && d2 >= d3);
        }
    }
}
