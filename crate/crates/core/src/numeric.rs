//! Scalar abstraction over exact rationals and `f64`, plus binomial helpers.

use std::fmt::Debug;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Field elements used by the solvers and distributions.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether the value can be trusted (always true for rationals).
    fn is_finite_value(&self) -> bool;
    /// Strictly positive beyond the backend's tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the backend's tolerance.
    fn is_neg(&self) -> bool;

    fn from_int(i: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(i)))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

/// Tolerance used by the float backend for sign decisions.
pub const FLOAT_EPS: f64 = 1e-11;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_EPS
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

/// Converts a rational to the nearest `f64`, surviving huge numerators and denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = num_traits::ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling by bit length when both parts overflow f64.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (n2, d2) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let scaled = num_traits::ToPrimitive::to_f64(&Rational::new(n2, d2)).unwrap_or(f64::NAN);
    scaled * 2f64.powi(shift as i32)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rat_from_big(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

/// Exact conversion of a finite `f64` into a rational.
pub fn rat_from_f64(v: f64) -> Option<Rational> {
    Rational::from_f64(v)
}

/// Parses decimal or fraction text (`0.4`, `2/5`, `-3`, `1e-3`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let num = BigInt::parse_bytes(a.trim().as_bytes(), 10)?;
        let den = BigInt::parse_bytes(b.trim().as_bytes(), 10)?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let num = BigInt::parse_bytes(all.as_bytes(), 10)?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

const PASCAL_ROWS: usize = 257;

fn pascal() -> &'static Vec<Vec<BigUint>> {
    static TABLE: OnceLock<Vec<Vec<BigUint>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(PASCAL_ROWS);
        rows.push(vec![BigUint::one()]);
        for n in 1..PASCAL_ROWS {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        rows
    })
}

/// C(n, k) with the convention C(n, k) = 0 outside 0 ≤ k ≤ n.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let (n, k) = (n as usize, k as usize);
    if n < PASCAL_ROWS {
        return pascal()[n][k].clone();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn binomial_rat(n: i64, k: i64) -> Rational {
    rat_from_big(&binomial(n, k))
}

pub fn binomial_f64(n: i64, k: i64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Rounds `x` up, snapping values within `1e-9` of an integer onto it first.
pub fn snapped_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Rounds `x` down with the same integer snapping as [`snapped_ceil`].
pub fn snapped_floor(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.floor() as i64
    }
}
