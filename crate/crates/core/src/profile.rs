//! Partial symmetric Boolean functions described by their value on each Hamming weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SymqError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    Zero,
    One,
    Undefined,
}

impl Value {
    pub fn bit(self) -> Option<bool> {
        match self {
            Value::Zero => Some(false),
            Value::One => Some(true),
            Value::Undefined => None,
        }
    }

    pub fn from_bit(b: bool) -> Self {
        if b {
            Value::One
        } else {
            Value::Zero
        }
    }

    pub fn is_defined(self) -> bool {
        self != Value::Undefined
    }
}

/// A pair of defined weights `k < l` on which the function differs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensitivePair {
    pub k: usize,
    pub l: usize,
}

/// Value table over weights `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightProfile {
    n: usize,
    values: Vec<Value>,
}

impl WeightProfile {
    pub fn new(values: Vec<Value>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("profile needs n >= 1"));
        }
        if !values.iter().any(|v| v.is_defined()) {
            return Err(invalid("profile has no defined weight"));
        }
        Ok(Self { n: values.len() - 1, values })
    }

    pub fn from_sets(n: usize, ones: &[usize], zeros: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let mut values = vec![Value::Undefined; n + 1];
        for (set, val) in [(ones, Value::One), (zeros, Value::Zero)] {
            for &w in set {
                if w > n {
                    return Err(invalid(format!("weight {w} exceeds n = {n}")));
                }
                if values[w].is_defined() && values[w] != val {
                    return Err(invalid(format!("weight {w} listed as both one and zero")));
                }
                values[w] = val;
            }
        }
        Self::new(values)
    }

    /// Total function from a bit per weight.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| Value::from_bit(b)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn value(&self, w: usize) -> Value {
        self.values.get(w).copied().unwrap_or(Value::Undefined)
    }

    pub fn bit(&self, w: usize) -> Option<bool> {
        self.value(w).bit()
    }

    pub fn defined_weights(&self) -> Vec<usize> {
        (0..=self.n).filter(|&w| self.values[w].is_defined()).collect()
    }

    pub fn zeros(&self) -> Vec<usize> {
        (0..=self.n).filter(|&w| self.values[w] == Value::Zero).collect()
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..=self.n).filter(|&w| self.values[w] == Value::One).collect()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| v.is_defined())
    }

    pub fn is_constant(&self) -> bool {
        self.zeros().is_empty() || self.ones().is_empty()
    }

    pub fn sensitive_pairs(&self) -> Vec<SensitivePair> {
        let defined = self.defined_weights();
        let mut pairs = Vec::new();
        for (i, &k) in defined.iter().enumerate() {
            for &l in &defined[i + 1..] {
                if self.values[k] != self.values[l] {
                    pairs.push(SensitivePair { k, l });
                }
            }
        }
        pairs
    }

    /// Profile of `x ↦ f(x̄)`: weight `w` takes the value at `n − w`.
    pub fn complement(&self) -> Self {
        let values = self.values.iter().rev().copied().collect();
        Self { n: self.n, values }
    }

    /// Appends `m` constant-zero input bits; weights above `n` stay undefined.
    pub fn pad_zeros(&self, m: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(self.n + m + 1, Value::Undefined);
        Self { n: self.n + m, values }
    }

    /// True when `f(w) = f(n − w)` for every weight, with undefined counted as a value.
    pub fn is_even(&self) -> bool {
        (0..=self.n).all(|w| self.values[w] == self.values[self.n - w])
    }

    /// Canonical `table:` spec string.
    pub fn to_spec(&self) -> String {
        let join = |ws: Vec<usize>| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";");
        format!("table:n={},ones={},zeros={}", self.n, join(self.ones()), join(self.zeros()))
    }
}

/// `f_n^k`: zero on weights `{0, n}`, one on `{k, n − k}`.
pub fn make_fnk(n: usize, k: usize) -> Result<WeightProfile> {
    if k < 1 || 2 * k > n {
        return Err(invalid(format!("fnk requires 1 <= k <= n/2, got n={n}, k={k}")));
    }
    WeightProfile::from_sets(n, &[k, n - k], &[0, n])
}

/// `f_n^{k,l}`: zero on weight `k`, one on weight `l`.
pub fn make_fnkl(n: usize, k: usize, l: usize) -> Result<WeightProfile> {
    if k >= l || l > n {
        return Err(invalid(format!("fnkl requires 0 <= k < l <= n, got n={n}, k={k}, l={l}")));
    }
    WeightProfile::from_sets(n, &[l], &[k])
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    n: usize,
    #[serde(default)]
    ones: Vec<usize>,
    #[serde(default)]
    zeros: Vec<usize>,
}

impl Serialize for WeightProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileJson { n: self.n, ones: self.ones(), zeros: self.zeros() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ProfileJson::deserialize(d)?;
        WeightProfile::from_sets(j.n, &j.ones, &j.zeros).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_spec())
    }
}

fn parse_fields(body: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| SymqError::Parse(format!("expected key=value, got `{part}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn field<'a>(fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| SymqError::Parse(format!("missing field `{key}`")))
}

fn int_field(fields: &[(String, String)], key: &str) -> Result<usize> {
    let v = field(fields, key)?;
    v.parse().map_err(|_| SymqError::Parse(format!("`{key}` is not a non-negative integer: `{v}`")))
}

fn weight_list(text: &str) -> Result<Vec<usize>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| SymqError::Parse(format!("bad weight `{s}`"))))
        .collect()
}

fn check_keys(fields: &[(String, String)], allowed: &[&str]) -> Result<()> {
    for (k, _) in fields {
        if !allowed.contains(&k.as_str()) {
            return Err(SymqError::Parse(format!("unknown field `{k}`")));
        }
    }
    Ok(())
}

impl FromStr for WeightProfile {
    type Err = SymqError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let j: ProfileJson =
                serde_json::from_str(s).map_err(|e| SymqError::Parse(e.to_string()))?;
            return WeightProfile::from_sets(j.n, &j.ones, &j.zeros)
                .map_err(|e| SymqError::Parse(e.to_string()));
        }
        let (kind, body) =
            s.split_once(':').ok_or_else(|| SymqError::Parse(format!("missing `kind:` in `{s}`")))?;
        let fields = parse_fields(body)?;
        let reparse = |e: SymqError| SymqError::Parse(e.to_string());
        match kind.trim() {
            "fnk" => {
                check_keys(&fields, &["n", "k"])?;
                make_fnk(int_field(&fields, "n")?, int_field(&fields, "k")?).map_err(reparse)
            }
            "fnkl" => {
                check_keys(&fields, &["n", "k", "l"])?;
                make_fnkl(int_field(&fields, "n")?, int_field(&fields, "k")?, int_field(&fields, "l")?)
                    .map_err(reparse)
            }
            "table" => {
                check_keys(&fields, &["n", "ones", "zeros"])?;
                let n = int_field(&fields, "n")?;
                let ones = weight_list(field(&fields, "ones").unwrap_or(""))?;
                let zeros = weight_list(field(&fields, "zeros").unwrap_or(""))?;
                WeightProfile::from_sets(n, &ones, &zeros).map_err(reparse)
            }
            other => Err(SymqError::Parse(format!("unknown function kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_profile;
    use proptest::prelude::*;
    use Value::*;

    #[test]
    fn fnk_examples() {
        assert_eq!(make_fnk(4, 1).unwrap().values(), &[Zero, One, Undefined, One, Zero]);
        assert_eq!(make_fnk(2, 1).unwrap().values(), &[Zero, One, Zero]);
        assert_eq!(make_fnk(6, 3).unwrap().value(3), One);
        assert!(make_fnk(4, 3).is_err());
        assert!(make_fnk(4, 0).is_err());
    }

    #[test]
    fn fnkl_examples() {
        let f = make_fnkl(4, 0, 4).unwrap();
        assert_eq!(f.defined_weights(), vec![0, 4]);
        let g = make_fnkl(4, 1, 2).unwrap();
        assert_eq!((g.value(1), g.value(2)), (Zero, One));
        assert!(make_fnkl(4, 2, 2).is_err());
        assert!(make_fnkl(4, 1, 5).is_err());
    }

    #[test]
    fn complement_and_padding() {
        let c = make_fnkl(4, 1, 2).unwrap().complement();
        assert_eq!((c.value(3), c.value(2)), (Zero, One));
        let p = make_fnkl(4, 1, 2).unwrap().pad_zeros(12);
        assert_eq!(p.n(), 16);
        assert_eq!(p.defined_weights(), vec![1, 2]);
        assert!(make_fnk(6, 2).unwrap().is_even());
        assert!(!make_fnkl(4, 0, 2).unwrap().is_even());
    }

    #[test]
    fn spec_strings() {
        let f: WeightProfile = "fnk:n=4,k=1".parse().unwrap();
        assert_eq!(f, make_fnk(4, 1).unwrap());
        let g: WeightProfile = "table:n=4,ones=1;3,zeros=0;4".parse().unwrap();
        assert_eq!(g, f);
        let h: WeightProfile = r#"{"n":4,"ones":[1,3],"zeros":[0,4]}"#.parse().unwrap();
        assert_eq!(h, f);
        assert_eq!(f.to_spec().parse::<WeightProfile>().unwrap(), f);
        assert!("fnk:n=4".parse::<WeightProfile>().is_err());
        assert!("bogus".parse::<WeightProfile>().is_err());
        assert!("fnk:n=4,k=1,z=2".parse::<WeightProfile>().is_err());
        assert!("table:n=3,ones=,zeros=".parse::<WeightProfile>().is_err());
    }

    proptest! {
        #[test]
        fn complement_is_involution(f in arb_profile(12)) {
            prop_assert_eq!(f.complement().complement(), f);
        }

        #[test]
        fn padding_keeps_values(f in arb_profile(10), m in 0usize..8) {
            let p = f.pad_zeros(m);
            prop_assert_eq!(p.defined_weights(), f.defined_weights());
            for w in f.defined_weights() {
                prop_assert_eq!(p.value(w), f.value(w));
            }
        }

        #[test]
        fn fnk_always_even(n in 2usize..40, k in 1usize..20) {
            prop_assume!(2 * k <= n);
            prop_assert!(make_fnk(n, k).unwrap().is_even());
        }

        #[test]
        fn spec_round_trip(f in arb_profile(12)) {
            prop_assert_eq!(f.to_spec().parse::<WeightProfile>().unwrap(), f.clone());
            let json = serde_json::to_string(&f).unwrap();
            prop_assert_eq!(json.parse::<WeightProfile>().unwrap(), f);
        }
    }
}
