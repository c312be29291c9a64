use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// `z^m - sum_i z^(m - l_i)` with `m = max l_i`.
    pub fn from_lengths(lengths: &[usize]) -> Self {
        let m = lengths.iter().copied().max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); m + 1];
        coeffs[m] += 1;
        for &l in lengths {
            coeffs[m - l] -= 1;
        }
        Self::new(coeffs)
    }

    /// Number of sign changes in the coefficient sequence, zeros skipped.
    pub fn sign_changes(&self) -> usize {
        sign_changes(self.coeffs.iter().map(|c| c.sign()))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Divides out the largest power of `z`.
    pub fn strip_zero_roots(&self) -> (Self, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (Self { coeffs: self.coeffs[k..].to_vec() }, k)
    }

    pub(crate) fn to_rational(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// Scales a rational polynomial to a primitive integer polynomial with
    /// positive leading coefficient.
    pub(crate) fn from_rational(p: &RatPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let lcm = p.c.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.c.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        Self::new(ints.into_iter().map(|c| c / &g * &sign).collect())
    }

    /// Exact division over the rationals; `None` when the remainder is
    /// non-zero or the divisor is zero.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        let (q, r) = self.to_rational().div_rem(&divisor.to_rational());
        r.is_zero().then(|| Self::from_rational(&q))
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.exact_div(self).is_some()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<serde_json::Value> = self.coeffs.iter().map(bigint_to_json).collect();
        items.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<serde_json::Value>::deserialize(d)?;
        let coeffs = items
            .iter()
            .map(|v| json_to_bigint(v).ok_or_else(|| D::Error::custom(format!("not an integer: {v}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }
}

/// Integers that fit in an `i64` serialize as JSON numbers, larger ones
/// as decimal strings.
pub fn bigint_to_json(c: &BigInt) -> serde_json::Value {
    match i64::try_from(c) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(c.to_string()),
    }
}

pub fn json_to_bigint(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub(crate) fn to_f64(c: &BigInt) -> f64 {
    c.to_string().parse().unwrap_or(f64::NAN)
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    // scale to keep ~60 significant bits before dividing
    let n = r.numer();
    let d = r.denom();
    let shift = (d.bits() as i64 - 60).max(0) as u64;
    let nn = n >> shift;
    let dd = d >> shift;
    if dd.is_zero() {
        return to_f64(n) / to_f64(d);
    }
    to_f64(&nn) / to_f64(&dd)
}

pub(crate) fn sign_changes(signs: impl Iterator<Item = num_bigint::Sign>) -> usize {
    let mut last = None;
    let mut changes = 0;
    for s in signs {
        if s == num_bigint::Sign::NoSign {
            continue;
        }
        if let Some(l) = last {
            if l != s {
                changes += 1;
            }
        }
        last = Some(s);
    }
    changes
}

/// Rational polynomial used for division and Sturm sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatPoly {
    pub(crate) c: Vec<BigRational>,
}

impl RatPoly {
    pub(crate) fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Self { c }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub(crate) fn derivative(&self) -> Self {
        Self::new(
            self.c.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect(),
        )
    }

    pub(crate) fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        if self.c.len() < d.c.len() {
            return (RatPoly::new(vec![]), self.clone());
        }
        let dl = d.c.last().unwrap().clone();
        let mut q = vec![BigRational::zero(); self.c.len() - d.c.len() + 1];
        for k in (0..q.len()).rev() {
            let coef = &r[k + d.degree()] / &dl;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dc;
                }
            }
            q[k] = coef;
        }
        r.truncate(d.degree());
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub(crate) fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub(crate) fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub(crate) fn neg(&self) -> RatPoly {
        RatPoly { c: self.c.iter().map(|c| -c).collect() }
    }
}
