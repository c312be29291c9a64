use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{bigint_to_json, json_to_bigint, Polynomial};
use super::roots::{largest_positive_root, Enclosure, RootError};

/// Guard terms held out by default when fitting.
pub const DEFAULT_GUARD: usize = 5;

/// `W(n) = c1 W(n-1) + ... + cd W(n-d)` for `n >= offset + d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub coefficients: Vec<BigRational>,
    /// First `d` terms of the fitted range.
    pub initial: Vec<BigInt>,
    /// Index of the first sequence term the recurrence covers.
    pub offset: usize,
    /// Terms used for verification only.
    pub guard: usize,
}

impl Recurrence {
    pub fn from_i64(coefficients: &[i64], initial: &[i64]) -> Self {
        Self {
            coefficients: coefficients.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            initial: initial.iter().map(|&c| BigInt::from(c)).collect(),
            offset: 0,
            guard: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// `z^d - c1 z^(d-1) - ... - cd`, scaled to a primitive integer
    /// polynomial.
    pub fn characteristic(&self) -> Polynomial {
        let d = self.order();
        let mut c = vec![BigRational::zero(); d + 1];
        c[d] = BigRational::one();
        for (i, ci) in self.coefficients.iter().enumerate() {
            c[d - 1 - i] = -ci.clone();
        }
        Polynomial::from_rational(&super::poly::RatPoly::new(c))
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_integer())
    }

    /// Continues the sequence from its initial terms to `len` terms
    /// (indices relative to `offset`). Returns `None` for non-integral
    /// values.
    pub fn generate(&self, len: usize) -> Option<Vec<BigInt>> {
        let d = self.order();
        let mut out: Vec<BigRational> = self.initial.iter().cloned().map(BigRational::from_integer).collect();
        while out.len() < len {
            let n = out.len();
            let v = (0..d).fold(BigRational::zero(), |acc, i| acc + &self.coefficients[i] * &out[n - 1 - i]);
            out.push(v);
        }
        out.truncate(len);
        out.into_iter().map(|v| v.is_integer().then(|| v.to_integer())).collect()
    }

    /// Whether every term of `seq[offset..]` satisfies the recurrence.
    pub fn reproduces(&self, seq: &[BigInt]) -> bool {
        let tail = &seq[self.offset.min(seq.len())..];
        let d = self.order();
        if d == 0 {
            return tail.iter().all(Zero::is_zero);
        }
        (d..tail.len()).all(|n| {
            let v = (0..d).fold(BigRational::zero(), |acc, i| {
                acc + &self.coefficients[i] * BigRational::from_integer(tail[n - 1 - i].clone())
            });
            v == BigRational::from_integer(tail[n].clone())
        })
    }

    /// Largest positive root of the characteristic polynomial, with the
    /// number of distinct positive roots.
    pub fn dominant_root(&self, tol: &BigRational) -> Result<(Enclosure, usize), RootError> {
        if self.order() == 0 {
            return Err(RootError::NoPositiveRoot);
        }
        largest_positive_root(&self.characteristic(), tol)
    }
}

#[derive(Serialize, Deserialize)]
struct RecurrenceRecord {
    order: usize,
    coefficients: Vec<serde_json::Value>,
    characteristic: Polynomial,
    initial: Vec<serde_json::Value>,
    offset: usize,
    guard: usize,
}

fn rational_to_json(r: &BigRational) -> serde_json::Value {
    if r.is_integer() {
        bigint_to_json(&r.to_integer())
    } else {
        serde_json::Value::from(r.to_string())
    }
}

fn json_to_rational(v: &serde_json::Value) -> Option<BigRational> {
    json_to_bigint(v).map(BigRational::from_integer).or_else(|| v.as_str().and_then(|s| s.parse().ok()))
}

impl Serialize for Recurrence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RecurrenceRecord {
            order: self.order(),
            coefficients: self.coefficients.iter().map(rational_to_json).collect(),
            characteristic: self.characteristic(),
            initial: self.initial.iter().map(bigint_to_json).collect(),
            offset: self.offset,
            guard: self.guard,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Recurrence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = RecurrenceRecord::deserialize(d)?;
        let coefficients = r
            .coefficients
            .iter()
            .map(|v| json_to_rational(v).ok_or_else(|| D::Error::custom("bad coefficient")))
            .collect::<Result<Vec<_>, _>>()?;
        let initial = r
            .initial
            .iter()
            .map(|v| json_to_bigint(v).ok_or_else(|| D::Error::custom("bad initial term")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { coefficients, initial, offset: r.offset, guard: r.guard })
    }
}

/// Minimal-order exact linear recurrence for `seq`.
///
/// Order `d` is tried when `2d + guard <= seq.len()`; coefficients are
/// solved from the terms before the last `guard`, which are then checked.
pub fn fit_recurrence(seq: &[BigInt], guard: usize) -> Option<Recurrence> {
    if seq.iter().all(Zero::is_zero) && seq.len() > guard {
        return Some(Recurrence { coefficients: vec![], initial: vec![], offset: 0, guard });
    }
    let mut d = 1;
    while 2 * d + guard <= seq.len() {
        if let Some(coefficients) = solve_order(seq, d, seq.len() - guard) {
            let r = Recurrence { coefficients, initial: seq[..d].to_vec(), offset: 0, guard };
            if r.reproduces(seq) {
                return Some(r);
            }
        }
        d += 1;
    }
    None
}

/// Fits `seq[offset..]` for each `offset <= max_offset` and keeps the
/// lowest order, then the smallest offset.
pub fn fit_recurrence_tail(seq: &[BigInt], guard: usize, max_offset: usize) -> Option<Recurrence> {
    let mut best: Option<Recurrence> = None;
    for offset in 0..=max_offset.min(seq.len()) {
        if let Some(mut r) = fit_recurrence(&seq[offset..], guard) {
            if best.as_ref().is_none_or(|b| r.order() < b.order()) {
                r.offset = offset;
                best = Some(r);
            }
        }
    }
    best
}

pub fn fit_recurrence_u64(seq: &[u64], guard: usize) -> Option<Recurrence> {
    let v: Vec<BigInt> = seq.iter().map(|&x| BigInt::from(x)).collect();
    fit_recurrence(&v, guard)
}

/// Solves `seq[n] = sum_i c_i seq[n-1-i]` for `n in d..fit_len` by exact
/// Gaussian elimination; free variables are set to zero.
fn solve_order(seq: &[BigInt], d: usize, fit_len: usize) -> Option<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = (d..fit_len)
        .map(|n| {
            let mut row: Vec<BigRational> = (0..d).map(|i| BigRational::from_integer(seq[n - 1 - i].clone())).collect();
            row.push(BigRational::from_integer(seq[n].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..=d].iter_mut().zip(&pivot[col..=d]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); d];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][d].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn fibonacci_with_guard_four() {
        let r = fit_recurrence(&big(&[1, 1, 2, 3, 5, 8, 13, 21]), 4).unwrap();
        assert_eq!(r.order(), 2);
        assert_eq!(r.coefficients, vec![BigRational::one(), BigRational::one()]);
    }

    #[test]
    fn fibonacci_default_guard_needs_nine_terms() {
        assert!(fit_recurrence(&big(&[1, 1, 2, 3, 5, 8, 13, 21]), DEFAULT_GUARD).is_none());
        assert!(fit_recurrence(&big(&[1, 1, 2, 3, 5, 8, 13, 21, 34]), DEFAULT_GUARD).is_some());
    }

    #[test]
    fn all_ones_order_one() {
        let r = fit_recurrence(&big(&[1; 12]), DEFAULT_GUARD).unwrap();
        assert_eq!(r.order(), 1);
        assert_eq!(r.coefficients[0], BigRational::one());
    }

    #[test]
    fn zeros_order_zero() {
        let r = fit_recurrence(&big(&[0; 8]), DEFAULT_GUARD).unwrap();
        assert_eq!(r.order(), 0);
    }

    #[test]
    fn tail_skips_irregular_prefix() {
        // 1 then 2^n
        let seq = big(&[1, 7, 4, 8, 16, 32, 64, 128, 256, 512, 1024]);
        let r = fit_recurrence_tail(&seq, DEFAULT_GUARD, 3).unwrap();
        assert_eq!(r.order(), 1);
        assert_eq!(r.offset, 2);
    }

    #[test]
    fn characteristic_and_root() {
        let r = Recurrence::from_i64(&[0, 1, 1], &[1, 1, 1]);
        assert_eq!(r.characteristic(), Polynomial::from_i64(&[-1, -1, 0, 1]));
        let (e, _) = r.dominant_root(&super::super::roots::default_tolerance()).unwrap();
        assert!((e.mid_f64() - 1.324_717_957_244_746).abs() < 1e-12);
    }

    #[test]
    fn generate_round_trip() {
        let r = Recurrence::from_i64(&[1, 1], &[1, 1]);
        assert_eq!(r.generate(8).unwrap(), big(&[1, 1, 2, 3, 5, 8, 13, 21]));
    }

    #[test]
    fn json_round_trip() {
        let r = fit_recurrence(&big(&[1, 1, 2, 3, 5, 8, 13, 21]), 4).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"characteristic\":[-1,-1,1]"));
        let back: Recurrence = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
