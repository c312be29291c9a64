//! Certified enclosures of positive real roots.
//!
//! Everything is exact: endpoints are rationals (dyadic after bisection)
//! and polynomial signs are evaluated in rational arithmetic, so an
//! enclosure's endpoint signs are a proof that it contains a root.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::poly::{rat_to_f64, Polynomial, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("coefficient sequence has {0} sign changes; a unique positive root needs exactly one (supply a bracket)")]
    SignChanges(usize),
    #[error("polynomial does not change sign on the bracket [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },
    #[error("polynomial has no positive real root")]
    NoPositiveRoot,
    #[error("empty length list")]
    NoLengths,
    #[error("lengths must be positive")]
    ZeroLength,
}

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn width_f64(&self) -> f64 {
        rat_to_f64(&self.width())
    }

    pub fn lo_f64(&self) -> f64 {
        rat_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rat_to_f64(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    /// Whether `x` lies in the enclosure widened by `slack` on both sides.
    pub fn contains_f64(&self, x: f64, slack: f64) -> bool {
        self.lo_f64() - slack <= x && x <= self.hi_f64() + slack
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Verifies exactly that `p` vanishes at an endpoint or changes sign
    /// across the enclosure.
    pub fn brackets_root_of(&self, p: &Polynomial) -> bool {
        let (slo, shi) = (p.eval(&self.lo), p.eval(&self.hi));
        slo.is_zero() || shi.is_zero() || slo.is_positive() != shi.is_positive()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15}, {:.15}]", self.lo_f64(), self.hi_f64())
    }
}

#[derive(Serialize, Deserialize)]
struct EnclosureRecord {
    lo: String,
    hi: String,
    lo_approx: f64,
    hi_approx: f64,
    midpoint: f64,
    width: f64,
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EnclosureRecord {
            lo: self.lo.to_string(),
            hi: self.hi.to_string(),
            lo_approx: self.lo_f64(),
            hi_approx: self.hi_f64(),
            midpoint: self.mid_f64(),
            width: self.width_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Enclosure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = EnclosureRecord::deserialize(d)?;
        let lo = r.lo.parse().map_err(|_| D::Error::custom("bad rational"))?;
        let hi = r.hi.parse().map_err(|_| D::Error::custom("bad rational"))?;
        Ok(Self { lo, hi })
    }
}

/// `10^-12`, the default enclosure width.
pub fn default_tolerance() -> BigRational {
    tolerance_from_f64(1e-12)
}

/// Rational tolerance `1 / ceil(1/tol)`; non-positive inputs fall back
/// to the default.
pub fn tolerance_from_f64(tol: f64) -> BigRational {
    if tol.is_nan() || tol <= 0.0 || !tol.is_finite() {
        return BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)));
    }
    let inv = (1.0 / tol).ceil();
    let denom: BigInt = format!("{inv:.0}").parse().unwrap_or_else(|_| BigInt::from(10u64.pow(12)));
    BigRational::new(BigInt::one(), denom)
}

fn sign(x: &BigRational) -> Sign {
    if x.is_zero() {
        Sign::NoSign
    } else if x.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Cauchy bound: every root has modulus below `1 + max |a_i / a_n|`.
fn cauchy_bound(p: &Polynomial) -> BigRational {
    let lead = BigRational::from_integer(p.leading().cloned().unwrap_or_else(BigInt::one)).abs();
    let m = p
        .coeffs()
        .iter()
        .take(p.degree())
        .map(|c| BigRational::from_integer(c.abs()) / &lead)
        .max()
        .unwrap_or_else(BigRational::zero);
    m + BigRational::one()
}

/// Sign-preserving bisection of `[lo, hi]` down to width `tol`.
fn bisect(p: &Polynomial, mut lo: BigRational, mut hi: BigRational, tol: &BigRational) -> Enclosure {
    let two = BigRational::from_integer(BigInt::from(2));
    let slo = sign(&p.eval(&lo));
    if slo == Sign::NoSign {
        return Enclosure::point(lo);
    }
    if sign(&p.eval(&hi)) == Sign::NoSign {
        return Enclosure::point(hi);
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        match sign(&p.eval(&mid)) {
            Sign::NoSign => return Enclosure::point(mid),
            s if s == slo => lo = mid,
            _ => hi = mid,
        }
    }
    Enclosure { lo, hi }
}

/// Encloses the unique positive root of `p`.
///
/// Without a bracket the coefficient sequence must have exactly one sign
/// change (Descartes), which guarantees a single positive root. With a
/// bracket, `p` must change sign (or vanish) at its endpoints.
pub fn unique_positive_root(
    p: &Polynomial,
    bracket: Option<(BigRational, BigRational)>,
    tol: &BigRational,
) -> Result<Enclosure, RootError> {
    match bracket {
        Some((lo, hi)) => {
            let (slo, shi) = (sign(&p.eval(&lo)), sign(&p.eval(&hi)));
            if slo != Sign::NoSign && slo == shi {
                return Err(RootError::NoSignChange { lo: lo.to_string(), hi: hi.to_string() });
            }
            Ok(bisect(p, lo, hi, tol))
        }
        None => {
            let (q, _) = p.strip_zero_roots();
            let changes = q.sign_changes();
            if changes != 1 {
                return Err(RootError::SignChanges(changes));
            }
            Ok(bisect(&q, BigRational::zero(), cauchy_bound(&q), tol))
        }
    }
}

/// Result of [`positive_root_from_lengths`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRoot {
    pub polynomial: Polynomial,
    pub enclosure: Enclosure,
    /// A single length: the root is exactly 1.
    pub degenerate: bool,
}

/// Growth rate of a free monoid whose generators have the given word
/// lengths: the unique positive root of `z^m - sum z^(m - l_i)`.
pub fn positive_root_from_lengths(lengths: &[usize], tol: &BigRational) -> Result<LengthRoot, RootError> {
    if lengths.is_empty() {
        return Err(RootError::NoLengths);
    }
    if lengths.contains(&0) {
        return Err(RootError::ZeroLength);
    }
    let polynomial = Polynomial::from_lengths(lengths);
    debug_assert_eq!(polynomial.strip_zero_roots().0.sign_changes(), 1);
    let enclosure = unique_positive_root(&polynomial, None, tol)?;
    Ok(LengthRoot { polynomial, enclosure, degenerate: lengths.len() == 1 })
}

/// Sturm chain of the squarefree part, for counting distinct real roots.
pub(crate) struct Sturm {
    chain: Vec<RatPoly>,
}

impl Sturm {
    pub(crate) fn new(p: &Polynomial) -> Self {
        let r = p.to_rational();
        let g = r.gcd(&r.derivative());
        let sqfree = if g.c.len() > 1 { r.div_rem(&g).0 } else { r };
        let mut chain = vec![sqfree.clone(), sqfree.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, rem) = chain[n - 2].div_rem(&chain[n - 1]);
            if rem.is_zero() {
                break;
            }
            chain.push(rem.neg());
        }
        Self { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        super::poly::sign_changes(self.chain.iter().map(|q| sign(&q.eval(x))))
    }

    /// Distinct real roots in `(a, b]`.
    pub(crate) fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    pub(crate) fn squarefree(&self) -> &RatPoly {
        &self.chain[0]
    }
}

/// Largest positive real root of `p`, with the number of distinct
/// positive roots.
pub fn largest_positive_root(p: &Polynomial, tol: &BigRational) -> Result<(Enclosure, usize), RootError> {
    let (q, _) = p.strip_zero_roots();
    if q.degree() == 0 {
        return Err(RootError::NoPositiveRoot);
    }
    let sturm = Sturm::new(&q);
    let zero = BigRational::zero();
    let mut hi = cauchy_bound(&q);
    let count = sturm.count(&zero, &hi);
    if count == 0 {
        return Err(RootError::NoPositiveRoot);
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut lo = zero;
    // invariant: the largest root lies in (lo, hi]
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        if sturm.count(&mid, &hi) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if sturm.squarefree().eval(&hi).is_zero() {
        return Ok((Enclosure::point(hi), count));
    }
    Ok((Enclosure { lo, hi }, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> BigRational {
        default_tolerance()
    }

    #[test]
    fn linear_roots_are_exact() {
        let e = unique_positive_root(&Polynomial::from_i64(&[-1, 1]), None, &tol()).unwrap();
        assert_eq!(e, Enclosure::point(BigRational::one()));
        let e = positive_root_from_lengths(&[1, 1], &tol()).unwrap();
        assert!(e.enclosure.contains(&BigRational::from_integer(BigInt::from(2))));
        assert!(e.enclosure.width() <= tol());
    }

    #[test]
    fn refuses_two_sign_changes() {
        let p = Polynomial::from_i64(&[1, -3, 1]);
        assert_eq!(unique_positive_root(&p, None, &tol()), Err(RootError::SignChanges(2)));
    }

    #[test]
    fn bracket_without_sign_change() {
        let p = Polynomial::from_i64(&[1, -3, 1]);
        let b = (BigRational::from_integer(3.into()), BigRational::from_integer(4.into()));
        assert!(matches!(unique_positive_root(&p, Some(b), &tol()), Err(RootError::NoSignChange { .. })));
    }

    #[test]
    fn single_length_is_degenerate() {
        let r = positive_root_from_lengths(&[4], &tol()).unwrap();
        assert!(r.degenerate);
        assert!(r.enclosure.contains(&BigRational::one()));
    }

    #[test]
    fn sturm_counts_double_root_once() {
        // (z - 2)^2 (z + 1)
        let p = Polynomial::from_i64(&[4, 0, -3, 1]);
        let (e, n) = largest_positive_root(&p, &tol()).unwrap();
        assert_eq!(n, 1);
        assert!(e.contains(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn no_positive_root() {
        let p = Polynomial::from_i64(&[1, 1]);
        assert_eq!(largest_positive_root(&p, &tol()), Err(RootError::NoPositiveRoot));
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(tolerance_from_f64(1e-9), BigRational::new(1.into(), 1_000_000_000.into()));
        assert_eq!(tolerance_from_f64(-1.0), default_tolerance());
    }
}
