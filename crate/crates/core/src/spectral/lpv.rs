use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Order of a factor group: finite or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorOrder {
    Finite(u64),
    Infinite,
}

impl fmt::Display for FactorOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorOrder::Finite(n) => write!(f, "{n}"),
            FactorOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for FactorOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "oo" | "∞" => Ok(FactorOrder::Infinite),
            _ => s.parse().map(FactorOrder::Finite).map_err(|_| format!("bad group order `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpvError {
    #[error("factor order must be at least 2, got {0}")]
    TrivialFactor(u64),
    #[error("l2-Betti numbers must be non-negative")]
    NegativeBetti,
}

/// `3 + 2 b_A + 2 b_B - 2/|A| - 2/|B|`, with `2/|X| = 0` for infinite `X`.
pub fn lpv_bound(
    order_a: FactorOrder,
    order_b: FactorOrder,
    beta_a: &BigRational,
    beta_b: &BigRational,
) -> Result<BigRational, LpvError> {
    if *beta_a < BigRational::zero() || *beta_b < BigRational::zero() {
        return Err(LpvError::NegativeBetti);
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut out = BigRational::from_integer(BigInt::from(3)) + &two * beta_a + &two * beta_b;
    for o in [order_a, order_b] {
        match o {
            FactorOrder::Finite(n) if n < 2 => return Err(LpvError::TrivialFactor(n)),
            FactorOrder::Finite(n) => out -= BigRational::new(BigInt::from(2), BigInt::from(n)),
            FactorOrder::Infinite => {}
        }
    }
    Ok(out)
}

/// The bound for two finite factors with vanishing Betti numbers.
pub fn lpv_bound_finite(order_a: u64, order_b: u64) -> Result<BigRational, LpvError> {
    let z = BigRational::zero();
    lpv_bound(FactorOrder::Finite(order_a), FactorOrder::Finite(order_b), &z, &z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cases() {
        assert_eq!(lpv_bound_finite(2, 2).unwrap(), q(1, 1));
        assert_eq!(lpv_bound_finite(2, 7).unwrap(), q(12, 7));
        assert!(lpv_bound_finite(2, 7).unwrap() > q(5, 3));
        let z = BigRational::zero();
        assert_eq!(lpv_bound(FactorOrder::Infinite, FactorOrder::Infinite, &z, &z).unwrap(), q(3, 1));
    }

    #[test]
    fn betti_terms() {
        let b = q(1, 2);
        assert_eq!(lpv_bound(FactorOrder::Infinite, FactorOrder::Finite(2), &b, &b).unwrap(), q(4, 1));
        assert_eq!(
            lpv_bound(FactorOrder::Infinite, FactorOrder::Finite(2), &q(-1, 1), &b),
            Err(LpvError::NegativeBetti)
        );
    }

    #[test]
    fn rejects_trivial() {
        assert_eq!(lpv_bound_finite(1, 5), Err(LpvError::TrivialFactor(1)));
    }

    #[test]
    fn parse_orders() {
        assert_eq!("inf".parse::<FactorOrder>().unwrap(), FactorOrder::Infinite);
        assert_eq!("7".parse::<FactorOrder>().unwrap(), FactorOrder::Finite(7));
        assert!("x".parse::<FactorOrder>().is_err());
    }
}
