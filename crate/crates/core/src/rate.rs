//! Growth rate from enumerated spheres: fit a recurrence, bracket its
//! dominant root.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamSpec, GenSet};
use crate::growth::{enumerate_balls, enumerate_until, EnumOptions, GrowthTable};
use crate::spectral::{fit_recurrence_tail, Enclosure, Recurrence, DEFAULT_GUARD};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    pub table: GrowthTable,
    pub recurrence: Option<Recurrence>,
    pub root: Option<Enclosure>,
    /// Why no root was produced.
    pub failure: Option<String>,
}

impl RateReport {
    pub fn root_f64(&self) -> Option<f64> {
        self.root.as_ref().map(Enclosure::mid_f64)
    }
}

/// Fits the shortest recurrence (allowing an irregular prefix) to a
/// sphere sequence and brackets its dominant root.
pub fn rate_from_spheres(sphere: &[u64], tol: &BigRational) -> (Option<Recurrence>, Result<Enclosure, String>) {
    let seq: Vec<BigInt> = sphere.iter().map(|&x| BigInt::from(x)).collect();
    let Some(rec) = fit_recurrence_tail(&seq, DEFAULT_GUARD, seq.len() / 3) else {
        return (None, Err(format!("no recurrence fits {} terms", seq.len())));
    };
    let root = rec.dominant_root(tol).map(|(e, _)| e).map_err(|e| e.to_string());
    (Some(rec), root)
}

pub fn exact_rate(spec: &AmalgamSpec, gens: &GenSet, opts: EnumOptions, tol: &BigRational) -> RateReport {
    let table = enumerate_balls(spec, gens, opts);
    report(table, tol)
}

/// Extra levels a fitted recurrence must reproduce before
/// [`exact_rate_early`] stops enumerating.
pub const CONFIRM_LEVELS: usize = 1;

/// As [`exact_rate`], but stops once the fitted recurrence has predicted
/// [`CONFIRM_LEVELS`] further spheres correctly, or when the next sphere
/// (extrapolated from the last two) would overrun the budget.
pub fn exact_rate_early(spec: &AmalgamSpec, gens: &GenSet, opts: EnumOptions, tol: &BigRational) -> RateReport {
    let mut candidate: Option<(Recurrence, usize)> = None;
    let letters = gens.letters(spec, opts.with_inverses);
    let budget = opts.budget as f64;
    let table = enumerate_until(spec, letters, opts, |sphere| {
        let n = sphere.len();
        if n >= 2 {
            let ball: u64 = sphere.iter().sum();
            let (last, prev) = (sphere[n - 1] as f64, sphere[n - 2].max(1) as f64);
            if ball as f64 + last * last / prev > budget {
                return true;
            }
        }
        let seq: Vec<BigInt> = sphere.iter().map(|&x| BigInt::from(x)).collect();
        if let Some((rec, since)) = &candidate {
            if rec.reproduces(&seq) {
                return seq.len() >= since + CONFIRM_LEVELS;
            }
        }
        candidate = fit_recurrence_tail(&seq, DEFAULT_GUARD, seq.len() / 3).map(|r| (r, seq.len()));
        false
    });
    report(table, tol)
}

fn report(table: GrowthTable, tol: &BigRational) -> RateReport {
    let (recurrence, root) = rate_from_spheres(&table.sphere, tol);
    let (root, failure) = match root {
        Ok(e) => (Some(e), None),
        Err(msg) => (None, Some(msg)),
    };
    RateReport { table, recurrence, root, failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::default_tolerance;

    #[test]
    fn fibonacci_tail() {
        let s = [1, 3, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233];
        let (rec, root) = rate_from_spheres(&s, &default_tolerance());
        assert_eq!(rec.unwrap().order(), 2);
        assert!(root.unwrap().contains_f64(1.618_033_988_75, 1e-11));
    }

    #[test]
    fn constant_tail_has_rate_one() {
        let s = [1, 2, 2, 2, 2, 2, 2, 2, 2, 2];
        let (_, root) = rate_from_spheres(&s, &default_tolerance());
        assert!(root.unwrap().contains_f64(1.0, 1e-12));
    }
}
