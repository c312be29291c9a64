//! Exact polynomial, recurrence and root machinery.

mod avoid;
mod lpv;
mod poly;
mod recurrence;
mod roots;

pub use avoid::{count_avoiding, AlphabetError, WeightedAlphabet};
pub use lpv::{lpv_bound, lpv_bound_finite, FactorOrder, LpvError};
pub use poly::{bigint_to_json, json_to_bigint, Polynomial};
pub use recurrence::{fit_recurrence, fit_recurrence_tail, fit_recurrence_u64, Recurrence, DEFAULT_GUARD};
pub use roots::{
    default_tolerance, largest_positive_root, positive_root_from_lengths, tolerance_from_f64, unique_positive_root,
    Enclosure, LengthRoot, RootError,
};
