//! Seeded random elements for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{AmalgamSpec, NormalForm, Side, Syllable};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly chosen normal form with `len` syllables.
pub fn element_of_length(spec: &AmalgamSpec, rng: &mut SeededRng, len: usize) -> NormalForm {
    let c = spec.amalgamated();
    let head = rng.gen_range(0..c.order()) as u16;
    let mut side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
    let mut syllables = smallvec::SmallVec::new();
    for _ in 0..len {
        let reps: Vec<usize> = spec.transversal(side).reps().into_iter().skip(1).collect();
        let Some(&elem) = reps.choose(rng) else { break };
        syllables.push(Syllable { side, elem: elem as u16 });
        side = side.other();
    }
    NormalForm { syllables, head }
}

/// A random element with at most `max_len` syllables.
pub fn element(spec: &AmalgamSpec, rng: &mut SeededRng, max_len: usize) -> NormalForm {
    let len = rng.gen_range(0..=max_len);
    element_of_length(spec, rng, len)
}

/// A factor element outside the amalgamated subgroup.
pub fn factor_element(spec: &AmalgamSpec, rng: &mut SeededRng, side: Side) -> NormalForm {
    let f = spec.factor(side);
    let image = spec.embedding(side).image();
    let outside: Vec<usize> = (0..f.order()).filter(|e| !image.contains(e)).collect();
    let e = *outside.choose(rng).expect("proper amalgamated subgroup");
    spec.element(side, e)
}

/// `h x h^-1` with `x` a random factor element outside the amalgamated
/// subgroup and `h` a random element of at most `max_len` syllables.
pub fn elliptic(spec: &AmalgamSpec, rng: &mut SeededRng, max_len: usize) -> NormalForm {
    let side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
    let x = factor_element(spec, rng, side);
    let h = element(spec, rng, max_len);
    spec.conjugate(&h, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    #[test]
    fn lengths_and_determinism() {
        let spec = AmalgamSpec::free_product(FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(3).unwrap());
        let mut r = rng(7);
        for len in 0..8 {
            assert_eq!(element_of_length(&spec, &mut r, len).len(), len);
        }
        let a: Vec<NormalForm> = (0..20).map(|_| element(&spec, &mut rng(3), 6)).collect();
        let b: Vec<NormalForm> = (0..20).map(|_| element(&spec, &mut rng(3), 6)).collect();
        assert_eq!(a, b);
    }
}
