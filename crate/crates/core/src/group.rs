//! Finite groups given by explicit multiplication tables, subgroup
//! embeddings and left-coset transversals.
//!
//! Elements are plain indices `0..order`. Families:
//!
//! * cyclic `C_n`: element `i` is `a^i`.
//! * dihedral `D_{2n}`: rotations `a^0..a^{n-1}` occupy indices `0..n`,
//!   reflections `a^i b` occupy `n..2n`.
//! * direct product `L x R`: element `(l, r)` has index `l * |R| + r`.
//! * explicit tables, validated against the group axioms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orders up to this bound get exhaustive associativity checks.
pub const MAX_EXHAUSTIVE_ORDER: usize = 64;

const SAMPLED_TRIPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("multiplication table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("closure: entry mul[{x}][{y}] = {value} is out of range")]
    OutOfRange { x: usize, y: usize, value: usize },
    #[error("latin square: row {row} repeats element {value}")]
    RowRepeats { row: usize, value: usize },
    #[error("latin square: column {col} repeats element {value}")]
    ColumnRepeats { col: usize, value: usize },
    #[error("identity: no two-sided identity element")]
    NoIdentity,
    #[error("inverse: element {x} has no two-sided inverse")]
    NoInverse { x: usize },
    #[error("associativity fails at ({x}*{y})*{z} != {x}*({y}*{z})")]
    NotAssociative { x: usize, y: usize, z: usize },
    #[error("invalid family parameter: {0}")]
    BadParameter(String),
    #[error("order {0} exceeds the 16-bit element index range")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("image has {got} entries but the source group has order {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("image of {x} is {value}, outside the target group")]
    OutOfRange { x: usize, value: usize },
    #[error("not injective: {x} and {y} both map to {value}")]
    NotInjective { x: usize, y: usize, value: usize },
    #[error("not multiplicative at the pair ({x}, {y})")]
    NotMultiplicative { x: usize, y: usize },
}

/// How thoroughly the group axioms were checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validation {
    Exhaustive,
    Sampled { triples: usize },
}

/// Structured description of a finite group, as found in spec files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic { n: usize },
    Dihedral { order: usize },
    Product { left: Box<GroupSpec>, right: Box<GroupSpec> },
    Table { mul: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral { order } => FiniteGroup::dihedral(*order),
            GroupSpec::Product { left, right } => Ok(FiniteGroup::direct_product(&left.build()?, &right.build()?)),
            GroupSpec::Table { mul } => FiniteGroup::from_table(mul.clone()),
        }
    }
}

/// A finite group as a multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u16>,
    identity: usize,
    inv: Vec<u16>,
    labels: Vec<String>,
    validation: Validation,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup").field("order", &self.order).field("labels", &self.labels).finish()
    }
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        Self::cyclic(1).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::BadParameter("cyclic group needs n >= 1".into()));
        }
        let labels = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            })
            .collect();
        Self::from_fn(n, 0, |x, y| (x + y) % n, labels, Validation::Exhaustive)
    }

    /// Dihedral group of the given order `2n` (symmetries of an `n`-gon).
    pub fn dihedral(order: usize) -> Result<Self, GroupError> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(GroupError::BadParameter(format!("dihedral order must be even and >= 2, got {order}")));
        }
        let n = order / 2;
        let rot = |i: usize| match i {
            0 => String::new(),
            1 => "a".to_string(),
            _ => format!("a^{i}"),
        };
        let mut labels: Vec<String> = (0..n).map(|i| if i == 0 { "1".to_string() } else { rot(i) }).collect();
        labels.extend((0..n).map(|i| if i == 0 { "b".to_string() } else { format!("{} b", rot(i)) }));
        // (a^i b^s)(a^j b^t) = a^(i + (-1)^s j) b^(s+t)
        let mul = move |x: usize, y: usize| {
            let (i, s) = (x % n, x / n);
            let (j, t) = (y % n, y / n);
            let k = if s == 0 { (i + j) % n } else { (i + n - j) % n };
            ((s + t) % 2) * n + k
        };
        Self::from_fn(order, 0, mul, labels, Validation::Exhaustive)
    }

    pub fn direct_product(left: &FiniteGroup, right: &FiniteGroup) -> Self {
        let (nl, nr) = (left.order, right.order);
        let labels = (0..nl * nr).map(|i| format!("({},{})", left.labels[i / nr], right.labels[i % nr])).collect();
        let mul = |x: usize, y: usize| left.mul(x / nr, y / nr) * nr + right.mul(x % nr, y % nr);
        let identity = left.identity * nr + right.identity;
        let validation = match (left.validation, right.validation) {
            (Validation::Exhaustive, Validation::Exhaustive) => Validation::Exhaustive,
            (Validation::Sampled { triples }, _) | (_, Validation::Sampled { triples }) => {
                Validation::Sampled { triples }
            }
        };
        Self::from_fn(nl * nr, identity, mul, labels, validation).expect("product of groups")
    }

    fn from_fn(
        order: usize,
        identity: usize,
        f: impl Fn(usize, usize) -> usize,
        labels: Vec<String>,
        validation: Validation,
    ) -> Result<Self, GroupError> {
        if order > u16::MAX as usize {
            return Err(GroupError::TooLarge(order));
        }
        let mut mul = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                mul.push(f(x, y) as u16);
            }
        }
        let mut inv = vec![0u16; order];
        for x in 0..order {
            let y = (0..order).find(|&y| mul[x * order + y] as usize == identity).ok_or(GroupError::NoInverse { x })?;
            inv[x] = y as u16;
        }
        Ok(Self { order, mul, identity, inv, labels, validation })
    }

    /// Builds a group from an explicit table, checking every axiom.
    ///
    /// Associativity is checked on all triples when the order is at most
    /// [`MAX_EXHAUSTIVE_ORDER`], otherwise on a fixed pseudo-random sample
    /// and the group is flagged [`Validation::Sampled`].
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if order > u16::MAX as usize {
            return Err(GroupError::TooLarge(order));
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != order {
                return Err(GroupError::NotSquare { row, len: r.len(), order });
            }
            for (y, &value) in r.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::OutOfRange { x: row, y, value });
                }
            }
        }
        for (row, r) in table.iter().enumerate() {
            let mut seen = vec![false; order];
            for &v in r {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::RowRepeats { row, value: v });
                }
            }
        }
        for col in 0..order {
            let mut seen = vec![false; order];
            for r in &table {
                let v = r[col];
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::ColumnRepeats { col, value: v });
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let check = |x: usize, y: usize, z: usize| -> Result<(), GroupError> {
            if table[table[x][y]][z] != table[x][table[y][z]] {
                Err(GroupError::NotAssociative { x, y, z })
            } else {
                Ok(())
            }
        };
        let validation = if order <= MAX_EXHAUSTIVE_ORDER {
            for x in 0..order {
                for y in 0..order {
                    for z in 0..order {
                        check(x, y, z)?;
                    }
                }
            }
            Validation::Exhaustive
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.gen_range(0..order), rng.gen_range(0..order), rng.gen_range(0..order))?;
            }
            Validation::Sampled { triples: SAMPLED_TRIPLES }
        };
        let labels = (0..order).map(|i| format!("g{i}")).collect();
        let group = Self::from_fn(order, identity, |x, y| table[x][y], labels, validation)?;
        for x in 0..order {
            if group.mul(group.inv(x), x) != identity {
                return Err(GroupError::NoInverse { x });
            }
        }
        Ok(group)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the element carrying `label`, if any.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| (0..self.order).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut p = x;
        while p != self.identity {
            p = self.mul(p, x);
            k += 1;
        }
        k
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(x) } else { x };
        (0..k.unsigned_abs()).fold(self.identity, |acc, _| self.mul(acc, base))
    }

    /// Full multiplication table as nested rows.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|x| (0..self.order).map(|y| self.mul(x, y)).collect()).collect()
    }

    /// Re-runs the axiom checks over every triple. Used by tests.
    pub fn check_axioms(&self) -> Result<(), GroupError> {
        Self::from_table(self.table()).map(|_| ())
    }
}

/// A validated injective homomorphism `C -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    image: Vec<u16>,
}

impl Embedding {
    /// Checks that `image` is an injective homomorphism from `source`
    /// into `target`.
    pub fn verify(source: &FiniteGroup, target: &FiniteGroup, image: &[usize]) -> Result<Self, EmbeddingError> {
        if image.len() != source.order() {
            return Err(EmbeddingError::WrongLength { expected: source.order(), got: image.len() });
        }
        let mut preimage = vec![usize::MAX; target.order()];
        for (x, &value) in image.iter().enumerate() {
            if value >= target.order() {
                return Err(EmbeddingError::OutOfRange { x, value });
            }
            if preimage[value] != usize::MAX {
                return Err(EmbeddingError::NotInjective { x: preimage[value], y: x, value });
            }
            preimage[value] = x;
        }
        for x in 0..source.order() {
            for y in 0..source.order() {
                if image[source.mul(x, y)] != target.mul(image[x], image[y]) {
                    return Err(EmbeddingError::NotMultiplicative { x, y });
                }
            }
        }
        Ok(Self { image: image.iter().map(|&v| v as u16).collect() })
    }

    /// The embedding of the trivial group.
    pub fn trivial(target: &FiniteGroup) -> Self {
        Self { image: vec![target.identity() as u16] }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    pub fn image(&self) -> Vec<usize> {
        self.image.iter().map(|&v| v as usize).collect()
    }

    pub fn source_order(&self) -> usize {
        self.image.len()
    }
}

/// Left-coset representatives of an embedded subgroup, with the
/// factorization `g = rep * c` precomputed for every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    reps: Vec<u16>,
    coset_of: Vec<u16>,
    sub_of: Vec<u16>,
}

impl Transversal {
    /// Deterministic transversal: each coset is represented by its smallest
    /// element index, except that the identity always represents `C` itself
    /// and sits at position 0.
    pub fn new(target: &FiniteGroup, emb: &Embedding) -> Self {
        let n = target.order();
        let mut coset_of = vec![u16::MAX; n];
        let mut sub_of = vec![0u16; n];
        let mut reps = Vec::new();
        let candidates = std::iter::once(target.identity()).chain((0..n).filter(|&g| g != target.identity()));
        for g in candidates {
            if coset_of[g] != u16::MAX {
                continue;
            }
            let pos = reps.len() as u16;
            reps.push(g as u16);
            for c in 0..emb.source_order() {
                let h = target.mul(g, emb.apply(c));
                coset_of[h] = pos;
                sub_of[h] = c as u16;
            }
        }
        Self { reps, coset_of, sub_of }
    }

    pub fn reps(&self) -> Vec<usize> {
        self.reps.iter().map(|&r| r as usize).collect()
    }

    /// The index `[target : C]`.
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    #[inline]
    pub fn rep(&self, i: usize) -> usize {
        self.reps[i] as usize
    }

    /// `g = rep * c`; returns `(rep element, c in the source of the embedding)`.
    #[inline]
    pub fn factor(&self, g: usize) -> (usize, usize) {
        (self.reps[self.coset_of[g] as usize] as usize, self.sub_of[g] as usize)
    }

    /// Position of the coset of `g` in [`Self::reps`].
    #[inline]
    pub fn coset(&self, g: usize) -> usize {
        self.coset_of[g] as usize
    }

    #[inline]
    pub fn is_rep(&self, g: usize) -> bool {
        self.reps[self.coset_of[g] as usize] as usize == g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn dihedral_six_is_nonabelian() {
        let g = FiniteGroup::dihedral(6).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        g.check_axioms().unwrap();
        assert_eq!(g.label(3), "b");
        assert_eq!(g.label(4), "a b");
        // c = ab, d = b satisfy cdc = dcd
        let (c, d) = (4, 3);
        assert_eq!(g.mul(g.mul(c, d), c), g.mul(g.mul(d, c), d));
    }

    #[test]
    fn klein_four_is_self_inverse() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let v = FiniteGroup::direct_product(&c2, &c2);
        assert_eq!(v.order(), 4);
        assert!((0..4).all(|x| v.inv(x) == x));
        v.check_axioms().unwrap();
    }

    #[test]
    fn table_rejects_non_associative() {
        // latin square with identity 0 that is not a group
        let mul = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(mul).unwrap_err();
        assert!(matches!(err, GroupError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn table_rejects_repeated_row() {
        let err = FiniteGroup::from_table(vec![vec![0, 0], vec![1, 0]]).unwrap_err();
        assert_eq!(err, GroupError::RowRepeats { row: 0, value: 0 });
    }

    #[test]
    fn table_roundtrip_keeps_identity_position() {
        // C2 with identity stored at index 1
        let g = FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.identity(), 1);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn embedding_into_klein_four() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let v = FiniteGroup::direct_product(&c2, &c2);
        assert!(Embedding::verify(&c2, &v, &[0, 2]).is_ok());
    }

    #[test]
    fn embedding_rejects_collapse() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let err = Embedding::verify(&c2, &c2, &[0, 0]).unwrap_err();
        assert_eq!(err, EmbeddingError::NotInjective { x: 0, y: 1, value: 0 });
    }

    #[test]
    fn embedding_rejects_non_homomorphism() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let c4 = FiniteGroup::cyclic(4).unwrap();
        let err = Embedding::verify(&c2, &c4, &[0, 1]).unwrap_err();
        assert!(matches!(err, EmbeddingError::NotMultiplicative { .. }));
    }

    #[test]
    fn transversal_c2_in_klein_four() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let v = FiniteGroup::direct_product(&c2, &c2);
        // image {1, (1,0)} = {0, 2}; cosets {0,2} and {1,3}
        let emb = Embedding::verify(&c2, &v, &[0, 2]).unwrap();
        let t = Transversal::new(&v, &emb);
        assert_eq!(t.reps(), vec![0, 1]);
        assert_eq!(t.factor(3), (1, 1));
    }

    #[test]
    fn transversal_trivial_subgroup_is_everything() {
        let a = FiniteGroup::dihedral(8).unwrap();
        let t = Transversal::new(&a, &Embedding::trivial(&a));
        assert_eq!(t.reps(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn transversal_reflection_in_d6() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let d6 = FiniteGroup::dihedral(6).unwrap();
        let emb = Embedding::verify(&c2, &d6, &[0, 3]).unwrap();
        let t = Transversal::new(&d6, &emb);
        assert_eq!(t.index(), 3);
        assert_eq!(t.reps(), vec![0, 1, 2]);
    }

    #[test]
    fn group_spec_json() {
        let spec: GroupSpec = serde_json::from_str(
            r#"{"family":"product","left":{"family":"cyclic","n":2},"right":{"family":"dihedral","order":6}}"#,
        )
        .unwrap();
        assert_eq!(spec.build().unwrap().order(), 12);
        let t: GroupSpec = serde_json::from_str(r#"{"family":"table","mul":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(t.build().unwrap().order(), 2);
    }

    #[test]
    fn sampled_validation_for_large_tables() {
        let c70 = FiniteGroup::cyclic(70).unwrap();
        let g = FiniteGroup::from_table(c70.table()).unwrap();
        assert!(matches!(g.validation(), Validation::Sampled { .. }));
    }
}
