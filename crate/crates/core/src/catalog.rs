//! Built-in amalgams with default generators and expected growth data,
//! and the minimal-length normal form of `PGL(2,Z)` on `{a, b, c}`.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{Alphabet, AmalgamSpec, GenSet, NormalForm, Side};
use crate::group::FiniteGroup;
use crate::spectral::Polynomial;

pub const NAMES: [&str; 7] = ["c2*c2", "c2*c3", "c2*c4", "c2*c5", "c2*(c2xc2)", "pgl2z", "gl2z"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}` (known: {list})", list = NAMES.join(", "))]
    Unknown(String),
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the literature on these groups.
    Published,
    /// Obtained by an independent computation (weighted-block counting,
    /// normal-form enumeration).
    Computed,
    /// Immediate from the definitions.
    Elementary,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Published => "published",
            Provenance::Computed => "computed",
            Provenance::Elementary => "elementary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub quantity: String,
    /// Generators as words over the default alphabet; `None` means the
    /// default generating set.
    pub generators: Option<Vec<String>>,
    /// Polynomial whose largest positive root is the growth rate.
    pub rate_polynomial: Option<Polynomial>,
    pub value: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub decomposition: &'static str,
    pub spec: AmalgamSpec,
    pub generators: GenSet,
    pub expected: Vec<Expected>,
}

impl CatalogEntry {
    pub fn alphabet(&self) -> &Alphabet {
        self.generators.alphabet()
    }

    /// The generating set for an expected value.
    pub fn generators_for(&self, e: &Expected) -> GenSet {
        match &e.generators {
            None => self.generators.clone(),
            Some(words) => {
                let mut alpha = Alphabet::new();
                for w in words {
                    let g = self.spec.reduce(self.alphabet(), &self.alphabet().parse_word(w).expect("catalog word"));
                    alpha.push(w.replace(' ', ""), g).expect("distinct catalog generators");
                }
                GenSet::new(&self.spec, alpha).expect("catalog generators")
            }
        }
    }

    /// The expected growth rate polynomial for the default generators.
    pub fn default_rate(&self) -> Option<&Polynomial> {
        self.expected.iter().find(|e| e.generators.is_none()).and_then(|e| e.rate_polynomial.as_ref())
    }
}

fn poly(c: &[i64]) -> Polynomial {
    Polynomial::from_i64(c)
}

fn rate(generators: Option<&[&str]>, p: Option<Polynomial>, value: &str, provenance: Provenance) -> Expected {
    Expected {
        quantity: "growth rate".into(),
        generators: generators.map(|g| g.iter().map(|s| s.to_string()).collect()),
        rate_polynomial: p,
        value: value.into(),
        provenance,
    }
}

fn note(quantity: &str, value: &str, provenance: Provenance) -> Expected {
    Expected { quantity: quantity.into(), generators: None, rate_polynomial: None, value: value.into(), provenance }
}

fn gens(spec: &AmalgamSpec, letters: &[(&str, Side, usize)]) -> GenSet {
    let mut alpha = Alphabet::new();
    for &(name, side, e) in letters {
        alpha.push(name, spec.element(side, e)).expect("distinct names");
    }
    GenSet::new(spec, alpha).expect("valid catalog generators")
}

fn cyclic(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n).expect("n >= 1")
}

fn free_entry(
    name: &'static str,
    decomposition: &'static str,
    b: FiniteGroup,
    letters: &[(&str, Side, usize)],
    expected: Vec<Expected>,
) -> CatalogEntry {
    let spec = AmalgamSpec::free_product(cyclic(2), b);
    let generators = gens(&spec, letters);
    CatalogEntry { name, decomposition, spec, generators, expected }
}

pub fn load(name: &str) -> Result<CatalogEntry, CatalogError> {
    use Provenance::*;
    let golden = || poly(&[-1, -1, 1]);
    Ok(match name {
        "c2*c2" => free_entry(
            "c2*c2",
            "C2 * C2 (infinite dihedral)",
            cyclic(2),
            &[("a", Side::A, 1), ("b", Side::B, 1)],
            vec![
                rate(None, Some(poly(&[-1, 1])), "1 (linear growth)", Elementary),
                note("complexity ([A:C]-1)([B:C]-1)", "1", Elementary),
            ],
        ),
        "c2*c3" => free_entry(
            "c2*c3",
            "C2 * C3",
            cyclic(3),
            &[("a", Side::A, 1), ("b", Side::B, 1)],
            vec![
                rate(None, Some(poly(&[-2, 0, 1])), "sqrt(2), root of z^2 - 2", Published),
                rate(Some(&["a", "b a"]), Some(golden()), "golden ratio, root of z^2 - z - 1", Published),
                note("minimal growth rate", "sqrt(2)", Published),
            ],
        ),
        "c2*c4" => free_entry(
            "c2*c4",
            "C2 * C4",
            cyclic(4),
            &[("a", Side::A, 1), ("b", Side::B, 1)],
            vec![
                rate(None, Some(golden()), "golden ratio, root of z^3 - 2z - 1 = (z + 1)(z^2 - z - 1)", Computed),
                note("minimal growth rate", "golden ratio", Published),
            ],
        ),
        "c2*c5" => free_entry(
            "c2*c5",
            "C2 * C5",
            cyclic(5),
            &[("a", Side::A, 1), ("b", Side::B, 1)],
            vec![rate(None, Some(poly(&[-2, -2, 0, 1])), "root of z^3 - 2z - 2", Computed)],
        ),
        "c2*(c2xc2)" => free_entry(
            "c2*(c2xc2)",
            "C2 * (C2 x C2)",
            FiniteGroup::direct_product(&cyclic(2), &cyclic(2)),
            &[("a", Side::A, 1), ("b", Side::B, 2), ("d", Side::B, 1)],
            vec![rate(None, Some(golden()), "golden ratio, root of z^3 - 2z - 1", Computed)],
        ),
        "pgl2z" => {
            let v4 = FiniteGroup::direct_product(&cyclic(2), &cyclic(2));
            let d6 = FiniteGroup::dihedral(6).expect("order 6");
            // C = <a>: (1,0) in C2 x C2 and the reflection b in D6
            let spec = AmalgamSpec::new(v4, d6, cyclic(2), &[0, 2], &[0, 3]).expect("valid amalgam");
            let generators = gens(&spec, &[("a", Side::A, 2), ("b", Side::A, 1), ("c", Side::B, 4)]);
            CatalogEntry {
                name: "pgl2z",
                decomposition: "(C2 x C2) *_C2 D6 = PGL(2,Z)",
                spec,
                generators,
                expected: vec![
                    rate(None, Some(poly(&[-1, -1, 0, 1])), "plastic number, root of z^3 - z - 1", Published),
                    note("normal-form recurrence", "C(n) = C(n-2) + C(n-3)", Published),
                    note("normal-form recurrence", "W(n) = C(n) + C(n-1) + C(n-2)", Published),
                    note("free monoid witness", "{bc, abc}, lengths (2, 3)", Published),
                ],
            }
        }
        "gl2z" => {
            let v4 = FiniteGroup::direct_product(&cyclic(2), &cyclic(2));
            let d8 = FiniteGroup::dihedral(8).expect("order 8");
            let d12 = FiniteGroup::dihedral(12).expect("order 12");
            // (1,0) -> central rotation, (0,1) -> a reflection
            let spec = AmalgamSpec::new(d8, d12, v4, &[0, 4, 2, 6], &[0, 6, 3, 9]).expect("valid amalgam");
            let generators = gens(&spec, &[("a", Side::A, 5), ("b", Side::A, 4), ("c", Side::B, 7)]);
            CatalogEntry {
                name: "gl2z",
                decomposition: "D8 *_(C2 x C2) D12 = GL(2,Z)",
                spec,
                generators,
                expected: vec![note(
                    "minimal growth rate",
                    "plastic number (via a central extension; not computed)",
                    Published,
                )],
            }
        }
        other => return Err(CatalogError::Unknown(other.to_string())),
    })
}

pub fn all() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| load(n).expect("built-in")).collect()
}

/// `U` or `V` in the normal form: a reduced word in the commuting
/// involutions `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    Empty,
    A,
    B,
    Ab,
}

impl Piece {
    pub const ALL: [Piece; 4] = [Piece::Empty, Piece::A, Piece::B, Piece::Ab];

    pub fn letters(self) -> &'static str {
        match self {
            Piece::Empty => "",
            Piece::A => "a",
            Piece::B => "b",
            Piece::Ab => "ab",
        }
    }
}

/// A letter block between two `c`s: `b` or `ab`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    B,
    Ab,
}

impl Block {
    pub fn letters(self) -> &'static str {
        match self {
            Block::B => "b",
            Block::Ab => "ab",
        }
    }
}

/// `U`, or `U c M1 c M2 c ... Mk c V` with each `Mi` in `{b, ab}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlasticForm {
    pub prefix: Piece,
    /// `None` for a bare prefix; otherwise the blocks between the `c`s.
    pub blocks: Option<Vec<Block>>,
    pub suffix: Piece,
}

impl PlasticForm {
    pub fn identity() -> Self {
        Self { prefix: Piece::Empty, blocks: None, suffix: Piece::Empty }
    }

    pub fn letters(&self) -> String {
        let mut s = self.prefix.letters().to_string();
        if let Some(blocks) = &self.blocks {
            s.push('c');
            for b in blocks {
                s.push_str(b.letters());
                s.push('c');
            }
            s.push_str(self.suffix.letters());
        }
        s
    }

    pub fn len(&self) -> usize {
        self.letters().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ends_with_c(&self) -> bool {
        self.blocks.is_some() && self.suffix == Piece::Empty
    }

    /// The element of `entry` (which must be `pgl2z`) this form spells.
    pub fn evaluate(&self, entry: &CatalogEntry) -> NormalForm {
        let alpha = entry.alphabet();
        let mut x = entry.spec.identity();
        for ch in self.letters().chars() {
            let g = alpha.get(&ch.to_string()).expect("pgl2z alphabet");
            entry.spec.multiply_into(&mut x, g);
        }
        x
    }
}

impl fmt::Display for PlasticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.letters();
        if s.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&s)
        }
    }
}

/// All forms of letter length at most `nmax`, by length then letters.
pub fn plastic_forms(nmax: usize) -> Vec<PlasticForm> {
    fn extend(prefix: Piece, blocks: &mut Vec<Block>, len: usize, nmax: usize, out: &mut Vec<PlasticForm>) {
        for suffix in Piece::ALL {
            if len + suffix.letters().len() <= nmax {
                out.push(PlasticForm { prefix, blocks: Some(blocks.clone()), suffix });
            }
        }
        for b in [Block::B, Block::Ab] {
            let next = len + b.letters().len() + 1;
            if next <= nmax {
                blocks.push(b);
                extend(prefix, blocks, next, nmax, out);
                blocks.pop();
            }
        }
    }
    let mut out = Vec::new();
    for prefix in Piece::ALL {
        if prefix.letters().len() <= nmax {
            out.push(PlasticForm { prefix, blocks: None, suffix: Piece::Empty });
        }
        let len = prefix.letters().len() + 1;
        if len <= nmax {
            extend(prefix, &mut Vec::new(), len, nmax, &mut out);
        }
    }
    out.sort_by_cached_key(|f| (f.len(), f.letters()));
    out
}

/// Per-length counts of all forms (`words`) and of those ending in `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlasticCounts {
    pub words: Vec<u64>,
    pub ending_in_c: Vec<u64>,
}

impl PlasticCounts {
    /// Lengths `n >= from` where `C(n) = C(n-2) + C(n-3)` fails.
    pub fn c_recurrence_failures(&self, from: usize) -> Vec<usize> {
        let c = &self.ending_in_c;
        (from.max(3)..c.len()).filter(|&n| c[n] != c[n - 2] + c[n - 3]).collect()
    }

    /// Lengths `n >= from` where `W(n) = C(n) + k C(n-1) + C(n-2)` fails.
    pub fn w_recurrence_failures(&self, middle: u64, from: usize) -> Vec<usize> {
        let (w, c) = (&self.words, &self.ending_in_c);
        (from.max(2)..w.len()).filter(|&n| w[n] != c[n] + middle * c[n - 1] + c[n - 2]).collect()
    }
}

pub fn plastic_enumerate(nmax: usize) -> PlasticCounts {
    let mut words = vec![0u64; nmax + 1];
    let mut ending_in_c = vec![0u64; nmax + 1];
    for f in plastic_forms(nmax) {
        let n = f.len();
        words[n] += 1;
        if f.ends_with_c() {
            ending_in_c[n] += 1;
        }
    }
    PlasticCounts { words, ending_in_c }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlasticError {
    #[error("two forms of length <= {nmax} spell the same element: {first} and {second}")]
    NotInjective { nmax: usize, first: String, second: String },
    #[error("the rewriting did not terminate in a normal form from `{0}`")]
    Rewrite(String),
}

/// Checks that distinct forms up to `nmax` spell distinct elements.
pub fn check_injective(entry: &CatalogEntry, nmax: usize) -> Result<usize, PlasticError> {
    let mut seen: FxHashMap<NormalForm, PlasticForm> = FxHashMap::default();
    for f in plastic_forms(nmax) {
        let g = f.evaluate(entry);
        if let Some(prev) = seen.insert(g, f.clone()) {
            return Err(PlasticError::NotInjective { nmax, first: prev.letters(), second: f.letters() });
        }
    }
    Ok(seen.len())
}

/// Rewrites a word in `a, b, c` (inverses allowed, since all three are
/// involutions) into normal form: cancel `xx`, replace `ba` by `ab`, and
/// `cac` by `aca`, until none applies.
pub fn rewrite(word: &str) -> Result<PlasticForm, PlasticError> {
    let mut w: Vec<u8> = word.bytes().filter(|b| matches!(b, b'a' | b'b' | b'c')).collect();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < w.len() {
            if w[i] == w[i + 1] {
                w.drain(i..i + 2);
                i = i.saturating_sub(1);
                changed = true;
            } else if w[i] == b'b' && w[i + 1] == b'a' {
                w.swap(i, i + 1);
                i = i.saturating_sub(1);
                changed = true;
            } else if i + 2 < w.len() && &w[i..i + 3] == b"cac" {
                w[i..i + 3].copy_from_slice(b"aca");
                i = i.saturating_sub(1);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }
    let s = String::from_utf8(w).expect("ascii");
    parse_form(&s).ok_or(PlasticError::Rewrite(word.to_string()))
}

fn parse_piece(s: &str) -> Option<Piece> {
    Piece::ALL.into_iter().find(|p| p.letters() == s)
}

fn parse_form(s: &str) -> Option<PlasticForm> {
    let parts: Vec<&str> = s.split('c').collect();
    let prefix = parse_piece(parts[0])?;
    if parts.len() == 1 {
        return Some(PlasticForm { prefix, blocks: None, suffix: Piece::Empty });
    }
    let suffix = parse_piece(parts[parts.len() - 1])?;
    let blocks = parts[1..parts.len() - 1]
        .iter()
        .map(|m| match *m {
            "b" => Some(Block::B),
            "ab" => Some(Block::Ab),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(PlasticForm { prefix, blocks: Some(blocks), suffix })
}

/// The normal form of `g` among the forms of length at most `nmax`.
/// `entry` must be `pgl2z`.
pub fn plastic_normal_form(entry: &CatalogEntry, g: &NormalForm, nmax: usize) -> Option<PlasticForm> {
    plastic_forms(nmax).into_iter().find(|f| f.evaluate(entry) == *g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_load() {
        for e in all() {
            assert!(e.generators.elements().iter().all(|g| !e.spec.is_identity(g)), "{}", e.name);
        }
        assert!(load("nope").is_err());
        let p = load("pgl2z").unwrap();
        assert_eq!((p.spec.index(Side::A), p.spec.index(Side::B)), (2, 3));
        assert_eq!(load("c2*c2").unwrap().spec.complexity(), 1);
        let g = load("gl2z").unwrap();
        assert_eq!((g.spec.factor(Side::A).order(), g.spec.factor(Side::B).order()), (8, 12));
        assert_eq!(g.spec.amalgamated().order(), 4);
    }

    #[test]
    fn pgl2z_relations() {
        let p = load("pgl2z").unwrap();
        let s = &p.spec;
        let g = |n: &str| p.alphabet().get(n).unwrap().clone();
        let (a, b, c) = (g("a"), g("b"), g("c"));
        for x in [&a, &b, &c] {
            assert!(s.is_identity(&s.multiply(x, x)));
        }
        assert!(s.is_identity(&s.pow(&s.multiply(&a, &b), 2)));
        assert!(s.is_identity(&s.pow(&s.multiply(&a, &c), 3)));
        assert!(!s.is_identity(&s.multiply(&a, &c)));
    }

    #[test]
    fn small_counts() {
        let k = plastic_enumerate(4);
        assert_eq!(k.words[0], 1);
        assert_eq!(k.words[1], 3);
        assert_eq!(k.words[2], 5);
        assert_eq!(k.ending_in_c[..4], [0, 1, 2, 2]);
    }

    #[test]
    fn c_recurrence_and_injectivity() {
        let k = plastic_enumerate(30);
        assert!(k.c_recurrence_failures(4).is_empty());
        assert!(k.w_recurrence_failures(2, 3).is_empty());
        let p = load("pgl2z").unwrap();
        assert!(check_injective(&p, 14).is_ok());
    }

    #[test]
    fn rewriting() {
        assert_eq!(rewrite("").unwrap(), PlasticForm::identity());
        assert_eq!(rewrite("cac").unwrap().letters(), "aca");
        assert_eq!(rewrite("ba").unwrap().letters(), "ab");
        assert_eq!(rewrite("bcbbc").unwrap().letters(), "b");
        let p = load("pgl2z").unwrap();
        let w = p.spec.reduce(p.alphabet(), &p.alphabet().parse_word("c a c").unwrap());
        assert_eq!(plastic_normal_form(&p, &w, 4).unwrap().letters(), "aca");
    }
}
