//! Exact arithmetic in an amalgamated product `A *_C B` of finite groups.
//!
//! Every element has a unique normal form `s1 s2 ... sn * c` where the
//! syllables `si` are non-identity transversal representatives lying
//! alternately in `A` and `B`, and the head `c` is an element of `C`
//! written on the right. Free products are the case `C = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use smallvec::SmallVec;
use thiserror::Error;

use crate::group::{Embedding, EmbeddingError, FiniteGroup, GroupError, GroupSpec, Transversal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    #[inline]
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// One factor element in a normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub side: Side,
    pub elem: u16,
}

pub type Syllables = SmallVec<[Syllable; 8]>;

/// Unique normal form `s1 ... sn * head`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    pub syllables: Syllables,
    pub head: u16,
}

impl NormalForm {
    /// Number of syllables.
    #[inline]
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum AmalgamError {
    #[error("factor {side}: {source}")]
    Group { side: &'static str, source: GroupError },
    #[error("embedding of C into {side}: {source}")]
    Embedding { side: Side, source: EmbeddingError },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("generator `{0}` is the identity")]
    IdentityGenerator(String),
    #[error("generator `{0}` duplicates generator `{1}`")]
    DuplicateGenerator(String, String),
    #[error("element {elem} is outside factor {side}")]
    ElementOutOfRange { side: Side, elem: usize },
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// The data of an amalgamated product `A *_C B` with fixed transversals.
#[derive(Debug, Clone)]
pub struct AmalgamSpec {
    a: FiniteGroup,
    b: FiniteGroup,
    c: FiniteGroup,
    emb_a: Embedding,
    emb_b: Embedding,
    trans_a: Transversal,
    trans_b: Transversal,
    complexity: usize,
    hash: String,
}

impl AmalgamSpec {
    pub fn new(
        a: FiniteGroup,
        b: FiniteGroup,
        c: FiniteGroup,
        image_a: &[usize],
        image_b: &[usize],
    ) -> Result<Self, AmalgamError> {
        let emb_a =
            Embedding::verify(&c, &a, image_a).map_err(|source| AmalgamError::Embedding { side: Side::A, source })?;
        let emb_b =
            Embedding::verify(&c, &b, image_b).map_err(|source| AmalgamError::Embedding { side: Side::B, source })?;
        let trans_a = Transversal::new(&a, &emb_a);
        let trans_b = Transversal::new(&b, &emb_b);
        let complexity = (trans_a.index() - 1) * (trans_b.index() - 1);
        let hash = spec_hash(&a, &b, &c, image_a, image_b);
        Ok(Self { a, b, c, emb_a, emb_b, trans_a, trans_b, complexity, hash })
    }

    pub fn free_product(a: FiniteGroup, b: FiniteGroup) -> Self {
        let c = FiniteGroup::trivial();
        let (ia, ib) = ([a.identity()], [b.identity()]);
        Self::new(a, b, c, &ia, &ib).expect("trivial amalgamation")
    }

    pub fn factor(&self, side: Side) -> &FiniteGroup {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn amalgamated(&self) -> &FiniteGroup {
        &self.c
    }

    pub fn embedding(&self, side: Side) -> &Embedding {
        match side {
            Side::A => &self.emb_a,
            Side::B => &self.emb_b,
        }
    }

    pub fn transversal(&self, side: Side) -> &Transversal {
        match side {
            Side::A => &self.trans_a,
            Side::B => &self.trans_b,
        }
    }

    /// `[A:C]` or `[B:C]`.
    pub fn index(&self, side: Side) -> usize {
        self.transversal(side).index()
    }

    /// `([A:C]-1)([B:C]-1)`.
    pub fn complexity(&self) -> usize {
        self.complexity
    }

    /// True when the Bass-Serre tree is neither a point nor a line.
    pub fn is_branching(&self) -> bool {
        self.complexity >= 2
    }

    pub fn is_free_product(&self) -> bool {
        self.c.order() == 1
    }

    /// SHA-256 over the factor tables and embeddings.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm { syllables: Syllables::new(), head: self.c.identity() as u16 }
    }

    pub fn is_identity(&self, x: &NormalForm) -> bool {
        x.syllables.is_empty() && x.head as usize == self.c.identity()
    }

    /// The factor element `e` of `side` as a group element.
    pub fn element(&self, side: Side, e: usize) -> NormalForm {
        let mut x = self.identity();
        self.push_factor(&mut x, side, e);
        x
    }

    /// The element `c` of the amalgamated subgroup.
    pub fn sub_element(&self, c: usize) -> NormalForm {
        NormalForm { syllables: Syllables::new(), head: c as u16 }
    }

    /// Right-multiplies `x` in place by the factor element `e` of `side`.
    pub fn push_factor(&self, x: &mut NormalForm, side: Side, e: usize) {
        let g = self.factor(side);
        let mut h = g.mul(self.embedding(side).apply(x.head as usize), e);
        if let Some(last) = x.syllables.last() {
            if last.side == side {
                h = g.mul(last.elem as usize, h);
                x.syllables.pop();
            }
        }
        let (rep, c) = self.transversal(side).factor(h);
        if rep != g.identity() {
            x.syllables.push(Syllable { side, elem: rep as u16 });
        }
        x.head = c as u16;
    }

    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        let mut out = x.clone();
        self.multiply_into(&mut out, y);
        out
    }

    /// `x <- x * y`.
    pub fn multiply_into(&self, x: &mut NormalForm, y: &NormalForm) {
        for s in &y.syllables {
            self.push_factor(x, s.side, s.elem as usize);
        }
        x.head = self.c.mul(x.head as usize, y.head as usize) as u16;
    }

    pub fn invert(&self, x: &NormalForm) -> NormalForm {
        let mut out = self.sub_element(self.c.inv(x.head as usize));
        for s in x.syllables.iter().rev() {
            let g = self.factor(s.side);
            self.push_factor(&mut out, s.side, g.inv(s.elem as usize));
        }
        out
    }

    pub fn conjugate(&self, h: &NormalForm, g: &NormalForm) -> NormalForm {
        self.multiply(&self.multiply(h, g), &self.invert(h))
    }

    pub fn pow(&self, x: &NormalForm, k: i64) -> NormalForm {
        let base = if k < 0 { self.invert(x) } else { x.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            self.multiply_into(&mut out, &base);
        }
        out
    }

    /// Returns `(core, conjugator)` with `x = conjugator * core * conjugator^-1`
    /// and `core` cyclically reduced: either at most one syllable, or an even
    /// number of syllables.
    pub fn cyclic_reduce(&self, x: &NormalForm) -> (NormalForm, NormalForm) {
        let mut core = x.clone();
        let mut conj = self.identity();
        while core.len() >= 3 && core.len() % 2 == 1 {
            let s = core.syllables[0];
            let first = self.element(s.side, s.elem as usize);
            core = self.multiply(&self.multiply(&self.invert(&first), &core), &first);
            self.multiply_into(&mut conj, &first);
        }
        (core, conj)
    }

    /// Order of `x` if it is at most `cap`.
    pub fn element_order(&self, x: &NormalForm, cap: usize) -> Option<usize> {
        let mut p = x.clone();
        for k in 1..=cap {
            if self.is_identity(&p) {
                return Some(k);
            }
            self.multiply_into(&mut p, x);
        }
        None
    }

    /// Reduces a word over `alphabet` to its normal form.
    pub fn reduce(&self, alphabet: &Alphabet, w: &Word) -> NormalForm {
        let mut out = self.identity();
        for letter in &w.letters {
            let g = &alphabet.elements[letter.generator];
            if letter.inverse {
                self.multiply_into(&mut out, &self.invert(g));
            } else {
                self.multiply_into(&mut out, g);
            }
        }
        out
    }

    pub fn display(&self, x: &NormalForm) -> String {
        let mut parts: Vec<String> =
            x.syllables.iter().map(|s| format!("{}:{}", s.side, self.factor(s.side).label(s.elem as usize))).collect();
        if x.head as usize != self.c.identity() || parts.is_empty() {
            parts.push(format!("C:{}", self.c.label(x.head as usize)));
        }
        parts.join(" ")
    }
}

fn spec_hash(a: &FiniteGroup, b: &FiniteGroup, c: &FiniteGroup, ia: &[usize], ib: &[usize]) -> String {
    let mut h = Sha256::new();
    for g in [a, b, c] {
        h.update((g.order() as u64).to_le_bytes());
        for row in g.table() {
            for v in row {
                h.update((v as u32).to_le_bytes());
            }
        }
    }
    for img in [ia, ib] {
        for &v in img {
            h.update((v as u32).to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// One letter of a word: a generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word { letters: self.letters.iter().chain(&other.letters).copied().collect() }
    }
}

/// Named group elements; serves both as a word alphabet and as a
/// generating set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    elements: Vec<NormalForm>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, g: NormalForm) -> Result<(), AmalgamError> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(AmalgamError::DuplicateName(name));
        }
        self.names.push(name);
        self.elements.push(g);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, g: NormalForm) -> Result<Self, AmalgamError> {
        self.push(name, g)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> &[NormalForm] {
        &self.elements
    }

    pub fn get(&self, name: &str) -> Option<&NormalForm> {
        self.position(name).map(|i| &self.elements[i])
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses the command-line word grammar: whitespace-separated
    /// generator names, each optionally followed by `^-1` (or `^1`).
    /// A token that is not a name is split into single-character names
    /// when every generator name is one character long, so `ab^-1c`
    /// reads as `a b^-1 c`.
    pub fn parse_word(&self, text: &str) -> Result<Word, AmalgamError> {
        let mut letters = Vec::new();
        let single_chars = self.names.iter().all(|n| n.chars().count() == 1);
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            match self.parse_letter(token) {
                Ok(l) => letters.push(l),
                Err(_) if single_chars => letters.extend(self.parse_packed(token)?),
                Err(e) => return Err(e),
            }
        }
        Ok(Word { letters })
    }

    fn parse_letter(&self, token: &str) -> Result<Letter, AmalgamError> {
        let (name, inverse) = match token.split_once('^') {
            Some((n, "-1")) => (n, true),
            Some((n, "1")) => (n, false),
            Some(_) => return Err(AmalgamError::Parse(format!("bad exponent in `{token}`"))),
            None => (token, false),
        };
        let generator = self.position(name).ok_or_else(|| AmalgamError::UnknownGenerator(name.to_string()))?;
        Ok(Letter { generator, inverse })
    }

    fn parse_packed(&self, token: &str) -> Result<Vec<Letter>, AmalgamError> {
        let chars: Vec<char> = token.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let name = chars[i].to_string();
            let generator = self.position(&name).ok_or_else(|| AmalgamError::UnknownGenerator(name.clone()))?;
            i += 1;
            let mut inverse = false;
            if chars.get(i) == Some(&'^') {
                let rest: String = chars[i..].iter().take(3).collect();
                if rest == "^-1" {
                    inverse = true;
                    i += 3;
                } else if rest.starts_with("^1") {
                    i += 2;
                } else {
                    return Err(AmalgamError::Parse(format!("bad exponent in `{token}`")));
                }
            }
            out.push(Letter { generator, inverse });
        }
        Ok(out)
    }

    pub fn word_to_string(&self, w: &Word) -> String {
        w.letters
            .iter()
            .map(
                |l| {
                    if l.inverse {
                        format!("{}^-1", self.names[l.generator])
                    } else {
                        self.names[l.generator].clone()
                    }
                },
            )
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A generating set: an alphabet whose members are distinct and
/// non-trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSet {
    alphabet: Alphabet,
}

impl GenSet {
    pub fn new(spec: &AmalgamSpec, alphabet: Alphabet) -> Result<Self, AmalgamError> {
        for (i, g) in alphabet.elements.iter().enumerate() {
            if spec.is_identity(g) {
                return Err(AmalgamError::IdentityGenerator(alphabet.names[i].clone()));
            }
            if let Some(j) = alphabet.elements[..i].iter().position(|h| h == g) {
                return Err(AmalgamError::DuplicateGenerator(alphabet.names[i].clone(), alphabet.names[j].clone()));
            }
        }
        Ok(Self { alphabet })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn elements(&self) -> &[NormalForm] {
        self.alphabet.elements()
    }

    pub fn names(&self) -> &[String] {
        self.alphabet.names()
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    /// `S ∪ S^-1` without repetitions, in a fixed order: each generator
    /// followed by its inverse when distinct.
    pub fn letters(&self, spec: &AmalgamSpec, with_inverses: bool) -> Vec<NormalForm> {
        let mut out: Vec<NormalForm> = Vec::new();
        for g in self.elements() {
            if !out.contains(g) {
                out.push(g.clone());
            }
            if with_inverses {
                let gi = spec.invert(g);
                if !out.contains(&gi) {
                    out.push(gi);
                }
            }
        }
        out
    }
}

/// A factor element named in an amalgam spec file: either an index or a
/// label of the factor group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLetter {
    pub side: Side,
    pub element: ElementRef,
}

/// On-disk description of an amalgam and its generator alphabet.
///
/// ```json
/// {
///   "a": {"family": "cyclic", "n": 2},
///   "b": {"family": "cyclic", "n": 3},
///   "c": {"family": "cyclic", "n": 1},
///   "embed_a": [0], "embed_b": [0],
///   "generators": [
///     {"name": "a", "word": [{"side": "A", "element": 1}]},
///     {"name": "b", "word": [{"side": "B", "element": "a"}]}
///   ]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamFile {
    pub a: GroupSpec,
    pub b: GroupSpec,
    #[serde(default = "trivial_spec")]
    pub c: GroupSpec,
    #[serde(default)]
    pub embed_a: Option<Vec<usize>>,
    #[serde(default)]
    pub embed_b: Option<Vec<usize>>,
    pub generators: Vec<NamedGenerator>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedGenerator {
    pub name: String,
    pub word: Vec<FactorLetter>,
}

fn trivial_spec() -> GroupSpec {
    GroupSpec::Cyclic { n: 1 }
}

impl AmalgamFile {
    pub fn build(&self) -> Result<(AmalgamSpec, Alphabet), AmalgamError> {
        let a = self.a.build().map_err(|source| AmalgamError::Group { side: "A", source })?;
        let b = self.b.build().map_err(|source| AmalgamError::Group { side: "B", source })?;
        let c = self.c.build().map_err(|source| AmalgamError::Group { side: "C", source })?;
        let ia = self.embed_a.clone().unwrap_or_else(|| vec![a.identity()]);
        let ib = self.embed_b.clone().unwrap_or_else(|| vec![b.identity()]);
        let spec = AmalgamSpec::new(a, b, c, &ia, &ib)?;
        let mut alphabet = Alphabet::new();
        for g in &self.generators {
            let mut x = spec.identity();
            for l in &g.word {
                let factor = spec.factor(l.side);
                let e = match &l.element {
                    ElementRef::Index(i) => *i,
                    ElementRef::Label(s) => factor
                        .find_label(s)
                        .ok_or_else(|| AmalgamError::Parse(format!("no element `{s}` in {}", l.side)))?,
                };
                if e >= factor.order() {
                    return Err(AmalgamError::ElementOutOfRange { side: l.side, elem: e });
                }
                spec.push_factor(&mut x, l.side, e);
            }
            alphabet.push(g.name.clone(), x)?;
        }
        Ok((spec, alphabet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2_c3() -> (AmalgamSpec, NormalForm, NormalForm) {
        let spec = AmalgamSpec::free_product(FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(3).unwrap());
        let a = spec.element(Side::A, 1);
        let b = spec.element(Side::B, 1);
        (spec, a, b)
    }

    #[test]
    fn identity_is_neutral() {
        let (spec, a, b) = c2_c3();
        let ab = spec.multiply(&a, &b);
        assert_eq!(spec.multiply(&ab, &spec.identity()), ab);
        assert_eq!(spec.multiply(&spec.identity(), &ab), ab);
    }

    #[test]
    fn product_of_two_factors_has_two_syllables() {
        let (spec, a, b) = c2_c3();
        let ab = spec.multiply(&a, &b);
        assert_eq!(ab.len(), 2);
        assert_eq!(ab.syllables[0], Syllable { side: Side::A, elem: 1 });
        assert_eq!(ab.syllables[1], Syllable { side: Side::B, elem: 1 });
    }

    #[test]
    fn inverse_of_ab_is_binv_a() {
        let (spec, a, b) = c2_c3();
        let ab = spec.multiply(&a, &b);
        let inv = spec.invert(&ab);
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.syllables[0], Syllable { side: Side::B, elem: 2 });
        assert_eq!(inv.syllables[1], Syllable { side: Side::A, elem: 1 });
        assert!(spec.is_identity(&spec.multiply(&ab, &inv)));
    }

    #[test]
    fn involution_is_self_inverse() {
        let (spec, a, _) = c2_c3();
        assert_eq!(spec.invert(&a), a);
        assert!(spec.is_identity(&spec.multiply(&a, &a)));
    }

    #[test]
    fn cyclic_reduce_conjugate() {
        let (spec, a, b) = c2_c3();
        let x = spec.conjugate(&a, &b);
        assert_eq!(x.len(), 3);
        let (core, conj) = spec.cyclic_reduce(&x);
        assert_eq!(core, b);
        assert_eq!(conj, a);
        assert_eq!(spec.conjugate(&conj, &core), x);
    }

    #[test]
    fn cyclic_reduce_keeps_reduced() {
        let (spec, a, b) = c2_c3();
        let ab = spec.multiply(&a, &b);
        assert_eq!(spec.cyclic_reduce(&ab), (ab.clone(), spec.identity()));
        let id = spec.identity();
        assert_eq!(spec.cyclic_reduce(&id), (id.clone(), id));
    }

    #[test]
    fn amalgam_head_absorption() {
        // C2 x C2 *_{C2} D6 with a = (1,0) glued to the reflection b of D6
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let v = FiniteGroup::direct_product(&c2, &c2);
        let d6 = FiniteGroup::dihedral(6).unwrap();
        let spec = AmalgamSpec::new(v, d6, c2, &[0, 2], &[0, 3]).unwrap();
        let a = spec.element(Side::A, 2);
        assert!(a.is_empty());
        assert_eq!(a.head, 1);
        assert_eq!(spec.element(Side::B, 3), a);
        let c = spec.element(Side::B, 4);
        let cac = spec.multiply(&spec.multiply(&c, &a), &c);
        let aca = spec.multiply(&spec.multiply(&a, &c), &a);
        assert_eq!(cac, aca);
        assert_eq!(spec.complexity(), 2);
        assert!(spec.is_branching());
    }

    #[test]
    fn parse_packed_and_spaced() {
        let (spec, a, b) = c2_c3();
        let alpha = Alphabet::new().with("a", a).unwrap().with("b", b).unwrap();
        let w1 = alpha.parse_word("a b^-1 a").unwrap();
        let w2 = alpha.parse_word("ab^-1a").unwrap();
        assert_eq!(w1, w2);
        assert_eq!(w1.len(), 3);
        assert!(alpha.parse_word("a q").is_err());
        assert!(alpha.parse_word("a^2").is_err());
        assert_eq!(alpha.word_to_string(&w1), "a b^-1 a");
        assert!(spec.reduce(&alpha, &alpha.parse_word("").unwrap()) == spec.identity());
    }

    #[test]
    fn genset_rejects_identity_and_duplicates() {
        let (spec, a, _) = c2_c3();
        let al = Alphabet::new().with("e", spec.identity()).unwrap();
        assert!(matches!(GenSet::new(&spec, al), Err(AmalgamError::IdentityGenerator(_))));
        let al = Alphabet::new().with("a", a.clone()).unwrap().with("x", a).unwrap();
        assert!(matches!(GenSet::new(&spec, al), Err(AmalgamError::DuplicateGenerator(..))));
    }

    #[test]
    fn amalgam_file_roundtrip() {
        let text = r#"{
            "a": {"family": "cyclic", "n": 2},
            "b": {"family": "cyclic", "n": 3},
            "generators": [
                {"name": "a", "word": [{"side": "A", "element": 1}]},
                {"name": "b", "word": [{"side": "B", "element": "a"}]}
            ]
        }"#;
        let file: AmalgamFile = serde_json::from_str(text).unwrap();
        let (spec, alpha) = file.build().unwrap();
        assert!(spec.is_free_product());
        assert_eq!(alpha.get("b").unwrap(), &spec.element(Side::B, 1));
    }
}
