use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("symbol `{0}` has length zero")]
    ZeroLength(String),
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("forbidden factor is empty")]
    EmptyFactor,
    #[error("unknown symbol `{0}` in forbidden factor")]
    UnknownSymbol(String),
}

/// Symbols with positive integer lengths and a list of forbidden factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedAlphabet {
    symbols: Vec<(String, usize)>,
    forbidden: Vec<Vec<usize>>,
}

impl WeightedAlphabet {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self, AlphabetError> {
        for (i, (name, len)) in symbols.iter().enumerate() {
            if *len == 0 {
                return Err(AlphabetError::ZeroLength(name.clone()));
            }
            if symbols[..i].iter().any(|(n, _)| n == name) {
                return Err(AlphabetError::Duplicate(name.clone()));
            }
        }
        Ok(Self { symbols, forbidden: Vec::new() })
    }

    /// Unit-length symbols named by single characters of `names`.
    pub fn unit(names: &str) -> Self {
        Self::new(names.chars().map(|c| (c.to_string(), 1)).collect()).expect("distinct unit symbols")
    }

    /// Anonymous symbols `s0, s1, ...` with the given lengths.
    pub fn blocks(lengths: &[usize]) -> Result<Self, AlphabetError> {
        Self::new(lengths.iter().enumerate().map(|(i, &l)| (format!("s{i}"), l)).collect())
    }

    /// Forbids a factor given as symbol names.
    pub fn forbid(mut self, factor: &[&str]) -> Result<Self, AlphabetError> {
        if factor.is_empty() {
            return Err(AlphabetError::EmptyFactor);
        }
        let ids = factor
            .iter()
            .map(|s| {
                self.symbols.iter().position(|(n, _)| n == s).ok_or_else(|| AlphabetError::UnknownSymbol(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.forbidden.push(ids);
        Ok(self)
    }

    /// Forbids a factor spelled with single-character symbol names.
    pub fn forbid_str(self, factor: &str) -> Result<Self, AlphabetError> {
        let parts: Vec<String> = factor.chars().map(|c| c.to_string()).collect();
        let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
        self.forbid(&refs)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn forbidden(&self) -> &[Vec<usize>] {
        &self.forbidden
    }
}

/// Aho-Corasick automaton over symbol indices; dead states are those
/// whose suffix contains a forbidden factor.
struct Automaton {
    next: Vec<Vec<usize>>,
    dead: Vec<bool>,
}

impl Automaton {
    fn build(k: usize, patterns: &[Vec<usize>]) -> Self {
        let mut trie: Vec<Vec<Option<usize>>> = vec![vec![None; k]];
        let mut dead = vec![false];
        for p in patterns {
            let mut s = 0;
            for &c in p {
                s = match trie[s][c] {
                    Some(t) => t,
                    None => {
                        trie.push(vec![None; k]);
                        dead.push(false);
                        let t = trie.len() - 1;
                        trie[s][c] = Some(t);
                        t
                    }
                };
            }
            dead[s] = true;
        }
        let n = trie.len();
        let mut next = vec![vec![0; k]; n];
        let mut fail = vec![0; n];
        let mut queue = VecDeque::new();
        for c in 0..k {
            if let Some(t) = trie[0][c] {
                next[0][c] = t;
                queue.push_back(t);
            }
        }
        while let Some(s) = queue.pop_front() {
            dead[s] |= dead[fail[s]];
            for c in 0..k {
                match trie[s][c] {
                    Some(t) => {
                        fail[t] = next[fail[s]][c];
                        next[s][c] = t;
                        queue.push_back(t);
                    }
                    None => next[s][c] = next[fail[s]][c],
                }
            }
        }
        Self { next, dead }
    }
}

/// Number of words of each total weight `0..=nmax` avoiding every
/// forbidden factor.
pub fn count_avoiding(alpha: &WeightedAlphabet, nmax: usize) -> Vec<BigUint> {
    let k = alpha.symbols.len();
    let auto = Automaton::build(k, &alpha.forbidden);
    let states = auto.next.len();
    // table[n][s]: words of weight n ending in automaton state s
    let mut table = vec![vec![BigUint::zero(); states]; nmax + 1];
    table[0][0] = BigUint::from(1u8);
    for n in 0..=nmax {
        for s in 0..states {
            if table[n][s].is_zero() {
                continue;
            }
            let here = table[n][s].clone();
            for (c, (_, len)) in alpha.symbols.iter().enumerate() {
                let t = auto.next[s][c];
                if n + len <= nmax && !auto.dead[t] {
                    table[n + len][t] += &here;
                }
            }
        }
    }
    table.into_iter().map(|row| row.into_iter().sum()).collect()
}
