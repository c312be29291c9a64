//! Exact growth rates of free and amalgamated products of finite groups.

pub mod amalgam;
pub mod catalog;
pub mod group;
pub mod growth;
pub mod random;
pub mod rate;
pub mod spectral;
pub mod tree;
pub mod verification;

pub use amalgam::{Alphabet, AmalgamFile, AmalgamSpec, GenSet, NormalForm, Side, Syllable, Word};
pub use group::{Embedding, FiniteGroup, GroupSpec, Transversal};
