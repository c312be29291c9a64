use std::collections::VecDeque;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamSpec, NormalForm, Side, Syllable, Syllables};

/// The coset `g X` for `X` = `A` or `B`, keyed by the normal form of `g`
/// with the head and a trailing `X`-syllable removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeVertex {
    pub side: Side,
    pub key: Syllables,
}

impl TreeVertex {
    pub fn base(side: Side) -> Self {
        Self { side, key: Syllables::new() }
    }

    /// Distance from the base vertex `A`.
    pub fn depth(&self) -> usize {
        self.chain_len() - 1
    }

    fn chain_len(&self) -> usize {
        let m = self.key.len();
        let first = self.key.first().map_or(self.side, |s| s.side);
        m + 1 + usize::from(first == Side::B)
    }

    /// Vertex `i` (0-based) on the geodesic from base `A` to `self`.
    fn chain_at(&self, i: usize) -> (Side, &[Syllable]) {
        let first = self.key.first().map_or(self.side, |s| s.side);
        let i = if first == Side::B {
            if i == 0 {
                return (Side::A, &[]);
            }
            i - 1
        } else {
            i
        };
        let m = self.key.len();
        if i < m {
            (self.key[i].side, &self.key[..i])
        } else {
            (self.side, &self.key[..])
        }
    }

    fn chain_vertex(&self, i: usize) -> TreeVertex {
        let (side, key) = self.chain_at(i);
        TreeVertex { side, key: key.iter().copied().collect() }
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            return write!(f, "{}", self.side);
        }
        for s in &self.key {
            write!(f, "{}{} ", s.side, s.elem)?;
        }
        write!(f, "{}", self.side)
    }
}

/// The Bass-Serre tree of an amalgam, with vertices the left cosets
/// `gA`, `gB` and `G` acting by left multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Tree<'a> {
    spec: &'a AmalgamSpec,
}

impl<'a> Tree<'a> {
    pub fn new(spec: &'a AmalgamSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> &'a AmalgamSpec {
        self.spec
    }

    /// The vertex `g X`.
    pub fn vertex_of(&self, g: &NormalForm, side: Side) -> TreeVertex {
        let mut key = g.syllables.clone();
        if key.last().is_some_and(|s| s.side == side) {
            key.pop();
        }
        TreeVertex { side, key }
    }

    /// An element `g` with `g X = v`.
    pub fn representative(&self, v: &TreeVertex) -> NormalForm {
        NormalForm { syllables: v.key.clone(), head: self.spec.amalgamated().identity() as u16 }
    }

    pub fn act(&self, g: &NormalForm, v: &TreeVertex) -> TreeVertex {
        self.vertex_of(&self.spec.multiply(g, &self.representative(v)), v.side)
    }

    /// Neighbours `g t Y` of `v = g X`, one per transversal element `t` of `X`.
    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let other = v.side.other();
        let trans = self.spec.transversal(v.side);
        let id = self.spec.factor(v.side).identity();
        let mut out = Vec::with_capacity(trans.index());
        let mut up = v.key.clone();
        if up.last().is_some_and(|s| s.side == other) {
            up.pop();
        }
        out.push(TreeVertex { side: other, key: up });
        for t in trans.reps() {
            if t != id {
                let mut key = v.key.clone();
                key.push(Syllable { side: v.side, elem: t as u16 });
                out.push(TreeVertex { side: other, key });
            }
        }
        out
    }

    pub fn degree(&self, v: &TreeVertex) -> usize {
        self.spec.index(v.side)
    }

    /// Exact distance from the geodesics to base `A`.
    pub fn distance(&self, u: &TreeVertex, v: &TreeVertex) -> usize {
        let (lu, lv) = (u.chain_len(), v.chain_len());
        let common = (0..lu.min(lv)).take_while(|&i| u.chain_at(i) == v.chain_at(i)).count();
        lu + lv - 2 * common
    }

    /// The geodesic from `u` to `v`, endpoints included.
    pub fn path(&self, u: &TreeVertex, v: &TreeVertex) -> Vec<TreeVertex> {
        let (lu, lv) = (u.chain_len(), v.chain_len());
        let common = (0..lu.min(lv)).take_while(|&i| u.chain_at(i) == v.chain_at(i)).count();
        let mut out: Vec<TreeVertex> = (common - 1..lu).rev().map(|i| u.chain_vertex(i)).collect();
        out.extend((common..lv).map(|i| v.chain_vertex(i)));
        out
    }

    /// Distance by bidirectional breadth-first search over adjacency,
    /// `None` beyond `radius`. Used as an oracle for [`Tree::distance`].
    pub fn distance_bfs(&self, u: &TreeVertex, v: &TreeVertex, radius: usize) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut dist: [FxHashMap<TreeVertex, usize>; 2] = [FxHashMap::default(), FxHashMap::default()];
        let mut frontier = [vec![u.clone()], vec![v.clone()]];
        dist[0].insert(u.clone(), 0);
        dist[1].insert(v.clone(), 0);
        let mut radii = [0usize, 0usize];
        while radii[0] + radii[1] < radius {
            let s = usize::from(frontier[1].len() < frontier[0].len());
            let mut next = Vec::new();
            for w in &frontier[s] {
                for n in self.neighbors(w) {
                    if dist[s].contains_key(&n) {
                        continue;
                    }
                    if let Some(d) = dist[1 - s].get(&n) {
                        return Some(radii[s] + 1 + d);
                    }
                    dist[s].insert(n.clone(), radii[s] + 1);
                    next.push(n);
                }
            }
            radii[s] += 1;
            frontier[s] = next;
        }
        None
    }

    /// All vertices within `radius` of `center`, in BFS order, stopping
    /// after `cap` vertices.
    pub fn ball(&self, center: &TreeVertex, radius: usize, cap: usize) -> Vec<TreeVertex> {
        let mut seen = FxHashSet::default();
        let mut out = vec![center.clone()];
        seen.insert(center.clone());
        let mut queue = VecDeque::from([(center.clone(), 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for n in self.neighbors(&v) {
                if out.len() >= cap {
                    return out;
                }
                if seen.insert(n.clone()) {
                    out.push(n.clone());
                    queue.push_back((n, d + 1));
                }
            }
        }
        out
    }

    /// `d(v, g v)`.
    pub fn displacement(&self, g: &NormalForm, v: &TreeVertex) -> usize {
        self.distance(v, &self.act(g, v))
    }

    /// The vertex `k` steps from `u` towards `v` (clamped at `v`).
    pub fn step_towards(&self, u: &TreeVertex, v: &TreeVertex, k: usize) -> TreeVertex {
        let p = self.path(u, v);
        p[k.min(p.len() - 1)].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    fn c2c3() -> AmalgamSpec {
        AmalgamSpec::free_product(FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(3).unwrap())
    }

    #[test]
    fn base_edge() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        assert_eq!(t.distance(&TreeVertex::base(Side::A), &TreeVertex::base(Side::B)), 1);
        assert!(t.neighbors(&TreeVertex::base(Side::A)).contains(&TreeVertex::base(Side::B)));
    }

    #[test]
    fn factor_element_fixes_its_base() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        let a = spec.element(Side::A, 1);
        let (va, vb) = (TreeVertex::base(Side::A), TreeVertex::base(Side::B));
        assert_eq!(t.act(&a, &va), va);
        assert_ne!(t.act(&a, &vb), vb);
        assert_eq!(t.act(&spec.identity(), &vb), vb);
    }

    #[test]
    fn ab_moves_base_by_two() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        let ab = spec.multiply(&spec.element(Side::A, 1), &spec.element(Side::B, 1));
        let va = TreeVertex::base(Side::A);
        let w = t.act(&ab, &va);
        assert_eq!(t.distance(&va, &w), 2);
        assert_eq!(t.distance_bfs(&va, &w, 6), Some(2));
    }

    #[test]
    fn degrees_match_indices() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        for v in t.ball(&TreeVertex::base(Side::A), 4, 1000) {
            assert_eq!(t.neighbors(&v).len(), t.degree(&v));
        }
    }

    #[test]
    fn closed_form_matches_bfs() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        let ball = t.ball(&TreeVertex::base(Side::B), 4, 1000);
        for u in ball.iter().step_by(3) {
            for v in ball.iter().step_by(5) {
                assert_eq!(Some(t.distance(u, v)), t.distance_bfs(u, v, 10), "{u} {v}");
                let p = t.path(u, v);
                assert_eq!(p.len(), t.distance(u, v) + 1);
                assert!(p.windows(2).all(|w| t.distance(&w[0], &w[1]) == 1));
            }
        }
    }

    #[test]
    fn bfs_radius_limit() {
        let spec = c2c3();
        let t = Tree::new(&spec);
        let ab = spec.multiply(&spec.element(Side::A, 1), &spec.element(Side::B, 1));
        let far = t.act(&spec.pow(&ab, 3), &TreeVertex::base(Side::A));
        assert_eq!(t.distance_bfs(&TreeVertex::base(Side::A), &far, 5), None);
    }
}
