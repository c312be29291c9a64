use std::collections::VecDeque;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vertex::{Tree, TreeVertex};
use crate::amalgam::{NormalForm, Side};

/// Default radius `2 * (max syllable length) + 4`.
pub fn default_radius<'a>(elements: impl IntoIterator<Item = &'a NormalForm>) -> usize {
    2 * elements.into_iter().map(NormalForm::len).max().unwrap_or(0) + 4
}

/// Upper bound on vertices visited by ball and fixed-set searches.
pub const VERTEX_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Elliptic,
    Hyperbolic,
}

/// Displacement minimisation by descent inside the ball around base `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementSearch {
    pub min_displacement: usize,
    pub at: TreeVertex,
    pub steps: usize,
    /// Descent stopped on the ball boundary with a smaller value outside.
    pub hit_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub tau: usize,
    /// A fixed vertex, or two axis vertices `v`, `g v`.
    pub witness: Vec<TreeVertex>,
    pub core_syllables: usize,
    pub conjugator: NormalForm,
    pub radius: usize,
    pub search: DisplacementSearch,
    /// `max(0, d(v, g^2 v) - d(v, g v))` at base `A`.
    pub tau_from_square: usize,
    /// Both computations agree and the witness lies within the radius.
    pub verified: bool,
}

impl Classification {
    pub fn is_elliptic(&self) -> bool {
        self.verdict == Verdict::Elliptic
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.verdict == Verdict::Hyperbolic
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("element is hyperbolic (translation length {tau}); it has no fixed vertex")]
    Hyperbolic { tau: usize },
    #[error("element is elliptic; it has no axis")]
    Elliptic,
}

impl<'a> Tree<'a> {
    /// Elliptic/hyperbolic verdict from cyclic reduction, cross-checked by
    /// displacement descent within `radius` of base `A`.
    pub fn classify(&self, g: &NormalForm, radius: usize) -> Classification {
        let spec = self.spec();
        let (core, conj) = spec.cyclic_reduce(g);
        let base_a = TreeVertex::base(Side::A);
        let (verdict, tau, witness) = if core.len() <= 1 {
            let side = core.syllables.first().map_or(Side::A, |s| s.side);
            (Verdict::Elliptic, 0, vec![self.vertex_of(&conj, side)])
        } else {
            let v = self.vertex_of(&conj, Side::A);
            let gv = self.act(g, &v);
            (Verdict::Hyperbolic, core.len(), vec![v, gv])
        };
        let search = self.descend(g, radius);
        let d1 = self.displacement(g, &base_a);
        let d2 = self.distance(&base_a, &self.act(&spec.multiply(g, g), &base_a));
        let tau_from_square = d2.saturating_sub(d1);
        let witness_ok = match verdict {
            Verdict::Elliptic => self.act(g, &witness[0]) == witness[0],
            Verdict::Hyperbolic => self.distance(&witness[0], &witness[1]) == tau,
        };
        let verified =
            witness_ok && search.min_displacement == tau && tau_from_square == tau && witness[0].depth() <= radius;
        Classification {
            verdict,
            tau,
            witness,
            core_syllables: core.len(),
            conjugator: conj,
            radius,
            search,
            tau_from_square,
            verified,
        }
    }

    /// Greedy descent of `v -> d(v, g v)` from base `A`, restricted to the
    /// ball of `radius`. The displacement function is convex along
    /// geodesics, so a local minimum inside the ball is global.
    pub fn descend(&self, g: &NormalForm, radius: usize) -> DisplacementSearch {
        let mut at = TreeVertex::base(Side::A);
        let mut best = self.displacement(g, &at);
        let mut steps = 0;
        let mut hit_boundary = false;
        loop {
            let mut improved = None;
            for n in self.neighbors(&at) {
                let d = self.displacement(g, &n);
                if d < best {
                    if n.depth() > radius {
                        hit_boundary = true;
                        continue;
                    }
                    best = d;
                    improved = Some(n);
                }
            }
            match improved {
                Some(n) => {
                    at = n;
                    steps += 1;
                }
                None => break,
            }
        }
        DisplacementSearch { min_displacement: best, at, steps, hit_boundary }
    }

    /// Minimum displacement over every vertex of the ball; an oracle for
    /// [`Tree::descend`].
    pub fn min_displacement_exhaustive(&self, g: &NormalForm, radius: usize) -> (usize, TreeVertex) {
        self.ball(&TreeVertex::base(Side::A), radius, VERTEX_CAP)
            .into_iter()
            .map(|v| (self.displacement(g, &v), v))
            .min()
            .expect("ball contains its centre")
    }

    /// Fixed vertices within `radius` of the classification witness.
    pub fn fixed_set(&self, g: &NormalForm, radius: usize) -> Result<Vec<TreeVertex>, TreeError> {
        let c = self.classify(g, radius);
        if c.is_hyperbolic() {
            return Err(TreeError::Hyperbolic { tau: c.tau });
        }
        Ok(self.fixed_component(std::slice::from_ref(g), &c.witness[0], radius))
    }

    /// Vertices within `radius` of `start` fixed by every element of
    /// `group`, reached through fixed vertices.
    pub fn fixed_component(&self, group: &[NormalForm], start: &TreeVertex, radius: usize) -> Vec<TreeVertex> {
        let fixed = |v: &TreeVertex| group.iter().all(|g| self.act(g, v) == *v);
        if !fixed(start) {
            return Vec::new();
        }
        let mut seen = FxHashSet::default();
        seen.insert(start.clone());
        let mut out = vec![start.clone()];
        let mut queue = VecDeque::from([(start.clone(), 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius || out.len() >= VERTEX_CAP {
                continue;
            }
            for n in self.neighbors(&v) {
                if !seen.contains(&n) && fixed(&n) {
                    seen.insert(n.clone());
                    out.push(n.clone());
                    queue.push_back((n, d + 1));
                }
            }
        }
        out
    }

    /// The invariant line of a hyperbolic element.
    pub fn axis(&self, g: &NormalForm, radius: usize) -> Result<Axis, TreeError> {
        let c = self.classify(g, radius);
        if c.is_elliptic() {
            return Err(TreeError::Elliptic);
        }
        Ok(Axis { element: g.clone(), inverse: self.spec().invert(g), tau: c.tau, anchor: c.witness[0].clone() })
    }

    /// Axis vertices within `radius` of base `A`, ordered in the direction
    /// of translation.
    pub fn axis_segment(&self, g: &NormalForm, radius: usize) -> Result<Vec<TreeVertex>, TreeError> {
        Ok(self.axis(g, radius)?.segment(self, &TreeVertex::base(Side::A), radius))
    }

    /// Shortest path between two convex vertex sets, given a member of each
    /// and membership predicates.
    pub fn bridge(
        &self,
        p: &TreeVertex,
        q: &TreeVertex,
        in_first: impl Fn(&TreeVertex) -> bool,
        in_second: impl Fn(&TreeVertex) -> bool,
    ) -> Bridge {
        let path = self.path(p, q);
        let last_first = path.iter().rposition(&in_first).expect("p lies in the first set");
        let first_second = path.iter().position(&in_second).expect("q lies in the second set");
        if first_second <= last_first {
            Bridge::Overlap(path[first_second].clone())
        } else {
            Bridge::Path(path[last_first..=first_second].to_vec())
        }
    }

    /// Checks `tau(x y^-1) = 2 d(Fix x, Fix y)` and that the axis of
    /// `x y^-1` contains the bridge between the fixed sets and its images
    /// under `x` and `y`.
    pub fn elliptic_product_check(&self, x: &NormalForm, y: &NormalForm, radius: usize) -> ProductCheck {
        let (cx, cy) = (self.classify(x, radius), self.classify(y, radius));
        if cx.is_hyperbolic() || cy.is_hyperbolic() {
            return ProductCheck::NotApplicable { reason: "both elements must be elliptic".into() };
        }
        let fixed_x = |v: &TreeVertex| self.act(x, v) == *v;
        let fixed_y = |v: &TreeVertex| self.act(y, v) == *v;
        let path = match self.bridge(&cx.witness[0], &cy.witness[0], fixed_x, fixed_y) {
            Bridge::Overlap(v) => {
                return ProductCheck::NotApplicable { reason: format!("fixed sets intersect at {v}") };
            }
            Bridge::Path(p) => p,
        };
        let d = path.len() - 1;
        let h = self.spec().multiply(x, &self.spec().invert(y));
        let ch = self.classify(&h, radius.max(2 * h.len() + 4));
        let mut off_axis = Vec::new();
        for v in path
            .iter()
            .chain(path.iter().map(|v| self.act(x, v)).collect::<Vec<_>>().iter())
            .chain(path.iter().map(|v| self.act(y, v)).collect::<Vec<_>>().iter())
        {
            if ch.is_elliptic() || self.displacement(&h, v) != ch.tau {
                off_axis.push(v.clone());
            }
        }
        let passed = ch.is_hyperbolic() && ch.tau == 2 * d && off_axis.is_empty();
        ProductCheck::Checked { fixed_distance: d, tau: ch.tau, bridge: path, off_axis, passed }
    }

    /// A line preserved by every element, searched among axes of the
    /// elements and of products `x y^-1` of elliptic pairs with disjoint
    /// fixed sets.
    pub fn common_invariant_line(&self, elements: &[NormalForm], radius: usize) -> Option<InvariantLine> {
        let classes: Vec<Classification> = elements.iter().map(|g| self.classify(g, radius)).collect();
        let candidate = if let Some(i) = classes.iter().position(Classification::is_hyperbolic) {
            Some((elements[i].clone(), format!("axis of element {i}")))
        } else {
            let mut found = None;
            'outer: for i in 0..elements.len() {
                for j in i + 1..elements.len() {
                    let (x, y) = (&elements[i], &elements[j]);
                    let fx = |v: &TreeVertex| self.act(x, v) == *v;
                    let fy = |v: &TreeVertex| self.act(y, v) == *v;
                    if let Bridge::Path(_) = self.bridge(&classes[i].witness[0], &classes[j].witness[0], fx, fy) {
                        let h = self.spec().multiply(x, &self.spec().invert(y));
                        found = Some((h, format!("axis of element {i} times inverse of element {j}")));
                        break 'outer;
                    }
                }
            }
            found
        };
        let (h, source) = candidate?;
        let axis = self.axis(&h, radius).ok()?;
        let segment = axis.segment(self, &TreeVertex::base(Side::A), radius);
        if segment.is_empty() {
            return None;
        }
        let preserved = elements.iter().all(|g| segment.iter().all(|v| axis.contains(self, &self.act(g, v))));
        preserved.then_some(InvariantLine { element: h, tau: axis.tau, source, segment, radius })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bridge {
    /// The sets meet; a common vertex.
    Overlap(TreeVertex),
    /// Shortest path from the first set to the second.
    Path(Vec<TreeVertex>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProductCheck {
    NotApplicable { reason: String },
    Checked { fixed_distance: usize, tau: usize, bridge: Vec<TreeVertex>, off_axis: Vec<TreeVertex>, passed: bool },
}

impl ProductCheck {
    pub fn passed(&self) -> bool {
        matches!(self, ProductCheck::Checked { passed: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantLine {
    pub element: NormalForm,
    pub tau: usize,
    pub source: String,
    pub segment: Vec<TreeVertex>,
    pub radius: usize,
}

/// The axis of a hyperbolic element `g`: the vertices `v` with
/// `d(v, g v) = tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub element: NormalForm,
    pub inverse: NormalForm,
    pub tau: usize,
    pub anchor: TreeVertex,
}

impl Axis {
    pub fn contains(&self, tree: &Tree<'_>, v: &TreeVertex) -> bool {
        tree.displacement(&self.element, v) == self.tau
    }

    /// Closest axis vertex to `v`.
    pub fn project(&self, tree: &Tree<'_>, v: &TreeVertex) -> TreeVertex {
        let gv = tree.act(&self.element, v);
        let d = tree.distance(v, &gv);
        tree.path(v, &gv)[(d - self.tau) / 2].clone()
    }

    pub fn distance_to(&self, tree: &Tree<'_>, v: &TreeVertex) -> usize {
        (tree.displacement(&self.element, v) - self.tau) / 2
    }

    /// Axis neighbour of an axis vertex `v` in the translation direction.
    pub fn forward(&self, tree: &Tree<'_>, v: &TreeVertex) -> TreeVertex {
        let gv = tree.act(&self.element, v);
        tree.path(v, &gv)[1].clone()
    }

    pub fn backward(&self, tree: &Tree<'_>, v: &TreeVertex) -> TreeVertex {
        let hv = tree.act(&self.inverse, v);
        tree.path(v, &hv)[1].clone()
    }

    /// Axis vertices within `radius` of `center`, in translation order.
    pub fn segment(&self, tree: &Tree<'_>, center: &TreeVertex, radius: usize) -> Vec<TreeVertex> {
        let p = self.project(tree, center);
        if tree.distance(center, &p) > radius {
            return Vec::new();
        }
        let mut back = Vec::new();
        let mut v = p.clone();
        loop {
            v = self.backward(tree, &v);
            if tree.distance(center, &v) > radius {
                break;
            }
            back.push(v.clone());
        }
        back.reverse();
        back.push(p.clone());
        let mut v = p;
        loop {
            v = self.forward(tree, &v);
            if tree.distance(center, &v) > radius {
                break;
            }
            back.push(v.clone());
        }
        back
    }

    /// The axis vertex `steps` positions from the axis vertex `v`
    /// (negative values go backwards).
    pub fn walk(&self, tree: &Tree<'_>, v: &TreeVertex, steps: i64) -> TreeVertex {
        let mut w = v.clone();
        for _ in 0..steps.unsigned_abs() {
            w = if steps > 0 { self.forward(tree, &w) } else { self.backward(tree, &w) };
        }
        w
    }
}
