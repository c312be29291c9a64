//! Cayley-ball enumeration and growth tables.
//!
//! Spheres are built level by level. With inverses adjoined, the
//! neighbours of sphere `n` lie in spheres `n-1`, `n` and `n+1`, so only
//! two spheres are kept for deduplication. Each new sphere is sorted,
//! which makes the output independent of thread count and scheduling.

use std::fmt::Write as _;
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamSpec, GenSet, NormalForm};

pub const DEFAULT_BUDGET: usize = 10_000_000;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parallelism {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon's
/// default). Without the `parallel` feature, `f` runs on the caller.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumOptions {
    pub nmax: usize,
    /// Maximum number of ball elements.
    pub budget: usize,
    /// Adjoin `S^-1`; off only for monoid experiments.
    pub with_inverses: bool,
    pub parallelism: Parallelism,
}

impl EnumOptions {
    pub fn new(nmax: usize) -> Self {
        Self { nmax, budget: DEFAULT_BUDGET, with_inverses: true, parallelism: Parallelism::default() }
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn positive_only(mut self) -> Self {
        self.with_inverses = false;
        self
    }

    pub fn parallelism(mut self, p: Parallelism) -> Self {
        self.parallelism = p;
        self
    }
}

/// Marker for a table cut short by the element budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// First level that was not completed.
    pub level: usize,
    pub budget: usize,
    /// Ball size the incomplete level would have reached.
    pub attempted: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthTable {
    /// Requested radius; `sphere.len() - 1` is the radius reached.
    pub nmax: usize,
    pub sphere: Vec<u64>,
    pub ball: Vec<u64>,
    pub level_seconds: Vec<f64>,
    pub with_inverses: bool,
    pub truncated: Option<Truncation>,
}

impl GrowthTable {
    /// Largest `n` with a complete count.
    pub fn reached(&self) -> usize {
        self.sphere.len() - 1
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }

    /// Counts only, ignoring timing.
    pub fn same_counts(&self, other: &GrowthTable) -> bool {
        self.sphere == other.sphere && self.ball == other.ball && self.truncated == other.truncated
    }
}

/// Level-by-level sphere generator.
pub struct Spheres<'a> {
    spec: &'a AmalgamSpec,
    letters: Vec<NormalForm>,
    opts: EnumOptions,
    /// The sphere before `current`; both are sorted.
    previous: Vec<NormalForm>,
    current: Vec<NormalForm>,
    /// Everything seen so far; only kept without inverses.
    seen: FxHashSet<NormalForm>,
    ball: usize,
    level: usize,
}

impl<'a> Spheres<'a> {
    pub fn new(spec: &'a AmalgamSpec, gens: &GenSet, opts: EnumOptions) -> Self {
        let letters = gens.letters(spec, opts.with_inverses);
        Self::with_letters(spec, letters, opts)
    }

    /// Uses `letters` verbatim as the step set.
    pub fn with_letters(spec: &'a AmalgamSpec, letters: Vec<NormalForm>, opts: EnumOptions) -> Self {
        let id = spec.identity();
        let mut seen = FxHashSet::default();
        if !opts.with_inverses {
            seen.insert(id.clone());
        }
        Self { spec, letters, opts, previous: Vec::new(), current: vec![id], seen, ball: 1, level: 0 }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn current(&self) -> &[NormalForm] {
        &self.current
    }

    pub fn ball_size(&self) -> usize {
        self.ball
    }

    pub fn letters(&self) -> &[NormalForm] {
        &self.letters
    }

    fn is_old(&self, y: &NormalForm) -> bool {
        if self.opts.with_inverses {
            self.current.binary_search(y).is_ok() || self.previous.binary_search(y).is_ok()
        } else {
            self.seen.contains(y)
        }
    }

    fn expand_chunk(&self, chunk: &[NormalForm]) -> Vec<NormalForm> {
        let mut out = Vec::with_capacity(chunk.len() * self.letters.len());
        for x in chunk {
            for s in &self.letters {
                let y = self.spec.multiply(x, s);
                if !self.is_old(&y) {
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn expand(&self) -> Vec<NormalForm> {
        let parts: Vec<Vec<NormalForm>> = match self.opts.parallelism {
            #[cfg(feature = "parallel")]
            Parallelism::Parallel => self.current.par_chunks(CHUNK).map(|c| self.expand_chunk(c)).collect(),
            _ => self.current.chunks(CHUNK).map(|c| self.expand_chunk(c)).collect(),
        };
        let mut next: Vec<NormalForm> = parts.into_iter().flatten().collect();
        match self.opts.parallelism {
            #[cfg(feature = "parallel")]
            Parallelism::Parallel => next.par_sort_unstable(),
            _ => next.sort_unstable(),
        }
        next.dedup();
        next
    }

    /// Computes the next sphere. `Err` carries the ball size that would
    /// exceed the budget; the state is left unchanged in that case.
    pub fn advance(&mut self) -> Result<&[NormalForm], usize> {
        let next = self.expand();
        let total = self.ball + next.len();
        if total > self.opts.budget {
            return Err(total);
        }
        if !self.opts.with_inverses {
            self.seen.extend(next.iter().cloned());
        }
        self.previous = std::mem::replace(&mut self.current, next);
        self.ball = total;
        self.level += 1;
        Ok(&self.current)
    }
}

/// Sphere and ball counts up to `opts.nmax`.
pub fn enumerate_balls(spec: &AmalgamSpec, gens: &GenSet, opts: EnumOptions) -> GrowthTable {
    let letters = gens.letters(spec, opts.with_inverses);
    enumerate_with_letters(spec, letters, opts)
}

pub fn enumerate_with_letters(spec: &AmalgamSpec, letters: Vec<NormalForm>, opts: EnumOptions) -> GrowthTable {
    enumerate_until(spec, letters, opts, |_| false)
}

/// As [`enumerate_with_letters`], but stops after any level at which
/// `done(spheres so far)` holds.
pub fn enumerate_until(
    spec: &AmalgamSpec,
    letters: Vec<NormalForm>,
    opts: EnumOptions,
    mut done: impl FnMut(&[u64]) -> bool,
) -> GrowthTable {
    let mut walker = Spheres::with_letters(spec, letters, opts);
    let mut sphere = vec![1u64];
    let mut ball = vec![1u64];
    let mut level_seconds = vec![0.0];
    let mut truncated = None;
    if opts.budget < 1 {
        truncated = Some(Truncation { level: 0, budget: opts.budget, attempted: 1 });
        return GrowthTable {
            nmax: opts.nmax,
            sphere,
            ball,
            level_seconds,
            with_inverses: opts.with_inverses,
            truncated,
        };
    }
    for n in 1..=opts.nmax {
        let t = Instant::now();
        match walker.advance() {
            Ok(s) => {
                sphere.push(s.len() as u64);
                ball.push(walker.ball_size() as u64);
                level_seconds.push(t.elapsed().as_secs_f64());
                if done(&sphere) {
                    break;
                }
            }
            Err(attempted) => {
                truncated = Some(Truncation { level: n, budget: opts.budget, attempted });
                break;
            }
        }
    }
    GrowthTable { nmax: opts.nmax, sphere, ball, level_seconds, with_inverses: opts.with_inverses, truncated }
}

/// All spheres up to `nmax` as sorted element lists.
pub fn enumerate_spheres(spec: &AmalgamSpec, gens: &GenSet, opts: EnumOptions) -> Vec<Vec<NormalForm>> {
    let mut walker = Spheres::new(spec, gens, opts);
    let mut out = vec![walker.current().to_vec()];
    for _ in 0..opts.nmax {
        match walker.advance() {
            Ok(s) => out.push(s.to_vec()),
            Err(_) => break,
        }
    }
    out
}

/// Exact word length of `g` if it is at most `nmax`.
pub fn word_length(spec: &AmalgamSpec, gens: &GenSet, g: &NormalForm, nmax: usize) -> Option<usize> {
    let mut walker = Spheres::new(spec, gens, EnumOptions::new(nmax));
    loop {
        if walker.current().binary_search(g).is_ok() {
            return Some(walker.level());
        }
        if walker.level() >= nmax || walker.advance().is_err() || walker.current().is_empty() {
            return None;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateEstimates {
    /// `ball[n]^(1/n)`; `None` at `n = 0`.
    pub root: Vec<Option<f64>>,
    /// `ball[n] / ball[n-1]`; `None` at `n = 0`.
    pub ratio: Vec<Option<f64>>,
    pub final_root: Option<f64>,
    pub final_ratio: Option<f64>,
    /// False for truncated tables or fewer than three levels.
    pub reliable: bool,
    pub note: String,
}

pub fn rate_estimates(t: &GrowthTable) -> RateEstimates {
    let root: Vec<Option<f64>> =
        t.ball.iter().enumerate().map(|(n, &b)| (n > 0).then(|| (b as f64).powf(1.0 / n as f64))).collect();
    let ratio: Vec<Option<f64>> =
        t.ball.iter().enumerate().map(|(n, &b)| (n > 0).then(|| b as f64 / t.ball[n - 1] as f64)).collect();
    let reliable = !t.is_truncated() && t.reached() >= 2;
    let mut note =
        String::from("root estimates ball(n)^(1/n) are upper bounds on the growth rate (submultiplicativity)");
    if t.is_truncated() {
        note.push_str("; table truncated by budget, estimates unreliable");
    } else if t.reached() < 2 {
        note.push_str("; fewer than 3 levels, estimates unreliable");
    }
    RateEstimates {
        final_root: root.last().copied().flatten(),
        final_ratio: ratio.last().copied().flatten(),
        root,
        ratio,
        reliable,
        note,
    }
}

/// First `(m, n)` with `ball[m+n] > ball[m] * ball[n]`.
pub fn submultiplicativity_violation(t: &GrowthTable) -> Option<(usize, usize)> {
    let len = t.ball.len();
    for m in 0..len {
        for n in m..len - m {
            if u128::from(t.ball[m + n]) > u128::from(t.ball[m]) * u128::from(t.ball[n]) {
                return Some((m, n));
            }
        }
    }
    None
}

/// CSV with columns `n,sphere,ball,root_estimate,ratio_estimate`.
pub fn to_csv(t: &GrowthTable) -> String {
    let est = rate_estimates(t);
    let mut out = String::from("n,sphere,ball,root_estimate,ratio_estimate\n");
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    for n in 0..t.sphere.len() {
        let _ = writeln!(out, "{n},{},{},{},{}", t.sphere[n], t.ball[n], fmt(est.root[n]), fmt(est.ratio[n]));
    }
    out
}
