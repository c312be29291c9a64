//! The acceptance suite: each criterion recomputes its quantities and
//! reports what it measured.

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::amalgam::{Alphabet, AmalgamSpec, GenSet, NormalForm, Side};
use crate::catalog::{self, CatalogEntry};
use crate::growth::{enumerate_balls, to_csv, with_threads, word_length, EnumOptions, Parallelism};
use crate::random;
use crate::rate::{exact_rate, exact_rate_early, rate_from_spheres, RateReport};
use crate::spectral::{
    count_avoiding, largest_positive_root, lpv_bound_finite, positive_root_from_lengths, tolerance_from_f64, Enclosure,
    Polynomial, WeightedAlphabet,
};
use crate::tree::{certify_free_monoid, default_radius, replay, CertifyOptions, ProductCheck, Tree};

pub const GOLDEN: f64 = 1.618_033_988_749_895;
pub const PLASTIC: f64 = 1.324_717_957_244_746;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Caps every criterion's enumeration depth; `None` uses each
    /// criterion's stated depth.
    pub nmax: Option<usize>,
    pub seed: u64,
    /// Ball-size budget for each enumeration.
    pub budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { nmax: None, seed: 2024, budget: 2_000_000 }
    }
}

impl SuiteConfig {
    fn depth(&self, stated: usize) -> usize {
        self.nmax.map_or(stated, |n| n.min(stated))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub seconds: f64,
}

type Outcome = (bool, String);

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "c2*c3 on {a, b}: golden-ratio recurrence"),
    (2, "pgl2z: sphere counts equal normal-form counts, recurrences, plastic root"),
    (3, "roots from element lengths"),
    (4, "words avoiding xy over {x, y, t}"),
    (5, "block-concatenation recurrences"),
    (6, "tree classification, collinearity and elliptic products"),
    (7, "random generating sets of free products grow at least at the golden ratio"),
    (8, "free-monoid certificate in pgl2z with lengths (2, 3)"),
    (9, "LPV bound"),
    (10, "growth CSV independent of thread count"),
];

pub fn run(config: &SuiteConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_one(id, config)).collect()
}

pub fn run_one(id: u32, config: &SuiteConfig) -> CriterionResult {
    let start = Instant::now();
    let (passed, measured) = match id {
        1 => criterion_1(config),
        2 => criterion_2(config),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(config),
        7 => criterion_7(config),
        8 => criterion_8(config),
        9 => criterion_9(config),
        10 => criterion_10(config),
        _ => (false, format!("no criterion {id}")),
    };
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    CriterionResult { id, name, passed, measured, seconds: start.elapsed().as_secs_f64() }
}

fn tol(x: f64) -> BigRational {
    tolerance_from_f64(x)
}

fn rate(entry: &CatalogEntry, gens: &GenSet, nmax: usize, config: &SuiteConfig) -> RateReport {
    exact_rate_early(&entry.spec, gens, EnumOptions::new(nmax).budget(config.budget), &tol(1e-12))
}

fn describe(r: &RateReport) -> String {
    let rec = r.recurrence.as_ref().map_or("none".to_string(), |c| c.characteristic().to_string());
    let root =
        r.root.as_ref().map_or_else(|| r.failure.clone().unwrap_or_default(), |e| format!("{:.10}", e.mid_f64()));
    format!("levels {}, recurrence {rec}, root {root}", r.table.reached())
}

fn criterion_1(config: &SuiteConfig) -> Outcome {
    let entry = catalog::load("c2*c3").expect("catalog");
    let opts = EnumOptions::new(config.depth(25)).budget(config.budget);
    let r = exact_rate(&entry.spec, &entry.generators, opts, &tol(1e-12));
    let golden = Polynomial::from_i64(&[-1, -1, 1]);
    let poly_ok = r.recurrence.as_ref().is_some_and(|c| c.characteristic() == golden);
    let root_ok = r.root.as_ref().is_some_and(|e| e.contains_f64(GOLDEN, 1e-9));
    (poly_ok && root_ok, format!("{}; expected z^2 - z - 1 and 1.6180339887", describe(&r)))
}

fn criterion_2(config: &SuiteConfig) -> Outcome {
    let entry = catalog::load("pgl2z").expect("catalog");
    let n = config.depth(20);
    let counts = catalog::plastic_enumerate(n);
    let table = enumerate_balls(&entry.spec, &entry.generators, EnumOptions::new(n).budget(config.budget));
    let counts_ok = table.reached() == n && table.sphere == counts.words;
    let injective = catalog::check_injective(&entry, n.min(16)).is_ok();
    let c_fail = counts.c_recurrence_failures(4);
    let w_fail = counts.w_recurrence_failures(1, 3);
    let w2_fail = counts.w_recurrence_failures(2, 3);
    let (_, root) = rate_from_spheres(&table.sphere, &tol(1e-10));
    let alpha = Polynomial::from_i64(&[-1, -1, 0, 1]);
    let root_ok = root.as_ref().is_ok_and(|e| e.brackets_root_of(&alpha) && e.width_f64() <= 1e-9);
    let measured = format!(
        "spheres match normal forms to n={n}: {counts_ok}; forms injective: {injective}; \
         C(n)=C(n-2)+C(n-3) fails at {c_fail:?}; W(n)=C(n)+C(n-1)+C(n-2) fails at {w_fail:?}; \
         W(n)=C(n)+2C(n-1)+C(n-2) fails at {w2_fail:?}; root {}",
        root.as_ref().map_or_else(|e| e.clone(), |e| format!("{e}"))
    );
    (counts_ok && injective && c_fail.is_empty() && w_fail.is_empty() && root_ok, measured)
}

fn criterion_3() -> Outcome {
    let cases: [(&[usize], &[i64]); 3] =
        [(&[1, 2], &[-1, -1, 1]), (&[2, 3], &[-1, -1, 0, 1]), (&[1, 3, 3], &[-2, 0, -1, 1])];
    let mut ok = true;
    let mut parts = Vec::new();
    for (lengths, expected) in cases {
        let p = Polynomial::from_i64(expected);
        match positive_root_from_lengths(lengths, &tol(1e-12)) {
            Ok(r) => {
                let good = r.enclosure.width() <= tol(1e-12) && r.enclosure.brackets_root_of(&p);
                ok &= good;
                parts.push(format!(
                    "{lengths:?} -> {:.12} ({})",
                    r.enclosure.mid_f64(),
                    if good { "ok" } else { "bad" }
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{lengths:?} -> {e}"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let alpha = WeightedAlphabet::unit("xyt").forbid(&["x", "y"]).expect("valid");
    let w = count_avoiding(&alpha, 31);
    let bad: Vec<usize> = (2..=30).filter(|&n| &w[n + 1] + &w[n - 1] != &w[n] * 3u32).collect();
    let seq: Vec<u64> = w.iter().map(|x| x.try_into().expect("fits")).collect();
    let (_, root) = rate_from_spheres(&seq, &tol(1e-12));
    let target = Polynomial::from_i64(&[1, -3, 1]);
    let root_ok = root.as_ref().is_ok_and(|e| e.brackets_root_of(&target));
    let measured = format!(
        "W(n+1)=3W(n)-W(n-1) fails at {bad:?}; rate {}",
        root.as_ref().map_or_else(|e| e.clone(), |e| format!("{:.12}", e.mid_f64()))
    );
    (bad.is_empty() && root_ok, measured)
}

fn check_recurrence(w: &[BigUint], coeffs: &[(usize, u32)]) -> Vec<usize> {
    let lag = coeffs.iter().map(|c| c.0).max().unwrap_or(0);
    (lag..w.len())
        .filter(|&n| {
            let rhs: BigUint = coeffs.iter().map(|&(k, c)| &w[n - k] * c).sum();
            rhs != w[n]
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let a = count_avoiding(&WeightedAlphabet::blocks(&[2, 2, 3, 3]).expect("valid"), 40);
    let b = count_avoiding(&WeightedAlphabet::blocks(&[2, 2, 3]).expect("valid"), 40);
    let fail_a = check_recurrence(&a, &[(2, 2), (3, 2)]);
    let fail_b = check_recurrence(&b, &[(2, 2), (3, 1)]);
    let cubic = Polynomial::from_i64(&[-1, -2, 0, 1]);
    let factor = cubic.exact_div(&Polynomial::from_i64(&[1, 1]));
    let factored = factor.as_ref() == Some(&Polynomial::from_i64(&[-1, -1, 1]));
    let root = largest_positive_root(&cubic, &tol(1e-12)).map(|r| r.0);
    let root_ok = root.as_ref().is_ok_and(|e| e.contains_f64(GOLDEN, 1e-12));
    let measured = format!(
        "{{2,2,3,3}} fails at {fail_a:?}; {{2,2,3}} fails at {fail_b:?}; (z+1) divides z^3-2z-1: {factored}; root {}",
        root.as_ref().map_or_else(|e| e.to_string(), |e| format!("{:.12}", e.mid_f64()))
    );
    (fail_a.is_empty() && fail_b.is_empty() && factored && root_ok, measured)
}

/// Classification cross-check, collinearity and even translation lengths
/// for one element.
fn tree_sample(tree: &Tree<'_>, g: &NormalForm) -> Result<bool, String> {
    let radius = default_radius(std::slice::from_ref(g));
    let c = tree.classify(g, radius);
    if c.search.min_displacement != c.tau || c.tau_from_square != c.tau {
        return Err(format!("paths disagree on {}", tree.spec().display(g)));
    }
    if !c.tau.is_multiple_of(2) {
        return Err(format!("odd translation length {}", c.tau));
    }
    if c.is_hyperbolic() {
        let v = &c.witness[0];
        let gv = tree.act(g, v);
        let ggv = tree.act(g, &gv);
        let (d1, d2, d3) = (tree.distance(v, &gv), tree.distance(&gv, &ggv), tree.distance(v, &ggv));
        if d1 != c.tau || d2 != c.tau || d3 != 2 * c.tau {
            return Err(format!("not collinear: {d1} {d2} {d3} with tau {}", c.tau));
        }
    }
    Ok(c.is_hyperbolic())
}

fn criterion_6(config: &SuiteConfig) -> Outcome {
    let mut rng = random::rng(config.seed);
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["c2*c3", "c2*c4", "pgl2z"] {
        let entry = catalog::load(name).expect("catalog");
        let tree = Tree::new(&entry.spec);
        let mut hyperbolic = 0;
        let mut errors = Vec::new();
        for _ in 0..200 {
            let g = random::element(&entry.spec, &mut rng, 6);
            match tree_sample(&tree, &g) {
                Ok(h) => hyperbolic += usize::from(h),
                Err(e) => errors.push(e),
            }
        }
        let (mut pairs, mut passed, mut attempts) = (0, 0, 0);
        while pairs < 200 && attempts < 5000 {
            attempts += 1;
            let x = random::elliptic(&entry.spec, &mut rng, 3);
            let y = random::elliptic(&entry.spec, &mut rng, 3);
            let radius = default_radius(&[x.clone(), y.clone()]);
            match tree.elliptic_product_check(&x, &y, radius) {
                ProductCheck::NotApplicable { .. } => continue,
                check => {
                    pairs += 1;
                    passed += usize::from(check.passed());
                }
            }
        }
        let good = errors.is_empty() && pairs == 200 && passed == pairs;
        ok &= good;
        parts.push(format!(
            "{name}: 200 samples ({hyperbolic} hyperbolic, {} disagreements), elliptic pairs {passed}/{pairs}{}",
            errors.len(),
            errors.first().map_or(String::new(), |e| format!(" [{e}]"))
        ));
    }
    (ok, parts.join("; "))
}

/// Generating sets obtained from the default generators by one Nielsen
/// move `s_i -> u s_i v`, where `u`, `v` are freely reduced words in the
/// other generators with `1 <= |u| + |v| <= 2`. Every generator has word
/// length at most 3 and each set generates the group.
pub fn seeded_generating_sets(entry: &CatalogEntry, count: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = random::rng(seed);
    let alpha = entry.alphabet();
    let names = alpha.names().to_vec();
    let k = names.len();
    let letters = |i: usize| -> Vec<String> {
        let g = &alpha.elements()[i];
        if entry.spec.invert(g) == *g {
            vec![names[i].clone()]
        } else {
            vec![names[i].clone(), format!("{}^-1", names[i])]
        }
    };
    let value = |w: &str| entry.spec.reduce(alpha, &alpha.parse_word(w).expect("generator letters"));
    let reduced = |w: &[String]| w.windows(2).all(|p| !entry.spec.is_identity(&value(&p.join(" "))));
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 10_000 {
        attempts += 1;
        let i = rng.gen_range(0..k);
        let pool: Vec<String> = (0..k).filter(|&j| j != i).flat_map(letters).collect();
        let extra = rng.gen_range(1..=2);
        let before = rng.gen_range(0..=extra);
        let pick = |rng: &mut random::SeededRng, n: usize| -> Vec<String> {
            (0..n).map(|_| pool.choose(rng).expect("at least two generators").clone()).collect()
        };
        let (u, v) = (pick(&mut rng, before), pick(&mut rng, extra - before));
        let word: Vec<String> = u.into_iter().chain([names[i].clone()]).chain(v).collect();
        if !reduced(&word) {
            continue;
        }
        let mut words = names.clone();
        words[i] = word.join(" ");
        if generating_set(entry, &words).is_some() && !out.contains(&words) {
            out.push(words);
        }
    }
    out
}

/// The generating set spelled by `words`, if its elements are distinct
/// and non-trivial.
pub fn generating_set(entry: &CatalogEntry, words: &[String]) -> Option<GenSet> {
    let mut alpha = Alphabet::new();
    for w in words {
        let g = entry.spec.reduce(entry.alphabet(), &entry.alphabet().parse_word(w).ok()?);
        if entry.spec.is_identity(&g) || alpha.elements().contains(&g) {
            return None;
        }
        alpha.push(w.replace(' ', ""), g).ok()?;
    }
    GenSet::new(&entry.spec, alpha).ok()
}

fn criterion_7(config: &SuiteConfig) -> Outcome {
    let n = config.depth(30);
    let floor = GOLDEN - 1e-9;
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["c2*c4", "c2*c5", "c2*(c2xc2)"] {
        let entry = catalog::load(name).expect("catalog");
        let sets = seeded_generating_sets(&entry, 10, config.seed ^ 0x5eed);
        let mut min_root = f64::INFINITY;
        let mut failures = Vec::new();
        for words in &sets {
            let gens = generating_set(&entry, words).expect("checked when drawn");
            let r = rate(&entry, &gens, n, config);
            match &r.root {
                Some(e) if e.lo_f64() >= floor => min_root = min_root.min(e.lo_f64()),
                _ => failures.push(format!("{{{}}}: {}", words.join(", "), describe(&r))),
            }
        }
        ok &= failures.is_empty() && sets.len() == 10;
        parts.push(format!(
            "{name}: {} sets, smallest root {:.10}{}",
            sets.len(),
            min_root,
            failures.first().map_or(String::new(), |f| format!(", failing {f}"))
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_8(config: &SuiteConfig) -> Outcome {
    let entry = catalog::load("pgl2z").expect("catalog");
    let spec: &AmalgamSpec = &entry.spec;
    let alpha = entry.alphabet();
    let word = |w: &str| spec.reduce(alpha, &alpha.parse_word(w).expect("valid"));
    let elements = [word("b c"), word("a b c")];
    let lengths: Vec<Option<usize>> =
        elements.iter().map(|g| word_length(spec, &entry.generators, g, config.depth(8))).collect();
    let tree = Tree::new(spec);
    let opts = CertifyOptions::new(default_radius(&elements));
    let cert = certify_free_monoid(&tree, &elements, &opts);
    let Ok(cert) = cert else {
        return (false, format!("no certificate: {}", cert.unwrap_err()));
    };
    let replayed = replay(spec, &cert).is_ok();
    let Some(lengths) = lengths.into_iter().collect::<Option<Vec<usize>>>() else {
        return (false, "word lengths not found".into());
    };
    let bound = positive_root_from_lengths(&lengths, &tol(1e-12));
    let bound_ok = bound.as_ref().is_ok_and(|b| b.enclosure.contains_f64(PLASTIC, 1e-12));
    let measured = format!(
        "certificate with inverted {:?}, replay {}, lengths {lengths:?}, bound {}",
        cert.inverted,
        if replayed { "ok" } else { "failed" },
        bound.as_ref().map_or_else(|e| e.to_string(), |b| format!("{:.12}", b.enclosure.mid_f64()))
    );
    (replayed && lengths == [2, 3] && bound_ok, measured)
}

fn criterion_9(config: &SuiteConfig) -> Outcome {
    let b = lpv_bound_finite(2, 7).expect("valid");
    let exact = b == BigRational::new(12.into(), 7.into());
    let above = b > BigRational::new(5.into(), 3.into());
    let mut ok = exact && above;
    let mut parts = vec![format!("lpv(2,7) = {b}")];
    for entry in catalog::all().into_iter().filter(|e| e.spec.is_free_product()) {
        let (oa, ob) = (entry.spec.factor(Side::A).order() as u64, entry.spec.factor(Side::B).order() as u64);
        let bound = lpv_bound_finite(oa, ob).expect("nontrivial factors");
        for e in entry.expected.iter().filter(|e| e.rate_polynomial.is_some()) {
            let r = rate(&entry, &entry.generators_for(e), config.depth(30), config);
            let on_bound = |root: &Enclosure| {
                root.contains(&bound)
                    && r.recurrence.as_ref().is_some_and(|c| c.characteristic().eval(&bound).is_zero())
            };
            let good = r.root.as_ref().is_some_and(|root| root.lo >= bound || on_bound(root));
            ok &= good;
            parts.push(format!(
                "{} {}: rate {} vs {bound}",
                entry.name,
                e.generators.as_ref().map_or("default".to_string(), |g| format!("{{{}}}", g.join(", "))),
                r.root_f64().map_or("none".to_string(), |x| format!("{x:.6}")),
            ));
        }
    }
    (ok, parts.join("; "))
}

/// The growth CSV for `pgl2z` computed on a pool of `threads` workers.
pub fn pgl2z_csv(nmax: usize, threads: usize) -> String {
    let entry = catalog::load("pgl2z").expect("catalog");
    let opts = EnumOptions::new(nmax).parallelism(Parallelism::Parallel);
    with_threads(threads, || to_csv(&enumerate_balls(&entry.spec, &entry.generators, opts)))
}

fn criterion_10(config: &SuiteConfig) -> Outcome {
    let n = config.depth(40);
    let one = pgl2z_csv(n, 1);
    let four = pgl2z_csv(n, 4);
    let same = one == four;
    (same, format!("nmax {n}, {} bytes, 1 vs 4 threads identical: {same}", one.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generating_sets_are_reproducible() {
        let e = catalog::load("c2*c4").unwrap();
        let a = seeded_generating_sets(&e, 10, 1);
        assert_eq!(a, seeded_generating_sets(&e, 10, 1));
        assert_eq!(a.len(), 10);
        for words in &a {
            for w in words {
                assert!(w.split_whitespace().count() <= 3, "{w}");
            }
        }
    }

    #[test]
    fn small_depth_degrades_gracefully() {
        let cfg = SuiteConfig { nmax: Some(3), ..SuiteConfig::default() };
        for id in [1, 2, 7] {
            let r = run_one(id, &cfg);
            assert!(!r.passed, "{id}: {}", r.measured);
        }
    }
}
