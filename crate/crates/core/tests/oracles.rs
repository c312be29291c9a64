use std::collections::HashSet;

use amalgrowth::catalog;
use amalgrowth::growth::{enumerate_balls, EnumOptions};
use amalgrowth::spectral::{count_avoiding, default_tolerance, positive_root_from_lengths, WeightedAlphabet};
use num_bigint::BigUint;

type Mat = [i64; 4];

fn mul(x: &Mat, y: &Mat) -> Mat {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

/// Representative of `+-m` with the first non-zero entry positive.
fn projective(m: Mat) -> Mat {
    let first = m.iter().find(|&&v| v != 0).copied().unwrap_or(1);
    if first < 0 {
        m.map(|v| -v)
    } else {
        m
    }
}

/// Sphere sizes of the Cayley graph of a matrix group modulo +-1.
fn matrix_spheres(gens: &[Mat], nmax: usize) -> Vec<u64> {
    let id = [1, 0, 0, 1];
    let mut seen: HashSet<Mat> = HashSet::from([id]);
    let mut frontier = vec![id];
    let mut out = vec![1];
    for _ in 0..nmax {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens {
                let p = projective(mul(m, g));
                if seen.insert(p) {
                    next.push(p);
                }
            }
        }
        out.push(next.len() as u64);
        frontier = next;
    }
    out
}

fn spheres(name: &str, nmax: usize) -> Vec<u64> {
    let e = catalog::load(name).unwrap();
    enumerate_balls(&e.spec, &e.generators, EnumOptions::new(nmax)).sphere
}

#[test]
fn pgl2z_spheres_match_matrix_search() {
    let gens = [[0, 1, 1, 0], [-1, 0, 0, 1], [-1, 1, 0, 1]];
    assert_eq!(spheres("pgl2z", 18), matrix_spheres(&gens, 18));
}

#[test]
fn modular_group_spheres_match_matrix_search() {
    // a, b, b^-1 in PSL(2,Z)
    let gens = [[0, -1, 1, 0], [0, -1, 1, 1], [1, 1, -1, 0]];
    assert_eq!(spheres("c2*c3", 18), matrix_spheres(&gens, 18));
}

/// Spheres of `C2 * Cm` for generators `a`, `b` by counting alternating
/// syllable sequences; `b^k` costs `min(k, m - k)`.
fn dihedral_free_spheres(m: usize, nmax: usize) -> Vec<u64> {
    let costs: Vec<usize> = (1..m).map(|k| k.min(m - k)).collect();
    // ending[n] = (last syllable a, last syllable b)
    let mut ending = vec![(0u64, 0u64); nmax + 1];
    let mut out = vec![1u64];
    for n in 1..=nmax {
        let from_start_b = costs.iter().filter(|&&c| c == n).count() as u64;
        let a = if n == 1 { 1 } else { ending[n - 1].1 };
        let b = from_start_b + costs.iter().filter(|&&c| c < n).map(|&c| ending[n - c].0).sum::<u64>();
        ending[n] = (a, b);
        out.push(a + b);
    }
    out
}

#[test]
fn free_products_match_syllable_counting() {
    for (name, m) in [("c2*c2", 2), ("c2*c3", 3), ("c2*c4", 4), ("c2*c5", 5)] {
        assert_eq!(spheres(name, 16), dihedral_free_spheres(m, 16), "{name}");
    }
}

fn brute_avoiding(symbols: &[char], forbidden: &[&str], n: usize) -> u64 {
    let mut words = vec![String::new()];
    for _ in 0..n {
        words = words
            .iter()
            .flat_map(|w| symbols.iter().map(move |c| format!("{w}{c}")))
            .filter(|w| forbidden.iter().all(|f| !w.ends_with(f)))
            .collect();
    }
    words.len() as u64
}

#[test]
fn avoidance_counts_match_brute_force() {
    let alpha = WeightedAlphabet::unit("xyt").forbid(&["x", "y"]).unwrap();
    let counts = count_avoiding(&alpha, 8);
    for (n, c) in counts.iter().enumerate() {
        assert_eq!(*c, BigUint::from(brute_avoiding(&['x', 'y', 't'], &["xy"], n)), "n = {n}");
    }
}

#[test]
fn block_counts_are_compositions() {
    // Words of total weight n over blocks of weight 1 and 2 are Fibonacci.
    let counts = count_avoiding(&WeightedAlphabet::blocks(&[1, 2]).unwrap(), 20);
    let mut fib = vec![1u64, 1];
    for n in 2..=20 {
        fib.push(fib[n - 1] + fib[n - 2]);
    }
    assert_eq!(counts, fib.into_iter().map(BigUint::from).collect::<Vec<_>>());
}

fn bisect_lengths(lengths: &[usize]) -> f64 {
    let f = |x: f64| lengths.iter().map(|&l| x.powi(-(l as i32))).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (1.0, lengths.len() as f64 + 1.0);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn length_roots_match_float_bisection() {
    for lengths in [vec![1, 1], vec![1, 2], vec![2, 3], vec![1, 3, 3], vec![2, 2, 5], vec![3, 4, 4, 7]] {
        let root = positive_root_from_lengths(&lengths, &default_tolerance()).unwrap();
        assert!(root.enclosure.contains_f64(bisect_lengths(&lengths), 1e-12), "{lengths:?}");
    }
}
