use amalgrowth::amalgam::Letter;
use amalgrowth::catalog::{self, CatalogEntry};
use amalgrowth::growth::{enumerate_spheres, word_length, EnumOptions};
use amalgrowth::random;
use amalgrowth::spectral::{fit_recurrence, Recurrence};
use amalgrowth::tree::{certify_free_monoid, replay, CertifyOptions, Tree};
use amalgrowth::{NormalForm, Side, Word};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;

const SPECS: [&str; 5] = ["c2*c3", "c2*c5", "c2*(c2xc2)", "pgl2z", "gl2z"];

type Mat = [[i64; 2]; 2];

fn mul(x: Mat, y: Mat) -> Mat {
    let mut z = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

fn projectively_equal(x: Mat, y: Mat) -> bool {
    x == y || x == [[-y[0][0], -y[0][1]], [-y[1][0], -y[1][1]]]
}

fn adj(m: Mat) -> Mat {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

// Faithful matrix images: a, b, c in PGL(2,Z); a, b in PSL(2,Z).
const PGL: [Mat; 3] = [[[0, 1], [1, 0]], [[-1, 0], [0, 1]], [[-1, 1], [0, 1]]];
const PSL: [Mat; 2] = [[[0, -1], [1, 0]], [[0, -1], [1, 1]]];

fn matrix(images: &[Mat], w: &Word) -> Mat {
    w.letters.iter().fold([[1, 0], [0, 1]], |acc, l| {
        let m = images[l.generator];
        // Determinant is +-1, so the adjugate is the inverse up to sign.
        mul(acc, if l.inverse { adj(m) } else { m })
    })
}

fn word(letters: &[(usize, bool)]) -> Word {
    Word { letters: letters.iter().map(|&(generator, inverse)| Letter { generator, inverse }).collect() }
}

fn letters(gens: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0..gens, any::<bool>()), 0..14)
}

fn load(i: usize) -> CatalogEntry {
    catalog::load(SPECS[i]).unwrap()
}

fn well_formed(entry: &CatalogEntry, g: &NormalForm) -> bool {
    let spec = &entry.spec;
    let alternates = g.syllables.windows(2).all(|p| p[0].side != p[1].side);
    let reps = g.syllables.iter().all(|s| {
        let e = s.elem as usize;
        e != spec.factor(s.side).identity() && spec.transversal(s.side).reps().contains(&e)
    });
    alternates && reps && (g.head as usize) < spec.amalgamated().order()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pgl2z_normal_forms_agree_with_matrices(u in letters(3), v in letters(3)) {
        let e = catalog::load("pgl2z").unwrap();
        let (wu, wv) = (word(&u), word(&v));
        let (gu, gv) = (e.spec.reduce(e.alphabet(), &wu), e.spec.reduce(e.alphabet(), &wv));
        prop_assert!(well_formed(&e, &gu));
        prop_assert_eq!(gu == gv, projectively_equal(matrix(&PGL, &wu), matrix(&PGL, &wv)));
        prop_assert_eq!(e.spec.is_identity(&gu), projectively_equal(matrix(&PGL, &wu), [[1, 0], [0, 1]]));
    }

    #[test]
    fn modular_group_normal_forms_agree_with_matrices(u in letters(2), v in letters(2)) {
        let e = catalog::load("c2*c3").unwrap();
        let (wu, wv) = (word(&u), word(&v));
        let (gu, gv) = (e.spec.reduce(e.alphabet(), &wu), e.spec.reduce(e.alphabet(), &wv));
        prop_assert_eq!(gu == gv, projectively_equal(matrix(&PSL, &wu), matrix(&PSL, &wv)));
    }

    #[test]
    fn reduction_is_a_homomorphism(i in 0..SPECS.len(), u in letters(3), v in letters(3)) {
        let e = load(i);
        let n = e.alphabet().len();
        let clip = |w: &[(usize, bool)]| w.iter().map(|&(g, inv)| (g % n, inv)).collect::<Vec<_>>();
        let (wu, wv) = (word(&clip(&u)), word(&clip(&v)));
        let spec = &e.spec;
        let whole = spec.reduce(e.alphabet(), &wu.concat(&wv));
        prop_assert_eq!(&whole, &spec.multiply(&spec.reduce(e.alphabet(), &wu), &spec.reduce(e.alphabet(), &wv)));
        prop_assert!(well_formed(&e, &whole));
    }

    #[test]
    fn group_axioms(i in 0..SPECS.len(), seed in any::<u64>()) {
        let e = load(i);
        let spec = &e.spec;
        let mut rng = random::rng(seed);
        let (x, y, z) = (random::element(spec, &mut rng, 6), random::element(spec, &mut rng, 6), random::element(spec, &mut rng, 6));
        prop_assert_eq!(spec.multiply(&spec.multiply(&x, &y), &z), spec.multiply(&x, &spec.multiply(&y, &z)));
        prop_assert!(spec.is_identity(&spec.multiply(&x, &spec.invert(&x))));
        prop_assert_eq!(spec.multiply(&spec.identity(), &x), x.clone());
        prop_assert_eq!(spec.invert(&spec.multiply(&x, &y)), spec.multiply(&spec.invert(&y), &spec.invert(&x)));
    }

    #[test]
    fn tree_is_bipartite_and_equivariant(i in 0..SPECS.len(), seed in any::<u64>(), su in any::<bool>(), sv in any::<bool>()) {
        let e = load(i);
        let spec = &e.spec;
        let tree = Tree::new(spec);
        let mut rng = random::rng(seed);
        let side = |b: bool| if b { Side::A } else { Side::B };
        let u = tree.vertex_of(&random::element(spec, &mut rng, 5), side(su));
        let v = tree.vertex_of(&random::element(spec, &mut rng, 5), side(sv));
        let g = random::element(spec, &mut rng, 5);
        let d = tree.distance(&u, &v);
        prop_assert_eq!(d % 2 == 1, su != sv);
        prop_assert_eq!(tree.distance(&tree.act(&g, &u), &tree.act(&g, &v)), d);
        prop_assert_eq!(tree.distance_bfs(&u, &v, d + 1), Some(d));
        let path = tree.path(&u, &v);
        prop_assert_eq!(path.len(), d + 1);
        prop_assert!(path.windows(2).all(|p| tree.distance(&p[0], &p[1]) == 1));
        prop_assert_eq!(tree.neighbors(&u).len(), spec.index(side(su)));
    }

    #[test]
    fn classification_is_consistent(i in 0..SPECS.len(), seed in any::<u64>()) {
        let e = load(i);
        let spec = &e.spec;
        let tree = Tree::new(spec);
        let mut rng = random::rng(seed);
        let g = random::element(spec, &mut rng, 6);
        let h = random::element(spec, &mut rng, 4);
        let radius = 2 * g.len() + 4;
        let c = tree.classify(&g, radius);
        prop_assert!(c.verified);
        prop_assert_eq!(c.is_elliptic(), spec.element_order(&g, 64).is_some());
        prop_assert_eq!(c.tau % 2, 0);
        if c.is_hyperbolic() {
            prop_assert_eq!(c.tau, c.tau_from_square);
        }
        prop_assert_eq!(tree.min_displacement_exhaustive(&g, radius).0, c.tau);
        let conj = spec.conjugate(&h, &g);
        let cc = tree.classify(&conj, 2 * conj.len() + 4);
        prop_assert_eq!((cc.verdict, cc.tau), (c.verdict, c.tau));
    }

    #[test]
    fn fitted_recurrence_divides_generator(
        coefficients in prop::collection::vec(-3i64..=3, 1..=3),
        initial in prop::collection::vec(-5i64..=5, 3),
    ) {
        let k = coefficients.len();
        let source = Recurrence::from_i64(&coefficients, &initial[..k]);
        let seq = source.generate(24).unwrap();
        prop_assume!(seq.iter().any(|x| *x != BigInt::from(0)));
        let fitted = fit_recurrence(&seq, 5).expect("a recurrence of order <= 3 fits");
        prop_assert!(fitted.order() <= k);
        prop_assert!(fitted.reproduces(&seq));
        prop_assert!(fitted.characteristic().divides(&source.characteristic()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificates_replay(seed in any::<u64>()) {
        let e = catalog::load("pgl2z").unwrap();
        let spec = &e.spec;
        let tree = Tree::new(spec);
        let mut rng = random::rng(seed);
        let pair = [random::element(spec, &mut rng, 4), random::element(spec, &mut rng, 4)];
        let radius = 2 * pair.iter().map(NormalForm::len).max().unwrap() + 4;
        if let Ok(cert) = certify_free_monoid(&tree, &pair, &CertifyOptions::new(radius)) {
            prop_assert!(cert.all_passed());
            let checks = replay(spec, &cert).expect("replay succeeds");
            prop_assert_eq!(checks.len(), cert.checks.len());
            let text = serde_json::to_string(&cert).unwrap();
            let back = serde_json::from_str(&text).unwrap();
            prop_assert!(replay(spec, &back).is_ok());
            prop_assert!(replay(&catalog::load("gl2z").unwrap().spec, &cert).is_err());
        }
    }
}

#[test]
fn plastic_forms_are_geodesic() {
    let e = catalog::load("pgl2z").unwrap();
    let nmax = 12;
    let spheres = enumerate_spheres(&e.spec, &e.generators, EnumOptions::new(nmax));
    let ball: Vec<(usize, &NormalForm)> =
        spheres.iter().enumerate().flat_map(|(n, s)| s.iter().map(move |g| (n, g))).collect();
    let mut rng = random::rng(2024);
    for &(n, g) in ball.choose_multiple(&mut rng, 500) {
        let form = catalog::plastic_normal_form(&e, g, nmax).expect("every element has a form");
        assert_eq!(form.len(), n, "{form}");
        assert_eq!(word_length(&e.spec, &e.generators, g, nmax), Some(n));
    }
}
