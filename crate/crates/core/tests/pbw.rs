use modlie::{Enveloping, Family, LieAlgebra, Root, RootSystem, UEElement};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use std::sync::OnceLock;

static B2_MOD_7: OnceLock<LieAlgebra> = OnceLock::new();

thread_local! {
    static ENV: Enveloping<'static> = Enveloping::new(B2_MOD_7.get_or_init(|| algebra(Family::B, 2, 7)));
}

fn algebra(f: Family, l: usize, p: u64) -> LieAlgebra {
    LieAlgebra::build(&RootSystem::build(f, l).unwrap(), p).unwrap()
}

fn element(env: &Enveloping<'_>, terms: &[(i64, Vec<usize>)]) -> UEElement {
    let mut u = env.zero();
    for (c, w) in terms {
        let t = env.scale(*c, &env.word(w).unwrap()).unwrap();
        u = env.add(&u, &t).unwrap();
    }
    u
}

fn random_terms(n: usize) -> impl Strategy<Value = Vec<(i64, Vec<usize>)>> {
    prop::collection::vec((1i64..7, prop::collection::vec(0..n, 0..=4)), 1..=3)
}

proptest! {
    #![proptest_config(Config { cases: 1000, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() })]

    #[test]
    fn multiplication_is_associative_b2_mod_7(a in random_terms(10), b in random_terms(10), c in random_terms(10)) {
        let (left, right) = ENV.with(|env| {
            let (u, v, w) = (element(env, &a), element(env, &b), element(env, &c));
            let left = env.multiply(&env.multiply(&u, &v).unwrap(), &w).unwrap();
            let right = env.multiply(&u, &env.multiply(&v, &w).unwrap()).unwrap();
            (left, right)
        });
        prop_assert_eq!(left, right);
    }
}

// [e, f^n] = n f^{n-1} (h - n + 1) in U(sl2).
#[test]
fn sl2_commutator_with_powers() {
    let alg = algebra(Family::A, 1, 0);
    let env = Enveloping::new(&alg);
    let e = env.root_vector(&Root::new(vec![1])).unwrap();
    let f = env.root_vector(&Root::new(vec![-1])).unwrap();
    let h = env.generator(alg.coroot_index(0));
    for n in 1..=6u32 {
        let lhs = env.commutator(&e, &env.pow(&f, n).unwrap()).unwrap();
        let fn1 = env.pow(&f, n - 1).unwrap();
        let shifted = env.add_scalar(&h, -(n as i64) + 1).unwrap();
        let rhs = env.scale(n as i64, &env.multiply(&fn1, &shifted).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "n = {n}");
    }
}

#[test]
fn straightening_one_step() {
    let alg = algebra(Family::A, 1, 0);
    let env = Enveloping::new(&alg);
    let e = env.root_vector(&Root::new(vec![1])).unwrap();
    let f = env.root_vector(&Root::new(vec![-1])).unwrap();
    assert_eq!(env.format(&env.multiply(&e, &f).unwrap()), "x(-e1) x(+e1) + h(e1)");
}

fn casimir(env: &Enveloping<'_>, dim: usize) -> UEElement {
    let alg = env.algebra();
    let e1 = Root::unit(dim, 1);
    let h = env.from_lie(&alg.coroot_expand(&e1).unwrap()).unwrap();
    let h1 = env.add_scalar(&h, 1).unwrap();
    let xm = env.root_vector(&e1.neg()).unwrap();
    let xp = env.root_vector(&e1).unwrap();
    let prod = env.multiply(&xm, &xp).unwrap();
    env.add(&env.pow(&h1, 2).unwrap(), &env.scale(4, &prod).unwrap())
        .unwrap()
}

#[test]
fn sl2_casimir_central_in_a1_not_in_b2() {
    let a1 = algebra(Family::A, 1, 0);
    let env = Enveloping::new(&a1);
    assert!(env.is_central(&casimir(&env, 1)).unwrap());

    let b2 = algebra(Family::B, 2, 0);
    let env = Enveloping::new(&b2);
    let w = casimir(&env, 2);
    let e1 = Root::unit(2, 1);
    for g in [env.root_vector(&e1).unwrap(), env.root_vector(&e1.neg()).unwrap()] {
        assert!(env.commutator(&g, &w).unwrap().is_zero());
    }
    let h = env.from_lie(&b2.coroot_expand(&e1).unwrap()).unwrap();
    assert!(env.commutator(&h, &w).unwrap().is_zero());
    assert!(!env.is_central(&w).unwrap());
}

// x^p and h^p - h lie in the p-centre.
#[test]
fn p_centre_mod_7() {
    let alg = algebra(Family::B, 2, 7);
    let env = Enveloping::new(&alg);
    for idx in 0..alg.dim() {
        let x = env.generator(idx);
        let mut z = env.pow(&x, 7).unwrap();
        if alg.is_coroot(idx) {
            z = env.sub(&z, &x).unwrap();
        }
        assert!(env.is_central(&z).unwrap(), "{}", alg.label(idx));
    }
    let x = env.generator(0);
    assert!(!env.is_central(&env.pow(&x, 6).unwrap()).unwrap());
}

#[test]
fn weights_are_additive() {
    let alg = algebra(Family::B, 3, 0);
    let env = Enveloping::new(&alg);
    let a = Root::new(vec![1, -1, 0]);
    let b = Root::new(vec![0, 0, 1]);
    let u = env
        .multiply(&env.root_vector(&a).unwrap(), &env.root_vector(&b).unwrap())
        .unwrap();
    assert_eq!(env.weight(&u), modlie::Weight::Homogeneous(a.plus(&b)));
}

// Reordering the factors of a word only changes terms of lower degree.
#[test]
fn permuted_words_share_the_leading_monomial() {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let alg = algebra(Family::B, 2, 7);
    let env = Enveloping::new(&alg);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let word: Vec<usize> = (0..n).map(|_| rng.gen_range(0..alg.dim())).collect();
        let mut shuffled = word.clone();
        shuffled.shuffle(&mut rng);
        let (u, v) = (env.word(&word).unwrap(), env.word(&shuffled).unwrap());
        let mut sorted = word.clone();
        sorted.sort();
        let lead = env.word(&sorted).unwrap();
        let (lead_m, _) = lead.terms().next().unwrap();
        assert_eq!(u.coefficient(lead_m), 1);
        assert_eq!(v.coefficient(lead_m), 1);
        let diff = env.sub(&u, &v).unwrap();
        assert!(diff.degree().is_none_or(|d| d < n as u32), "{word:?} vs {shuffled:?}");
    }
}

#[test]
fn straightening_never_raises_degree() {
    let alg = algebra(Family::B, 2, 0);
    let env = Enveloping::new(&alg);
    let words: [&[usize]; 4] = [&[9, 0, 9], &[7, 5, 2, 0], &[8, 4, 1], &[6, 6, 3, 3]];
    for a in words {
        for b in words {
            let (u, v) = (env.word(a).unwrap(), env.word(b).unwrap());
            let uv = env.multiply(&u, &v).unwrap();
            assert!(uv.degree().unwrap() <= (a.len() + b.len()) as u32);
        }
    }
}
