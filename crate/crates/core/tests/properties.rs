//! Property tests over the invariants of every module.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::sample::select;

use uqrs::cache::Store;
use uqrs::cartan::{cartan_datum, q_binomial, rs_quantum_binomial, rs_quantum_integer, Family};
use uqrs::classify::{
    admissible_pairs, classify, classify_with_rank, isoclass_count_formula, moves, pair_invariants, partition_pairs,
};
use uqrs::hopf::Hopf;
use uqrs::pbw::{build, AlgebraHandle, AlgebraSpec, Element, PbwMonomial, Scope};
use uqrs::radford::{
    apply_operator, dimension_distribution, generator_action_operators, radford_action_with, Character, Distribution,
    GrouplikeSeed, MultiplicationTables, YdEngine,
};
use uqrs::{CyclotomicContext, Scalar};

fn scalar_strategy() -> impl Strategy<Value = (u64, Vec<(i64, i64)>)> {
    (3u64..=12).prop_flat_map(|l| (Just(l), prop::collection::vec((-5i64..=5, 0..l as i64), 0..4)))
}

fn make_scalar(ctx: &Arc<CyclotomicContext>, terms: &[(i64, i64)]) -> Scalar {
    let mut acc = Scalar::zero(ctx);
    for &(c, k) in terms {
        acc += &(&Scalar::from_integer(ctx, c) * &Scalar::root_of_unity(ctx, k));
    }
    acc
}

proptest! {
    #[test]
    fn field_axioms((l, a) in scalar_strategy(), b in prop::collection::vec((-5i64..=5, 0i64..12), 0..4), c in prop::collection::vec((-5i64..=5, 0i64..12), 0..4)) {
        let ctx = CyclotomicContext::new(l).unwrap();
        let (a, b, c) = (make_scalar(&ctx, &a), make_scalar(&ctx, &b), make_scalar(&ctx, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.invert().unwrap()).is_one());
        }
    }

    #[test]
    fn rational_scaling_is_exact((l, a) in scalar_strategy(), p in -20i64..20, q in 1i64..20) {
        let ctx = CyclotomicContext::new(l).unwrap();
        let a = make_scalar(&ctx, &a);
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        let as_scalar = Scalar::from_rational(&ctx, r.clone());
        prop_assert_eq!(a.scale(&r), &a * &as_scalar);
    }
}

#[test]
fn root_orders_and_inverses() {
    for l in 2..=24u64 {
        let ctx = CyclotomicContext::new(l).unwrap();
        for k in 0..l as i64 {
            let z = Scalar::root_of_unity(&ctx, k);
            let expected = l / num_integer::gcd(l, k as u64);
            // brute force: first d with z^d = 1
            let brute = (1..=l).find(|&d| z.pow(d).is_one()).unwrap();
            assert_eq!(brute, expected, "L={l} k={k}");
            assert_eq!(z.multiplicative_order().unwrap(), expected);
            assert!((&z * &Scalar::root_of_unity(&ctx, l as i64 - k)).is_one());
        }
    }
}

#[test]
fn euler_form_symmetrizes() {
    let cases = [
        (Family::A, 1..=6),
        (Family::B, 2..=6),
        (Family::C, 2..=6),
        (Family::D, 4..=6),
        (Family::F4, 4..=4),
        (Family::G2, 2..=2),
    ];
    for (family, ranks) in cases {
        for rank in ranks {
            let d = cartan_datum(family, rank).unwrap();
            for i in 1..=rank {
                for j in 1..=rank {
                    let lhs = d.euler_form(i, j).unwrap() + d.euler_form(j, i).unwrap();
                    assert_eq!(lhs, d.symmetrizer[i - 1] * d.matrix[i - 1][j - 1], "{family}{rank} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn gaussian_binomials() {
    let ctx = CyclotomicContext::new(7).unwrap();
    let one = Scalar::one(&ctx);
    for v in [Scalar::root_of_unity(&ctx, 1), Scalar::root_of_unity(&ctx, 3), Scalar::from_integer(&ctx, 2)] {
        for n in 1..9usize {
            for k in 1..n {
                // the mirrored recurrence [n, k] = v^{n−k} [n−1, k−1] + [n−1, k]
                let rhs = &(&v.pow((n - k) as u64) * &q_binomial(n - 1, k - 1, &v)) + &q_binomial(n - 1, k, &v);
                assert_eq!(q_binomial(n, k, &v), rhs);
            }
        }
    }
    let mut binom = vec![vec![1i64]];
    for n in 1..12usize {
        let prev = &binom[n - 1];
        let row: Vec<i64> = (0..=n).map(|k| if k == 0 || k == n { 1 } else { prev[k - 1] + prev[k] }).collect();
        binom.push(row);
    }
    for (n, row) in binom.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            assert_eq!(q_binomial(n, k, &one), Scalar::from_integer(&ctx, c));
        }
    }
}

#[test]
fn rs_integers_vanish_at_the_order_of_rs_inverse() {
    for l in 3..=12u64 {
        let ctx = CyclotomicContext::new(l).unwrap();
        for x in 0..l as i64 {
            for y in 0..l as i64 {
                if x == y {
                    continue;
                }
                let (r, s) = (Scalar::root_of_unity(&ctx, x), Scalar::root_of_unity(&ctx, y));
                let m = (&r * &s.invert().unwrap()).multiplicative_order().unwrap() as usize;
                assert!(rs_quantum_integer(m, &r, &s).is_zero());
                for c in 1..m {
                    assert!(!rs_quantum_integer(c, &r, &s).is_zero(), "L={l} ({x},{y}) c={c}");
                }
                // [a]! = [a, i] [i]! [a−i]!
                let fact = |n: usize| (1..=n).fold(Scalar::one(&ctx), |acc, c| &acc * &rs_quantum_integer(c, &r, &s));
                for a in 0..=l as usize {
                    for i in 0..=a {
                        let lhs = &rs_quantum_binomial(a, i, &r, &s).unwrap() * &(&fact(i) * &fact(a - i));
                        assert_eq!(lhs, fact(a));
                    }
                }
            }
        }
    }
}

// ---- algebras ----

fn handles() -> &'static Vec<AlgebraHandle> {
    static H: OnceLock<Vec<AlgebraHandle>> = OnceLock::new();
    H.get_or_init(|| {
        [
            (2, 3, 1, 2, Scope::Full),
            (2, 4, 0, 1, Scope::Full),
            (2, 6, 1, 4, Scope::Full),
            (3, 3, 1, 2, Scope::Full),
            (3, 4, 0, 1, Scope::Borel),
            (3, 4, 1, 3, Scope::Borel),
            (3, 6, 2, 5, Scope::Borel),
        ]
        .into_iter()
        .map(|(n, l, x, y, sc)| build(AlgebraSpec::new(n, l, x, y, sc).unwrap()).unwrap())
        .collect()
    })
}

fn low_degree_basis(h: &AlgebraHandle, max: u32) -> Vec<PbwMonomial> {
    h.basis().filter(|m| h.split_group(m).0.degree() <= max).collect()
}

fn random_element(h: &AlgebraHandle, basis: &[PbwMonomial], picks: &[(usize, i64, i64)]) -> Element {
    let ctx = h.context();
    h.from_terms(picks.iter().map(|&(i, c, k)| {
        (
            basis[i % basis.len()].clone(),
            &Scalar::from_integer(ctx, c) * &Scalar::root_of_unity(ctx, k),
        )
    }))
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..1_000_000, 1i64..4, 0i64..12), 1..3)
}

#[test]
fn every_handle_is_confluent_with_pbw_dimension() {
    for h in handles() {
        assert!(h.rewrite_system().check_confluence().is_ok());
        assert_eq!(h.counted_dimension().unwrap(), h.dimension());
    }
}

#[test]
fn dimension_law_for_small_orders() {
    for n in [2usize, 3] {
        for l in [2u64, 3, 4] {
            let h = build(AlgebraSpec::new(n, l, 0, 1, Scope::Full).unwrap()).unwrap();
            assert_eq!(h.counted_dimension().unwrap(), l.pow(((n + 2) * (n - 1)) as u32));
        }
    }
}

#[test]
fn defining_relations_reduce_to_zero() {
    for h in handles() {
        for (label, rel) in h.defining_relations().unwrap() {
            assert!(h.eval_poly(&rel).is_zero(), "{label} in {}", h.spec().cache_key());
        }
    }
}

#[test]
fn nilpotency_index_is_l() {
    for h in handles() {
        let l = h.order() as u32;
        for g in h.generators().iter().filter(|g| !g.is_grouplike()) {
            let x = h.generator(&g.name).unwrap();
            assert!(h.pow(&x, l).unwrap().is_zero(), "{}^L", g.name);
            assert!(!h.pow(&x, l - 1).unwrap().is_zero(), "{}^(L-1)", g.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn multiplication_is_associative(hi in 0usize..7, a in picks(), b in picks(), c in picks()) {
        let h = &handles()[hi];
        let basis = low_degree_basis(h, 3);
        let (a, b, c) = (random_element(h, &basis, &a), random_element(h, &basis, &b), random_element(h, &basis, &c));
        let left = h.multiply(&h.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = h.multiply(&a, &h.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hopf_axioms_on_random_elements(hi in select(vec![0usize, 1, 3, 4]), a in picks(), b in picks()) {
        let h = &handles()[hi];
        let hopf = Hopf::new(h);
        let basis = low_degree_basis(h, 3);
        let x = random_element(h, &basis, &a);
        let y = random_element(h, &basis, &b);
        prop_assert_eq!(hopf.coproduct_sq(&x), hopf.coproduct_sq_right(&x));
        let d = hopf.coproduct(&x);
        prop_assert_eq!(hopf.contract_left(&d, |p| h.scalar(hopf.counit(&h.monomial(p.clone())))), x.clone());
        let eps = h.scalar(hopf.counit(&x));
        prop_assert_eq!(hopf.contract_left(&d, |p| hopf.antipode(&h.monomial(p.clone()))), eps);
        prop_assert_eq!(hopf.antipode(&hopf.antipode_inv(&x)), x.clone());
        prop_assert_eq!(hopf.antipode_inv(&hopf.antipode(&x)), x.clone());
        let xy = h.multiply(&x, &y).unwrap();
        prop_assert_eq!(hopf.coproduct(&xy), hopf.tensor_mul(&hopf.coproduct(&x), &hopf.coproduct(&y)));
    }

    #[test]
    fn module_law(hi in select(vec![4usize]), xs in picks(), ys in picks(), az in picks(), b1 in 0i64..4, b2 in 0i64..4) {
        let h = &handles()[hi];
        let hopf = Hopf::new(h);
        let basis = low_degree_basis(h, 2);
        let all: Vec<PbwMonomial> = h.basis().collect();
        let beta = Character::new(&[b1, b2], h.order());
        let (x, y, a) = (random_element(h, &basis, &xs), random_element(h, &basis, &ys), random_element(h, &all, &az));
        let xy = h.multiply(&x, &y).unwrap();
        let lhs = radford_action_with(&hopf, &beta, &xy, &a).unwrap();
        let inner = radford_action_with(&hopf, &beta, &y, &a).unwrap();
        let rhs = radford_action_with(&hopf, &beta, &x, &inner).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

fn l6_tables() -> &'static (MultiplicationTables, Vec<PbwMonomial>) {
    static T: OnceLock<(MultiplicationTables, Vec<PbwMonomial>)> = OnceLock::new();
    T.get_or_init(|| {
        let h = &handles()[6];
        (MultiplicationTables::new(h).unwrap(), h.basis().collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn operators_match_generic_action_at_l6(b1 in 0i64..6, b2 in 0i64..6, idx in 0usize..7776, gen in 0usize..4) {
        let h = &handles()[6];
        let hopf = Hopf::new(h);
        let (tables, basis) = l6_tables();
        let beta = Character::new(&[b1, b2], 6);
        let ops = generator_action_operators(h, tables, &beta);
        let a = h.monomial(basis[idx].clone());
        let (name, op) = match gen {
            0 => ("e1", &ops.e[0]),
            1 => ("e2", &ops.e[1]),
            2 => ("w1", &ops.omega[0]),
            _ => ("w2", &ops.omega[1]),
        };
        let x = h.generator(name).unwrap();
        prop_assert_eq!(apply_operator(h, op, &a), radford_action_with(&hopf, &beta, &x, &a).unwrap());
    }

    #[test]
    fn closures_contain_seed_and_are_stable(hi in select(vec![4usize, 5, 6]), b in prop::collection::vec(0i64..6, 2), g in prop::collection::vec(0i64..6, 2)) {
        let h = &handles()[hi];
        let engine = YdEngine::new(h).unwrap();
        let beta = Character::new(&b, h.order());
        let seed = GrouplikeSeed::new(&g, h.order());
        let ech = engine.simple_module(&beta, &seed);
        prop_assert!(ech.rank() >= 1);
        let unit: uqrs::linalg::SparseVec<PbwMonomial> = [(h.unit_monomial(), Scalar::one(h.context()))].into();
        prop_assert!(ech.contains(&unit));
        prop_assert!(engine.is_closed(&beta, &seed, &ech));
    }

    #[test]
    fn distribution_text_round_trips(entries in prop::collection::vec((1u64..500, 1u64..500), 0..12)) {
        let d = Distribution::from_entries(entries);
        let back: Distribution = d.to_string().parse().unwrap();
        prop_assert_eq!(&back, &d);
        let json = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<Distribution>(&json).unwrap(), d);
    }

    #[test]
    fn cache_round_trip_is_byte_exact(entries in prop::collection::vec((1u64..500, 1u64..500), 0..12)) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path());
        let d = Distribution::from_entries(entries);
        store.save("distribution", "k", &d).unwrap();
        let bytes = std::fs::read(store.path_for("distribution", "k")).unwrap();
        let back: Distribution = store.load("distribution", "k").unwrap();
        prop_assert_eq!(&back, &d);
        store.save("distribution", "k", &back).unwrap();
        prop_assert_eq!(std::fs::read(store.path_for("distribution", "k")).unwrap(), bytes);
    }
}

#[test]
fn small_distributions_sum_to_group_size() {
    for (n, l, x, y) in [(2, 3, 1, 2), (2, 4, 0, 1), (2, 6, 1, 4), (3, 3, 1, 2)] {
        let h = build(AlgebraSpec::new(n, l, x, y, Scope::Borel).unwrap()).unwrap();
        let d = dimension_distribution(&h).unwrap();
        assert_eq!(d.total(), l.pow(2 * (n as u32 - 1)));
        assert!(d.entries().iter().all(|&(dim, _)| dim >= 1));
    }
}

// ---- classification ----

fn family_order() -> impl Strategy<Value = (Family, u64)> {
    (select(Family::ALL.to_vec()), 2u64..=13)
}

proptest! {
    #[test]
    fn moves_are_reflexive_and_symmetric((family, l) in family_order()) {
        for p in admissible_pairs(family, l) {
            let img = moves(family, l, p).unwrap();
            prop_assert!(img.contains(&p));
            for q in img {
                prop_assert!(moves(family, l, q).unwrap().contains(&p));
                prop_assert_eq!(pair_invariants(l, p), pair_invariants(l, q));
            }
        }
    }

    #[test]
    fn partition_ignores_input_order((family, l) in family_order(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut pairs = admissible_pairs(family, l);
        let sorted = partition_pairs(family, l, &pairs).unwrap();
        pairs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(partition_pairs(family, l, &pairs).unwrap(), sorted);
        classify(family, l).check_invariants().unwrap();
    }
}

#[test]
fn prime_counts_match_formulas() {
    for p in [5u64, 7, 11, 13, 17, 19] {
        for f in Family::ALL {
            assert_eq!(classify(f, p).classes.len() as u64, isoclass_count_formula(f, p).unwrap(), "{f} p={p}");
        }
    }
}

#[test]
fn dimension_annotation_matches_built_algebras() {
    for n in [2usize, 3] {
        for l in [2u64, 3, 4] {
            let table = classify_with_rank(Family::A, l, n);
            for c in &table.classes {
                let lp = c.ell_prime;
                if lp < 2 {
                    continue;
                }
                let (x, y) = c.representative();
                let scale = l / lp;
                let h = build(AlgebraSpec::new(n, lp, (x / scale) as i64, (y / scale) as i64, Scope::Full).unwrap())
                    .unwrap();
                let exponent = ((n + 2) * (n - 1)) as u32;
                assert_eq!(h.counted_dimension().unwrap(), lp.pow(exponent));
                assert_eq!(c.dimension.as_deref(), Some(format!("{lp}^{{(n+2)(n-1)}}").as_str()));
            }
        }
    }
}
