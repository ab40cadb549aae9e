use nilbloch::acceptance::{random_nilpotent, random_unit};
use nilbloch::algebra::{AlgElem, AlgebraSpec, Substitution, TruncatedAlgebra};
use nilbloch::derham::{cohomology, is_exact, quotient_class, CohomologyOptions};
use nilbloch::forms::{d_elem, euler_homotopy, Engine, Form, RelativeIdealSpec};
use nilbloch::ksymbols::{bloch, bloch_with, dlog_symbol, steinberg_element, verify_skew, SlotRule, SymbolSum};
use nilbloch::parse::{parse_form, parse_poly, parse_symbol, Scope};
use nilbloch::poly::{Monomial, Poly};
use nilbloch::singularities::{milnor_dim_at, singularity_report, top_cohomology, tyurina_dim_at};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn algebras() -> Vec<TruncatedAlgebra> {
    let s2 = Scope::nil_only(2);
    let mut general = vec![parse_poly("t1^2 - t2^3", &s2).unwrap()];
    general.extend(AlgebraSpec::power_generators(2, 5));
    vec![
        TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5)).unwrap(),
        TruncatedAlgebra::new(AlgebraSpec::truncated(2, 4)).unwrap(),
        TruncatedAlgebra::new(AlgebraSpec::truncated(1, 4).param("a", false).param("b", true)).unwrap(),
        TruncatedAlgebra::new(AlgebraSpec::truncated(3, 3)).unwrap(),
        TruncatedAlgebra::new(AlgebraSpec::with_ideal(2, 5, general)).unwrap(),
    ]
}

fn pick(seed: u64) -> (TruncatedAlgebra, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algs = algebras();
    let alg = algs[rng.gen_range(0..algs.len())].clone();
    (alg, rng)
}

fn random_elem(alg: &TruncatedAlgebra, rng: &mut ChaCha8Rng) -> AlgElem {
    let c = alg.int(rng.gen_range(-2..=2));
    c.add(&random_nilpotent(alg, rng).unwrap()).unwrap()
}

/// Sum of terms `a * d b_1 ^ .. ^ d b_k`.
fn random_form(alg: &TruncatedAlgebra, k: usize, rng: &mut ChaCha8Rng) -> Form {
    let mut acc = Form::zero(alg, k);
    for _ in 0..rng.gen_range(1..=3) {
        let mut w = Form::from_elem(&random_elem(alg, rng));
        for _ in 0..k {
            w = w.wedge(&d_elem(&random_elem(alg, rng))).unwrap();
        }
        acc = acc.add(&w).unwrap();
    }
    acc
}

fn top_degree(alg: &TruncatedAlgebra) -> usize {
    alg.nilpotents() + alg.num_params()
}

fn random_symbol(alg: &TruncatedAlgebra, arity: usize, rng: &mut ChaCha8Rng) -> SymbolSum {
    let mut s = SymbolSum::zero(alg, arity);
    for _ in 0..rng.gen_range(1..=2) {
        let entries = (0..arity)
            .map(|_| {
                let relative = rng.gen_bool(0.7);
                random_unit(alg, rng, relative).unwrap()
            })
            .collect();
        let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
        s.push(c, entries).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let k = rng.gen_range(0..top_degree(&alg));
        let w = random_form(&alg, k, &mut rng);
        prop_assert!(w.d().d().is_zero());
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let top = top_degree(&alg);
        let p = rng.gen_range(0..top);
        let r = rng.gen_range(0..top - p);
        let a = random_form(&alg, p, &mut rng);
        let b = random_form(&alg, r, &mut rng);
        let lhs = a.wedge(&b).unwrap().d();
        let sign = if p % 2 == 0 { q(1) } else { q(-1) };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(&sign)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let (a, b, c) = (random_elem(&alg, &mut rng), random_elem(&alg, &mut rng), random_elem(&alg, &mut rng));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        let x = random_nilpotent(&alg, &mut rng).unwrap();
        prop_assert_eq!(x.exp_nil().unwrap().sub(&alg.one()).unwrap().log1p().unwrap(), x.clone());
        let u = random_unit(&alg, &mut rng, true).unwrap();
        prop_assert_eq!(u.mul(&u.invert().unwrap()).unwrap(), alg.one());
    }

    #[test]
    fn bloch_differential_is_dlog(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let arity = rng.gen_range(1..=top_degree(&alg).min(2));
        let s = random_symbol(&alg, arity, &mut rng);
        let b = bloch(&s).unwrap();
        let expect = dlog_symbol(&s).unwrap().sub(&dlog_symbol(&b.base_symbol()).unwrap()).unwrap();
        prop_assert_eq!(b.raw.d(), expect.clone());
        prop_assert_eq!(b.representative.d(), expect);
    }

    #[test]
    fn bloch_is_multiplicative(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let u = random_unit(&alg, &mut rng, true).unwrap();
        let v = random_unit(&alg, &mut rng, true).unwrap();
        let relative = rng.gen_bool(0.5);
        let w = random_unit(&alg, &mut rng, relative).unwrap();
        let uv = bloch(&SymbolSum::single(vec![u.mul(&v).unwrap(), w.clone()]).unwrap()).unwrap();
        let bu = bloch(&SymbolSum::single(vec![u, w.clone()]).unwrap()).unwrap();
        let bv = bloch(&SymbolSum::single(vec![v, w]).unwrap()).unwrap();
        let sum = quotient_class(&bu.raw.add(&bv.raw).unwrap(), &RelativeIdealSpec::Full).unwrap();
        prop_assert_eq!(uv.representative, sum);
    }

    #[test]
    fn slot_rule_is_irrelevant_for_classes(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let arity = rng.gen_range(2..=top_degree(&alg).min(3) + 1).min(top_degree(&alg) + 1);
        let s = random_symbol(&alg, arity, &mut rng);
        let first = bloch_with(&s, SlotRule::First).unwrap();
        let last = bloch_with(&s, SlotRule::Last).unwrap();
        prop_assert_eq!(first.representative, last.representative);
    }

    #[test]
    fn steinberg_and_skew(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let mut a = q(rng.gen_range(-5..=5)) / q(rng.gen_range(1..=4));
        if a == q(0) || a == q(1) {
            a = q(3);
        }
        let x = random_nilpotent(&alg, &mut rng).unwrap();
        prop_assert!(bloch(&steinberg_element(&alg.constant(a), &x).unwrap()).unwrap().is_zero());
        let s = random_symbol(&alg, 2, &mut rng);
        prop_assert!(verify_skew(&s).unwrap());
    }

    #[test]
    fn bloch_is_natural(seed in any::<u64>(), qexp in 1u32..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5).param("x", false)).unwrap();
        let target = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5)).unwrap();
        let theta = Substitution::new(&source, &target, [("x", target.t(0).pow(qexp))]).unwrap();
        let theta0 = Substitution::new(&source, &target, [("x", target.zero())]).unwrap();
        let s = random_symbol(&source, 2, &mut rng);
        let b = bloch(&s).unwrap();
        let mapped = bloch(&s.map(&theta).unwrap()).unwrap();
        let pushed = quotient_class(&b.raw.pushforward(&theta).unwrap(), &RelativeIdealSpec::Full).unwrap();
        prop_assert_eq!(mapped.representative, pushed);

        let p = rng.gen_range(1..4u32);
        let w = random_form(&source, 1, &mut rng);
        let high = w.sub(&w.cutoff(p - 1).unwrap()).unwrap();
        let diff = high.pushforward(&theta).unwrap().sub(&high.pushforward(&theta0).unwrap()).unwrap();
        prop_assert!(diff.internal_degrees().iter().all(|&i| i >= p + qexp));
    }

    #[test]
    fn certificates_verify(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let k = rng.gen_range(1..=top_degree(&alg));
        let w = random_form(&alg, k, &mut rng);
        let cert = is_exact(&w, &RelativeIdealSpec::Full, None).unwrap();
        prop_assert!(cert.verify(&w, &RelativeIdealSpec::Full, None).unwrap());
        let eta = random_form(&alg, k - 1, &mut rng);
        prop_assert!(is_exact(&eta.d(), &RelativeIdealSpec::Full, None).unwrap().is_exact());
    }

    #[test]
    fn homotopy_on_random_forms(seed in any::<u64>(), n in 2u32..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, n).param("a", false)).unwrap();
        let k = rng.gen_range(1..=2usize);
        let w = random_form(&alg, k, &mut rng);
        let i = rng.gen_range(1..n);
        let wi = w.graded_component(i).unwrap();
        let hd = euler_homotopy(&wi.d()).unwrap();
        let dh = euler_homotopy(&wi).unwrap().d();
        prop_assert_eq!(dh.add(&hd).unwrap(), wi.scale(&q(i as i64)));
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let (alg, mut rng) = pick(seed);
        let a = random_elem(&alg, &mut rng);
        let printed = a.to_string();
        let scope = Scope::of_spec(alg.spec());
        let reparsed = parse_poly(&printed, &scope).unwrap();
        prop_assert_eq!(reparsed.display(alg.names()), printed);
        let k = rng.gen_range(0..=top_degree(&alg));
        let w = random_form(&alg, k, &mut rng);
        let printed = w.to_string();
        let back = parse_form(&printed, &alg).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        if !w.is_zero() {
            prop_assert_eq!(back, w);
        }
        let s = random_symbol(&alg, 2, &mut rng);
        prop_assert_eq!(parse_symbol(&s.to_string(), &alg).unwrap().to_string(), s.to_string());
    }

    #[test]
    fn engines_agree_on_monomial_ideals(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..6u32);
        let mut ideal = AlgebraSpec::power_generators(2, n);
        for _ in 0..rng.gen_range(1..3) {
            let e = vec![rng.gen_range(0..n), rng.gen_range(0..n)];
            if e.iter().sum::<u32>() > 0 {
                ideal.push(Poly::term(q(1), Monomial::new(e, vec![])));
            }
        }
        let alg = TruncatedAlgebra::new(AlgebraSpec::with_ideal(2, n, ideal)).unwrap();
        let g = cohomology(&alg, &RelativeIdealSpec::Full, &CohomologyOptions { engine: Some(Engine::Graded), ..Default::default() }).unwrap();
        let w = cohomology(&alg, &RelativeIdealSpec::Full, &CohomologyOptions { engine: Some(Engine::Whole), ..Default::default() }).unwrap();
        prop_assert_eq!(g.rows, w.rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn milnor_tyurina_invariants(a in 2u32..6, b in 2u32..6, c in -2i64..3) {
        let scope = Scope::nil_only(2);
        let brieskorn = parse_poly(&format!("t1^{a} + t2^{b}"), &scope).unwrap();
        let r = singularity_report(&brieskorn, 24).unwrap();
        prop_assert_eq!((r.mu, r.tau), (((a - 1) * (b - 1)) as usize, ((a - 1) * (b - 1)) as usize));

        let f = parse_poly(&format!("t1^{a} + t2^{b} + {c}*t1^{a}*t2^{b}"), &scope).unwrap();
        let r = singularity_report(&f, 24).unwrap();
        prop_assert!(r.mu >= r.tau);
        prop_assert_eq!(r.h_dim, r.mu - r.tau);
        prop_assert_eq!(milnor_dim_at(&f, r.n_used + 1).unwrap(), r.mu);
        prop_assert_eq!(tyurina_dim_at(&f, r.n_used + 1).unwrap(), r.tau);
        prop_assert_eq!(top_cohomology(&f, r.derham_truncation + 1).unwrap(), r.h_dim);
    }
}
