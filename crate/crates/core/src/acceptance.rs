//! The acceptance suite, shared by `selftest` and the test target, plus the
//! randomized batches behind it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{monomials_below, AlgElem, AlgebraSpec, TruncatedAlgebra};
use crate::cli::verify_sigma;
use crate::derham::{cohomology, is_exact_with, quotient_class, verify_forms_sequence, CohomologyOptions};
use crate::error::Result;
use crate::forms::{euler_homotopy, relative_basis_bounded, Engine, Form, RelativeIdealSpec};
use crate::ksymbols::{
    bloch, bloch_with, filtration_class, filtration_strictness, steinberg_element, surjectivity_witnesses, verify_key_identity, SlotRule,
    SymbolSum,
};
use crate::linalg::Q;
use crate::parse::{parse_form, parse_poly, parse_symbol, Scope};
use crate::poly::{Monomial, Poly, Var};
use crate::singularities::singularity_report;

pub const GRAUERT_KERNER: &str = "t1^4+t1^2*t2^3+t2^5";
/// Pinned by the dense oracle in the test suite.
pub const GRAUERT_KERNER_MU: usize = 12;
pub const GRAUERT_KERNER_TAU: usize = 11;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("[{}] {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

fn outcome(id: u32, name: &'static str, r: Result<(bool, String)>) -> CriterionResult {
    match r {
        Ok((passed, detail)) => CriterionResult { id, name, passed, detail },
        Err(e) => CriterionResult { id, name, passed: false, detail: format!("error: {e}") },
    }
}

/// Nonzero monomials of the algebra with positive nilpotent degree.
fn nil_monomials(alg: &TruncatedAlgebra) -> Result<Vec<Monomial>> {
    let k = alg.num_params();
    let mut out = Vec::new();
    for e in monomials_below(alg.nilpotents(), alg.bound()) {
        if e.iter().sum::<u32>() == 0 {
            continue;
        }
        let mono = Monomial::new(e, vec![0; k]);
        if !alg.monomial(mono.clone())?.is_zero() {
            out.push(mono);
        }
    }
    Ok(out)
}

fn small_rational(rng: &mut impl Rng) -> Q {
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=3);
    Q::new(num.into(), den.into())
}

fn param_monomial(alg: &TruncatedAlgebra, rng: &mut impl Rng) -> Vec<i32> {
    (0..alg.num_params()).map(|j| if alg.param_invertible(j) { rng.gen_range(-1..=1) } else { rng.gen_range(0..=1) }).collect()
}

/// A random nonzero nilpotent element with up to three terms.
pub fn random_nilpotent(alg: &TruncatedAlgebra, rng: &mut impl Rng) -> Result<AlgElem> {
    let monos = nil_monomials(alg)?;
    loop {
        let mut p = Poly::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let base = monos.choose(rng).expect("nilpotent monomials");
            let mono = Monomial::new(base.nil.clone(), param_monomial(alg, rng));
            p.add_term(mono, small_rational(rng));
        }
        let x = alg.reduce(&p)?;
        if !x.is_zero() {
            return Ok(x);
        }
    }
}

/// `c * r * (1 + x)` with `c` a nonzero rational, `r` a unit monomial in the
/// invertible parameters and `x` nilpotent (zero when `relative` is false).
pub fn random_unit(alg: &TruncatedAlgebra, rng: &mut impl Rng, relative: bool) -> Result<AlgElem> {
    let mut c = small_rational(rng);
    while c == Q::from_integer(0.into()) {
        c = small_rational(rng);
    }
    let exps: Vec<i32> = (0..alg.num_params()).map(|j| if alg.param_invertible(j) { rng.gen_range(-1..=1) } else { 0 }).collect();
    let r = alg.monomial(Monomial::new(vec![0; alg.nilpotents()], exps))?.scale(&c);
    let x = if relative { random_nilpotent(alg, rng)? } else { alg.zero() };
    r.mul(&alg.one().add(&x)?)
}

fn algebra(m: usize, n: u32, params: &[(&str, bool)]) -> Result<TruncatedAlgebra> {
    let mut spec = AlgebraSpec::truncated(m, n);
    for (name, inv) in params {
        spec = spec.param(name, *inv);
    }
    TruncatedAlgebra::new(spec)
}

/// Vanishing of relative cohomology of `Q[t_1..t_m]/(t)^N`.
pub fn vanishing_grid(ns: &[u32], ms: &[usize]) -> Result<(bool, String)> {
    let grid: Vec<(u32, usize)> = ns.iter().flat_map(|n| ms.iter().map(move |m| (*n, *m))).collect();
    let results: Vec<Result<(u32, usize, bool)>> = grid
        .par_iter()
        .map(|&(n, m)| {
            let alg = algebra(m, n, &[])?;
            let rep = cohomology(&alg, &RelativeIdealSpec::Full, &CohomologyOptions::default())?;
            Ok((n, m, rep.all_zero()))
        })
        .collect();
    let mut bad = Vec::new();
    for r in results {
        let (n, m, ok) = r?;
        if !ok {
            bad.push(format!("(N={n},m={m})"));
        }
    }
    let detail = if bad.is_empty() { format!("{} algebras, all H^n = 0", grid.len()) } else { format!("nonzero: {}", bad.join(" ")) };
    Ok((bad.is_empty(), detail))
}

/// `(dh + hd) w = i w` on every basis form of internal degree `i`.
pub fn homotopy_identity(alg: &TruncatedAlgebra, max_degree: usize) -> Result<(usize, usize)> {
    let mut checked = 0;
    let mut failed = 0;
    for n in 0..=max_degree.min(1 + alg.num_params()) {
        for w in relative_basis_bounded(alg, &RelativeIdealSpec::Full, n, 1)? {
            let degs = w.internal_degrees();
            let [i] = degs.as_slice() else {
                failed += 1;
                continue;
            };
            let hd = euler_homotopy(&w.d())?;
            let lhs = if n == 0 { hd } else { euler_homotopy(&w)?.d().add(&hd)? };
            checked += 1;
            if lhs != w.scale(&Q::from_integer((*i).into())) {
                failed += 1;
            }
        }
    }
    Ok((checked, failed))
}

/// Bloch classes of random Steinberg elements `{a + x, 1 - a - x} - {a, 1 - a}`.
pub fn steinberg_batch(instances: usize, seed: u64) -> Result<(usize, Vec<String>)> {
    let algs = [algebra(1, 3, &[])?, algebra(1, 5, &[])?, algebra(2, 3, &[])?, algebra(2, 4, &[])?, algebra(1, 4, &[("b", true)])?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for _ in 0..instances {
        let alg = algs.choose(&mut rng).expect("algebras").clone();
        let mut a = small_rational(&mut rng);
        while a == Q::from_integer(0.into()) || a == Q::from_integer(1.into()) {
            a = small_rational(&mut rng);
        }
        let x = random_nilpotent(&alg, &mut rng)?;
        cases.push((alg.constant(a), x));
    }
    let results: Vec<Result<Option<String>>> = cases
        .par_iter()
        .map(|(a, x)| {
            let z = steinberg_element(a, x)?;
            let b = bloch(&z)?;
            Ok((!b.is_zero()).then(|| format!("a={a}, x={x}")))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok((instances, failures))
}

/// Random tensors with at least two nilpotent slots, evaluated at the first
/// and at the last nilpotent slot.
pub fn slot_independence_batch(instances: usize, seed: u64) -> Result<(usize, Vec<String>)> {
    let algs = [
        (algebra(1, 4, &[("b", true)])?, 2),
        (algebra(2, 3, &[])?, 2),
        (algebra(2, 4, &[])?, 3),
        (algebra(1, 4, &[("a", false), ("b", true)])?, 3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for _ in 0..instances {
        let (alg, arity) = algs.choose(&mut rng).expect("algebras").clone();
        let mut s = SymbolSum::zero(&alg, arity);
        for _ in 0..rng.gen_range(1..=2) {
            let nil_slots: Vec<usize> = {
                let mut idx: Vec<usize> = (0..arity).collect();
                idx.shuffle(&mut rng);
                idx.truncate(rng.gen_range(2..=arity));
                idx
            };
            let entries = (0..arity).map(|i| random_unit(&alg, &mut rng, nil_slots.contains(&i))).collect::<Result<Vec<_>>>()?;
            s.push(rng.gen_range(1..=2), entries)?;
        }
        cases.push(s);
    }
    let results: Vec<Result<Option<String>>> = cases
        .par_iter()
        .map(|s| {
            let first = bloch_with(s, SlotRule::First)?;
            let last = bloch_with(s, SlotRule::Last)?;
            Ok((first.representative != last.representative).then(|| s.to_string()))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok((instances, failures))
}

pub fn criterion_vanishing() -> CriterionResult {
    outcome(1, "vanishing", vanishing_grid(&[2, 3, 4, 5], &[1, 2, 3]))
}

pub fn criterion_homotopy() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut checked = 0;
        let mut failed = 0;
        for n in 1..=6 {
            let (c, f) = homotopy_identity(&algebra(1, n, &[])?, 2)?;
            checked += c;
            failed += f;
        }
        let (c, f) = homotopy_identity(&algebra(1, 5, &[("a", false)])?, 2)?;
        checked += c;
        failed += f;
        Ok((failed == 0 && checked > 0, format!("{checked} basis forms, {failed} failures")))
    };
    outcome(2, "homotopy identity", run())
}

pub fn criterion_dual_numbers() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let alg = algebra(1, 2, &[("a", false), ("b", true)])?;
        let b = bloch(&parse_symbol("{1+a*b*t, b}", &alg)?)?;
        let target = quotient_class(&parse_form("t*a*db", &alg)?, &RelativeIdealSpec::Full)?;
        Ok((b.representative == target, format!("B = {}, target = {}", b.representative, target)))
    };
    outcome(3, "dual-numbers Bloch value", run())
}

pub fn criterion_key_identity() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut pairs = Vec::new();
        for i in 1..=3 {
            for j in i..=6 - i {
                pairs.push((i, j));
            }
        }
        let reports: Vec<_> = pairs.par_iter().map(|&(i, j)| verify_key_identity(i, j)).collect::<Result<_>>()?;
        let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| format!("({},{})", r.i, r.j)).collect();
        let primitive = match &reports[0].certificate {
            crate::derham::ExactnessCertificate::Exact { primitive } => primitive.to_string(),
            _ => "none".into(),
        };
        Ok((failed.is_empty(), format!("{} pairs; (1,1) primitive {primitive}{}", reports.len(), fails(&failed))))
    };
    outcome(4, "key identity", run())
}

fn fails(v: &[String]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!("; failed {}", v.join(" "))
    }
}

pub fn criterion_filtration() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut cases = Vec::new();
        for p in 1..=6u32 {
            for s in p..=p + 2 {
                for i in 1..s {
                    cases.push((p, i, s - i));
                }
            }
        }
        let zeros: Vec<_> = cases.par_iter().map(|&(p, i, j)| filtration_class(p, i, j)).collect::<Result<_>>()?;
        let mut bad: Vec<String> = zeros.iter().filter(|r| !r.zero).map(|r| format!("p={} ({},{})", r.p, r.i, r.j)).collect();
        let mut strict = Vec::new();
        for p in 3..=6 {
            match filtration_strictness(p)? {
                Some(r) => strict.push(format!("p={p}:({},{})", r.i, r.j)),
                None => bad.push(format!("no strictness witness for p={p}")),
            }
        }
        Ok((bad.is_empty(), format!("{} vanishing cases; witnesses {}{}", cases.len(), strict.join(" "), fails(&bad))))
    };
    outcome(5, "filtration vanishing and strictness", run())
}

pub fn criterion_steinberg() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let (n, failures) = steinberg_batch(50, 0x5eed)?;
        Ok((failures.is_empty(), format!("{n} instances, {} nonzero{}", failures.len(), fails(&failures))))
    };
    outcome(6, "Steinberg well-definedness", run())
}

pub fn criterion_slot_independence() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let (n, failures) = slot_independence_batch(100, 0x510d)?;
        Ok((failures.is_empty(), format!("{n} tensors, {} disagreements{}", failures.len(), fails(&failures))))
    };
    outcome(7, "slot independence", run())
}

pub fn criterion_surjectivity() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut parts = Vec::new();
        let mut ok = true;
        for (n, m) in [(3, 1), (3, 2), (4, 1)] {
            let alg = algebra(m, n, &[])?;
            for deg in 0..=1 {
                let r = surjectivity_witnesses(&alg, deg, 1)?;
                ok &= r.spans && r.rank == r.target_dim;
                parts.push(format!("(N={n},m={m},n={deg}) {}/{}", r.rank, r.target_dim));
            }
        }
        let dual = algebra(1, 2, &[("b", true)])?;
        let r = surjectivity_witnesses(&dual, 1, 1)?;
        ok &= r.spans && r.rank >= 1;
        parts.push(format!("(N=2 over Q[b^-1,b], n=1) rank {}", r.rank));
        Ok((ok, parts.join(", ")))
    };
    outcome(8, "surjectivity", run())
}

pub fn criterion_grauert_kerner() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let f = parse_poly(GRAUERT_KERNER, &Scope::nil_only(2))?;
        let r = singularity_report(&f, crate::singularities::DEFAULT_MAX_TRUNCATION)?;
        let ok = r.mu == GRAUERT_KERNER_MU && r.tau == GRAUERT_KERNER_TAU && r.mu > r.tau && r.h_dim == r.mu - r.tau && r.h_dim >= 1;
        Ok((ok, format!("mu={} tau={} h_dim={} N={}", r.mu, r.tau, r.h_dim, r.n_used)))
    };
    outcome(9, "Grauert-Kerner gap", run())
}

pub fn criterion_sigma() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for n in 3..=5 {
            let r = verify_sigma(n, false)?;
            ok &= r.bijective;
            parts.push(format!("N={n} dims {:?}", r.rows.iter().map(|row| row.dim_source).collect::<Vec<_>>()));
        }
        Ok((ok, parts.join(", ")))
    };
    outcome(10, "sigma isomorphism", run())
}

pub fn criterion_sequence() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        for n in 3..=5u32 {
            let alg = algebra(1, n, &[])?;
            for deg in 0..=1 {
                let r = verify_forms_sequence(&alg, &RelativeIdealSpec::Power(n - 1), &RelativeIdealSpec::Full, deg)?;
                ok &= r.passed;
            }
        }
        let f = parse_poly(GRAUERT_KERNER, &Scope::nil_only(2))?;
        let jac = RelativeIdealSpec::Explicit(vec![f.derivative(Var::Nil(0)), f.derivative(Var::Nil(1))]);
        let gk = verify_forms_sequence(&algebra(2, 6, &[])?, &jac, &RelativeIdealSpec::Full, 1)?;
        ok &= gk.passed && gk.correction_dim > 0 && gk.alpha_injective;
        Ok((ok, format!("R_N chains ok; Jacobian case correction dim {} alpha injective {}", gk.correction_dim, gk.alpha_injective)))
    };
    outcome(11, "exact-sequence additivity", run())
}

/// Algebras of at most 60 monomials on which the engines are compared.
pub fn oracle_corpus() -> Result<Vec<TruncatedAlgebra>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        out.push(algebra(1, n, &[])?);
    }
    for n in 2..=6 {
        out.push(algebra(2, n, &[])?);
    }
    for n in 2..=4 {
        out.push(algebra(3, n, &[])?);
    }
    let s2 = Scope::nil_only(2);
    for gens in [vec!["t1^2", "t2^3"], vec!["t1*t2", "t1^3", "t2^4"], vec!["t1^2*t2", "t1^3", "t2^3"]] {
        let ideal = gens.iter().map(|g| parse_poly(g, &s2)).collect::<Result<Vec<_>>>()?;
        out.push(TruncatedAlgebra::new(AlgebraSpec::with_ideal(2, 5, {
            let mut i = ideal;
            i.extend(AlgebraSpec::power_generators(2, 5));
            i
        }))?);
    }
    Ok(out)
}

/// Graded and whole-space engines agree on dimensions and exactness verdicts.
pub fn engines_agree(alg: &TruncatedAlgebra) -> Result<bool> {
    let rel = RelativeIdealSpec::Full;
    let g = cohomology(alg, &rel, &CohomologyOptions { engine: Some(Engine::Graded), ..Default::default() })?;
    let w = cohomology(alg, &rel, &CohomologyOptions { engine: Some(Engine::Whole), ..Default::default() })?;
    if g.rows != w.rows {
        return Ok(false);
    }
    for n in 0..=alg.nilpotents() {
        for b in relative_basis_bounded(alg, &rel, n, 0)? {
            let probes: Vec<Form> = if n < alg.nilpotents() { vec![b.clone(), b.d()] } else { vec![b] };
            for probe in probes {
                let vg = is_exact_with(&probe, &rel, None, Engine::Graded)?.is_exact();
                let vw = is_exact_with(&probe, &rel, None, Engine::Whole)?.is_exact();
                if vg != vw {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn criterion_engines() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let corpus: Vec<TruncatedAlgebra> = oracle_corpus()?.into_iter().filter(|a| a.is_monomial()).collect();
        let verdicts: Vec<bool> = corpus.par_iter().map(engines_agree).collect::<Result<_>>()?;
        let bad = verdicts.iter().filter(|v| !**v).count();
        Ok((bad == 0, format!("{} algebras, {bad} disagreements", corpus.len())))
    };
    outcome(12, "engine equivalence", run())
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_vanishing(),
        criterion_homotopy(),
        criterion_dual_numbers(),
        criterion_key_identity(),
        criterion_filtration(),
        criterion_steinberg(),
        criterion_slot_independence(),
        criterion_surjectivity(),
        criterion_grauert_kerner(),
        criterion_sigma(),
        criterion_sequence(),
        criterion_engines(),
    ]
}
