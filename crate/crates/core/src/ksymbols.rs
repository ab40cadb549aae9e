//! Milnor K-symbols, the dlog and Bloch maps, and verifiers for identities
//! between Bloch classes.

use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgElem, AlgebraSpec, Substitution, TruncatedAlgebra};
use crate::derham::{is_exact, quotient_class, ExactnessCertificate, Witness};
use crate::error::{Error, Result};
use crate::forms::{d_elem, dlog, forms_rank, relative_basis_bounded, Form, RelativeIdealSpec};
use crate::linalg::Q;
use crate::poly::Monomial;

/// An integer combination of unit tuples `{u_1, ..., u_k}`.
#[derive(Clone)]
pub struct SymbolSum {
    alg: TruncatedAlgebra,
    arity: usize,
    terms: Vec<(i64, Vec<AlgElem>)>,
}

impl fmt::Debug for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, us)) in self.terms.iter().enumerate() {
            let body: Vec<String> = us.iter().map(|u| u.to_string()).collect();
            let body = format!("{{{}}}", body.join(", "));
            match (i, *c) {
                (0, 1) => write!(f, "{body}")?,
                (0, -1) => write!(f, "-{body}")?,
                (0, c) => write!(f, "{c}*{body}")?,
                (_, 1) => write!(f, " + {body}")?,
                (_, -1) => write!(f, " - {body}")?,
                (_, c) if c < 0 => write!(f, " - {}*{body}", -c)?,
                (_, c) => write!(f, " + {c}*{body}")?,
            }
        }
        Ok(())
    }
}

impl SymbolSum {
    pub fn zero(alg: &TruncatedAlgebra, arity: usize) -> Self {
        SymbolSum { alg: alg.clone(), arity, terms: Vec::new() }
    }

    pub fn single(entries: Vec<AlgElem>) -> Result<Self> {
        let alg = entries.first().ok_or(Error::ArityMismatch { expected: 1, found: 0 })?.algebra().clone();
        let mut s = SymbolSum::zero(&alg, entries.len());
        s.push(1, entries)?;
        Ok(s)
    }

    pub fn push(&mut self, coeff: i64, entries: Vec<AlgElem>) -> Result<()> {
        if entries.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: entries.len() });
        }
        for u in &entries {
            if u.algebra() != &self.alg {
                return Err(Error::AlgebraMismatch);
            }
            if !u.is_unit() {
                return Err(Error::NotAUnit);
            }
        }
        if coeff != 0 {
            self.terms.push((coeff, entries));
        }
        Ok(())
    }

    pub fn add(&self, other: &SymbolSum) -> Result<SymbolSum> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> SymbolSum {
        let terms = if k == 0 { Vec::new() } else { self.terms.iter().map(|(c, us)| (c * k, us.clone())).collect() };
        SymbolSum { alg: self.alg.clone(), arity: self.arity, terms }
    }

    /// Entries in reverse order, for two-entry symbols.
    pub fn swapped(&self) -> Result<SymbolSum> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, found: self.arity });
        }
        let terms = self.terms.iter().map(|(c, us)| (*c, vec![us[1].clone(), us[0].clone()])).collect();
        Ok(SymbolSum { alg: self.alg.clone(), arity: 2, terms })
    }

    /// Image under a ring homomorphism applied entrywise.
    pub fn map(&self, sub: &Substitution) -> Result<SymbolSum> {
        let mut out = SymbolSum::zero(sub.target(), self.arity);
        for (c, us) in &self.terms {
            let img = us.iter().map(|u| sub.apply(u)).collect::<Result<Vec<_>>>()?;
            out.push(*c, img)?;
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(i64, Vec<AlgElem>)] {
        &self.terms
    }
}

/// `sum c * dlog(u_1) ^ ... ^ dlog(u_k)`.
pub fn dlog_symbol(s: &SymbolSum) -> Result<Form> {
    let mut acc = Form::zero(&s.alg, s.arity);
    for (c, us) in &s.terms {
        let mut w = Form::from_elem(&s.alg.one());
        for u in us {
            w = w.wedge(&dlog(u)?)?;
        }
        acc = acc.add(&w.scale(&Q::from_integer((*c).into())))?;
    }
    Ok(acc)
}

/// Which nilpotent slot of an expanded tensor carries the logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotRule {
    First,
    Last,
}

#[derive(Clone, Debug)]
pub struct BlochClass {
    /// Canonical representative in `Omega^n_{R,I} / d Omega^{n-1}_{R,I}`.
    pub representative: Form,
    /// The form before passing to the class.
    pub raw: Form,
    /// Tensors of base units dropped by the expansion, merged.
    pub base_component: Vec<(i64, Vec<AlgElem>)>,
}

impl BlochClass {
    pub fn is_zero(&self) -> bool {
        self.representative.is_zero()
    }

    /// The base tensors as a symbol sum.
    pub fn base_symbol(&self) -> SymbolSum {
        let alg = self.raw.algebra();
        let arity = self.raw.degree() + 1;
        SymbolSum { alg: alg.clone(), arity, terms: self.base_component.clone() }
    }
}

pub fn bloch(s: &SymbolSum) -> Result<BlochClass> {
    bloch_with(s, SlotRule::First)
}

/// Expand each tuple through `u = s (1 + x)` and apply
/// `{r_1, .., 1 + x (slot i), .., r_n} -> (-1)^i log(1 + x) dlog r_1 ^ .. ^ dlog r_n`
/// on every sub-tensor with a nilpotent slot.
pub fn bloch_with(s: &SymbolSum, rule: SlotRule) -> Result<BlochClass> {
    let alg = &s.alg;
    let k = s.arity;
    if k == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    let mut raw = Form::zero(alg, k - 1);
    let mut base: Vec<(i64, Vec<AlgElem>)> = Vec::new();
    for (c, us) in &s.terms {
        let mut base_parts = Vec::with_capacity(k);
        let mut one_plus = Vec::with_capacity(k);
        for u in us {
            let (b, x) = u.unit_split()?;
            one_plus.push((alg.one().add(&x)?, x));
            base_parts.push(b);
        }
        match base.iter_mut().find(|(_, t)| *t == base_parts) {
            Some(e) => e.0 += c,
            None => base.push((*c, base_parts.clone())),
        }
        for mask in 1u32..1 << k {
            if (0..k).any(|i| mask >> i & 1 == 1 && one_plus[i].1.is_zero()) {
                continue;
            }
            let slot = match rule {
                SlotRule::First => mask.trailing_zeros() as usize,
                SlotRule::Last => 31 - mask.leading_zeros() as usize,
            };
            let mut w = Form::from_elem(&one_plus[slot].1.log1p()?);
            for i in 0..k {
                if i == slot {
                    continue;
                }
                let r = if mask >> i & 1 == 1 { &one_plus[i].0 } else { &base_parts[i] };
                w = w.wedge(&dlog(r)?)?;
            }
            let sign = if slot % 2 == 0 { *c } else { -*c };
            raw = raw.add(&w.scale(&Q::from_integer(sign.into())))?;
        }
    }
    base.retain(|(c, _)| *c != 0);
    let representative = quotient_class(&raw, &RelativeIdealSpec::Full)?;
    Ok(BlochClass { representative, raw, base_component: base })
}

/// `zeta(a, x) = {a + x, 1 - a - x} - {a, 1 - a}`.
pub fn steinberg_element(a: &AlgElem, x: &AlgElem) -> Result<SymbolSum> {
    if !x.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let alg = a.algebra();
    let one = alg.one();
    let ax = a.add(x)?;
    let mut s = SymbolSum::zero(alg, 2);
    s.push(1, vec![ax.clone(), one.sub(&ax)?])?;
    s.push(-1, vec![a.clone(), one.sub(a)?])?;
    Ok(s)
}

fn is_base(a: &AlgElem) -> bool {
    a.augment() == *a
}

/// `phi_p(a db) = {1 + a b t^p, b}`.
pub fn phi_p(a: &AlgElem, b: &AlgElem, p: u32) -> Result<SymbolSum> {
    let alg = a.algebra();
    if alg.nilpotents() != 1 {
        return Err(Error::InvalidExponents("phi_p needs a single nilpotent generator".into()));
    }
    if !is_base(a) || !is_base(b) {
        return Err(Error::InvalidExponents("phi_p takes base-ring arguments".into()));
    }
    if p == 0 {
        return Err(Error::InvalidExponents("p must be at least 1".into()));
    }
    if alg.bound() <= p {
        return Err(Error::TooShallow);
    }
    if !b.is_unit() {
        return Err(Error::NotAUnit);
    }
    let x = a.mul(b)?.mul(&alg.t(0).pow(p))?;
    let mut s = SymbolSum::zero(alg, 2);
    s.push(1, vec![alg.one().add(&x)?, b.clone()])?;
    Ok(s)
}

/// `Q[a, b][t] / t^n` with free parameters `a, b`.
pub fn parametric_line(n: u32) -> Result<TruncatedAlgebra> {
    TruncatedAlgebra::new(AlgebraSpec::truncated(1, n).param("a", false).param("b", false))
}

fn one_plus_monomial(alg: &TruncatedAlgebra, param: &str, e: u32) -> Result<AlgElem> {
    alg.one().add(&alg.var(param)?.mul(&alg.t(0).pow(e))?)
}

#[derive(Clone, Debug)]
pub struct KeyIdentityReport {
    pub i: u32,
    pub j: u32,
    pub algebra: TruncatedAlgebra,
    /// `(i+j) B{1+a t^i, 1+b t^j} - t^(i+j) (i a db - j b da)` before the cutoff.
    pub difference: Form,
    pub certificate: ExactnessCertificate,
    pub certificate_checked: bool,
    pub passed: bool,
}

/// `(i+j) {1 + a t^i, 1 + b t^j} = phi_{i+j}(i a db - j b da)` on Bloch classes
/// modulo internal degrees above `i + j`.
pub fn verify_key_identity(i: u32, j: u32) -> Result<KeyIdentityReport> {
    if i == 0 || j == 0 {
        return Err(Error::InvalidExponents(format!("need i, j >= 1, got ({i}, {j})")));
    }
    let p = i + j;
    let alg = parametric_line(p + 1)?;
    let sym = SymbolSum::single(vec![one_plus_monomial(&alg, "a", i)?, one_plus_monomial(&alg, "b", j)?])?;
    let b = bloch(&sym)?;
    let a_ = alg.var("a")?;
    let b_ = alg.var("b")?;
    let tp = alg.t(0).pow(p);
    let target = d_elem(&b_)
        .mul_elem(&a_.scale(&Q::from_integer(i.into())))?
        .sub(&d_elem(&a_).mul_elem(&b_.scale(&Q::from_integer(j.into())))?)?
        .mul_elem(&tp)?;
    let difference = b.raw.scale(&Q::from_integer(p.into())).sub(&target)?;
    let certificate = is_exact(&difference, &RelativeIdealSpec::Full, Some(p))?;
    let certificate_checked = certificate.verify(&difference, &RelativeIdealSpec::Full, Some(p))?;
    let passed = certificate.is_exact() && certificate_checked;
    Ok(KeyIdentityReport { i, j, algebra: alg, difference, certificate, certificate_checked, passed })
}

#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub p: u32,
    pub i: u32,
    pub j: u32,
    pub representative: Form,
    pub zero: bool,
    /// For a nonzero class: a functional certifying it.
    pub witness: Option<Witness>,
    pub certificate_checked: bool,
}

/// Bloch class of `{1 + a t^i, 1 + b t^j}` in `Q[a, b][t] / t^p`.
pub fn filtration_class(p: u32, i: u32, j: u32) -> Result<FiltrationReport> {
    if p == 0 || i == 0 || j == 0 {
        return Err(Error::InvalidExponents(format!("need p, i, j >= 1, got ({p}, {i}, {j})")));
    }
    let alg = parametric_line(p)?;
    let sym = SymbolSum::single(vec![one_plus_monomial(&alg, "a", i)?, one_plus_monomial(&alg, "b", j)?])?;
    let b = bloch(&sym)?;
    let cert = is_exact(&b.raw, &RelativeIdealSpec::Full, None)?;
    let certificate_checked = cert.verify(&b.raw, &RelativeIdealSpec::Full, None)?;
    let witness = match cert {
        ExactnessCertificate::NotExact { witness } => Some(witness),
        ExactnessCertificate::Exact { .. } => None,
    };
    Ok(FiltrationReport { p, i, j, zero: b.is_zero(), representative: b.representative, witness, certificate_checked })
}

/// Vanishing of `{1 + a t^i, 1 + b t^j}` modulo `t^p` when `i + j >= p`.
pub fn verify_filtration_vanishing(p: u32, i: u32, j: u32) -> Result<FiltrationReport> {
    if i + j < p {
        return Err(Error::FiltrationRange);
    }
    filtration_class(p, i, j)
}

/// A pair with `i + j = p - 1` whose class modulo `t^p` is nonzero.
pub fn filtration_strictness(p: u32) -> Result<Option<FiltrationReport>> {
    if p < 3 {
        return Err(Error::InvalidExponents("strictness needs p >= 3".into()));
    }
    for i in 1..p - 1 {
        let rep = filtration_class(p, i, p - 1 - i)?;
        if !rep.zero && rep.witness.is_some() && rep.certificate_checked {
            return Ok(Some(rep));
        }
    }
    Ok(None)
}

/// `B({u, v} + {v, u}) = 0` for every two-entry tuple.
pub fn verify_skew(s: &SymbolSum) -> Result<bool> {
    let sum = s.add(&s.swapped()?)?;
    Ok(bloch(&sum)?.is_zero())
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub degree: usize,
    pub generators: usize,
    pub rank: usize,
    pub target_dim: usize,
    pub spans: bool,
}

/// Bloch images of `{exp(x r_1 .. r_n), r_1, .., r_n}` with `x` running over
/// monomials of the augmentation ideal and `r_k` over invertible parameters and
/// elements `1 + x`; checks they span the target within the parameter window.
/// The monomials `x` range over the parameter window widened by `n`.
pub fn surjectivity_witnesses(alg: &TruncatedAlgebra, n: usize, param_bound: i32) -> Result<SurjectivityReport> {
    let m = alg.nilpotents();
    let k = alg.num_params();
    let mut xs: Vec<AlgElem> = Vec::new();
    let mut param_exps: Vec<Vec<i32>> = vec![Vec::new()];
    for j in 0..k {
        let reach = param_bound + n as i32;
        let lo = if alg.param_invertible(j) { -reach } else { 0 };
        param_exps = param_exps
            .into_iter()
            .flat_map(|p| {
                (lo..=reach).map(move |e| {
                    let mut p = p.clone();
                    p.push(e);
                    p
                })
            })
            .collect();
    }
    for e in crate::algebra::monomials_below(m, alg.bound()) {
        if e.iter().sum::<u32>() == 0 {
            continue;
        }
        for p in &param_exps {
            let x = alg.monomial(Monomial::new(e.clone(), p.clone()))?;
            if !x.is_zero() && !xs.contains(&x) {
                xs.push(x);
            }
        }
    }
    let mut units: Vec<AlgElem> =
        (0..k).filter(|j| alg.param_invertible(*j)).map(|j| alg.var(&alg.names().params[j].clone())).collect::<Result<_>>()?;
    for x in &xs {
        units.push(alg.one().add(x)?);
    }
    let mut classes = Vec::new();
    for combo in combinations(units.len(), n) {
        let rs: Vec<AlgElem> = combo.iter().map(|i| units[*i].clone()).collect();
        let mut prod = alg.one();
        for r in &rs {
            prod = prod.mul(r)?;
        }
        for x in &xs {
            let mut entries = vec![x.mul(&prod)?.exp_nil()?];
            entries.extend(rs.iter().cloned());
            classes.push(bloch(&SymbolSum::single(entries)?)?.representative);
        }
    }
    let mut targets = Vec::new();
    for b in relative_basis_bounded(alg, &RelativeIdealSpec::Full, n, param_bound)? {
        let c = quotient_class(&b, &RelativeIdealSpec::Full)?;
        if !c.is_zero() {
            targets.push(c);
        }
    }
    let target_dim = forms_rank(&targets);
    let rank = forms_rank(&classes);
    let mut all = classes.clone();
    all.extend(targets.iter().cloned());
    let spans = forms_rank(&all) == rank && (alg.is_parametric() || rank == target_dim);
    Ok(SurjectivityReport { degree: n, generators: classes.len(), rank, target_dim, spans })
}

fn combinations(total: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, total: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..total {
            cur.push(i);
            rec(i + 1, total, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, total, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    fn dual() -> TruncatedAlgebra {
        TruncatedAlgebra::new(AlgebraSpec::truncated(1, 2).param("a", true)).unwrap()
    }

    #[test]
    fn dual_numbers_symbol() {
        let alg = dual();
        let a = alg.var("a").unwrap();
        let t = alg.t(0);
        let u = alg.one().add(&a.mul(&t).unwrap()).unwrap();
        let s = SymbolSum::single(vec![u, a.clone()]).unwrap();
        let b = bloch(&s).unwrap();
        assert_eq!(b.raw.to_string(), "t*da");
        assert!(!b.is_zero());
        assert_eq!(b.base_component.len(), 1);
    }

    #[test]
    fn key_identity_small() {
        let r = verify_key_identity(1, 1).unwrap();
        assert!(r.passed);
        match &r.certificate {
            ExactnessCertificate::Exact { primitive } => {
                let alg = &r.algebra;
                let expect = alg.var("a").unwrap().mul(&alg.var("b").unwrap()).unwrap().mul(&alg.t(0).pow(2)).unwrap();
                assert_eq!(primitive.cutoff(2).unwrap().to_string(), Form::from_elem(&expect).to_string());
            }
            _ => panic!("expected exact"),
        }
    }

    #[test]
    fn filtration_edges() {
        assert!(verify_filtration_vanishing(3, 2, 1).unwrap().zero);
        let strict = filtration_strictness(3).unwrap().unwrap();
        assert!(!strict.zero);
        assert!(matches!(verify_filtration_vanishing(4, 1, 1), Err(Error::FiltrationRange)));
    }

    #[test]
    fn steinberg_small() {
        let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 3)).unwrap();
        let z = steinberg_element(&alg.int(2), &alg.t(0)).unwrap();
        assert!(bloch(&z).unwrap().is_zero());
    }

    #[test]
    fn skew_and_arity() {
        let alg = dual();
        let a = alg.var("a").unwrap();
        let u = alg.one().add(&alg.t(0)).unwrap();
        let s = SymbolSum::single(vec![u.clone(), a.clone()]).unwrap();
        assert!(verify_skew(&s).unwrap());
        let mut bad = SymbolSum::zero(&alg, 2);
        assert!(matches!(bad.push(1, vec![u.clone()]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(bad.push(1, vec![u, alg.t(0)]), Err(Error::NotAUnit)));
        let _ = Form::generator(&alg, Var::Nil(0));
    }

    #[test]
    fn phi_p_guards() {
        let alg = parametric_line(3).unwrap();
        let a = alg.var("a").unwrap();
        assert!(matches!(phi_p(&a, &alg.one(), 3), Err(Error::TooShallow)));
        assert!(phi_p(&a, &alg.one(), 2).is_ok());
    }

    #[test]
    fn surjective_dual_numbers() {
        let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 4)).unwrap();
        let r = surjectivity_witnesses(&alg, 1, 1).unwrap();
        assert!(r.spans);
        assert_eq!(r.rank, r.target_dim);
    }
}
