//! Truncated nilpotent algebras `R = S[t1..tm]/J` over a parameter base ring
//! `S = Q[a, b, ...]` (Laurent in the parameters declared invertible).
//!
//! Two reduction engines back the normal form:
//!
//! * monomial ideals (the only mode allowed with parameters): a monomial is
//!   zero iff a generator divides it;
//! * general ideals (parameter-free): the rational span of the ideal inside the
//!   space of monomials of degree `< N` is kept in reduced echelon form and
//!   normal forms are remainders modulo it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::FormCache;
use crate::linalg::{by_size, Echelon, SparseVec, Q};
use crate::poly::{Monomial, Poly, Var, VarNames};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(default)]
    pub invertible: bool,
}

/// Description of `S[t1..tm]/J`. Ideal generators are polynomials in the
/// nilpotent variables only (their monomials carry no parameter exponents).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec {
    pub nilpotents: usize,
    pub bound: u32,
    pub ideal: Vec<Poly>,
    pub monomial_ideal: bool,
    pub params: Vec<ParamSpec>,
}

/// All exponent vectors in `m` variables of total degree exactly `d`, in
/// ascending graded-lex order.
pub fn monomials_of_degree(m: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(m: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == m {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=d {
            prefix.push(e);
            rec(m, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(m, d, &mut Vec::new(), &mut out);
    out
}

/// All exponent vectors of total degree `< window`, ascending graded-lex.
pub fn monomials_below(m: usize, window: u32) -> Vec<Vec<u32>> {
    (0..window).flat_map(|d| monomials_of_degree(m, d)).collect()
}

pub(crate) fn nil_mono(e: &[u32]) -> Monomial {
    Monomial::new(e.to_vec(), Vec::new())
}

impl AlgebraSpec {
    /// `S[t1..tm]/(t1..tm)^N`.
    pub fn truncated(m: usize, n: u32) -> Self {
        AlgebraSpec { nilpotents: m, bound: n, ideal: Self::power_generators(m, n), monomial_ideal: true, params: Vec::new() }
    }

    /// Arbitrary ideal; the monomial flag is set when every generator is a
    /// single monomial.
    pub fn with_ideal(m: usize, n: u32, ideal: Vec<Poly>) -> Self {
        let monomial_ideal = ideal.iter().all(|g| g.len() == 1);
        AlgebraSpec { nilpotents: m, bound: n, ideal, monomial_ideal, params: Vec::new() }
    }

    pub fn param(mut self, name: &str, invertible: bool) -> Self {
        self.params.push(ParamSpec { name: name.to_string(), invertible });
        self
    }

    pub fn power_generators(m: usize, n: u32) -> Vec<Poly> {
        monomials_of_degree(m, n).into_iter().map(|e| Poly::term(Q::one(), nil_mono(&e))).collect()
    }

    pub fn names(&self) -> VarNames {
        VarNames::standard(self.nilpotents, self.params.iter().map(|p| p.name.clone()).collect())
    }

    pub fn nil_names(&self) -> VarNames {
        VarNames::standard(self.nilpotents, Vec::new())
    }

    pub fn is_parametric(&self) -> bool {
        !self.params.is_empty()
    }
}

/// The rational span of an ideal inside the monomials of degree `< window`.
#[derive(Clone, Debug)]
pub(crate) struct IdealSpan {
    pub monos: Vec<Vec<u32>>,
    pub index: HashMap<Vec<u32>, usize>,
    pub span: Echelon,
}

impl IdealSpan {
    pub fn build(m: usize, window: u32, gens: &[Poly]) -> Self {
        let monos = monomials_below(m, window);
        let index: HashMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut vecs = Vec::new();
        for g in gens {
            let Some(lo) = g.min_nil_degree() else { continue };
            for u in &monos {
                if u.iter().sum::<u32>() + lo >= window {
                    break;
                }
                let p = g.mul_monomial(&nil_mono(u));
                let v = Self::to_vec_with(&index, window, &p);
                if !v.is_empty() {
                    vecs.push(v);
                }
            }
        }
        let mut span = Echelon::new();
        for v in by_size(vecs) {
            span.insert(&v);
        }
        IdealSpan { monos, index, span }
    }

    fn to_vec_with(index: &HashMap<Vec<u32>, usize>, window: u32, p: &Poly) -> SparseVec {
        let mut v: Vec<(usize, Q)> = p.terms().filter(|(m, _)| m.nil_degree() < window).map(|(m, c)| (index[&m.nil], c.clone())).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    pub fn to_vec(&self, p: &Poly) -> SparseVec {
        let window = self.monos.last().map_or(0, |e| e.iter().sum::<u32>() + 1);
        Self::to_vec_with(&self.index, window, p)
    }

    pub fn decode(&self, v: &[(usize, Q)], k: usize) -> Poly {
        Poly::from_terms(v.iter().map(|(i, c)| (Monomial::new(self.monos[*i].clone(), vec![0; k]), c.clone())))
    }

    pub fn quotient_dim(&self) -> usize {
        self.monos.len() - self.span.rank()
    }

    /// Whether every monomial of total degree `d` lies in the span.
    pub fn contains_degree(&self, d: u32) -> bool {
        self.monos.iter().enumerate().filter(|(_, e)| e.iter().sum::<u32>() == d).all(|(i, _)| self.span.contains(&[(i, Q::one())]))
    }
}

#[derive(Debug)]
enum Reducer {
    Monomial { gens: Vec<Vec<u32>> },
    General(IdealSpan),
}

pub(crate) struct AlgebraInner {
    spec: AlgebraSpec,
    names: VarNames,
    reducer: Reducer,
    pub(crate) forms: FormCache,
}

/// Handle to a built algebra. Cloning is cheap; the reduction engine and the
/// form presentations are shared and read-only once published.
#[derive(Clone)]
pub struct TruncatedAlgebra {
    inner: Arc<AlgebraInner>,
}

impl PartialEq for TruncatedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl Eq for TruncatedAlgebra {}

impl fmt::Debug for TruncatedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.inner.spec;
        let ideal: Vec<String> = s.ideal.iter().map(|g| g.display(&s.nil_names())).collect();
        f.debug_struct("TruncatedAlgebra")
            .field("nilpotents", &s.nilpotents)
            .field("bound", &s.bound)
            .field("ideal", &ideal)
            .field("params", &s.params)
            .finish()
    }
}

impl TruncatedAlgebra {
    pub fn new(spec: AlgebraSpec) -> Result<Self> {
        let m = spec.nilpotents;
        let n = spec.bound;
        if m == 0 {
            return Err(Error::MalformedSpec("at least one nilpotent generator is required".into()));
        }
        if n == 0 {
            return Err(Error::MalformedSpec("nilpotency bound must be at least 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let nil_names = spec.nil_names();
        for p in &spec.params {
            if !seen.insert(p.name.clone()) || nil_names.lookup(&p.name).is_some() {
                return Err(Error::MalformedSpec(format!("duplicate variable name `{}`", p.name)));
            }
            let rest = p.name.strip_prefix('d').unwrap_or("");
            if nil_names.lookup(rest).is_some() || spec.params.iter().any(|q| q.name == rest) {
                return Err(Error::MalformedSpec(format!("parameter name `{}` clashes with a differential", p.name)));
            }
        }
        for g in &spec.ideal {
            if g.terms().any(|(mono, _)| mono.nil.len() != m || !mono.params.is_empty()) {
                return Err(Error::MalformedSpec("ideal generators must be polynomials in t1..tm only".into()));
            }
            if g.terms().any(|(mono, _)| mono.nil_degree() == 0) {
                return Err(Error::ConstantGenerator(g.display(&nil_names)));
            }
        }
        let gens: Vec<&Poly> = spec.ideal.iter().filter(|g| !g.is_zero()).collect();
        if spec.monomial_ideal {
            if let Some(g) = gens.iter().find(|g| g.len() != 1) {
                return Err(Error::NotMonomial(g.display(&nil_names)));
            }
        } else if spec.is_parametric() {
            return Err(Error::ParametricNeedsMonomialIdeal);
        }

        let reducer = if spec.monomial_ideal {
            let gens: Vec<Vec<u32>> = gens.iter().map(|g| g.leading().unwrap().0.nil.clone()).collect();
            for e in monomials_of_degree(m, n) {
                if !gens.iter().any(|g| e.iter().zip(g).all(|(a, b)| a >= b)) {
                    return Err(Error::PowerNotInIdeal(n));
                }
            }
            Reducer::Monomial { gens }
        } else {
            // m^N ⊆ J is checked locally: every degree-N monomial must lie in
            // J + m^(N+1). By Nakayama this gives m^N ⊆ J in the power series
            // ring, where the quotient equals Q[t]/(J + m^N).
            let owned: Vec<Poly> = gens.iter().map(|g| (*g).clone()).collect();
            let wide = IdealSpan::build(m, n + 1, &owned);
            if !wide.contains_degree(n) {
                return Err(Error::PowerNotInIdeal(n));
            }
            Reducer::General(IdealSpan::build(m, n, &owned))
        };
        let names = spec.names();
        Ok(TruncatedAlgebra { inner: Arc::new(AlgebraInner { spec, names, reducer, forms: FormCache::default() }) })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.inner.spec
    }

    pub fn names(&self) -> &VarNames {
        &self.inner.names
    }

    pub(crate) fn inner(&self) -> &AlgebraInner {
        &self.inner
    }

    pub fn nilpotents(&self) -> usize {
        self.inner.spec.nilpotents
    }

    pub fn bound(&self) -> u32 {
        self.inner.spec.bound
    }

    pub fn num_params(&self) -> usize {
        self.inner.spec.params.len()
    }

    pub fn is_monomial(&self) -> bool {
        matches!(self.inner.reducer, Reducer::Monomial { .. })
    }

    pub fn is_parametric(&self) -> bool {
        self.inner.spec.is_parametric()
    }

    pub fn param_invertible(&self, j: usize) -> bool {
        self.inner.spec.params[j].invertible
    }

    /// Monomial generators of the ideal (monomial mode only).
    pub(crate) fn monomial_generators(&self) -> Option<&[Vec<u32>]> {
        match &self.inner.reducer {
            Reducer::Monomial { gens } => Some(gens),
            Reducer::General(_) => None,
        }
    }

    /// Whether a monomial is a legal monomial of this algebra that is not
    /// killed outright (monomial mode), ignoring linear relations.
    pub(crate) fn monomial_survives(&self, mono: &Monomial) -> bool {
        if mono.nil_degree() >= self.bound() {
            return false;
        }
        match &self.inner.reducer {
            Reducer::Monomial { gens } => !gens.iter().any(|g| mono.nil_divisible_by(g)),
            Reducer::General(_) => true,
        }
    }

    pub(crate) fn monomial_is_legal(&self, mono: &Monomial) -> bool {
        mono.params.iter().enumerate().all(|(j, e)| *e >= 0 || self.param_invertible(j))
    }

    pub fn one_monomial(&self) -> Monomial {
        Monomial::one(self.nilpotents(), self.num_params())
    }

    /// Dimension over `Q` (parameter-free algebras only).
    pub fn basis_size(&self) -> Result<usize> {
        if self.is_parametric() {
            return Err(Error::ParamFreeRequired);
        }
        Ok(match &self.inner.reducer {
            Reducer::Monomial { .. } => monomials_below(self.nilpotents(), self.bound())
                .into_iter()
                .filter(|e| self.monomial_survives(&Monomial::new(e.clone(), Vec::new())))
                .count(),
            Reducer::General(span) => span.quotient_dim(),
        })
    }

    /// Canonical representative of a polynomial.
    pub fn reduce(&self, p: &Poly) -> Result<AlgElem> {
        let m = self.nilpotents();
        let k = self.num_params();
        for (mono, _) in p.terms() {
            if mono.nil.len() != m || mono.params.len() != k {
                return Err(Error::UnknownVariable("polynomial uses variables outside this algebra".into()));
            }
            if !self.monomial_is_legal(mono) {
                let j = mono.params.iter().position(|e| *e < 0).unwrap();
                return Err(Error::NegativeExponent(self.names().params[j].clone()));
            }
        }
        Ok(AlgElem { alg: self.clone(), poly: self.normal_form(p) })
    }

    pub(crate) fn normal_form(&self, p: &Poly) -> Poly {
        match &self.inner.reducer {
            Reducer::Monomial { .. } => p.filter(|mono| self.monomial_survives(mono)),
            Reducer::General(span) => {
                let v = span.to_vec(p);
                let r = span.span.reduce(&v);
                span.decode(&r, 0)
            }
        }
    }

    pub fn elem(&self, p: Poly) -> Result<AlgElem> {
        self.reduce(&p)
    }

    pub fn zero(&self) -> AlgElem {
        AlgElem { alg: self.clone(), poly: Poly::zero() }
    }

    pub fn one(&self) -> AlgElem {
        self.constant(Q::one())
    }

    pub fn constant(&self, c: Q) -> AlgElem {
        AlgElem { alg: self.clone(), poly: Poly::constant(c, self.nilpotents(), self.num_params()) }
    }

    pub fn int(&self, c: i64) -> AlgElem {
        self.constant(Q::from_integer(c.into()))
    }

    pub fn monomial(&self, mono: Monomial) -> Result<AlgElem> {
        self.reduce(&Poly::term(Q::one(), mono))
    }

    /// The image of the i-th nilpotent generator (0-based).
    pub fn t(&self, i: usize) -> AlgElem {
        let mut mono = self.one_monomial();
        mono.nil[i] = 1;
        AlgElem { alg: self.clone(), poly: self.normal_form(&Poly::term(Q::one(), mono)) }
    }

    /// A variable by name: `t`, `t1..tm`, or a declared parameter.
    pub fn var(&self, name: &str) -> Result<AlgElem> {
        match self.names().lookup(name) {
            Some(Var::Nil(i)) => Ok(self.t(i)),
            Some(Var::Param(j)) => {
                let mut mono = self.one_monomial();
                mono.params[j] = 1;
                Ok(AlgElem { alg: self.clone(), poly: Poly::term(Q::one(), mono) })
            }
            None => Err(Error::UnknownVariable(name.to_string())),
        }
    }

    pub fn format_poly(&self, p: &Poly) -> String {
        p.display(self.names())
    }
}

/// A normal-formed element of a [`TruncatedAlgebra`].
#[derive(Clone)]
pub struct AlgElem {
    alg: TruncatedAlgebra,
    poly: Poly,
}

impl PartialEq for AlgElem {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.poly == other.poly
    }
}

impl fmt::Debug for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.display(self.alg.names()))
    }
}

fn factorial_inv(k: u32) -> Q {
    let mut f = Q::one();
    for i in 2..=k {
        f *= Q::from_integer(i.into());
    }
    Q::one() / f
}

impl AlgElem {
    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check(&self, other: &AlgElem) -> Result<()> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    fn wrap(&self, poly: Poly) -> AlgElem {
        AlgElem { alg: self.alg.clone(), poly }
    }

    pub fn add(&self, other: &AlgElem) -> Result<AlgElem> {
        self.check(other)?;
        Ok(self.wrap(self.poly.add(&other.poly)))
    }

    pub fn sub(&self, other: &AlgElem) -> Result<AlgElem> {
        self.check(other)?;
        Ok(self.wrap(self.poly.sub(&other.poly)))
    }

    pub fn neg(&self) -> AlgElem {
        self.wrap(self.poly.neg())
    }

    pub fn scale(&self, c: &Q) -> AlgElem {
        self.wrap(self.poly.scale(c))
    }

    pub fn mul(&self, other: &AlgElem) -> Result<AlgElem> {
        self.check(other)?;
        let p = self.poly.mul_truncated(&other.poly, Some(self.alg.bound()));
        Ok(self.wrap(self.alg.normal_form(&p)))
    }

    pub(crate) fn mul_unchecked(&self, other: &AlgElem) -> AlgElem {
        self.mul(other).expect("same algebra")
    }

    pub fn pow(&self, e: u32) -> AlgElem {
        let mut acc = self.alg.one();
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Nilpotent-degree-zero part, the image under `R -> S -> R`.
    pub fn augment(&self) -> AlgElem {
        self.wrap(self.poly.nil_degree_zero_part())
    }

    pub fn is_nilpotent(&self) -> bool {
        self.poly.terms().all(|(m, _)| m.nil_degree() > 0)
    }

    /// The augmentation as a unit of `S`: a nonzero rational times a monomial
    /// in invertible parameters.
    fn base_unit_inverse(&self) -> Result<AlgElem> {
        let s = self.poly.nil_degree_zero_part();
        if s.len() != 1 {
            return Err(Error::NotAUnit);
        }
        let (mono, c) = s.terms().next().unwrap();
        if mono.params.iter().enumerate().any(|(j, e)| *e != 0 && !self.alg.param_invertible(j)) {
            return Err(Error::NotAUnit);
        }
        let inv = Monomial::new(mono.nil.clone(), mono.params.iter().map(|e| -e).collect());
        Ok(self.wrap(Poly::term(Q::one() / c, inv)))
    }

    pub fn is_unit(&self) -> bool {
        self.base_unit_inverse().is_ok()
    }

    pub fn invert(&self) -> Result<AlgElem> {
        let s_inv = self.base_unit_inverse()?;
        // u = s (1 + x)  =>  u^{-1} = s^{-1} (1 - x + x^2 - ...)
        let x = s_inv.mul_unchecked(self).sub(&self.alg.one())?;
        let minus_x = x.neg();
        let mut acc = self.alg.one();
        let mut power = self.alg.one();
        for _ in 1..self.alg.bound() {
            power = power.mul_unchecked(&minus_x);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(s_inv.mul_unchecked(&acc))
    }

    /// `(s, x)` with `s` the augmentation, `x` nilpotent and `self = s (1 + x)`.
    pub fn unit_split(&self) -> Result<(AlgElem, AlgElem)> {
        let s_inv = self.base_unit_inverse()?;
        let x = s_inv.mul_unchecked(self).sub(&self.alg.one())?;
        Ok((self.augment(), x))
    }

    /// `log(1 + x) = x - x^2/2 + ...` for nilpotent `x`.
    pub fn log1p(&self) -> Result<AlgElem> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let mut acc = self.alg.zero();
        let mut power = self.alg.one();
        for k in 1..self.alg.bound().max(1) {
            power = power.mul_unchecked(self);
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale(&Q::new(sign.into(), k.into())))?;
        }
        Ok(acc)
    }

    /// Truncated exponential `sum y^k / k!` for nilpotent `y`.
    pub fn exp_nil(&self) -> Result<AlgElem> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let mut acc = self.alg.one();
        let mut power = self.alg.one();
        for k in 1..self.alg.bound() {
            power = power.mul_unchecked(self);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&factorial_inv(k)))?;
        }
        Ok(acc)
    }
}

/// A ring homomorphism between truncated algebras given by the images of the
/// source variables. Variables without an explicit image map to the variable
/// of the same name in the target.
#[derive(Clone, Debug)]
pub struct Substitution {
    source: TruncatedAlgebra,
    target: TruncatedAlgebra,
    nil_images: Vec<AlgElem>,
    param_images: Vec<AlgElem>,
    param_inverses: Vec<Option<AlgElem>>,
}

impl Substitution {
    pub fn new<'a>(
        source: &TruncatedAlgebra,
        target: &TruncatedAlgebra,
        images: impl IntoIterator<Item = (&'a str, AlgElem)>,
    ) -> Result<Self> {
        let mut given: BTreeMap<Var, AlgElem> = BTreeMap::new();
        for (name, img) in images {
            let var = source.names().lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if img.algebra() != target {
                return Err(Error::AlgebraMismatch);
            }
            given.insert(var, img);
        }
        let mut resolve = |var: Var, name: &str| -> Result<AlgElem> {
            match given.remove(&var) {
                Some(img) => Ok(img),
                None => target.var(name).map_err(|_| Error::BadSubstitution(format!("no image for `{name}`"))),
            }
        };
        let names = source.names().clone();
        let mut nil_images = Vec::new();
        for i in 0..source.nilpotents() {
            let img = resolve(Var::Nil(i), names.nil_name(i))?;
            if !img.is_nilpotent() {
                return Err(Error::BadSubstitution(format!("image of `{}` is not nilpotent", names.nil_name(i))));
            }
            nil_images.push(img);
        }
        let mut param_images = Vec::new();
        let mut param_inverses = Vec::new();
        for j in 0..source.num_params() {
            let img = resolve(Var::Param(j), &names.params[j])?;
            if source.param_invertible(j) {
                let inv = img.invert().map_err(|_| Error::BadSubstitution(format!("image of `{}` is not a unit", names.params[j])))?;
                param_inverses.push(Some(inv));
            } else {
                param_inverses.push(None);
            }
            param_images.push(img);
        }
        let sub = Substitution { source: source.clone(), target: target.clone(), nil_images, param_images, param_inverses };
        for g in &source.spec().ideal {
            let lifted = g.map_monomials(|mono| Monomial::new(mono.nil.clone(), vec![0; source.num_params()]));
            if !sub.apply_poly(&lifted).is_zero() {
                return Err(Error::BadSubstitution(format!(
                    "ideal generator `{}` does not map to zero",
                    g.display(&source.spec().nil_names())
                )));
            }
        }
        Ok(sub)
    }

    pub fn source(&self) -> &TruncatedAlgebra {
        &self.source
    }

    pub fn target(&self) -> &TruncatedAlgebra {
        &self.target
    }

    pub fn image_of(&self, var: Var) -> &AlgElem {
        match var {
            Var::Nil(i) => &self.nil_images[i],
            Var::Param(j) => &self.param_images[j],
        }
    }

    pub(crate) fn apply_monomial(&self, mono: &Monomial) -> AlgElem {
        let mut acc = self.target.one();
        for (i, e) in mono.nil.iter().enumerate() {
            acc = acc.mul_unchecked(&self.nil_images[i].pow(*e));
        }
        for (j, e) in mono.params.iter().enumerate() {
            let base = if *e < 0 { self.param_inverses[j].as_ref().expect("invertible") } else { &self.param_images[j] };
            acc = acc.mul_unchecked(&base.pow(e.unsigned_abs()));
        }
        acc
    }

    fn apply_poly(&self, p: &Poly) -> AlgElem {
        let mut acc = self.target.zero();
        for (mono, c) in p.terms() {
            acc = acc.add(&self.apply_monomial(mono).scale(c)).expect("same algebra");
        }
        acc
    }

    pub fn apply(&self, a: &AlgElem) -> Result<AlgElem> {
        if a.algebra() != &self.source {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.apply_poly(a.poly()))
    }
}

/// Free-function form of [`Substitution::apply`].
pub fn substitute(a: &AlgElem, map: &Substitution) -> Result<AlgElem> {
    map.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn dual_numbers() -> TruncatedAlgebra {
        TruncatedAlgebra::new(AlgebraSpec::truncated(1, 2)).unwrap()
    }

    fn gk_poly() -> Poly {
        let mono = |a: u32, b: u32| nil_mono(&[a, b]);
        Poly::from_terms([(mono(4, 0), q(1, 1)), (mono(2, 3), q(1, 1)), (mono(0, 5), q(1, 1))])
    }

    fn gk_algebra() -> TruncatedAlgebra {
        let f = gk_poly();
        let mut ideal = vec![f.derivative(Var::Nil(0)), f.derivative(Var::Nil(1))];
        ideal.extend(AlgebraSpec::power_generators(2, 6));
        TruncatedAlgebra::new(AlgebraSpec::with_ideal(2, 6, ideal)).unwrap()
    }

    #[test]
    fn dual_numbers_basis() {
        let r = dual_numbers();
        assert_eq!(r.basis_size().unwrap(), 2);
        assert!(r.t(0).mul(&r.t(0)).unwrap().is_zero());
    }

    #[test]
    fn r32_has_six_monomials() {
        let r = TruncatedAlgebra::new(AlgebraSpec::truncated(2, 3)).unwrap();
        assert_eq!(r.basis_size().unwrap(), 6);
        let t1 = r.t(0);
        let t2 = r.t(1);
        assert!(t1.mul(&t1).unwrap().mul(&t2).unwrap().is_zero());
    }

    #[test]
    fn grauert_kerner_quotient_reduces_generator() {
        let r = gk_algebra();
        // 12, cross-checked against a dense row reduction over all 21 monomials
        assert_eq!(r.basis_size().unwrap(), 12);
        let d1 = gk_poly().derivative(Var::Nil(0));
        assert!(r.reduce(&d1).unwrap().is_zero());
    }

    #[test]
    fn missing_power_is_detected() {
        let spec = AlgebraSpec::with_ideal(1, 3, vec![Poly::term(Q::one(), nil_mono(&[4]))]);
        assert_eq!(TruncatedAlgebra::new(spec).unwrap_err(), Error::PowerNotInIdeal(3));
        let mut spec = AlgebraSpec::with_ideal(1, 2, vec![Poly::from_terms([(nil_mono(&[2]), q(1, 1)), (nil_mono(&[1]), q(1, 1))])]);
        spec.params.push(ParamSpec { name: "a".into(), invertible: false });
        assert_eq!(TruncatedAlgebra::new(spec).unwrap_err(), Error::ParametricNeedsMonomialIdeal);
    }

    #[test]
    fn constant_generator_rejected() {
        let g = Poly::from_terms([(nil_mono(&[0]), q(1, 1)), (nil_mono(&[2]), q(1, 1))]);
        let spec = AlgebraSpec::with_ideal(1, 2, vec![g, Poly::term(Q::one(), nil_mono(&[2]))]);
        assert!(matches!(TruncatedAlgebra::new(spec), Err(Error::ConstantGenerator(_))));
    }

    #[test]
    fn general_ideal_in_non_local_position_is_rejected() {
        // (t - t^2) has no t^N inside, locally t is a unit multiple of t - t^2
        // but t^2 is then also in J + m^3.
        let g = Poly::from_terms([(nil_mono(&[1]), q(1, 1)), (nil_mono(&[2]), q(-1, 1))]);
        let ok = TruncatedAlgebra::new(AlgebraSpec::with_ideal(1, 2, vec![g.clone()])).unwrap();
        assert_eq!(ok.basis_size().unwrap(), 1);
    }

    #[test]
    fn unit_arithmetic() {
        let r = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 3)).unwrap();
        let u = r.one().add(&r.t(0)).unwrap();
        let inv = u.invert().unwrap();
        assert_eq!(inv.to_string(), "t^2 - t + 1");
        assert_eq!(r.int(2).invert().unwrap().to_string(), "1/2");
        assert_eq!(r.t(0).invert().unwrap_err(), Error::NotAUnit);
    }

    #[test]
    fn laurent_parameter_inverse() {
        let r = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 2).param("a", false).param("b", true)).unwrap();
        let a = r.var("a").unwrap();
        let b = r.var("b").unwrap();
        let u = b.mul(&r.one().add(&a.mul(&r.t(0)).unwrap()).unwrap()).unwrap();
        let inv = u.invert().unwrap();
        assert_eq!(inv.to_string(), "-t*a*b^-1 + b^-1");
        assert!(a.invert().is_err());
        let (s, x) = u.unit_split().unwrap();
        assert_eq!(s, b);
        assert_eq!(x.to_string(), "t*a");
    }

    #[test]
    fn log_and_exp_series() {
        let r = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 4)).unwrap();
        assert_eq!(r.t(0).log1p().unwrap().to_string(), "1/3*t^3 - 1/2*t^2 + t");
        assert!(r.zero().log1p().unwrap().is_zero());
        assert_eq!(r.zero().exp_nil().unwrap(), r.one());
        let r3 = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 3)).unwrap();
        assert_eq!(r3.t(0).exp_nil().unwrap().to_string(), "1/2*t^2 + t + 1");
        let r5 = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5).param("a", false)).unwrap();
        let x = r5.var("a").unwrap().mul(&r5.t(0).pow(2)).unwrap();
        assert_eq!(x.log1p().unwrap().to_string(), "-1/2*t^4*a^2 + t^2*a");
        let y = r5.t(0).log1p().unwrap();
        assert_eq!(y.exp_nil().unwrap(), r5.one().add(&r5.t(0)).unwrap());
        assert_eq!(r.one().log1p().unwrap_err(), Error::NotNilpotent);
    }

    #[test]
    fn substitution_examples() {
        // theta_2: x -> t^2 on x*t in Q[t]/t^5
        let src = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5).param("x", false)).unwrap();
        let dst = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 5)).unwrap();
        let theta = Substitution::new(&src, &dst, [("x", dst.t(0).pow(2))]).unwrap();
        let xt = src.var("x").unwrap().mul(&src.t(0)).unwrap();
        assert_eq!(theta.apply(&xt).unwrap(), dst.t(0).pow(3));
        // lambda_3 on 1 + t in Q[t]/t^7
        let r7 = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 7)).unwrap();
        let lam = Substitution::new(&r7, &r7, [("t", r7.t(0).pow(3))]).unwrap();
        let u = r7.one().add(&r7.t(0)).unwrap();
        assert_eq!(lam.apply(&u).unwrap(), r7.one().add(&r7.t(0).pow(3)).unwrap());
        // sigma: R_2 -> R_4, t -> t^3
        let r2 = dual_numbers();
        let r4 = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 4)).unwrap();
        let sigma = Substitution::new(&r2, &r4, [("t", r4.t(0).pow(3))]).unwrap();
        assert_eq!(sigma.apply(&r2.t(0)).unwrap(), r4.t(0).pow(3));
        // t -> 1 + t is not nilpotent; t -> t^1 from R_4 to R_2 breaks t^4 = 0? no, but t -> 1 does
        assert!(matches!(Substitution::new(&r2, &r4, [("t", r4.one())]), Err(Error::BadSubstitution(_))));
        assert!(matches!(Substitution::new(&r4, &r7, [("t", r7.t(0))]), Err(Error::BadSubstitution(_))));
    }
}
