//! Differential forms over a truncated algebra.
//!
//! A form is a finite sum of terms `c * mono * dW` where `dW` is a wedge word
//! in the generators `dt1..dtm, da1..dak`. Forms are always kept in canonical
//! shape: every homogeneous block (or, for general ideals, the whole space) is
//! reduced modulo the relations `J*Omega + dJ ^ Omega`.

mod presentation;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgElem, Substitution, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Q;
use crate::poly::{Monomial, Poly, Var, VarNames};

pub(crate) use presentation::{
    cell_degree, cell_of_term, cells, d_vec, exact_space, key_internal_degree, Cell, ExactSpace, FormCache, Presentation,
};

/// A set of 1-form generators, stored as a bit mask. Bit `g` is `dt_{g+1}` for
/// `g < m` and `da_{g-m}` otherwise; the wedge is taken in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WedgeWord(u64);

impl WedgeWord {
    pub fn empty() -> Self {
        WedgeWord(0)
    }

    pub fn single(g: usize) -> Self {
        WedgeWord(1 << g)
    }

    pub fn from_mask(mask: u64) -> Self {
        WedgeWord(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, g: usize) -> bool {
        self.0 >> g & 1 == 1
    }

    pub fn gens(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |g| self.0 >> g & 1 == 1)
    }

    /// Sorted word and sign for `self ^ other`, `None` if they share a generator.
    pub fn wedge(self, other: WedgeWord) -> Option<(WedgeWord, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0;
        for b in other.gens() {
            swaps += (self.0 >> (b + 1)).count_ones();
        }
        Some((WedgeWord(self.0 | other.0), swaps % 2 == 1))
    }

    /// `dx_g ^ self`: sign from moving `dx_g` into place.
    pub fn insert_front(self, g: usize) -> Option<(WedgeWord, bool)> {
        WedgeWord::single(g).wedge(self)
    }

    /// Counts of dt's per nilpotent and da's per parameter.
    pub fn weights(self, m: usize, k: usize) -> (Vec<u32>, Vec<i32>) {
        let nil = (0..m).map(|g| self.contains(g) as u32).collect();
        let par = (0..k).map(|j| self.contains(m + j) as i32).collect();
        (nil, par)
    }

    pub fn display(self, names: &VarNames) -> String {
        let m = names.nil.len();
        let parts: Vec<String> =
            self.gens().map(|g| if g < m { format!("d{}", names.nil[g]) } else { format!("d{}", names.params[g - m]) }).collect();
        parts.join("∧")
    }
}

/// All words with exactly `n` of the first `total` generators, ascending.
pub(crate) fn words_of_size(total: usize, n: usize) -> Vec<WedgeWord> {
    (0u64..1 << total).filter(|w| w.count_ones() as usize == n).map(WedgeWord).collect()
}

pub type TermKey = (Monomial, WedgeWord);

fn gen_var(m: usize, g: usize) -> Var {
    if g < m {
        Var::Nil(g)
    } else {
        Var::Param(g - m)
    }
}

/// Graded block key of a term: nilpotent multidegree (each `dt_i` counting in
/// `t_i`) followed by parameter multidegree (each `da_j` counting in `a_j`).
pub(crate) fn term_key(term: &TermKey) -> Vec<i32> {
    let (mono, w) = term;
    let m = mono.nil.len();
    let mut key: Vec<i32> = mono.nil.iter().map(|e| *e as i32).collect();
    key.extend(mono.params.iter().copied());
    for g in w.gens() {
        key[g] += 1;
        debug_assert!(g < m + mono.params.len());
    }
    key
}

pub(crate) fn internal_degree_of(term: &TermKey) -> u32 {
    term.0.nil_degree() + term.1.gens().filter(|g| *g < term.0.nil.len()).count() as u32
}

type Terms = BTreeMap<TermKey, Q>;

fn add_into(acc: &mut Terms, key: TermKey, c: Q) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(e) => {
            *e += c;
            if e.is_zero() {
                acc.remove(&key);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

/// De Rham differential on raw terms (no reduction).
pub(crate) fn d_terms<'a>(m: usize, k: usize, terms: impl IntoIterator<Item = (&'a TermKey, &'a Q)>) -> Terms {
    let mut out = Terms::new();
    for ((mono, w), c) in terms {
        for g in 0..m + k {
            if w.contains(g) {
                continue;
            }
            let e = if g < m { mono.nil[g] as i64 } else { mono.params[g - m] as i64 };
            if e == 0 {
                continue;
            }
            let mut m2 = mono.clone();
            if g < m {
                m2.nil[g] -= 1;
            } else {
                m2.params[g - m] -= 1;
            }
            let (w2, neg) = w.insert_front(g).unwrap();
            let mut coeff = c * Q::from_integer(e.into());
            if neg {
                coeff = -coeff;
            }
            add_into(&mut out, (m2, w2), coeff);
        }
    }
    out
}

/// A canonical differential form of fixed degree.
#[derive(Clone)]
pub struct Form {
    alg: TruncatedAlgebra,
    degree: usize,
    terms: Terms,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.degree == other.degree && self.terms == other.terms
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self.terms.iter().rev(), self.alg.names()))
    }
}

pub(crate) fn format_terms<'a>(terms: impl Iterator<Item = (&'a TermKey, &'a Q)>, names: &VarNames) -> String {
    let mut s = String::new();
    for (i, ((mono, w), c)) in terms.enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mut parts = Vec::new();
        if !a.is_one() || (mono.is_one() && w.is_empty()) {
            parts.push(a.to_string());
        }
        if !mono.is_one() {
            parts.push(mono.display(names));
        }
        if !w.is_empty() {
            parts.push(w.display(names));
        }
        s.push_str(&parts.join("*"));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl Form {
    pub fn zero(alg: &TruncatedAlgebra, degree: usize) -> Form {
        Form { alg: alg.clone(), degree, terms: Terms::new() }
    }

    /// Canonical form from raw `(coefficient, monomial, word)` terms.
    pub fn from_terms(alg: &TruncatedAlgebra, degree: usize, terms: impl IntoIterator<Item = (Q, Monomial, WedgeWord)>) -> Result<Form> {
        let mut raw = Terms::new();
        let m = alg.nilpotents();
        let k = alg.num_params();
        for (c, mono, w) in terms {
            if w.len() != degree {
                return Err(Error::MixedDegrees);
            }
            if mono.nil.len() != m || mono.params.len() != k || w.mask() >> (m + k) != 0 {
                return Err(Error::UnknownVariable("term uses variables outside this algebra".into()));
            }
            if !alg.monomial_is_legal(&mono) {
                let j = mono.params.iter().position(|e| *e < 0).unwrap();
                return Err(Error::NegativeExponent(alg.names().params[j].clone()));
            }
            add_into(&mut raw, (mono, w), c);
        }
        Ok(Form::canonical(alg, degree, raw))
    }

    pub(crate) fn canonical(alg: &TruncatedAlgebra, degree: usize, raw: Terms) -> Form {
        let terms = presentation::canonicalize(alg, degree, raw);
        Form { alg: alg.clone(), degree, terms }
    }

    /// A ring element viewed as a 0-form.
    pub fn from_elem(a: &AlgElem) -> Form {
        let terms = a.poly().terms().map(|(mono, c)| ((mono.clone(), WedgeWord::empty()), c.clone())).collect();
        Form { alg: a.algebra().clone(), degree: 0, terms }
    }

    /// The 1-form `dx` for a variable of the algebra.
    pub fn generator(alg: &TruncatedAlgebra, var: Var) -> Form {
        let g = match var {
            Var::Nil(i) => i,
            Var::Param(j) => alg.nilpotents() + j,
        };
        let mut raw = Terms::new();
        raw.insert((alg.one_monomial(), WedgeWord::single(g)), Q::one());
        Form::canonical(alg, 1, raw)
    }

    pub fn algebra(&self) -> &TruncatedAlgebra {
        &self.alg
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&TermKey, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial, w: WedgeWord) -> Q {
        self.terms.get(&(mono.clone(), w)).cloned().unwrap_or_else(Q::zero)
    }

    fn check(&self, other: &Form) -> Result<()> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::MixedDegrees);
        }
        Ok(())
    }

    /// Sum of canonical forms is canonical: reduction is linear.
    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            add_into(&mut terms, k.clone(), c.clone());
        }
        Ok(Form { alg: self.alg.clone(), degree: self.degree, terms })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, f: &Q) -> Form {
        if f.is_zero() {
            return Form::zero(&self.alg, self.degree);
        }
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c * f)).collect();
        Form { alg: self.alg.clone(), degree: self.degree, terms }
    }

    pub fn d(&self) -> Form {
        let raw = d_terms(self.alg.nilpotents(), self.alg.num_params(), &self.terms);
        Form::canonical(&self.alg, self.degree + 1, raw)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        let cap = self.alg.bound();
        let mut raw = Terms::new();
        for ((m1, w1), c1) in &self.terms {
            for ((m2, w2), c2) in &other.terms {
                let Some((w, neg)) = w1.wedge(*w2) else { continue };
                let mono = m1.mul(m2);
                if mono.nil_degree() >= cap {
                    continue;
                }
                let c = c1 * c2;
                add_into(&mut raw, (mono, w), if neg { -c } else { c });
            }
        }
        Ok(Form::canonical(&self.alg, self.degree + other.degree, raw))
    }

    /// Multiplication by a ring element.
    pub fn mul_elem(&self, a: &AlgElem) -> Result<Form> {
        Form::from_elem(a).wedge(self)
    }

    /// Part of internal (nilpotent) degree `i`; `dt` counts one.
    pub fn graded_component(&self, i: u32) -> Result<Form> {
        if !self.alg.is_monomial() {
            return Err(Error::GradedModeRequired);
        }
        Ok(self.filter(|t| internal_degree_of(t) == i))
    }

    /// Drop every term of internal degree above `max`.
    pub fn cutoff(&self, max: u32) -> Result<Form> {
        if !self.alg.is_monomial() {
            return Err(Error::GradedModeRequired);
        }
        Ok(self.filter(|t| internal_degree_of(t) <= max))
    }

    fn filter(&self, keep: impl Fn(&TermKey) -> bool) -> Form {
        let terms = self.terms.iter().filter(|(t, _)| keep(t)).map(|(t, c)| (t.clone(), c.clone())).collect();
        Form { alg: self.alg.clone(), degree: self.degree, terms }
    }

    /// Internal degrees occurring, ascending.
    pub fn internal_degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.terms.keys().map(internal_degree_of).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Image under the map of forms induced by a ring homomorphism.
    pub fn pushforward(&self, sub: &Substitution) -> Result<Form> {
        if sub.source() != &self.alg {
            return Err(Error::AlgebraMismatch);
        }
        let target = sub.target();
        let m = self.alg.nilpotents();
        let mut diffs: HashMap<usize, Form> = HashMap::new();
        let mut acc = Form::zero(target, self.degree);
        for ((mono, w), c) in &self.terms {
            let mut f = Form::from_elem(&sub.apply_monomial(mono).scale(c));
            for g in w.gens() {
                let dg = diffs.entry(g).or_insert_with(|| d_elem(sub.image_of(gen_var(m, g))));
                f = f.wedge(dg)?;
            }
            acc = acc.add(&f)?;
        }
        Ok(acc)
    }
}

/// `da` for a ring element `a`.
pub fn d_elem(a: &AlgElem) -> Form {
    Form::from_elem(a).d()
}

/// `du * u^{-1}`.
pub fn dlog(u: &AlgElem) -> Result<Form> {
    let inv = u.invert()?;
    d_elem(u).mul_elem(&inv)
}

/// The Euler-field homotopy `h(c t^(i-1) dt ^ w) = c t^i w`, zero on terms
/// without `dt`. Single nilpotent, monomial ideal.
pub fn euler_homotopy(omega: &Form) -> Result<Form> {
    let alg = omega.algebra();
    if alg.nilpotents() != 1 || !alg.is_monomial() {
        return Err(Error::HomotopyMode);
    }
    if omega.degree() == 0 {
        return Ok(Form::zero(alg, 0));
    }
    let mut raw = Terms::new();
    for ((mono, w), c) in omega.terms() {
        if !w.contains(0) {
            continue;
        }
        let mut m2 = mono.clone();
        m2.nil[0] += 1;
        if m2.nil_degree() >= alg.bound() {
            continue;
        }
        add_into(&mut raw, (m2, WedgeWord::from_mask(w.mask() & !1)), c.clone());
    }
    Ok(Form::canonical(alg, omega.degree() - 1, raw))
}

/// Ideal whose relative forms are considered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RelativeIdealSpec {
    /// The augmentation ideal `(t1..tm)`.
    Full,
    /// `(t^k)` in a single-nilpotent algebra.
    Power(u32),
    /// An ideal given by generators in the nilpotent variables.
    Explicit(Vec<Poly>),
}

impl RelativeIdealSpec {
    pub fn describe(&self, names: &VarNames) -> String {
        match self {
            RelativeIdealSpec::Full => "FULL".into(),
            RelativeIdealSpec::Power(k) => format!("POWER({k})"),
            RelativeIdealSpec::Explicit(gens) => {
                let g: Vec<String> = gens.iter().map(|p| p.display(names)).collect();
                format!("EXPLICIT({})", g.join(", "))
            }
        }
    }
}

/// Which linear-algebra engine realizes the relative complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Independent homogeneous blocks (monomial ideals).
    Graded,
    /// One presentation of the whole space per degree (parameter-free).
    Whole,
}

/// Relative spec after validation against an algebra and engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Normalized {
    Graded { min_degree: u32 },
    Whole { extra: Vec<Poly> },
}

pub(crate) fn default_engine(alg: &TruncatedAlgebra, rel: &RelativeIdealSpec) -> Engine {
    if alg.is_monomial() && !matches!(rel, RelativeIdealSpec::Explicit(_)) {
        Engine::Graded
    } else {
        Engine::Whole
    }
}

pub(crate) fn normalize(alg: &TruncatedAlgebra, rel: &RelativeIdealSpec, engine: Engine) -> Result<Normalized> {
    let m = alg.nilpotents();
    let n = alg.bound();
    match engine {
        Engine::Graded if !alg.is_monomial() => return Err(Error::GradedModeRequired),
        Engine::Whole if alg.is_parametric() => return Err(Error::ParamFreeRequired),
        _ => {}
    }
    let var = |i: usize, e: u32| {
        let mut mono = Monomial::one(m, 0);
        mono.nil[i] = e;
        Poly::term(Q::one(), mono)
    };
    let extra = match rel {
        RelativeIdealSpec::Full => {
            if engine == Engine::Graded {
                return Ok(Normalized::Graded { min_degree: 1 });
            }
            (0..m).map(|i| var(i, 1)).collect()
        }
        RelativeIdealSpec::Power(k) => {
            if m != 1 {
                return Err(Error::InvalidRelative("POWER needs a single nilpotent generator".into()));
            }
            if *k < 1 || *k > n {
                return Err(Error::InvalidRelative(format!("POWER({k}) needs 1 <= k <= {n}")));
            }
            if engine == Engine::Graded {
                return Ok(Normalized::Graded { min_degree: *k });
            }
            vec![var(0, *k)]
        }
        RelativeIdealSpec::Explicit(gens) => {
            if engine == Engine::Graded {
                return Err(Error::InvalidRelative("explicit generators need the whole-space engine".into()));
            }
            for g in gens {
                if g.terms().any(|(mono, _)| mono.nil.len() != m || !mono.params.is_empty()) {
                    return Err(Error::InvalidRelative("generators must be polynomials in t1..tm".into()));
                }
                if g.terms().any(|(mono, _)| mono.nil_degree() == 0) {
                    return Err(Error::InvalidRelative(format!(
                        "generator `{}` is not in the augmentation ideal",
                        g.display(&alg.spec().nil_names())
                    )));
                }
            }
            gens.iter().filter(|g| !g.is_zero()).cloned().collect()
        }
    };
    Ok(Normalized::Whole { extra })
}

/// A rational basis of the relative forms `Omega^n_{R,I'}`. In parametric
/// algebras only blocks whose parameter exponents lie within `param_bound`
/// are listed.
pub fn relative_basis(alg: &TruncatedAlgebra, rel: &RelativeIdealSpec, n: usize) -> Result<Vec<Form>> {
    relative_basis_bounded(alg, rel, n, 1)
}

pub fn relative_basis_bounded(alg: &TruncatedAlgebra, rel: &RelativeIdealSpec, n: usize, param_bound: i32) -> Result<Vec<Form>> {
    let norm = normalize(alg, rel, default_engine(alg, rel))?;
    let mut out = Vec::new();
    for cell in cells(alg, &norm, param_bound) {
        let data = cell_degree(alg, &cell, n);
        for g in &data.gens {
            let terms = data.pres.decode(g).into_iter().collect();
            out.push(Form { alg: alg.clone(), degree: n, terms });
        }
    }
    Ok(out)
}

/// Rank of a family of canonical forms of one degree.
pub fn forms_rank(forms: &[Form]) -> usize {
    let mut index: HashMap<TermKey, usize> = HashMap::new();
    let mut e = crate::linalg::Echelon::new();
    let vecs: Vec<_> = forms
        .iter()
        .map(|f| {
            let mut v: Vec<(usize, Q)> = f
                .terms()
                .map(|(t, c)| {
                    let next = index.len();
                    (*index.entry(t.clone()).or_insert(next), c.clone())
                })
                .collect();
            v.sort_by_key(|(i, _)| *i);
            v
        })
        .collect();
    for v in crate::linalg::by_size(vecs) {
        e.insert(&v);
    }
    e.rank()
}
