//! Finite presentations of form spaces and the cache that publishes them.
//!
//! Monomial ideals: `Omega^n_R` splits into blocks indexed by the full
//! multidegree, each spanned by finitely many terms `mono * dW`. Terms whose
//! monomial lies in `J` are already zero; the remaining relations are
//! `u * dg ^ w'` for monomial generators `g`.
//!
//! General ideals: one presentation per degree on all terms of nilpotent
//! degree `< N`, with relations `b * w` for `b` in the ideal's span and
//! `u * dg ^ w'` for generators `g` (including all degree-`N` monomials).

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use super::{d_terms, words_of_size, Normalized, TermKey, WedgeWord};
use crate::algebra::{monomials_below, AlgebraSpec, IdealSpan, TruncatedAlgebra};
use crate::linalg::{by_size, Echelon, Insert, SparseVec, Q};
use crate::poly::{Monomial, Poly};

#[derive(Debug)]
pub(crate) struct Presentation {
    pub terms: Vec<TermKey>,
    pub index: HashMap<TermKey, usize>,
    pub relations: Echelon,
}

impl Presentation {
    fn new(mut terms: Vec<TermKey>) -> Self {
        terms.sort();
        let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Presentation { terms, index, relations: Echelon::new() }
    }

    /// Coordinates of raw terms; terms outside the presentation are zero.
    pub fn to_vec<'a>(&self, terms: impl IntoIterator<Item = (&'a TermKey, &'a Q)>) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (t, c) in terms {
            if let Some(i) = self.index.get(t) {
                let e = acc.entry(*i).or_insert_with(Q::zero);
                *e += c;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn decode(&self, v: &[(usize, Q)]) -> BTreeMap<TermKey, Q> {
        v.iter().map(|(i, c)| (self.terms[*i].clone(), c.clone())).collect()
    }

    /// Unit vectors on non-pivot columns: a basis of the quotient.
    pub fn quotient_basis(&self) -> Vec<SparseVec> {
        (0..self.terms.len()).filter(|i| !self.relations.is_pivot(*i)).map(|i| vec![(i, Q::one())]).collect()
    }
}

/// A homogeneous piece of the relative complex: one graded block, or the
/// whole space relative to an extra ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Cell {
    Graded(Vec<i32>),
    Whole(Vec<Poly>),
}

/// A cell in one degree: the ambient presentation, and a basis of the
/// relative subspace modulo the relations.
#[derive(Debug)]
pub(crate) struct CellDegree {
    pub pres: Arc<Presentation>,
    /// Relations of `J + X` on the same terms (whole cells only).
    pub wider: Option<Arc<Presentation>>,
    pub gens: Vec<SparseVec>,
}

/// Relations in degree `n` plus the images `d(gens_{n-1})`, tracked so that
/// primitives can be recovered.
#[derive(Debug)]
pub(crate) struct ExactSpace {
    pub echelon: Echelon,
    pub prims: Vec<SparseVec>,
    pub prev: Arc<CellDegree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum PresKey {
    Block(usize, Vec<i32>),
    Whole(usize, Vec<Poly>),
}

#[derive(Default)]
pub(crate) struct FormCache {
    presentations: RwLock<HashMap<PresKey, Arc<Presentation>>>,
    cells: RwLock<HashMap<(usize, Cell), Arc<CellDegree>>>,
    exact: RwLock<HashMap<(usize, Cell), Arc<ExactSpace>>>,
}

fn cached<K: Eq + Hash + Clone, V>(map: &RwLock<HashMap<K, Arc<V>>>, key: &K, build: impl FnOnce() -> V) -> Arc<V> {
    if let Some(v) = map.read().unwrap().get(key) {
        return v.clone();
    }
    let v = Arc::new(build());
    map.write().unwrap().entry(key.clone()).or_insert(v).clone()
}

fn block_presentation(alg: &TruncatedAlgebra, n: usize, key: &[i32]) -> Arc<Presentation> {
    cached(&alg.inner().forms.presentations, &PresKey::Block(n, key.to_vec()), || build_block(alg, n, key))
}

fn whole_presentation(alg: &TruncatedAlgebra, n: usize, extra: &[Poly]) -> Arc<Presentation> {
    cached(&alg.inner().forms.presentations, &PresKey::Whole(n, extra.to_vec()), || build_whole(alg, n, extra))
}

/// Monomial with exponents `key - weights(w)`, if legal.
fn split_key(alg: &TruncatedAlgebra, key: &[i32], w: WedgeWord) -> Option<Monomial> {
    let m = alg.nilpotents();
    let k = alg.num_params();
    let (wn, wp) = w.weights(m, k);
    let mut nil = Vec::with_capacity(m);
    for i in 0..m {
        let e = key[i] - wn[i] as i32;
        if e < 0 {
            return None;
        }
        nil.push(e as u32);
    }
    let params: Vec<i32> = (0..k).map(|j| key[m + j] - wp[j]).collect();
    let mono = Monomial::new(nil, params);
    alg.monomial_is_legal(&mono).then_some(mono)
}

fn build_block(alg: &TruncatedAlgebra, n: usize, key: &[i32]) -> Presentation {
    let m = alg.nilpotents();
    let k = alg.num_params();
    let mut terms = Vec::new();
    for w in words_of_size(m + k, n) {
        if let Some(mono) = split_key(alg, key, w) {
            if alg.monomial_survives(&mono) {
                terms.push((mono, w));
            }
        }
    }
    let mut pres = Presentation::new(terms);
    if pres.terms.is_empty() || n == 0 {
        return pres;
    }
    let gens = alg.monomial_generators().expect("graded blocks need a monomial ideal");
    let mut rels = Vec::new();
    for g in gens {
        for w in words_of_size(m + k, n - 1) {
            // u = key - g - weights(w)
            let mut shifted = key.to_vec();
            for i in 0..m {
                shifted[i] -= g[i] as i32;
            }
            let Some(u) = split_key(alg, &shifted, w) else { continue };
            let mut raw = BTreeMap::new();
            for i in 0..m {
                if g[i] == 0 || w.contains(i) {
                    continue;
                }
                let mut mono = u.clone();
                for (a, b) in mono.nil.iter_mut().zip(g) {
                    *a += b;
                }
                mono.nil[i] -= 1;
                let (w2, neg) = w.insert_front(i).unwrap();
                let c = Q::from_integer(g[i].into());
                raw.insert((mono, w2), if neg { -c } else { c });
            }
            let v = pres.to_vec(&raw);
            if !v.is_empty() {
                rels.push(v);
            }
        }
    }
    for v in by_size(rels) {
        pres.relations.insert(&v);
    }
    pres
}

fn build_whole(alg: &TruncatedAlgebra, n: usize, extra: &[Poly]) -> Presentation {
    let m = alg.nilpotents();
    let cap = alg.bound();
    let monos = monomials_below(m, cap);
    let words = words_of_size(m, n);
    let mut terms = Vec::new();
    for e in &monos {
        for w in &words {
            terms.push((Monomial::new(e.clone(), Vec::new()), *w));
        }
    }
    let mut pres = Presentation::new(terms);
    let mut gens: Vec<Poly> = alg.spec().ideal.iter().filter(|g| !g.is_zero()).cloned().collect();
    gens.extend(extra.iter().cloned());
    gens.extend(AlgebraSpec::power_generators(m, cap));
    let span = IdealSpan::build(m, cap, &gens);

    let mut rels = Vec::new();
    for b in span.span.basis() {
        let b = span.decode(&b, 0);
        for w in &words {
            let raw: BTreeMap<TermKey, Q> = b.terms().map(|(mono, c)| ((mono.clone(), *w), c.clone())).collect();
            rels.push(pres.to_vec(&raw));
        }
    }
    if n > 0 {
        let lower = words_of_size(m, n - 1);
        for g in &gens {
            let Some(lo) = g.min_nil_degree() else { continue };
            for u in &monos {
                if u.iter().sum::<u32>() + lo > cap {
                    break;
                }
                let ug = g.mul_monomial(&Monomial::new(u.clone(), Vec::new()));
                let raw0: BTreeMap<TermKey, Q> = ug.terms().map(|(mono, c)| ((mono.clone(), WedgeWord::empty()), c.clone())).collect();
                // d(u g) = u dg + g du, and g du is already a relation of the first kind
                let dug = d_terms(m, 0, &raw0);
                for w in &lower {
                    let mut raw = BTreeMap::new();
                    for ((mono, w1), c) in &dug {
                        if mono.nil_degree() >= cap {
                            continue;
                        }
                        if let Some((w2, neg)) = w1.wedge(*w) {
                            raw.insert((mono.clone(), w2), if neg { -c.clone() } else { c.clone() });
                        }
                    }
                    let v = pres.to_vec(&raw);
                    if !v.is_empty() {
                        rels.push(v);
                    }
                }
            }
        }
    }
    for v in by_size(rels) {
        pres.relations.insert(&v);
    }
    pres
}

/// Reduce raw terms to canonical shape.
pub(crate) fn canonicalize(alg: &TruncatedAlgebra, n: usize, raw: BTreeMap<TermKey, Q>) -> BTreeMap<TermKey, Q> {
    let cap = alg.bound();
    if alg.is_monomial() {
        let mut groups: BTreeMap<Vec<i32>, Vec<(TermKey, Q)>> = BTreeMap::new();
        for (t, c) in raw {
            if c.is_zero() || !alg.monomial_survives(&t.0) {
                continue;
            }
            groups.entry(super::term_key(&t)).or_default().push((t, c));
        }
        let mut out = BTreeMap::new();
        for (key, ts) in groups {
            let pres = block_presentation(alg, n, &key);
            let v = pres.to_vec(ts.iter().map(|(t, c)| (t, c)));
            out.extend(pres.decode(&pres.relations.reduce(&v)));
        }
        out
    } else {
        let pres = whole_presentation(alg, n, &[]);
        let v = pres.to_vec(raw.iter().filter(|(t, _)| t.0.nil_degree() < cap));
        pres.decode(&pres.relations.reduce(&v))
    }
}

/// Cells of the relative complex. Graded cells are all block keys of internal
/// degree at least `min_degree`, parameter exponents within `param_bound`.
pub(crate) fn cells(alg: &TruncatedAlgebra, norm: &Normalized, param_bound: i32) -> Vec<Cell> {
    match norm {
        Normalized::Whole { extra } => vec![Cell::Whole(extra.clone())],
        Normalized::Graded { min_degree } => {
            let m = alg.nilpotents();
            let k = alg.num_params();
            let mut param_keys: Vec<Vec<i32>> = vec![Vec::new()];
            for j in 0..k {
                let lo = if alg.param_invertible(j) { -param_bound } else { 0 };
                param_keys = param_keys
                    .into_iter()
                    .flat_map(|p| {
                        (lo..=param_bound).map(move |e| {
                            let mut p = p.clone();
                            p.push(e);
                            p
                        })
                    })
                    .collect();
            }
            let mut out = Vec::new();
            for e in monomials_below(m, alg.bound() + m as u32) {
                if e.iter().sum::<u32>() < *min_degree {
                    continue;
                }
                for p in &param_keys {
                    let mut key: Vec<i32> = e.iter().map(|x| *x as i32).collect();
                    key.extend(p);
                    out.push(Cell::Graded(key));
                }
            }
            out
        }
    }
}

pub(crate) fn cell_of_term(norm: &Normalized, t: &TermKey) -> Cell {
    match norm {
        Normalized::Whole { extra } => Cell::Whole(extra.clone()),
        Normalized::Graded { .. } => Cell::Graded(super::term_key(t)),
    }
}

pub(crate) fn cell_degree(alg: &TruncatedAlgebra, cell: &Cell, n: usize) -> Arc<CellDegree> {
    cached(&alg.inner().forms.cells, &(n, cell.clone()), || match cell {
        Cell::Graded(key) => {
            let pres = block_presentation(alg, n, key);
            let gens = pres.quotient_basis();
            CellDegree { pres, wider: None, gens }
        }
        Cell::Whole(extra) => {
            let pres = whole_presentation(alg, n, &[]);
            let wider = whole_presentation(alg, n, extra);
            let mut e = pres.relations.clone();
            let mut gens = Vec::new();
            for row in by_size(wider.relations.basis()) {
                let r = e.reduce(&row);
                if !r.is_empty() {
                    e.insert(&r);
                    gens.push(r);
                }
            }
            CellDegree { pres, wider: Some(wider), gens }
        }
    })
}

/// Map coordinates in a degree-`n` cell through `d` into degree `n + 1`.
pub(crate) fn d_vec(alg: &TruncatedAlgebra, from: &Presentation, to: &Presentation, v: &[(usize, Q)]) -> SparseVec {
    let raw = from.decode(v);
    let dr = d_terms(alg.nilpotents(), alg.num_params(), &raw);
    to.to_vec(dr.iter().filter(|(t, _)| t.0.nil_degree() < alg.bound()))
}

pub(crate) fn exact_space(alg: &TruncatedAlgebra, cell: &Cell, n: usize) -> Arc<ExactSpace> {
    cached(&alg.inner().forms.exact, &(n, cell.clone()), || {
        let here = cell_degree(alg, cell, n);
        let mut echelon = here.pres.relations.clone();
        if n == 0 {
            let prev = cell_degree(alg, cell, 0);
            return ExactSpace { echelon, prims: Vec::new(), prev };
        }
        let prev = cell_degree(alg, cell, n - 1);
        let mut prims = Vec::new();
        for g in &prev.gens {
            let dv = d_vec(alg, &prev.pres, &here.pres, g);
            let (_, ins) = echelon.insert_tracked(&dv);
            debug_assert!(matches!(ins, Insert::NewPivot(_) | Insert::Dependent(_)));
            prims.push(g.clone());
        }
        ExactSpace { echelon, prims, prev }
    })
}

/// Internal degree of a graded cell key.
pub(crate) fn key_internal_degree(alg: &TruncatedAlgebra, key: &[i32]) -> u32 {
    key[..alg.nilpotents()].iter().sum::<i32>() as u32
}
