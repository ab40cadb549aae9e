//! Dense brute-force oracle: whole-space matrices over Q for param-free
//! algebras `Q[t_1..t_m]/J` with `(t)^N` inside `J`. Shares no code with the
//! library beyond the rational type.

#![allow(dead_code)]

use std::collections::HashMap;

use nilbloch::algebra::TruncatedAlgebra;
use nilbloch::forms::Form;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
pub type Exps = Vec<u32>;
pub type DensePoly = Vec<(Exps, Q)>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Rank of a dense row set by plain Gaussian elimination.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    reduced(rows).len()
}

/// Row-reduced nonzero rows (pivot column, row).
fn reduced(rows: &[Vec<Q>]) -> Vec<(usize, Vec<Q>)> {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x -= &f * y;
                    }
                }
            }
            basis.push((p, v));
        }
    }
    basis
}

pub fn in_span(rows: &[Vec<Q>], v: &[Q]) -> bool {
    let mut all = rows.to_vec();
    let r0 = rank(&all);
    all.push(v.to_vec());
    rank(&all) == r0
}

/// All exponent vectors of total degree below `n`, in a fixed order.
pub fn exps_below(m: usize, n: u32) -> Vec<Exps> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out.into_iter().flat_map(|e: Exps| (0..n).map(move |k| [e.clone(), vec![k]].concat())).collect();
    }
    out.retain(|e| e.iter().sum::<u32>() < n);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m).filter(|s| s.count_ones() as usize == k).map(|s| (0..m).filter(|i| s >> i & 1 == 1).collect()).collect()
}

fn mul_mono(a: &Exps, b: &Exps) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn deg(e: &Exps) -> u32 {
    e.iter().sum()
}

/// Partial derivative of a dense polynomial.
pub fn partial(f: &DensePoly, i: usize) -> DensePoly {
    f.iter()
        .filter(|(e, _)| e[i] > 0)
        .map(|(e, c)| {
            let mut e2 = e.clone();
            e2[i] -= 1;
            (e2, c * q(e[i] as i64))
        })
        .collect()
}

pub struct DenseAlgebra {
    pub m: usize,
    pub n: u32,
    /// Generators of `J` besides `(t)^N`.
    pub gens: Vec<DensePoly>,
    monos: Vec<Exps>,
    mono_index: HashMap<Exps, usize>,
}

impl DenseAlgebra {
    pub fn new(m: usize, n: u32, gens: Vec<DensePoly>) -> Self {
        let monos = exps_below(m, n);
        let mono_index = monos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        DenseAlgebra { m, n, gens, monos, mono_index }
    }

    /// Read the generators back out of a library algebra.
    pub fn from_library(alg: &TruncatedAlgebra) -> Self {
        let gens = alg.spec().ideal.iter().map(|g| g.terms().map(|(mono, c)| (mono.nil.clone(), c.clone())).collect()).collect();
        DenseAlgebra::new(alg.nilpotents(), alg.bound(), gens)
    }

    fn all_gens(&self) -> Vec<DensePoly> {
        let mut g = self.gens.clone();
        for e in exps_below(self.m, self.n + 1) {
            if deg(&e) == self.n {
                g.push(vec![(e, Q::one())]);
            }
        }
        g
    }

    /// `J` inside the truncated polynomial space, as dense rows over monomials.
    fn ideal_rows(&self) -> Vec<Vec<Q>> {
        let mut rows = Vec::new();
        for g in &self.gens {
            for u in &self.monos {
                let mut row = vec![Q::zero(); self.monos.len()];
                for (e, c) in g {
                    if let Some(&i) = self.mono_index.get(&mul_mono(e, u)) {
                        row[i] += c;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        rows
    }

    pub fn dim(&self) -> usize {
        self.monos.len() - rank(&self.ideal_rows())
    }

    fn cols(&self, k: usize) -> Vec<(usize, Vec<usize>)> {
        let words = subsets(self.m, k);
        let start = if k == 0 { 1 } else { 0 };
        (start..self.monos.len()).flat_map(|i| words.iter().map(move |w| (i, w.clone()))).collect()
    }

    fn col_index(&self, k: usize) -> HashMap<(usize, Vec<usize>), usize> {
        self.cols(k).into_iter().enumerate().map(|(i, c)| (c, i)).collect()
    }

    /// `d(t^e dt_w)` as (monomial, word, coefficient) triples.
    fn d_term(&self, e: &Exps, w: &[usize]) -> Vec<(Exps, Vec<usize>, Q)> {
        let mut out = Vec::new();
        for i in 0..self.m {
            if e[i] == 0 || w.contains(&i) {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let before = w.iter().filter(|&&g| g < i).count();
            let mut w2 = w.to_vec();
            w2.push(i);
            w2.sort();
            let sign = if before % 2 == 0 { 1 } else { -1 };
            out.push((e2, w2, q(sign * e[i] as i64)));
        }
        out
    }

    fn put(&self, row: &mut [Q], idx: &HashMap<(usize, Vec<usize>), usize>, e: &Exps, w: &[usize], c: &Q) {
        if let Some(&mi) = self.mono_index.get(e) {
            if let Some(&ci) = idx.get(&(mi, w.to_vec())) {
                row[ci] += c;
            }
        }
    }

    /// Relations `J Omega^k + dJ ^ Omega^(k-1)` in degree `k`.
    pub fn relations(&self, k: usize) -> Vec<Vec<Q>> {
        let idx = self.col_index(k);
        let width = idx.len();
        let mut rows = Vec::new();
        let words = subsets(self.m, k);
        for b in self.ideal_rows() {
            for w in &words {
                let mut row = vec![Q::zero(); width];
                for (i, c) in b.iter().enumerate() {
                    if !c.is_zero() {
                        self.put(&mut row, &idx, &self.monos[i], w, c);
                    }
                }
                rows.push(row);
            }
        }
        if k > 0 {
            let lower = subsets(self.m, k - 1);
            for g in self.all_gens() {
                for u in exps_below(self.m, self.n + 1) {
                    for w in &lower {
                        let mut row = vec![Q::zero(); width];
                        for (e, c) in &g {
                            for (e2, w2, s) in self.d_term(&mul_mono(e, &u), w) {
                                self.put(&mut row, &idx, &e2, &w2, &(c * s));
                            }
                        }
                        if row.iter().any(|x| !x.is_zero()) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        rows
    }

    /// Images of the spanning set of degree `k` under `d`, in degree `k + 1`.
    fn d_images(&self, k: usize) -> Vec<Vec<Q>> {
        let idx = self.col_index(k + 1);
        self.cols(k)
            .iter()
            .map(|(i, w)| {
                let mut row = vec![Q::zero(); idx.len()];
                for (e2, w2, s) in self.d_term(&self.monos[*i], w) {
                    self.put(&mut row, &idx, &e2, &w2, &s);
                }
                row
            })
            .collect()
    }

    pub fn dim_forms(&self, k: usize) -> usize {
        self.cols(k).len() - rank(&self.relations(k))
    }

    pub fn rank_d(&self, k: usize) -> usize {
        if k >= self.m {
            return 0;
        }
        let rel = self.relations(k + 1);
        let r0 = rank(&rel);
        let mut all = rel;
        all.extend(self.d_images(k));
        rank(&all) - r0
    }

    /// `dim H^k(R, (t))` for `k = 0..=m`.
    pub fn cohomology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.m).map(|k| self.rank_d(k)).collect();
        (0..=self.m).map(|k| self.dim_forms(k) - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] }).collect()
    }

    /// A library form as a dense vector in the spanning set of its degree.
    pub fn vector(&self, w: &Form) -> Vec<Q> {
        let idx = self.col_index(w.degree());
        let mut row = vec![Q::zero(); idx.len()];
        for ((mono, word), c) in w.terms() {
            let gens: Vec<usize> = word.gens().collect();
            self.put(&mut row, &idx, &mono.nil, &gens, c);
        }
        row
    }

    /// Whether a relative form is `d` of a relative form.
    pub fn is_exact(&self, w: &Form) -> bool {
        let k = w.degree();
        let mut rows = self.relations(k);
        if k > 0 {
            rows.extend(self.d_images(k - 1));
        }
        in_span(&rows, &self.vector(w))
    }
}

/// `dim Q[t]/(gens)` by dense Macaulay matrices of growing truncation, stopped
/// once some degree below the truncation lies entirely in the span.
pub fn stable_quotient_dim(m: usize, gens: &[DensePoly], n_max: u32) -> Option<(usize, u32)> {
    for n in 3..=n_max {
        let alg = DenseAlgebra::new(m, n, gens.to_vec());
        let rows = alg.ideal_rows();
        let monos = exps_below(m, n);
        let stable = (1..n).any(|d| {
            monos.iter().enumerate().filter(|(_, e)| deg(e) == d).all(|(i, _)| {
                let mut unit = vec![Q::zero(); monos.len()];
                unit[i] = Q::one();
                in_span(&rows, &unit)
            })
        });
        if stable {
            return Some((monos.len() - rank(&rows), n));
        }
    }
    None
}

pub fn grauert_kerner() -> DensePoly {
    vec![(vec![4, 0], q(1)), (vec![2, 3], q(1)), (vec![0, 5], q(1))]
}

/// Compare the library on one algebra against the dense oracle: every
/// cohomology row under each applicable engine, and the exactness verdict on
/// every basis form and its differential.
pub fn compare_with_library(alg: &TruncatedAlgebra) -> Result<(), String> {
    use nilbloch::derham::{cohomology, is_exact_with, CohomologyOptions};
    use nilbloch::forms::{relative_basis_bounded, Engine, RelativeIdealSpec};

    let dense = DenseAlgebra::from_library(alg);
    let h = dense.cohomology();
    let engines: &[Engine] = if alg.is_monomial() { &[Engine::Graded, Engine::Whole] } else { &[Engine::Whole] };
    let rel = RelativeIdealSpec::Full;
    for &engine in engines {
        let opts = CohomologyOptions { engine: Some(engine), ..Default::default() };
        let rep = cohomology(alg, &rel, &opts).map_err(|e| e.to_string())?;
        for row in &rep.rows {
            let k = row.degree;
            let expect = (dense.dim_forms(k), dense.rank_d(k), h[k]);
            let got = (row.dim_forms, row.dim_forms - row.dim_ker, row.dim_h);
            if expect != got {
                return Err(format!("{engine:?} degree {k}: oracle {expect:?}, library {got:?}"));
            }
        }
        for k in 0..=alg.nilpotents() {
            for b in relative_basis_bounded(alg, &rel, k, 0).map_err(|e| e.to_string())? {
                let mut probes = vec![b.clone()];
                if k < alg.nilpotents() {
                    probes.push(b.d());
                }
                for p in probes {
                    let lib = is_exact_with(&p, &rel, None, engine).map_err(|e| e.to_string())?.is_exact();
                    if lib != dense.is_exact(&p) {
                        return Err(format!("{engine:?}: exactness of {p} disagrees"));
                    }
                }
            }
        }
    }
    Ok(())
}
