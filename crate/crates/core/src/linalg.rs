//! Sparse exact linear algebra.
//!
//! Vectors are sparse maps from column index to rational. An [`Echelon`] keeps
//! a row-echelon basis of a subspace where every row is a primitive integer
//! vector whose pivot is its *largest* column. Reduction eliminates pivot
//! columns from the top down, so the remainder of a vector modulo the subspace
//! has no entries in pivot columns and is therefore unique: it is the canonical
//! representative of the vector's class in the quotient.
//!
//! Elimination is fraction-free: a step `v <- p*v - x*row` keeps integer
//! entries, and the rational scale of the running vector is tracked on the
//! side and reapplied at the end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Sparse rational vector, columns ascending, no explicit zeros.
pub type SparseVec = Vec<(usize, Q)>;

#[derive(Clone, Debug)]
struct Row {
    entries: BTreeMap<usize, BigInt>,
    /// `entries == sum(coeff * input)` over tracked inputs.
    prov: BTreeMap<usize, Q>,
}

/// Result of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq)]
pub enum Insert {
    /// The vector was independent and produced a row with this pivot.
    NewPivot(usize),
    /// The vector was dependent; with provenance tracking this is the linear
    /// relation `sum(coeff * input) = 0` among tracked inputs.
    Dependent(SparseVec),
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
    tracked: usize,
}

fn integerize(v: &[(usize, Q)]) -> (BTreeMap<usize, BigInt>, Q) {
    let mut lcm = BigInt::one();
    for (_, c) in v {
        lcm = lcm.lcm(c.denom());
    }
    let mut out = BTreeMap::new();
    for (i, c) in v {
        if c.is_zero() {
            continue;
        }
        let x = c.numer() * (&lcm / c.denom());
        out.insert(*i, x);
    }
    (out, Q::new(BigInt::one(), lcm))
}

fn content(v: &BTreeMap<usize, BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for c in v.values() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn add_scaled(acc: &mut BTreeMap<usize, Q>, other: &BTreeMap<usize, Q>, f: &Q) {
    for (k, x) in other {
        let e = acc.entry(*k).or_insert_with(Q::zero);
        *e += f * x;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Rows of the basis as rational vectors.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.rows.values().map(|r| r.entries.iter().map(|(k, c)| (*k, Q::from(c.clone()))).collect()).collect()
    }

    /// Fraction-free reduction. Returns the integer remainder, its rational
    /// scale, and (if `with_prov`) the combination of tracked inputs that was
    /// subtracted, expressed for the *true* vector.
    fn reduce_raw(
        &self,
        mut v: BTreeMap<usize, BigInt>,
        mut scale: Q,
        with_prov: bool,
    ) -> (BTreeMap<usize, BigInt>, Q, BTreeMap<usize, Q>) {
        let mut comb = BTreeMap::new();
        let mut bound: Option<usize> = None;
        loop {
            let next = match bound {
                None => v.keys().rev().find(|k| self.rows.contains_key(k)).copied(),
                Some(b) => v.range(..b).rev().find(|(k, _)| self.rows.contains_key(k)).map(|(k, _)| *k),
            };
            let Some(c) = next else { break };
            let row = &self.rows[&c];
            let x = v[&c].clone();
            let p = &row.entries[&c];
            let g = x.gcd(p);
            let pg = p / &g;
            let xg = &x / &g;
            if with_prov {
                let lambda = &scale * Q::new(x.clone(), p.clone());
                add_scaled(&mut comb, &row.prov, &lambda);
            }
            if !pg.is_one() {
                for val in v.values_mut() {
                    *val *= &pg;
                }
                scale /= Q::from(pg.clone());
            }
            for (k, r) in &row.entries {
                let e = v.entry(*k).or_insert_with(BigInt::zero);
                *e -= &xg * r;
                if e.is_zero() {
                    v.remove(k);
                }
            }
            let g = content(&v);
            if !g.is_zero() && !g.is_one() {
                for val in v.values_mut() {
                    *val /= &g;
                }
                scale *= Q::from(g);
            }
            bound = Some(c);
        }
        (v, scale, comb)
    }

    /// Canonical remainder of `v` modulo the row space.
    pub fn reduce(&self, v: &[(usize, Q)]) -> SparseVec {
        let (iv, scale) = integerize(v);
        let (r, scale, _) = self.reduce_raw(iv, scale, false);
        r.into_iter().map(|(k, c)| (k, Q::from(c) * &scale)).collect()
    }

    /// Remainder plus the combination of tracked inputs with
    /// `v = remainder + sum(coeff * input)`.
    pub fn reduce_tracked(&self, v: &[(usize, Q)]) -> (SparseVec, SparseVec) {
        let (iv, scale) = integerize(v);
        let (r, scale, comb) = self.reduce_raw(iv, scale, true);
        (r.into_iter().map(|(k, c)| (k, Q::from(c) * &scale)).collect(), comb.into_iter().collect())
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert an untracked vector (e.g. a relation).
    pub fn insert(&mut self, v: &[(usize, Q)]) -> bool {
        matches!(self.insert_inner(v, None), Insert::NewPivot(_))
    }

    /// Insert a vector that is remembered as tracked input number `id`
    /// (ids are assigned sequentially and returned).
    pub fn insert_tracked(&mut self, v: &[(usize, Q)]) -> (usize, Insert) {
        let id = self.tracked;
        self.tracked += 1;
        (id, self.insert_inner(v, Some(id)))
    }

    fn insert_inner(&mut self, v: &[(usize, Q)], id: Option<usize>) -> Insert {
        let (iv, scale) = integerize(v);
        let track = id.is_some() || self.tracked > 0;
        let (mut r, scale, mut comb) = self.reduce_raw(iv, scale, track);
        if r.is_empty() {
            // v - comb = 0, i.e. input(id) - comb = 0
            let mut rel: BTreeMap<usize, Q> = comb.into_iter().map(|(k, c)| (k, -c)).collect();
            if let Some(id) = id {
                rel.insert(id, Q::one());
            }
            return Insert::Dependent(rel.into_iter().collect());
        }
        // remainder (true) = scale * r = v - comb  =>  r = (v - comb) / scale
        let mut prov = BTreeMap::new();
        if track {
            if let Some(id) = id {
                prov.insert(id, Q::one() / &scale);
            }
            let inv = -(Q::one() / &scale);
            for c in comb.values_mut() {
                *c *= &inv;
            }
            add_scaled(&mut prov, &comb.into_iter().collect(), &Q::one());
        }
        let piv = *r.keys().next_back().unwrap();
        if r[&piv].is_negative() {
            for val in r.values_mut() {
                *val = -val.clone();
            }
            for val in prov.values_mut() {
                *val = -val.clone();
            }
        }
        let row = Row { entries: r, prov };
        self.rows.insert(piv, row);
        Insert::NewPivot(piv)
    }
}

/// Kernel of the linear map whose columns are `cols`: a basis of
/// `{c : sum c_k cols[k] = 0}` modulo the untracked subspace `modulo`.
pub fn kernel(modulo: &Echelon, cols: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = modulo.clone();
    let mut out = Vec::new();
    for c in cols {
        if let (_, Insert::Dependent(rel)) = e.insert_tracked(c) {
            out.push(rel);
        }
    }
    out
}

/// `rank(span(base ∪ extra)) - rank(base)`.
///
/// Sparse, small-entry vectors are inserted first so they become pivot rows
/// and keep the fill-in of later eliminations low.
pub fn relative_rank(base: &Echelon, extra: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = base.clone();
    let r0 = e.rank();
    for v in by_size(extra) {
        e.insert(&v);
    }
    e.rank() - r0
}

/// Order vectors by a crude size measure: entry count, then coefficient bits.
pub fn by_size(vs: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut vs: Vec<SparseVec> = vs.into_iter().collect();
    vs.sort_by_cached_key(|v| {
        let bits: u64 = v.iter().map(|(_, c)| c.numer().bits() + c.denom().bits()).sum();
        (v.len(), bits)
    });
    vs
}

pub fn scale_vec(v: &[(usize, Q)], f: &Q) -> SparseVec {
    if f.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(k, c)| (*k, c * f)).collect()
}

pub fn add_vecs(a: &[(usize, Q)], b: &[(usize, Q)]) -> SparseVec {
    let mut m: BTreeMap<usize, Q> = a.iter().cloned().collect();
    for (k, c) in b {
        let e = m.entry(*k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            m.remove(k);
        }
    }
    m.into_iter().collect()
}

/// Combine `sum coeff_k * vecs[k]` for a sparse coefficient vector.
pub fn combine(coeffs: &[(usize, Q)], vecs: &[SparseVec]) -> SparseVec {
    let mut m: BTreeMap<usize, Q> = BTreeMap::new();
    for (k, c) in coeffs {
        for (i, x) in &vecs[*k] {
            let e = m.entry(*i).or_insert_with(Q::zero);
            *e += c * x;
            if e.is_zero() {
                m.remove(i);
            }
        }
    }
    m.into_iter().collect()
}
