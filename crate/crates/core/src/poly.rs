//! Sparse polynomials with exact rational coefficients in two classes of
//! variables: nilpotent generators `t1..tm` and base-ring parameters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::linalg::Q;

/// Exponent vectors for nilpotent generators and for parameters.
///
/// Parameter exponents may be negative only for invertible parameters; that
/// rule is enforced by the algebra, not here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub nil: Vec<u32>,
    pub params: Vec<i32>,
}

impl Monomial {
    pub fn one(m: usize, k: usize) -> Self {
        Monomial { nil: vec![0; m], params: vec![0; k] }
    }

    pub fn new(nil: Vec<u32>, params: Vec<i32>) -> Self {
        Monomial { nil, params }
    }

    pub fn nil_degree(&self) -> u32 {
        self.nil.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.nil.iter().all(|e| *e == 0) && self.params.iter().all(|e| *e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            nil: self.nil.iter().zip(&other.nil).map(|(a, b)| a + b).collect(),
            params: self.params.iter().zip(&other.params).map(|(a, b)| a + b).collect(),
        }
    }

    /// Whether `self` is divisible by the pure nilpotent monomial `d`.
    pub fn nil_divisible_by(&self, d: &[u32]) -> bool {
        self.nil.iter().zip(d).all(|(a, b)| a >= b)
    }

    pub fn nil_part(&self) -> Monomial {
        Monomial { nil: self.nil.clone(), params: vec![0; self.params.len()] }
    }

    pub fn param_part(&self) -> Monomial {
        Monomial { nil: vec![0; self.nil.len()], params: self.params.clone() }
    }

    pub fn write(&self, names: &VarNames, out: &mut String) {
        let mut first = true;
        let vars = self
            .nil
            .iter()
            .enumerate()
            .map(|(i, e)| (names.nil_name(i), *e as i64))
            .chain(self.params.iter().enumerate().map(|(j, e)| (names.params[j].as_str(), *e as i64)));
        for (name, e) in vars {
            if e == 0 {
                continue;
            }
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(name);
            if e != 1 {
                let _ = write!(out, "^{e}");
            }
        }
        if first {
            out.push('1');
        }
    }

    pub fn display(&self, names: &VarNames) -> String {
        let mut s = String::new();
        self.write(names, &mut s);
        s
    }
}

/// Graded-lex on the nilpotent exponents, then lex on parameter exponents.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nil_degree().cmp(&other.nil_degree()).then_with(|| self.nil.cmp(&other.nil)).then_with(|| self.params.cmp(&other.params))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Variable names used for printing and parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    pub nil: Vec<String>,
    pub params: Vec<String>,
}

impl VarNames {
    /// `t` for a single nilpotent generator, `t1..tm` otherwise.
    pub fn standard(m: usize, params: Vec<String>) -> Self {
        let nil = if m == 1 { vec!["t".to_string()] } else { (1..=m).map(|i| format!("t{i}")).collect() };
        VarNames { nil, params }
    }

    pub fn nil_name(&self, i: usize) -> &str {
        &self.nil[i]
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(i) = self.nil.iter().position(|n| n == name) {
            return Some(Var::Nil(i));
        }
        if self.nil.len() == 1 && name == "t1" {
            return Some(Var::Nil(0));
        }
        self.params.iter().position(|n| n == name).map(Var::Param)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Nil(usize),
    Param(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q, m: usize, k: usize) -> Self {
        Poly::term(c, Monomial::one(m, k))
    }

    pub fn term(c: Q, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, mono: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Q)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Q {
        self.terms.get(mono).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, f: &Q) -> Poly {
        if f.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * f)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect() }
    }

    /// Product, dropping every term whose nilpotent degree reaches `cap`.
    pub fn mul_truncated(&self, other: &Poly, cap: Option<u32>) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if cap.is_some_and(|n| m.nil_degree() >= n) {
                    continue;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_truncated(other, None)
    }

    /// Partial derivative in a variable (parameters may carry negative powers).
    pub fn derivative(&self, var: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = match var {
                Var::Nil(i) => {
                    let e = m.nil[i] as i64;
                    if e == 0 {
                        continue;
                    }
                    m2.nil[i] -= 1;
                    e
                }
                Var::Param(j) => {
                    let e = m.params[j] as i64;
                    if e == 0 {
                        continue;
                    }
                    m2.params[j] -= 1;
                    e
                }
            };
            out.add_term(m2, c * Q::from_integer(e.into()));
        }
        out
    }

    /// Largest nilpotent degree among terms, `None` for the zero polynomial.
    pub fn max_nil_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.nil_degree()).max()
    }

    pub fn min_nil_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.nil_degree()).min()
    }

    /// Part of nilpotent degree exactly zero.
    pub fn nil_degree_zero_part(&self) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.nil_degree() == 0).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    /// Canonical text, largest term first: `t1^4 + t1^2*t2^3 - 3/2*t2^5`.
    pub fn display(&self, names: &VarNames) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                let _ = write!(s, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(s, "{a}*");
                }
                m.write(names, &mut s);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names2() -> VarNames {
        VarNames::standard(2, vec!["a".into()])
    }

    fn mono(nil: &[u32], p: &[i32]) -> Monomial {
        Monomial::new(nil.to_vec(), p.to_vec())
    }

    #[test]
    fn graded_lex_order() {
        let a = mono(&[2, 0], &[0]);
        let b = mono(&[1, 1], &[0]);
        let c = mono(&[0, 3], &[0]);
        let d = mono(&[2, 0], &[1]);
        assert!(a > b);
        assert!(c > a);
        assert!(d > a);
    }

    #[test]
    fn product_and_derivative() {
        let t1 = Poly::term(Q::one(), mono(&[1, 0], &[0]));
        let a = Poly::term(Q::one(), mono(&[0, 0], &[1]));
        let p = t1.add(&a).mul(&t1.sub(&a));
        assert_eq!(p.display(&names2()), "t1^2 - a^2");
        let dp = p.derivative(Var::Param(0));
        assert_eq!(dp.display(&names2()), "-2*a");
    }

    #[test]
    fn truncated_product_drops_high_degree() {
        let t1 = Poly::term(Q::one(), mono(&[1, 0], &[0]));
        let one = Poly::constant(Q::one(), 2, 1);
        let p = one.add(&t1);
        let sq = p.mul_truncated(&p, Some(2));
        assert_eq!(sq.display(&names2()), "2*t1 + 1");
    }
}
