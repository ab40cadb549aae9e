//! Milnor and Tyurina numbers of isolated hypersurface singularities at the
//! origin, and the de Rham cross-check of their difference.

use serde::Serialize;

use crate::algebra::{AlgebraSpec, IdealSpan, TruncatedAlgebra};
use crate::derham::{cohomology, CohomologyOptions};
use crate::error::{Error, Result};
use crate::forms::{Engine, RelativeIdealSpec};
use crate::poly::{Poly, Var};

pub const DEFAULT_MAX_TRUNCATION: u32 = 24;

/// A quotient dimension certified stable under deeper truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StableDimension {
    pub dim: usize,
    pub truncation: u32,
    /// The `d` with `m^d` inside the ideal modulo `m^truncation`.
    pub stabilization_degree: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityReport {
    pub f: String,
    pub mu: usize,
    pub tau: usize,
    pub h_dim: usize,
    pub n_used: u32,
    pub stabilization_degree: u32,
    /// Truncation of the ring the de Rham side was computed in.
    pub derham_truncation: u32,
}

fn check_critical(f: &Poly, m: usize) -> Result<()> {
    if f.is_zero() {
        return Err(Error::OriginNotCritical);
    }
    if f.terms().any(|(mono, _)| mono.params.iter().any(|&e| e != 0) || mono.nil.len() != m) {
        return Err(Error::InvalidExponents("singularities take polynomials in t only".into()));
    }
    if f.min_nil_degree().is_some_and(|d| d < 2) {
        return Err(Error::OriginNotCritical);
    }
    Ok(())
}

fn start_truncation(f: &Poly) -> u32 {
    (f.max_nil_degree().unwrap_or(0) + 2).max(4)
}

fn partials(f: &Poly, m: usize) -> Vec<Poly> {
    (0..m).map(|i| f.derivative(Var::Nil(i))).collect()
}

fn stable_quotient(m: usize, gens: &[Poly], start: u32, n_max: u32) -> Result<StableDimension> {
    for n in start..=n_max {
        let span = IdealSpan::build(m, n, gens);
        if let Some(d) = (0..n).find(|&d| span.contains_degree(d)) {
            return Ok(StableDimension { dim: span.quotient_dim(), truncation: n, stabilization_degree: d });
        }
    }
    Err(Error::NotIsolated(n_max))
}

/// `dim Q[t] / (df/dt_1, .., df/dt_m, (t)^n)`, without stabilization.
pub fn milnor_dim_at(f: &Poly, n: u32) -> Result<usize> {
    let m = nil_count(f)?;
    Ok(IdealSpan::build(m, n, &partials(f, m)).quotient_dim())
}

/// `dim Q[t] / (f, df/dt_1, .., df/dt_m, (t)^n)`, without stabilization.
pub fn tyurina_dim_at(f: &Poly, n: u32) -> Result<usize> {
    let m = nil_count(f)?;
    let mut gens = partials(f, m);
    gens.push(f.clone());
    Ok(IdealSpan::build(m, n, &gens).quotient_dim())
}

/// `dim Q[[t]] / (df/dt_1, .., df/dt_m)`.
pub fn milnor_number(f: &Poly, n_max: u32) -> Result<StableDimension> {
    let m = nil_count(f)?;
    check_critical(f, m)?;
    stable_quotient(m, &partials(f, m), start_truncation(f), n_max)
}

/// `dim Q[[t]] / (f, df/dt_1, .., df/dt_m)`.
pub fn tyurina_number(f: &Poly, n_max: u32) -> Result<StableDimension> {
    let m = nil_count(f)?;
    check_critical(f, m)?;
    let mut gens = partials(f, m);
    gens.push(f.clone());
    stable_quotient(m, &gens, start_truncation(f), n_max)
}

fn nil_count(f: &Poly) -> Result<usize> {
    f.terms().next().map(|(mono, _)| mono.nil.len()).ok_or(Error::OriginNotCritical)
}

/// `Q[t_1..t_m] / (f, m^n)`.
pub fn truncated_hypersurface(f: &Poly, n: u32) -> Result<TruncatedAlgebra> {
    let m = nil_count(f)?;
    let mut ideal = vec![f.clone()];
    ideal.extend(AlgebraSpec::power_generators(m, n));
    TruncatedAlgebra::new(AlgebraSpec::with_ideal(m, n, ideal))
}

/// `dim H^{m-1}_dR(R', I')` for `R' = Q[t] / (f, m^n)` and `I'` its maximal ideal.
pub fn top_cohomology(f: &Poly, n: u32) -> Result<usize> {
    let m = nil_count(f)?;
    let alg = truncated_hypersurface(f, n)?;
    let opts = CohomologyOptions { max_degree: Some(m), param_bound: 0, engine: Some(Engine::Whole) };
    Ok(cohomology(&alg, &RelativeIdealSpec::Full, &opts)?.h(m - 1))
}

pub fn singularity_report(f: &Poly, n_max: u32) -> Result<SingularityReport> {
    let m = nil_count(f)?;
    let mu = milnor_number(f, n_max)?;
    let tau = tyurina_number(f, n_max)?;
    let n_used = mu.truncation.max(tau.truncation);
    let expected = mu.dim - tau.dim;
    let mut found = 0;
    for n in n_used..=n_max.max(n_used) {
        found = top_cohomology(f, n)?;
        if found == expected {
            return Ok(SingularityReport {
                f: f.display(&crate::poly::VarNames::standard(m, Vec::new())),
                mu: mu.dim,
                tau: tau.dim,
                h_dim: found,
                n_used,
                stabilization_degree: mu.stabilization_degree,
                derham_truncation: n,
            });
        }
    }
    Err(Error::CrossCheckFailed { expected, found })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Q;
    use crate::poly::Monomial;

    fn poly(m: usize, terms: &[(i64, &[u32])]) -> Poly {
        Poly::from_terms(terms.iter().map(|(c, e)| {
            assert_eq!(e.len(), m);
            (Monomial::new(e.to_vec(), Vec::new()), Q::from_integer((*c).into()))
        }))
    }

    #[test]
    fn one_variable() {
        for k in 1..6u32 {
            let f = poly(1, &[(1, &[k + 1])]);
            assert_eq!(milnor_number(&f, 24).unwrap().dim, k as usize);
            assert_eq!(tyurina_number(&f, 24).unwrap().dim, k as usize);
        }
    }

    #[test]
    fn grauert_kerner() {
        let f = poly(2, &[(1, &[4, 0]), (1, &[2, 3]), (1, &[0, 5])]);
        let r = singularity_report(&f, 24).unwrap();
        assert_eq!((r.mu, r.tau, r.h_dim), (12, 11, 1));
        // tau is also the dimension of top-degree forms on R'
        let alg = truncated_hypersurface(&f, r.n_used).unwrap();
        let rep = cohomology(&alg, &RelativeIdealSpec::Full, &CohomologyOptions::default()).unwrap();
        assert_eq!(rep.rows[2].dim_forms, r.tau);
    }

    #[test]
    fn quasi_homogeneous() {
        let f = poly(2, &[(1, &[3, 0]), (1, &[0, 3])]);
        let r = singularity_report(&f, 24).unwrap();
        assert_eq!((r.mu, r.tau, r.h_dim), (4, 4, 0));
    }

    #[test]
    fn guards() {
        let linear = poly(2, &[(1, &[1, 0]), (1, &[0, 3])]);
        assert_eq!(milnor_number(&linear, 24).unwrap_err(), Error::OriginNotCritical);
        let non_isolated = poly(2, &[(1, &[2, 0])]);
        assert_eq!(milnor_number(&non_isolated, 10).unwrap_err(), Error::NotIsolated(10));
    }
}
