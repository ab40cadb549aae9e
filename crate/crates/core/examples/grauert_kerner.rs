//! Milnor and Tyurina numbers of `t1^4 + t1^2 t2^3 + t2^5` and the de Rham
//! class that accounts for their difference.

use nilbloch::parse::{parse_poly, Scope};
use nilbloch::singularities::{singularity_report, DEFAULT_MAX_TRUNCATION};

fn main() -> nilbloch::Result<()> {
    let scope = Scope::nil_only(2);
    for text in ["t1^4+t1^2*t2^3+t2^5", "t1^4+t1*t2^4", "t1^3+t2^3", "t1^2+t2^2"] {
        let f = parse_poly(text, &scope)?;
        let r = singularity_report(&f, DEFAULT_MAX_TRUNCATION)?;
        println!(
            "{:<22} mu={:<3} tau={:<3} h_dim={}  (N={}, m^{} in Jacobian)",
            text, r.mu, r.tau, r.h_dim, r.n_used, r.stabilization_degree
        );
    }
    Ok(())
}
