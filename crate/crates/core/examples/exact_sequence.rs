//! The long exact sequence for nested ideals, including the Jacobian ideal of
//! the Grauert-Kerner polynomial inside `Q[t1, t2]/(t)^6`.

use nilbloch::algebra::{AlgebraSpec, TruncatedAlgebra};
use nilbloch::derham::verify_forms_sequence;
use nilbloch::forms::RelativeIdealSpec;
use nilbloch::parse::{parse_poly, Scope};
use nilbloch::poly::Var;

fn main() -> nilbloch::Result<()> {
    for n in 3..=5 {
        let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, n))?;
        let r = verify_forms_sequence(&alg, &RelativeIdealSpec::Power(n - 1), &RelativeIdealSpec::Full, 1)?;
        println!("R_{n}: dims {:?} ranks {:?} passed {}", r.dims, r.ranks, r.passed);
    }
    let f = parse_poly("t1^4+t1^2*t2^3+t2^5", &Scope::nil_only(2))?;
    let jac = RelativeIdealSpec::Explicit(vec![f.derivative(Var::Nil(0)), f.derivative(Var::Nil(1))]);
    let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(2, 6))?;
    let r = verify_forms_sequence(&alg, &jac, &RelativeIdealSpec::Full, 1)?;
    println!("Jacobian: dims {:?} ranks {:?}", r.dims, r.ranks);
    println!("correction H^0(R', I') = {}, alpha injective {}, passed {}", r.correction_dim, r.alpha_injective, r.passed);
    Ok(())
}
