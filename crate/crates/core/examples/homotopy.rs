//! The Euler homotopy `h` on `Q[a][t]/t^N`: `(dh + hd) w = i w` in internal degree `i`.

use nilbloch::algebra::{AlgebraSpec, TruncatedAlgebra};
use nilbloch::forms::euler_homotopy;
use nilbloch::parse::parse_form;

fn main() -> nilbloch::Result<()> {
    let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 6).param("a", false))?;
    for text in ["t^3*a*da", "a*t^2*dt", "t*dt∧da", "t^4*a^2"] {
        let w = parse_form(text, &alg)?;
        let hd = euler_homotopy(&w.d())?;
        let total = if w.degree() == 0 { hd } else { euler_homotopy(&w)?.d().add(&hd)? };
        println!("w = {w:<12} degrees {:?}  (dh+hd)w = {total}", w.internal_degrees());
    }
    Ok(())
}
