//! Steinberg elements `{a + x, 1 - a - x} - {a, 1 - a}` have zero Bloch class.

use nilbloch::algebra::{AlgebraSpec, TruncatedAlgebra};
use nilbloch::ksymbols::{bloch, steinberg_element};
use nilbloch::parse::parse_elem;

fn main() -> nilbloch::Result<()> {
    let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(2, 4))?;
    for (a, x) in [("2", "t1"), ("-1/3", "t1*t2 + t2^2"), ("5", "3*t1 - t2^3")] {
        let zeta = steinberg_element(&parse_elem(a, &alg)?, &parse_elem(x, &alg)?)?;
        let b = bloch(&zeta)?;
        println!("a={a:<5} x={x:<14} raw={}  class zero: {}", b.raw, b.is_zero());
    }
    Ok(())
}
