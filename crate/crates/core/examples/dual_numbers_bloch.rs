//! Bloch map on the dual numbers over `Q[a, b, 1/b]`.
//!
//! ```bash
//! cargo run --example dual_numbers_bloch
//! ```

use nilbloch::algebra::{AlgebraSpec, TruncatedAlgebra};
use nilbloch::derham::quotient_class;
use nilbloch::forms::RelativeIdealSpec;
use nilbloch::ksymbols::bloch;
use nilbloch::parse::{parse_form, parse_symbol};

fn main() -> nilbloch::Result<()> {
    let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 2).param("a", false).param("b", true))?;
    let symbol = parse_symbol("{1 + a*b*t, b}", &alg)?;
    let class = bloch(&symbol)?;
    let expected = quotient_class(&parse_form("t*a*db", &alg)?, &RelativeIdealSpec::Full)?;

    println!("symbol         {symbol}");
    println!("raw form       {}", class.raw);
    println!("class          {}", class.representative);
    println!("class of t*a*db {expected}");
    println!("equal: {}", class.representative == expected);
    Ok(())
}
