//! Relative de Rham cohomology of `Q[t_1..t_m]/(t)^N` vanishes; a hypersurface
//! quotient does not.

use nilbloch::algebra::{AlgebraSpec, TruncatedAlgebra};
use nilbloch::derham::{cohomology, CohomologyOptions};
use nilbloch::forms::RelativeIdealSpec;

fn main() -> nilbloch::Result<()> {
    for m in 1..=3 {
        for n in 2..=5 {
            let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(m, n))?;
            let rep = cohomology(&alg, &RelativeIdealSpec::Full, &CohomologyOptions::default())?;
            let dims: Vec<usize> = rep.rows.iter().map(|r| r.dim_forms).collect();
            println!("m={m} N={n}  forms {dims:?}  all H zero: {}", rep.all_zero());
        }
    }
    Ok(())
}
