//! Pushforward along `t -> t^(N-1)` identifies relative forms of the dual
//! numbers with those of `Q[t]/t^N` relative to `t^(N-1)`.

use nilbloch::cli::verify_sigma;

fn main() -> nilbloch::Result<()> {
    for n in 2..=6 {
        let r = verify_sigma(n, true)?;
        let rows: Vec<String> =
            r.rows.iter().map(|row| format!("n={}:{}->{} rank {}", row.degree, row.dim_source, row.dim_target, row.rank)).collect();
        println!("N={n} bijective={}  {}", r.bijective, rows.join("  "));
    }
    Ok(())
}
