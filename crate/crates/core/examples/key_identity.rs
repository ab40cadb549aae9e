//! `(i+j) {1 + a t^i, 1 + b t^j}` against `t^(i+j) (i a db - j b da)`.
//!
//! ```bash
//! cargo run --example key_identity -- 2 3
//! ```

use nilbloch::derham::ExactnessCertificate;
use nilbloch::ksymbols::verify_key_identity;

fn main() -> nilbloch::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let pairs = match args.as_slice() {
        [i, j] => vec![(*i, *j)],
        _ => vec![(1, 1), (1, 2), (2, 2), (1, 5), (3, 3)],
    };
    for (i, j) in pairs {
        let r = verify_key_identity(i, j)?;
        print!("({i},{j}) passed={}", r.passed);
        if let ExactnessCertificate::Exact { primitive } = &r.certificate {
            print!("  primitive {primitive}");
        }
        println!();
    }
    Ok(())
}
