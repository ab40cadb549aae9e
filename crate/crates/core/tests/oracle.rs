mod support;

use nilbloch::acceptance::{oracle_corpus, GRAUERT_KERNER_MU, GRAUERT_KERNER_TAU};
use support::{compare_with_library, grauert_kerner, partial, stable_quotient_dim, DenseAlgebra};

#[test]
fn dense_oracle_matches_engines_on_corpus() {
    for alg in oracle_corpus().unwrap() {
        let dense = DenseAlgebra::from_library(&alg);
        assert!(dense.dim() <= 60);
        if let Err(e) = compare_with_library(&alg) {
            panic!("m={} N={}: {e}", alg.nilpotents(), alg.bound());
        }
    }
}

#[test]
fn dense_oracle_sanity() {
    // Q[t]/t^3: forms t, t^2 and dt, t*dt; d is bijective
    let r3 = DenseAlgebra::new(1, 3, vec![]);
    assert_eq!(r3.dim(), 3);
    assert_eq!((r3.dim_forms(0), r3.dim_forms(1)), (2, 2));
    assert_eq!(r3.cohomology(), vec![0, 0]);
}

#[test]
fn grauert_kerner_milnor_and_tyurina_pins() {
    let f = grauert_kerner();
    let jac = vec![partial(&f, 0), partial(&f, 1)];
    let (mu, _) = stable_quotient_dim(2, &jac, 16).expect("isolated");
    let mut with_f = jac.clone();
    with_f.push(f);
    let (tau, _) = stable_quotient_dim(2, &with_f, 16).expect("isolated");
    assert_eq!((mu, tau), (GRAUERT_KERNER_MU, GRAUERT_KERNER_TAU));
}
