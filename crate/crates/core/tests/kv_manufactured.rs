mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schouten_core::homological::kv_solve;

#[test]
fn recovers_manufactured_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut nontrivial = 0;
    for trial in 0..20 {
        let (fol, x_true) = support::kv_instance(&mut rng);
        let psi = fol.poisson().body().clone();
        let phi = x_true.schouten(&psi).unwrap();
        nontrivial += usize::from(!phi.normalized().is_zero());
        let x = kv_solve(&fol, &phi).unwrap_or_else(|e| panic!("trial {trial}: {e} for X_true = {}", x_true.display()));
        assert_eq!(x.schouten(&psi).unwrap().exact_eq(&phi), Some(true), "trial {trial}");
        assert!(psi.schouten(&x.sub(&x_true).unwrap()).unwrap().normalized().is_zero(), "trial {trial}");
    }
    assert!(nontrivial >= 15, "only {nontrivial} nonzero right-hand sides");
}
