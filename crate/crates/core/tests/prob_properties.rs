mod common;

use common::*;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn information_identities_hold(seed in any::<u64>()) {
        let j = random_joint(&mut rng(seed));
        prop_assert!(chain_rule_gap(&j) <= TOL);
        prop_assert!(conditioning_gap(&j) <= TOL);
        prop_assert!(symmetry_gap(&j) <= TOL);
        prop_assert!(negativity(&j) <= TOL);
    }

    #[test]
    fn marginals_preserve_mass(seed in any::<u64>()) {
        let j = random_joint(&mut rng(seed));
        let m = j.marginalize(&["C", "A"]).unwrap();
        prop_assert!((m.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let h = j.entropy(&["A", "C"], &[]).unwrap();
        prop_assert!((m.entropy(&["A", "C"], &[]).unwrap() - h).abs() <= TOL);
    }
}
