mod common;

use petri_h1s::behavior::check_keller;
use petri_h1s::net::{parikh, residue};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn residue_subtracts_parikh_vectors(
        tau in prop::collection::vec(0usize..4, 0..12),
        sigma in prop::collection::vec(0usize..4, 0..12),
    ) {
        let r = residue(&tau, &sigma);
        let (pt, ps, pr) = (parikh(&tau, 4), parikh(&sigma, 4), parikh(&r, 4));
        for t in 0..4 {
            prop_assert_eq!(pr[t], pt[t].saturating_sub(ps[t]));
        }
        // order of the survivors is kept
        let mut it = tau.iter();
        prop_assert!(r.iter().all(|x| it.any(|y| y == x)));
    }

    #[test]
    fn choice_free_systems_are_confluent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = common::random_cf(&mut rng);
        let tau = common::random_walk(&mut rng, &s, 6);
        let sigma = common::random_walk(&mut rng, &s, 6);
        prop_assert!(check_keller(&s, &tau, &sigma).unwrap());
    }
}
