mod common;

use proptest::prelude::*;

macro_rules! seeded {
    ($($name:ident),* $(,)?) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]
            $(
                #[test]
                fn $name(seed in any::<u64>()) {
                    if let Err(e) = common::$name(seed) {
                        prop_assert!(false, "seed {}: {}", seed, e);
                    }
                }
            )*
        }
    };
}

seeded!(
    schouten_antisymmetry,
    schouten_jacobi,
    schouten_leibniz,
    contraction_squares_to_zero,
    folded_square_zero,
    substitute_is_ring_morphism,
    exp_inverse_law,
    exp_is_ring_morphism,
    projection_is_idempotent,
    eigen_split_laws,
    gauge_invariance,
    print_parse_roundtrip,
);
