mod common;

use hproof::engine::{check_theorem, Config};
use hproof::surface::pp_theorem;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn random_claims_are_well_shaped(th in common::claim()) {
        common::shape_law(&th)?;
    }

    #[test]
    fn errors_carry_step_paths(th in common::claim()) {
        let r = check_theorem(&th, &Config::default());
        for e in &r.errors {
            prop_assert!(e.provenance.path.is_empty() || e.provenance.path.starts_with('<'), "{}\n{}", e, pp_theorem(&th));
        }
    }
}
