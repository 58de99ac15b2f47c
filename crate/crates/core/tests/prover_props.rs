mod common;

use hproof::engine::{check_theorem, Config};
use hproof::prover::{prove, Budget, Sequent};
use hproof::surface::parse_theorem;
use proptest::collection::vec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn agrees_with_truth_tables(hyps in vec(common::prop_formula(), 0..3), goal in common::prop_formula()) {
        common::oracle_law(&hyps, &goal)?;
    }
}

#[test]
fn larger_budgets_keep_proofs() {
    let budgets = [
        Budget::new(1, 200, 1).unwrap(),
        Budget::new(2, 400, 2).unwrap(),
        Budget::new(4, 1000, 3).unwrap(),
        Budget::default(),
    ];
    for (name, text) in common::corpus().into_iter().chain([("cantor".into(), common::data("cantor.tla"))]) {
        let th = parse_theorem(&text).unwrap();
        for leaf in check_theorem(&th, &Config::default()).leaves() {
            let s = Sequent::from_obligation(&leaf.obligation).unwrap();
            let mut proved = false;
            for b in &budgets {
                let now = prove(&s, b).is_proved();
                assert!(now || !proved, "{name} {}: lost a proof at {b:?}", leaf.origin.display_path());
                proved = now;
            }
        }
    }
}
