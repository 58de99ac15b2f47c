mod common;

use hproof::meta::{alpha_eq, filter, substitute, Assumption, Context, Definable, Obligation};
use hproof::surface::{free_identifiers, parse_expression, Expr};
use proptest::collection::vec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn filter_is_idempotent_and_hidden_free(o in common::obligation()) {
        common::filter_law(&o)?;
    }

    #[test]
    fn embedding_ignores_visibility(o in common::closed_obligation(), mask in vec(any::<bool>(), 1..8)) {
        common::embed_law(&o, &mask)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn substituting_a_name_for_itself_is_identity(e in common::expr(), x in common::name()) {
        prop_assert!(alpha_eq(&substitute(&e, &x, &Expr::ident(x.clone())), &e));
    }

    #[test]
    fn substituting_an_absent_name_is_identity(e in common::expr(), u in common::expr()) {
        prop_assert!(alpha_eq(&substitute(&e, "absent", &u), &e));
    }

    #[test]
    fn substitution_removes_the_name(e in common::expr(), x in common::name()) {
        let u = Expr::ident("fresh");
        prop_assert!(!free_identifiers(&substitute(&e, &x, &u)).contains(&x));
    }

    #[test]
    fn substitution_avoids_capture(e in common::expr(), x in common::name()) {
        // `x`, `y` and `z` are the only binders, so substituting them in must
        // keep them free.
        let u = Expr::binary(hproof::surface::BinOp::And, Expr::ident("x"), Expr::ident("y"));
        let out = substitute(&e, &x, &u);
        if free_identifiers(&e).contains(&x) {
            let fv = free_identifiers(&out);
            prop_assert!(fv.contains("x") && fv.contains("y"));
        }
    }

    #[test]
    fn alpha_equivalence_is_reflexive(e in common::expr()) {
        prop_assert!(alpha_eq(&e, &e));
    }
}

#[test]
fn filter_example_from_definitions() {
    let o = Obligation::new(
        Context(vec![
            Assumption::New("x".into()),
            Assumption::def("y", Definable::constant(Expr::ident("x")), true),
        ]),
        parse_expression("x = y").unwrap(),
    );
    let want = Obligation::new(
        Context(vec![Assumption::New("x".into()), Assumption::New("y".into())]),
        parse_expression("x = y").unwrap(),
    );
    assert_eq!(filter(&o), want);
}
