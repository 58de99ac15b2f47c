mod common;

use hproof::surface::{parse_expression, parse_theorem, pp_expr, pp_theorem};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn expressions_round_trip(e in common::expr()) {
        let text = pp_expr(&e);
        let back = parse_expression(&text);
        prop_assert!(back.is_ok(), "{text}: {:?}", back);
        prop_assert_eq!(back.unwrap(), e, "{}", text);
    }

    #[test]
    fn printing_theorems_is_a_fixpoint(th in common::claim()) {
        let once = pp_theorem(&th);
        let parsed = parse_theorem(&once);
        prop_assert!(parsed.is_ok(), "{once}\n{:?}", parsed);
        prop_assert_eq!(pp_theorem(&parsed.unwrap()), once);
    }

    #[test]
    fn garbage_never_panics(s in "[ <>0-9a-zA-Z\\\\/=#:,.(){}\\[\\]~\n-]{0,80}") {
        let _ = parse_expression(&s);
        let _ = parse_theorem(&s);
    }

    #[test]
    fn theorem_prefix_garbage_never_panics(s in "[ <>0-9a-zA-Z\\\\/=#:,.(){}~\n-]{0,80}") {
        let _ = parse_theorem(&format!("THEOREM {s}"));
        let _ = parse_theorem(&format!("THEOREM a\n<1>1. {s}"));
    }

    #[test]
    fn level_mutations_are_reported(line in 0usize..11, level in 0u32..7) {
        let src = common::data("cantor.tla");
        let mut lines: Vec<String> = src.lines().map(String::from).collect();
        let Some(l) = lines.get_mut(line) else { return Ok(()) };
        let Some(rest) = l.trim_start().strip_prefix('<') else { return Ok(()) };
        let close = rest.find('>').unwrap();
        let indent = l.len() - l.trim_start().len();
        *l = format!("{}<{level}>{}", &l[..indent], &rest[close + 1..]);
        let text = lines.join("\n");
        match parse_theorem(&text) {
            Ok(th) => prop_assert_eq!(pp_theorem(&parse_theorem(&pp_theorem(&th)).unwrap()), pp_theorem(&th)),
            Err(e) => {
                let (ln, _) = e.position();
                prop_assert!(ln as usize <= lines.len() + 1);
            }
        }
    }
}
