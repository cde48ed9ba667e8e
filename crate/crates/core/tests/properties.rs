mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn annotate_then_flatten_is_identity((t, picks) in term_with_positions()) {
        check_annotate_roundtrip(&t, &picks)?;
    }

    #[test]
    fn mgu_agrees_with_brute_force(s in unif_term(3, &["x", "y", "z"]), t in unif_term(3, &["x", "y", "z"])) {
        check_mgu(&s, &t)?;
    }

    #[test]
    fn mgu_of_term_with_instance(s in unif_term(3, &["x", "y", "z"]), a in unif_term(1, &["x"])) {
        let sigma = piast::term::Substitution::from_pairs([(piast::term::Var::new("y"), a)]);
        check_mgu(&s, &s.apply(&sigma))?;
    }

    #[test]
    fn dependency_graph_overapproximates_reachability(r in system()) {
        check_dg_overapproximation(&r)?;
    }

    #[test]
    fn processors_only_change_annotations(r in system(), coeffs in proptest::collection::vec(0u64..3, 1..8)) {
        check_processors_preserve_flattening(&r, &coeffs)?;
    }

    #[test]
    fn distributions_sum_to_one(r in system()) {
        check_distribution_sums(&r)?;
    }

    #[test]
    fn yes_proofs_reverify(v in positive_variant()) {
        run_yes_reverification(&v)?;
    }
}
