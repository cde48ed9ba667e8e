//! Exact values behind the acceptance report, including the claims that do
//! not hold and are kept as ignored tests.

mod common;

use num_rational::BigRational;
use piast::engine::{self, render_text, Config, Verdict};
use piast::oracle::bounded_mass;

use common::corpus;

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn exact_masses_attainable_clauses() {
    let rw = corpus("rw");
    let g = rw.parse_term("g(x)").unwrap();
    assert_eq!(bounded_mass(&rw.ptrs, &g, 2, false).unwrap(), rational(1, 2));
    assert_eq!(bounded_mass(&rw.ptrs, &g, 4, false).unwrap(), rational(5, 8));
    assert_eq!(bounded_mass(&rw.ptrs, &g, 5, false).unwrap(), rational(11, 16));
    let incpl = corpus("incpl");
    assert_eq!(bounded_mass(&incpl.ptrs, &incpl.parse_term("a").unwrap(), 3, false).unwrap(), rational(1, 4));
}

#[test]
#[ignore = "R_rw has leaf mass 5/8 at depth 4, not 3/4"]
fn random_walk_mass_three_quarters_at_depth_four() {
    let rw = corpus("rw");
    let g = rw.parse_term("g(x)").unwrap();
    assert_eq!(bounded_mass(&rw.ptrs, &g, 4, false).unwrap(), rational(3, 4));
}

#[test]
#[ignore = "needs an interpretation expressing that low and high partition the list"]
fn quicksort_is_proved() {
    let start = std::time::Instant::now();
    let proof = engine::prove(&corpus("qsrt").ptrs, &Config::default());
    let t = start.elapsed();
    assert_eq!(proof.verdict, Verdict::Yes, "after {t:?}:\n{}", render_text(&proof));
}

#[test]
fn incpl_proof_names_the_processors_used() {
    let proof = engine::prove(&corpus("incpl").ptrs, &Config::default());
    let text = render_text(&proof);
    for needle in ["usable terms processor", "rewriting processor", "reduction pair processor", "Pol("] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}
