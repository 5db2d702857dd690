use proptest::prelude::*;

use pubo_forge::compile::{compile, CompileOptions};
use pubo_forge::poly::{Monomial, Polynomial};
use pubo_forge::quartic::{
    apply_quartic_plan, build_wmaxsat, decode_ancilla_set, emit_wcnf, parse_model, parse_wcnf,
    solve_wmaxsat_exact, DEFAULT_WMAXSAT_BUDGET,
};
use pubo_forge::verify::verify_default;

fn quartic_poly() -> impl Strategy<Value = Polynomial> {
    (4u32..=7)
        .prop_flat_map(|n| {
            let term = (
                prop::sample::subsequence((1..=n).collect::<Vec<_>>(), 3..=4),
                -6i64..=6,
            );
            (Just(n), prop::collection::vec(term, 1..4))
        })
        .prop_map(|(n, terms)| {
            let mut p = Polynomial::new(n);
            for (idx, c) in terms {
                if c != 0 {
                    p.add_term(Monomial::comp(&idx), c).unwrap();
                }
            }
            p
        })
        .prop_filter("needs a term of degree three or more", |p| p.degree() >= 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hard_satisfying_assignments_decode_to_sufficient_sets(
        poly in quartic_poly(),
        bits in prop::collection::vec(prop::bool::weighted(0.7), 64),
    ) {
        let inst = build_wmaxsat(&poly).unwrap();
        let assignment: Vec<bool> = (0..inst.vars.len()).map(|i| bits[i % bits.len()]).collect();
        prop_assume!(inst.violated_hard(&assignment).is_none());
        let set = decode_ancilla_set(&inst, &assignment).unwrap();
        let reduced = apply_quartic_plan(&poly, &set).unwrap();
        prop_assert!(reduced.ancilla_count() <= assignment.iter().filter(|b| **b).count());
        let report = verify_default(&poly, &reduced).unwrap();
        prop_assert!(report.passed(), "{}\n{}", poly, report);
    }

    #[test]
    fn all_true_satisfies_every_hard_clause(poly in quartic_poly()) {
        let inst = build_wmaxsat(&poly).unwrap();
        prop_assert_eq!(inst.violated_hard(&vec![true; inst.vars.len()]), None);
        prop_assert_eq!(inst.hard_weight as usize, inst.soft_count() + 1);
    }

    #[test]
    fn wcnf_round_trip(poly in quartic_poly()) {
        let inst = build_wmaxsat(&poly).unwrap();
        let text = emit_wcnf(&inst);
        prop_assert_eq!(parse_wcnf(&text).unwrap(), inst);
    }
}

#[test]
fn external_model_is_used_as_given() {
    let poly = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 2)]).unwrap();
    let inst = build_wmaxsat(&poly).unwrap();
    let sol = solve_wmaxsat_exact(&inst, DEFAULT_WMAXSAT_BUDGET).unwrap();
    let text: String = sol
        .assignment
        .iter()
        .enumerate()
        .map(|(i, b)| format!("{}{} ", if *b { "" } else { "-" }, i + 1))
        .collect();
    let model = parse_model(&format!("s OPTIMUM FOUND\nv {text}0\n"), inst.vars.len()).unwrap();
    assert_eq!(model, sol.assignment);
    let opts = CompileOptions {
        wmaxsat_model: Some(model),
        ..CompileOptions::default()
    };
    let c = compile(&poly, &opts).unwrap();
    assert_eq!(c.reduced.ancilla_count(), 2);
    assert_eq!(c.proven_optimal, None);
    assert!(verify_default(&poly, &c.reduced).unwrap().passed());
}

#[test]
fn violated_model_is_rejected() {
    let poly = Polynomial::from_terms(4, [(Monomial::comp(&[1, 2, 3, 4]), 2)]).unwrap();
    let inst = build_wmaxsat(&poly).unwrap();
    let opts = CompileOptions {
        wmaxsat_model: Some(vec![false; inst.vars.len()]),
        ..CompileOptions::default()
    };
    assert!(compile(&poly, &opts).is_err());
}
