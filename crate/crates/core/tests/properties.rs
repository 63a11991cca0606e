//! Property tests over seeded random instances.

use jetcalc::arrow::{compose_arrows, invert_arrow, Arrow};
use jetcalc::cli::builtins::{scenario, BuiltinParams, CATALOG};
use jetcalc::cli::scenario::parse_scenario;
use jetcalc::forms::{arrow_transform_form, exterior_derivative, exterior_derivative_full, is_kr_form};
use jetcalc::klein::{build_projective_example, isotropy_filtration, projective_line_example, pushed_isotropy_filtration};
use jetcalc::lie_equations::{prolongation_report, StructureJet, SystemKind};
use jetcalc::random;
use jetcalc::scalar::{self, frac};
use jetcalc::spencer::{spencer_bracket, LiftPolicy};
use proptest::prelude::*;

const Z: LiftPolicy = LiftPolicy::ZeroExtension;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_antisymmetric_and_jacobi(seed in any::<u64>(), n in 1usize..=2, k in 0usize..=2) {
        let mut rng = random::rng(seed);
        let x = random::vector_jet_section(&mut rng, n, k, 2);
        let y = random::vector_jet_section(&mut rng, n, k, 2);
        let z = random::vector_jet_section(&mut rng, n, k, 1);
        let xy = spencer_bracket(&x, &y, Z).unwrap();
        prop_assert!(xy.add(&spencer_bracket(&y, &x, Z).unwrap()).unwrap().is_zero());
        let jac = spencer_bracket(&x, &spencer_bracket(&y, &z, Z).unwrap(), Z).unwrap()
            .add(&spencer_bracket(&y, &spencer_bracket(&z, &x, Z).unwrap(), Z).unwrap()).unwrap()
            .add(&spencer_bracket(&z, &xy, Z).unwrap()).unwrap();
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn bracket_independent_of_lift(seed in any::<u64>(), lift in any::<u64>(), n in 1usize..=2, k in 0usize..=3) {
        let mut rng = random::rng(seed);
        let x = random::vector_jet_section(&mut rng, n, k, 2);
        let y = random::vector_jet_section(&mut rng, n, k, 2);
        prop_assert_eq!(spencer_bracket(&x, &y, Z).unwrap(), spencer_bracket(&x, &y, LiftPolicy::Randomized { seed: lift }).unwrap());
    }

    #[test]
    fn d_squares_to_zero_and_preserves_membership(seed in any::<u64>(), k in 0usize..=2, r in 0usize..=1) {
        let mut rng = random::rng(seed);
        let w = random::kr_form(&mut rng, 2, k, r, 2);
        let dw = exterior_derivative(&w).unwrap();
        prop_assert!(is_kr_form(&dw));
        prop_assert!(exterior_derivative_full(&dw).unwrap().is_zero());
    }

    #[test]
    fn arrows_form_a_groupoid(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        let mut rng = random::rng(seed);
        let p: Vec<_> = (0..4).map(|_| random::point(&mut rng, n)).collect();
        let a = random::arrow(&mut rng, p[0].clone(), p[1].clone(), k);
        let b = random::arrow(&mut rng, p[1].clone(), p[2].clone(), k);
        let c = random::arrow(&mut rng, p[2].clone(), p[3].clone(), k);
        let left = compose_arrows(&c, &compose_arrows(&b, &a).unwrap()).unwrap();
        let right = compose_arrows(&compose_arrows(&c, &b).unwrap(), &a).unwrap();
        prop_assert_eq!(left, right);
        let id = Arrow::identity(p[0].clone(), k).unwrap();
        prop_assert_eq!(compose_arrows(&invert_arrow(&a).unwrap(), &a).unwrap(), id);
    }

    #[test]
    fn arrow_action_on_forms_is_functorial(seed in any::<u64>(), k in 0usize..=1, r in 1usize..=2) {
        let mut rng = random::rng(seed);
        let n = 2;
        let p: Vec<_> = (0..3).map(|_| random::point(&mut rng, n)).collect();
        let a = random::arrow(&mut rng, p[0].clone(), p[1].clone(), k + 1);
        let b = random::arrow(&mut rng, p[1].clone(), p[2].clone(), k + 1);
        let w = random::form(&mut rng, n, k, r, 1).at(&p[0]).unwrap();
        let stepwise = arrow_transform_form(&b, &arrow_transform_form(&a, &w).unwrap()).unwrap();
        let direct = arrow_transform_form(&compose_arrows(&b, &a).unwrap(), &w).unwrap();
        prop_assert_eq!(stepwise, direct);
        let id = Arrow::identity(p[0].clone(), k + 1).unwrap();
        prop_assert_eq!(arrow_transform_form(&id, &w).unwrap(), w);
    }

    #[test]
    fn isotropy_filtration_is_equivariant(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        for a in [projective_line_example().unwrap(), build_projective_example(1).unwrap()] {
            let base = isotropy_filtration(&a, 4).unwrap();
            let target = random::point(&mut rng, 1);
            let g = random::arrow(&mut rng, a.base.clone(), target, 5);
            let pushed = pushed_isotropy_filtration(&a, &g, 4).unwrap();
            prop_assert_eq!(&pushed.dims, &base.dims);
            prop_assert_eq!(pushed.ghost_dim, base.ghost_dim);
        }
    }

    #[test]
    fn scalars_round_trip_through_text(p in -10_000i64..10_000, q in 1i64..10_000) {
        let s = frac(p, q);
        prop_assert_eq!(scalar::parse(&scalar::format(&s)).unwrap(), s);
    }

    #[test]
    fn flat_metric_projections_never_exceed_lower_dims(n in 1usize..=3, k_max in 1usize..=3) {
        let g = StructureJet::flat_metric(n, k_max).unwrap();
        let r = prolongation_report(SystemKind::Killing, &g, k_max).unwrap();
        for row in &r.rows {
            prop_assert!(row.image_dim <= row.lower_dim);
            prop_assert_eq!(row.solution_dim, row.image_dim + row.kernel_dim);
        }
        prop_assert!(r.all_surjective());
    }
}

#[test]
fn builtin_scenarios_round_trip_through_json() {
    let params = BuiltinParams { k_max: 3, n: 1 };
    for entry in CATALOG {
        let s = scenario(entry.name, params).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(parse_scenario(&text).unwrap(), s, "{}", entry.name);
    }
}
