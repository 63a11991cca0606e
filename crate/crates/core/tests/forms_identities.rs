use jetcalc::forms::*;
use jetcalc::jet::VectorJet;
use jetcalc::random;
use jetcalc::spencer::{jet_action, spencer_bracket, LiftPolicy};

const Z: LiftPolicy = LiftPolicy::ZeroExtension;

#[test]
fn spencer_bracket_jacobi_and_derivation() {
    for (n, k) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
        for seed in 0..4 {
            let mut rng = random::rng(seed);
            let x = random::vector_jet_section(&mut rng, n, k, 2);
            let y = random::vector_jet_section(&mut rng, n, k, 2);
            let z = random::vector_jet_section(&mut rng, n, k, 2);
            let f = random::function_jet_section(&mut rng, n, k, 2);
            let b = |a: &VectorJet<_>, c: &VectorJet<_>| spencer_bracket(a, c, Z).unwrap();
            let jac = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).unwrap().add(&b(&z, &b(&x, &y))).unwrap();
            assert!(jac.is_zero(), "jacobi n={n} k={k} seed={seed}");
            let lhs = jet_action(&b(&x, &y), &f, Z).unwrap();
            let rhs = jet_action(&x, &jet_action(&y, &f, Z).unwrap(), Z)
                .unwrap()
                .sub(&jet_action(&y, &jet_action(&x, &f, Z).unwrap(), Z).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "derivation n={n} k={k} seed={seed}");
        }
    }
}

#[test]
fn d_is_tensorial_and_squares_to_zero() {
    for (n, k, r) in [(2, 1, 0), (2, 1, 1), (2, 2, 1), (1, 1, 0), (3, 1, 2)] {
        for seed in 0..3 {
            let mut rng = random::rng(100 + seed);
            let w = random::form(&mut rng, n, k, r, 1);
            let args: Vec<_> = (0..=r).map(|_| random::vector_jet_section(&mut rng, n, k, 1)).collect();
            let dw = exterior_derivative_full(&w).unwrap();
            assert_eq!(dw.eval(&args).unwrap(), d_on_sections(&w, &args, Z).unwrap(), "tensorial {n} {k} {r}");
            let ddw = exterior_derivative_full(&dw).unwrap();
            assert!(ddw.is_zero(), "d² {n} {k} {r}");
        }
    }
}

#[test]
fn cartan_formula() {
    for (n, k, r) in [(2, 1, 1), (2, 1, 0), (1, 2, 1)] {
        let mut rng = random::rng(7);
        let w = random::form(&mut rng, n, k, r, 1);
        let y = random::vector_jet_section(&mut rng, n, k, 1);
        let l = lie_derivative(&y, &w).unwrap();
        let mut rhs = interior_product(&y, &exterior_derivative_full(&w).unwrap()).unwrap();
        if r > 0 {
            rhs = rhs.add(&exterior_derivative_full(&interior_product(&y, &w).unwrap()).unwrap()).unwrap();
        }
        assert_eq!(l, rhs, "cartan {n} {k} {r}");
    }
}

#[test]
fn d_respects_membership_and_projection() {
    for (n, k, r) in [(2, 1, 0), (2, 1, 1), (2, 2, 1), (1, 2, 0)] {
        for seed in 0..3 {
            let mut rng = random::rng(200 + seed);
            let w = random::kr_form(&mut rng, n, k, r, 1);
            assert!(is_kr_form(&w));
            let dw = exterior_derivative(&w).unwrap();
            assert!(is_kr_form(&dw), "membership {n} {k} {r} {seed}");
            for m in 0..k {
                let lhs = project_form(&dw, m).unwrap();
                let rhs = exterior_derivative(&project_form(&w, m).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "projection {n} {k} {r} {m} {seed}");
            }
        }
    }
}

#[test]
fn exactness_probe() {
    for (n, k, r, d) in [(1, 1, 1, 1), (2, 0, 1, 1), (2, 1, 1, 1)] {
        let rep = local_exactness_check(n, k, r, d).unwrap();
        eprintln!("{rep:?}");
        assert!(rep.all_exact());
    }
}
