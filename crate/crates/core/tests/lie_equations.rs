use jetcalc::arrow::Arrow;
use jetcalc::lie_equations::*;
use jetcalc::linalg::{inverse, mat_mul, transpose};
use jetcalc::random;
use jetcalc::scalar::{int, origin, Scalar};
use num_traits::Zero;

#[test]
fn flat_metric_prolongs_bijectively() {
    let g = StructureJet::flat_metric(2, 4).unwrap();
    let r = prolongation_report(SystemKind::Killing, &g, 4).unwrap();
    assert_eq!(r.dims(), vec![3, 3, 3, 3]);
    assert!(r.all_surjective());
    assert!(r.bijective_from_two());
}

#[test]
fn sphere_prolongs_surjectively() {
    let g = StructureJet::sphere_metric_2d(3).unwrap();
    let r = prolongation_report(SystemKind::Killing, &g, 3).unwrap();
    assert_eq!(r.dims(), vec![3, 3, 3]);
    assert!(r.all_surjective());
}

#[test]
fn generic_metric_fails_third_order_surjectivity() {
    let g = StructureJet::generic_metric_2d(3).unwrap();
    let r = prolongation_report(SystemKind::Killing, &g, 3).unwrap();
    let row = r.row(3).unwrap();
    eprintln!("{r:?}");
    assert!(!row.surjective);
    assert!(row.lower_dim - row.image_dim >= 1);
}

#[test]
fn nonclosed_form_fails_second_order_probe() {
    let w = StructureJet::nonclosed_two_form_4d(2).unwrap();
    let r = prolongation_report(SystemKind::Symplectic { require_closed: false }, &w, 2).unwrap();
    eprintln!("{r:?}");
    assert!(!r.row(2).unwrap().surjective);
    let std4 = StructureJet::standard_symplectic(4, 2).unwrap();
    assert!(prolongation_report(SystemKind::Symplectic { require_closed: true }, &std4, 2).unwrap().all_surjective());
}

#[test]
#[allow(clippy::needless_range_loop)]
fn levi_civita_on_random_metric_jets() {
    let mut rng = random::rng(11);
    let mut done = 0;
    while done < 20 {
        let mut slots = vec![vec![vec![Scalar::zero(); 3]; 2]; 2];
        for i in 0..2 {
            for j in i..2 {
                for p in 0..3 {
                    let v = random::scalar(&mut rng);
                    slots[i][j][p] = v.clone();
                    slots[j][i][p] = v;
                }
            }
        }
        let g = StructureJet::new(StructureKind::Metric, 2, 1, origin(2), slots).unwrap();
        let Ok(check) = levi_civita_check(&g) else { continue };
        assert!(check.passed(), "{check:?}");
        done += 1;
    }
}

#[test]
fn conformal_metric_christoffel() {
    let one_plus = |n| jetcalc::poly::Poly::from_terms(2, [(jetcalc::multiindex::MultiIndex::new(vec![0, 0]), int(1)), (jetcalc::multiindex::MultiIndex::new(vec![1, 0]), int(n))]).unwrap();
    let z = jetcalc::poly::Poly::zero(2);
    let g = StructureJet::from_polys(StructureKind::Metric, 2, origin(2), &[vec![one_plus(2), z.clone()], vec![z, one_plus(2)]]).unwrap();
    let c = levi_civita(&g).unwrap();
    // Γ^1_{11} = 1, Γ^1_{22} = −1, Γ^2_{12} = 1
    assert_eq!(c.gamma[0][0][0], int(1));
    assert_eq!(c.gamma[0][1][1], int(-1));
    assert_eq!(c.gamma[1][0][1], int(1));
    assert!(levi_civita_check(&g).unwrap().passed());
}

#[test]
fn atiyah_for_flat_and_symplectic() {
    for k in 1..=2 {
        let g = StructureJet::flat_metric(2, k).unwrap();
        assert!(atiyah_exactness(&killing_system(&g, k).unwrap().solve()).exact());
        let w = StructureJet::standard_symplectic(2, k).unwrap();
        assert!(atiyah_exactness(&symplectic_system(&w, k, true).unwrap().solve()).exact());
    }
    assert!(atiyah_exactness(&LinearJetSubspace::full(2, 2, origin(2))).exact());
}

#[test]
fn bracket_closure() {
    let g = StructureJet::flat_metric(2, 1).unwrap();
    let s = killing_system(&g, 1).unwrap().solve();
    assert!(bracket_closure_check(&s, &euclidean_sections(2, 1).unwrap()).unwrap());
    let w = StructureJet::standard_symplectic(2, 2).unwrap();
    let s = symplectic_system(&w, 2, true).unwrap().solve();
    assert!(bracket_closure_check(&s, &hamiltonian_sections_2d(2).unwrap()).unwrap());
}

#[test]
fn linear_arrow_transforms_killing_system() {
    let a = vec![vec![int(2), int(1)], vec![int(0), int(1)]];
    let h = Arrow::affine(origin(2), origin(2), &a, 2).unwrap();
    let g = StructureJet::flat_metric(2, 1).unwrap();
    let s = killing_system(&g, 1).unwrap().solve();
    let moved = ad_transform_system(&h, &s).unwrap();
    // pushed metric A^{-T} g A^{-1}
    let ai = inverse(&a).unwrap();
    let gp = mat_mul(&transpose(&ai), &ai);
    let slots = (0..2).map(|i| (0..2).map(|j| vec![gp[i][j].clone(), Scalar::zero(), Scalar::zero()]).collect()).collect();
    let pushed = StructureJet::new(StructureKind::Metric, 2, 1, origin(2), slots).unwrap();
    assert!(moved.same_span(&killing_system(&pushed, 1).unwrap().solve()));
    let id = Arrow::identity(origin(2), 2).unwrap();
    assert!(ad_transform_system(&id, &s).unwrap().same_span(&s));
}
