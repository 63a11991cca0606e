//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! The process exits nonzero when a criterion fails, unless that criterion is
//! listed in `KNOWN_UNATTAINABLE` with the reason it cannot hold as stated.

use std::process::Command;
use std::time::{Duration, Instant};

use jetcalc::identities::{
    arrow_suite, constants_kernel_suite, form_complex_suite, jet_action_suite, spencer_bracket_suite, SuiteConfig,
    SuiteReport,
};
use jetcalc::klein::{
    affine_line_example, build_projective_example, isotropy_filtration, projective_line_example,
    sigma_homomorphism_check, RealizedLieAlgebra,
};
use jetcalc::lie_equations::*;
use jetcalc::liealg::{is_split, nilpotency_analysis};
use jetcalc::random;
use jetcalc::scalar::{origin, Scalar};
use jetcalc::spencer::{jet_group_extension, jet_group_kernel};
use jetcalc::Result;
use num_traits::Zero;

const SEED: u64 = 20240917;

/// Criteria that fail for mathematical reasons, with the reason.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    8,
    "at n = 1 the order-3 to order-2 jet group extension splits (the order-1 and order-2 slots span a \
     complementary subalgebra); at n = 2 it does not split (see the supplementary line)",
)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn suite_outcome(r: &SuiteReport, required: &[&str]) -> Result<Outcome> {
    let mut ok = r.passed();
    let mut parts = vec![];
    for name in required {
        match r.checks.iter().find(|c| c.name == *name) {
            Some(c) => {
                ok &= c.passed();
                parts.push(format!("{}={}/{}", c.name, c.instances - c.failures, c.instances));
                if let Some(w) = &c.witness {
                    parts.push(format!("witness: {w}"));
                }
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    outcome(ok, parts.join(" "))
}

fn count_at_least(r: &SuiteReport, name: &str, min: usize) -> bool {
    r.checks.iter().any(|c| c.name == name && c.instances >= min)
}

fn c1() -> Result<Outcome> {
    let cfg = SuiteConfig { seed: SEED, count: 200, n_max: 2, k_max: 3, degree: 2 };
    let r = spencer_bracket_suite(&cfg)?;
    let mut o = suite_outcome(&r, &["antisymmetry", "jacobi", "lift_independence", "projection_compatible", "classical_reduction"],
    )?;
    o.passed &= count_at_least(&r, "jacobi", 200) && count_at_least(&r, "lift_independence", 200);
    Ok(o)
}

fn c2() -> Result<Outcome> {
    let cfg = SuiteConfig { seed: SEED, count: 200, n_max: 2, k_max: 3, degree: 2 };
    let r = jet_action_suite(&cfg)?;
    let names = ["derivation_of_bracket", "leibniz_product", "leibniz_smooth_function", "prolongation_homomorphism"];
    let mut o = suite_outcome(&r, &names)?;
    o.passed &= names.iter().all(|n| count_at_least(&r, n, 200));
    Ok(o)
}

fn c3() -> Result<Outcome> {
    let cfg = SuiteConfig { seed: SEED, count: 60, n_max: 2, k_max: 2, degree: 1 };
    let r = form_complex_suite(&cfg)?;
    let mut o = suite_outcome(&r, &["d_squared_zero", "projection_commutes_with_d", "de_rham_at_order_zero", "extension_independence"],
    )?;
    o.passed &= count_at_least(&r, "d_squared_zero", 50) && count_at_least(&r, "extension_independence", 20);
    Ok(o)
}

fn c4() -> Result<Outcome> {
    let r = constants_kernel_suite(2, 2, 3)?;
    let mut o = suite_outcome(&r, &["kernel_is_constants"])?;
    o.passed &= count_at_least(&r, "kernel_is_constants", 6);
    Ok(o)
}

fn c5() -> Result<Outcome> {
    let flat = prolongation_report(SystemKind::Killing, &StructureJet::flat_metric(2, 4)?, 4)?;
    let sphere = prolongation_report(SystemKind::Killing, &StructureJet::sphere_metric_2d(3)?, 3)?;
    let generic = prolongation_report(SystemKind::Killing, &StructureJet::generic_metric_2d(3)?, 3)?;
    let g3 = generic.row(3).expect("row 3");
    // projections between the listed orders k = 1..4, i.e. from order 2 up
    let flat_ok = flat.dims() == vec![3, 3, 3, 3] && flat.bijective_from_two();
    let sphere_ok = sphere.dims() == vec![3, 3, 3] && sphere.all_surjective();
    let deficit = g3.lower_dim - g3.image_dim;
    outcome(
        flat_ok && sphere_ok && !g3.surjective && deficit >= 1,
        format!(
            "flat dims {:?} bijective={}; sphere dims {:?} surjective={}; generic rank deficit {}",
            flat.dims(),
            flat_ok,
            sphere.dims(),
            sphere.all_surjective(),
            deficit
        ),
    )
}

#[allow(clippy::needless_range_loop)]
fn c6() -> Result<Outcome> {
    let mut rng = random::rng(SEED);
    let (mut done, mut failed) = (0, 0);
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
        // singular order-0 parts are skipped
        let Ok(g) = StructureJet::new(StructureKind::Metric, 2, 1, origin(2), slots) else { continue };
        let Ok(check) = levi_civita_check(&g) else { continue };
        if !check.passed() {
            failed += 1;
        }
        done += 1;
    }
    outcome(failed == 0, format!("{done} metric 1-jets, {failed} mismatches"))
}

fn c7() -> Result<Outcome> {
    let std = prolongation_report(SystemKind::Symplectic { require_closed: true }, &StructureJet::standard_symplectic(2, 3)?, 3)?;
    let bad = prolongation_report(SystemKind::Symplectic { require_closed: false }, &StructureJet::nonclosed_two_form_4d(2)?, 2)?;
    let row = bad.row(2).expect("row 2");
    outcome(
        std.all_surjective() && !row.surjective,
        format!(
            "standard dims {:?} surjective={}; non-closed k=2 image {} of {}",
            std.dims(),
            std.all_surjective(),
            row.image_dim,
            row.lower_dim
        ),
    )
}

fn c8() -> Result<Outcome> {
    let split = is_split(&jet_group_extension(1, 3, 2)?)?;
    let k21 = nilpotency_analysis(&jet_group_kernel(1, 2, 1)?);
    let k32 = nilpotency_analysis(&jet_group_kernel(1, 3, 2)?);
    // the non-abelian clause fixes no dimension; at n = 1 that kernel is abelian
    let k31 = nilpotency_analysis(&jet_group_kernel(2, 3, 1)?);
    let ok = !split && k21.abelian && k32.abelian && k31.nilpotent && !k31.abelian;
    outcome(
        ok,
        format!(
            "n=1: split={split}; kernels 2->1 abelian={}, 3->2 abelian={}; n=2: 3->1 series {:?} nilpotent={} abelian={}",
            k21.abelian, k32.abelian, k31.lower_central_series, k31.nilpotent, k31.abelian
        ),
    )
}

fn c8_supplement() -> Result<Outcome> {
    let split = is_split(&jet_group_extension(2, 3, 2)?)?;
    let k31 = nilpotency_analysis(&jet_group_kernel(2, 3, 1)?);
    outcome(
        !split && k31.nilpotent && !k31.abelian,
        format!("n=2: split={split}; kernel 3->1 series {:?}", k31.lower_central_series),
    )
}

fn klein_line(name: &str, a: &RealizedLieAlgebra, order: usize, ghost: usize) -> Result<(bool, String)> {
    let f = isotropy_filtration(a, 8)?;
    let mut sigma_ok = true;
    for m in 1..=3 {
        sigma_ok &= sigma_homomorphism_check(a, m)?;
    }
    let ok = f.order == order && f.ghost_dim == ghost && sigma_ok;
    Ok((ok, format!("{name}: order {} ghost {} sigma {}", f.order, f.ghost_dim, sigma_ok)))
}

fn c9() -> Result<Outcome> {
    let rows = [
        klein_line("affine", &affine_line_example()?, 1, 0)?,
        klein_line("sl2", &projective_line_example()?, 2, 0)?,
        klein_line("gl2", &build_projective_example(1)?, 2, 1)?,
    ];
    outcome(rows.iter().all(|r| r.0), rows.iter().map(|r| r.1.clone()).collect::<Vec<_>>().join("; "))
}

fn c10() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = vec![];
    for k in 1..=2 {
        let flat = atiyah_exactness(&killing_system(&StructureJet::flat_metric(2, k)?, k)?.solve());
        let symp = atiyah_exactness(&symplectic_system(&StructureJet::standard_symplectic(2, k)?, k, true)?.solve());
        ok &= flat.exact() && symp.exact();
        parts.push(format!("k={k} flat {}+{} symplectic {}+{}", flat.kernel_dim, flat.anchor_rank, symp.kernel_dim, symp.anchor_rank));
    }
    let intransitive = atiyah_exactness(&intransitive_system(2, 1, 1)?);
    ok &= !intransitive.anchor_surjective && !intransitive.exact();
    parts.push(format!("intransitive anchor rank {} flagged={}", intransitive.anchor_rank, !intransitive.exact()));
    outcome(ok, parts.join("; "))
}

fn c11() -> Result<Outcome> {
    let cfg = SuiteConfig { seed: SEED, count: 500, n_max: 3, k_max: 4, degree: 2 };
    let r = arrow_suite(&cfg, 3, 4)?;
    let names = ["associativity", "identities", "inverses", "projection_morphism", "chain_rule_oracle", "inverse_oracle"];
    let mut o = suite_outcome(&r, &names)?;
    o.passed &= names[..4].iter().all(|n| count_at_least(&r, n, 500));
    Ok(o)
}

fn run_cli(args: &[&str]) -> std::io::Result<(Vec<u8>, i32)> {
    let out = Command::new(env!("CARGO_BIN_EXE_jetcalc")).args(args).output()?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn c12() -> Result<Outcome> {
    let seed = SEED.to_string();
    let runs: [&[&str]; 4] = [
        &["check-identities", "--n", "2", "--k", "3", "--count", "40", "--seed", &seed, "--json"],
        &["prolong", "--builtin", "flat-metric-2d", "--kmax", "4", "--json"],
        &["klein", "--builtin", "gl2-projective", "--json"],
        &["extension", "--builtin", "jetgroup-ext-n1-k3-m2", "--json"],
    ];
    let mut ok = true;
    let mut bytes = 0;
    for args in runs {
        let a = run_cli(args).map_err(|e| jetcalc::JetError::Invalid(e.to_string()))?;
        let b = run_cli(args).map_err(|e| jetcalc::JetError::Invalid(e.to_string()))?;
        ok &= a == b && !a.0.is_empty();
        bytes += a.0.len();
    }
    outcome(ok, format!("{} reports, {bytes} bytes, identical={ok}", runs.len()))
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);
    let criteria: [Criterion; 12] = [
        (1, "spencer bracket suite", 60, c1),
        (2, "jet action suite", 60, c2),
        (3, "form complex suite", 120, c3),
        (4, "constants kernel", 30, c4),
        (5, "riemannian prolongation", 120, c5),
        (6, "levi-civita completion", 30, c6),
        (7, "symplectic prolongation", 60, c7),
        (8, "jet group extension", 30, c8),
        (9, "klein orders and ghosts", 30, c9),
        (10, "atiyah exactness", 30, c10),
        (11, "arrow calculus", 60, c11),
        (12, "determinism", 120, c12),
    ];
    let mut unexpected = vec![];
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let res = f();
        let elapsed = start.elapsed();
        let (passed, detail) = match res {
            Ok(o) => (o.passed && elapsed <= Duration::from_secs(budget), o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {id:>2} {name}: {} ({detail}) [{:.2}s / {budget}s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if id == 8 {
            match c8_supplement() {
                Ok(o) => println!("criterion  8 supplementary, n=2: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail),
                Err(e) => println!("criterion  8 supplementary, n=2: FAIL (error: {e})"),
            }
        }
        if !passed {
            match KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id) {
                Some((_, why)) => println!("             known unattainable: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
