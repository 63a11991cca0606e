//! Seeded randomized identity suites. Every suite draws from one
//! `ChaCha8Rng` seeded from the configured seed, so reports are reproducible
//! byte for byte.

use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::arrow::{compose_arrows, invert_arrow, Arrow};
use crate::error::Result;
use crate::forms::{
    d_on_sections, exterior_derivative, exterior_derivative_full, full_fiber_sections, interior_product, is_kr_form,
    lie_derivative, project_form, theta_structure_algebra,
};
use crate::jet::{prolong_vector_field, FunctionJet};
use crate::klein::field_bracket;
use crate::multiindex::MultiIndex;
use crate::poly::Poly;
use crate::random::{self, JetRng};
use crate::scalar::{int, Scalar};
use crate::spencer::{jet_action, spencer_bracket, LiftPolicy};

const ZERO_LIFT: LiftPolicy = LiftPolicy::ZeroExtension;

/// Outcome of one identity over many instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    /// Description of the first failing instance.
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

/// Accumulates outcomes by check name, in first-seen order.
struct Tally {
    checks: Vec<CheckOutcome>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: Vec::new() }
    }

    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let pos = match self.checks.iter().position(|c| c.name == name) {
            Some(p) => p,
            None => {
                self.checks.push(CheckOutcome { name: name.to_string(), instances: 0, failures: 0, witness: None });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[pos];
        c.instances += 1;
        if !ok {
            c.failures += 1;
            if c.witness.is_none() {
                c.witness = Some(witness());
            }
        }
    }

    fn finish(self, suite: &str, seed: u64) -> SuiteReport {
        SuiteReport { suite: suite.to_string(), seed, checks: self.checks }
    }
}

/// Instance counts and bounds for the suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances per suite.
    pub count: usize,
    pub n_max: usize,
    pub k_max: usize,
    /// Coefficient degree of random sections.
    pub degree: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        SuiteConfig { seed, count, n_max: 2, k_max: 3, degree: 2 }
    }
}

fn shape(rng: &mut JetRng, cfg: &SuiteConfig) -> (usize, usize) {
    (rng.gen_range(1..=cfg.n_max.max(1)), rng.gen_range(0..=cfg.k_max))
}

/// Antisymmetry, Jacobi, lift independence, projection compatibility and the
/// classical reduction of the Spencer bracket.
pub fn spencer_bracket_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = random::rng(cfg.seed);
    let mut t = Tally::new();
    for inst in 0..cfg.count {
        let (n, k) = shape(&mut rng, cfg);
        let w = || format!("instance {inst}: n={n} k={k}");
        let x = random::vector_jet_section(&mut rng, n, k, cfg.degree);
        let y = random::vector_jet_section(&mut rng, n, k, cfg.degree);
        let z = random::vector_jet_section(&mut rng, n, k, cfg.degree);
        let xy = spencer_bracket(&x, &y, ZERO_LIFT)?;
        let yx = spencer_bracket(&y, &x, ZERO_LIFT)?;
        t.record("antisymmetry", xy.add(&yx)?.is_zero(), w);
        let jac = spencer_bracket(&x, &spencer_bracket(&y, &z, ZERO_LIFT)?, ZERO_LIFT)?
            .add(&spencer_bracket(&y, &spencer_bracket(&z, &x, ZERO_LIFT)?, ZERO_LIFT)?)?
            .add(&spencer_bracket(&z, &xy, ZERO_LIFT)?)?;
        t.record("jacobi", jac.is_zero(), w);
        let lift = LiftPolicy::Randomized { seed: rng.gen() };
        t.record("lift_independence", spencer_bracket(&x, &y, lift)? == xy, w);
        if k >= 1 {
            let lhs = xy.project(k - 1)?;
            let rhs = spencer_bracket(&x.project(k - 1)?, &y.project(k - 1)?, ZERO_LIFT)?;
            t.record("projection_compatible", lhs == rhs, w);
        } else {
            let classical = field_bracket(&x.vector_part(), &y.vector_part())?;
            t.record("classical_reduction", xy.vector_part() == classical, w);
        }
    }
    Ok(t.finish("spencer_bracket", cfg.seed))
}

/// Derivation law, Leibniz rules for `•` and for smooth functions, and the
/// prolongation homomorphism `j_k[X, Y] = [j_k X, j_k Y]`.
pub fn jet_action_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = random::rng(cfg.seed.wrapping_add(1));
    let mut t = Tally::new();
    for inst in 0..cfg.count {
        let (n, k) = shape(&mut rng, cfg);
        let w = || format!("instance {inst}: n={n} k={k}");
        let x = random::vector_jet_section(&mut rng, n, k, cfg.degree);
        let y = random::vector_jet_section(&mut rng, n, k, cfg.degree);
        let f = random::function_jet_section(&mut rng, n, k, cfg.degree);
        let g = random::function_jet_section(&mut rng, n, k, cfg.degree);
        let act = |a: &crate::jet::VectorJetSection, b: &crate::jet::FunctionJetSection| jet_action(a, b, ZERO_LIFT);

        let lhs = act(&spencer_bracket(&x, &y, ZERO_LIFT)?, &f)?;
        let rhs = act(&x, &act(&y, &f)?)?.sub(&act(&y, &act(&x, &f)?)?)?;
        t.record("derivation_of_bracket", lhs == rhs, w);

        let lhs = act(&x, &f.product(&g)?)?;
        let rhs = act(&x, &f)?.product(&g)?.add(&f.product(&act(&x, &g)?)?)?;
        t.record("leibniz_product", lhs == rhs, w);

        let h0 = random::poly(&mut rng, n, cfg.degree);
        let h = FunctionJet::smooth_function(n, k, h0.clone());
        let lhs = act(&x, &h.product(&g)?)?;
        let x0: Vec<Poly> = x.vector_part();
        let mut xh = Poly::zero(n);
        for (a, xa) in x0.iter().enumerate() {
            xh = xh.add(&xa.mul(&h0.partial(a)?)?)?;
        }
        let rhs = g.mul_coeff(&xh).add(&act(&x, &g)?.mul_coeff(&h0))?;
        t.record("leibniz_smooth_function", lhs == rhs, w);

        let p = random::vector_field(&mut rng, n, 3);
        let q = random::vector_field(&mut rng, n, 3);
        let lhs = prolong_vector_field(&field_bracket(&p, &q)?, k)?;
        let rhs = spencer_bracket(&prolong_vector_field(&p, k)?, &prolong_vector_field(&q, k)?, ZERO_LIFT)?;
        t.record("prolongation_homomorphism", lhs == rhs, w);
    }
    Ok(t.finish("jet_action", cfg.seed))
}

/// `(dω)_{i_0…i_r} = 1/(r+1) Σ_j (−1)^j ∂_{i_j} ω_{…î_j…}` on ordinary forms.
fn de_rham(w: &crate::forms::FormSection) -> Result<Vec<(Vec<usize>, Poly)>> {
    let (n, r) = (w.dim(), w.degree());
    let norm = Scalar::one() / Scalar::from_integer(((r + 1) as i64).into());
    let mut out = Vec::new();
    for t in crate::liealg::increasing_tuples(n, r + 1) {
        let mut acc = Poly::zero(n);
        for j in 0..=r {
            let rest: Vec<usize> = t.iter().enumerate().filter(|(q, _)| *q != j).map(|(_, s)| *s).collect();
            let c = w.value(&rest).slot_at(0).partial(t[j])?;
            acc = if j % 2 == 0 { acc.add(&c)? } else { acc.add(&c.neg())? };
        }
        out.push((t, acc.scale(&norm)));
    }
    Ok(out)
}

/// `d² = 0`, compatibility of `d` with projections and membership, the
/// classical differential at order 0, extension independence of the defining
/// formula, and Cartan's formula.
pub fn form_complex_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = random::rng(cfg.seed.wrapping_add(2));
    let mut t = Tally::new();
    let n = 2;
    for inst in 0..cfg.count {
        let k = rng.gen_range(0..=cfg.k_max.min(2));
        let r = rng.gen_range(0..=1);
        let w = || format!("instance {inst}: n={n} k={k} r={r}");
        let form = random::kr_form(&mut rng, n, k, r, 1);
        let dw = exterior_derivative(&form)?;
        t.record("d_squared_zero", exterior_derivative_full(&dw)?.is_zero(), w);
        t.record("d_preserves_membership", is_kr_form(&dw), w);
        let mut commutes = true;
        for m in 0..k {
            commutes &= project_form(&dw, m)? == exterior_derivative(&project_form(&form, m)?)?;
        }
        t.record("projection_commutes_with_d", commutes, w);

        if k == 0 {
            let ok = de_rham(&form)?.into_iter().all(|(tu, p)| dw.value(&tu).slot_at(0) == &p);
            t.record("de_rham_at_order_zero", ok, w);
        }

        let free = random::form(&mut rng, n, k, r, 1);
        let args: Vec<_> = (0..=r).map(|_| random::vector_jet_section(&mut rng, n, k, 1)).collect();
        let via_basis = exterior_derivative(&free)?.eval(&args)?;
        let lift = LiftPolicy::Randomized { seed: rng.gen() };
        let ok = d_on_sections(&free, &args, ZERO_LIFT)? == via_basis && d_on_sections(&free, &args, lift)? == via_basis;
        t.record("extension_independence", ok, w);

        let y = random::vector_jet_section(&mut rng, n, k, 1);
        let l = lie_derivative(&y, &form)?;
        let mut cartan = interior_product(&y, &exterior_derivative_full(&form)?)?;
        if r > 0 {
            cartan = cartan.add(&exterior_derivative(&interior_product(&y, &form)?)?)?;
        }
        t.record("cartan_formula", l == cartan, w);
        t.record("lie_derivative_commutes_with_d", exterior_derivative(&l)? == lie_derivative(&y, &dw)?, w);
    }
    Ok(t.finish("form_complex", cfg.seed))
}

/// `{f : X f = 0 for all X in 𝔤_k}` is the constants, for `n ≤ n_max`, `k ≤ k_max`.
pub fn constants_kernel_suite(n_max: usize, k_max: usize, degree: usize) -> Result<SuiteReport> {
    let mut t = Tally::new();
    for n in 1..=n_max {
        for k in 0..=k_max {
            let basis = theta_structure_algebra(n, k, &full_fiber_sections(n, k), degree)?;
            let ok = basis.len() == 1 && basis[0].is_smooth_function() && basis[0].slot_at(0).degree() == Some(0);
            t.record("kernel_is_constants", ok, || format!("n={n} k={k}: dim {}", basis.len()));
        }
    }
    Ok(t.finish("constants_kernel", 0))
}

fn faa_di_bruno(g: &[Scalar], f: &[Scalar]) -> Vec<Scalar> {
    // g, f: derivatives of orders 1..=4; f has no constant term
    let (f1, f2, f3, f4) = (&f[0], &f[1], &f[2], &f[3]);
    let (g1, g2, g3, g4) = (&g[0], &g[1], &g[2], &g[3]);
    vec![
        g1 * f1,
        g2 * f1 * f1 + g1 * f2,
        g3 * f1 * f1 * f1 + int(3) * g2 * f1 * f2 + g1 * f3,
        g4 * f1 * f1 * f1 * f1 + int(6) * g3 * f1 * f1 * f2 + int(3) * g2 * f2 * f2 + int(4) * g2 * f1 * f3 + g1 * f4,
    ]
}

fn inverse_derivatives(f: &[Scalar]) -> Vec<Scalar> {
    let (f1, f2, f3, f4) = (&f[0], &f[1], &f[2], &f[3]);
    let p = |e: u32| (0..e).fold(Scalar::one(), |acc, _| acc * f1);
    vec![
        Scalar::one() / f1,
        -f2 / p(3),
        (int(3) * f2 * f2 - f1 * f3) / p(5),
        -(int(15) * f2 * f2 * f2 - int(10) * f1 * f2 * f3 + f1 * f1 * f4) / p(7),
    ]
}

fn line_coeffs(a: &Arrow) -> Vec<Scalar> {
    (1..=a.order()).map(|d| a.coeff(0, &MultiIndex::new(vec![d as u32])).clone()).collect()
}

/// Groupoid laws and projection compatibility of arrows, plus one-variable
/// chain-rule and inverse-function oracles at order 4.
pub fn arrow_suite(cfg: &SuiteConfig, n_max: usize, k_max: usize) -> Result<SuiteReport> {
    let mut rng = random::rng(cfg.seed.wrapping_add(3));
    let mut t = Tally::new();
    for inst in 0..cfg.count {
        let n = rng.gen_range(1..=n_max);
        let k = rng.gen_range(1..=k_max);
        let w = || format!("instance {inst}: n={n} k={k}");
        let pts: Vec<_> = (0..4).map(|_| random::point(&mut rng, n)).collect();
        let a = random::arrow(&mut rng, pts[0].clone(), pts[1].clone(), k);
        let b = random::arrow(&mut rng, pts[1].clone(), pts[2].clone(), k);
        let c = random::arrow(&mut rng, pts[2].clone(), pts[3].clone(), k);
        let ba = compose_arrows(&b, &a)?;
        t.record("associativity", compose_arrows(&c, &ba)? == compose_arrows(&compose_arrows(&c, &b)?, &a)?, w);
        let ida = Arrow::identity(pts[0].clone(), k)?;
        let idb = Arrow::identity(pts[1].clone(), k)?;
        t.record("identities", compose_arrows(&a, &ida)? == a && compose_arrows(&idb, &a)? == a, w);
        let ai = invert_arrow(&a)?;
        t.record("inverses", compose_arrows(&ai, &a)? == ida && compose_arrows(&a, &ai)? == idb, w);
        let m = rng.gen_range(1..=k);
        let ok = ba.project(m)? == compose_arrows(&b.project(m)?, &a.project(m)?)? && ai.project(m)? == invert_arrow(&a.project(m)?)?;
        t.record("projection_morphism", ok, w);
    }
    for inst in 0..cfg.count.min(100) {
        let w = || format!("line instance {inst}");
        let p = random::point(&mut rng, 1);
        let q = random::point(&mut rng, 1);
        let s = random::point(&mut rng, 1);
        let f = random::arrow(&mut rng, p.clone(), q.clone(), 4);
        let g = random::arrow(&mut rng, q, s, 4);
        let composed = line_coeffs(&compose_arrows(&g, &f)?);
        t.record("chain_rule_oracle", composed == faa_di_bruno(&line_coeffs(&g), &line_coeffs(&f)), w);
        t.record("inverse_oracle", line_coeffs(&invert_arrow(&f)?) == inverse_derivatives(&line_coeffs(&f)), w);
    }
    Ok(t.finish("arrow", cfg.seed))
}

/// The suites run by `check-identities`, at the given chart dimension and order bounds.
pub fn identity_suites(seed: u64, count: usize, n_max: usize, k_max: usize) -> Result<Vec<SuiteReport>> {
    let cfg = SuiteConfig { seed, count, n_max, k_max, degree: 2 };
    Ok(vec![
        spencer_bracket_suite(&cfg)?,
        jet_action_suite(&cfg)?,
        form_complex_suite(&SuiteConfig { k_max: k_max.min(2), ..cfg.clone() })?,
        constants_kernel_suite(n_max.min(2), k_max.min(2), 3)?,
        arrow_suite(&cfg, n_max.clamp(1, 3), k_max.max(1))?,
    ])
}
