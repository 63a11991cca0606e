//! Command-line front end: scenarios in, JSON reports out.

pub mod builtins;
pub mod scenario;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use num_traits::Zero;

use crate::error::JetError;
use crate::forms::local_exactness_check;
use crate::identities::identity_suites;
use crate::klein::{
    isotropy_filtration, klein_order_of_system, sigma_homomorphism_check, sigma_tower, validate_realization,
    RealizedLieAlgebra,
};
use crate::lie_equations::{prolongation_report, SystemKind};
use crate::liealg::{cocycle_is_closed, extension_two_cocycle, is_split, nilpotency_analysis, ExtensionData};
use crate::scalar::format;
use crate::spencer::{spencer_bracket, LiftPolicy};
use builtins::{BuiltinParams, CATALOG};
use scenario::{
    fields_from_terms, matrix, parse_scenario, scalars, section_from_terms, BracketTask, ExtensionTask, FormsTask,
    IdentitiesTask, KleinTask, ProlongationTask, Scenario, SystemName, Task,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

const DEFAULT_SEED: u64 = 1;
const DEFAULT_COUNT: usize = 100;
const DEFAULT_KMAX: usize = 4;
const DEFAULT_DEPTH: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "jetcalc", version, about = "Exact jet calculus: brackets, forms, Lie equations, Klein pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario file (JSON, schema version 1).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Named builtin scenario (see `list-builtins`).
    #[arg(long)]
    pub builtin: Option<String>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the JSON report rather than a text summary.
    #[arg(long)]
    pub json: bool,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Seeded identity suites: brackets, jet action, form complex, constants, arrows.
    CheckIdentities {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Random instances per suite.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Spencer bracket of two polynomial jet sections.
    Bracket {
        #[command(flatten)]
        common: Common,
    },
    /// Local exactness of closed (k, r)-forms with polynomial coefficients.
    Forms {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Coefficient degree bound.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Prolongation tower of a Killing or symplectic system.
    Prolong {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Isotropy filtration, ghost and order of a realized Lie algebra.
    Klein {
        #[command(flatten)]
        common: Common,
        /// Chart dimension for the `projective` builtin.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Splitting of a Lie algebra extension with abelian kernel.
    Extension {
        #[command(flatten)]
        common: Common,
    },
    /// Catalog of named example scenarios.
    ListBuiltins {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckVerdict {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckVerdict {
    fn new(name: impl Into<String>, passed: bool, witness: impl FnOnce() -> String) -> Self {
        CheckVerdict { name: name.into(), passed, witness: if passed { None } else { Some(witness()) } }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub checks: Vec<CheckVerdict>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    fn new(command: &str, scenario: Option<Scenario>, seed: Option<u64>, checks: Vec<CheckVerdict>, data: Value) -> Self {
        Report {
            tool: "jetcalc",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            scenario,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
            data,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn summary(&self) -> String {
        let mut s = format!("{} {}: {}\n", self.tool, self.command, if self.passed { "PASS" } else { "FAIL" });
        for c in &self.checks {
            s.push_str(&format!("  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name));
            if let Some(w) = &c.witness {
                s.push_str(&format!(" ({w})"));
            }
            s.push('\n');
        }
        s
    }
}

/// Failure modes that map to distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Resource(m) => write!(f, "resource bound exceeded: {m}"),
        }
    }
}

impl From<JetError> for CliError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::ResourceBound(m) => CliError::Resource(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: &Command) -> CliResult<i32> {
    if let Command::ListBuiltins { json } = cmd {
        if *json {
            write_stdout(&format!("{}\n", serde_json::to_string_pretty(CATALOG).expect("catalog serializes")));
        } else {
            let mut s = String::new();
            for e in CATALOG {
                s.push_str(&format!("{:<24} {:<10} {}\n{:<35} claim: {}\n", e.name, e.command, e.description, "", e.claim));
            }
            write_stdout(&s);
        }
        return Ok(EXIT_PASS);
    }
    let common = common_of(cmd);
    let start = Instant::now();
    let mut report = build_report(cmd)?;
    if common.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    emit(&report, common)?;
    Ok(if report.passed { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::CheckIdentities { common, .. }
        | Command::Bracket { common }
        | Command::Forms { common, .. }
        | Command::Prolong { common, .. }
        | Command::Klein { common, .. }
        | Command::Extension { common } => common,
        Command::ListBuiltins { .. } => unreachable!("handled before dispatch"),
    }
}

fn emit(report: &Report, common: &Common) -> CliResult<()> {
    let json = report.to_json();
    if let Some(path) = &common.out {
        std::fs::write(path, &json).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if common.json {
        write_stdout(&json);
    } else {
        write_stdout(&report.summary());
    }
    Ok(())
}

// A closed pipe downstream is not an error worth panicking over.
fn write_stdout(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

/// Loads the scenario named by `--scenario` or `--builtin`, if any.
fn load_scenario(common: &Common, params: BuiltinParams, command: &str) -> CliResult<Option<Scenario>> {
    match (&common.scenario, &common.builtin) {
        (Some(_), Some(_)) => Err(CliError::Usage("--scenario and --builtin are mutually exclusive".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            parse_scenario(&text).map(Some).map_err(|e| CliError::Usage(e.to_string()))
        }
        (None, Some(name)) => {
            if let Some(entry) = builtins::lookup(name) {
                if entry.command != command {
                    return Err(CliError::Usage(format!("builtin `{name}` belongs to `{}`", entry.command)));
                }
            }
            Ok(Some(builtins::scenario(name, params)?))
        }
        (None, None) => Ok(None),
    }
}

fn mismatch(command: &str) -> CliError {
    CliError::Usage(format!("schema error at task.kind: scenario task does not match command `{command}`"))
}

fn require(s: Option<Scenario>, command: &str) -> CliResult<Scenario> {
    s.ok_or_else(|| CliError::Usage(format!("`{command}` needs --scenario or --builtin")))
}

fn build_report(cmd: &Command) -> CliResult<Report> {
    let common = common_of(cmd);
    let kmax_flag = match cmd {
        Command::Prolong { kmax, .. } => *kmax,
        _ => None,
    };
    let n_flag = match cmd {
        Command::Klein { n, .. } => *n,
        _ => 1,
    };
    let params = BuiltinParams { k_max: kmax_flag.unwrap_or(DEFAULT_KMAX), n: n_flag };
    match cmd {
        Command::CheckIdentities { n, k, count, .. } => {
            let sc = load_scenario(common, params, "check-identities")?;
            let (n, k, count) = match &sc {
                Some(Scenario { n, task: Task::Identities(IdentitiesTask { k, count: c }), .. }) => (*n, *k, count.or(*c)),
                Some(_) => return Err(mismatch("check-identities")),
                None => (*n, *k, *count),
            };
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            identities_report(sc, n, k, count.unwrap_or(DEFAULT_COUNT), seed)
        }
        Command::Bracket { .. } => {
            let sc = require(load_scenario(common, params, "bracket")?, "bracket")?;
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            bracket_report(sc, seed)
        }
        Command::Forms { n, k, r, degree, .. } => {
            let sc = load_scenario(common, params, "forms")?;
            let (n, k, r, d) = match &sc {
                Some(Scenario { n, task: Task::Forms(FormsTask { k, r, degree: d }), .. }) => (*n, *k, *r, degree.unwrap_or(*d)),
                Some(_) => return Err(mismatch("forms")),
                None => (*n, *k, *r, degree.unwrap_or(2)),
            };
            forms_report(sc, n, k, r, d)
        }
        Command::Prolong { kmax, .. } => {
            let sc = require(load_scenario(common, params, "prolong")?, "prolong")?;
            // builtins already honor --kmax within their available jet order
            prolong_report(sc, if common.builtin.is_some() { None } else { *kmax })
        }
        Command::Klein { depth, .. } => {
            let sc = require(load_scenario(common, params, "klein")?, "klein")?;
            klein_report(sc, *depth)
        }
        Command::Extension { .. } => {
            let sc = require(load_scenario(common, params, "extension")?, "extension")?;
            extension_report(sc)
        }
        Command::ListBuiltins { .. } => unreachable!("handled before dispatch"),
    }
}

/// Runs a parsed scenario with default options, as `--scenario` would.
pub fn run_scenario(sc: Scenario, seed: u64) -> std::result::Result<Report, CliError> {
    match &sc.task {
        Task::Identities(IdentitiesTask { k, count }) => {
            let (n, k, count) = (sc.n, *k, count.unwrap_or(DEFAULT_COUNT));
            identities_report(Some(sc), n, k, count, seed)
        }
        Task::Bracket(_) => bracket_report(sc, seed),
        Task::Forms(FormsTask { k, r, degree }) => {
            let (n, k, r, d) = (sc.n, *k, *r, *degree);
            forms_report(Some(sc), n, k, r, d)
        }
        Task::Prolongation(_) => prolong_report(sc, None),
        Task::Klein(_) => klein_report(sc, None),
        Task::Extension(_) => extension_report(sc),
    }
}

fn identities_report(sc: Option<Scenario>, n: usize, k: usize, count: usize, seed: u64) -> CliResult<Report> {
    if n == 0 {
        return Err(JetError::ZeroDimension.into());
    }
    let suites = identity_suites(seed, count, n, k)?;
    let checks = suites
        .iter()
        .flat_map(|s| {
            s.checks.iter().map(move |c| CheckVerdict {
                name: format!("{}/{}", s.suite, c.name),
                passed: c.passed(),
                witness: if c.passed() {
                    None
                } else {
                    Some(c.witness.clone().unwrap_or_else(|| format!("{} of {} instances failed", c.failures, c.instances)))
                },
            })
        })
        .collect();
    let data = json!({ "n_max": n, "k_max": k, "count": count, "suites": suites });
    Ok(Report::new("check-identities", sc, Some(seed), checks, data))
}

fn bracket_report(sc: Scenario, seed: u64) -> CliResult<Report> {
    let Task::Bracket(BracketTask { k, x, y }) = &sc.task else { return Err(mismatch("bracket")) };
    let xs = section_from_terms(sc.n, *k, x)?;
    let ys = section_from_terms(sc.n, *k, y)?;
    let zero = spencer_bracket(&xs, &ys, LiftPolicy::ZeroExtension)?;
    let random = spencer_bracket(&xs, &ys, LiftPolicy::Randomized { seed })?;
    let swapped = spencer_bracket(&ys, &xs, LiftPolicy::ZeroExtension)?;
    let checks = vec![
        CheckVerdict::new("lift_independence", zero == random, || format!("lift seed {seed} changes the bracket")),
        CheckVerdict::new("antisymmetry", zero.add(&swapped)?.is_zero(), || "[x,y] + [y,x] is nonzero".into()),
    ];
    let comps: Vec<Vec<Vec<crate::poly::PolyTerm>>> =
        zero.comps().iter().map(|c| c.iter().map(|p| p.to_terms()).collect()).collect();
    let data = json!({ "k": k, "bracket": comps });
    Ok(Report::new("bracket", Some(sc), Some(seed), checks, data))
}

fn forms_report(sc: Option<Scenario>, n: usize, k: usize, r: usize, degree: usize) -> CliResult<Report> {
    let rep = local_exactness_check(n, k, r, degree)?;
    let checks = vec![
        CheckVerdict::new("closed_forms_exact", rep.all_exact(), || {
            format!("{} of {} closed forms lack a primitive of degree {}", rep.unsolved.len(), rep.closed_dim, rep.primitive_degree)
        }),
        CheckVerdict::new("constants_kernel_one_dimensional", rep.constants_kernel_dim == 1, || {
            format!("kernel of d on functions has dimension {}", rep.constants_kernel_dim)
        }),
    ];
    Ok(Report::new("forms", sc, None, checks, serde_json::to_value(&rep).expect("serializes")))
}

fn prolong_report(mut sc: Scenario, kmax: Option<usize>) -> CliResult<Report> {
    let Task::Prolongation(ProlongationTask { structure, k_max, system, require_closed }) = &mut sc.task else {
        return Err(mismatch("prolong"));
    };
    if let Some(k) = kmax {
        *k_max = k;
    }
    let s = structure.build(sc.n)?;
    let kind = match system {
        SystemName::Killing => SystemKind::Killing,
        SystemName::Symplectic => SystemKind::Symplectic { require_closed: *require_closed },
    };
    let rep = prolongation_report(kind, &s, *k_max)?;
    let checks = rep
        .rows
        .iter()
        .map(|row| {
            CheckVerdict::new(format!("surjective_{}_{}", row.k, row.k - 1), row.surjective, || {
                format!("image dimension {} below {}", row.image_dim, row.lower_dim)
            })
        })
        .collect();
    let data = json!({ "dims": rep.dims(), "bijective_from_two": rep.bijective_from_two(), "rows": rep.rows });
    Ok(Report::new("prolong", Some(sc), None, checks, data))
}

fn klein_report(sc: Scenario, depth: Option<usize>) -> CliResult<Report> {
    let Task::Klein(KleinTask { algebra, fields, base, depth_max }) = &sc.task else { return Err(mismatch("klein")) };
    let g = algebra.build()?;
    let fields = fields_from_terms(sc.n, fields)?;
    let a = RealizedLieAlgebra::new(g, fields, scalars(base))?;
    let depth = depth.or(*depth_max).unwrap_or(DEFAULT_DEPTH);
    let mut checks = vec![];
    let witness = validate_realization(&a)?;
    checks.push(CheckVerdict::new("realization_is_homomorphism", witness.is_none(), || {
        let w = witness.clone().expect("present on failure");
        format!("fields {} and {} break the bracket", w.i, w.j)
    }));
    for m in 1..=3 {
        let ok = sigma_homomorphism_check(&a, m)?;
        checks.push(CheckVerdict::new(format!("sigma_homomorphism_{m}"), ok, || format!("order {m}")));
    }
    let filt = isotropy_filtration(&a, depth)?;
    let system_order = klein_order_of_system(&sigma_tower(&a, filt.order + 1)?)?;
    let data = json!({ "filtration": filt, "order": filt.order, "ghost_dim": filt.ghost_dim, "system_order": system_order });
    Ok(Report::new("klein", Some(sc), None, checks, data))
}

fn verdict(split: bool) -> &'static str {
    if split {
        "splits"
    } else {
        "does not split"
    }
}

fn extension_report(sc: Scenario) -> CliResult<Report> {
    let Task::Extension(ExtensionTask { big, quotient, projection, section, expect_split }) = &sc.task else { return Err(mismatch("extension")) };
    let ext = ExtensionData::new(big.build()?, quotient.build()?, matrix(projection), matrix(section))?;
    let kernel = ext.big.subalgebra(&ext.ideal)?;
    let lcs = nilpotency_analysis(&kernel);
    let abelian = ext.ideal_is_abelian();
    let mut checks = vec![CheckVerdict::new("kernel_abelian", abelian, || {
        "kernel is not abelian, so the cohomology class is undefined".into()
    })];
    let mut data = json!({ "kernel_dim": ext.ideal.len(), "kernel_abelian": abelian, "kernel_series": lcs });
    if abelian {
        let closed = cocycle_is_closed(&ext)?;
        checks.push(CheckVerdict::new("cocycle_closed", closed, || "extension cocycle has nonzero differential".into()));
        let cocycle: Vec<Value> = extension_two_cocycle(&ext)?
            .into_iter()
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|((i, j), v)| json!({ "i": i, "j": j, "value": v.iter().map(format).collect::<Vec<_>>() }))
            .collect();
        data["cocycle"] = Value::Array(cocycle);
        let split = is_split(&ext)?;
        data["split"] = Value::Bool(split);
        if let Some(want) = expect_split {
            checks.push(CheckVerdict::new("split_as_expected", split == *want, || {
                format!("extension {} but expected {}", verdict(split), verdict(*want))
            }));
        }
    }
    Ok(Report::new("extension", Some(sc), None, checks, data))
}
