//! Check suites and the machine-readable verification report.
//!
//! Every wall-clock measurement lives in the report's `timing` map, so two runs
//! with identical options serialize identically apart from that field.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactlin::{fmt_q, q, Q};
use crate::gradealg::{
    b_presentation, build_graded_with_budget, free_monomial_counts, hilbert_matrix_predicted,
    preprojective_presentation, GradeAlgError, GradedQuotient, DEFAULT_BUDGET,
};
use crate::lietheory::{
    build_nilpotent, count_paths, l_kernel, l_operator, lusztig_rescale, path_trace, sample_generic_lambda,
    sample_regular_weight, solution_space, t_kernel, t_matrices, w_lambda_conditions, w_lambda_operator_conditions,
};
use crate::rootsys::{build_cartan, build_root_system, is_regular, CartanDatum, Family, RootSystem, Weight};
use crate::traceform::{
    b_commutator_dimensions, complex_homology, e_membership_bruteforce, graded_trace_data, pairing_check,
    trace_functional, AlgebraSpaces,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the default budget.
pub const BUDGET_ENV: &str = "CEPPA_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

/// How a weight was chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightChoice {
    /// `rho`, `random` or `list`.
    pub kind: String,
    pub values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub draws: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool_version: String,
    pub family: Family,
    pub rank: usize,
    pub mu: WeightChoice,
    pub lambdas: Vec<WeightChoice>,
    pub suites: Vec<String>,
    pub budget: usize,
    pub checks: Vec<CheckRecord>,
    /// `pass` or `fail`; skipped checks do not fail a run.
    pub verdict: String,
    pub skipped: usize,
    /// Seconds per check, keyed by check name.
    pub timing: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// One line per check: `status<TAB>name<TAB>detail`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let detail = match (&c.reason, &c.expected, &c.actual) {
                (Some(r), _, _) => r.clone(),
                (None, Some(e), Some(a)) if c.status == Status::Fail => format!("expected {e}, got {a}"),
                (None, _, Some(a)) => a.clone(),
                _ => String::new(),
            };
            out += &format!("{status}\t{}\t{detail}\n", c.name);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Lie,
    BAlgebra,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Lie => "lie",
            Suite::BAlgebra => "b-algebra",
        }
    }

    /// Parses `algebra`, `lie`, `b-algebra` or `all`.
    pub fn parse_list(s: &str) -> Option<Vec<Suite>> {
        match s {
            "algebra" => Some(vec![Suite::Algebra]),
            "lie" => Some(vec![Suite::Lie]),
            "b-algebra" => Some(vec![Suite::BAlgebra]),
            "all" => Some(vec![Suite::Algebra, Suite::Lie, Suite::BAlgebra]),
            _ => None,
        }
    }
}

/// `rho`, a seeded random regular weight, or explicit coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MuSpec {
    Rho,
    Random,
    List(Weight),
}

impl MuSpec {
    pub fn parse(s: &str) -> Option<MuSpec> {
        match s {
            "rho" => Some(MuSpec::Rho),
            "random" => Some(MuSpec::Random),
            other => Weight::parse(other).ok().map(MuSpec::List),
        }
    }

    pub fn resolve(&self, rs: &RootSystem, seed: u64) -> (Weight, WeightChoice) {
        match self {
            MuSpec::Rho => {
                let w = Weight::rho(rs.rank());
                (w.clone(), choice("rho", &w, None, None))
            }
            MuSpec::Random => {
                let (w, draws) = sample_regular_weight(rs, seed);
                (w.clone(), choice("random", &w, Some(seed), Some(draws)))
            }
            MuSpec::List(w) => (w.clone(), choice("list", w, None, None)),
        }
    }
}

fn choice(kind: &str, w: &Weight, seed: Option<u64>, draws: Option<usize>) -> WeightChoice {
    WeightChoice {
        kind: kind.into(),
        values: w.to_strings(),
        seed,
        draws,
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub family: Family,
    pub rank: usize,
    pub mu: MuSpec,
    pub suites: Vec<Suite>,
    pub budget: usize,
    pub seed: u64,
    /// Use the two-generator presentation of the nodal corner algebra.
    /// `None` picks it when the three-generator presentation exceeds the budget.
    pub eliminate: Option<bool>,
    /// Number of seeded lambdas for the W(lambda) comparison.
    pub lambdas: usize,
    /// Random Jacobi triples for the Lie structure check.
    pub jacobi_samples: usize,
    /// Largest number of positive roots for the exact W(lambda) comparison.
    pub w_lambda_max_roots: usize,
}

impl VerifyOptions {
    pub fn new(family: Family, rank: usize) -> Self {
        Self {
            family,
            rank,
            mu: MuSpec::Rho,
            suites: vec![Suite::Algebra, Suite::Lie, Suite::BAlgebra],
            budget: DEFAULT_BUDGET,
            seed: 0,
            eliminate: None,
            lambdas: 5,
            jacobi_samples: 100_000,
            w_lambda_max_roots: 30,
        }
    }
}

/// Budget from `CEPPA_BUDGET`, falling back to the default.
pub fn budget_from_env() -> Result<usize, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(b) if b > 0 => Ok(b),
            _ => Err(format!("{BUDGET_ENV} must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

enum Outcome {
    Pass(String),
    Fail { expected: String, actual: String },
    Skip(String),
}

fn compare<T: PartialEq + std::fmt::Debug>(expected: T, actual: T) -> Outcome {
    if expected == actual {
        Outcome::Pass(format!("{actual:?}"))
    } else {
        Outcome::Fail {
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        }
    }
}

fn verdict(ok: bool, detail: impl Into<String>) -> Outcome {
    let detail = detail.into();
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail {
            expected: "holds".into(),
            actual: detail,
        }
    }
}

struct Runner {
    checks: Vec<CheckRecord>,
    timing: BTreeMap<String, f64>,
}

impl Runner {
    fn record(&mut self, name: &str, started: Instant, outcome: Outcome) {
        self.timing.insert(name.to_string(), started.elapsed().as_secs_f64());
        let rec = match outcome {
            Outcome::Pass(actual) => CheckRecord {
                name: name.into(),
                status: Status::Pass,
                expected: None,
                actual: Some(actual),
                reason: None,
            },
            Outcome::Fail { expected, actual } => CheckRecord {
                name: name.into(),
                status: Status::Fail,
                expected: Some(expected),
                actual: Some(actual),
                reason: None,
            },
            Outcome::Skip(reason) => CheckRecord {
                name: name.into(),
                status: Status::Skipped,
                expected: None,
                actual: None,
                reason: Some(reason),
            },
        };
        self.checks.push(rec);
    }

    fn run<F: FnOnce() -> Outcome>(&mut self, name: &str, f: F) {
        let t = Instant::now();
        let outcome = f();
        self.record(name, t, outcome);
    }

    fn skip_all(&mut self, names: &[&str], reason: &str) {
        for n in names {
            self.record(n, Instant::now(), Outcome::Skip(reason.to_string()));
        }
    }
}

fn err_outcome<E: std::fmt::Display>(e: E) -> Outcome {
    Outcome::Fail {
        expected: "no error".into(),
        actual: e.to_string(),
    }
}

/// Top degree `2(h-2)` and the build range used everywhere.
fn build_range(rs: &RootSystem) -> (usize, usize) {
    let top = 2 * (rs.coxeter - 2);
    (top, top + 2)
}

/// Budget refusal message naming the offending degree.
fn budget_reason(e: &GradeAlgError) -> String {
    match e {
        GradeAlgError::BudgetExceeded { degree, count, budget } => {
            format!("BudgetExceeded: degree {degree} has {count} free monomials, budget {budget}")
        }
        other => other.to_string(),
    }
}

pub const ALGEBRA_CHECKS: &[&str] = &[
    "algebra.build",
    "algebra.hilbert_series",
    "algebra.commutator_quotient",
    "algebra.center_dimension",
    "algebra.jordan_blocks",
    "algebra.palindrome",
    "algebra.trace_unique",
    "algebra.pairing",
    "algebra.trace_path_sums",
    "algebra.trace_sum_zero",
    "algebra.oracle_triangle",
    "algebra.complex",
    "algebra.a0_commutator",
];

pub const LIE_CHECKS: &[&str] = &[
    "lie.structure",
    "lie.lusztig",
    "lie.height_blocks",
    "lie.surjectivity",
    "lie.paths",
    "lie.trace_sum_zero",
    "lie.w_lambda",
];

pub const B_CHECKS: &[&str] = &["b.build", "b.hilbert_series", "b.commutator_quotient"];

fn algebra_suite(run: &mut Runner, datum: &CartanDatum, rs: &RootSystem, mu: &Weight, opts: &VerifyOptions) {
    let (top, max) = build_range(rs);
    let r = rs.rank();
    let pres = match preprojective_presentation(datum, mu, true) {
        Ok(p) => p,
        Err(e) => {
            run.run("algebra.build", || err_outcome(&e));
            run.skip_all(&ALGEBRA_CHECKS[1..], "algebra build failed");
            return;
        }
    };
    let mut built: Option<GradedQuotient> = None;
    run.run("algebra.build", || match build_graded_with_budget(&pres, max, opts.budget) {
        Ok(gq) => {
            let detail = format!("total dimension {} through degree {max}", gq.total_dim());
            built = Some(gq);
            Outcome::Pass(detail)
        }
        Err(e @ GradeAlgError::BudgetExceeded { .. }) => Outcome::Skip(budget_reason(&e)),
        Err(e) => err_outcome(e),
    });
    let Some(gq) = built else {
        let reason = run.checks.last().and_then(|c| c.reason.clone()).unwrap_or_else(|| "algebra build failed".into());
        run.skip_all(&ALGEBRA_CHECKS[1..], &reason);
        return;
    };

    run.run("algebra.hilbert_series", || {
        let pred = hilbert_matrix_predicted(datum);
        let table = gq.dimension_table();
        let mismatch = (0..=max).find(|&d| {
            (0..r).any(|i| (0..r).any(|j| *pred.coeff(d, i, j) != q(table[d][i][j] as i64)))
        });
        match mismatch {
            None => Outcome::Pass(format!("all {} entries agree through degree {max}", r * r * (max + 1))),
            Some(d) => Outcome::Fail {
                expected: format!("predicted table in degree {d}"),
                actual: format!("{:?}", table[d]),
            },
        }
    });

    let spaces = match AlgebraSpaces::compute(&gq) {
        Ok(s) => s,
        Err(e) => {
            run.run("algebra.commutator_quotient", || err_outcome(&e));
            run.skip_all(&ALGEBRA_CHECKS[3..], "commutator or center computation failed");
            return;
        }
    };
    let data = graded_trace_data(&gq, &spaces);
    let counts = rs.height_counts();
    run.run("algebra.commutator_quotient", || match &data {
        Ok(g) => {
            let expected: Vec<usize> = (0..=top).map(|d| if d % 2 == 0 { counts[d / 2] } else { 0 }).collect();
            compare(expected, g.p.clone())
        }
        Err(e) => err_outcome(e),
    });
    run.run("algebra.center_dimension", || match &data {
        Ok(g) => compare((rs.num_positive(), rs.num_positive()), (g.total_center(), g.total_quotient())),
        Err(e) => err_outcome(e),
    });
    run.run("algebra.jordan_blocks", || match &data {
        Ok(g) => compare(
            (rs.exponents.clone(), rs.exponents.clone()),
            (g.quotient_blocks.clone(), g.center_blocks.clone()),
        ),
        Err(e) => err_outcome(e),
    });
    run.run("algebra.palindrome", || match &data {
        Ok(g) => verdict(
            g.is_palindromic_pair() && g.has_even_support(),
            format!("p = {:?}, p* = {:?}", g.p, g.p_star),
        ),
        Err(e) => err_outcome(e),
    });

    let peg: Vec<Q> = match (0..r).map(|i| path_trace(rs, mu, i)).collect::<Result<Vec<Q>, _>>() {
        Ok(v) => v.into_iter().zip(&datum.epsilon).map(|(x, &e)| x * q(e)).collect(),
        Err(e) => {
            run.run("algebra.trace_unique", || err_outcome(&e));
            run.skip_all(&ALGEBRA_CHECKS[7..], "path sums unavailable");
            return;
        }
    };
    let tv = trace_functional(&gq, &spaces, Some(&peg));
    run.run("algebra.trace_unique", || match &tv {
        Ok(t) => Outcome::Pass(format!("annihilator dimension 1, {}", t.normalization)),
        Err(e) => err_outcome(e),
    });
    let Ok(tv) = tv else {
        run.skip_all(&ALGEBRA_CHECKS[7..], "trace functional unavailable");
        return;
    };
    run.run("algebra.pairing", || match pairing_check(&gq, &spaces, &tv, opts.seed, 200) {
        Ok(p) => Outcome::Pass(format!(
            "{} Gram blocks invertible, {} central/commutator samples",
            p.grams.len(),
            p.sampled_triples
        )),
        Err(e) => err_outcome(e),
    });
    run.run("algebra.trace_path_sums", || {
        compare(
            peg.iter().map(fmt_q).collect::<Vec<_>>(),
            tv.values.iter().map(fmt_q).collect::<Vec<_>>(),
        )
    });
    run.run("algebra.trace_sum_zero", || {
        let s: Q = tv.values.iter().zip(&mu.coords).map(|(t, m)| t * m).sum();
        compare("0".to_string(), fmt_q(&s))
    });
    run.run("algebra.oracle_triangle", || oracle_triangle(&gq, &spaces, rs, mu));
    run.run("algebra.complex", || match (complex_homology(&gq), &data) {
        (Ok(c), Ok(g)) => {
            let mut bad = Vec::new();
            for x in &c {
                let d = x.degree;
                let pstar_prev = if d >= 2 && d - 2 <= top { g.p_star[d - 2] } else { 0 };
                let p_d = g.p.get(d).copied().unwrap_or(0);
                let euler = if d % 2 == 0 && d < 2 * rs.coxeter { r as i64 } else { 0 };
                if x.homology[1] != 0 || x.homology[0] != pstar_prev || x.homology[2] != p_d || x.euler() != euler {
                    bad.push(d);
                }
            }
            let ident = g.satisfies_complex_identity(r, rs.coxeter);
            verdict(
                bad.is_empty() && ident,
                if bad.is_empty() && ident {
                    format!("chain complex, H_1 = 0 in degrees 0..={}", top + 2)
                } else {
                    format!("mismatch in degrees {bad:?}, identity {ident}")
                },
            )
        }
        (Err(e), _) => err_outcome(e),
        (_, Err(e)) => err_outcome(e),
    });
    run.run("algebra.a0_commutator", || {
        let h = rs.coxeter;
        let p0 = match preprojective_presentation(datum, mu, false) {
            Ok(p) => p,
            Err(e) => return err_outcome(e),
        };
        match build_graded_with_budget(&p0, h, opts.budget) {
            Ok(g0) => {
                let dims: Result<Vec<usize>, _> = (0..h)
                    .map(|d| g0.commutator_subspace(d).map(|c| g0.dim(d) - c.dim()))
                    .collect();
                match dims {
                    Ok(dims) => {
                        let mut expected = vec![0; h];
                        expected[0] = r;
                        compare(expected, dims)
                    }
                    Err(e) => err_outcome(e),
                }
            }
            Err(e @ GradeAlgError::BudgetExceeded { .. }) => Outcome::Skip(budget_reason(&e)),
            Err(e) => err_outcome(e),
        }
    });
}

fn oracle_triangle(gq: &GradedQuotient, spaces: &AlgebraSpaces, rs: &RootSystem, mu: &Weight) -> Outcome {
    let na = build_nilpotent(rs);
    let (hs, l) = match (t_matrices(rs, mu), l_operator(&na, None, mu, None)) {
        (Ok(h), Ok(l)) => (h, l),
        (Err(e), _) | (_, Err(e)) => return err_outcome(e),
    };
    let mut dims = Vec::new();
    for s in 0..=rs.coxeter - 2 {
        let brute = match e_membership_bruteforce(gq, spaces, &rs.datum.epsilon, s) {
            Ok(b) => b,
            Err(e) => return err_outcome(e),
        };
        let tk = t_kernel(&hs, s);
        let lk = l_kernel(rs, &l, s);
        if brute != tk || tk != lk {
            return Outcome::Fail {
                expected: "three equal kernels".into(),
                actual: format!("s = {s}: dims {} / {} / {}", brute.dim(), tk.dim(), lk.dim()),
            };
        }
        dims.push(tk.dim());
    }
    Outcome::Pass(format!("kernel dimensions {dims:?}"))
}

fn lie_suite(run: &mut Runner, rs: &RootSystem, mu: &Weight, opts: &VerifyOptions, lambdas: &mut Vec<WeightChoice>) {
    let na = build_nilpotent(rs);
    let r = rs.rank();
    let h = rs.coxeter;
    run.run("lie.structure", || match na.verify(opts.jacobi_samples, opts.seed) {
        Ok(rep) => Outcome::Pass(format!(
            "antisymmetry, {} root-sum Jacobi triples, {} random triples, {} Serre pairs, generated dimension {}",
            rep.jacobi_nonzero_triples, rep.jacobi_random_triples, rep.serre_pairs, rep.generated
        )),
        Err(e) => err_outcome(e),
    });
    let scaling = lusztig_rescale(&na, &rs.datum.epsilon);
    run.run("lie.lusztig", || match &scaling {
        Ok(s) => Outcome::Pass(format!("consistent; {} extra decompositions checked", s.checked_decompositions)),
        Err(e) => err_outcome(e),
    });
    let hs = t_matrices(rs, mu);
    run.run("lie.height_blocks", || {
        let (Ok(sc), Ok(hs)) = (&scaling, &hs) else {
            return Outcome::Skip("needs the rescaling and T operators".into());
        };
        let l = match l_operator(&na, Some(sc), mu, None) {
            Ok(l) => l,
            Err(e) => return err_outcome(e),
        };
        for (k, t) in hs.t.iter().enumerate() {
            for (row, &g) in hs.heights[k + 1].iter().enumerate() {
                for (col, &b) in hs.heights[k].iter().enumerate() {
                    if l.get(g, b) != -t.get(row, col) {
                        return Outcome::Fail {
                            expected: "L block = -T".into(),
                            actual: format!("mismatch at T_{} entry ({row}, {col})", k + 1),
                        };
                    }
                }
            }
        }
        Outcome::Pass(format!("{} blocks agree", hs.t.len()))
    });
    run.run("lie.surjectivity", || match &hs {
        Ok(hs) => compare(rs.height_counts(), (0..h - 1).map(|s| hs.chain(s).rank()).collect()),
        Err(e) => err_outcome(e),
    });
    run.run("lie.paths", || {
        let Ok(hs) = &hs else {
            return Outcome::Skip("T operators unavailable".into());
        };
        let top = hs.chain(h - 2);
        let mut fact = Q::from_integer(1.into());
        for k in 1..=(h - 2) as i64 {
            fact *= q(k);
        }
        let mut counts = Vec::new();
        for i in 0..r {
            let pt = match path_trace(rs, mu, i) {
                Ok(p) => p,
                Err(e) => return err_outcome(e),
            };
            let n = count_paths(rs, i);
            counts.push(n);
            if n == 0 || pt != top.get(0, i) {
                return Outcome::Fail {
                    expected: "path sum equals T-chain value".into(),
                    actual: format!("vertex {}: {} vs {}", i + 1, fmt_q(&pt), fmt_q(&top.get(0, i))),
                };
            }
            if mu.is_rho() && pt * &fact != Q::from_integer((n as i64).into()) {
                return Outcome::Fail {
                    expected: "n_i / (h-2)!".into(),
                    actual: format!("vertex {}", i + 1),
                };
            }
        }
        Outcome::Pass(format!("path counts {counts:?}"))
    });
    run.run("lie.trace_sum_zero", || {
        let mut s = Q::zero();
        for i in 0..r {
            match path_trace(rs, mu, i) {
                Ok(p) => s += p * q(rs.datum.epsilon[i]) * &mu.coords[i],
                Err(e) => return err_outcome(e),
            }
        }
        compare("0".to_string(), fmt_q(&s))
    });
    run.run("lie.w_lambda", || {
        if rs.num_positive() > opts.w_lambda_max_roots {
            return Outcome::Skip(format!(
                "size: exact W(lambda) elimination limited to N <= {} positive roots (N = {})",
                opts.w_lambda_max_roots,
                rs.num_positive()
            ));
        }
        let mut dims = Vec::new();
        for k in 0..opts.lambdas {
            let seed = opts.seed.wrapping_add(1 + k as u64);
            let (lambda, draws) = sample_generic_lambda(rs, mu, seed);
            lambdas.push(choice("random", &lambda, Some(seed), Some(draws)));
            let (m1, m2) = match (w_lambda_conditions(rs, mu, &lambda), w_lambda_operator_conditions(&na, mu, &lambda)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return err_outcome(e),
            };
            let (s1, s2) = (solution_space(&m1), solution_space(&m2));
            let expected = (h - 1) * r - rs.num_positive();
            if s1 != s2 || s1.dim() != expected {
                return Outcome::Fail {
                    expected: format!("equal solution spaces of dimension {expected}"),
                    actual: format!("dimensions {} and {}, equal: {}", s1.dim(), s2.dim(), s1 == s2),
                };
            }
            dims.push(s1.dim());
        }
        Outcome::Pass(format!("solution dimensions {dims:?}"))
    });
}

fn b_suite(run: &mut Runner, datum: &CartanDatum, rs: &RootSystem, opts: &VerifyOptions) {
    let Some(legs) = rs.legs else {
        run.skip_all(B_CHECKS, &format!("{} has no nodal vertex", datum.name()));
        return;
    };
    let (top, max) = build_range(rs);
    let eliminate = opts
        .eliminate
        .unwrap_or_else(|| budget_estimate(&b_presentation(legs, false), max).1 > opts.budget as u128);
    let pres = b_presentation(legs, eliminate);
    let mut built = None;
    run.run("b.build", || match build_graded_with_budget(&pres, max, opts.budget) {
        Ok(gq) => {
            let detail = format!("total dimension {} (eliminate = {eliminate})", gq.total_dim());
            built = Some(gq);
            Outcome::Pass(detail)
        }
        Err(e @ GradeAlgError::BudgetExceeded { .. }) => Outcome::Skip(budget_reason(&e)),
        Err(e) => err_outcome(e),
    });
    let Some(gq) = built else {
        let reason = run.checks.last().and_then(|c| c.reason.clone()).unwrap_or_else(|| "B build failed".into());
        run.skip_all(&B_CHECKS[1..], &reason);
        return;
    };
    let c = rs.nodal_vertex.expect("legs imply a nodal vertex");
    run.run("b.hilbert_series", || {
        let pred = hilbert_matrix_predicted(datum);
        let expected: Vec<String> = (0..=max).map(|d| fmt_q(pred.coeff(d, c, c))).collect();
        let actual: Vec<String> = (0..=max).map(|d| gq.dim(d).to_string()).collect();
        compare(expected, actual)
    });
    run.run("b.commutator_quotient", || match (b_commutator_dimensions(&gq), rs.nodal_counts()) {
        (Ok(dims), Ok(np)) => compare(np[..=top / 2].to_vec(), dims),
        (Err(e), _) => err_outcome(e),
        (_, Err(e)) => err_outcome(e),
    });
}

/// Runs the requested suites.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport, String> {
    let datum = build_cartan(opts.family, opts.rank).map_err(|e| e.to_string())?;
    let rs = build_root_system(&datum);
    let (mu, mu_choice) = opts.mu.resolve(&rs, opts.seed);
    rs.check_rank(&mu).map_err(|e| e.to_string())?;
    if !is_regular(&mu, &rs).map_err(|e| e.to_string())? {
        return Err(format!("mu = {mu} is not regular"));
    }
    let mut run = Runner {
        checks: Vec::new(),
        timing: BTreeMap::new(),
    };
    let mut lambdas = Vec::new();
    for suite in &opts.suites {
        match suite {
            Suite::Algebra => algebra_suite(&mut run, &datum, &rs, &mu, opts),
            Suite::Lie => lie_suite(&mut run, &rs, &mu, opts, &mut lambdas),
            Suite::BAlgebra => {
                if mu.is_rho() {
                    b_suite(&mut run, &datum, &rs, opts)
                } else {
                    run.skip_all(B_CHECKS, "the corner presentation is stated for mu = rho");
                }
            }
        }
    }
    let failures = run.checks.iter().filter(|c| c.status == Status::Fail).count();
    let skipped = run.checks.iter().filter(|c| c.status == Status::Skipped).count();
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        family: opts.family,
        rank: opts.rank,
        mu: mu_choice,
        lambdas,
        suites: opts.suites.iter().map(|s| s.name().to_string()).collect(),
        budget: opts.budget,
        checks: run.checks,
        verdict: if failures == 0 { "pass" } else { "fail" }.into(),
        skipped,
        timing: run.timing,
    })
}

/// Largest free-monomial count of a presentation over its build range; this
/// is what the budget is compared against.
pub fn budget_estimate(p: &crate::gradealg::Presentation, max_degree: usize) -> (usize, u128) {
    free_monomial_counts(p, max_degree)
        .into_iter()
        .enumerate()
        .max_by_key(|&(_, c)| c)
        .unwrap_or((0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_all_suites_pass() {
        let mut o = VerifyOptions::new(Family::A, 2);
        o.jacobi_samples = 100;
        let rep = run_verification(&o).unwrap();
        assert!(rep.passed(), "{}", rep.to_tsv());
        assert!(rep.check("b.build").unwrap().status == Status::Skipped);
        let back = VerificationReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn d4_random_mu() {
        let mut o = VerifyOptions::new(Family::D, 4);
        o.mu = MuSpec::Random;
        o.seed = 3;
        o.jacobi_samples = 100;
        o.suites = vec![Suite::Algebra, Suite::Lie];
        let rep = run_verification(&o).unwrap();
        assert!(rep.passed(), "{}", rep.to_tsv());
        assert_eq!(rep.mu.kind, "random");
    }

    #[test]
    fn budget_skips_are_reported() {
        let mut o = VerifyOptions::new(Family::D, 4);
        o.suites = vec![Suite::Algebra];
        o.budget = 50;
        let rep = run_verification(&o).unwrap();
        assert!(rep.passed());
        assert!(rep.checks.iter().all(|c| c.status == Status::Skipped && c.reason.is_some()));
        assert!(rep.check("algebra.build").unwrap().reason.as_ref().unwrap().contains("BudgetExceeded"));
    }

    #[test]
    fn deterministic_modulo_timing() {
        let mut o = VerifyOptions::new(Family::A, 3);
        o.mu = MuSpec::Random;
        o.jacobi_samples = 10;
        let mut a = run_verification(&o).unwrap();
        let mut b = run_verification(&o).unwrap();
        a.timing.clear();
        b.timing.clear();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn corner_presentation_chosen_by_budget() {
        let mut o = VerifyOptions::new(Family::D, 6);
        o.suites = vec![Suite::BAlgebra];
        let rep = run_verification(&o).unwrap();
        assert!(rep.passed());
        assert!(rep.check("b.build").unwrap().actual.as_ref().unwrap().contains("eliminate = false"));
        o.budget = 5_000;
        let rep = run_verification(&o).unwrap();
        assert!(rep.passed(), "{}", rep.to_tsv());
        assert!(rep.check("b.build").unwrap().actual.as_ref().unwrap().contains("eliminate = true"));
    }

    #[test]
    fn irregular_weight_rejected() {
        let mut o = VerifyOptions::new(Family::A, 2);
        o.mu = MuSpec::parse("1,-1").unwrap();
        assert!(run_verification(&o).is_err());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(MuSpec::parse("rho"), Some(MuSpec::Rho));
        assert!(matches!(MuSpec::parse("3/2,1"), Some(MuSpec::List(_))));
        assert_eq!(MuSpec::parse("x"), None);
        assert_eq!(Suite::parse_list("all").unwrap().len(), 3);
        assert!(Suite::parse_list("none").is_none());
    }
}
