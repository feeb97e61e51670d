use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ceppa::exactlin::{fmt_q, parse_q, q, SparseVec, Q};
use ceppa::gradealg::{
    b_presentation, build_graded_with_budget, preprojective_presentation, GradeAlgError, Presentation,
};
use ceppa::lietheory::{build_nilpotent, count_paths, l_kernel, l_operator, membership, path_trace};
use ceppa::rootsys::{build_cartan, build_root_system, is_regular, CartanDatum, Family, RootSystem, Weight};
use ceppa::traceform::{e_membership_bruteforce, trace_functional, AlgebraSpaces};
use ceppa::verify::{budget_estimate, budget_from_env, run_verification, MuSpec, Suite, VerifyOptions};

/// Exact computations with centrally extended preprojective algebras of ADE quivers.
#[derive(Parser)]
#[command(name = "ceppa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the positive roots and root statistics.
    Roots {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Run check suites and report pass/fail per check.
    Verify {
        #[command(flatten)]
        ty: TypeArgs,
        #[command(flatten)]
        weight: WeightArgs,
        /// algebra, lie, b-algebra or all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Write the JSON report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Force the two-generator corner presentation on or off.
        #[arg(long)]
        eliminate: Option<bool>,
    },
    /// Trace values Tr(z^{h-2} e_i) from path sums and, when it fits the budget, from the algebra.
    Trace {
        #[command(flatten)]
        ty: TypeArgs,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Decide whether z^s sum_i eps_i phi_i e_i lies in [A, A] with every available method.
    Membership {
        #[command(flatten)]
        ty: TypeArgs,
        #[command(flatten)]
        weight: WeightArgs,
        /// Comma-separated rationals, one per vertex.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long)]
        s: usize,
    },
    /// Build a graded quotient and print its dimensions.
    Build {
        #[arg(long = "type", value_name = "A|D|E")]
        family: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        weight: WeightArgs,
        /// Read the presentation from a file instead.
        #[arg(long)]
        presentation_file: Option<PathBuf>,
        /// Drop the central generator (ordinary preprojective algebra).
        #[arg(long)]
        no_z: bool,
        /// Build the nodal corner algebra instead.
        #[arg(long)]
        b_algebra: bool,
        #[arg(long)]
        eliminate: bool,
        /// Highest degree to build; defaults to 2(h-2)+2.
        #[arg(long)]
        max_degree: Option<usize>,
        /// Print the canonical monomial basis of every degree.
        #[arg(long)]
        show_basis: bool,
        /// Print the presentation in the text format and exit.
        #[arg(long)]
        emit_presentation: bool,
    },
}

#[derive(Args)]
struct TypeArgs {
    #[arg(long = "type", value_name = "A|D|E")]
    family: String,
    #[arg(long)]
    rank: usize,
}

#[derive(Args)]
struct WeightArgs {
    /// rho, random, or comma-separated rationals such as 3/2,1,5
    #[arg(long, default_value = "rho")]
    mu: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Free-monomial budget per degree (overrides CEPPA_BUDGET).
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

/// Usage errors exit with 2, failed checks with 1.
enum Failure {
    Usage(String),
    Check(String),
}

type Outcome = Result<(), Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn datum(family: &str, rank: usize) -> Result<(CartanDatum, RootSystem), Failure> {
    let f: Family = family.parse().map_err(usage)?;
    let d = build_cartan(f, rank).map_err(usage)?;
    let rs = build_root_system(&d);
    Ok((d, rs))
}

fn budget(arg: Option<usize>) -> Result<usize, Failure> {
    match arg {
        Some(b) => Ok(b),
        None => budget_from_env().map_err(Failure::Usage),
    }
}

fn resolve_mu(w: &WeightArgs, rs: &RootSystem) -> Result<Weight, Failure> {
    let spec = MuSpec::parse(&w.mu).ok_or_else(|| usage(format!("cannot parse --mu {:?}", w.mu)))?;
    let (mu, _) = spec.resolve(rs, w.seed);
    if !is_regular(&mu, rs).map_err(usage)? {
        return Err(usage(format!("mu = {mu} is not regular")));
    }
    Ok(mu)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct RootsJson {
    r#type: String,
    rank: usize,
    coxeter: usize,
    positive_roots: usize,
    exponents: Vec<usize>,
    height_counts: Vec<usize>,
    nodal_counts: Option<Vec<usize>>,
    nodal_vertex: Option<usize>,
    epsilon: Vec<i64>,
    roots: Vec<Vec<u32>>,
}

fn cmd_roots(ty: &TypeArgs, format: Format) -> Outcome {
    let (d, rs) = datum(&ty.family, ty.rank)?;
    let nodal = rs.nodal_counts().ok();
    let info = RootsJson {
        r#type: d.name(),
        rank: d.rank,
        coxeter: rs.coxeter,
        positive_roots: rs.num_positive(),
        exponents: rs.exponents.clone(),
        height_counts: rs.height_counts(),
        nodal_counts: nodal,
        nodal_vertex: rs.nodal_vertex.map(|v| v + 1),
        epsilon: d.epsilon.clone(),
        roots: rs.roots.iter().map(|r| r.coords.clone()).collect(),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&info).expect("serializable")),
        Format::Tsv => {
            println!("type\t{}", info.r#type);
            println!("rank\t{}", info.rank);
            println!("coxeter\t{}", info.coxeter);
            println!("positive_roots\t{}", info.positive_roots);
            println!("exponents\t{}", join(&info.exponents));
            println!("N_p\t{}", join(&info.height_counts));
            if let Some(np) = &info.nodal_counts {
                println!("N'_p\t{}", join(np));
            }
            if let Some(v) = info.nodal_vertex {
                println!("nodal_vertex\t{v}");
            }
            println!("epsilon\t{}", join(&info.epsilon));
            println!("height\troot");
            for r in &rs.roots {
                println!("{}\t{}", r.height, join(&r.coords));
            }
        }
    }
    Ok(())
}

fn cmd_verify(ty: &TypeArgs, w: &WeightArgs, suite: &str, json: Option<&PathBuf>, eliminate: Option<bool>) -> Outcome {
    let family: Family = ty.family.parse().map_err(usage)?;
    build_cartan(family, ty.rank).map_err(usage)?;
    let mut opts = VerifyOptions::new(family, ty.rank);
    opts.mu = MuSpec::parse(&w.mu).ok_or_else(|| usage(format!("cannot parse --mu {:?}", w.mu)))?;
    opts.suites = Suite::parse_list(suite).ok_or_else(|| usage(format!("unknown suite {suite:?}")))?;
    opts.budget = budget(w.budget)?;
    opts.seed = w.seed;
    opts.eliminate = eliminate;
    let report = run_verification(&opts).map_err(Failure::Usage)?;
    print!("{}", report.to_tsv());
    println!(
        "verdict\t{}\t{} checks, {} failed, {} skipped",
        report.verdict,
        report.checks.len(),
        report.failures(),
        report.skipped
    );
    if let Some(path) = json {
        std::fs::write(path, report.to_json() + "\n").map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} checks failed", report.failures())))
    }
}

/// Builds `A^mu` through `2(h-2)+2` when the budget allows, reporting the
/// estimate first.
fn try_build_algebra(
    d: &CartanDatum,
    rs: &RootSystem,
    mu: &Weight,
    budget: usize,
) -> Result<Option<(ceppa::gradealg::GradedQuotient, AlgebraSpaces)>, Failure> {
    let pres = preprojective_presentation(d, mu, true).map_err(usage)?;
    let max = 2 * (rs.coxeter - 2) + 2;
    let (deg, est) = budget_estimate(&pres, max);
    eprintln!("budget estimate: {est} free monomials in degree {deg} (budget {budget})");
    match build_graded_with_budget(&pres, max, budget) {
        Ok(gq) => {
            let spaces = AlgebraSpaces::compute(&gq).map_err(|e| Failure::Check(e.to_string()))?;
            Ok(Some((gq, spaces)))
        }
        Err(e @ GradeAlgError::BudgetExceeded { .. }) => {
            eprintln!("algebra side skipped: {e}");
            Ok(None)
        }
        Err(e) => Err(Failure::Check(e.to_string())),
    }
}

fn cmd_trace(ty: &TypeArgs, w: &WeightArgs) -> Outcome {
    let (d, rs) = datum(&ty.family, ty.rank)?;
    let mu = resolve_mu(w, &rs)?;
    let r = rs.rank();
    let path: Vec<Q> = (0..r)
        .map(|i| path_trace(&rs, &mu, i).map(|p| p * q(d.epsilon[i])))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    println!("mu\t{}", join(&mu.to_strings()));
    let algebra = match try_build_algebra(&d, &rs, &mu, budget(w.budget)?)? {
        Some((gq, spaces)) => {
            let tv = trace_functional(&gq, &spaces, Some(&path)).map_err(|e| Failure::Check(e.to_string()))?;
            println!("normalization\t{}", tv.normalization);
            Some(tv.values)
        }
        None => None,
    };
    println!("vertex\tpaths\tpath_side\talgebra_side");
    for i in 0..r {
        let alg = algebra.as_ref().map_or("skipped".to_string(), |v| fmt_q(&v[i]));
        println!("{}\t{}\t{}\t{}", i + 1, count_paths(&rs, i), fmt_q(&path[i]), alg);
    }
    match algebra {
        Some(v) if v != path => Err(Failure::Check("algebra and path traces disagree".into())),
        _ => Ok(()),
    }
}

fn cmd_membership(ty: &TypeArgs, w: &WeightArgs, phi: &str, s: usize) -> Outcome {
    let (d, rs) = datum(&ty.family, ty.rank)?;
    let mu = resolve_mu(w, &rs)?;
    let phi: Vec<Q> = phi
        .split(',')
        .map(|x| parse_q(x.trim()))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    if phi.len() != rs.rank() {
        return Err(usage(format!("--phi needs {} entries, got {}", rs.rank(), phi.len())));
    }
    let mut verdicts: Vec<(&str, Option<bool>)> = Vec::new();
    verdicts.push(("t_chain", Some(membership(&rs, &mu, &phi, s).map_err(usage)?)));
    let na = build_nilpotent(&rs);
    let l = l_operator(&na, None, &mu, None).map_err(usage)?;
    let phi_vec = SparseVec::from_dense(&phi);
    verdicts.push(("l_operator", Some(l_kernel(&rs, &l, s).contains(&phi_vec))));
    let brute = match try_build_algebra(&d, &rs, &mu, budget(w.budget)?)? {
        Some((gq, spaces)) => {
            if 2 * s > spaces.top {
                Some(true)
            } else {
                let k = e_membership_bruteforce(&gq, &spaces, &d.epsilon, s).map_err(|e| Failure::Check(e.to_string()))?;
                Some(k.contains(&phi_vec))
            }
        }
        None => None,
    };
    verdicts.push(("algebra", brute));
    for (name, v) in &verdicts {
        let text = match v {
            Some(true) => "in [A,A]",
            Some(false) => "not in [A,A]",
            None => "skipped",
        };
        println!("{name}\t{text}");
    }
    let decided: Vec<bool> = verdicts.iter().filter_map(|(_, v)| *v).collect();
    if decided.windows(2).any(|p| p[0] != p[1]) {
        return Err(Failure::Check("methods disagree".into()));
    }
    println!("result\t{}", if decided[0] { "in [A,A]" } else { "not in [A,A]" });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    family: Option<&str>,
    rank: Option<usize>,
    w: &WeightArgs,
    file: Option<&PathBuf>,
    no_z: bool,
    b_algebra: bool,
    eliminate: bool,
    max_degree: Option<usize>,
    show_basis: bool,
    emit: bool,
) -> Outcome {
    let (pres, default_max): (Presentation, Option<usize>) = match (file, family, rank) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            (Presentation::from_text(&text).map_err(usage)?, None)
        }
        (None, Some(f), Some(n)) => {
            let (d, rs) = datum(f, n)?;
            let max = 2 * (rs.coxeter - 2) + 2;
            if b_algebra {
                let legs = rs.legs.ok_or_else(|| usage(format!("{} has no nodal vertex", d.name())))?;
                (b_presentation(legs, eliminate), Some(max))
            } else {
                let mu = resolve_mu(w, &rs)?;
                let max = if no_z { rs.coxeter } else { max };
                (preprojective_presentation(&d, &mu, !no_z).map_err(usage)?, Some(max))
            }
        }
        _ => return Err(usage("give either --presentation-file or both --type and --rank")),
    };
    if emit {
        print!("{}", pres.to_text());
        return Ok(());
    }
    let max = max_degree
        .or(default_max)
        .ok_or_else(|| usage("--max-degree is required with --presentation-file"))?;
    let budget = budget(w.budget)?;
    let (deg, est) = budget_estimate(&pres, max);
    println!("budget_estimate\t{est}\tdegree {deg}\tbudget {budget}");
    let gq = match build_graded_with_budget(&pres, max, budget) {
        Ok(gq) => gq,
        Err(e @ GradeAlgError::BudgetExceeded { .. }) => return Err(Failure::Check(e.to_string())),
        Err(e) => return Err(usage(e)),
    };
    println!("degree\tdim\tcandidates\tideal_rank");
    for d in 0..=max {
        let (c, r) = gq.slice_stats(d);
        println!("{d}\t{}\t{c}\t{r}", gq.dim(d));
    }
    println!("total\t{}", gq.total_dim());
    if let Some(v) = gq.vanishes_from() {
        println!("vanishes_from\t{v}");
    }
    if show_basis {
        print!("{gq}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Roots { ty, format } => cmd_roots(ty, *format),
        Command::Verify {
            ty,
            weight,
            suite,
            json,
            eliminate,
        } => cmd_verify(ty, weight, suite, json.as_ref(), *eliminate),
        Command::Trace { ty, weight } => cmd_trace(ty, weight),
        Command::Membership { ty, weight, phi, s } => cmd_membership(ty, weight, phi, *s),
        Command::Build {
            family,
            rank,
            weight,
            presentation_file,
            no_z,
            b_algebra,
            eliminate,
            max_degree,
            show_basis,
            emit_presentation,
        } => cmd_build(
            family.as_deref(),
            *rank,
            weight,
            presentation_file.as_ref(),
            *no_z,
            *b_algebra,
            *eliminate,
            *max_degree,
            *show_basis,
            *emit_presentation,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
