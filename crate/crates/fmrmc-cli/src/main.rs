//! `fmrmc`: solve fastest-mixing reversible chain instances, compare against
//! Metropolis, transfer solutions across clique lifts, and re-run the
//! built-in example corpus.
//!
//! Exit codes: 0 success, 2 parse error, 3 infeasible/disconnected/refused,
//! 4 consistency failure, 5 reproduce failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fmrmc::corpus::{composite_example, golden_cases, GoldenRoute};
use fmrmc::families::{FamilyError, FamilyRegistry};
use fmrmc::graph::{metropolis_chain, metropolis_weights, transition_matrix};
use fmrmc::io::{
    to_deterministic_json, BareGraphFile, CertificateSummary, ConditionSummary, LiftCheckSummary,
    RunResult, SolveInput,
};
use fmrmc::lift::{
    aggregate_distribution, build_lift, lift_weights, verify_interlacing, CliqueLiftSpec,
    LiftedDistribution,
};
use fmrmc::solver::{solve, SolveOutcome, SolverOptions};
use fmrmc::spectral::slem_of_chain;
use fmrmc::subgraph::solve_composite;
use fmrmc::{EquilibriumDistribution, Graph};

#[derive(Parser)]
#[command(name = "fmrmc", version, about = "Fastest mixing reversible Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Closed,
    Numeric,
    Metropolis,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file: a topology descriptor or a raw graph (JSON).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Seed for the numeric solver.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration budget for the numeric solver.
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    /// Write the run result to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// Run result of the base instance (from `solve --out`).
    #[arg(long)]
    base_result: PathBuf,
    /// Clique lift specification: {"base": {"n", "edges"}, "fibers": [..]}.
    #[arg(long)]
    spec: PathBuf,
    /// Lifted distribution: {"pi": [..]} or a bare JSON array.
    #[arg(long)]
    lifted_pi: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Run only cases whose family tag matches.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override every case's tolerance (useful as a harness self-test).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance for optimal transition weights and SLEM.
    Solve(SolveArgs),
    /// Optimal chain vs the Metropolis chain on the same instance.
    Compare(CompareArgs),
    /// Transfer a base solution to a clique-lifted graph.
    Lift(LiftArgs),
    /// Re-run the built-in example corpus and check the published values.
    Reproduce(ReproduceArgs),
}

const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_CONSISTENCY: u8 = 4;
const EXIT_REPRODUCE: u8 = 5;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Lift(a) => cmd_lift(&a),
        Command::Reproduce(a) => cmd_reproduce(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn read_input(path: &PathBuf) -> Result<SolveInput, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(EXIT_PARSE));
        }
    };
    SolveInput::from_json(&text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_PARSE)
    })
}

fn conditions_to_io(conds: &[fmrmc::families::ConditionCheck]) -> Vec<ConditionSummary> {
    conds
        .iter()
        .map(|c| ConditionSummary { text: c.text.clone(), satisfied: c.satisfied, margin: c.margin })
        .collect()
}

fn emit(result: &RunResult, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let text = to_deterministic_json(result)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn numeric_result(
    instance: &str,
    g: &Graph,
    pi: &EquilibriumDistribution,
    opts: &SolverOptions,
    notes: Vec<String>,
) -> Result<RunResult, ExitCode> {
    let outcome = solve(g, pi, opts, None).map_err(infeasible)?;
    Ok(outcome_to_result(instance, "numeric", g, pi, &outcome, notes))
}

fn outcome_to_result(
    instance: &str,
    method: &str,
    g: &Graph,
    pi: &EquilibriumDistribution,
    outcome: &SolveOutcome,
    mut notes: Vec<String>,
) -> RunResult {
    if !outcome.converged {
        notes.push("iteration budget exhausted before the stall criterion".into());
    }
    RunResult {
        instance: instance.to_string(),
        method: method.to_string(),
        slem: outcome.objective,
        mixing_time: RunResult::mixing_from_slem(outcome.objective),
        graph: BareGraphFile::from_graph(g),
        pi: pi.values().to_vec(),
        weights: RunResult::weights_from(&outcome.weights),
        regime: None,
        conditions: vec![],
        warnings: vec![],
        certificate: Some(CertificateSummary::from(&outcome.certificate)),
        lift_check: None,
        notes,
    }
}

fn infeasible(e: fmrmc::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INFEASIBLE)
}

fn solve_one(input: &SolveInput, method: Method, opts: &SolverOptions) -> Result<RunResult, ExitCode> {
    let registry = FamilyRegistry::standard();
    match input {
        SolveInput::Descriptor(desc) => {
            let instance = format!("{}", desc.family);
            match method {
                Method::Metropolis => {
                    let (g, pi) = registry.instantiate(desc).map_err(family_err)?;
                    metropolis_result(&instance, &g, &pi)
                }
                Method::Numeric => {
                    let (g, pi) = registry.instantiate(desc).map_err(family_err)?;
                    numeric_result(&instance, &g, &pi, opts, vec![])
                }
                Method::Closed | Method::Auto => match registry.solve(desc) {
                    Ok(r) => Ok(closed_result(&instance, &r)),
                    Err(FamilyError::Refused(refusal)) if method == Method::Auto => {
                        let (g, pi) = registry.instantiate(desc).map_err(family_err)?;
                        numeric_result(
                            &instance,
                            &g,
                            &pi,
                            opts,
                            vec![format!("closed form refused: {refusal}; numeric fallback")],
                        )
                    }
                    Err(e) => Err(family_err(e)),
                },
            }
        }
        SolveInput::Instance(file) => {
            let (g, pi, subs) = file.to_parts().map_err(infeasible)?;
            match method {
                Method::Metropolis => metropolis_result("graph", &g, &pi),
                _ if !subs.is_empty() => {
                    let (outcome, reports) =
                        solve_composite(&g, &pi, &subs, opts).map_err(infeasible)?;
                    let mut notes: Vec<String> = reports
                        .iter()
                        .map(|r| format!("subgraph {} ({}): {}", r.index, r.family, r.message))
                        .collect();
                    notes.push("composite solve: declared subgraphs held at local optima".into());
                    Ok(outcome_to_result("composite", "numeric", &g, &pi, &outcome, notes))
                }
                _ => numeric_result("graph", &g, &pi, opts, vec![]),
            }
        }
    }
}

fn family_err(e: FamilyError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INFEASIBLE)
}

fn closed_result(instance: &str, r: &fmrmc::families::ClosedFormResult) -> RunResult {
    RunResult {
        instance: instance.to_string(),
        method: "closed_form".to_string(),
        slem: r.slem,
        mixing_time: RunResult::mixing_from_slem(r.slem),
        graph: BareGraphFile::from_graph(&r.graph),
        pi: r.pi.values().to_vec(),
        weights: RunResult::weights_from(&r.weights),
        regime: Some(r.regime.clone()),
        conditions: conditions_to_io(&r.conditions),
        warnings: r.warnings.clone(),
        certificate: None,
        lift_check: None,
        notes: vec![],
    }
}

fn metropolis_result(
    instance: &str,
    g: &Graph,
    pi: &EquilibriumDistribution,
) -> Result<RunResult, ExitCode> {
    let chain = metropolis_chain(g, pi).map_err(infeasible)?;
    let report = slem_of_chain(&chain).map_err(infeasible)?;
    let weights = metropolis_weights(g, pi).map_err(infeasible)?;
    Ok(RunResult {
        instance: instance.to_string(),
        method: "metropolis".to_string(),
        slem: report.slem,
        mixing_time: RunResult::mixing_from_slem(report.slem),
        graph: BareGraphFile::from_graph(g),
        pi: pi.values().to_vec(),
        weights: RunResult::weights_from(&weights),
        regime: None,
        conditions: vec![],
        warnings: vec![],
        certificate: None,
        lift_check: None,
        notes: vec![],
    })
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<ExitCode> {
    let input = match read_input(&args.input) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let opts = SolverOptions { max_iters: args.max_iters, seed: args.seed, ..Default::default() };
    match solve_one(&input, args.method, &opts) {
        Ok(result) => {
            emit(&result, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(code) => Ok(code),
    }
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<ExitCode> {
    let input = match read_input(&args.input) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let opts = SolverOptions { max_iters: args.max_iters, seed: args.seed, ..Default::default() };
    let optimal = match solve_one(&input, Method::Auto, &opts) {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let metro = match solve_one(&input, Method::Metropolis, &opts) {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let fmt_mix = |m: Option<f64>| m.map_or("inf".to_string(), |t| format!("{t:.9}"));
    println!("{:<12} {:>14} {:>16}", "method", "slem", "mixing_time");
    println!("{:<12} {:>14.9} {:>16}", "optimal", optimal.slem, fmt_mix(optimal.mixing_time));
    println!("{:<12} {:>14.9} {:>16}", "metropolis", metro.slem, fmt_mix(metro.mixing_time));
    match (metro.mixing_time, optimal.mixing_time) {
        (Some(a), Some(b)) if b > 0.0 => {
            println!("{:<12} {:>14.9}", "ratio", a / b);
        }
        _ => println!("{:<12} {:>14}", "ratio", "n/a"),
    }
    if let Some(out) = &args.out {
        let both = serde_json::json!({
            "metropolis": serde_json::to_value(&metro)?,
            "optimal": serde_json::to_value(&optimal)?,
        });
        std::fs::write(out, to_deterministic_json(&both)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_lift(args: &LiftArgs) -> anyhow::Result<ExitCode> {
    let base_text = std::fs::read_to_string(&args.base_result)?;
    let base: RunResult = match serde_json::from_str(&base_text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: bad base result: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let spec_text = std::fs::read_to_string(&args.spec)?;
    let spec_file: fmrmc::io::LiftSpecFile = match serde_json::from_str(&spec_text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: bad lift spec: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let pi_text = std::fs::read_to_string(&args.lifted_pi)?;
    let lifted_pi: Vec<f64> = match serde_json::from_str::<serde_json::Value>(&pi_text) {
        Ok(serde_json::Value::Array(a)) => {
            a.iter().filter_map(|v| v.as_f64()).collect()
        }
        Ok(v) => match v.get("pi").and_then(|p| p.as_array()) {
            Some(a) => a.iter().filter_map(|x| x.as_f64()).collect(),
            None => {
                eprintln!("error: lifted pi file needs a \"pi\" array");
                return Ok(ExitCode::from(EXIT_PARSE));
            }
        },
        Err(e) => {
            eprintln!("error: bad lifted pi: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };

    let base_graph = match base.graph.to_graph() {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let spec_base = match spec_file.base.to_graph() {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    if spec_base != base_graph {
        eprintln!("error: lift spec base graph differs from the base result's graph");
        return Ok(ExitCode::from(EXIT_CONSISTENCY));
    }

    let run = || -> fmrmc::Result<(RunResult, f64, f64)> {
        let spec = CliqueLiftSpec::new(spec_base.clone(), spec_file.fibers.clone())?;
        let lp = LiftedDistribution(EquilibriumDistribution::new(lifted_pi.clone())?);
        let base_pi = EquilibriumDistribution::new(base.pi.clone())?;
        let aggregated = aggregate_distribution(&spec, &lp)?;
        for i in 0..base_pi.len() {
            let diff = (aggregated.get(i) - base_pi.get(i)).abs();
            if diff > 1e-9 * base_pi.get(i).max(1.0) {
                return Err(fmrmc::Error::DimensionMismatch(format!(
                    "fiber sums disagree with base pi at vertex {} (diff {diff:.3e})",
                    i + 1
                )));
            }
        }
        let base_w = base.to_edge_weights();
        let lifted_w = lift_weights(&spec, &base_w, &base_pi, &lp)?;
        let lifted_g = build_lift(&spec)?;
        let lifted_chain = transition_matrix(&lifted_g, &lp.0, &lifted_w)?;
        let lifted_report = slem_of_chain(&lifted_chain)?;
        let base_chain = transition_matrix(&spec_base, &base_pi, &base_w)?;
        let base_report = slem_of_chain(&base_chain)?;
        let inter = verify_interlacing(&lifted_report.eigenvalues, &base_report.eigenvalues)?;
        let result = RunResult {
            instance: base.instance.clone(),
            method: "lifted".to_string(),
            slem: lifted_report.slem,
            mixing_time: RunResult::mixing_from_slem(lifted_report.slem),
            graph: BareGraphFile::from_graph(&lifted_g),
            pi: lp.0.values().to_vec(),
            weights: RunResult::weights_from(&lifted_w),
            regime: None,
            conditions: vec![],
            warnings: vec![],
            certificate: None,
            lift_check: Some(LiftCheckSummary {
                base_slem: base_report.slem,
                lifted_slem: lifted_report.slem,
                interlacing_holds: inter.holds,
                tight_count: inter.tight_count,
            }),
            notes: vec![],
        };
        Ok((result, base_report.slem, lifted_report.slem))
    };
    match run() {
        Ok((result, base_slem, lifted_slem)) => {
            if (base_slem - lifted_slem).abs() > 1e-8 {
                eprintln!(
                    "error: lifted SLEM {lifted_slem} differs from base SLEM {base_slem} beyond 1e-8"
                );
                return Ok(ExitCode::from(EXIT_CONSISTENCY));
            }
            emit(&result, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_CONSISTENCY))
        }
    }
}

fn cmd_reproduce(args: &ReproduceArgs) -> anyhow::Result<ExitCode> {
    let registry = FamilyRegistry::standard();
    let mut failures = 0usize;
    let mut ran = 0usize;
    for case in golden_cases() {
        if let Some(filter) = &args.family {
            if case.family != filter {
                continue;
            }
        }
        ran += 1;
        let slem_tol = args.tol.unwrap_or(case.slem_tolerance);
        let metro_tol = args.tol.unwrap_or(case.metropolis_tolerance);

        let mut case_fail = Vec::new();
        let computed: Option<(f64, Graph, EquilibriumDistribution)> = match &case.route {
            GoldenRoute::ClosedForm(desc) => match registry.solve(desc) {
                Ok(r) => Some((r.slem, r.graph.clone(), r.pi.clone())),
                Err(e) => {
                    case_fail.push(format!("closed form failed: {e}"));
                    None
                }
            },
            GoldenRoute::Numeric { graph, pi } => {
                let dist = EquilibriumDistribution::new(pi.clone()).expect("positive pi");
                let opts = SolverOptions { seed: args.seed, ..Default::default() };
                match solve(graph, &dist, &opts, None) {
                    Ok(out) => Some((out.objective, graph.clone(), dist)),
                    Err(e) => {
                        case_fail.push(format!("numeric solve failed: {e}"));
                        None
                    }
                }
            }
            GoldenRoute::Composite => {
                let c = composite_example();
                let opts = SolverOptions { seed: args.seed, ..Default::default() };
                match solve_composite(&c.graph, &c.pi, &c.subgraphs, &opts) {
                    Ok((out, reports)) => {
                        for r in &reports {
                            if !r.assigned {
                                case_fail.push(format!(
                                    "subgraph {} not assigned: {}",
                                    r.index, r.message
                                ));
                            }
                        }
                        // locally-assigned weights against the published table
                        let (fixed, _) =
                            fmrmc::subgraph::assign_local(&c.graph, &c.pi, &c.subgraphs)
                                .expect("assign_local");
                        for entry in &c.pinned_table {
                            let tol = args.tol.unwrap_or(c.table_tolerance);
                            let (i, j) = entry.edge;
                            let got = fixed.get(i - 1, j - 1);
                            if (got - entry.value).abs() > tol {
                                case_fail.push(format!(
                                    "q_{{{i},{j}}} = {got:.6} vs published {:.6} (delta {:.2e})",
                                    entry.value,
                                    (got - entry.value).abs()
                                ));
                            }
                        }
                        Some((out.objective, c.graph.clone(), c.pi.clone()))
                    }
                    Err(e) => {
                        case_fail.push(format!("composite solve failed: {e}"));
                        None
                    }
                }
            }
        };

        if let Some((slem, graph, dist)) = computed {
            let delta = (slem - case.expected_slem).abs();
            if delta > slem_tol {
                case_fail.push(format!(
                    "slem {slem:.9} vs published {:.9} (delta {delta:.2e} > tol {slem_tol:.1e})",
                    case.expected_slem
                ));
            }
            if let Some(expected_metro) = case.expected_metropolis {
                match metropolis_chain(&graph, &dist).and_then(|ch| slem_of_chain(&ch)) {
                    Ok(rep) => {
                        let d = (rep.slem - expected_metro).abs();
                        if d > metro_tol {
                            case_fail.push(format!(
                                "metropolis slem {:.9} vs published {:.9} (delta {d:.2e})",
                                rep.slem, expected_metro
                            ));
                        }
                    }
                    Err(e) => case_fail.push(format!("metropolis failed: {e}")),
                }
            }
        }

        if case_fail.is_empty() {
            println!("ok   {}", case.id);
        } else {
            failures += 1;
            println!("FAIL {}", case.id);
            for f in &case_fail {
                println!("     {f}");
            }
        }
    }
    println!("{} cases, {} failed", ran, failures);
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_REPRODUCE)
    })
}
