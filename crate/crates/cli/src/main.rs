//! File-based front end: load a state and an observable, run the requested
//! analysis, print an aligned table (or JSON with `--json`), and generate
//! named fixture files. Exit codes: 0 success, 2 parse or validation
//! failure, 3 dimension mismatch, 4 internal assertion failure (an identity
//! residual above tolerance, indicating a library bug rather than bad
//! input). Execution is single-threaded.

mod error;
mod io;
mod json;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use qcorr::coarsen::{build_chain, chain_monotonicity_report};
use qcorr::gen::{fixture_state, Fixture};
use qcorr::info::{
    mutual_info_decomposition, shannon_entropy, subsystem_entropy_decomposition,
};
use qcorr::measure::{entropy_shift_report, information_transfer_report, premeasure, ApparatusSpec};
use qcorr::state::{BipartiteState, Observable};
use qcorr::zero_discord::{classify, mono_orthogonality_certificate};
use qcorr::Matrix64;
use report::Report;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation structure of bipartite quantum states under projective interrogation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the mutual information and subsystem entropies over one interrogation
    Analyze(RunArgs),
    /// Build the coarsening chain of an observable and its noise ledger
    Chain(RunArgs),
    /// Classify the discord as StrongZero, WeakZero, or Positive
    Classify(RunArgs),
    /// Couple a pointer to the interrogated subsystem and verify the bookkeeping
    Measure(RunArgs),
    /// Write a named fixture as a state/observable file pair
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// State file (JSON with dims, re, im)
    state: PathBuf,
    /// Observable file (JSON with eigenvalues, projectors)
    observable: PathBuf,
    /// Tolerance applied to every asserted identity
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Emit the report as JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Fixture name: bell, product, classical_classical, weakzero, example1,
    /// example2, example3, or random_bipartite D1 D2 RANK
    #[arg(required = true)]
    fixture: Vec<String>,
    /// Seed for the random fixtures
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output stem: writes <OUT>.state and <OUT>.obs
    #[arg(long)]
    out: PathBuf,
    /// Emit the summary as JSON instead of a table
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Chain(args) => cmd_chain(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Measure(args) => cmd_measure(&args),
        Command::Gen(args) => cmd_gen(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(args: &RunArgs) -> Result<(BipartiteState<f64>, Observable<f64>), CliError> {
    Ok((
        io::read_state(&args.state)?,
        io::read_observable(&args.observable)?,
    ))
}

/// Reports stay on stdout even when an internal assertion then fails, so
/// the offending numbers are visible next to the error.
fn emit(r: &Report, json: bool) {
    print!("{}", r.render(json));
}

fn internal(what: &str, residual: f64, tol: f64) -> CliError {
    CliError::Internal(format!(
        "{what} residual {residual:.3e} exceeds tolerance {tol:.0e}"
    ))
}

fn cmd_analyze(args: &RunArgs) -> Result<(), CliError> {
    let (s, a) = load(args)?;
    let lib = |e| CliError::from_lib("analyze", e);
    let d = mutual_info_decomposition(&s, &a).map_err(lib)?;
    let e = subsystem_entropy_decomposition(&s, &a).map_err(lib)?;

    let mut r = Report::new("analyze");
    r.section("system");
    r.count("subsystem 1 dimension", "d1", s.d1());
    r.count("subsystem 2 dimension", "d2", s.d2());
    r.count("observable branches", "branches", a.branch_count());
    r.bits_list("branch probabilities", "branch_probabilities", &d.probabilities);

    r.section("mutual information split (bits)");
    r.bits("information gain", "information_gain", d.information_gain);
    r.bits("discord", "discord", d.discord);
    r.bits("residual correlations", "residual_correlations", d.residual);
    r.bits("mutual information", "mutual_information", d.mutual_information);
    r.residual("split residual", "split_residual", d.identity_residual());

    r.section("subsystem entropy split (bits)");
    r.bits("branch entropy", "branch_entropy", e.branch_entropy);
    r.bits("local coherence", "local_coherence", e.local_coherence);
    r.bits("mean conditional entropy, side 1", "residual_s1", e.residual_s1);
    r.bits("mean conditional entropy, side 2", "residual_s2", e.residual_s2);
    r.bits("entropy of subsystem 1", "s1", e.s1);
    r.bits("entropy of subsystem 2", "s2", e.s2);
    r.bits("joint entropy", "s12", e.s12);

    r.section("entropy split residuals");
    r.residual("side-1 split", "s1_residual", e.s1_residual());
    r.residual("mutual split", "mutual_residual", e.mutual_residual());
    r.residual("side-2 split", "s2_residual", e.s2_residual());
    r.residual("joint split", "s12_residual", e.s12_residual());
    emit(&r, args.json);

    if d.identity_residual() > args.tol {
        return Err(internal("mutual information split", d.identity_residual(), args.tol));
    }
    if e.max_residual() > args.tol {
        return Err(internal("subsystem entropy split", e.max_residual(), args.tol));
    }
    Ok(())
}

fn cmd_chain(args: &RunArgs) -> Result<(), CliError> {
    let (s, a) = load(args)?;
    let lib = |e| CliError::from_lib("chain", e);
    let chain = build_chain(&s, &a).map_err(lib)?;
    let diag = chain.diagnostics(&s).map_err(lib)?;
    let mono = chain_monotonicity_report(&s, &chain).map_err(lib)?;
    let branch_entropy = shannon_entropy(&chain.input_probabilities).map_err(lib)?;
    let ledger_residual = (chain.ledger.total() - branch_entropy).abs();

    let mut r = Report::new("chain");
    r.section("stages");
    r.count("input branches", "input_branches", chain.input.branch_count());
    r.count("essential branches", "essential_branches", chain.essential.branch_count());
    r.count("twin branches", "twin_branches", chain.twin.branch_count());
    r.count(
        "quasi-classical branches",
        "quasi_classical_branches",
        chain.quasi_classical.branch_count(),
    );
    r.flag("structural chain", "structural_chain", diag.structural_chain);

    r.section("stage information splits (bits; input, essential, twin, quasi-classical)");
    r.bits_list("gains", "gains", &mono.gains);
    r.bits_list("discords", "discords", &mono.discords);
    r.bits_list("residual correlations", "residuals", &mono.residuals);

    r.section("noise ledger (bits)");
    r.bits("redundant-noise", "redundant_noise", chain.ledger.redundant);
    r.bits("essential-noise", "essential_noise", chain.ledger.essential);
    r.bits("garbled", "garbled", chain.ledger.garbled);
    r.bits("pure-quantum", "pure_quantum", chain.ledger.pure_quantum);
    r.bits("quasi-classical", "quasi_classical", chain.ledger.quasi_classical);
    r.bits("total", "ledger_total", chain.ledger.total());
    r.bits("branch entropy", "branch_entropy", branch_entropy);

    r.section("asserted identities");
    r.residual("ledger vs branch entropy", "ledger_residual", ledger_residual);
    r.residual(
        "stage monotonicity violation",
        "monotonicity_violation",
        mono.monotonicity_violation(),
    );
    r.residual("coherence telescope", "telescope_residual", mono.telescope_residual());
    r.residual("last-stage discord", "quasi_discord", diag.quasi_discord);
    r.residual(
        "last-stage commutator norm",
        "quasi_commutator_norm",
        diag.quasi_commutator_norm,
    );
    emit(&r, args.json);

    if !diag.structural_chain {
        return Err(CliError::Internal(
            "a stage fails to structurally coarsen its predecessor".into(),
        ));
    }
    if ledger_residual > args.tol {
        return Err(internal("noise ledger total", ledger_residual, args.tol));
    }
    if mono.monotonicity_violation() > args.tol {
        return Err(internal("stage monotonicity", mono.monotonicity_violation(), args.tol));
    }
    if mono.telescope_residual() > args.tol {
        return Err(internal("coherence telescope", mono.telescope_residual(), args.tol));
    }
    if diag.quasi_discord > args.tol {
        return Err(internal("last-stage discord", diag.quasi_discord, args.tol));
    }
    if diag.quasi_commutator_norm > args.tol {
        return Err(internal(
            "last-stage commutator",
            diag.quasi_commutator_norm,
            args.tol,
        ));
    }
    Ok(())
}

fn cmd_classify(args: &RunArgs) -> Result<(), CliError> {
    let (s, a) = load(args)?;
    let lib = |e| CliError::from_lib("classify", e);
    let c = classify(&s, &a).map_err(lib)?;
    let certificate = mono_orthogonality_certificate(&s, &a).map_err(lib)?;

    let mut r = Report::new("classify");
    r.text("classification", "classification", &format!("{:?}", c.kind));
    r.flag("mono-orthogonality certificate", "mono_orthogonal", certificate);
    r.section("certificate quantities");
    r.bits("discord (bits)", "discord", c.discord);
    r.bits("global coherence (bits)", "global_coherence", c.global_coherence);
    r.bits("local coherence (bits)", "local_coherence", c.local_coherence);
    r.residual("commutator norm", "commutator_norm", c.commutator_norm);
    r.residual("dephasing fixed-point residual", "fixed_point_residual", c.fixed_point_residual);
    emit(&r, args.json);
    Ok(())
}

fn cmd_measure(args: &RunArgs) -> Result<(), CliError> {
    let (s, a) = load(args)?;
    let lib = |e| CliError::from_lib("measure", e);
    let apparatus = ApparatusSpec::standard(&a);
    let result = premeasure(&s, &a, &apparatus).map_err(lib)?;
    let transfer = information_transfer_report(&s, &a, &result).map_err(lib)?;
    let shift = entropy_shift_report(&s, &a, &result).map_err(lib)?;
    let u = &result.unitary;
    let unitarity = u
        .adjoint()
        .mul(u)
        .sub(&Matrix64::identity(u.rows()))
        .frobenius_norm();
    let max_residual = unitarity
        .max(transfer.max_residual())
        .max(shift.max_residual())
        .max(shift.twin_residual)
        .max(shift.collapse_residual);
    let pass = max_residual <= args.tol;

    let mut r = Report::new("measure");
    r.section("coupling");
    r.count("subsystem 1 dimension", "d1", s.d1());
    r.count("subsystem 2 dimension", "d2", s.d2());
    r.count("pointer dimension", "d3", apparatus.pointer_dim());
    r.bits_list("outcome probabilities", "outcome_probabilities", &result.outcome_probabilities);
    r.residual("coupling unitarity", "unitarity_residual", unitarity);

    r.section("information transfer (bits)");
    r.bits("coherence, original", "coherence_original", transfer.coherence_original);
    r.bits(
        "coherence, system afterwards",
        "coherence_system_final",
        transfer.coherence_system_final,
    );
    r.bits(
        "coherence, pointer afterwards",
        "coherence_pointer_final",
        transfer.coherence_pointer_final,
    );

    r.section("information transfer residuals");
    r.residual(
        "pointer statistics",
        "pointer_statistics_residual",
        transfer.pointer_statistics_residual,
    );
    r.residual("branch states", "branch_state_residual", transfer.branch_state_residual);
    r.residual(
        "unmeasured reduction",
        "unmeasured_reduction_residual",
        transfer.unmeasured_reduction_residual,
    );
    r.residual(
        "coherence transfer",
        "coherence_transfer_residual",
        transfer.coherence_transfer_residual(),
    );
    r.residual("mutual information", "mutual_info_residual", transfer.mutual_info_residual);
    r.residual(
        "split decomposition",
        "decomposition_residual",
        transfer.decomposition_residual,
    );

    r.section("entropy bookkeeping (bits)");
    r.bits("pair entropy before", "pair_entropy_initial", shift.pair_entropy_initial);
    r.bits("pair entropy after", "pair_entropy_final", shift.pair_entropy_final);
    r.bits("destroyed coherence", "coherence", shift.coherence);
    r.bits("branch entropy", "branch_entropy", shift.branch_entropy);
    r.bits("pointer entropy", "pointer_entropy", shift.pointer_entropy);
    r.bits(
        "pair-pointer mutual information",
        "pair_pointer_mutual_info",
        shift.pair_pointer_mutual_info,
    );

    r.section("entropy bookkeeping residuals");
    r.residual("entropy shift", "entropy_shift_residual", shift.entropy_shift_residual());
    r.residual("mixture bracket", "bracket_residual", shift.bracket_residual());
    r.residual(
        "pair-pointer mutual information",
        "pair_pointer_residual",
        shift.mutual_info_residual(),
    );
    r.residual(
        "pointer entropy",
        "pointer_entropy_residual",
        shift.pointer_entropy_residual(),
    );
    r.residual("system-pointer twin", "twin_residual", shift.twin_residual);
    r.residual("objectified record", "collapse_residual", shift.collapse_residual);

    r.section("verdict");
    r.residual("max residual", "max_residual", max_residual);
    r.flag("all identities within tolerance", "pass", pass);
    emit(&r, args.json);

    if !pass {
        return Err(internal("measurement bookkeeping", max_residual, args.tol));
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let name = args.fixture.join(" ");
    let fixture = Fixture::parse(&name).map_err(|e| CliError::Validation(e.to_string()))?;
    let (s, a) =
        fixture_state::<f64>(&fixture, args.seed).map_err(|e| CliError::from_lib("gen", e))?;
    let state_path = PathBuf::from(format!("{}.state", args.out.display()));
    let obs_path = PathBuf::from(format!("{}.obs", args.out.display()));
    io::write_state(&state_path, &s)?;
    io::write_observable(&obs_path, &a)?;

    let mut r = Report::new("gen");
    r.text("fixture", "fixture", &fixture.name());
    r.count("seed", "seed", args.seed as usize);
    r.count("subsystem 1 dimension", "d1", s.d1());
    r.count("subsystem 2 dimension", "d2", s.d2());
    r.count("observable branches", "branches", a.branch_count());
    r.text("state file", "state_file", &state_path.display().to_string());
    r.text("observable file", "observable_file", &obs_path.display().to_string());
    emit(&r, args.json);
    Ok(())
}
