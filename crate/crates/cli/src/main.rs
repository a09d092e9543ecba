//! Command-line front end for the seat-allocation engine.
//!
//! Exit codes: 0 = success, 2 = validation found problems,
//! 1 = input or processing error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrda::tables_io::{self, TableError};
use mrda_core::model::{CandidateRecord, ChoiceRow, MinCutoff, VirtualProgramId};
use mrda_core::run_pipeline::{allocate_round, DsRule, RoundInstance, RoundResult};
use mrda_core::simgen::{counterfactual_separate, generate_instance, GenConfig, GeneratedInstance};
use mrda_core::validation::{compare_allotments, validate_all};
use mrda_core::virtualization::build_virtual_programs;

#[derive(Parser)]
#[command(name = "mrda", about = "Deterministic multi-round seat allocation engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one allocation round and write the output tables.
    Allocate(AllocateArgs),
    /// Re-check a round's output tables against the inputs.
    Validate(ValidateArgs),
    /// Diff two allotment tables.
    Compare {
        /// Left allotment CSV.
        a: PathBuf,
        /// Right allotment CSV.
        b: PathBuf,
    },
    /// Generate a synthetic input table set.
    Gen(GenArgs),
    /// Compare joint allocation against separate IIT / non-IIT rounds.
    Counterfactual(InputArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DsRuleArg {
    /// Defence-service admits are supernumerary (current rule).
    #[value(name = "2016")]
    Rule2016,
    /// Defence-service admits preferentially consume open seats.
    #[value(name = "2015")]
    Rule2015,
}

#[derive(Args)]
struct InputArgs {
    /// Seat matrix CSV (17 columns).
    #[arg(long)]
    seat_matrix: PathBuf,
    /// Foreign seat matrix CSV (institute, branch, capacity).
    #[arg(long)]
    foreign_seat_matrix: Option<PathBuf>,
    /// Candidate table CSV (63 columns).
    #[arg(long)]
    candidates: PathBuf,
    /// Choice list CSV.
    #[arg(long)]
    choices: PathBuf,
    /// Institute profile CSV (kind, preparatory flag, DS capacity, home states).
    #[arg(long)]
    profiles: PathBuf,
    /// Prior-year female admission baseline CSV; splits single-pool
    /// matrices into Female/Neutral pools.
    #[arg(long)]
    female_baseline: Option<PathBuf>,
    /// Female seat target as a fraction, e.g. 17/100. Required with
    /// --female-baseline.
    #[arg(long)]
    female_target: Option<String>,
}

#[derive(Args)]
struct AllocateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Round number; rounds after the first need --prev-allotment and
    /// --min-cutoff.
    #[arg(long, default_value_t = 1)]
    round: u32,
    /// Previous round's allotment CSV with reporting columns filled in.
    #[arg(long)]
    prev_allotment: Option<PathBuf>,
    /// Min-cutoff table CSV computed from the previous round.
    #[arg(long)]
    min_cutoff: Option<PathBuf>,
    /// Directory for the output tables.
    #[arg(long)]
    out_dir: PathBuf,
    /// Defence-service seat rule.
    #[arg(long, value_enum, default_value = "2016")]
    ds_rule: DsRuleArg,
    /// Under --ds-rule 2015, allow supernumerary seats to resolve
    /// rejection-chain races.
    #[arg(long)]
    ds_supernumerary_ok: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1)]
    round: u32,
    #[arg(long)]
    prev_allotment: Option<PathBuf>,
    #[arg(long)]
    min_cutoff: Option<PathBuf>,
    /// Allotment table to check.
    #[arg(long)]
    allotment: PathBuf,
    /// Program statistics table to check.
    #[arg(long)]
    stats: PathBuf,
    /// Findings CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Number of candidates to generate.
    #[arg(long, default_value_t = 100)]
    candidates: usize,
    /// Approximate number of academic programs to generate.
    #[arg(long, default_value_t = 8)]
    programs: usize,
    /// Probability that consecutive merit-list entries share a rank.
    #[arg(long, default_value_t = 0.05)]
    tie_rate: f64,
    /// Directory for the generated tables.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Table(PathBuf, TableError),
    Io(PathBuf, std::io::Error),
    Other(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Table(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn table<T>(path: &Path, r: Result<T, TableError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Table(path.to_path_buf(), e))
}

/// Loads the raw tables and aligns choice lists with the candidate
/// order. Candidates without choices get an empty list.
fn load_inputs(args: &InputArgs) -> Result<GeneratedInstance, CliError> {
    let seat_matrix = table(&args.seat_matrix, tables_io::parse_seat_matrix(open(&args.seat_matrix)?))?;
    let foreign_matrix = match &args.foreign_seat_matrix {
        Some(p) => table(p, tables_io::parse_foreign_matrix(open(p)?))?,
        None => Vec::new(),
    };
    let candidates = table(&args.candidates, tables_io::parse_candidates(open(&args.candidates)?))?;
    let mut by_roll = table(&args.choices, tables_io::parse_choices(open(&args.choices)?))?;
    let profiles = table(&args.profiles, tables_io::parse_profiles(open(&args.profiles)?))?;
    let choices: Vec<Vec<ChoiceRow>> = candidates
        .iter()
        .map(|c| by_roll.remove(&c.roll_no).unwrap_or_default())
        .collect();
    if let Some((roll, _)) = by_roll.into_iter().next() {
        return Err(CliError::Other(format!(
            "choice list references roll number {roll} absent from the candidate table"
        )));
    }
    Ok(GeneratedInstance { profiles, seat_matrix, foreign_matrix, candidates, choices })
}

fn build_round_instance(
    args: &InputArgs,
    inputs: GeneratedInstance,
    candidates: Vec<CandidateRecord>,
    choices: Vec<Vec<ChoiceRow>>,
    min_cutoffs: &BTreeMap<VirtualProgramId, MinCutoff>,
) -> Result<RoundInstance, CliError> {
    let baseline = match (&args.female_baseline, &args.female_target) {
        (Some(p), Some(t)) => {
            let b = table(p, tables_io::parse_female_baseline(open(p)?))?;
            let ratio = tables_io::parse_ratio(t).ok_or_else(|| {
                CliError::Other(format!("--female-target must be a proper fraction like 17/100, got {t:?}"))
            })?;
            Some((b, ratio))
        }
        (None, None) => None,
        _ => {
            return Err(CliError::Other(
                "--female-baseline and --female-target must be given together".into(),
            ))
        }
    };
    let mut tbl = build_virtual_programs(
        &inputs.seat_matrix,
        &inputs.foreign_matrix,
        &inputs.profiles,
        baseline.as_ref().map(|(b, r)| (b, *r)),
    )
    .map_err(|e| CliError::Other(format!("seat matrix virtualization failed: {e:?}")))?;
    for prog in &mut tbl.programs {
        if let Some(c) = min_cutoffs.get(&prog.id) {
            prog.min_cutoff = *c;
        }
    }
    Ok(RoundInstance { candidates, choices, profiles: inputs.profiles, table: tbl })
}

fn prepare_round(
    input: &InputArgs,
    round: u32,
    prev_allotment: &Option<PathBuf>,
    min_cutoff: &Option<PathBuf>,
) -> Result<(RoundInstance, BTreeMap<VirtualProgramId, MinCutoff>), CliError> {
    let inputs = load_inputs(input)?;
    let mut cutoffs = BTreeMap::new();
    let (candidates, choices);
    if round > 1 {
        let prev_path = prev_allotment.as_ref().ok_or_else(|| {
            CliError::Other("--prev-allotment is required for rounds after the first".into())
        })?;
        let prev = table(prev_path, tables_io::parse_allotment(open(prev_path)?))?;
        if let Some(p) = min_cutoff {
            cutoffs = table(p, tables_io::parse_min_cutoffs(open(p)?))?;
        } else {
            let decisions: BTreeMap<String, _> = inputs
                .candidates
                .iter()
                .map(|c| (c.roll_no.clone(), c.decision))
                .collect();
            cutoffs = mrda_core::rounds::min_cutoff_from_allotment(&decisions, &prev);
        }
        let (c, ch) = mrda_core::rounds::preprocess_round(&inputs.candidates, &inputs.choices, &prev)
            .map_err(|e| CliError::Other(format!("round preprocessing failed: {e:?}")))?;
        candidates = c;
        choices = ch;
    } else {
        if prev_allotment.is_some() || min_cutoff.is_some() {
            return Err(CliError::Other(
                "--prev-allotment/--min-cutoff only apply to rounds after the first".into(),
            ));
        }
        candidates = inputs.candidates.clone();
        choices = inputs.choices.clone();
    }
    let instance = build_round_instance(input, inputs, candidates, choices, &cutoffs)?;
    Ok((instance, cutoffs))
}

fn write_round_outputs(out_dir: &Path, instance: &RoundInstance, result: &RoundResult) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(out_dir.to_path_buf(), e))?;
    let path = out_dir.join("allotment.csv");
    table(&path, tables_io::emit_allotment(&result.allotment, create(&path)?))?;
    let path = out_dir.join("program_stats.csv");
    table(&path, tables_io::emit_program_stats(&result.stats, create(&path)?))?;
    // The min-cutoff table actually applied this round, one row per
    // virtual program.
    let used: BTreeMap<VirtualProgramId, MinCutoff> = instance
        .table
        .programs
        .iter()
        .map(|p| (p.id.clone(), p.min_cutoff))
        .collect();
    let path = out_dir.join("min_cutoff_used.csv");
    table(&path, tables_io::emit_min_cutoffs(&used, create(&path)?))?;
    if !result.stained.is_empty() {
        let path = out_dir.join("stained_programs.csv");
        let mut f = create(&path)?;
        writeln!(f, "Quota,InstCd,BrCd,VCategory,GenderPool").map_err(|e| CliError::Io(path.clone(), e))?;
        for id in &result.stained {
            writeln!(
                f,
                "{},{},{},{},{}",
                id.quota.code(),
                id.institute,
                id.branch,
                id.category.code(),
                id.pool.code()
            )
            .map_err(|e| CliError::Io(path.clone(), e))?;
        }
    }
    Ok(())
}

fn cmd_allocate(args: &AllocateArgs) -> Result<u8, CliError> {
    let (instance, _) = prepare_round(&args.input, args.round, &args.prev_allotment, &args.min_cutoff)?;
    let ds_rule = match args.ds_rule {
        DsRuleArg::Rule2016 => DsRule::Supernumerary2016,
        DsRuleArg::Rule2015 => DsRule::Preferential2015,
    };
    let result = allocate_round(args.round, &instance, ds_rule, args.ds_supernumerary_ok)
        .map_err(|e| CliError::Other(format!("allocation failed: {e:?}")))?;
    write_round_outputs(&args.out_dir, &instance, &result)?;
    eprintln!(
        "allocated {} seats in {} run(s); {} supernumerary, {} stained program(s)",
        result.allotment.len(),
        result.runs,
        result.stats.iter().map(|s| s.supernum).sum::<u32>(),
        result.stained.len()
    );
    Ok(0)
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8, CliError> {
    let (instance, _) = prepare_round(&args.input, args.round, &args.prev_allotment, &args.min_cutoff)?;
    let allotment = table(&args.allotment, tables_io::parse_allotment(open(&args.allotment)?))?;
    let stats = table(&args.stats, tables_io::parse_program_stats(open(&args.stats)?))?;
    let findings = validate_all(&instance, &allotment, &stats);
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(&mut out);
    w.write_record(["CheckId", "Subject", "Detail"]).map_err(|e| CliError::Other(e.to_string()))?;
    for f in &findings {
        w.write_record([f.check_id.to_string().as_str(), &f.subject, &f.detail])
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Other(e.to_string()))?;
    drop(w);
    eprintln!("{} finding(s)", findings.len());
    Ok(if findings.is_empty() { 0 } else { 2 })
}

fn cmd_compare(a: &Path, b: &Path) -> Result<u8, CliError> {
    let left = table(a, tables_io::parse_allotment(open(a)?))?;
    let right = table(b, tables_io::parse_allotment(open(b)?))?;
    let diffs = compare_allotments(&left, &right);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(std::io::stdout());
    w.write_record(["RollNo", "Left", "Right", "LabelOnly"])
        .map_err(|e| CliError::Other(e.to_string()))?;
    let seat_diffs = diffs.iter().filter(|d| !d.label_only).count();
    for d in &diffs {
        w.write_record([
            d.roll_no.as_str(),
            d.left.as_deref().unwrap_or(""),
            d.right.as_deref().unwrap_or(""),
            if d.label_only { "Y" } else { "N" },
        ])
        .map_err(|e| CliError::Other(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Other(e.to_string()))?;
    eprintln!("{} diff(s), {} seat-level", diffs.len(), seat_diffs);
    Ok(if seat_diffs > 0 { 2 } else { 0 })
}

fn cmd_gen(args: &GenArgs) -> Result<u8, CliError> {
    let branches = 2usize;
    let config = GenConfig {
        n_candidates: args.candidates,
        n_institutes: args.programs.div_ceil(branches).max(1),
        branches_per_institute: branches,
        tie_rate: args.tie_rate,
        ..GenConfig::default()
    };
    let inst = generate_instance(args.seed, &config);
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Io(args.out_dir.clone(), e))?;
    let p = args.out_dir.join("seat_matrix.csv");
    table(&p, tables_io::emit_seat_matrix(&inst.seat_matrix, create(&p)?))?;
    let p = args.out_dir.join("foreign_seat_matrix.csv");
    table(&p, tables_io::emit_foreign_matrix(&inst.foreign_matrix, create(&p)?))?;
    let p = args.out_dir.join("candidates.csv");
    table(&p, tables_io::emit_candidates(&inst.candidates, create(&p)?))?;
    let p = args.out_dir.join("profiles.csv");
    table(&p, tables_io::emit_profiles(&inst.profiles, create(&p)?))?;
    let p = args.out_dir.join("choices.csv");
    let map: BTreeMap<String, Vec<ChoiceRow>> = inst
        .candidates
        .iter()
        .zip(&inst.choices)
        .filter(|(_, l)| !l.is_empty())
        .map(|(c, l)| (c.roll_no.clone(), l.clone()))
        .collect();
    table(&p, tables_io::emit_choices(&map, create(&p)?))?;
    eprintln!(
        "generated {} candidates, {} seat-matrix rows into {}",
        inst.candidates.len(),
        inst.seat_matrix.len(),
        args.out_dir.display()
    );
    Ok(0)
}

fn cmd_counterfactual(args: &InputArgs) -> Result<u8, CliError> {
    let inputs = load_inputs(args)?;
    let metrics = counterfactual_separate(&inputs);
    println!("Metric,Value");
    println!("iit_vacancies_saved,{}", metrics.iit_vacancies_saved);
    println!("candidates_benefited,{}", metrics.candidates_benefited);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Allocate(args) => cmd_allocate(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Compare { a, b } => cmd_compare(a, b),
        Command::Gen(args) => cmd_gen(args),
        Command::Counterfactual(args) => cmd_counterfactual(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
