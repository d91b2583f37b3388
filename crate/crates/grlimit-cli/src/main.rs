//! Batch command-line surface: validate inputs, run the limit iteration with
//! traces, run genericity/wall/chamber scans, deformation-dimension reports,
//! and the exhaustive small-instance oracle.
//!
//! Exit codes: 0 on certified success, 1 on invalid input, 2 when the step
//! budget is exceeded, 3 on an internal certification failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use grlimit::connection::{iterate_to_partial_oper, validate_system, FuchsianSystem, IterateConfig};
use grlimit::cohom::{graded_def_dims, ResidueVariant};
use grlimit::hodge::{self, HodgeSystem, SearchConfig};
use grlimit::sample::{self, SampleRng};
use grlimit::strata::{
    chamber_scan, classify_signature, enumerate_walls, kostov_check, ScanConfig, WallMode,
    WallSpace,
};
use grlimit::{Error, Rat};

#[derive(Parser)]
#[command(name = "grlimit", version, about = "exact limits of logarithmic connections on the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Input file (JSON). Defaults to stdin where applicable.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file for the machine-readable artifact; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Step budget for the iteration.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Seed for all randomized sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum worker threads (results are independent of this value; the
    /// current engine runs sequentially).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Run destabilizer searches on ranks above three without the
    /// completeness certification.
    #[arg(long)]
    heuristic_rank: bool,
    /// Impose strongly parabolic residues on the degree-one deformation
    /// term (the default variant).
    #[arg(long)]
    strong_parabolic: bool,
    /// Use the fully logarithmic degree-one term instead.
    #[arg(long, conflicts_with = "strong_parabolic")]
    full_log_residues: bool,
    /// Permute the candidate exploration order (results are invariant).
    #[arg(long)]
    explore_seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Fuchsian system input and report its spectra.
    Validate(CommonArgs),
    /// Iterate the destabilizing modification to the semistable limit,
    /// writing one JSON trace line per step plus a final summary line.
    Limit(CommonArgs),
    /// Kostov genericity of per-point eigenvalue lists.
    Kostov(CommonArgs),
    /// Enumerate the hyperplane arrangement of an eigenvalue space.
    Walls(CommonArgs),
    /// Sample Kostov-generic interior points per chamber and compare the
    /// limiting signatures.
    Scan(ScanArgs),
    /// Deformation dimensions of the limiting filtration.
    Defdim(CommonArgs),
    /// Exhaustive rank-two destabilizer enumeration on a graded system.
    Oracle(CommonArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of raw parameter samples to draw.
    #[arg(long, default_value_t = 40)]
    trials: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ArrangementInput {
    TracelessRank2 {
        points: usize,
        box_lo: Rat,
        box_hi: Rat,
        #[serde(default)]
        mode: ModeInput,
    },
}

#[derive(Serialize, Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum ModeInput {
    #[default]
    Kostov,
    Decision,
}

impl From<ModeInput> for WallMode {
    fn from(m: ModeInput) -> WallMode {
        match m {
            ModeInput::Kostov => WallMode::Kostov,
            ModeInput::Decision => WallMode::Decision,
        }
    }
}

#[derive(Deserialize)]
struct KostovInput {
    eigenvalues: Vec<Vec<Rat>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<Error>()
                .map(|e| match e {
                    Error::BudgetExceeded { .. } => 2u8,
                    Error::Certification(_) => 3u8,
                    _ => 1u8,
                })
                .unwrap_or(1);
            ExitCode::from(code)
        }
    }
}

fn read_input(input: &Option<PathBuf>) -> anyhow::Result<String> {
    match input {
        Some(path) => Ok(fs::read_to_string(path)?),
        None => {
            let mut buf = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(output: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            fs::write(path, content)?;
        }
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn variant_of(args: &CommonArgs) -> ResidueVariant {
    if args.full_log_residues {
        ResidueVariant::FullLogarithmic
    } else {
        ResidueVariant::StronglyParabolic
    }
}

fn search_config(args: &CommonArgs) -> SearchConfig {
    SearchConfig {
        heuristic_rank_override: args.heuristic_rank,
        exploration_seed: args.explore_seed,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate(args) => {
            let system: FuchsianSystem = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let report = validate_system(&system)?;
            let artifact = serde_json::to_string_pretty(&json!({
                "valid": true,
                "rank": system.rank,
                "points": system.points,
                "eigenvalues": report.eigenvalues,
            }))?;
            write_output(&args.output, &artifact)?;
            eprintln!(
                "valid rank-{} system with {} marked points",
                system.rank,
                system.points.len()
            );
            Ok(())
        }
        Command::Limit(args) => {
            let system: FuchsianSystem = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let report = validate_system(&system)?;
            let generic = kostov_check(&report.eigenvalues).unwrap_or(false);
            let cfg = IterateConfig {
                budget: args.budget,
                search: search_config(&args),
                certified_irreducible: generic,
            };
            let (filt, limit, trace) = iterate_to_partial_oper(&system, &cfg)?;
            let signature = classify_signature(&limit, &cfg.search)?;
            let mut lines = Vec::new();
            for step in &trace.steps {
                lines.push(serde_json::to_string(step)?);
            }
            lines.push(serde_json::to_string(&json!({
                "final": true,
                "semistable": true,
                "kostov_generic": generic,
                "filtration_length": filt.len(),
                "levels": trace.final_levels,
                "gaps_seen": trace.gaps_seen,
                "signature": signature,
                "certificate": trace.certificate,
            }))?);
            write_output(&args.output, &(lines.join("\n") + "\n"))?;
            eprintln!(
                "limit reached after {} modification(s); {} level(s); oper: {}",
                trace.steps.len(),
                signature.levels.len(),
                signature.is_oper
            );
            Ok(())
        }
        Command::Kostov(args) => {
            let raw = read_input(&args.input)?;
            let eigen = match serde_json::from_str::<KostovInput>(&raw) {
                Ok(k) => k.eigenvalues,
                Err(_) => {
                    let system: FuchsianSystem = serde_json::from_str(&raw)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?;
                    validate_system(&system)?.eigenvalues
                }
            };
            let generic = kostov_check(&eigen)?;
            let artifact = serde_json::to_string_pretty(&json!({
                "generic": generic,
                "eigenvalues": eigen,
            }))?;
            write_output(&args.output, &artifact)?;
            eprintln!("generic: {generic}");
            Ok(())
        }
        Command::Walls(args) => {
            let input: ArrangementInput = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let (space, mode) = realize_arrangement(&input);
            let arrangement = enumerate_walls(&space, mode, false)?;
            let artifact = serde_json::to_string_pretty(&arrangement)?;
            write_output(&args.output, &artifact)?;
            eprintln!("{} wall(s)", arrangement.walls.len());
            Ok(())
        }
        Command::Scan(scan) => {
            let args = scan.common;
            let input: ArrangementInput = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let (space, mode) = realize_arrangement(&input);
            let arrangement = enumerate_walls(&space, mode, false)?;
            let mut rng = <SampleRng as rand::SeedableRng>::seed_from_u64(args.seed);
            let mut samples = Vec::with_capacity(scan.trials);
            for _ in 0..scan.trials {
                let params: Vec<Rat> = (0..space.dim)
                    .map(|i| sample::rand_rat(&mut rng, &space.box_lo[i], &space.box_hi[i], 64))
                    .collect();
                samples.push(params);
            }
            let points: Vec<Rat> = (0..space.point_exprs.len())
                .map(|i| Rat::from_int(i as i64))
                .collect();
            let build_seed = args.seed.wrapping_add(1);
            let report = chamber_scan(
                &arrangement,
                samples,
                |params| {
                    let mut build_rng =
                        <SampleRng as rand::SeedableRng>::seed_from_u64(build_seed);
                    sample::rank2_traceless(&points, params, &mut build_rng)
                },
                &ScanConfig {
                    budget: args.budget,
                    ..Default::default()
                },
            )?;
            let artifact = serde_json::to_string_pretty(&report)?;
            write_output(&args.output, &artifact)?;
            eprintln!(
                "{} generic interior sample(s) across {} chamber(s); disagreements: {}",
                report.samples.len(),
                report.chambers.len(),
                report.disagreements.len()
            );
            Ok(())
        }
        Command::Defdim(args) => {
            let system: FuchsianSystem = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let report = validate_system(&system)?;
            let generic = kostov_check(&report.eigenvalues).unwrap_or(false);
            let cfg = IterateConfig {
                budget: args.budget,
                search: search_config(&args),
                certified_irreducible: generic,
            };
            let (filt, _, _) = iterate_to_partial_oper(&system, &cfg)?;
            let dims = graded_def_dims(&system, &filt, variant_of(&args))?;
            let artifact = serde_json::to_string_pretty(&dims)?;
            write_output(&args.output, &artifact)?;
            eprintln!(
                "h1 = {} (trace-free {}) at filtration length {}",
                dims.full.h1,
                dims.trace_free.h1,
                filt.len()
            );
            Ok(())
        }
        Command::Oracle(args) => {
            let system: HodgeSystem = serde_json::from_str(&read_input(&args.input)?)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let verdict = hodge::oracle::rank2_max_destabilizer(&system)?;
            let artifact = match &verdict {
                None => serde_json::to_string_pretty(&json!({ "destabilizer": null }))?,
                Some((beta, rho, levels)) => serde_json::to_string_pretty(&json!({
                    "destabilizer": { "beta": beta, "rho": rho, "levels": levels }
                }))?,
            };
            write_output(&args.output, &artifact)?;
            match verdict {
                None => eprintln!("semistable"),
                Some((beta, rho, _)) => eprintln!("destabilizer: slope {beta}, rank {rho}"),
            }
            Ok(())
        }
    }
}

fn realize_arrangement(input: &ArrangementInput) -> (WallSpace, WallMode) {
    match input {
        ArrangementInput::TracelessRank2 {
            points,
            box_lo,
            box_hi,
            mode,
        } => (
            WallSpace::traceless_rank2(*points, box_lo.clone(), box_hi.clone()),
            (*mode).into(),
        ),
    }
}
