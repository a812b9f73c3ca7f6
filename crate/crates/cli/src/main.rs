//! `cwit`: generate states, compute concurrence bounds, build and optimize
//! witnesses, and simulate finite-shot estimates. All files are JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use concurrence_witness::bounds::c_from_c_squared;
use concurrence_witness::concurrence::{auto_concurrence, ConcurrenceMethod};
use concurrence_witness::io::{self, StateData};
use concurrence_witness::states::{self, canonical_entangled};
use concurrence_witness::{
    bound_report, build_witness, convex_roof_estimate, estimate_two_copy_bound, optimize_witness,
    pure_concurrence, simulate_expectation, two_copy_bound, witness_bound, witness_from_pure, wootters_concurrence,
    BipartiteDims, DensityMatrix, Error, OptimizeOptions, PureState, ReportOptions, RoofOptions, Variant,
    VariantChoice, Witness,
};

#[derive(Parser)]
#[command(name = "cwit", version, about = "Observable lower bounds on bipartite concurrence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a state file for one of the built-in families.
    Gen(GenArgs),
    /// Print the concurrence of a state.
    Concurrence(ConcurrenceArgs),
    /// Evaluate a lower bound on the concurrence.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Build or optimize witness operators.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Estimate an expectation value from simulated measurement shots.
    Estimate(EstimateArgs),
    /// Print every bound for a state as a JSON report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bell,
    Werner,
    Isotropic,
    Random,
    Separable,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Mixing parameter for werner and isotropic states.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["D1", "D2"])]
    dims: Option<Vec<usize>>,
    /// Rank of a random state (default: full rank).
    #[arg(long)]
    rank: Option<usize>,
    /// Number of product terms in a random separable state.
    #[arg(long, default_value_t = 4)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Wootters,
    Pure,
    Roof,
}

#[derive(Args)]
struct ConcurrenceArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Number of ensemble members searched by the convex-roof minimizer.
    #[arg(long)]
    roof_size: Option<usize>,
    #[arg(long, default_value_t = RoofOptions::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum BoundCommand {
    /// `4·Tr((ρ⊗ρ)V)` as a bound on c², plus its clamped square root.
    TwoCopy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "best")]
        variant: VariantChoice,
    },
    /// `−Tr(ρ·W_σ)` for a witness built from the seed state σ.
    Witness {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Certified upper bound on c(σ); required when σ is mixed.
        #[arg(long)]
        c_upper: Option<f64>,
        #[arg(long, default_value = "A")]
        variant: Variant,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Build `W_σ` from a seed state.
    Build {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        c_upper: Option<f64>,
        #[arg(long, default_value = "A")]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search pure seeds for the largest bound on the given state.
    Optimize {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = OptimizeOptions::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "A")]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, conflicts_with = "two_copy", required_unless_present = "two_copy")]
    witness: Option<PathBuf>,
    /// Measure `4V` on two copies instead of a witness.
    #[arg(long)]
    two_copy: bool,
    #[arg(long, default_value = "A", requires = "two_copy")]
    variant: Variant,
    #[arg(long)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    state: PathBuf,
    /// Pure seed states (default: the canonical maximally entangled state).
    #[arg(long, num_args = 1..)]
    seeds: Vec<PathBuf>,
    #[arg(long)]
    with_roof: bool,
}

fn read_state(path: &Path) -> anyhow::Result<StateData> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::state_from_json(&text).with_context(|| format!("loading state {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse_dims(dims: &Option<Vec<usize>>, default: (usize, usize)) -> anyhow::Result<BipartiteDims> {
    let (d1, d2) = match dims.as_deref() {
        Some([d1, d2]) => (*d1, *d2),
        Some(_) => bail!("--dims takes two values"),
        None => default,
    };
    Ok(BipartiteDims::new(d1, d2)?)
}

fn gen(args: &GenArgs) -> anyhow::Result<()> {
    let dims = parse_dims(&args.dims, (2, 2))?;
    let need_p = || args.p.ok_or_else(|| anyhow!("--p is required for this family"));
    let state = match args.family {
        Family::Bell => StateData::Pure(canonical_entangled(dims)),
        Family::Werner => {
            if dims != BipartiteDims::qubits() {
                bail!("werner states are two-qubit states");
            }
            StateData::Mixed(states::werner_state(need_p()?)?)
        }
        Family::Isotropic => {
            if dims.d1 != dims.d2 {
                bail!("isotropic states need equal local dimensions");
            }
            StateData::Mixed(states::isotropic_state(dims.d1, need_p()?)?)
        }
        Family::Random => match args.rank.unwrap_or(dims.total()) {
            1 => StateData::Pure(states::random_pure(dims, args.seed)),
            rank => StateData::Mixed(states::random_density(dims, rank, args.seed)?),
        },
        Family::Separable => StateData::Mixed(states::random_separable(dims, args.terms, args.seed)?),
    };
    write_file(&args.out, &io::state_to_json(&state))
}

fn concurrence(args: &ConcurrenceArgs) -> anyhow::Result<()> {
    let state = read_state(&args.state)?;
    let rho = state.density();
    let roof = RoofOptions {
        ensemble_size: args.roof_size.unwrap_or_else(|| RoofOptions::default().ensemble_size.max(rho.rank())),
        restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };
    let value = match args.method {
        MethodArg::Auto => auto_concurrence(&rho, &roof)?,
        MethodArg::Wootters => wootters_concurrence(&rho)?,
        MethodArg::Pure => match state.as_pure() {
            Some(psi) => pure_concurrence(psi),
            None if rho.rank() == 1 => pure_concurrence(&rho.eigen_ensemble().members()[0]),
            None => return Err(Error::Domain("the pure formula needs a rank-one state".into()).into()),
        },
        MethodArg::Roof => convex_roof_estimate(&rho, &roof)?,
    };
    if value.method == ConcurrenceMethod::ConvexRoofEstimate {
        eprintln!("warning: convex-roof estimate is an upper estimate of the concurrence");
    }
    print_json(&value)
}

/// Loads σ and builds its witness; a mixed σ needs `c_upper`.
fn seed_witness(sigma_path: &Path, c_upper: Option<f64>, variant: Variant) -> anyhow::Result<Witness> {
    let sigma = read_state(sigma_path)?;
    let w = match (&sigma, c_upper) {
        (StateData::Pure(phi), None) => witness_from_pure(phi, variant)?,
        (StateData::Pure(phi), Some(c)) => build_witness(&DensityMatrix::from_pure(phi), c, variant)?,
        (StateData::Mixed(m), Some(c)) => build_witness(m, c, variant)?,
        (StateData::Mixed(_), None) => {
            return Err(UsageError("--c-upper is required when the seed state is mixed".into()).into())
        }
    };
    Ok(w)
}

fn bound(cmd: &BoundCommand) -> anyhow::Result<()> {
    match cmd {
        BoundCommand::TwoCopy { state, variant } => {
            let rho = read_state(state)?.density();
            let raw = two_copy_bound(&rho, *variant)?;
            let label = match variant {
                VariantChoice::One(v) => v.to_string(),
                VariantChoice::Best => "best".to_string(),
            };
            print_json(&json!({
                "variant": label,
                "c_squared_bound": raw,
                "c_bound": c_from_c_squared(raw),
            }))
        }
        BoundCommand::Witness { state, sigma, c_upper, variant } => {
            let rho = read_state(state)?.density();
            let w = seed_witness(sigma, *c_upper, *variant)?;
            let value = witness_bound(&rho, &w)?;
            print_json(&json!({
                "variant": variant,
                "c_seed": w.c_seed(),
                "bound": value,
                "clamped": value.max(0.0),
                "vacuous": value <= 0.0,
            }))
        }
    }
}

fn witness(cmd: &WitnessCommand) -> anyhow::Result<()> {
    match cmd {
        WitnessCommand::Build { sigma, c_upper, variant, out } => {
            let w = seed_witness(sigma, *c_upper, *variant)?;
            write_file(out, &io::witness_to_json(&w))
        }
        WitnessCommand::Optimize { state, restarts, seed, variant, out } => {
            let rho = read_state(state)?.density();
            let opts = OptimizeOptions { variant: *variant, restarts: *restarts, seed: *seed, ..Default::default() };
            let result = optimize_witness(&rho, &opts)?;
            write_file(out, &io::witness_to_json(&result.witness))?;
            print_json(&json!({ "bound": result.bound, "trace": result.trace }))
        }
    }
}

fn estimate(args: &EstimateArgs) -> anyhow::Result<()> {
    let rho = read_state(&args.state)?.density();
    let est = match &args.witness {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let w = io::witness_from_json(&text).with_context(|| format!("loading witness {}", path.display()))?;
            let mut est = simulate_expectation(&rho, w.operator(), args.shots, args.seed)?;
            est.observable = format!("witness variant {}", w.variant());
            est
        }
        None => estimate_two_copy_bound(&rho, args.variant, args.shots, args.seed)?,
    };
    print_json(&est)
}

fn report(args: &ReportArgs) -> anyhow::Result<()> {
    let rho = read_state(&args.state)?.density();
    let seeds: Vec<PureState> = if args.seeds.is_empty() {
        vec![canonical_entangled(rho.dims())]
    } else {
        args.seeds
            .iter()
            .map(|p| match read_state(p)? {
                StateData::Pure(phi) => Ok(phi),
                StateData::Mixed(_) => Err(UsageError(format!("seed {} must be a pure state", p.display())).into()),
            })
            .collect::<anyhow::Result<_>>()?
    };
    let opts = ReportOptions { with_roof: args.with_roof, ..Default::default() };
    print_json(&bound_report(&rho, &seeds, &opts)?)
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// 3 for numerical validation failures, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Validation(_) | Error::Consistency(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Concurrence(a) => concurrence(a),
        Command::Bound(c) => bound(c),
        Command::Witness(c) => witness(c),
        Command::Estimate(a) => estimate(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
