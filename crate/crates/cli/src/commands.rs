use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfrac_core::{
    build_oracle_table, compare_methods, exact_fraction, parse_predicate, plan_shots, run_experiment_timed,
    sweep_width, CiMethod, ExperimentConfig, FractionFamily, SamplingPlan, SimulationMode, SweepConfig,
};

use crate::report::{ConfigEcho, CountResult, Format, OutputRecord, PlanResult, ResultPayload, SCHEMA_VERSION};
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "qfrac", version, about = "Estimate the fraction of k-bit inputs satisfying a condition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate f by repeated ancilla measurement.
    Run(RunArgs),
    /// Count solutions exactly by brute force.
    Count(CountArgs),
    /// Shot count for a target accuracy and confidence.
    Plan(PlanArgs),
    /// Run the quantum estimate next to classical uniform sampling.
    Compare(RunArgs),
    /// Repeat a run across register widths of a constant-fraction family.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CiArg {
    Wilson,
    ClopperPearson,
}

impl From<CiArg> for CiMethod {
    fn from(c: CiArg) -> Self {
        match c {
            CiArg::Wilson => CiMethod::Wilson,
            CiArg::ClopperPearson => CiMethod::ClopperPearson,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Statevector,
    Analytic,
}

impl From<ModeArg> for SimulationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Statevector => SimulationMode::Statevector,
            ModeArg::Analytic => SimulationMode::Analytic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        Ok(SeedArg::Random)
    } else {
        s.parse().map(SeedArg::Fixed).map_err(|_| format!("expected an unsigned 64-bit integer or `random`, got {s:?}"))
    }
}

impl SeedArg {
    fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

#[derive(Debug, Args)]
pub struct ShotArgs {
    /// Number of shots P.
    #[arg(long, conflicts_with_all = ["epsilon", "delta"], required_unless_present = "epsilon")]
    pub shots: Option<u64>,
    /// Target additive accuracy; requires --delta.
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,
    /// Failure probability; requires --epsilon.
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
}

impl ShotArgs {
    /// Explicit shot counts report their Hoeffding half-width at `alpha`.
    fn plan(&self, alpha: f64) -> Result<SamplingPlan, Failure> {
        let plan = match (self.shots, self.epsilon, self.delta) {
            (Some(p), _, _) => SamplingPlan::with_shots(p, alpha)?,
            (None, Some(e), Some(d)) => plan_shots(e, d)?,
            _ => return Err(Failure::usage("either --shots or both --epsilon and --delta are required")),
        };
        Ok(plan)
    }
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[command(flatten)]
    pub shots: ShotArgs,
    /// Run seed, or `random` for an entropy-derived seed.
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: SeedArg,
    /// Interval level is 1 - alpha.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "wilson")]
    pub ci: CiArg,
    #[arg(long, value_enum, default_value = "statevector")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Condition on x, e.g. "x*x mod 16 == 1".
    #[arg(long)]
    pub predicate: String,
    /// Width k of the X register.
    #[arg(long)]
    pub qubits: u32,
    /// Attach the brute-force fraction.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub predicate: String,
    #[arg(long)]
    pub qubits: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `quarter`, `half`, `all`, `none`, or a template using {k}.
    #[arg(long)]
    pub fraction_family: String,
    /// Comma-separated register widths.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub qubits_list: Vec<u32>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

impl Command {
    pub fn format(&self) -> Format {
        match self {
            Command::Run(a) | Command::Compare(a) => a.sampling.format,
            Command::Count(a) => a.format,
            Command::Plan(a) => a.format,
            Command::Sweep(a) => a.sampling.format,
        }
    }
}

fn record(command: &str, config: ConfigEcho, result: ResultPayload, timing: BTreeMap<String, f64>) -> OutputRecord {
    OutputRecord {
        schema_version: SCHEMA_VERSION.to_string(),
        command: command.to_string(),
        config,
        result,
        timing,
    }
}

fn experiment_config(args: &RunArgs, threads: Option<usize>) -> Result<ExperimentConfig, Failure> {
    let s = &args.sampling;
    Ok(ExperimentConfig {
        predicate: args.predicate.clone(),
        width: args.qubits,
        plan: s.shots.plan(s.alpha)?,
        seed: s.seed.resolve(),
        ci_method: s.ci.into(),
        alpha: s.alpha,
        verify: args.verify,
        mode: s.mode.into(),
        threads,
    })
}

fn echo(config: &ExperimentConfig) -> ConfigEcho {
    ConfigEcho {
        predicate: Some(config.predicate.clone()),
        k: Some(config.width),
        shots: Some(config.plan.shots),
        epsilon: Some(config.plan.epsilon),
        delta: Some(config.plan.delta),
        seed: Some(config.seed),
        alpha: Some(config.alpha),
        ci_method: Some(config.ci_method),
        mode: Some(config.mode),
        verify: Some(config.verify),
        ..ConfigEcho::default()
    }
}

pub fn execute(command: &Command, threads: Option<usize>) -> Result<OutputRecord, Failure> {
    match command {
        Command::Run(args) => {
            let config = experiment_config(args, threads)?;
            let report = run_experiment_timed(&config)?;
            let timing = BTreeMap::from([
                ("compile_s".to_string(), report.timing.compile_s),
                ("sample_s".to_string(), report.timing.sample_s),
                ("total_s".to_string(), report.timing.total_s()),
            ]);
            Ok(record("run", echo(&config), ResultPayload::Estimate(report.estimate), timing))
        }
        Command::Compare(args) => {
            let config = experiment_config(args, threads)?;
            let start = Instant::now();
            let report = compare_methods(&config)?;
            let timing = BTreeMap::from([("total_s".to_string(), start.elapsed().as_secs_f64())]);
            Ok(record("compare", echo(&config), ResultPayload::Comparison(report), timing))
        }
        Command::Count(args) => {
            let start = Instant::now();
            let ast = parse_predicate(&args.predicate, args.qubits)?;
            let table = build_oracle_table(&ast, args.qubits)?;
            let result = CountResult {
                solution_count: table.solution_count(),
                inputs: table.len(),
                exact_f: exact_fraction(&table),
            };
            let timing = BTreeMap::from([("compile_s".to_string(), start.elapsed().as_secs_f64())]);
            let config = ConfigEcho {
                predicate: Some(args.predicate.clone()),
                k: Some(args.qubits),
                ..ConfigEcho::default()
            };
            Ok(record("count", config, ResultPayload::Count(result), timing))
        }
        Command::Plan(args) => {
            let plan = plan_shots(args.epsilon, args.delta)?;
            let statement = format!(
                "{} shots guarantee Pr[|f_hat - f| > {}] <= {} for every f and every register width \
                 (two-sided Hoeffding bound)",
                plan.shots, plan.epsilon, plan.delta
            );
            let config = ConfigEcho {
                epsilon: Some(args.epsilon),
                delta: Some(args.delta),
                ..ConfigEcho::default()
            };
            let result = PlanResult {
                shots: plan.shots,
                epsilon: plan.epsilon,
                delta: plan.delta,
                statement,
            };
            Ok(record("plan", config, ResultPayload::Plan(result), BTreeMap::new()))
        }
        Command::Sweep(args) => {
            let s = &args.sampling;
            let family = FractionFamily::parse(&args.fraction_family)?;
            let config = SweepConfig {
                family,
                widths: args.qubits_list.clone(),
                plan: s.shots.plan(s.alpha)?,
                seed: s.seed.resolve(),
                ci_method: s.ci.into(),
                alpha: s.alpha,
                mode: s.mode.into(),
                threads,
            };
            let start = Instant::now();
            let rows = sweep_width(&config)?;
            let timing = BTreeMap::from([("total_s".to_string(), start.elapsed().as_secs_f64())]);
            let echo = ConfigEcho {
                family: Some(config.family.template().to_string()),
                qubits_list: Some(config.widths.clone()),
                shots: Some(config.plan.shots),
                epsilon: Some(config.plan.epsilon),
                delta: Some(config.plan.delta),
                seed: Some(config.seed),
                alpha: Some(config.alpha),
                ci_method: Some(config.ci_method),
                mode: Some(config.mode),
                ..ConfigEcho::default()
            };
            Ok(record("sweep", echo, ResultPayload::Sweep(rows), timing))
        }
    }
}
