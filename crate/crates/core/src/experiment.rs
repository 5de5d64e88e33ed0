//! End-to-end runs: quantum sampling, the classical baseline, their
//! comparison, and the register-width sweep.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{hoeffding_half_width, CiMethod, EstimateResult, SamplingPlan};
use crate::predicate::{build_oracle_table, exact_fraction, parse_predicate, ExactFraction, OracleTable};
use crate::rng::{derive_seed, shot_uniform, substream, CLASSICAL_STREAM};
use crate::simulator::{analytic_p1, prepare_uniform, RegisterSpec, StateVector};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    /// Full prepare, oracle and measure on the dense state per shot.
    #[default]
    Statevector,
    /// Bernoulli draws against the closed-form `S / 2^k`.
    Analytic,
}

impl SimulationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimulationMode::Statevector => "statevector",
            SimulationMode::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub predicate: String,
    pub width: u32,
    pub plan: SamplingPlan,
    pub seed: u64,
    pub ci_method: CiMethod,
    pub alpha: f64,
    /// Attach the brute-force fraction to the result.
    pub verify: bool,
    pub mode: SimulationMode,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(predicate: impl Into<String>, width: u32, plan: SamplingPlan) -> Self {
        ExperimentConfig {
            predicate: predicate.into(),
            width,
            plan,
            seed: 0,
            ci_method: CiMethod::Wilson,
            alpha: 0.05,
            verify: false,
            mode: SimulationMode::Statevector,
            threads: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: SimulationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.plan.shots == 0 {
            return Err(Error::InvalidCounts("shot count must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must lie strictly between 0 and 1",
            });
        }
        Ok(())
    }
}

/// Wall-clock seconds spent in each phase of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub compile_s: f64,
    pub sample_s: f64,
}

impl PhaseTimings {
    pub fn total_s(&self) -> f64 {
        self.compile_s + self.sample_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub estimate: EstimateResult,
    pub solution_count: u64,
    pub timing: PhaseTimings,
}

/// Runs `f` on a pool capped at `threads` workers, or on the global pool.
fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn compile(config: &ExperimentConfig) -> Result<OracleTable> {
    let ast = parse_predicate(&config.predicate, config.width)?;
    build_oracle_table(&ast, config.width)
}

/// Ones count over `shots` statevector shots, each freshly prepared.
fn statevector_ones(table: &OracleTable, shots: u64, seed: u64) -> Result<u64> {
    let spec = RegisterSpec::from(table.width());
    (0..shots)
        .into_par_iter()
        .map_init(
            || prepare_uniform(spec),
            |state: &mut Result<StateVector>, i| {
                let state = state.as_mut().map_err(|e| e.clone())?;
                state.reset_uniform()?;
                state.apply_oracle_in_place(table)?;
                state.measure_y_in_place(shot_uniform(seed, i)).map(u64::from)
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn analytic_ones(table: &OracleTable, shots: u64, seed: u64) -> u64 {
    let p1 = analytic_p1(table).p1();
    (0..shots)
        .into_par_iter()
        .map(|i| u64::from(shot_uniform(seed, i) < p1))
        .sum()
}

/// Outcome bits of the individual shots, in shot order.
pub fn shot_outcomes(table: &OracleTable, shots: u64, seed: u64, mode: SimulationMode) -> Result<Vec<u8>> {
    match mode {
        SimulationMode::Statevector => {
            let spec = RegisterSpec::from(table.width());
            let mut state = prepare_uniform(spec)?;
            (0..shots)
                .map(|i| {
                    state.reset_uniform()?;
                    state.apply_oracle_in_place(table)?;
                    state.measure_y_in_place(shot_uniform(seed, i))
                })
                .collect()
        }
        SimulationMode::Analytic => {
            let p1 = analytic_p1(table).p1();
            Ok((0..shots).map(|i| u8::from(shot_uniform(seed, i) < p1)).collect())
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<EstimateResult> {
    run_experiment_timed(config).map(|r| r.estimate)
}

/// [`run_experiment`] plus solution count and phase timings.
pub fn run_experiment_timed(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    with_pool(config.threads, || {
        let t0 = Instant::now();
        let table = compile(config)?;
        let compile_s = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let shots = config.plan.shots;
        let ones = match config.mode {
            SimulationMode::Statevector => statevector_ones(&table, shots, config.seed)?,
            SimulationMode::Analytic => analytic_ones(&table, shots, config.seed),
        };
        let sample_s = t1.elapsed().as_secs_f64();

        let exact = config.verify.then(|| exact_fraction(&table));
        let estimate = EstimateResult::from_counts(ones, shots, config.alpha, config.ci_method, config.seed, exact)?;
        Ok(RunReport {
            estimate,
            solution_count: table.solution_count(),
            timing: PhaseTimings { compile_s, sample_s },
        })
    })?
}

/// Uniformly random inputs tested one at a time against the predicate.
pub fn run_classical_baseline(config: &ExperimentConfig) -> Result<EstimateResult> {
    config.validate()?;
    with_pool(config.threads, || {
        let ast = parse_predicate(&config.predicate, config.width)?;
        let mask = ast.width().mask();
        let seed = config.seed;
        let ones: u64 = (0..config.plan.shots)
            .into_par_iter()
            .map(|i| {
                let x = substream(seed, CLASSICAL_STREAM, i).random::<u64>() & mask;
                u64::from(ast.eval(x))
            })
            .sum();
        let exact = if config.verify {
            Some(exact_fraction(&build_oracle_table(&ast, config.width)?))
        } else {
            None
        };
        EstimateResult::from_counts(ones, config.plan.shots, config.alpha, config.ci_method, seed, exact)
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonReport {
    pub quantum: EstimateResult,
    pub classical: EstimateResult,
    pub abs_difference: f64,
    pub ci_overlap: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_f: Option<ExactFraction>,
}

/// Label mixed into the run seed to key the classical side of a comparison.
pub const CLASSICAL_SEED_LABEL: u64 = 1;

/// Runs both estimators. The quantum side uses `config.seed`; the classical
/// side uses a seed derived from it.
pub fn compare_methods(config: &ExperimentConfig) -> Result<ComparisonReport> {
    let quantum = run_experiment(config)?;
    let classical_config = ExperimentConfig {
        seed: derive_seed(config.seed, CLASSICAL_SEED_LABEL),
        ..config.clone()
    };
    let classical = run_classical_baseline(&classical_config)?;
    Ok(ComparisonReport {
        abs_difference: (quantum.f_hat - classical.f_hat).abs(),
        ci_overlap: quantum.ci_low <= classical.ci_high && classical.ci_low <= quantum.ci_high,
        exact_f: quantum.exact_f,
        quantum,
        classical,
    })
}

/// A predicate template with `{k}` standing for the register width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionFamily {
    template: String,
}

impl FractionFamily {
    /// Named families, or any template text.
    ///
    /// | name      | template               | f   |
    /// |-----------|------------------------|-----|
    /// | `quarter` | `x < 1 << ({k} - 2)`   | 1/4 |
    /// | `half`    | `x < 1 << ({k} - 1)`   | 1/2 |
    /// | `all`     | `0 == 0`               | 1   |
    /// | `none`    | `0 == 1`               | 0   |
    pub fn parse(spec: &str) -> Result<Self> {
        let template = match spec.trim() {
            "quarter" => "x < 1 << ({k} - 2)",
            "half" => "x < 1 << ({k} - 1)",
            "all" => "0 == 0",
            "none" => "0 == 1",
            other => other,
        };
        let stripped = template.replace("{k}", "");
        if stripped.contains('{') || stripped.contains('}') {
            return Err(Error::Template(format!("unsupported placeholder in {template:?}; only {{k}} is recognised")));
        }
        Ok(FractionFamily {
            template: template.to_string(),
        })
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn instantiate(&self, k: u32) -> String {
        self.template.replace("{k}", &k.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: FractionFamily,
    pub widths: Vec<u32>,
    pub plan: SamplingPlan,
    pub seed: u64,
    pub ci_method: CiMethod,
    pub alpha: f64,
    pub mode: SimulationMode,
    pub threads: Option<usize>,
}

impl SweepConfig {
    fn experiment(&self, k: u32) -> ExperimentConfig {
        ExperimentConfig {
            predicate: self.family.instantiate(k),
            width: k,
            plan: self.plan,
            seed: self.seed,
            ci_method: self.ci_method,
            alpha: self.alpha,
            verify: true,
            mode: self.mode,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub k: u32,
    pub predicate: String,
    pub estimate: EstimateResult,
    pub exact_f: ExactFraction,
    pub abs_error: f64,
    /// Hoeffding half-width at the plan's shot count and `delta`.
    pub hoeffding_bound: f64,
    pub wall_clock_s: f64,
}

/// Runs the same plan and seed at every width of a constant-fraction family.
///
/// Every width shares the seed, so each row sees the same per-shot draws;
/// rows differ only through `p1`, which the family holds fixed.
pub fn sweep_width(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.widths.is_empty() {
        return Err(Error::Template("no register widths given".into()));
    }
    let hoeffding_bound = hoeffding_half_width(config.plan.shots, config.plan.delta)?;

    // Check the family before spending time on shots.
    let mut expected: Option<ExactFraction> = None;
    for &k in &config.widths {
        let exp = config.experiment(k);
        let table = compile(&exp).map_err(|e| match e {
            Error::Parse(p) => Error::Template(format!("{:?} at k={k}: {p}", exp.predicate)),
            other => other,
        })?;
        let f = exact_fraction(&table);
        match expected {
            None => expected = Some(f),
            Some(prev) if prev != f => {
                return Err(Error::Template(format!(
                    "family fraction changes with width: {prev} at k={}, {f} at k={k}",
                    config.widths[0]
                )))
            }
            Some(_) => {}
        }
    }

    config
        .widths
        .iter()
        .map(|&k| {
            let exp = config.experiment(k);
            let start = Instant::now();
            let estimate = run_experiment(&exp)?;
            let wall_clock_s = start.elapsed().as_secs_f64();
            let exact_f = estimate.exact_f.expect("sweep runs verify");
            Ok(SweepRow {
                k,
                predicate: exp.predicate,
                abs_error: (estimate.f_hat - exact_f.to_f64()).abs(),
                exact_f,
                estimate,
                hoeffding_bound,
                wall_clock_s,
            })
        })
        .collect()
}
