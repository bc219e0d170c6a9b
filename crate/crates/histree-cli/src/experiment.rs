//! Reproducible experiment runs: build a network, simulate, evaluate a task
//! per round, compare against ground truth, and emit a JSONL trace plus a
//! machine-checkable report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use histree::history::View;
use histree::leaderless::{
    average_consensus, mean_of, mean_of_concentration, stabilizing_concentration,
    terminating_concentration, ConcentrationOutput,
};
use histree::leaders::{
    counting_with_leaders_traced, stabilizing_gc, CountingRun, TerminatingGcDriver,
};
use histree::network::{
    block_reduce, gen_cycle_with_one_marked, gen_leader_ring, gen_random_inputs,
    gen_random_schedule, gen_scale_family, InputAssignment, ProcessInput, Schedule,
};
use histree::sim;

/// Configuration problems map to CLI exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Random { n: usize, blocks: usize },
    Scale { partite_sizes: Vec<usize>, alpha: usize, rounds: usize },
    LeaderRing { k: usize, i: usize, rounds: usize },
    MarkedCycle { t: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Concentration,
    Average,
    GcCount,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Stabilizing,
    Terminating,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub task: Task,
    pub mode: Mode,
    /// Dynamic disconnectivity the run is judged against.
    pub t_disc: usize,
    /// Known upper bound N >= n; required by terminating concentration.
    pub size_bound: Option<usize>,
    /// Known number of leaders; required by the counting task.
    pub num_leaders: u64,
    pub seed: u64,
    /// Value alphabet for randomly assigned inputs.
    pub values: Vec<String>,
    /// Simulation horizon; defaults to the bound implied by task and mode.
    pub horizon: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.t_disc == 0 {
            return Err(ConfigError("t_disc must be >= 1".into()));
        }
        validate_task(self.task, self.mode, self.size_bound, self.num_leaders)?;
        match &self.family {
            Family::Random { n, .. } => {
                if self.num_leaders as usize > *n {
                    return Err(ConfigError("more leaders than processes".into()));
                }
                if let Some(bound) = self.size_bound {
                    if bound < *n {
                        return Err(ConfigError("size bound below process count".into()));
                    }
                }
            }
            Family::LeaderRing { k: _, i, .. } => {
                if self.task == Task::GcCount && self.num_leaders != *i as u64 {
                    return Err(ConfigError(
                        "leader-ring counting requires num_leaders = i".into(),
                    ));
                }
            }
            Family::Scale { .. } | Family::MarkedCycle { .. } => {
                if self.num_leaders != 0 {
                    return Err(ConfigError("this family is leaderless".into()));
                }
            }
        }
        Ok(())
    }

    /// Builds the network deterministically from the seed.
    pub fn build_network(&self) -> Result<(Schedule, InputAssignment), ConfigError> {
        let wrap = |e: histree::network::NetworkError| ConfigError(e.to_string());
        match &self.family {
            Family::Random { n, blocks } => {
                let schedule = gen_random_schedule(*n, self.t_disc, *blocks, self.seed);
                let values: Vec<&str> = self.values.iter().map(|s| s.as_str()).collect();
                let inputs = gen_random_inputs(
                    *n,
                    &values,
                    self.num_leaders as usize,
                    self.seed ^ 0x9e3779b97f4a7c15,
                );
                Ok((schedule, inputs))
            }
            Family::Scale { partite_sizes, alpha, rounds } => {
                gen_scale_family(partite_sizes, *alpha, *rounds).map_err(wrap)
            }
            Family::LeaderRing { k, i, rounds } => gen_leader_ring(*k, *i, *rounds).map_err(wrap),
            Family::MarkedCycle { t } => Ok(gen_cycle_with_one_marked(*t).0),
        }
    }
}

/// Knowledge assumptions per task and mode: terminating concentration needs
/// the size bound, counting needs the leader count.
fn validate_task(
    task: Task,
    mode: Mode,
    size_bound: Option<usize>,
    num_leaders: u64,
) -> Result<(), ConfigError> {
    match (task, mode) {
        (Task::Concentration | Task::Average, Mode::Terminating) => {
            if size_bound.is_none() {
                return Err(ConfigError(
                    "terminating concentration requires a size bound N".into(),
                ));
            }
        }
        (Task::GcCount, _) => {
            if num_leaders == 0 {
                return Err(ConfigError("counting requires num_leaders >= 1".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Outcome of a run: bound bookkeeping, pass/fail oracle checks, and the
/// full JSONL trace.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub horizon: usize,
    pub bound: usize,
    /// First round from which every process's output equals ground truth
    /// through the end of the simulated horizon.
    pub stabilization_round: Option<usize>,
    /// Last process's commit round (original-round units) in terminating
    /// modes.
    pub termination_round: Option<usize>,
    pub bound_satisfied: bool,
    pub oracle_checks: Vec<String>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub trace: String,
}

#[derive(Clone, Copy)]
struct TaskSpec {
    task: Task,
    mode: Mode,
    t_disc: usize,
    size_bound: Option<usize>,
    num_leaders: u64,
}

impl TaskSpec {
    fn bound(&self, n: usize) -> usize {
        match (self.task, self.mode) {
            (_, Mode::Stabilizing) => 2 * self.t_disc * n,
            (Task::Concentration | Task::Average, Mode::Terminating) => {
                self.t_disc * (n + self.size_bound.unwrap())
            }
            (Task::GcCount, Mode::Terminating) => {
                let l = self.num_leaders as usize;
                (l * l + l + 1) * self.t_disc * n
            }
        }
    }
}

fn rational_str(r: &BigRational) -> String {
    format!("{r}")
}

fn conc_json(out: &ConcentrationOutput) -> serde_json::Value {
    match out.known() {
        None => json!("unknown"),
        Some(map) => {
            let entries: BTreeMap<String, String> =
                map.iter().map(|(k, v)| (k.to_string(), rational_str(v))).collect();
            json!(entries)
        }
    }
}

fn gc_json(out: &Option<BTreeMap<ProcessInput, u64>>) -> serde_json::Value {
    match out {
        None => json!("unknown"),
        Some(map) => {
            let entries: BTreeMap<String, u64> =
                map.iter().map(|(k, &v)| (k.to_string(), v)).collect();
            json!(entries)
        }
    }
}

pub fn view_hash(view: &View) -> String {
    hex::encode(Sha256::digest(view.canonical_form()))
}

fn trace_line(out: &mut String, value: serde_json::Value) {
    let _ = writeln!(out, "{value}");
}

/// Ground-truth concentration of an input assignment.
pub fn true_concentration(inputs: &InputAssignment) -> BTreeMap<ProcessInput, BigRational> {
    let n = BigRational::from_integer((inputs.len() as u64).into());
    inputs
        .inventory()
        .into_iter()
        .map(|(label, count)| (label, BigRational::from_integer(count.into()) / &n))
        .collect()
}

/// Ground-truth mean of the numeric input values.
pub fn true_mean(inputs: &InputAssignment) -> Option<BigRational> {
    let multiset: Vec<(ProcessInput, u64)> = inputs.inventory().into_iter().collect();
    mean_of(&multiset)
}

/// Runs a configured experiment end to end. The trace is deterministic in
/// the config (identical configs yield byte-identical traces).
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, anyhow::Error> {
    config.validate()?;
    let (schedule, inputs) = config.build_network()?;
    let spec = TaskSpec {
        task: config.task,
        mode: config.mode,
        t_disc: config.t_disc,
        size_bound: config.size_bound,
        num_leaders: config.num_leaders,
    };
    let meta = json!({"type": "meta", "config": config});
    run_inner(&schedule, &inputs, spec, config.horizon, meta)
}

/// Same pipeline over an externally supplied network (schedule and input
/// files).
#[allow(clippy::too_many_arguments)]
pub fn run_on_network(
    schedule: &Schedule,
    inputs: &InputAssignment,
    task: Task,
    mode: Mode,
    t_disc: usize,
    size_bound: Option<usize>,
    num_leaders: u64,
    horizon: Option<usize>,
) -> Result<RunReport, anyhow::Error> {
    validate_task(task, mode, size_bound, num_leaders)?;
    if t_disc == 0 {
        return Err(ConfigError("t_disc must be >= 1".into()).into());
    }
    if num_leaders != inputs.leader_count() {
        return Err(ConfigError(format!(
            "num_leaders {} but the assignment has {} leaders",
            num_leaders,
            inputs.leader_count()
        ))
        .into());
    }
    let spec = TaskSpec { task, mode, t_disc, size_bound, num_leaders };
    let meta = json!({
        "type": "meta",
        "task": task,
        "mode": mode,
        "t_disc": t_disc,
        "size_bound": size_bound,
        "num_leaders": num_leaders,
    });
    run_inner(schedule, inputs, spec, horizon, meta)
}

fn run_inner(
    schedule: &Schedule,
    inputs: &InputAssignment,
    spec: TaskSpec,
    horizon: Option<usize>,
    meta: serde_json::Value,
) -> Result<RunReport, anyhow::Error> {
    let n = schedule.n;
    let bound = spec.bound(n);
    let horizon = horizon.unwrap_or(bound).min(schedule.num_rounds());
    if horizon < bound {
        return Err(anyhow::anyhow!(
            "horizon exhausted: schedule provides {horizon} rounds, bound needs {bound}"
        ));
    }
    let mut trace = String::new();
    trace_line(
        &mut trace,
        json!({"meta": meta, "n": n, "horizon": horizon, "bound": bound}),
    );
    match (spec.task, spec.mode) {
        (Task::GcCount, Mode::Terminating) => {
            run_terminating_gc(schedule, inputs, spec, horizon, bound, trace)
        }
        _ => run_per_round(schedule, inputs, spec, horizon, bound, trace),
    }
}

/// Stabilizing tasks and terminating concentration: evaluate the task on
/// every (round, process) view of the raw execution.
fn run_per_round(
    schedule: &Schedule,
    inputs: &InputAssignment,
    spec: TaskSpec,
    horizon: usize,
    bound: usize,
    mut trace: String,
) -> Result<RunReport, anyhow::Error> {
    let n = schedule.n;
    let conc_truth = true_concentration(inputs);
    let mean_truth = true_mean(inputs);
    let inventory = inputs.inventory();
    if spec.task == Task::Average && mean_truth.is_none() {
        return Err(anyhow::anyhow!("average task needs numeric input values"));
    }

    let mut violations: Vec<String> = Vec::new();
    // matches[round][p-1]: output equals ground truth.
    let mut matches: Vec<Vec<bool>> = Vec::with_capacity(horizon + 1);
    let mut first_terminated: Vec<Option<usize>> = vec![None; n];

    sim::run(schedule, inputs, horizon, |round, views| {
        let mut row = Vec::with_capacity(n);
        for (p0, view) in views.iter().enumerate() {
            let (value, ok, terminated) = match (spec.task, spec.mode) {
                (Task::Concentration, Mode::Stabilizing) => {
                    let out = stabilizing_concentration(view);
                    let ok = out.known() == Some(&conc_truth);
                    (conc_json(&out), ok, None)
                }
                (Task::Concentration, Mode::Terminating) => {
                    let (out, term) = terminating_concentration(
                        view,
                        spec.t_disc,
                        spec.size_bound.unwrap(),
                        round,
                    );
                    let ok = out.known() == Some(&conc_truth);
                    (conc_json(&out), ok, Some(term))
                }
                (Task::Average, Mode::Stabilizing) => {
                    let out = average_consensus(view);
                    let ok = out.as_ref() == mean_truth.as_ref();
                    let value = out
                        .as_ref()
                        .map(|r| json!(rational_str(r)))
                        .unwrap_or(json!("unknown"));
                    (value, ok, None)
                }
                (Task::Average, Mode::Terminating) => {
                    let (out, term) = terminating_concentration(
                        view,
                        spec.t_disc,
                        spec.size_bound.unwrap(),
                        round,
                    );
                    let mean = out.known().and_then(mean_of_concentration);
                    let ok = mean.as_ref() == mean_truth.as_ref();
                    let value = mean
                        .as_ref()
                        .map(|r| json!(rational_str(r)))
                        .unwrap_or(json!("unknown"));
                    (value, ok, Some(term))
                }
                (Task::GcCount, Mode::Stabilizing) => {
                    let out = stabilizing_gc(view, spec.num_leaders);
                    let ok = out.as_ref() == Some(&inventory);
                    (gc_json(&out), ok, None)
                }
                (Task::GcCount, Mode::Terminating) => unreachable!("handled separately"),
            };
            if terminated == Some(true) {
                if first_terminated[p0].is_none() {
                    first_terminated[p0] = Some(round);
                }
                if !ok {
                    violations.push(format!(
                        "process {} terminated at round {round} with a wrong output",
                        p0 + 1
                    ));
                }
            }
            let mut record = json!({
                "type": "round",
                "round": round,
                "process": p0 + 1,
                "view": view_hash(view),
                "output": value,
            });
            if let Some(term) = terminated {
                record["terminated"] = json!(term);
            }
            trace_line(&mut trace, record);
            row.push(ok);
        }
        matches.push(row);
    })?;

    // First round from which outputs stay correct through the horizon.
    let mut stabilization_round = None;
    for round in (0..=horizon).rev() {
        if matches[round].iter().all(|&b| b) {
            stabilization_round = Some(round);
        } else {
            break;
        }
    }

    let (termination_round, bound_satisfied) = match spec.mode {
        Mode::Stabilizing => {
            let ok = stabilization_round.is_some_and(|r| r <= bound);
            (None, ok)
        }
        Mode::Terminating => {
            let all = first_terminated.iter().all(|t| t.is_some());
            let last = first_terminated.iter().filter_map(|&t| t).max();
            let ok = all && last.is_some_and(|r| r <= bound) && violations.is_empty();
            (last, ok)
        }
    };

    let oracle_checks = vec![
        "output-matches-ground-truth".to_string(),
        match spec.mode {
            Mode::Stabilizing => "stabilization-within-bound".to_string(),
            Mode::Terminating => "termination-within-bound".to_string(),
        },
    ];
    trace_line(
        &mut trace,
        json!({
            "type": "summary",
            "stabilization_round": stabilization_round,
            "termination_round": termination_round,
            "bound": bound,
            "bound_satisfied": bound_satisfied,
            "violations": violations,
        }),
    );
    Ok(RunReport {
        n,
        horizon,
        bound,
        stabilization_round,
        termination_round,
        bound_satisfied,
        oracle_checks,
        violations,
        trace,
    })
}

/// Terminating Generalized Counting: drive the counting certificate over
/// the block-reduced execution, one driver per process.
fn run_terminating_gc(
    schedule: &Schedule,
    inputs: &InputAssignment,
    spec: TaskSpec,
    horizon: usize,
    bound: usize,
    mut trace: String,
) -> Result<RunReport, anyhow::Error> {
    let n = schedule.n;
    let t_disc = spec.t_disc;
    let inventory = inputs.inventory();
    let reduced = block_reduce(schedule, t_disc);
    let reduced_horizon = horizon / t_disc;

    let mut violations: Vec<String> = Vec::new();
    let mut drivers: Vec<TerminatingGcDriver> =
        (0..n).map(|_| TerminatingGcDriver::new(spec.num_leaders)).collect();
    let mut committed: Vec<Option<usize>> = vec![None; n];

    sim::run(&reduced, inputs, reduced_horizon, |round, views| {
        // One counting run per distinct view.
        let mut cache: BTreeMap<Vec<u8>, CountingRun> = BTreeMap::new();
        for (p0, view) in views.iter().enumerate() {
            let run = cache
                .entry(view.canonical_form())
                .or_insert_with(|| counting_with_leaders_traced(view, spec.num_leaders));
            if let Some(count) = run.result {
                if count != n as u64 {
                    violations.push(format!(
                        "counting returned {count} != {n} at reduced round {round}"
                    ));
                }
            }
            let phases: Vec<_> = run
                .phases
                .iter()
                .map(|ph| json!({"s": ph.s, "x": ph.x, "code": ph.code, "t": ph.t}))
                .collect();
            trace_line(
                &mut trace,
                json!({
                    "type": "phases",
                    "reduced_round": round,
                    "process": p0 + 1,
                    "result": run.result,
                    "phases": phases,
                }),
            );
            if committed[p0].is_none() {
                let result = run.result;
                if let Some(output) = drivers[p0].step_with_count(round, view, result) {
                    committed[p0] = Some(round);
                    if output != inventory {
                        violations.push(format!(
                            "process {} committed a wrong inventory at reduced round {round}",
                            p0 + 1
                        ));
                    }
                    trace_line(
                        &mut trace,
                        json!({
                            "type": "commit",
                            "process": p0 + 1,
                            "reduced_round": round,
                            "original_round": round * t_disc,
                            "output": gc_json(&Some(output)),
                        }),
                    );
                }
            }
        }
    })?;

    let all = committed.iter().all(|c| c.is_some());
    if !all {
        violations.push("horizon exhausted before every process terminated".into());
    }
    let termination_round = committed.iter().filter_map(|&c| c).max().map(|r| r * t_disc);
    let bound_satisfied =
        all && termination_round.is_some_and(|r| r <= bound) && violations.is_empty();

    trace_line(
        &mut trace,
        json!({
            "type": "summary",
            "stabilization_round": serde_json::Value::Null,
            "termination_round": termination_round,
            "bound": bound,
            "bound_satisfied": bound_satisfied,
            "violations": violations,
        }),
    );
    Ok(RunReport {
        n,
        horizon,
        bound,
        stabilization_round: None,
        termination_round,
        bound_satisfied,
        oracle_checks: vec![
            "counting-sound-at-every-round".to_string(),
            "termination-within-bound".to_string(),
        ],
        violations,
        trace,
    })
}
