//! Command-line front end: schedule generation, simulation with JSONL
//! traces, DOT export, and the self-check battery.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use histree::equations::find_equations;
use histree::history::build_ground_truth;
use histree::network::{
    gen_random_schedule, validate_disconnectivity, InputAssignment, Schedule,
};
use histree::sim;
use histree_cli::battery::verify_suite;
use histree_cli::experiment::{run_experiment, ExperimentConfig, Family, Mode, Task};

#[derive(Parser)]
#[command(name = "histree", version, about = "Anonymous dynamic network simulator")]
struct Cli {
    /// Worker threads for sweeps (default: HISTREE_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a schedule (and inputs, for the fixed families) as JSON.
    GenSchedule(GenScheduleArgs),
    /// Simulate a task over a network and write a JSONL trace.
    Simulate(SimulateArgs),
    /// Export a view or the ground-truth history tree as Graphviz DOT.
    ExportDot(ExportDotArgs),
    /// Run the invariant battery; exits 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    Scale,
    LeaderRing,
    MarkedCycle,
}

#[derive(Args)]
struct GenScheduleArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Process count (random family).
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Dynamic disconnectivity of the generated schedule.
    #[arg(long = "T", default_value_t = 1)]
    t_disc: usize,
    /// Number of T-round blocks (random family).
    #[arg(long, default_value_t = 10)]
    blocks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partite set sizes (scale family), e.g. 3,4.
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    partite_sizes: Vec<usize>,
    /// Copy count (scale family).
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    /// Ratio denominator (leader-ring family).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Leader count (leader-ring family).
    #[arg(long, default_value_t = 3)]
    i: usize,
    /// Marked-cycle parameter t (cycle has 2t+2 processes).
    #[arg(long, default_value_t = 2)]
    t_marked: usize,
    /// Rounds for static families.
    #[arg(long, default_value_t = 15)]
    rounds: usize,
    /// Values for random inputs.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    values: Vec<String>,
    /// Leader flags assigned to this many random processes.
    #[arg(long, default_value_t = 0)]
    leaders: usize,
    /// Schedule output path.
    #[arg(long)]
    out: PathBuf,
    /// Inputs output path (optional for the random family).
    #[arg(long)]
    inputs_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Concentration,
    Average,
    GcCount,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Stabilizing,
    Terminating,
}

#[derive(Args)]
struct SimulateArgs {
    /// Schedule JSON file (alternative: --family random generation).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Inputs JSON file.
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Dynamic disconnectivity the run is judged against.
    #[arg(long = "T", default_value_t = 1)]
    t_disc: usize,
    /// Known size bound N (terminating concentration/average).
    #[arg(long = "N")]
    size_bound: Option<usize>,
    /// Known leader count (counting task).
    #[arg(long, default_value_t = 0)]
    leaders: u64,
    /// Simulation horizon in rounds (default: the task's round bound).
    #[arg(long)]
    horizon: Option<usize>,
    /// Inline random generation instead of files.
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    values: Vec<String>,
    /// Trace output path (JSONL).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    inputs: PathBuf,
    /// Round whose state to export.
    #[arg(long)]
    round: usize,
    /// Export the ground-truth tree instead of a process view.
    #[arg(long, default_value_t = false)]
    ground_truth: bool,
    /// Process whose view to export (1-based) when not --ground-truth.
    #[arg(long, default_value_t = 1)]
    process: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long = "max-T", default_value_t = 2)]
    max_t: usize,
    #[arg(long, default_value_t = 2)]
    max_leaders: u64,
    #[arg(long, default_value_t = 20)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the equation system extracted from a sample run's final views.
    #[arg(long, default_value_t = false)]
    dump_systems: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .or_else(|| std::env::var("HISTREE_JOBS").ok().and_then(|v| v.parse().ok()));
    if let Some(jobs) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn read_network(
    schedule: &PathBuf,
    inputs: &PathBuf,
) -> anyhow::Result<(Schedule, InputAssignment)> {
    let schedule = Schedule::from_json(&std::fs::read_to_string(schedule)?)?;
    let inputs = InputAssignment::from_json(&std::fs::read_to_string(inputs)?)?;
    inputs.validate_for(&schedule)?;
    Ok((schedule, inputs))
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::GenSchedule(args) => gen_schedule(args),
        Command::Simulate(args) => simulate(args),
        Command::ExportDot(args) => export_dot(args),
        Command::Verify(args) => verify(args),
    }
}

fn gen_schedule(args: GenScheduleArgs) -> anyhow::Result<ExitCode> {
    let (schedule, inputs) = match args.family {
        FamilyArg::Random => {
            let schedule = gen_random_schedule(args.n, args.t_disc, args.blocks, args.seed);
            let inputs = if args.inputs_out.is_some() {
                let values: Vec<&str> = args.values.iter().map(|s| s.as_str()).collect();
                Some(histree::network::gen_random_inputs(
                    args.n,
                    &values,
                    args.leaders,
                    args.seed ^ 0x9e3779b97f4a7c15,
                ))
            } else {
                None
            };
            (schedule, inputs)
        }
        FamilyArg::Scale => {
            let (s, i) =
                histree::network::gen_scale_family(&args.partite_sizes, args.alpha, args.rounds)?;
            (s, Some(i))
        }
        FamilyArg::LeaderRing => {
            let (s, i) = histree::network::gen_leader_ring(args.k, args.i, args.rounds)?;
            (s, Some(i))
        }
        FamilyArg::MarkedCycle => {
            let ((s, i), _) = histree::network::gen_cycle_with_one_marked(args.t_marked);
            (s, Some(i))
        }
    };
    if !matches!(args.family, FamilyArg::Random) || args.t_disc <= schedule.num_rounds() {
        if !validate_disconnectivity(&schedule, args.t_disc.max(1))? {
            anyhow::bail!("generated schedule is not {}-interval-disconnected", args.t_disc);
        }
    }
    std::fs::write(&args.out, schedule.to_json())?;
    if let (Some(path), Some(inputs)) = (&args.inputs_out, &inputs) {
        std::fs::write(path, inputs.to_json())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let task = match args.task {
        TaskArg::Concentration => Task::Concentration,
        TaskArg::Average => Task::Average,
        TaskArg::GcCount => Task::GcCount,
    };
    let mode = match args.mode {
        ModeArg::Stabilizing => Mode::Stabilizing,
        ModeArg::Terminating => Mode::Terminating,
    };

    let report = if let (Some(schedule), Some(inputs)) = (&args.schedule, &args.inputs) {
        let (schedule, inputs) = read_network(schedule, inputs)?;
        histree_cli::experiment::run_on_network(
            &schedule,
            &inputs,
            task,
            mode,
            args.t_disc,
            args.size_bound,
            args.leaders,
            args.horizon,
        )?
    } else {
        if args.n == 0 {
            anyhow::bail!("either --schedule/--inputs files or --n for inline generation");
        }
        let config = ExperimentConfig {
            family: Family::Random { n: args.n, blocks: suggested_blocks(&args) },
            task,
            mode,
            t_disc: args.t_disc,
            size_bound: args.size_bound,
            num_leaders: args.leaders,
            seed: args.seed,
            values: args.values.clone(),
            horizon: args.horizon,
        };
        run_experiment(&config)?
    };

    std::fs::write(&args.out, &report.trace)?;
    eprintln!(
        "bound {} {}; stabilization {:?}; termination {:?}",
        report.bound,
        if report.bound_satisfied { "satisfied" } else { "VIOLATED" },
        report.stabilization_round,
        report.termination_round,
    );
    if report.bound_satisfied && report.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        Ok(ExitCode::from(1))
    }
}

fn suggested_blocks(args: &SimulateArgs) -> usize {
    let n = args.n;
    match (args.task, args.mode) {
        (_, ModeArg::Stabilizing) => 2 * n + 2,
        (TaskArg::Concentration | TaskArg::Average, ModeArg::Terminating) => {
            n + args.size_bound.unwrap_or(n)
        }
        (TaskArg::GcCount, ModeArg::Terminating) => {
            let l = args.leaders.max(1) as usize;
            (l * l + l + 1) * n
        }
    }
}

fn export_dot(args: ExportDotArgs) -> anyhow::Result<ExitCode> {
    let (schedule, inputs) = read_network(&args.schedule, &args.inputs)?;
    if args.round > schedule.num_rounds() {
        anyhow::bail!(
            "round {} beyond the schedule's {} rounds",
            args.round,
            schedule.num_rounds()
        );
    }
    let dot = if args.ground_truth {
        let tree = build_ground_truth(&schedule, &inputs, args.round)?;
        histree::dot::tree_to_dot(&tree)
    } else {
        if args.process < 1 || args.process > schedule.n {
            anyhow::bail!("process {} outside 1..={}", args.process, schedule.n);
        }
        let views = sim::collect_views(&schedule, &inputs, args.round)?;
        histree::dot::view_to_dot(&views[args.round][args.process - 1])
    };
    std::fs::write(&args.out, dot)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let reports = verify_suite(args.max_n, args.max_t, args.max_leaders, args.trials, args.seed);
    let mut ok = true;
    for report in &reports {
        println!("{}", report.summary_line());
        ok &= report.passed();
    }
    if args.dump_systems {
        let n = args.max_n.max(2);
        let schedule = gen_random_schedule(n, 1, 2 * n + 2, args.seed);
        let inputs = histree::network::gen_random_inputs(n, &["0", "1"], 0, args.seed ^ 1);
        let views = sim::collect_views(&schedule, &inputs, 2 * n + 2)?;
        for (p0, view) in views[2 * n + 2].iter().enumerate() {
            match find_equations(view) {
                None => println!("process {}: no system found", p0 + 1),
                Some(found) => {
                    println!(
                        "process {}: level {} in {} variables",
                        p0 + 1,
                        found.level,
                        found.system.vars
                    );
                    for eq in &found.system.equations {
                        println!("  {eq}");
                    }
                }
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
