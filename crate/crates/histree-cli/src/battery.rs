//! The invariant battery: parameterized sweeps that check stabilization and
//! termination bounds, output exactness, tree-oracle equivalence, the
//! equation-system properties, the per-guess bookkeeping of the counting
//! subroutine, the fixed network constructions, and trace determinism.
//!
//! Each check returns a `CheckReport`; the acceptance suite runs them at
//! the pinned parameters, `verify` runs them at user-selected scale.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use histree::equations::{find_equations, satisfied_by, system_rank};
use histree::history::{build_ground_truth, extract_view, HistoryTree, View};
use histree::leaderless::stabilizing_concentration;
use histree::leaders::{
    counting_with_leaders_traced, stabilizing_gc, ApproxTranscript, TerminatingGcDriver,
};
use histree::network::{
    block_reduce, gen_cycle_with_one_marked, gen_leader_ring, gen_random_inputs,
    gen_random_schedule, gen_scale_family, InputAssignment, ProcessInput, Schedule,
};
use histree::sim;

use crate::experiment::{
    run_experiment, true_concentration, ExperimentConfig, Family, Mode, Task,
};
use crate::oracle::{anonymity_of, embed_view, refinement_partitions, tree_partition};

const MAX_REPORTED_FAILURES: usize = 12;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub truncated_failures: usize,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            cases: 0,
            failures: Vec::new(),
            truncated_failures: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.truncated_failures == 0
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(detail());
            } else {
                self.truncated_failures += 1;
            }
        }
    }

    fn absorb(&mut self, other: CheckReport) {
        self.cases += other.cases;
        for f in other.failures {
            self.case(false, || f);
        }
        self.truncated_failures += other.truncated_failures;
    }

    pub fn summary_line(&self) -> String {
        if self.passed() {
            format!("PASS {} ({} cases)", self.name, self.cases)
        } else {
            format!(
                "FAIL {} ({} cases, {} failures): {}",
                self.name,
                self.cases,
                self.failures.len() + self.truncated_failures,
                self.failures.first().cloned().unwrap_or_default()
            )
        }
    }
}

fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = base ^ 0x9e3779b97f4a7c15;
    for &p in parts {
        h ^= p.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    }
    h
}

/// Shared per-run tree-oracle checks: refinement-oracle classes equal the
/// tree's, simulated views equal extracted views, the number of distinct
/// canonical forms per round equals the level width, and anonymities are
/// conserved.
fn tree_oracle_checks(
    tag: &str,
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
    tree: &HistoryTree,
    report: &mut CheckReport,
) {
    let n = schedule.n;
    let oracle = refinement_partitions(schedule, inputs, horizon);
    for level in 0..=horizon as i32 {
        report.case(tree_partition(tree, level) == oracle[level as usize], || {
            format!("{tag}: level {level} classes differ from the refinement oracle")
        });
        let total: u64 = tree.nodes_at(level).map(|r| tree.anonymity(r)).sum();
        report.case(total == n as u64, || {
            format!("{tag}: anonymities at level {level} sum to {total}, not {n}")
        });
    }
    let mut failures: Vec<String> = Vec::new();
    sim::run(schedule, inputs, horizon, |round, views| {
        let distinct: HashSet<Vec<u8>> = views.iter().map(|v| v.canonical_form()).collect();
        if distinct.len() != tree.level_size(round as i32) {
            failures.push(format!(
                "{tag}: round {round} has {} distinct views but {} classes",
                distinct.len(),
                tree.level_size(round as i32)
            ));
        }
        for (p0, view) in views.iter().enumerate() {
            let node = tree.representative(p0 + 1, round as i32);
            if &extract_view(tree, node) != view {
                failures.push(format!(
                    "{tag}: round {round} process {} view differs from the tree extraction",
                    p0 + 1
                ));
            }
        }
    })
    .expect("horizon fits schedule");
    report.cases += (horizon + 1) * (n + 1);
    for f in failures {
        report.case(false, || f);
    }
}

pub struct LeaderlessReports {
    pub stabilization: CheckReport,
    pub tree_oracle: CheckReport,
    pub equations: CheckReport,
}

/// Criterion sweep for leaderless stabilization: exact concentration at
/// every round from 2Tn on, plus tree-oracle equivalence and the
/// equation-system properties on the same runs.
pub fn leaderless_sweep(max_n: usize, ts: &[usize], trials: u64, seed: u64) -> LeaderlessReports {
    let mut configs = Vec::new();
    for n in 1..=max_n {
        for &t in ts {
            for trial in 0..trials {
                configs.push((n, t, trial));
            }
        }
    }
    let runs: Vec<(CheckReport, CheckReport, CheckReport)> = configs
        .par_iter()
        .map(|&(n, t, trial)| {
            let mut stab = CheckReport::new("");
            let mut oracle = CheckReport::new("");
            let mut equations = CheckReport::new("");
            let tag = format!("n={n} T={t} trial={trial}");
            let run_seed = mix_seed(seed, &[n as u64, t as u64, trial]);
            let blocks = 2 * n + 3;
            let schedule = gen_random_schedule(n, t, blocks, run_seed);
            let inputs = gen_random_inputs(n, &["0", "1", "2"], 0, mix_seed(run_seed, &[1]));
            let horizon = blocks * t;
            let tree = build_ground_truth(&schedule, &inputs, horizon).unwrap();
            let conc_truth = true_concentration(&inputs);

            tree_oracle_checks(&tag, &schedule, &inputs, horizon, &tree, &mut oracle);

            let threshold = 2 * t * n;
            sim::run(&schedule, &inputs, horizon, |round, views| {
                if round < threshold {
                    return;
                }
                for (p0, view) in views.iter().enumerate() {
                    let out = stabilizing_concentration(view);
                    stab.case(out.known() == Some(&conc_truth), || {
                        format!("{tag}: round {round} process {} not exact", p0 + 1)
                    });

                    match find_equations(view) {
                        None => equations.case(false, || {
                            format!("{tag}: round {round} process {} found no system", p0 + 1)
                        }),
                        Some(found) => {
                            let level = found.level;
                            let k = found.system.vars;
                            equations.case(level >= 0 && level as usize <= t * n, || {
                                format!("{tag}: system level {level} outside [0, Tn]")
                            });
                            equations.case(found.system.equations.len() == k - 1, || {
                                format!("{tag}: {} equations for {k} strands", found.system.equations.len())
                            });
                            equations.case(system_rank(&found.system) == k - 1, || {
                                format!("{tag}: rank below {} at level {level}", k - 1)
                            });
                            equations.case(
                                view.level_size(level) == tree.level_size(level),
                                || format!("{tag}: level {level} incomplete at round {round}"),
                            );
                            let truth: Vec<u64> =
                                tree.nodes_at(level).map(|r| tree.anonymity(r)).collect();
                            equations.case(satisfied_by(&found.system, &truth), || {
                                format!(
                                    "{tag}: true anonymities violate the system at level {level}"
                                )
                            });
                        }
                    }
                }
            })
            .unwrap();
            (stab, oracle, equations)
        })
        .collect();

    let mut out = LeaderlessReports {
        stabilization: CheckReport::new("leaderless stabilization exact from 2Tn"),
        tree_oracle: CheckReport::new("history-tree oracle equivalence"),
        equations: CheckReport::new("equation systems: level range, rank, satisfaction"),
    };
    for (a, b, c) in runs {
        out.stabilization.absorb(a);
        out.tree_oracle.absorb(b);
        out.equations.absorb(c);
    }
    out
}

/// Criterion sweep for the terminating concentration: every process commits
/// by T(n+N) and committed outputs are exact at every round.
pub fn terminating_concentration_sweep(
    max_n: usize,
    ts: &[usize],
    trials: u64,
    seed: u64,
) -> CheckReport {
    let mut configs = Vec::new();
    for n in 1..=max_n {
        for &t in ts {
            for extra in [0usize, 3] {
                for trial in 0..trials {
                    configs.push((n, t, extra, trial));
                }
            }
        }
    }
    let runs: Vec<CheckReport> = configs
        .par_iter()
        .map(|&(n, t, extra, trial)| {
            let mut report = CheckReport::new("");
            let size_bound = n + extra;
            let tag = format!("n={n} T={t} N={size_bound} trial={trial}");
            let run_seed = mix_seed(seed, &[n as u64, t as u64, extra as u64, trial, 2]);
            let config = ExperimentConfig {
                family: Family::Random { n, blocks: n + size_bound },
                task: Task::Concentration,
                mode: Mode::Terminating,
                t_disc: t,
                size_bound: Some(size_bound),
                num_leaders: 0,
                seed: run_seed,
                values: vec!["0".into(), "1".into(), "2".into()],
                horizon: None,
            };
            let result = run_experiment(&config).unwrap();
            report.case(result.violations.is_empty(), || {
                format!("{tag}: {}", result.violations.join("; "))
            });
            report.case(result.bound_satisfied, || {
                format!(
                    "{tag}: terminated at {:?}, bound {}",
                    result.termination_round, result.bound
                )
            });
            report
        })
        .collect();
    let mut out = CheckReport::new("terminating concentration: exact and within T(n+N)");
    for r in runs {
        out.absorb(r);
    }
    out
}

pub struct GcReports {
    pub stabilizing: CheckReport,
    pub terminating: CheckReport,
    pub soundness: CheckReport,
    pub lemma_clauses: CheckReport,
    pub tree_oracle: CheckReport,
}

/// Criterion sweep for the multi-leader algorithms, plus the per-invocation
/// transcript audit of the approximate-count subroutine.
pub fn gc_sweep(
    max_n: usize,
    leader_counts: &[u64],
    ts: &[usize],
    trials: u64,
    seed: u64,
) -> GcReports {
    let mut configs = Vec::new();
    for n in 1..=max_n {
        for &l in leader_counts {
            if l as usize > n {
                continue;
            }
            for &t in ts {
                for trial in 0..trials {
                    configs.push((n, l, t, trial));
                }
            }
        }
    }
    let runs: Vec<[CheckReport; 5]> = configs
        .par_iter()
        .map(|&(n, l, t, trial)| gc_run(n, l, t, trial, seed))
        .collect();

    let mut out = GcReports {
        stabilizing: CheckReport::new("stabilizing generalized counting exact from 2Tn"),
        terminating: CheckReport::new("terminating counting within (l^2+l+1)Tn, output exact"),
        soundness: CheckReport::new("counting soundness and monotonicity at every round"),
        lemma_clauses: CheckReport::new("approximate-count transcript audit"),
        tree_oracle: CheckReport::new("history-tree oracle equivalence (leader runs)"),
    };
    for [a, b, c, d, e] in runs {
        out.stabilizing.absorb(a);
        out.terminating.absorb(b);
        out.soundness.absorb(c);
        out.lemma_clauses.absorb(d);
        out.tree_oracle.absorb(e);
    }
    out
}

fn gc_run(n: usize, l: u64, t: usize, trial: u64, seed: u64) -> [CheckReport; 5] {
    let mut stabilizing = CheckReport::new("");
    let mut terminating = CheckReport::new("");
    let mut soundness = CheckReport::new("");
    let mut clauses = CheckReport::new("");
    let mut oracle = CheckReport::new("");
    let tag = format!("n={n} l={l} T={t} trial={trial}");
    let run_seed = mix_seed(seed, &[n as u64, l, t as u64, trial, 3]);

    let blocks = ((l * l + l + 1) as usize) * n;
    let schedule = gen_random_schedule(n, t, blocks, run_seed);
    let inputs = gen_random_inputs(n, &["a", "b"], l as usize, mix_seed(run_seed, &[4]));
    let inventory = inputs.inventory();
    let horizon = blocks * t;
    let bound = horizon;

    // Raw leg: stabilizing outputs plus tree-oracle equivalence.
    let tree = build_ground_truth(&schedule, &inputs, horizon).unwrap();
    tree_oracle_checks(&tag, &schedule, &inputs, horizon, &tree, &mut oracle);
    let threshold = 2 * t * n;
    sim::run(&schedule, &inputs, horizon, |round, views| {
        if round < threshold {
            return;
        }
        for (p0, view) in views.iter().enumerate() {
            let out = stabilizing_gc(view, l);
            stabilizing.case(out.as_ref() == Some(&inventory), || {
                format!("{tag}: round {round} process {} not exact", p0 + 1)
            });
        }
    })
    .unwrap();

    // Reduced leg: terminating driver, soundness, and transcript audit.
    let reduced = block_reduce(&schedule, t);
    let reduced_horizon = blocks;
    let rtree = build_ground_truth(&reduced, &inputs, reduced_horizon).unwrap();
    tree_oracle_checks(
        &format!("{tag} reduced"),
        &reduced,
        &inputs,
        reduced_horizon,
        &rtree,
        &mut oracle,
    );

    let mut drivers: Vec<TerminatingGcDriver> =
        (0..n).map(|_| TerminatingGcDriver::new(l)).collect();
    let mut committed: Vec<Option<usize>> = vec![None; n];
    let mut last_result: Vec<Option<u64>> = vec![None; n];

    sim::run(&reduced, &inputs, reduced_horizon, |round, views| {
        let mut cache: BTreeMap<Vec<u8>, (Option<u64>, bool)> = BTreeMap::new();
        for (p0, view) in views.iter().enumerate() {
            let key = view.canonical_form();
            let (result, _audited) = match cache.get(&key) {
                Some(&entry) => entry,
                None => {
                    let run = counting_with_leaders_traced(view, l);
                    if let Some(count) = run.result {
                        soundness.case(count == n as u64, || {
                            format!(
                                "{tag}: counting returned {count} != {n} at reduced round {round}"
                            )
                        });
                    }
                    audit_transcripts(
                        &tag,
                        view,
                        &rtree,
                        n,
                        l,
                        &run.transcripts,
                        &mut clauses,
                    );
                    cache.insert(key.clone(), (run.result, true));
                    (run.result, true)
                }
            };
            // Monotone safety: once the count is returned it stays returned.
            if last_result[p0].is_some() {
                soundness.case(result.is_some(), || {
                    format!(
                        "{tag}: process {} lost its count at reduced round {round}",
                        p0 + 1
                    )
                });
            }
            last_result[p0] = result;
            if committed[p0].is_none() {
                if let Some(output) = drivers[p0].step_with_count(round, view, result) {
                    committed[p0] = Some(round);
                    terminating.case(output == inventory, || {
                        format!(
                            "{tag}: process {} committed a wrong inventory at reduced round {round}",
                            p0 + 1
                        )
                    });
                }
            }
        }
    })
    .unwrap();

    terminating.case(committed.iter().all(|c| c.is_some()), || {
        format!("{tag}: some process never terminated within the bound horizon")
    });
    let last = committed.iter().filter_map(|&c| c).max().map(|r| r * t);
    terminating.case(last.is_some_and(|r| r <= bound), || {
        format!("{tag}: terminated at {last:?} beyond bound {bound}")
    });

    [stabilizing, terminating, soundness, clauses, oracle]
}

/// Per-invocation audit: the technical clauses of the approximate-count
/// analysis on every transcript, plus guess and counted-value soundness on
/// invocations whose whole working region is complete in the view (the
/// regime in which those values are meaningful).
fn audit_transcripts(
    tag: &str,
    view: &View,
    rtree: &HistoryTree,
    n: usize,
    l: u64,
    transcripts: &[ApproxTranscript],
    report: &mut CheckReport,
) {
    let embedding = embed_view(rtree, view);
    let current = view.top_level();
    let n_i32 = n as i32;
    for tr in transcripts {
        let s = tr.seed_level;
        let t_res = tr.result.level;
        let code = tr.result.code.as_i64();

        // Clause (i): with enough levels, the reported level stays within
        // the phase window.
        if current >= s + (l as i32 + 2) * n_i32 - 1 {
            report.case(s <= t_res && t_res <= s + (l as i32 + 1) * n_i32 - 1, || {
                format!("{tag}: clause(i) violated: s={s} t={t_res}")
            });
        }

        report.case(tr.well_spread_violations == 0, || {
            format!("{tag}: well-spread violated in invocation at s={s}")
        });

        let (Some(tau), Some(map)) = (tr.tau, embedding.as_ref()) else {
            continue;
        };
        let a_tau = anonymity_of(rtree, map, tau);
        let x = tr.seed_anonymity;

        // Clause (ii): a correct seed with enough slack never reports a
        // leader-sum mismatch.
        if x == a_tau && current >= t_res + n_i32 {
            report.case(code != -3, || {
                format!("{tag}: clause(ii) violated at s={s} x={x}")
            });
        }
        // Clause (iii): certified positive estimates are exact.
        if x >= a_tau && code > 0 && current >= t_res + code as i32 {
            report.case(code == n as i64, || {
                format!("{tag}: clause(iii) violated: estimate {code} != {n}")
            });
        }

        // Value soundness holds when every level the invocation touched is
        // complete, i.e. the guess data cannot be missing tree nodes.
        let touched = tr
            .counted
            .iter()
            .map(|c| c.node.level)
            .chain(tr.guesses.iter().map(|g| g.node.level))
            .max()
            .unwrap_or(s);
        let certified = (0..=touched)
            .all(|level| view.level_size(level) == rtree.level_size(level));
        if !certified {
            continue;
        }
        for g in &tr.guesses {
            let true_a = anonymity_of(rtree, map, g.node);
            report.case(g.guess * a_tau >= x * true_a, || {
                format!(
                    "{tag}: guess {} under conditional anonymity {}*{}/{} at level {}",
                    g.guess, x, true_a, a_tau, g.node.level
                )
            });
            let no_siblings = view
                .parent(g.node)
                .is_some_and(|p| view.child_count(p) == 1);
            if no_siblings {
                report.case(g.guess * a_tau == x * true_a, || {
                    format!("{tag}: sibling-free guess not exact at level {}", g.node.level)
                });
            }
        }
        for c in &tr.counted {
            let true_a = anonymity_of(rtree, map, c.node);
            report.case(c.cond_anonymity * a_tau == x * true_a, || {
                format!(
                    "{tag}: counted value {} != {}*{}/{} at level {}",
                    c.cond_anonymity, x, true_a, a_tau, c.node.level
                )
            });
        }
        // Locked levels stay below the conditional size of the system.
        report.case((tr.max_locked_levels as u64) * a_tau <= x * n as u64, || {
            format!(
                "{tag}: {} locked levels exceeds delta*n = {}*{}/{}",
                tr.max_locked_levels, x, n, a_tau
            )
        });
    }
}

/// Criterion checks for the fixed constructions: view isomorphism across
/// scaled copies, across ring sizes for leaders, and between the marked
/// cycle and its companion 3-cycle within the information-theoretic window.
pub fn construction_checks() -> CheckReport {
    let mut report = CheckReport::new("construction families: view isomorphism");
    let rounds = 15;

    // Scaled k-partite family: per input class, all processes' views are
    // isomorphic at every round, for every scale factor.
    let mut per_class: BTreeMap<(String, usize), Vec<u8>> = BTreeMap::new();
    for alpha in [1usize, 2, 3] {
        let (schedule, inputs) = gen_scale_family(&[3, 4], alpha, rounds).unwrap();
        sim::run(&schedule, &inputs, rounds, |round, views| {
            for (p0, view) in views.iter().enumerate() {
                let class = inputs.input(p0 + 1).value.clone();
                let canon = view.canonical_form();
                match per_class.entry((class.clone(), round)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(canon);
                    }
                    std::collections::btree_map::Entry::Occupied(e) => {
                        report.case(e.get() == &canon, || {
                            format!(
                                "scale family: class {class} round {round} alpha {alpha} differs"
                            )
                        });
                    }
                }
            }
        })
        .unwrap();
    }

    // Leader rings with the same leader/process ratio: leaders cannot tell
    // the ring sizes apart.
    let mut leader_canon: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
    for i in [3usize, 4] {
        let (schedule, inputs) = gen_leader_ring(3, i, rounds).unwrap();
        sim::run(&schedule, &inputs, rounds, |round, views| {
            for (p0, view) in views.iter().enumerate() {
                if !inputs.input(p0 + 1).leader {
                    continue;
                }
                let canon = view.canonical_form();
                match leader_canon.entry(round) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(canon);
                    }
                    std::collections::btree_map::Entry::Occupied(e) => {
                        report.case(e.get() == &canon, || {
                            format!("leader ring: round {round} i={i} leader view differs")
                        });
                    }
                }
            }
        })
        .unwrap();
    }

    // Marked cycle with t = 3: the process at distance t from the marked
    // one sees views isomorphic to the all-zero 3-cycle's through round
    // t - 1 and diverges at round t, when the marked input first reaches
    // it; the antipodal process (distance t + 1) stays isomorphic through
    // round t.
    let t = 3usize;
    let ((schedule, inputs), (schedule3, inputs3)) = gen_cycle_with_one_marked(t);
    let views = sim::collect_views(&schedule, &inputs, t + 1).unwrap();
    let views3 = sim::collect_views(&schedule3, &inputs3, t + 1).unwrap();
    for round in 0..t {
        report.case(views[round][t] == views3[round][0], || {
            format!("marked cycle: p_(t+1) differs from 3-cycle at round {round}")
        });
    }
    report.case(views[t][t] != views3[t][0], || {
        format!("marked cycle: p_(t+1) still isomorphic at round {t}")
    });
    for round in 0..=t {
        report.case(views[round][t + 1] == views3[round][0], || {
            format!("marked cycle: antipode differs from 3-cycle at round {round}")
        });
    }

    report
}

/// Criterion check for determinism: identical configs yield byte-identical
/// traces; a different seed changes the trace.
pub fn determinism_checks(seed: u64) -> CheckReport {
    let mut report = CheckReport::new("byte-identical traces for identical configs");
    let configs = vec![
        ExperimentConfig {
            family: Family::Random { n: 5, blocks: 13 },
            task: Task::Average,
            mode: Mode::Stabilizing,
            t_disc: 2,
            size_bound: None,
            num_leaders: 0,
            seed: mix_seed(seed, &[7]),
            values: vec!["0".into(), "1".into()],
            horizon: None,
        },
        ExperimentConfig {
            family: Family::Random { n: 4, blocks: 11 },
            task: Task::Concentration,
            mode: Mode::Terminating,
            t_disc: 1,
            size_bound: Some(7),
            num_leaders: 0,
            seed: mix_seed(seed, &[8]),
            values: vec!["a".into(), "b".into()],
            horizon: None,
        },
        ExperimentConfig {
            family: Family::Random { n: 4, blocks: 12 },
            task: Task::GcCount,
            mode: Mode::Terminating,
            t_disc: 1,
            size_bound: None,
            num_leaders: 1,
            seed: mix_seed(seed, &[9]),
            values: vec!["a".into(), "b".into()],
            horizon: None,
        },
        ExperimentConfig {
            family: Family::MarkedCycle { t: 2 },
            task: Task::Average,
            mode: Mode::Stabilizing,
            t_disc: 1,
            size_bound: None,
            num_leaders: 0,
            seed: 0,
            values: vec![],
            horizon: None,
        },
    ];
    for (idx, config) in configs.iter().enumerate() {
        let first = run_experiment(config).unwrap();
        let second = run_experiment(config).unwrap();
        report.case(first.trace == second.trace, || {
            format!("config {idx}: repeated run produced a different trace")
        });
        report.case(first.bound_satisfied && first.violations.is_empty(), || {
            format!("config {idx}: run failed its own checks: {:?}", first.violations)
        });
        let mut reseeded = config.clone();
        reseeded.seed ^= 0x55;
        if matches!(reseeded.family, Family::Random { .. }) {
            let third = run_experiment(&reseeded).unwrap();
            report.case(first.trace != third.trace, || {
                format!("config {idx}: different seed left the trace unchanged")
            });
        }
    }
    report
}

/// Number of (round, process) pairs at which a counting function returns a
/// wrong value on the given run. Exists so a deliberately broken variant
/// can demonstrate that the battery catches unsoundness.
pub fn counting_soundness_violations(
    schedule: &Schedule,
    inputs: &InputAssignment,
    num_leaders: u64,
    horizon: usize,
    counting: impl Fn(&View, u64) -> Option<u64>,
) -> usize {
    let n = schedule.n as u64;
    let mut violations = 0;
    sim::run(schedule, inputs, horizon, |_, views| {
        for view in views {
            if let Some(m) = counting(view, num_leaders) {
                if m != n {
                    violations += 1;
                }
            }
        }
    })
    .unwrap();
    violations
}

/// The full battery at configurable scale; `verify` drives this.
pub fn verify_suite(
    max_n: usize,
    max_t: usize,
    max_leaders: u64,
    trials: u64,
    seed: u64,
) -> Vec<CheckReport> {
    let ts: Vec<usize> = (1..=max_t).collect();
    let leader_counts: Vec<u64> = (1..=max_leaders).collect();
    let mut reports = Vec::new();

    let leaderless = leaderless_sweep(max_n, &ts, trials, seed);
    reports.push(leaderless.stabilization);
    reports.push(leaderless.tree_oracle);
    reports.push(leaderless.equations);

    reports.push(terminating_concentration_sweep(max_n, &ts, trials, seed));

    if max_leaders >= 1 {
        let gc = gc_sweep(max_n.min(6), &leader_counts, &ts, trials, seed);
        reports.push(gc.stabilizing);
        reports.push(gc.terminating);
        reports.push(gc.soundness);
        reports.push(gc.lemma_clauses);
        reports.push(gc.tree_oracle);
    }

    reports.push(construction_checks());
    reports.push(determinism_checks(seed));
    reports
}
