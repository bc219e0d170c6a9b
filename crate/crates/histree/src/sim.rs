//! Synchronous execution of the per-process view-merging algorithm.
//!
//! Every process broadcasts its current view over all incident links each
//! round and merges what it receives. Task outputs are a pure function of
//! the view, so the simulator exposes views and leaves output bookkeeping
//! (including termination, which freezes a process's committed output but
//! never the view construction itself) to callers.

use std::collections::HashMap;

use crate::history::{merge_view, HistoryError, View};
use crate::network::{InputAssignment, Schedule};

/// Round-0 views: one per process, determined by its input alone.
pub fn initial_views(inputs: &InputAssignment) -> Vec<View> {
    inputs.inputs().iter().map(View::initial).collect()
}

/// Runs rounds `1..=horizon`, invoking `on_round` with the views after each
/// round, starting with round 0.
pub fn run(
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
    mut on_round: impl FnMut(usize, &[View]),
) -> Result<(), HistoryError> {
    inputs.validate_for(schedule)?;
    if horizon > schedule.num_rounds() {
        return Err(HistoryError::HorizonExceedsSchedule {
            horizon,
            rounds: schedule.num_rounds(),
        });
    }
    let n = schedule.n;
    let mut views = initial_views(inputs);
    on_round(0, &views);
    for round in 1..=horizon {
        let graph = schedule.round(round);
        let mut next = Vec::with_capacity(n);
        for p in 1..=n {
            // Equal views are one message kind; multiplicities add up.
            let mut grouped: HashMap<&View, u64> = HashMap::new();
            for (q, mult) in graph.incident(p) {
                *grouped.entry(&views[q - 1]).or_insert(0) += mult;
            }
            let received: Vec<(&View, u64)> = grouped.into_iter().collect();
            next.push(merge_view(&views[p - 1], &received)?);
        }
        views = next;
        on_round(round, &views);
    }
    Ok(())
}

/// All views, indexed `[round][process - 1]`.
pub fn collect_views(
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
) -> Result<Vec<Vec<View>>, HistoryError> {
    let mut out = Vec::with_capacity(horizon + 1);
    run(schedule, inputs, horizon, |_, views| out.push(views.to_vec()))?;
    Ok(out)
}

/// Runs a task function over every `(round, process)` view.
pub fn simulate<O>(
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
    mut task: impl FnMut(usize, usize, &View) -> O,
) -> Result<SimulationTrace<O>, HistoryError> {
    let mut outputs = Vec::with_capacity(horizon + 1);
    let mut final_views = Vec::new();
    run(schedule, inputs, horizon, |round, views| {
        outputs.push(
            views
                .iter()
                .enumerate()
                .map(|(p0, v)| task(round, p0 + 1, v))
                .collect(),
        );
        if round == horizon {
            final_views = views.to_vec();
        }
    })?;
    Ok(SimulationTrace { outputs, final_views })
}

pub struct SimulationTrace<O> {
    /// `outputs[round][process - 1]`.
    pub outputs: Vec<Vec<O>>,
    pub final_views: Vec<View>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{build_ground_truth, extract_view};
    use crate::network::{gen_random_schedule, ProcessInput, RoundGraph};

    #[test]
    fn single_process_is_a_strand() {
        let schedule = Schedule::new(1, vec![RoundGraph::new(); 5]).unwrap();
        let inputs = InputAssignment::new(vec![ProcessInput::new("z")]);
        let views = collect_views(&schedule, &inputs, 5).unwrap();
        for (round, row) in views.iter().enumerate() {
            let v = &row[0];
            assert_eq!(v.top_level(), round as i32);
            // One node per level.
            for level in -1..=v.top_level() {
                assert_eq!(v.level_size(level), 1);
            }
        }
    }

    #[test]
    fn constant_task_stays_constant() {
        let schedule = gen_random_schedule(4, 1, 3, 1);
        let inputs = InputAssignment::new(vec![ProcessInput::new("z"); 4]);
        let trace = simulate(&schedule, &inputs, 3, |_, _, _| 7u8).unwrap();
        assert!(trace.outputs.iter().flatten().all(|&o| o == 7));
    }

    #[test]
    fn same_ground_truth_node_means_equal_views() {
        let schedule = gen_random_schedule(6, 1, 6, 5);
        let inputs = InputAssignment::new(
            (0..6).map(|i| ProcessInput::new(if i < 3 { "a" } else { "b" })).collect(),
        );
        let horizon = 6;
        let tree = build_ground_truth(&schedule, &inputs, horizon).unwrap();
        let views = collect_views(&schedule, &inputs, horizon).unwrap();
        for round in 0..=horizon {
            for p in 1..=6 {
                for q in p + 1..=6 {
                    let same_node = tree.representative(p, round as i32)
                        == tree.representative(q, round as i32);
                    let same_view = views[round][p - 1] == views[round][q - 1];
                    assert_eq!(same_node, same_view, "round {round}, {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn simulated_views_match_extracted_views() {
        let schedule = gen_random_schedule(5, 2, 4, 8);
        let inputs = InputAssignment::new(
            (0..5).map(|i| ProcessInput::new(if i == 0 { "a" } else { "b" })).collect(),
        );
        let horizon = 8;
        let tree = build_ground_truth(&schedule, &inputs, horizon).unwrap();
        let views = collect_views(&schedule, &inputs, horizon).unwrap();
        for round in 0..=horizon {
            for p in 1..=5 {
                let extracted = extract_view(&tree, tree.representative(p, round as i32));
                assert_eq!(views[round][p - 1], extracted, "round {round}, process {p}");
            }
        }
    }

    #[test]
    fn horizon_exhaustion_is_an_error() {
        let schedule = gen_random_schedule(2, 1, 2, 0);
        let inputs = InputAssignment::new(vec![ProcessInput::new("z"); 2]);
        assert!(collect_views(&schedule, &inputs, 3).is_err());
    }
}
