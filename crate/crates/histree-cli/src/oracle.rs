//! Independent oracles for checking the library against first principles.
//!
//! The partition oracle re-derives indistinguishability classes by plain
//! iterated refinement over process indices, with no history-tree code
//! involved. The embedding maps a view's nodes onto the ground-truth tree
//! so that true anonymities can be attached to transcript records.

use std::collections::BTreeMap;

use histree::history::{HistoryTree, NodeRef, View};
use histree::network::{InputAssignment, Schedule};

/// Classes of mutually indistinguishable processes per round, computed by
/// refinement: same input at round 0, and same multiset of neighbour
/// classes at each later round. Classes are sorted lists of 1-based
/// process indices; each round's partition is sorted by smallest member.
pub fn refinement_partitions(
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
) -> Vec<Vec<Vec<usize>>> {
    let n = schedule.n;
    let mut class_of: Vec<usize> = vec![0; n + 1];
    let mut by_input: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for p in 1..=n {
        by_input.entry(inputs.input(p)).or_default().push(p);
    }
    for (next, (_, members)) in by_input.into_iter().enumerate() {
        for p in members {
            class_of[p] = next;
        }
    }

    let normalize = |class_of: &[usize]| -> Vec<Vec<usize>> {
        let count = class_of[1..].iter().max().map(|m| m + 1).unwrap_or(0);
        let mut classes = vec![Vec::new(); count];
        for p in 1..=n {
            classes[class_of[p]].push(p);
        }
        classes.retain(|c| !c.is_empty());
        classes.sort_by_key(|c| c[0]);
        classes
    };

    let mut out = vec![normalize(&class_of)];
    for round in 1..=horizon {
        let graph = schedule.round(round);
        let mut keyed: BTreeMap<(usize, Vec<(usize, u64)>), Vec<usize>> = BTreeMap::new();
        for p in 1..=n {
            let mut observed: BTreeMap<usize, u64> = BTreeMap::new();
            for (q, mult) in graph.incident(p) {
                *observed.entry(class_of[q]).or_insert(0) += mult;
            }
            keyed
                .entry((class_of[p], observed.into_iter().collect()))
                .or_default()
                .push(p);
        }
        for (next, (_, members)) in keyed.into_iter().enumerate() {
            for p in members {
                class_of[p] = next;
            }
        }
        out.push(normalize(&class_of));
    }
    out
}

/// Ground-truth classes of a tree level in the oracle's normal form.
pub fn tree_partition(tree: &HistoryTree, level: i32) -> Vec<Vec<usize>> {
    let mut classes = tree.classes_at(level);
    classes.sort_by_key(|c| c[0]);
    classes
}

/// Maps every view node to the ground-truth node it denotes, by structural
/// descent: the root maps to the root, and a node maps to the unique child
/// of its parent's image with the same label and the same (mapped) red
/// in-edges. `None` when the view does not embed (which would mean the
/// view was not produced by this execution).
pub fn embed_view(tree: &HistoryTree, view: &View) -> Option<Vec<Vec<NodeRef>>> {
    let mut map: Vec<Vec<NodeRef>> = vec![vec![NodeRef::ROOT]];
    for level in 0..=view.top_level() {
        let mut row = Vec::with_capacity(view.level_size(level));
        for v in view.nodes_at(level) {
            let parent = view.parent(v).unwrap();
            let parent_image = map[parent.level as usize + 1][parent.rank];
            let mut red: Vec<(usize, u64)> = view
                .red_in(v)
                .map(|(s, m)| (map[s.level as usize + 1][s.rank].rank, m))
                .collect();
            red.sort_unstable();
            let image = tree.children(parent_image).find(|&c| {
                if tree.label(c) != view.label(v) {
                    return false;
                }
                let mut tree_red: Vec<(usize, u64)> =
                    tree.red_in(c).map(|(s, m)| (s.rank, m)).collect();
                tree_red.sort_unstable();
                tree_red == red
            })?;
            row.push(image);
        }
        map.push(row);
    }
    Some(map)
}

/// True ground-truth anonymity of a view node, via the embedding map.
pub fn anonymity_of(tree: &HistoryTree, map: &[Vec<NodeRef>], r: NodeRef) -> u64 {
    tree.anonymity(map[r.level as usize + 1][r.rank])
}
