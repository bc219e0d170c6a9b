//! History trees and views.
//!
//! A history tree is a levelled structure whose level-`t` nodes stand for
//! classes of processes that are indistinguishable at the end of round `t`.
//! Black edges connect each node to the class it refines (its parent); red
//! multi-edges record how many messages a class received from a
//! previous-level class. A *view* is the finite part of the tree a single
//! process can know: the nodes reachable from its current node by ascending
//! (strictly level-decreasing) black or red steps.
//!
//! Both trees and views are stored in canonical per-level order: a node's
//! sort key is `(label, parent rank, red in-edge list)`, which only refers
//! to ranks of the already-ordered previous level. Two views are isomorphic
//! exactly when their canonical storage is equal, so `View` equality and
//! hashing are structural isomorphism tests.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::network::{InputAssignment, NetworkError, ProcessInput, Schedule};

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("viewpoint levels differ: own is {own}, received is {received}")]
    LevelMismatch { own: i32, received: i32 },
    #[error("horizon {horizon} exceeds schedule length {rounds}")]
    HorizonExceedsSchedule { horizon: usize, rounds: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Address of a node: level (`-1` for the root) and rank in that level's
/// canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeRef {
    pub level: i32,
    pub rank: usize,
}

impl NodeRef {
    pub const ROOT: NodeRef = NodeRef { level: -1, rank: 0 };
}

/// Per-node payload. `parent` and `red_in` store ranks into the previous
/// level; `children` stores ranks into the next level. Red edges are kept
/// only as in-edges on the lower node; the upper endpoint's perspective is
/// derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct NodeData {
    label: Option<ProcessInput>,
    parent: usize,
    red_in: Vec<(usize, u64)>,
    children: Vec<usize>,
}

/// Levelled node store shared by trees and views. `levels[d]` holds level
/// `d - 1`, so `levels[0]` is the root level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct Dag {
    levels: Vec<Vec<NodeData>>,
}

impl Dag {
    fn depth_of(level: i32) -> usize {
        (level + 1) as usize
    }

    fn node(&self, r: NodeRef) -> &NodeData {
        &self.levels[Self::depth_of(r.level)][r.rank]
    }

    /// Highest populated level (`-1` when only the root exists).
    fn top_level(&self) -> i32 {
        self.levels.len() as i32 - 2
    }

    fn level_size(&self, level: i32) -> usize {
        let d = Self::depth_of(level);
        if d >= self.levels.len() {
            0
        } else {
            self.levels[d].len()
        }
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for level in &self.levels {
            push_u32(&mut out, level.len() as u32);
            for node in level {
                match &node.label {
                    None => out.push(0),
                    Some(l) => {
                        out.push(if l.leader { 2 } else { 1 });
                        push_u32(&mut out, l.value.len() as u32);
                        out.extend_from_slice(l.value.as_bytes());
                    }
                }
                push_u32(&mut out, node.parent as u32);
                push_u32(&mut out, node.red_in.len() as u32);
                for &(src, mult) in &node.red_in {
                    push_u32(&mut out, src as u32);
                    out.extend_from_slice(&mult.to_le_bytes());
                }
            }
        }
        out
    }
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

// --- Raw (pre-canonical) construction ---------------------------------------

/// Node under construction, with parent and red sources as raw indices.
#[derive(Debug, Clone)]
struct RawNode {
    level: i32,
    label: Option<ProcessInput>,
    parent: Option<usize>,
    red_in: Vec<(usize, u64)>,
}

#[derive(Debug, Default)]
struct RawDag {
    nodes: Vec<RawNode>,
}

impl RawDag {
    fn with_root() -> Self {
        RawDag {
            nodes: vec![RawNode { level: -1, label: None, parent: None, red_in: Vec::new() }],
        }
    }

    fn push(&mut self, node: RawNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Orders every level canonically and produces the final storage plus
    /// the raw-index-to-address map.
    fn canonicalize(self) -> (Dag, Vec<NodeRef>) {
        let max_depth = self
            .nodes
            .iter()
            .map(|n| Dag::depth_of(n.level))
            .max()
            .unwrap_or(0);
        let mut by_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
        for (id, node) in self.nodes.iter().enumerate() {
            by_depth[Dag::depth_of(node.level)].push(id);
        }

        let mut address = vec![NodeRef::ROOT; self.nodes.len()];
        let mut levels: Vec<Vec<NodeData>> = Vec::with_capacity(by_depth.len());
        for (depth, ids) in by_depth.into_iter().enumerate() {
            let level = depth as i32 - 1;
            let mut keyed: Vec<(NodeKey, usize)> = ids
                .into_iter()
                .map(|id| {
                    let raw = &self.nodes[id];
                    let parent = raw.parent.map(|p| address[p].rank).unwrap_or(usize::MAX);
                    let mut red: Vec<(usize, u64)> =
                        raw.red_in.iter().map(|&(s, m)| (address[s].rank, m)).collect();
                    red.sort_unstable();
                    (NodeKey { label: raw.label.clone(), parent, red }, id)
                })
                .collect();
            keyed.sort();
            let mut nodes = Vec::with_capacity(keyed.len());
            for (rank, (key, id)) in keyed.into_iter().enumerate() {
                debug_assert!(
                    rank == 0 || nodes[rank - 1] != node_from_key(&key),
                    "duplicate canonical key at level {level}"
                );
                address[id] = NodeRef { level, rank };
                nodes.push(node_from_key(&key));
            }
            levels.push(nodes);
        }

        // Fill derived children lists; ranks arrive in ascending order.
        for depth in 1..levels.len() {
            let (parents, childs) = levels.split_at_mut(depth);
            let parents = parents.last_mut().unwrap();
            for (rank, node) in childs[0].iter().enumerate() {
                parents[node.parent].children.push(rank);
            }
        }
        (Dag { levels }, address)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct NodeKey {
    label: Option<ProcessInput>,
    parent: usize,
    red: Vec<(usize, u64)>,
}

fn node_from_key(key: &NodeKey) -> NodeData {
    NodeData {
        label: key.label.clone(),
        parent: key.parent,
        red_in: key.red.clone(),
        children: Vec::new(),
    }
}

// --- Views -------------------------------------------------------------------

/// A process's knowledge at some round: an ascending-closed subgraph of a
/// history tree with a single deepest node, the viewpoint. Equality and
/// hashing compare canonical forms, i.e. they test isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct View {
    dag: Dag,
}

impl View {
    /// The round-0 view: root plus one labelled node.
    pub fn initial(input: &ProcessInput) -> View {
        let mut raw = RawDag::with_root();
        raw.push(RawNode {
            level: 0,
            label: Some(input.clone()),
            parent: Some(0),
            red_in: Vec::new(),
        });
        let (dag, _) = raw.canonicalize();
        View { dag }
    }

    pub fn top_level(&self) -> i32 {
        self.dag.top_level()
    }

    pub fn viewpoint(&self) -> NodeRef {
        let level = self.top_level();
        debug_assert_eq!(self.dag.level_size(level), 1, "viewpoint level must be a singleton");
        NodeRef { level, rank: 0 }
    }

    pub fn level_size(&self, level: i32) -> usize {
        self.dag.level_size(level)
    }

    pub fn nodes_at(&self, level: i32) -> impl Iterator<Item = NodeRef> + '_ {
        (0..self.level_size(level)).map(move |rank| NodeRef { level, rank })
    }

    /// `None` exactly for the root.
    pub fn label(&self, r: NodeRef) -> Option<&ProcessInput> {
        self.dag.node(r).label.as_ref()
    }

    pub fn parent(&self, r: NodeRef) -> Option<NodeRef> {
        if r.level == -1 {
            None
        } else {
            Some(NodeRef { level: r.level - 1, rank: self.dag.node(r).parent })
        }
    }

    pub fn children(&self, r: NodeRef) -> impl Iterator<Item = NodeRef> + '_ {
        let level = r.level + 1;
        self.dag.node(r).children.iter().map(move |&rank| NodeRef { level, rank })
    }

    pub fn child_count(&self, r: NodeRef) -> usize {
        self.dag.node(r).children.len()
    }

    /// Red in-edges of `r`: `(source at level r.level - 1, multiplicity)`.
    pub fn red_in(&self, r: NodeRef) -> impl Iterator<Item = (NodeRef, u64)> + '_ {
        let level = r.level - 1;
        self.dag
            .node(r)
            .red_in
            .iter()
            .map(move |&(rank, mult)| (NodeRef { level, rank }, mult))
    }

    /// Multiplicity of the red edge between `r` and a node of the previous
    /// level (0 when absent).
    pub fn red_in_mult(&self, r: NodeRef, source: NodeRef) -> u64 {
        debug_assert_eq!(source.level, r.level - 1);
        self.dag
            .node(r)
            .red_in
            .iter()
            .find(|&&(rank, _)| rank == source.rank)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    /// Byte encoding equal for two views iff they are isomorphic.
    pub fn canonical_form(&self) -> Vec<u8> {
        self.dag.canonical_bytes()
    }

    pub fn node_count(&self) -> usize {
        self.dag.levels.iter().map(|l| l.len()).sum()
    }

    /// Level-0 ancestor of a node at level >= 0.
    pub fn root_class_of(&self, mut r: NodeRef) -> NodeRef {
        assert!(r.level >= 0);
        while r.level > 0 {
            r = self.parent(r).unwrap();
        }
        r
    }

    /// Test-only direct construction. Entries are `(level, label, parent,
    /// red_in)` with arena indices: 0 is the implicit root, entry `i` gets
    /// index `i + 1`. Returns the view and each entry's canonical address.
    #[cfg(test)]
    pub(crate) fn from_test_parts(
        entries: &[(i32, ProcessInput, usize, &[(usize, u64)])],
    ) -> (View, Vec<NodeRef>) {
        let mut raw = RawDag::with_root();
        for &(level, ref label, parent, red_in) in entries {
            raw.push(RawNode {
                level,
                label: Some(label.clone()),
                parent: Some(parent),
                red_in: red_in.to_vec(),
            });
        }
        let (dag, address) = raw.canonicalize();
        let view = View { dag };
        debug_assert_eq!(view.level_size(view.top_level()), 1);
        (view, address[1..].to_vec())
    }
}

/// Merges a process's view with the (deduplicated) multiset of views it
/// received, producing the next round's view: a fresh viewpoint is attached
/// under the old one, every received view is embedded by matching nodes on
/// `(parent image, label, red in-edges)`, and the received viewpoints'
/// images become the new viewpoint's red in-edges with the message
/// multiplicities.
pub fn merge_view(own: &View, received: &[(&View, u64)]) -> Result<View, HistoryError> {
    let level = own.top_level();
    for (v, _) in received {
        if v.top_level() != level {
            return Err(HistoryError::LevelMismatch { own: level, received: v.top_level() });
        }
    }

    let mut consing = Consing::default();
    let own_map = consing.absorb(own);
    let own_viewpoint = own_map[&own.viewpoint()];

    let mut viewpoint_red: BTreeMap<usize, u64> = BTreeMap::new();
    for (v, mult) in received {
        let map = consing.absorb(v);
        *viewpoint_red.entry(map[&v.viewpoint()]).or_insert(0) += mult;
    }

    let label = own.label(own.viewpoint()).cloned();
    consing.raw.push(RawNode {
        level: level + 1,
        label,
        parent: Some(own_viewpoint),
        red_in: viewpoint_red.into_iter().collect(),
    });

    let (dag, _) = consing.raw.canonicalize();
    Ok(View { dag })
}

/// Structural hash-consing: a node is identified by its level, parent image,
/// label, and full red in-edge multiset. Because views are ascending-closed,
/// every node carries its complete in-edge data, so this matching rule is
/// exactly the view-merge homomorphism.
#[derive(Default)]
struct Consing {
    raw: RawDag,
    index: HashMap<ConsKey, usize>,
}

#[derive(PartialEq, Eq, Hash)]
struct ConsKey {
    level: i32,
    parent: Option<usize>,
    label: Option<ProcessInput>,
    red_in: Vec<(usize, u64)>,
}

impl Consing {
    fn absorb(&mut self, view: &View) -> HashMap<NodeRef, usize> {
        if self.raw.nodes.is_empty() {
            self.raw.push(RawNode { level: -1, label: None, parent: None, red_in: Vec::new() });
        }
        let mut map: HashMap<NodeRef, usize> = HashMap::new();
        map.insert(NodeRef::ROOT, 0);
        for level in 0..=view.top_level() {
            for r in view.nodes_at(level) {
                let parent = map[&view.parent(r).unwrap()];
                let mut red_in: Vec<(usize, u64)> =
                    view.red_in(r).map(|(s, m)| (map[&s], m)).collect();
                red_in.sort_unstable();
                let key = ConsKey {
                    level,
                    parent: Some(parent),
                    label: view.label(r).cloned(),
                    red_in,
                };
                let id = match self.index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = self.raw.push(RawNode {
                            level,
                            label: key.label.clone(),
                            parent: key.parent,
                            red_in: key.red_in.clone(),
                        });
                        self.index.insert(key, id);
                        id
                    }
                };
                map.insert(r, id);
            }
        }
        map
    }
}

// --- Ground-truth trees -------------------------------------------------------

/// The history tree of a schedule and input assignment up to a horizon, with
/// exact anonymities and the per-round representation of every process.
#[derive(Debug, Clone)]
pub struct HistoryTree {
    dag: Dag,
    /// `anonymity[depth][rank]`, depth = level + 1.
    anonymity: Vec<Vec<u64>>,
    /// `repr[depth][process - 1]` = rank of the node representing the
    /// process at that level.
    repr: Vec<Vec<usize>>,
}

impl HistoryTree {
    pub fn top_level(&self) -> i32 {
        self.dag.top_level()
    }

    pub fn level_size(&self, level: i32) -> usize {
        self.dag.level_size(level)
    }

    pub fn nodes_at(&self, level: i32) -> impl Iterator<Item = NodeRef> + '_ {
        (0..self.level_size(level)).map(move |rank| NodeRef { level, rank })
    }

    pub fn label(&self, r: NodeRef) -> Option<&ProcessInput> {
        self.dag.node(r).label.as_ref()
    }

    pub fn parent(&self, r: NodeRef) -> Option<NodeRef> {
        if r.level == -1 {
            None
        } else {
            Some(NodeRef { level: r.level - 1, rank: self.dag.node(r).parent })
        }
    }

    pub fn children(&self, r: NodeRef) -> impl Iterator<Item = NodeRef> + '_ {
        let level = r.level + 1;
        self.dag.node(r).children.iter().map(move |&rank| NodeRef { level, rank })
    }

    pub fn red_in(&self, r: NodeRef) -> impl Iterator<Item = (NodeRef, u64)> + '_ {
        let level = r.level - 1;
        self.dag
            .node(r)
            .red_in
            .iter()
            .map(move |&(rank, mult)| (NodeRef { level, rank }, mult))
    }

    pub fn anonymity(&self, r: NodeRef) -> u64 {
        self.anonymity[Dag::depth_of(r.level)][r.rank]
    }

    /// Node representing process `p` (1-based) at the end of `round`.
    pub fn representative(&self, p: usize, round: i32) -> NodeRef {
        NodeRef { level: round, rank: self.repr[Dag::depth_of(round)][p - 1] }
    }

    /// Process classes at a level, each a sorted list of 1-based indices.
    pub fn classes_at(&self, level: i32) -> Vec<Vec<usize>> {
        let depth = Dag::depth_of(level);
        let mut classes = vec![Vec::new(); self.dag.levels[depth].len()];
        for (p0, &rank) in self.repr[depth].iter().enumerate() {
            classes[rank].push(p0 + 1);
        }
        classes
    }
}

/// Builds the ground-truth history tree by iterated refinement: two
/// processes share a node at level `t` iff they share one at `t - 1` and
/// received equal multisets of previous-level classes at round `t`.
pub fn build_ground_truth(
    schedule: &Schedule,
    inputs: &InputAssignment,
    horizon: usize,
) -> Result<HistoryTree, HistoryError> {
    inputs.validate_for(schedule)?;
    if horizon > schedule.num_rounds() {
        return Err(HistoryError::HorizonExceedsSchedule {
            horizon,
            rounds: schedule.num_rounds(),
        });
    }
    let n = schedule.n;

    let mut raw = RawDag::with_root();
    // repr_raw[depth][p - 1] = raw node id.
    let mut repr_raw: Vec<Vec<usize>> = vec![vec![0; n]];

    // Level 0: classes by input.
    let mut by_input: BTreeMap<&ProcessInput, Vec<usize>> = BTreeMap::new();
    for p in 1..=n {
        by_input.entry(inputs.input(p)).or_default().push(p);
    }
    let mut level_repr = vec![0usize; n];
    for (input, members) in by_input {
        let id = raw.push(RawNode {
            level: 0,
            label: Some(input.clone()),
            parent: Some(0),
            red_in: Vec::new(),
        });
        for p in members {
            level_repr[p - 1] = id;
        }
    }
    repr_raw.push(level_repr);

    for round in 1..=horizon {
        let graph = schedule.round(round);
        let prev = &repr_raw[round];
        // Observation multiset of each process over previous-level raw ids.
        let mut obs: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
        for ((i, j), m) in graph.edges() {
            *obs[i - 1].entry(prev[j - 1]).or_insert(0) += m;
            *obs[j - 1].entry(prev[i - 1]).or_insert(0) += m;
        }
        // Children: partition each class by observation multiset.
        let mut groups: BTreeMap<(usize, Vec<(usize, u64)>), Vec<usize>> = BTreeMap::new();
        for p in 1..=n {
            let key = (prev[p - 1], obs[p - 1].iter().map(|(&k, &v)| (k, v)).collect());
            groups.entry(key).or_default().push(p);
        }
        let mut level_repr = vec![0usize; n];
        for ((parent, red_in), members) in groups {
            let label = raw.nodes[parent].label.clone();
            let id = raw.push(RawNode { level: round as i32, label, parent: Some(parent), red_in });
            for p in members {
                level_repr[p - 1] = id;
            }
        }
        repr_raw.push(level_repr);
    }

    let (dag, address) = raw.canonicalize();
    let mut repr = Vec::with_capacity(repr_raw.len());
    let mut anonymity: Vec<Vec<u64>> = dag.levels.iter().map(|l| vec![0; l.len()]).collect();
    for (depth, raw_row) in repr_raw.into_iter().enumerate() {
        let row: Vec<usize> = raw_row.into_iter().map(|id| address[id].rank).collect();
        for &rank in &row {
            anonymity[depth][rank] += 1;
        }
        repr.push(row);
    }
    for (depth, level) in anonymity.iter().enumerate() {
        debug_assert_eq!(level.iter().sum::<u64>(), n as u64, "anonymity at depth {depth}");
    }
    Ok(HistoryTree { dag, anonymity, repr })
}

/// The view of a node in the ground-truth tree: its ascending closure under
/// parent and red in-edge steps.
pub fn extract_view(tree: &HistoryTree, target: NodeRef) -> View {
    let mut included: Vec<Vec<bool>> = tree
        .dag
        .levels
        .iter()
        .map(|l| vec![false; l.len()])
        .collect();
    included[Dag::depth_of(target.level)][target.rank] = true;
    for level in (0..=target.level).rev() {
        let depth = Dag::depth_of(level);
        for rank in 0..tree.dag.levels[depth].len() {
            if !included[depth][rank] {
                continue;
            }
            let node = &tree.dag.levels[depth][rank];
            included[depth - 1][node.parent] = true;
            for &(src, _) in &node.red_in {
                included[depth - 1][src] = true;
            }
        }
    }

    let mut raw = RawDag::with_root();
    let mut map: Vec<Vec<usize>> = vec![vec![0]];
    for level in 0..=target.level {
        let depth = Dag::depth_of(level);
        let mut row = vec![usize::MAX; tree.dag.levels[depth].len()];
        for (rank, node) in tree.dag.levels[depth].iter().enumerate() {
            if !included[depth][rank] {
                continue;
            }
            let parent = map[depth - 1][node.parent];
            let red_in = node.red_in.iter().map(|&(s, m)| (map[depth - 1][s], m)).collect();
            row[rank] = raw.push(RawNode {
                level,
                label: node.label.clone(),
                parent: Some(parent),
                red_in,
            });
        }
        map.push(row);
    }
    let (dag, _) = raw.canonicalize();
    let view = View { dag };
    debug_assert_eq!(view.level_size(view.top_level()), 1);
    view
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{gen_random_schedule, RoundGraph};

    fn complete_graph(n: usize) -> RoundGraph {
        let mut g = RoundGraph::new();
        for i in 1..=n {
            for j in i + 1..=n {
                g.add_edge(i, j, 1).unwrap();
            }
        }
        g
    }

    #[test]
    fn complete_graph_stays_fully_symmetric() {
        let n = 5;
        let schedule = Schedule::new(n, vec![complete_graph(n); 4]).unwrap();
        let inputs = InputAssignment::new(vec![ProcessInput::new("z"); n]);
        let tree = build_ground_truth(&schedule, &inputs, 4).unwrap();
        for level in -1..=4 {
            assert_eq!(tree.level_size(level), 1);
            assert_eq!(tree.anonymity(NodeRef { level, rank: 0 }), n as u64);
        }
    }

    #[test]
    fn nine_processes_three_inputs() {
        // 9-process network with inputs A, B, C (3, 3, 3): the root has
        // anonymity 9 and level 0 has exactly three nodes.
        let schedule = gen_random_schedule(9, 1, 3, 42);
        let inputs = InputAssignment::new(
            (0..9)
                .map(|i| ProcessInput::new(["A", "B", "C"][i / 3]))
                .collect(),
        );
        let tree = build_ground_truth(&schedule, &inputs, 3).unwrap();
        assert_eq!(tree.anonymity(NodeRef::ROOT), 9);
        assert_eq!(tree.level_size(0), 3);
    }

    #[test]
    fn anonymity_matches_children_sums() {
        let schedule = gen_random_schedule(6, 2, 4, 3);
        let inputs = InputAssignment::new(
            (0..6).map(|i| ProcessInput::new(if i % 2 == 0 { "a" } else { "b" })).collect(),
        );
        let tree = build_ground_truth(&schedule, &inputs, 8).unwrap();
        for level in -1..tree.top_level() {
            for node in tree.nodes_at(level) {
                let child_sum: u64 = tree.children(node).map(|c| tree.anonymity(c)).sum();
                assert_eq!(child_sum, tree.anonymity(node));
            }
        }
    }

    #[test]
    fn merge_with_no_messages_extends_by_one() {
        let view = View::initial(&ProcessInput::new("x"));
        let next = merge_view(&view, &[]).unwrap();
        assert_eq!(next.top_level(), 1);
        assert_eq!(next.node_count(), 3);
        let vp = next.viewpoint();
        assert_eq!(next.red_in(vp).count(), 0);
        assert_eq!(next.label(vp), Some(&ProcessInput::new("x")));
    }

    #[test]
    fn merge_with_self_at_multiplicity_two() {
        let view = View::initial(&ProcessInput::new("x"));
        let next = merge_view(&view, &[(&view, 2)]).unwrap();
        let vp = next.viewpoint();
        let red: Vec<_> = next.red_in(vp).collect();
        // One red edge, multiplicity 2, from the old viewpoint's image.
        assert_eq!(red, vec![(NodeRef { level: 0, rank: 0 }, 2)]);
    }

    #[test]
    fn merge_rejects_level_mismatch() {
        let a = View::initial(&ProcessInput::new("x"));
        let b = merge_view(&a, &[]).unwrap();
        assert!(merge_view(&b, &[(&a, 1)]).is_err());
    }

    #[test]
    fn merge_is_order_insensitive() {
        let a = View::initial(&ProcessInput::new("a"));
        let b = View::initial(&ProcessInput::new("b"));
        let c = View::initial(&ProcessInput::new("c"));
        let own = View::initial(&ProcessInput::new("p"));
        let forward = merge_view(&own, &[(&a, 1), (&b, 2), (&c, 1)]).unwrap();
        let backward = merge_view(&own, &[(&c, 1), (&b, 2), (&a, 1)]).unwrap();
        assert_eq!(forward, backward);
        assert_eq!(forward.canonical_form(), backward.canonical_form());
    }

    #[test]
    fn canonical_form_basics() {
        let a = View::initial(&ProcessInput::new("same"));
        let b = View::initial(&ProcessInput::new("same"));
        assert_eq!(a, b);
        let c = View::initial(&ProcessInput::new("other"));
        assert_ne!(a, c);
        // Leader flag distinguishes labels.
        let d = View::initial(&ProcessInput::leader("same"));
        assert_ne!(a, d);
    }

    #[test]
    fn extract_root_view_is_trivial() {
        let schedule = gen_random_schedule(3, 1, 2, 0);
        let inputs = InputAssignment::new(vec![ProcessInput::new("z"); 3]);
        let tree = build_ground_truth(&schedule, &inputs, 2).unwrap();
        let view = extract_view(&tree, NodeRef::ROOT);
        assert_eq!(view.node_count(), 1);
        assert_eq!(view.top_level(), -1);
    }

    #[test]
    fn extract_level_zero_view() {
        // Two processes, distinct inputs, one link in round 1: the view of
        // either round-0 node is root plus that node only.
        let mut g = RoundGraph::new();
        g.add_edge(1, 2, 1).unwrap();
        let schedule = Schedule::new(2, vec![g]).unwrap();
        let inputs =
            InputAssignment::new(vec![ProcessInput::new("a"), ProcessInput::new("b")]);
        let tree = build_ground_truth(&schedule, &inputs, 1).unwrap();
        let v = extract_view(&tree, tree.representative(1, 0));
        assert_eq!(v.node_count(), 2);
        // At round 1 each process has observed the other's class.
        let v1 = extract_view(&tree, tree.representative(1, 1));
        assert_eq!(v1.level_size(0), 2);
        assert_eq!(v1.level_size(1), 1);
    }

    #[test]
    fn horizon_must_fit_schedule() {
        let schedule = gen_random_schedule(2, 1, 2, 0);
        let inputs = InputAssignment::new(vec![ProcessInput::new("z"); 2]);
        assert!(build_ground_truth(&schedule, &inputs, 3).is_err());
    }
}
