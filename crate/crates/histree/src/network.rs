//! Dynamic-network data model: round multigraphs, schedules, input
//! assignments, disconnectivity validation, block reduction, and schedule
//! generators (random plus the fixed counterexample families).
//!
//! Process indices are 1-based throughout, matching `V = {1, .., n}`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("self-loop on process {0}")]
    SelfLoop(usize),
    #[error("edge multiplicity must be positive")]
    ZeroMultiplicity,
    #[error("process index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dynamic disconnectivity must satisfy 1 <= T <= rounds ({rounds}), got {t}")]
    BadDisconnectivity { t: usize, rounds: usize },
    #[error("input assignment has {got} entries for {expected} processes")]
    InputLengthMismatch { got: usize, expected: usize },
    #[error("{0}")]
    BadParameters(String),
}

/// A process input: an opaque value token plus a leader flag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProcessInput {
    pub value: String,
    #[serde(default)]
    pub leader: bool,
}

impl ProcessInput {
    pub fn new(value: impl Into<String>) -> Self {
        ProcessInput { value: value.into(), leader: false }
    }

    pub fn leader(value: impl Into<String>) -> Self {
        ProcessInput { value: value.into(), leader: true }
    }
}

impl std::fmt::Display for ProcessInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.leader {
            write!(f, "L:{}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// One round's links: a multiset of unordered process pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundGraph {
    // Keys are normalized to i < j.
    edges: BTreeMap<(usize, usize), u64>,
}

impl RoundGraph {
    pub fn new() -> Self {
        RoundGraph::default()
    }

    /// Adds `mult` parallel links between `i` and `j`.
    pub fn add_edge(&mut self, i: usize, j: usize, mult: u64) -> Result<(), NetworkError> {
        if i == j {
            return Err(NetworkError::SelfLoop(i));
        }
        if mult == 0 {
            return Err(NetworkError::ZeroMultiplicity);
        }
        let key = (i.min(j), i.max(j));
        *self.edges.entry(key).or_insert(0) += mult;
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Iterates `((i, j), multiplicity)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Links incident to `p` as `(neighbor, multiplicity)` pairs.
    pub fn incident(&self, p: usize) -> Vec<(usize, u64)> {
        self.edges
            .iter()
            .filter_map(|(&(i, j), &m)| {
                if i == p {
                    Some((j, m))
                } else if j == p {
                    Some((i, m))
                } else {
                    None
                }
            })
            .collect()
    }

    fn absorb(&mut self, other: &RoundGraph) {
        for (&key, &m) in &other.edges {
            *self.edges.entry(key).or_insert(0) += m;
        }
    }

    #[cfg(test)]
    fn degree_sum(&self, p: usize) -> u64 {
        self.incident(p).iter().map(|&(_, m)| m).sum()
    }
}

/// A finite prefix of a dynamic network: `n` processes and one multigraph
/// per round (round 1 up to the horizon). Rounds past the horizon are
/// treated as empty by the simulator, which reports "horizon exhausted"
/// rather than inventing topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub n: usize,
    rounds: Vec<RoundGraph>,
}

impl Schedule {
    pub fn new(n: usize, rounds: Vec<RoundGraph>) -> Result<Self, NetworkError> {
        if n == 0 {
            return Err(NetworkError::BadParameters("n must be >= 1".into()));
        }
        for g in &rounds {
            for ((i, j), _) in g.edges() {
                for index in [i, j] {
                    if index < 1 || index > n {
                        return Err(NetworkError::IndexOutOfRange { index, n });
                    }
                }
            }
        }
        Ok(Schedule { n, rounds })
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// The multigraph of round `t` (1-based). Rounds past the horizon are empty.
    pub fn round(&self, t: usize) -> RoundGraph {
        assert!(t >= 1, "rounds are 1-based");
        self.rounds.get(t - 1).cloned().unwrap_or_default()
    }

    pub fn rounds(&self) -> &[RoundGraph] {
        &self.rounds
    }

    /// Repeats a static schedule's first round out to `h` rounds.
    pub fn extended_static(&self, h: usize) -> Schedule {
        let first = self.rounds.first().cloned().unwrap_or_default();
        Schedule { n: self.n, rounds: vec![first; h] }
    }

    fn union_connected(&self, from: usize, to: usize) -> bool {
        let mut union = RoundGraph::new();
        for t in from..=to {
            union.absorb(&self.rounds[t - 1]);
        }
        connected_on_all(self.n, &union)
    }
}

fn connected_on_all(n: usize, g: &RoundGraph) -> bool {
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n + 1];
    let mut stack = vec![1usize];
    seen[1] = true;
    let mut count = 1;
    while let Some(p) = stack.pop() {
        for (q, _) in g.incident(p) {
            if !seen[q] {
                seen[q] = true;
                count += 1;
                stack.push(q);
            }
        }
    }
    count == n
}

/// Checks T-interval-disconnectivity: the union of every window of `t_disc`
/// consecutive rounds must be connected on all `n` vertices.
pub fn validate_disconnectivity(schedule: &Schedule, t_disc: usize) -> Result<bool, NetworkError> {
    let h = schedule.num_rounds();
    if t_disc == 0 || t_disc > h {
        return Err(NetworkError::BadDisconnectivity { t: t_disc, rounds: h });
    }
    for start in 1..=(h - t_disc + 1) {
        if !schedule.union_connected(start, start + t_disc - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Collapses each block of `t_disc` consecutive rounds into one round whose
/// edge multiset is the union of the block (multiplicities add). A trailing
/// partial block is padded with empty rounds.
pub fn block_reduce(schedule: &Schedule, t_disc: usize) -> Schedule {
    assert!(t_disc >= 1);
    let h = schedule.num_rounds();
    let blocks = h.div_ceil(t_disc);
    let mut rounds = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut merged = RoundGraph::new();
        for t in (b * t_disc + 1)..=((b + 1) * t_disc).min(h) {
            merged.absorb(&schedule.rounds[t - 1]);
        }
        rounds.push(merged);
    }
    Schedule { n: schedule.n, rounds }
}

/// One input per process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputAssignment {
    inputs: Vec<ProcessInput>,
}

impl InputAssignment {
    pub fn new(inputs: Vec<ProcessInput>) -> Self {
        InputAssignment { inputs }
    }

    pub fn validate_for(&self, schedule: &Schedule) -> Result<(), NetworkError> {
        if self.inputs.len() != schedule.n {
            return Err(NetworkError::InputLengthMismatch {
                got: self.inputs.len(),
                expected: schedule.n,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Input of process `p` (1-based).
    pub fn input(&self, p: usize) -> &ProcessInput {
        &self.inputs[p - 1]
    }

    pub fn inputs(&self) -> &[ProcessInput] {
        &self.inputs
    }

    pub fn leader_count(&self) -> u64 {
        self.inputs.iter().filter(|i| i.leader).count() as u64
    }

    /// The input multiset: one `(input, multiplicity)` entry per distinct input.
    pub fn inventory(&self) -> BTreeMap<ProcessInput, u64> {
        let mut out = BTreeMap::new();
        for i in &self.inputs {
            *out.entry(i.clone()).or_insert(0) += 1;
        }
        out
    }
}

/// Deterministic random schedule passing `validate_disconnectivity(.., t_disc)`.
///
/// Each block of `t_disc` rounds carries a uniform random spanning tree plus
/// a few extra random edges in one designated round; the tree round sits at
/// the same offset in every block so that every sliding window of `t_disc`
/// rounds contains one full spanning tree. The remaining rounds are sparse
/// (often empty), so the schedule's true disconnectivity is typically
/// exactly `t_disc`.
pub fn gen_random_schedule(n: usize, t_disc: usize, num_blocks: usize, seed: u64) -> Schedule {
    assert!(n >= 1 && t_disc >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let tree_offset = rng.gen_range(0..t_disc);
    let mut rounds = Vec::with_capacity(num_blocks * t_disc);
    for _ in 0..num_blocks {
        for offset in 0..t_disc {
            let mut g = RoundGraph::new();
            if n >= 2 {
                if offset == tree_offset {
                    for (i, j) in random_spanning_tree(n, &mut rng) {
                        g.add_edge(i, j, 1).unwrap();
                    }
                    // Geometric number of extra edges; parallels pile up as
                    // multiplicity.
                    while rng.gen_bool(0.5) {
                        let (i, j) = random_pair(n, &mut rng);
                        g.add_edge(i, j, 1).unwrap();
                    }
                } else if rng.gen_bool(0.2) {
                    let (i, j) = random_pair(n, &mut rng);
                    g.add_edge(i, j, 1).unwrap();
                }
            }
            rounds.push(g);
        }
    }
    let schedule = Schedule { n, rounds };
    debug_assert!(validate_disconnectivity(&schedule, t_disc).unwrap());
    schedule
}

fn random_pair(n: usize, rng: &mut ChaCha20Rng) -> (usize, usize) {
    let i = rng.gen_range(1..=n);
    let mut j = rng.gen_range(1..=n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Uniform random labelled spanning tree via a Prufer sequence.
fn random_spanning_tree(n: usize, rng: &mut ChaCha20Rng) -> Vec<(usize, usize)> {
    if n == 1 {
        return vec![];
    }
    if n == 2 {
        return vec![(1, 2)];
    }
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(1..=n)).collect();
    let mut degree = vec![1u32; n + 1];
    for &v in &prufer {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (1..=n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &v in &prufer {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().unwrap();
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaf_heap.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().unwrap();
    let std::cmp::Reverse(b) = leaf_heap.pop().unwrap();
    edges.push((a, b));
    edges
}

fn cycle_edges(members: &[usize], g: &mut RoundGraph) {
    let len = members.len();
    assert!(len >= 3);
    for idx in 0..len {
        g.add_edge(members[idx], members[(idx + 1) % len], 1).unwrap();
    }
}

/// Static network family from the scale-invariance argument: `alpha` disjoint
/// copies of the complete k-partite graph with partite sets of sizes
/// `partite_sizes`, plus one cycle per partite class spanning that class
/// across all copies. Processes in class `i` get input `z{i}`.
///
/// Requires every size > 2 and gcd of the sizes equal to 1.
pub fn gen_scale_family(
    partite_sizes: &[usize],
    alpha: usize,
    rounds: usize,
) -> Result<(Schedule, InputAssignment), NetworkError> {
    if partite_sizes.is_empty() || alpha == 0 {
        return Err(NetworkError::BadParameters("need sizes and alpha >= 1".into()));
    }
    if partite_sizes.iter().any(|&m| m <= 2) {
        return Err(NetworkError::BadParameters("every partite size must exceed 2".into()));
    }
    let gcd = partite_sizes
        .iter()
        .fold(0usize, |acc, &m| num_integer::Integer::gcd(&acc, &m));
    if gcd != 1 {
        return Err(NetworkError::BadParameters(format!(
            "partite sizes must have gcd 1, got {gcd}"
        )));
    }

    let per_copy: usize = partite_sizes.iter().sum();
    let n = alpha * per_copy;
    // Process p belongs to copy (p-1)/per_copy; within a copy, classes are
    // laid out consecutively.
    let mut class_of = vec![0usize; n + 1];
    let mut class_members: Vec<Vec<usize>> = vec![Vec::new(); partite_sizes.len()];
    let mut inputs = vec![ProcessInput::new(""); n];
    for copy in 0..alpha {
        let mut p = copy * per_copy + 1;
        for (ci, &size) in partite_sizes.iter().enumerate() {
            for _ in 0..size {
                class_of[p] = ci;
                class_members[ci].push(p);
                inputs[p - 1] = ProcessInput::new(format!("z{}", ci + 1));
                p += 1;
            }
        }
    }

    let mut g = RoundGraph::new();
    // Complete k-partite graph inside each copy.
    for copy in 0..alpha {
        let base = copy * per_copy;
        for i in base + 1..=base + per_copy {
            for j in i + 1..=base + per_copy {
                if class_of[i] != class_of[j] {
                    g.add_edge(i, j, 1).unwrap();
                }
            }
        }
    }
    // One cycle per class spanning all copies of that class.
    for members in &class_members {
        cycle_edges(members, &mut g);
    }

    let schedule = Schedule { n, rounds: vec![g; rounds] };
    Ok((schedule, InputAssignment::new(inputs)))
}

/// Static cycle of `k * i` processes with `i` leaders evenly spaced; all
/// value tokens equal. Leaders sit at positions 1, k+1, 2k+1, ...
pub fn gen_leader_ring(
    k: usize,
    i: usize,
    rounds: usize,
) -> Result<(Schedule, InputAssignment), NetworkError> {
    if k == 0 {
        return Err(NetworkError::BadParameters("ratio denominator k must be >= 1".into()));
    }
    if i < 3 {
        return Err(NetworkError::BadParameters("need i >= 3 for a cycle".into()));
    }
    let n = k * i;
    let mut g = RoundGraph::new();
    cycle_edges(&(1..=n).collect::<Vec<_>>(), &mut g);
    let inputs = (1..=n)
        .map(|p| {
            if (p - 1) % k == 0 {
                ProcessInput::leader("z")
            } else {
                ProcessInput::new("z")
            }
        })
        .collect();
    Ok((Schedule { n, rounds: vec![g; rounds] }, InputAssignment::new(inputs)))
}

/// Static cycle of `2t+2` leaderless processes with input 1 at process 1 and
/// input 0 elsewhere, plus the companion all-zero 3-cycle from the same
/// indistinguishability argument. Both schedules run long enough (`2n`
/// rounds) for the mean to stabilize.
pub fn gen_cycle_with_one_marked(
    t: usize,
) -> ((Schedule, InputAssignment), (Schedule, InputAssignment)) {
    assert!(t >= 1);
    let n = 2 * t + 2;
    let horizon = 2 * n;
    let mut g = RoundGraph::new();
    cycle_edges(&(1..=n).collect::<Vec<_>>(), &mut g);
    let mut inputs = vec![ProcessInput::new("0"); n];
    inputs[0] = ProcessInput::new("1");
    let marked = (
        Schedule { n, rounds: vec![g; horizon] },
        InputAssignment::new(inputs),
    );

    let mut g3 = RoundGraph::new();
    cycle_edges(&[1, 2, 3], &mut g3);
    let companion = (
        Schedule { n: 3, rounds: vec![g3; horizon] },
        InputAssignment::new(vec![ProcessInput::new("0"); 3]),
    );
    (marked, companion)
}

/// Deterministic random input assignment: values drawn from `values`, with
/// `num_leaders` leader flags on distinct random processes.
pub fn gen_random_inputs(
    n: usize,
    values: &[&str],
    num_leaders: usize,
    seed: u64,
) -> InputAssignment {
    assert!(num_leaders <= n && !values.is_empty());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut inputs: Vec<ProcessInput> = (0..n)
        .map(|_| ProcessInput::new(values[rng.gen_range(0..values.len())]))
        .collect();
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    for &p in ids.iter().take(num_leaders) {
        inputs[p].leader = true;
    }
    InputAssignment::new(inputs)
}

// --- JSON file formats ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    n: usize,
    rounds: Vec<Vec<EdgeEntry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeEntry {
    Pair([usize; 2]),
    Triple([usize; 3]),
}

#[derive(Serialize, Deserialize)]
struct InputsFile {
    inputs: Vec<ProcessInput>,
}

impl Schedule {
    /// Serializes as `{"n": int, "rounds": [[[i, j, mult], ...], ...]}`.
    pub fn to_json(&self) -> String {
        let rounds = self
            .rounds
            .iter()
            .map(|g| {
                g.edges()
                    .map(|((i, j), m)| EdgeEntry::Triple([i, j, m as usize]))
                    .collect()
            })
            .collect();
        serde_json::to_string(&ScheduleFile { n: self.n, rounds }).unwrap()
    }

    /// Parses the schedule file format; the multiplicity field is optional
    /// and defaults to 1.
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: ScheduleFile = serde_json::from_str(text)
            .map_err(|e| NetworkError::BadParameters(format!("schedule json: {e}")))?;
        let mut rounds = Vec::with_capacity(file.rounds.len());
        for entries in file.rounds {
            let mut g = RoundGraph::new();
            for entry in entries {
                let (i, j, m) = match entry {
                    EdgeEntry::Pair([i, j]) => (i, j, 1),
                    EdgeEntry::Triple([i, j, m]) => (i, j, m as u64),
                };
                g.add_edge(i, j, m)?;
            }
            rounds.push(g);
        }
        Schedule::new(file.n, rounds)
    }
}

impl InputAssignment {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&InputsFile { inputs: self.inputs.clone() }).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: InputsFile = serde_json::from_str(text)
            .map_err(|e| NetworkError::BadParameters(format!("inputs json: {e}")))?;
        Ok(InputAssignment::new(file.inputs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(n: usize, rounds: &[&[(usize, usize)]]) -> Schedule {
        let rounds = rounds
            .iter()
            .map(|edges| {
                let mut g = RoundGraph::new();
                for &(i, j) in *edges {
                    g.add_edge(i, j, 1).unwrap();
                }
                g
            })
            .collect();
        Schedule::new(n, rounds).unwrap()
    }

    /// Independent connectivity check (union-find) used to cross-check the
    /// BFS inside `validate_disconnectivity`.
    fn union_find_connected(n: usize, windows: &[&RoundGraph]) -> bool {
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for g in windows {
            for ((i, j), _) in g.edges() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
        let root = find(&mut parent, 1);
        (2..=n).all(|p| find(&mut parent, p) == root)
    }

    #[test]
    fn single_vertex_always_valid() {
        let s = schedule(1, &[&[], &[], &[]]);
        assert!(validate_disconnectivity(&s, 1).unwrap());
        assert!(validate_disconnectivity(&s, 3).unwrap());
    }

    #[test]
    fn three_cycle_spread_over_rounds() {
        let s = schedule(3, &[&[(1, 2)], &[(2, 3)], &[(1, 3)]]);
        // Round 1 alone leaves vertex 3 isolated.
        assert!(!validate_disconnectivity(&s, 1).unwrap());
        // Every pair of consecutive rounds spans all three vertices.
        assert!(validate_disconnectivity(&s, 2).unwrap());
        for start in 0..2 {
            assert!(union_find_connected(
                3,
                &[&s.rounds()[start], &s.rounds()[start + 1]]
            ));
        }
    }

    #[test]
    fn rejects_bad_t() {
        let s = schedule(2, &[&[(1, 2)]]);
        assert!(validate_disconnectivity(&s, 0).is_err());
        assert!(validate_disconnectivity(&s, 2).is_err());
    }

    #[test]
    fn monotone_in_t() {
        let s = gen_random_schedule(5, 2, 6, 11);
        assert!(validate_disconnectivity(&s, 2).unwrap());
        for t in 3..=s.num_rounds() {
            assert!(validate_disconnectivity(&s, t).unwrap());
        }
    }

    #[test]
    fn block_reduce_identity_at_one() {
        let s = schedule(3, &[&[(1, 2)], &[(2, 3)]]);
        assert_eq!(block_reduce(&s, 1), s);
    }

    #[test]
    fn block_reduce_adds_multiplicities() {
        let s = schedule(2, &[&[(1, 2)], &[(1, 2)]]);
        let r = block_reduce(&s, 2);
        assert_eq!(r.num_rounds(), 1);
        assert_eq!(r.round(1).multiplicity(1, 2), 2);
    }

    #[test]
    fn block_reduce_pads_partial_block() {
        let s = schedule(2, &[&[(1, 2)], &[(1, 2)], &[(1, 2)]]);
        let r = block_reduce(&s, 2);
        assert_eq!(r.num_rounds(), 2);
        assert_eq!(r.round(1).multiplicity(1, 2), 2);
        assert_eq!(r.round(2).multiplicity(1, 2), 1);
    }

    #[test]
    fn block_reduce_makes_t_one() {
        for seed in 0..5 {
            let s = gen_random_schedule(6, 3, 5, seed);
            assert!(validate_disconnectivity(&s, 3).unwrap());
            let r = block_reduce(&s, 3);
            assert!(validate_disconnectivity(&r, 1).unwrap());
        }
    }

    #[test]
    fn random_schedule_is_deterministic_and_valid() {
        let a = gen_random_schedule(5, 1, 10, 1);
        let b = gen_random_schedule(5, 1, 10, 1);
        assert_eq!(a, b);
        assert!(validate_disconnectivity(&a, 1).unwrap());
        let c = gen_random_schedule(5, 1, 10, 2);
        assert_ne!(a, c);
    }

    #[test]
    fn random_schedule_trivial_n1() {
        let s = gen_random_schedule(1, 3, 2, 7);
        assert_eq!(s.num_rounds(), 6);
        assert!(s.rounds().iter().all(|g| g.is_empty()));
        assert!(validate_disconnectivity(&s, 3).unwrap());
    }

    #[test]
    fn scale_family_shape() {
        let (s, inputs) = gen_scale_family(&[3, 4], 1, 2).unwrap();
        assert_eq!(s.n, 7);
        // K_{3,4} has 12 edges, plus a 3-cycle and a 4-cycle.
        assert_eq!(s.round(1).total_multiplicity(), 12 + 3 + 4);
        assert_eq!(inputs.inventory().len(), 2);

        let (s2, _) = gen_scale_family(&[3, 4], 2, 2).unwrap();
        assert_eq!(s2.n, 14);
        // Every class-1 process: 2 cycle links + 4 links into its copy's V2.
        for copy in 0..2 {
            for p in copy * 7 + 1..=copy * 7 + 3 {
                assert_eq!(s2.round(1).degree_sum(p), 6, "process {p}");
            }
        }
    }

    #[test]
    fn scale_family_rejects_bad_sizes() {
        assert!(gen_scale_family(&[2, 3], 1, 1).is_err());
        assert!(gen_scale_family(&[4, 6], 1, 1).is_err());
    }

    #[test]
    fn leader_ring_positions() {
        let (s, inputs) = gen_leader_ring(3, 3, 4).unwrap();
        assert_eq!(s.n, 9);
        let leaders: Vec<usize> = (1..=9).filter(|&p| inputs.input(p).leader).collect();
        assert_eq!(leaders, vec![1, 4, 7]);

        let (_, all) = gen_leader_ring(1, 3, 1).unwrap();
        assert_eq!(all.leader_count(), 3);

        assert!(gen_leader_ring(3, 2, 1).is_err());
    }

    #[test]
    fn marked_cycle_shape() {
        let ((s, inputs), (s3, z3)) = gen_cycle_with_one_marked(1);
        assert_eq!(s.n, 4);
        assert_eq!(s3.n, 3);
        assert_eq!(inputs.inventory()[&ProcessInput::new("1")], 1);
        assert_eq!(inputs.inventory()[&ProcessInput::new("0")], 3);
        assert_eq!(z3.inventory()[&ProcessInput::new("0")], 3);
    }

    #[test]
    fn json_round_trip() {
        let s = gen_random_schedule(4, 2, 3, 9);
        let parsed = Schedule::from_json(&s.to_json()).unwrap();
        assert_eq!(s, parsed);

        let inputs = gen_random_inputs(4, &["a", "b"], 1, 5);
        let parsed = InputAssignment::from_json(&inputs.to_json()).unwrap();
        assert_eq!(inputs, parsed);

        // Multiplicity defaults to 1 when omitted.
        let s = Schedule::from_json(r#"{"n": 2, "rounds": [[[1, 2]]]}"#).unwrap();
        assert_eq!(s.round(1).multiplicity(1, 2), 1);
    }
}
