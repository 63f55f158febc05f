//! Compute-unit abstraction of a device and multi-unit region enumeration.
//!
//! Units are grown greedily from the highest-utility qubit left in the
//! residual graph; regions are formed by running the same grouping procedure
//! over the unit graph, with unit utility as node weight.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::device::DeviceGraph;

/// Group placements tried by the first, utility-ordered search.
const GROUPING_BUDGET: usize = 20_000;
/// Group placements tried per fragment allowance by the periphery-first
/// search.
const PERIPHERY_BUDGET: usize = 50_000;
/// Candidate groups per placement in the periphery-first search. Low-degree
/// roots have few, so this rarely truncates.
const PERIPHERY_CANDIDATES: usize = 4096;
/// Candidate groups considered per placement step.
const CANDIDATES_PER_STEP: usize = 48;
/// Node visits allowed while enumerating candidates for one step.
const ENUMERATION_STEPS: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("unit size {m} outside 1..={n}")]
    InvalidUnitSize { m: usize, n: usize },
    #[error("region size {r} outside 1..={available} (non-residual units)")]
    InvalidRegionSize { r: usize, available: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeUnit {
    pub id: usize,
    /// Sorted physical qubits.
    pub qubits: Vec<usize>,
    /// Sum of member qubit utilities on the full device.
    pub utility: f64,
    /// Undersized leftover that is never offered as a standalone region.
    pub residual: bool,
}

/// Units plus the inter-unit adjacency graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitGraph {
    pub unit_size: usize,
    pub units: Vec<ComputeUnit>,
    /// Undirected unit-id pairs, stored as `(low, high)`.
    pub edges: BTreeSet<(usize, usize)>,
    /// Physical qubit → unit id.
    pub qubit_to_unit: Vec<usize>,
}

impl UnitGraph {
    pub fn full_units(&self) -> impl Iterator<Item = &ComputeUnit> {
        self.units.iter().filter(|u| !u.residual)
    }

    pub fn residual_count(&self) -> usize {
        self.units.iter().filter(|u| u.residual).count()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.units.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn region(&self, mut unit_ids: Vec<usize>) -> Region {
        unit_ids.sort_unstable();
        let mut qubits: Vec<usize> = unit_ids.iter().flat_map(|&u| self.units[u].qubits.iter().copied()).collect();
        qubits.sort_unstable();
        let utility = unit_ids.iter().map(|&u| self.units[u].utility).sum();
        Region { unit_ids, qubits, utility }
    }
}

/// A set of connected compute units that hosts one program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub unit_ids: Vec<usize>,
    pub qubits: Vec<usize>,
    /// Sum of member-unit utilities.
    pub utility: f64,
}

impl Region {
    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.binary_search(&q).is_ok()
    }
}

pub fn region_qubit_count(region: &Region) -> usize {
    region.qubit_count()
}

/// Number of units a `k`-qubit program needs at unit size `m`.
pub fn units_needed(k: usize, m: usize) -> usize {
    k.div_ceil(m).max(1)
}

/// Partitions `g` into connected units of `m` qubits.
pub fn generate_compute_units(g: &DeviceGraph, m: usize) -> Result<UnitGraph, PartitionError> {
    let n = g.num_qubits();
    if m == 0 || m > n {
        return Err(PartitionError::InvalidUnitSize { m, n });
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            let mut v: Vec<usize> = g.neighbors(q).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let weights = |alive: &[bool]| -> Vec<f64> {
        (0..n)
            .map(|q| {
                if !alive[q] {
                    return 0.0;
                }
                let (deg, sum) = g
                    .incident_links(q)
                    .filter(|l| alive[l.other(q)])
                    .fold((0usize, 0.0), |(d, s), l| (d + 1, s + l.error));
                if deg == 0 {
                    0.0
                } else {
                    deg as f64 / sum
                }
            })
            .collect()
    };
    let groups = group_nodes(&adj, &weights, m);

    let utilities = g.utilities();
    let mut qubit_to_unit = vec![usize::MAX; n];
    let units: Vec<ComputeUnit> = groups
        .into_iter()
        .enumerate()
        .map(|(id, mut qubits)| {
            qubits.sort_unstable();
            for &q in &qubits {
                qubit_to_unit[q] = id;
            }
            ComputeUnit { id, utility: qubits.iter().map(|&q| utilities[q]).sum(), residual: qubits.len() < m, qubits }
        })
        .collect();
    let edges = g
        .links()
        .iter()
        .filter_map(|l| {
            let (a, b) = (qubit_to_unit[l.a], qubit_to_unit[l.b]);
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    Ok(UnitGraph { unit_size: m, units, edges, qubit_to_unit })
}

/// Disjoint connected groups of `r` units, formed by the unit-growing
/// procedure applied to the unit graph. For `r = 1` this is one region per
/// full unit. Groups made only of a residual unit are never returned.
pub fn enumerate_regions(ug: &UnitGraph, r: usize) -> Result<Vec<Region>, PartitionError> {
    let available = ug.full_units().count();
    if r == 0 || r > available {
        return Err(PartitionError::InvalidRegionSize { r, available });
    }
    if r == 1 {
        return Ok(ug.full_units().map(|u| ug.region(vec![u.id])).collect());
    }
    let adj = ug.adjacency();
    let static_weights: Vec<f64> = ug.units.iter().map(|u| u.utility).collect();
    let weights = |alive: &[bool]| -> Vec<f64> {
        static_weights.iter().zip(alive).map(|(w, &a)| if a { *w } else { 0.0 }).collect()
    };
    Ok(group_nodes(&adj, &weights, r).into_iter().filter(|grp| grp.len() == r).map(|grp| ug.region(grp)).collect())
}

/// Counts connected induced subgraphs of `g` with exactly `k` qubits,
/// stopping at `cap`.
pub fn count_connected_subsets(g: &DeviceGraph, k: usize, cap: usize) -> usize {
    let n = g.num_qubits();
    let adj: Vec<Vec<usize>> = (0..n).map(|q| g.neighbors(q).collect()).collect();
    let mut count = 0;
    for v in 0..n {
        if count >= cap {
            break;
        }
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        esu_extend(&adj, &mut vec![v], ext, v, k, &mut count, cap);
    }
    count.min(cap)
}

fn esu_extend(
    adj: &[Vec<usize>],
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    root: usize,
    k: usize,
    count: &mut usize,
    cap: usize,
) {
    if sub.len() == k {
        *count += 1;
        return;
    }
    while let Some(w) = ext.pop() {
        if *count >= cap {
            return;
        }
        let mut next = ext.clone();
        for &u in &adj[w] {
            if u <= root || sub.contains(&u) || next.contains(&u) {
                continue;
            }
            // exclusive neighbourhood: not adjacent to the current subgraph
            if sub.iter().any(|&s| adj[s].contains(&u)) {
                continue;
            }
            next.push(u);
        }
        sub.push(w);
        esu_extend(adj, sub, next, root, k, count, cap);
        sub.pop();
    }
}

/// Splits the nodes into connected groups of `size`. The first pass follows
/// the unit-growing order: root at the heaviest remaining node (weights from
/// `weights(alive)`, recomputed after each group), grow towards heavier
/// frontier nodes, and backtrack within a budget so that at most one
/// undersized fragment remains.
///
/// When that fails, groups are placed periphery-first (lowest remaining
/// degree) while the allowed fragment count rises from one, so the result
/// has the fewest fragments the search can certify. Fragments are returned
/// as shorter groups.
fn group_nodes(adj: &[Vec<usize>], weights: &dyn Fn(&[bool]) -> Vec<f64>, size: usize) -> Vec<Vec<usize>> {
    let mut first = Grouper::new(adj, weights, size, Branch::Heaviest, 1, GROUPING_BUDGET);
    if first.run() == Search::Found {
        return first.groups;
    }
    let mut best = Grouper::new(adj, weights, size, Branch::Heaviest, 0, 0).greedy();
    for allowance in 1..fragment_count(&best, size) {
        let mut g = Grouper::new(adj, weights, size, Branch::Periphery, allowance, PERIPHERY_BUDGET);
        match g.run() {
            Search::Found => {
                best = g.groups;
                break;
            }
            Search::Exhausted | Search::OutOfBudget => {}
        }
    }
    best
}

fn fragment_count(groups: &[Vec<usize>], size: usize) -> usize {
    groups.iter().filter(|g| g.len() < size).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Branch {
    /// Heaviest remaining node, as in the unit-growing procedure.
    Heaviest,
    /// Remaining node with the fewest remaining neighbours.
    Periphery,
}

impl Branch {
    fn candidate_cap(self) -> usize {
        match self {
            Branch::Heaviest => CANDIDATES_PER_STEP,
            Branch::Periphery => PERIPHERY_CANDIDATES,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Search {
    Found,
    /// Every placement was tried; no grouping meets the allowance.
    Exhausted,
    OutOfBudget,
}

struct Grouper<'a> {
    adj: &'a [Vec<usize>],
    weights: &'a dyn Fn(&[bool]) -> Vec<f64>,
    size: usize,
    branch: Branch,
    allowance: usize,
    budget: usize,
    /// Set when a candidate list was cut short, so exhaustion proves nothing.
    truncated: bool,
    groups: Vec<Vec<usize>>,
}

impl<'a> Grouper<'a> {
    fn new(
        adj: &'a [Vec<usize>],
        weights: &'a dyn Fn(&[bool]) -> Vec<f64>,
        size: usize,
        branch: Branch,
        allowance: usize,
        budget: usize,
    ) -> Self {
        Grouper { adj, weights, size, branch, allowance, budget, truncated: false, groups: Vec::new() }
    }

    fn run(&mut self) -> Search {
        let mut alive = vec![true; self.adj.len()];
        match self.solve(&mut alive, 0) {
            Ok(true) => Search::Found,
            Ok(false) if self.truncated => Search::OutOfBudget,
            Ok(false) => Search::Exhausted,
            Err(()) => Search::OutOfBudget,
        }
    }

    fn pick(&self, alive: &[bool], w: &[f64]) -> Option<usize> {
        match self.branch {
            Branch::Heaviest => heaviest(alive, w),
            Branch::Periphery => (0..alive.len()).filter(|&q| alive[q]).min_by(|&a, &b| {
                let da = self.adj[a].iter().filter(|&&n| alive[n]).count();
                let db = self.adj[b].iter().filter(|&&n| alive[n]).count();
                da.cmp(&db).then(w[b].total_cmp(&w[a])).then(a.cmp(&b))
            }),
        }
    }

    /// `Ok(false)` when the subtree holds no grouping within the allowance,
    /// `Err` when the budget runs out.
    fn solve(&mut self, alive: &mut [bool], fragments: usize) -> Result<bool, ()> {
        let w = (self.weights)(alive);
        let Some(root) = self.pick(alive, &w) else {
            return Ok(true);
        };
        let component = component_of(self.adj, alive, root);
        if component.len() < self.size {
            if fragments >= self.allowance {
                return Ok(false);
            }
            set(alive, &component, false);
            self.groups.push(component.clone());
            if self.solve(alive, fragments + 1)? {
                return Ok(true);
            }
            self.groups.pop();
            set(alive, &component, true);
            return Ok(false);
        }

        let cap = self.branch.candidate_cap();
        let (candidates, complete) = connected_sets_from(self.adj, alive, &w, root, self.size, cap);
        self.truncated |= !complete;
        for cand in candidates {
            if self.place(alive, cand, fragments)? {
                return Ok(true);
            }
        }
        // the root may also sit in a fragment inside a larger component
        if self.branch == Branch::Periphery && fragments < self.allowance {
            for s in (1..self.size).rev() {
                let (candidates, complete) = connected_sets_from(self.adj, alive, &w, root, s, cap);
                self.truncated |= !complete;
                for cand in candidates {
                    if self.place(alive, cand, fragments + 1)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Removes `group` and recurses, restoring it unless a grouping is found.
    fn place(&mut self, alive: &mut [bool], group: Vec<usize>, fragments: usize) -> Result<bool, ()> {
        if self.budget == 0 {
            return Err(());
        }
        self.budget -= 1;
        set(alive, &group, false);
        let mut found = Ok(false);
        if fragments + uneven_components(self.adj, alive, self.size) <= self.allowance {
            self.groups.push(group.clone());
            found = self.solve(alive, fragments);
            if found != Ok(true) {
                self.groups.pop();
            }
        }
        if found != Ok(true) {
            set(alive, &group, true);
        }
        found
    }

    /// Plain greedy grouping in the unit-growing order.
    fn greedy(mut self) -> Vec<Vec<usize>> {
        let mut alive = vec![true; self.adj.len()];
        loop {
            let w = (self.weights)(&alive);
            let Some(root) = heaviest(&alive, &w) else {
                return self.groups;
            };
            let component = component_of(self.adj, &alive, root);
            let group = if component.len() < self.size {
                component
            } else {
                connected_sets_from(self.adj, &alive, &w, root, self.size, 1).0.swap_remove(0)
            };
            set(&mut alive, &group, false);
            self.groups.push(group);
        }
    }
}

fn set(alive: &mut [bool], nodes: &[usize], value: bool) {
    for &q in nodes {
        alive[q] = value;
    }
}

fn heaviest(alive: &[bool], w: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for q in (0..alive.len()).filter(|&q| alive[q]) {
        match best {
            Some(b) if w[q] <= w[b] => {}
            _ => best = Some(q),
        }
    }
    best
}

fn component_of(adj: &[Vec<usize>], alive: &[bool], start: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut out = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for &n in &adj[q] {
            if alive[n] && !seen[n] {
                seen[n] = true;
                out.push(n);
                queue.push_back(n);
            }
        }
    }
    out
}

/// Number of alive components whose size is not a multiple of `size`.
fn uneven_components(adj: &[Vec<usize>], alive: &[bool], size: usize) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut uneven = 0;
    for q in 0..adj.len() {
        if alive[q] && !seen[q] {
            let comp = component_of(adj, alive, q);
            for &c in &comp {
                seen[c] = true;
            }
            if !comp.len().is_multiple_of(size) {
                uneven += 1;
            }
        }
    }
    uneven
}

/// Connected sets of `size` alive nodes containing `root`, in best-first
/// order: the first set is the one obtained by always absorbing the heaviest
/// frontier node (ties to the lower index).
///
/// The flag is false when the list was cut short by the candidate or step
/// limits.
fn connected_sets_from(
    adj: &[Vec<usize>],
    alive: &[bool],
    w: &[f64],
    root: usize,
    size: usize,
    cap: usize,
) -> (Vec<Vec<usize>>, bool) {
    let mut out = Vec::new();
    let mut steps = ENUMERATION_STEPS;
    let mut blocked = vec![false; adj.len()];
    blocked[root] = true;
    let frontier = sorted_frontier(adj, alive, w, &blocked, &[root]);
    let mut current = vec![root];
    let complete = grow(adj, alive, w, size, cap, &mut current, frontier, &mut blocked, &mut out, &mut steps);
    (out, complete)
}

fn sorted_frontier(adj: &[Vec<usize>], alive: &[bool], w: &[f64], blocked: &[bool], from: &[usize]) -> Vec<usize> {
    let mut f: Vec<usize> = Vec::new();
    for &c in from {
        for &n in &adj[c] {
            if alive[n] && !blocked[n] && !f.contains(&n) {
                f.push(n);
            }
        }
    }
    sort_by_weight(&mut f, w);
    f
}

fn sort_by_weight(nodes: &mut [usize], w: &[f64]) {
    nodes.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
}

#[allow(clippy::too_many_arguments)]
fn grow(
    adj: &[Vec<usize>],
    alive: &[bool],
    w: &[f64],
    size: usize,
    cap: usize,
    current: &mut Vec<usize>,
    frontier: Vec<usize>,
    blocked: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    steps: &mut usize,
) -> bool {
    if current.len() == size {
        out.push(current.clone());
        return true;
    }
    // `blocked` holds members and nodes excluded by earlier sibling branches
    let mut excluded = Vec::new();
    let mut complete = true;
    for (i, &pick) in frontier.iter().enumerate() {
        if out.len() >= cap || *steps == 0 {
            complete = false;
            break;
        }
        *steps -= 1;
        current.push(pick);
        blocked[pick] = true;
        let mut next: Vec<usize> = frontier[i + 1..].to_vec();
        for &n in &adj[pick] {
            if alive[n] && !blocked[n] && !next.contains(&n) {
                next.push(n);
            }
        }
        sort_by_weight(&mut next, w);
        complete &= grow(adj, alive, w, size, cap, current, next, blocked, out, steps);
        current.pop();
        // keep `pick` blocked for the remaining siblings
        excluded.push(pick);
    }
    for q in excluded {
        blocked[q] = false;
    }
    complete
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: usize, cols: usize) -> DeviceGraph {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    edges.push((q, q + 1));
                }
                if r + 1 < rows {
                    edges.push((q, q + cols));
                }
            }
        }
        DeviceGraph::uniform(rows * cols, &edges, 0.01, 0.0, 0.0).unwrap()
    }

    fn path(n: usize) -> DeviceGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        DeviceGraph::uniform(n, &edges, 0.01, 0.0, 0.0).unwrap()
    }

    #[test]
    fn whole_device_unit() {
        let g = grid(3, 3);
        let ug = generate_compute_units(&g, 9).unwrap();
        assert_eq!(ug.units.len(), 1);
        assert_eq!(ug.units[0].qubits, (0..9).collect::<Vec<_>>());
        assert!(ug.edges.is_empty());
    }

    #[test]
    fn five_by_five_into_five_units() {
        let ug = generate_compute_units(&grid(5, 5), 5).unwrap();
        assert_eq!(ug.units.len(), 5);
        assert_eq!(ug.residual_count(), 0);
    }

    #[test]
    fn two_by_three_grid_trace() {
        // uniform errors give every qubit the same utility, so ties go to the
        // lowest index: {0,1}, then {2,5} on the residual, then {3,4}
        let ug = generate_compute_units(&grid(2, 3), 2).unwrap();
        let qs: Vec<_> = ug.units.iter().map(|u| u.qubits.clone()).collect();
        assert_eq!(qs, vec![vec![0, 1], vec![2, 5], vec![3, 4]]);
        assert_eq!(ug.edges, BTreeSet::from([(0, 1), (0, 2), (1, 2)]));
    }

    #[test]
    fn residual_unit_on_path() {
        let ug = generate_compute_units(&path(7), 3).unwrap();
        assert_eq!(ug.units.len(), 3);
        assert_eq!(ug.residual_count(), 1);
        let sizes: Vec<_> = ug.units.iter().map(|u| u.qubits.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 7);
    }

    #[test]
    fn backtracking_avoids_stranded_fragments() {
        // a greedy cut from the middle of a path would strand both ends
        let mut g = path(8);
        let mut links = g.links().to_vec();
        links[3].error = 0.001; // make 3-4 the heaviest pair
        g = DeviceGraph::new(8, links, vec![0.0; 8], vec![0.0; 8]).unwrap();
        let ug = generate_compute_units(&g, 4).unwrap();
        assert_eq!(ug.residual_count(), 0);
        for u in &ug.units {
            assert!(g.is_connected_subset(&u.qubits));
        }
    }

    #[test]
    fn invalid_sizes() {
        let g = path(4);
        assert!(generate_compute_units(&g, 0).is_err());
        assert!(generate_compute_units(&g, 5).is_err());
        let ug = generate_compute_units(&g, 2).unwrap();
        assert_eq!(enumerate_regions(&ug, 3), Err(PartitionError::InvalidRegionSize { r: 3, available: 2 }));
    }

    #[test]
    fn path_of_five_units_pairs_two() {
        let g = path(10);
        let ug = generate_compute_units(&g, 2).unwrap();
        assert_eq!(ug.units.len(), 5);
        let regions = enumerate_regions(&ug, 2).unwrap();
        assert_eq!(regions.len(), 2);
        let used: BTreeSet<_> = regions.iter().flat_map(|r| r.unit_ids.clone()).collect();
        assert_eq!(used.len(), 4);
    }

    #[test]
    fn single_unit_regions_skip_residual() {
        let ug = generate_compute_units(&path(7), 3).unwrap();
        let regions = enumerate_regions(&ug, 1).unwrap();
        assert_eq!(regions.len(), 2);
        assert!(regions.iter().all(|r| r.qubit_count() == 3));
    }

    #[test]
    fn esu_counts_small_graphs() {
        // a path of n nodes has n-k+1 connected k-subsets
        assert_eq!(count_connected_subsets(&path(6), 3, usize::MAX), 4);
        // 2x2 grid (4-cycle): 4 pairs, 4 triples, 1 quadruple
        let g = grid(2, 2);
        assert_eq!(count_connected_subsets(&g, 2, usize::MAX), 4);
        assert_eq!(count_connected_subsets(&g, 3, usize::MAX), 4);
        assert_eq!(count_connected_subsets(&g, 4, usize::MAX), 1);
        assert_eq!(count_connected_subsets(&g, 3, 2), 2);
    }
}
