//! Runtime selection of one executable per process.
//!
//! Every process arrives ranked best-first. The greedy selector walks the
//! processes in a strategy-defined order and claims the first executable
//! whose compute units are still free; the brute-force selector searches the
//! full product space for the conflict-free combination with the smallest
//! index sum.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::Process;

/// Default deadline for the exhaustive selector.
pub const DEFAULT_BRUTE_FORCE_TIMEOUT: Duration = Duration::from_secs(10);

/// What the orchestrator needs to know about a ranked process.
pub trait VersionedProgram {
    fn program_name(&self) -> &str;
    fn num_qubits(&self) -> usize;
    fn num_versions(&self) -> usize;
    /// Compute units claimed by version `v` (0-based).
    fn units(&self, v: usize) -> &[usize];
    /// Physical qubits of version `v`'s region.
    fn qubits(&self, v: usize) -> &[usize];
}

impl<T: VersionedProgram + ?Sized> VersionedProgram for &T {
    fn program_name(&self) -> &str {
        (**self).program_name()
    }
    fn num_qubits(&self) -> usize {
        (**self).num_qubits()
    }
    fn num_versions(&self) -> usize {
        (**self).num_versions()
    }
    fn units(&self, v: usize) -> &[usize] {
        (**self).units(v)
    }
    fn qubits(&self, v: usize) -> &[usize] {
        (**self).qubits(v)
    }
}

impl VersionedProgram for Process {
    fn program_name(&self) -> &str {
        &self.program_name
    }
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn num_versions(&self) -> usize {
        self.executables.len()
    }
    fn units(&self, v: usize) -> &[usize] {
        &self.executables[v].region.unit_ids
    }
    fn qubits(&self, v: usize) -> &[usize] {
        &self.executables[v].region.qubits
    }
}

/// A bare ranked list of region placements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementList {
    pub program_name: String,
    pub num_qubits: usize,
    /// `(unit ids, qubits)` per version, best first.
    pub versions: Vec<(Vec<usize>, Vec<usize>)>,
}

impl VersionedProgram for PlacementList {
    fn program_name(&self) -> &str {
        &self.program_name
    }
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn num_versions(&self) -> usize {
        self.versions.len()
    }
    fn units(&self, v: usize) -> &[usize] {
        &self.versions[v].0
    }
    fn qubits(&self, v: usize) -> &[usize] {
        &self.versions[v].1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Seeded random process order.
    Random,
    /// Ascending qubit count, submission order among equals.
    SmallFirst,
    /// Descending qubit count, submission order among equals.
    LargeFirst,
    /// Exhaustive minimum index sum.
    BruteForce,
    /// Random process order and random version order: ignores the ranking.
    Vanilla,
}

impl Strategy {
    pub const RANKED: [Strategy; 4] =
        [Strategy::Random, Strategy::SmallFirst, Strategy::LargeFirst, Strategy::BruteForce];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::SmallFirst => "small_first",
            Strategy::LargeFirst => "large_first",
            Strategy::BruteForce => "brute_force",
            Strategy::Vanilla => "vanilla",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Strategy::Random),
            "small_first" => Ok(Strategy::SmallFirst),
            "large_first" => Ok(Strategy::LargeFirst),
            "brute_force" => Ok(Strategy::BruteForce),
            "vanilla" => Ok(Strategy::Vanilla),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Links with elevated crosstalk and their error amplification factors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrosstalkMap {
    factors: BTreeMap<(usize, usize), f64>,
}

#[derive(Serialize, Deserialize)]
struct CrosstalkFile {
    links: Vec<(usize, usize, f64)>,
}

impl CrosstalkMap {
    /// # Panics
    /// If a factor is below 1.
    pub fn new(links: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let factors = links
            .into_iter()
            .map(|(a, b, f)| {
                assert!(f >= 1.0, "crosstalk amplification must be >= 1, got {f}");
                ((a.min(b), a.max(b)), f)
            })
            .collect();
        CrosstalkMap { factors }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let file: CrosstalkFile = serde_json::from_str(text)?;
        if let Some(&(_, _, f)) = file.links.iter().find(|l| l.2.is_nan() || l.2 < 1.0) {
            return Err(serde::de::Error::custom(format!("amplification factor {f} below 1")));
        }
        Ok(CrosstalkMap::new(file.links))
    }

    pub fn to_json(&self) -> String {
        let links = self.factors.iter().map(|(&(a, b), &f)| (a, b, f)).collect();
        serde_json::to_string_pretty(&CrosstalkFile { links }).expect("crosstalk map serializes")
    }

    pub fn is_flagged(&self, a: usize, b: usize) -> bool {
        self.factors.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn factor(&self, a: usize, b: usize) -> Option<f64> {
        self.factors.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn flagged_links(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.factors.iter().map(|(&(a, b), &f)| (a, b, f))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// True if a flagged link joins a qubit in `a` to a qubit in `b`.
    pub fn joins(&self, a: &[usize], b: &[usize]) -> bool {
        self.factors.keys().any(|&(x, y)| (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub process: usize,
    /// 1-based rank of the chosen executable within its process.
    pub version: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// One entry per input process, in input order.
    pub chosen: Vec<Choice>,
    /// Process indices in the order they were visited.
    pub traversal: Vec<usize>,
    pub index_sum: usize,
    pub strategy: Strategy,
    pub elapsed: Duration,
    /// Executables inspected (greedy) or complete combinations checked
    /// (exhaustive).
    pub evaluations: u64,
}

impl Selection {
    /// 0-based version index chosen for process `p`.
    pub fn version_of(&self, p: usize) -> usize {
        self.chosen[p].version - 1
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrchestrationError {
    #[error("no conflict-free executable left for process {process} (`{program}`)")]
    Unresolvable { process: usize, program: String },
    #[error("exhaustive selection timed out after {0:?}")]
    Timeout(Duration),
    #[error("no conflict-free combination exists")]
    Infeasible,
    #[error("process {0} has no executables")]
    EmptyProcess(usize),
    #[error("strategy `{0}` is not a greedy traversal order")]
    NotGreedy(Strategy),
}

fn check_non_empty<P: VersionedProgram>(processes: &[P]) -> Result<(), OrchestrationError> {
    match processes.iter().position(|p| p.num_versions() == 0) {
        Some(i) => Err(OrchestrationError::EmptyProcess(i)),
        None => Ok(()),
    }
}

/// Visiting order of processes for a greedy strategy.
pub fn traversal_order<P: VersionedProgram>(processes: &[P], strategy: Strategy, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..processes.len()).collect();
    match strategy {
        Strategy::Random | Strategy::Vanilla => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        Strategy::SmallFirst => order.sort_by_key(|&i| processes[i].num_qubits()),
        Strategy::LargeFirst => order.sort_by_key(|&i| std::cmp::Reverse(processes[i].num_qubits())),
        Strategy::BruteForce => {}
    }
    order
}

struct Claims {
    units: Vec<bool>,
    qubits: Vec<usize>,
}

impl Claims {
    fn new() -> Self {
        Claims { units: Vec::new(), qubits: Vec::new() }
    }

    fn free(&self, units: &[usize]) -> bool {
        units.iter().all(|&u| !self.units.get(u).copied().unwrap_or(false))
    }

    fn claim(&mut self, units: &[usize], qubits: &[usize]) {
        for &u in units {
            if u >= self.units.len() {
                self.units.resize(u + 1, false);
            }
            self.units[u] = true;
        }
        self.qubits.extend_from_slice(qubits);
    }
}

/// Greedy first-fit selection (random, small_first, large_first, vanilla).
///
/// With a crosstalk map, executables whose region touches an
/// already-claimed qubit through a flagged link are skipped as well.
pub fn select_heuristic<P: VersionedProgram>(
    processes: &[P],
    strategy: Strategy,
    seed: u64,
    crosstalk: Option<&CrosstalkMap>,
) -> Result<Selection, OrchestrationError> {
    let start = Instant::now();
    if strategy == Strategy::BruteForce {
        return Err(OrchestrationError::NotGreedy(strategy));
    }
    check_non_empty(processes)?;
    let order = traversal_order(processes, strategy, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut claims = Claims::new();
    let mut chosen = vec![Choice { process: 0, version: 0 }; processes.len()];
    let mut evaluations = 0u64;
    for &p in &order {
        let proc = &processes[p];
        let mut versions: Vec<usize> = (0..proc.num_versions()).collect();
        if strategy == Strategy::Vanilla {
            versions.shuffle(&mut rng);
        }
        let mut picked = None;
        for v in versions {
            evaluations += 1;
            if !claims.free(proc.units(v)) {
                continue;
            }
            if let Some(map) = crosstalk {
                if map.joins(proc.qubits(v), &claims.qubits) {
                    continue;
                }
            }
            picked = Some(v);
            break;
        }
        let Some(v) = picked else {
            return Err(OrchestrationError::Unresolvable { process: p, program: proc.program_name().to_string() });
        };
        claims.claim(proc.units(v), proc.qubits(v));
        chosen[p] = Choice { process: p, version: v + 1 };
    }
    let index_sum = chosen.iter().map(|c| c.version).sum();
    Ok(Selection { chosen, traversal: order, index_sum, strategy, elapsed: start.elapsed(), evaluations })
}

/// Objective minimized by the exhaustive selector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Sum of 1-based version indices.
    #[default]
    IndexSum,
    /// Sum of index / process length, which does not penalise processes
    /// with many versions for picking deep.
    RelativePosition,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceOptions {
    pub timeout: Duration,
    /// Branch-and-bound on partial sums; disable for plain enumeration.
    pub pruning: bool,
    pub objective: Objective,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { timeout: DEFAULT_BRUTE_FORCE_TIMEOUT, pruning: true, objective: Objective::IndexSum }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Integer weight of picking version `x` (1-based) of each process.
fn version_weights<P: VersionedProgram>(processes: &[P], objective: Objective) -> Vec<u64> {
    match objective {
        Objective::IndexSum => vec![1; processes.len()],
        Objective::RelativePosition => {
            let lcm = processes.iter().map(|p| p.num_versions() as u64).fold(1u64, |acc, k| acc / gcd(acc, k) * k);
            processes.iter().map(|p| lcm / p.num_versions() as u64).collect()
        }
    }
}

/// Exhaustive search for the conflict-free combination with the smallest
/// objective; ties go to the lexicographically smallest index vector.
pub fn select_brute_force<P: VersionedProgram>(
    processes: &[P],
    options: &BruteForceOptions,
) -> Result<Selection, OrchestrationError> {
    let start = Instant::now();
    check_non_empty(processes)?;
    let deadline = start + options.timeout;
    let weights = version_weights(processes, options.objective);
    let mut search = Search {
        processes,
        weights: &weights,
        start,
        deadline,
        ticks: 0,
        evaluations: 0,
        best: None,
        current: Vec::with_capacity(processes.len()),
        claims: Vec::new(),
    };
    if options.pruning {
        let mut rest = vec![0u64; processes.len() + 1];
        for i in (0..processes.len()).rev() {
            rest[i] = rest[i + 1] + weights[i];
        }
        search.branch_and_bound(0, 0, &rest)?;
    } else {
        search.enumerate()?;
    }
    let (_, best) = search.best.ok_or(OrchestrationError::Infeasible)?;
    let chosen: Vec<Choice> = best.iter().enumerate().map(|(p, &v)| Choice { process: p, version: v + 1 }).collect();
    Ok(Selection {
        index_sum: chosen.iter().map(|c| c.version).sum(),
        chosen,
        traversal: (0..processes.len()).collect(),
        strategy: Strategy::BruteForce,
        elapsed: start.elapsed(),
        evaluations: search.evaluations,
    })
}

struct Search<'a, P> {
    processes: &'a [P],
    weights: &'a [u64],
    start: Instant,
    deadline: Instant,
    ticks: u64,
    evaluations: u64,
    best: Option<(u64, Vec<usize>)>,
    current: Vec<usize>,
    claims: Vec<u32>,
}

impl<P: VersionedProgram> Search<'_, P> {
    fn tick(&mut self) -> Result<(), OrchestrationError> {
        self.ticks += 1;
        if self.ticks % 1024 == 1 {
            let now = Instant::now();
            if now >= self.deadline {
                return Err(OrchestrationError::Timeout(now - self.start));
            }
        }
        Ok(())
    }

    fn free(&self, units: &[usize]) -> bool {
        units.iter().all(|&u| self.claims.get(u).copied().unwrap_or(0) == 0)
    }

    fn set(&mut self, units: &[usize], claim: bool) {
        for &u in units {
            if u >= self.claims.len() {
                self.claims.resize(u + 1, 0);
            }
            if claim {
                self.claims[u] += 1;
            } else {
                self.claims[u] -= 1;
            }
        }
    }

    fn cost(&self, p: usize, v: usize) -> u64 {
        self.weights[p] * (v as u64 + 1)
    }

    /// Depth-first in lexicographic order, so the first solution found at a
    /// given cost is also the lexicographically smallest one.
    fn branch_and_bound(&mut self, p: usize, partial: u64, rest: &[u64]) -> Result<(), OrchestrationError> {
        if p == self.processes.len() {
            self.evaluations += 1;
            if self.best.as_ref().is_none_or(|(c, _)| partial < *c) {
                self.best = Some((partial, self.current.clone()));
            }
            return Ok(());
        }
        let processes = self.processes;
        for v in 0..processes[p].num_versions() {
            self.tick()?;
            let cost = partial + self.cost(p, v);
            if let Some((best, _)) = &self.best {
                if cost + rest[p + 1] >= *best {
                    break;
                }
            }
            let units = processes[p].units(v);
            if !self.free(units) {
                continue;
            }
            self.set(units, true);
            self.current.push(v);
            let r = self.branch_and_bound(p + 1, cost, rest);
            self.current.pop();
            self.set(units, false);
            r?;
        }
        Ok(())
    }

    /// Odometer over the full product space.
    fn enumerate(&mut self) -> Result<(), OrchestrationError> {
        let m = self.processes.len();
        let mut idx = vec![0usize; m];
        loop {
            self.tick()?;
            self.evaluations += 1;
            let mut seen: Vec<usize> = Vec::new();
            let mut ok = true;
            'outer: for (p, &v) in idx.iter().enumerate() {
                for &u in self.processes[p].units(v) {
                    if seen.contains(&u) {
                        ok = false;
                        break 'outer;
                    }
                    seen.push(u);
                }
            }
            if ok {
                let cost: u64 = idx.iter().enumerate().map(|(p, &v)| self.cost(p, v)).sum();
                if self.best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    self.best = Some((cost, idx.clone()));
                }
            }
            let mut p = m;
            loop {
                if p == 0 {
                    return Ok(());
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < self.processes[p].num_versions() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }
}

/// Dispatches to the greedy or exhaustive selector.
pub fn orchestrate<P: VersionedProgram>(
    processes: &[P],
    strategy: Strategy,
    seed: u64,
    crosstalk: Option<&CrosstalkMap>,
    brute_force: &BruteForceOptions,
) -> Result<Selection, OrchestrationError> {
    match strategy {
        Strategy::BruteForce => select_brute_force(processes, brute_force),
        _ => select_heuristic(processes, strategy, seed, crosstalk),
    }
}

/// Online-compilation-time reduction relative to a reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrfReport {
    pub crf: f64,
    pub elapsed: Duration,
    pub reference: Duration,
    pub evaluations: u64,
    /// Σ K_i.
    pub greedy_bound: u64,
    /// Π K_i, saturating.
    pub exhaustive_bound: u64,
}

/// Timer resolution used when a selection reports zero elapsed time.
pub const TIMER_RESOLUTION: Duration = Duration::from_nanos(1);

pub fn orchestration_cost_report<P: VersionedProgram>(
    sel: &Selection,
    processes: &[P],
    compile_time_reference: Duration,
) -> CrfReport {
    let elapsed = sel.elapsed.max(TIMER_RESOLUTION);
    CrfReport {
        crf: compile_time_reference.as_secs_f64() / elapsed.as_secs_f64(),
        elapsed,
        reference: compile_time_reference,
        evaluations: sel.evaluations,
        greedy_bound: processes.iter().map(|p| p.num_versions() as u64).sum(),
        exhaustive_bound: processes.iter().fold(1u64, |acc, p| acc.saturating_mul(p.num_versions() as u64)),
    }
}

/// Checks that chosen versions claim disjoint units and, given a crosstalk
/// map, that no flagged link joins two chosen regions.
pub fn audit_selection<P: VersionedProgram>(
    processes: &[P],
    sel: &Selection,
    crosstalk: Option<&CrosstalkMap>,
) -> bool {
    let picks: Vec<(usize, usize)> = sel.chosen.iter().map(|c| (c.process, c.version - 1)).collect();
    for (i, &(p, v)) in picks.iter().enumerate() {
        for &(q, w) in &picks[i + 1..] {
            let a = processes[p].units(v);
            if processes[q].units(w).iter().any(|u| a.contains(u)) {
                return false;
            }
            if let Some(map) = crosstalk {
                if map.joins(processes[p].qubits(v), processes[q].qubits(w)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proc(name: &str, k: usize, units: &[&[usize]]) -> PlacementList {
        PlacementList {
            program_name: name.into(),
            num_qubits: k,
            versions: units.iter().map(|u| (u.to_vec(), u.iter().map(|x| x * 10).collect())).collect(),
        }
    }

    #[test]
    fn single_process_takes_rank_one() {
        let ps = [proc("a", 2, &[&[3], &[1]])];
        let s = select_heuristic(&ps, Strategy::SmallFirst, 0, None).unwrap();
        assert_eq!(s.index_sum, 1);
        assert_eq!(s.version_of(0), 0);
    }

    #[test]
    fn greedy_hand_trace() {
        let ps = [proc("p1", 2, &[&[0], &[1]]), proc("p2", 2, &[&[0], &[2]])];
        let s = select_heuristic(&ps, Strategy::SmallFirst, 0, None).unwrap();
        assert_eq!(s.chosen, vec![Choice { process: 0, version: 1 }, Choice { process: 1, version: 2 }]);
        assert_eq!(s.index_sum, 3);
        assert_eq!(s.evaluations, 3);
        let b = select_brute_force(&ps, &BruteForceOptions::default()).unwrap();
        assert_eq!(b.index_sum, 3);
    }

    #[test]
    fn forced_conflict_fails() {
        let ps = [proc("p1", 2, &[&[0]]), proc("p2", 2, &[&[0]])];
        let err = select_heuristic(&ps, Strategy::LargeFirst, 0, None).unwrap_err();
        assert_eq!(err, OrchestrationError::Unresolvable { process: 1, program: "p2".into() });
        assert_eq!(select_brute_force(&ps, &BruteForceOptions::default()), Err(OrchestrationError::Infeasible));
    }

    #[test]
    fn brute_force_rescues_greedy_dead_end() {
        // greedy gives p1 unit 0, leaving p2 nothing
        let ps = [proc("p1", 2, &[&[0], &[1]]), proc("p2", 2, &[&[0]])];
        assert!(select_heuristic(&ps, Strategy::SmallFirst, 0, None).is_err());
        let b = select_brute_force(&ps, &BruteForceOptions::default()).unwrap();
        assert_eq!(b.index_sum, 3);
        assert_eq!(b.chosen[0].version, 2);
    }

    #[test]
    fn unique_solution_index_sum_is_m() {
        let ps: Vec<_> = (0..5).map(|i| proc("p", 1, &[&[i]])).collect();
        assert_eq!(select_brute_force(&ps, &BruteForceOptions::default()).unwrap().index_sum, 5);
    }

    #[test]
    fn size_ordered_traversals() {
        let ps = [proc("a", 3, &[&[0]]), proc("b", 5, &[&[1]]), proc("c", 3, &[&[2]]), proc("d", 1, &[&[3]])];
        assert_eq!(traversal_order(&ps, Strategy::SmallFirst, 0), vec![3, 0, 2, 1]);
        assert_eq!(traversal_order(&ps, Strategy::LargeFirst, 0), vec![1, 0, 2, 3]);
        assert_eq!(traversal_order(&ps, Strategy::Random, 9), traversal_order(&ps, Strategy::Random, 9));
    }

    #[test]
    fn crosstalk_filter_skips_flagged_neighbours() {
        // qubits are unit*10; flag the link 0-10 between units 0 and 1
        let ps = [proc("p1", 1, &[&[0]]), proc("p2", 1, &[&[1], &[2]])];
        let map = CrosstalkMap::new([(0, 10, 3.0)]);
        let plain = select_heuristic(&ps, Strategy::SmallFirst, 0, None).unwrap();
        assert_eq!(plain.chosen[1].version, 1);
        let aware = select_heuristic(&ps, Strategy::SmallFirst, 0, Some(&map)).unwrap();
        assert_eq!(aware.chosen[1].version, 2);
        assert!(audit_selection(&ps, &aware, Some(&map)));
        assert!(!audit_selection(&ps, &plain, Some(&map)));
    }

    #[test]
    fn relative_objective_prefers_deep_pick_in_long_process() {
        // {E15, E21} beats {E11, E22} when process 1 has 5 versions and 2 has 2
        let ps = [proc("p1", 1, &[&[0], &[1], &[2], &[3], &[4]]), proc("p2", 1, &[&[0], &[4]])];
        let opts = BruteForceOptions { objective: Objective::RelativePosition, ..Default::default() };
        let s = select_brute_force(&ps, &opts).unwrap();
        assert_eq!((s.chosen[0].version, s.chosen[1].version), (2, 1));
        let plain = select_brute_force(&ps, &BruteForceOptions::default()).unwrap();
        assert_eq!((plain.chosen[0].version, plain.chosen[1].version), (1, 2));
    }

    #[test]
    fn crf_arithmetic_and_bounds() {
        let ps = [proc("p1", 2, &[&[0], &[1]]), proc("p2", 2, &[&[0], &[2], &[3]])];
        let mut s = select_heuristic(&ps, Strategy::Random, 1, None).unwrap();
        s.elapsed = Duration::from_millis(1);
        let r = orchestration_cost_report(&s, &ps, Duration::from_secs(1));
        assert!((r.crf - 1000.0).abs() < 1e-9);
        assert_eq!((r.greedy_bound, r.exhaustive_bound), (5, 6));
        s.elapsed = Duration::ZERO;
        assert!(orchestration_cost_report(&s, &ps, Duration::from_secs(1)).crf.is_finite());
    }

    #[test]
    fn timeout_is_reported() {
        let ps: Vec<_> = (0..12).map(|_| proc("p", 1, &[&[0], &[1], &[2], &[3], &[4], &[5]])).collect();
        let opts = BruteForceOptions { timeout: Duration::ZERO, pruning: false, ..Default::default() };
        assert!(matches!(select_brute_force(&ps, &opts), Err(OrchestrationError::Timeout(_))));
    }

    #[test]
    fn crosstalk_json_round_trip() {
        let map = CrosstalkMap::new([(3, 1, 2.5), (4, 5, 1.0)]);
        let again = CrosstalkMap::from_json(&map.to_json()).unwrap();
        assert_eq!(map, again);
        assert!(again.is_flagged(1, 3));
        assert!(CrosstalkMap::from_json(r#"{"links":[[0,1,0.5]]}"#).is_err());
    }
}
