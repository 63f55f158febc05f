//! Ideal and noisy execution of circuits and executables.
//!
//! Noise is sampled per trajectory: each trajectory draws one Pauli error
//! pattern (depolarizing after every gate, bit flips at readout), evolves
//! the state once and then contributes its share of the shots.

mod state;

use std::collections::BTreeMap;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::compiler::Executable;
use crate::device::{DeviceGraph, MAX_SCALED_ERROR};
use crate::orchestrator::CrosstalkMap;

pub use state::{matrix, Matrix2, StateVector};

/// Largest circuit accepted by [`simulate_ideal`].
pub const MAX_IDEAL_QUBITS: usize = 14;
/// Largest number of active physical qubits in a simulated executable.
pub const MAX_NOISY_QUBITS: usize = 16;
pub const DEFAULT_TRAJECTORIES: usize = 512;
/// Ideal probabilities below this are dropped as rounding residue.
const PROBABILITY_FLOOR: f64 = 1e-15;
const CHECKPOINT_EVERY: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{qubits} qubits exceeds the simulable limit of {max}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("distribution widths differ ({left} vs {right})")]
    WidthMismatch { left: usize, right: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("outcome {outcome:#b} does not fit in {width} bits")]
    OutcomeTooWide { outcome: u64, width: usize },
    #[error("cx on uncoupled qubits {0} and {1}")]
    NotCoupled(usize, usize),
}

/// Output distribution over classical bitstrings. Keys are integers whose
/// bit `c` is clbit `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "DistributionRepr", try_from = "DistributionRepr")]
pub struct Distribution {
    width: usize,
    probs: BTreeMap<u64, f64>,
    shots: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    width: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    outcomes: BTreeMap<String, f64>,
}

impl From<Distribution> for DistributionRepr {
    fn from(d: Distribution) -> Self {
        DistributionRepr {
            width: d.width,
            shots: d.shots,
            outcomes: d.probs.iter().map(|(&k, &p)| (d.bitstring(k), p)).collect(),
        }
    }
}

impl TryFrom<DistributionRepr> for Distribution {
    type Error = String;
    fn try_from(r: DistributionRepr) -> Result<Self, String> {
        let mut probs = Vec::with_capacity(r.outcomes.len());
        for (s, p) in r.outcomes {
            if s.len() != r.width {
                return Err(format!("bitstring `{s}` is not {} bits wide", r.width));
            }
            let k = if s.is_empty() { 0 } else { u64::from_str_radix(&s, 2).map_err(|e| e.to_string())? };
            probs.push((k, p));
        }
        let mut d = Distribution::from_probabilities(r.width, probs).map_err(|e| e.to_string())?;
        d.shots = r.shots;
        Ok(d)
    }
}

impl Distribution {
    /// # Errors
    /// If the probabilities do not sum to 1 within 1e-9 or an outcome does
    /// not fit in `width` bits.
    pub fn from_probabilities(width: usize, probs: impl IntoIterator<Item = (u64, f64)>) -> Result<Self, SimError> {
        let mut map = BTreeMap::new();
        for (k, p) in probs {
            check_width(k, width)?;
            if p > 0.0 {
                *map.entry(k).or_insert(0.0) += p;
            }
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized(total));
        }
        Ok(Distribution { width, probs: map, shots: None })
    }

    pub fn from_counts(width: usize, counts: &BTreeMap<u64, u64>) -> Result<Self, SimError> {
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        let mut probs = BTreeMap::new();
        for (&k, &c) in counts {
            check_width(k, width)?;
            if c > 0 {
                probs.insert(k, c as f64 / shots as f64);
            }
        }
        Ok(Distribution { width, probs, shots: Some(shots) })
    }

    pub fn point_mass(width: usize, outcome: u64) -> Result<Self, SimError> {
        Self::from_probabilities(width, [(outcome, 1.0)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Shot count when the distribution was sampled.
    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn probability(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    /// Probability of a bitstring written with the highest clbit first.
    pub fn probability_of(&self, bits: &str) -> f64 {
        u64::from_str_radix(bits, 2).map(|k| self.probability(k)).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Highest clbit on the left.
    pub fn bitstring(&self, outcome: u64) -> String {
        (0..self.width).rev().map(|b| if outcome >> b & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_bitstring_map(&self) -> BTreeMap<String, f64> {
        self.probs.iter().map(|(&k, &p)| (self.bitstring(k), p)).collect()
    }
}

fn check_width(k: u64, width: usize) -> Result<(), SimError> {
    if width < 64 && k >> width != 0 {
        return Err(SimError::OutcomeTooWide { outcome: k, width });
    }
    Ok(())
}

/// `1 − ½ Σ |P(s) − Q(s)|`; outcomes missing from one side count as 0.
pub fn fidelity(p: &Distribution, q: &Distribution) -> Result<f64, SimError> {
    if p.width != q.width {
        return Err(SimError::WidthMismatch { left: p.width, right: q.width });
    }
    let mut keys: Vec<u64> = p.probs.keys().chain(q.probs.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let l1: f64 = keys.iter().map(|&k| (p.probability(k) - q.probability(k)).abs()).sum();
    Ok((1.0 - 0.5 * l1).clamp(0.0, 1.0))
}

/// Total variation distance.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64, SimError> {
    fidelity(p, q).map(|f| 1.0 - f)
}

/// Maps basis-state probabilities to clbit outcomes through `(qubit, clbit)`
/// readout pairs.
fn marginalize(probs: &[f64], readout: &[(usize, usize)], width: usize) -> Result<Distribution, SimError> {
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    for (idx, &p) in probs.iter().enumerate() {
        if p < PROBABILITY_FLOOR {
            continue;
        }
        *out.entry(outcome_key(idx, readout)).or_insert(0.0) += p;
    }
    Distribution::from_probabilities(width, out)
}

fn outcome_key(idx: usize, readout: &[(usize, usize)]) -> u64 {
    readout.iter().fold(0u64, |acc, &(q, c)| acc | (((idx >> q) & 1) as u64) << c)
}

fn apply_ideal(state: &mut StateVector, gate: &Gate, local: impl Fn(usize) -> usize) {
    match gate {
        Gate::Single { op, qubit } => state.apply_1q(local(*qubit), &matrix(op)),
        Gate::Cx { control, target } => state.apply_cx(local(*control), local(*target)),
        Gate::Swap { a, b } => {
            let (a, b) = (local(*a), local(*b));
            state.apply_cx(a, b);
            state.apply_cx(b, a);
            state.apply_cx(a, b);
        }
        Gate::Measure { .. } | Gate::Barrier { .. } => {}
    }
}

/// Exact noiseless output distribution of `c`. Without measurements every
/// qubit `q` is read into bit `q`.
pub fn simulate_ideal(c: &Circuit) -> Result<Distribution, SimError> {
    let n = c.num_qubits();
    if n > MAX_IDEAL_QUBITS {
        return Err(SimError::TooManyQubits { qubits: n, max: MAX_IDEAL_QUBITS });
    }
    let mut state = StateVector::new(n);
    let mut readout = Vec::new();
    for g in c.gates() {
        if let Gate::Measure { qubit, clbit } = *g {
            readout.retain(|&(_, cb)| cb != clbit);
            readout.push((qubit, clbit));
        }
        apply_ideal(&mut state, g, |q| q);
    }
    let width = if c.has_measurements() {
        c.num_clbits()
    } else {
        readout = (0..n).map(|q| (q, q)).collect();
        n
    };
    marginalize(&state.probabilities(), &readout, width)
}

/// Physical → dense local index over the executable's active qubits.
struct LocalMap {
    physical: Vec<usize>,
}

impl LocalMap {
    fn new(e: &Executable) -> Result<Self, SimError> {
        let physical = e.active_qubits();
        if physical.len() > MAX_NOISY_QUBITS {
            return Err(SimError::TooManyQubits { qubits: physical.len(), max: MAX_NOISY_QUBITS });
        }
        Ok(LocalMap { physical })
    }

    fn local(&self, p: usize) -> usize {
        self.physical.binary_search(&p).expect("active qubit")
    }

    fn readout(&self, e: &Executable) -> Vec<(usize, usize)> {
        e.measurements.iter().map(|&(p, c)| (self.local(p), c)).collect()
    }
}

/// Exact noiseless distribution of a routed executable.
pub fn simulate_executable_ideal(e: &Executable) -> Result<Distribution, SimError> {
    let map = LocalMap::new(e)?;
    let mut state = StateVector::new(map.physical.len());
    for g in &e.routed_gates {
        apply_ideal(&mut state, g, |p| map.local(p));
    }
    marginalize(&state.probabilities(), &map.readout(e), e.num_clbits)
}

/// Sampling parameters for [`simulate_noisy`].
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub shots: u64,
    pub seed: u64,
    /// Independent error patterns drawn; capped at `shots`.
    pub trajectories: usize,
    pub crosstalk: Option<CrosstalkMap>,
    /// Physical qubits held by programs running alongside this one.
    pub co_running: Vec<usize>,
    /// Multiplies every gate and readout error; 0 gives the noiseless limit.
    pub error_scale: f64,
}

impl NoiseSpec {
    pub fn new(shots: u64, seed: u64) -> Self {
        NoiseSpec {
            shots,
            seed,
            trajectories: DEFAULT_TRAJECTORIES,
            crosstalk: None,
            co_running: Vec::new(),
            error_scale: 1.0,
        }
    }

    pub fn with_error_scale(mut self, scale: f64) -> Self {
        assert!(scale >= 0.0 && scale.is_finite(), "error scale must be a finite non-negative number");
        self.error_scale = scale;
        self
    }

    fn scaled(&self, p: f64) -> f64 {
        (p * self.error_scale).min(MAX_SCALED_ERROR)
    }

    pub fn with_trajectories(mut self, trajectories: usize) -> Self {
        self.trajectories = trajectories;
        self
    }

    pub fn with_crosstalk(mut self, map: CrosstalkMap, co_running: Vec<usize>) -> Self {
        self.crosstalk = Some(map);
        self.co_running = co_running;
        self
    }
}

/// Error-rate multiplier for a `cx` on `(a, b)`: the largest factor among
/// flagged links joining `a` or `b` to a co-running qubit.
pub fn crosstalk_factor(map: &CrosstalkMap, co_running: &[usize], a: usize, b: usize) -> f64 {
    map.flagged_links()
        .filter(|&(x, y, _)| {
            ((x == a || x == b) && co_running.contains(&y)) || ((y == a || y == b) && co_running.contains(&x))
        })
        .map(|(_, _, f)| f)
        .fold(1.0, f64::max)
}

#[derive(Clone, Debug)]
enum NoisyOp {
    One { q: usize, m: Matrix2, p: f64 },
    Cx { c: usize, t: usize, p: f64 },
}

impl NoisyOp {
    fn error(&self) -> f64 {
        match *self {
            NoisyOp::One { p, .. } | NoisyOp::Cx { p, .. } => p,
        }
    }

    fn apply(&self, s: &mut StateVector) {
        match self {
            NoisyOp::One { q, m, .. } => s.apply_1q(*q, m),
            NoisyOp::Cx { c, t, .. } => s.apply_cx(*c, *t),
        }
    }

    /// Applies the non-identity Pauli `code` (1..=3 or 1..=15).
    fn apply_error(&self, s: &mut StateVector, code: u8) {
        match *self {
            NoisyOp::One { q, .. } => s.apply_pauli(q, code),
            NoisyOp::Cx { c, t, .. } => {
                s.apply_pauli(c, code & 3);
                s.apply_pauli(t, code >> 2);
            }
        }
    }

    fn pauli_count(&self) -> u8 {
        match self {
            NoisyOp::One { .. } => 3,
            NoisyOp::Cx { .. } => 15,
        }
    }
}

fn lower_noisy(e: &Executable, map: &LocalMap, spec: &NoiseSpec, g: &DeviceGraph) -> Result<Vec<NoisyOp>, SimError> {
    let cx = |a: usize, b: usize| -> Result<NoisyOp, SimError> {
        let base = g.link_error(a, b).ok_or(SimError::NotCoupled(a, b))?;
        let factor = spec.crosstalk.as_ref().map_or(1.0, |m| crosstalk_factor(m, &spec.co_running, a, b));
        let p = spec.scaled(if factor > 1.0 { (base * factor).min(MAX_SCALED_ERROR) } else { base });
        Ok(NoisyOp::Cx { c: map.local(a), t: map.local(b), p })
    };
    let mut ops = Vec::with_capacity(e.routed_gates.len());
    for gate in &e.routed_gates {
        match gate {
            Gate::Single { op, qubit } => {
                ops.push(NoisyOp::One { q: map.local(*qubit), m: matrix(op), p: spec.scaled(g.qubit_error(*qubit)) })
            }
            Gate::Cx { control, target } => ops.push(cx(*control, *target)?),
            Gate::Swap { a, b } => {
                ops.push(cx(*a, *b)?);
                ops.push(cx(*b, *a)?);
                ops.push(cx(*a, *b)?);
            }
            Gate::Measure { .. } | Gate::Barrier { .. } => {}
        }
    }
    Ok(ops)
}

/// Ideal states saved every few operations so a trajectory can resume from
/// the last checkpoint before its first error.
struct Checkpoints {
    every: usize,
    states: Vec<StateVector>,
    final_probs: Vec<f64>,
}

impl Checkpoints {
    fn build(ops: &[NoisyOp], n: usize) -> Self {
        let mut s = StateVector::new(n);
        let mut states = vec![s.clone()];
        for (i, op) in ops.iter().enumerate() {
            op.apply(&mut s);
            if (i + 1) % CHECKPOINT_EVERY == 0 {
                states.push(s.clone());
            }
        }
        Checkpoints { every: CHECKPOINT_EVERY, states, final_probs: s.probabilities() }
    }

    /// State just before op `i`, plus the index it corresponds to.
    fn resume(&self, i: usize) -> (StateVector, usize) {
        let k = i / self.every;
        (self.states[k].clone(), k * self.every)
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_index(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Seeded Monte-Carlo execution of `e` on `g`'s error model.
///
/// Trajectory `t` draws its randomness from `seed + t`, so results are
/// reproducible regardless of the worker count.
pub fn simulate_noisy(e: &Executable, spec: &NoiseSpec, g: &DeviceGraph) -> Result<Distribution, SimError> {
    if spec.shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let map = LocalMap::new(e)?;
    let n = map.physical.len();
    let ops = lower_noisy(e, &map, spec, g)?;
    let readout: Vec<(usize, usize, f64)> =
        e.measurements.iter().map(|&(p, c)| (map.local(p), c, spec.scaled(g.readout_error(p)))).collect();
    let checkpoints = Checkpoints::build(&ops, n);
    let ideal_cdf = cumulative(&checkpoints.final_probs);
    let trajectories = (spec.trajectories.max(1) as u64).min(spec.shots);
    let base_shots = spec.shots / trajectories;
    let extra = spec.shots % trajectories;

    let counts = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(t));
            let mut errors: Vec<(usize, u8)> = Vec::new();
            for (i, op) in ops.iter().enumerate() {
                let p = op.error();
                if p > 0.0 && rng.random::<f64>() < p {
                    errors.push((i, rng.random_range(1..=op.pauli_count())));
                }
            }
            let owned_cdf;
            let cdf = if let Some(&(first, _)) = errors.first() {
                let (mut s, start) = checkpoints.resume(first);
                let mut next = errors.iter().peekable();
                for (i, op) in ops.iter().enumerate().skip(start) {
                    op.apply(&mut s);
                    while let Some(&&(j, code)) = next.peek() {
                        if j != i {
                            break;
                        }
                        op.apply_error(&mut s, code);
                        next.next();
                    }
                }
                owned_cdf = cumulative(&s.probabilities());
                &owned_cdf
            } else {
                &ideal_cdf
            };
            let shots = base_shots + u64::from(t < extra);
            let mut local: BTreeMap<u64, u64> = BTreeMap::new();
            for _ in 0..shots {
                let idx = sample_index(cdf, &mut rng);
                let mut key = 0u64;
                for &(q, c, ro) in &readout {
                    let mut bit = (idx >> q) & 1 == 1;
                    if ro > 0.0 && rng.random::<f64>() < ro {
                        bit = !bit;
                    }
                    if bit {
                        key |= 1 << c;
                    }
                }
                *local.entry(key).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        });
    Distribution::from_counts(e.num_clbits, &counts)
}

/// Estimated QPU occupancy: `d_out × cycle × shots`.
///
/// # Panics
/// If `cycle` is zero.
pub fn estimate_qpu_time(e: &Executable, cycle: Duration, shots: u64) -> Duration {
    assert!(!cycle.is_zero(), "cycle time must be positive");
    let nanos = e.d_out as u128 * cycle.as_nanos() * shots as u128;
    Duration::from_nanos(u64::try_from(nanos).unwrap_or(u64::MAX))
}
