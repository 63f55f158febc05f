//! Calibrated device model.
//!
//! A device is an undirected graph of physical qubits whose edges carry the
//! calibrated two-qubit error rate. Per-qubit single-qubit and readout error
//! rates complete the noise description.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper clamp applied to scaled error rates.
pub const MAX_SCALED_ERROR: f64 = 0.999;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("failed to read calibration file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed calibration document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("probability out of range: {what} = {value}")]
    ProbabilityOutOfRange { what: String, value: f64 },
    #[error("{field} has {got} entries, expected {expected}")]
    LengthMismatch { field: &'static str, got: usize, expected: usize },
    #[error("link ({0}, {1}) references a qubit outside the device")]
    QubitOutOfRange(usize, usize),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("duplicate link ({0}, {1})")]
    DuplicateLink(usize, usize),
    #[error("device topology is disconnected")]
    Disconnected,
    #[error("device has no qubits")]
    Empty,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} is not strictly positive ({value})")]
    NonPositive { index: usize, value: f64 },
}

/// One undirected coupler between two physical qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub error: f64,
}

impl Link {
    pub fn other(&self, q: usize) -> usize {
        if self.a == q {
            self.b
        } else {
            self.a
        }
    }
}

/// On-disk calibration schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub num_qubits: Option<usize>,
    pub links: Option<Vec<(usize, usize, f64)>>,
    pub qubit_errors: Option<Vec<f64>>,
    pub readout_errors: Option<Vec<f64>>,
}

/// Connected, validated device graph. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceGraph {
    num_qubits: usize,
    links: Vec<Link>,
    qubit_errors: Vec<f64>,
    readout_errors: Vec<f64>,
    /// For each qubit, indices into `links` of its incident links.
    incident: Vec<Vec<usize>>,
}

fn check_probability(what: impl FnOnce() -> String, value: f64, strict_lower: bool) -> Result<(), DeviceError> {
    let ok = value.is_finite() && value < 1.0 && if strict_lower { value > 0.0 } else { value >= 0.0 };
    if ok {
        Ok(())
    } else {
        Err(DeviceError::ProbabilityOutOfRange { what: what(), value })
    }
}

impl DeviceGraph {
    pub fn new(
        num_qubits: usize,
        links: Vec<Link>,
        qubit_errors: Vec<f64>,
        readout_errors: Vec<f64>,
    ) -> Result<Self, DeviceError> {
        if num_qubits == 0 {
            return Err(DeviceError::Empty);
        }
        if qubit_errors.len() != num_qubits {
            return Err(DeviceError::LengthMismatch {
                field: "qubit_errors",
                got: qubit_errors.len(),
                expected: num_qubits,
            });
        }
        if readout_errors.len() != num_qubits {
            return Err(DeviceError::LengthMismatch {
                field: "readout_errors",
                got: readout_errors.len(),
                expected: num_qubits,
            });
        }
        let mut seen = BTreeSet::new();
        let mut incident = vec![Vec::new(); num_qubits];
        for (i, l) in links.iter().enumerate() {
            if l.a >= num_qubits || l.b >= num_qubits {
                return Err(DeviceError::QubitOutOfRange(l.a, l.b));
            }
            if l.a == l.b {
                return Err(DeviceError::SelfLoop(l.a));
            }
            if !seen.insert((l.a.min(l.b), l.a.max(l.b))) {
                return Err(DeviceError::DuplicateLink(l.a, l.b));
            }
            check_probability(|| format!("link ({}, {}) error", l.a, l.b), l.error, true)?;
            incident[l.a].push(i);
            incident[l.b].push(i);
        }
        for (q, &e) in qubit_errors.iter().enumerate() {
            check_probability(|| format!("qubit {q} error"), e, false)?;
        }
        for (q, &e) in readout_errors.iter().enumerate() {
            check_probability(|| format!("qubit {q} readout error"), e, false)?;
        }
        let g = DeviceGraph { num_qubits, links, qubit_errors, readout_errors, incident };
        let all: Vec<usize> = (0..num_qubits).collect();
        if !g.is_connected_subset(&all) {
            return Err(DeviceError::Disconnected);
        }
        Ok(g)
    }

    /// Builds a device with uniform error rates from a list of couplers.
    pub fn uniform(
        num_qubits: usize,
        edges: &[(usize, usize)],
        link_error: f64,
        qubit_error: f64,
        readout_error: f64,
    ) -> Result<Self, DeviceError> {
        let links = edges.iter().map(|&(a, b)| Link { a, b, error: link_error }).collect();
        DeviceGraph::new(num_qubits, links, vec![qubit_error; num_qubits], vec![readout_error; num_qubits])
    }

    pub fn from_calibration(cal: CalibrationFile) -> Result<Self, DeviceError> {
        let n = cal.num_qubits.ok_or(DeviceError::MissingField("num_qubits"))?;
        let links = cal.links.ok_or(DeviceError::MissingField("links"))?;
        let qe = cal.qubit_errors.ok_or(DeviceError::MissingField("qubit_errors"))?;
        let re = cal.readout_errors.ok_or(DeviceError::MissingField("readout_errors"))?;
        let links = links.into_iter().map(|(a, b, error)| Link { a, b, error }).collect();
        DeviceGraph::new(n, links, qe, re)
    }

    pub fn from_json(text: &str) -> Result<Self, DeviceError> {
        DeviceGraph::from_calibration(serde_json::from_str(text)?)
    }

    pub fn to_calibration(&self) -> CalibrationFile {
        CalibrationFile {
            num_qubits: Some(self.num_qubits),
            links: Some(self.links.iter().map(|l| (l.a, l.b, l.error)).collect()),
            qubit_errors: Some(self.qubit_errors.clone()),
            readout_errors: Some(self.readout_errors.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_calibration()).expect("calibration serializes")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn qubit_error(&self, q: usize) -> f64 {
        self.qubit_errors[q]
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.readout_errors[q]
    }

    pub fn incident_links(&self, q: usize) -> impl Iterator<Item = &Link> + '_ {
        self.incident[q].iter().map(move |&i| &self.links[i])
    }

    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident_links(q).map(move |l| l.other(q))
    }

    pub fn degree(&self, q: usize) -> usize {
        self.incident[q].len()
    }

    /// Error rate of the link joining `a` and `b`, if they are coupled.
    pub fn link_error(&self, a: usize, b: usize) -> Option<f64> {
        self.incident_links(a).find(|l| l.other(a) == b).map(|l| l.error)
    }

    pub fn are_linked(&self, a: usize, b: usize) -> bool {
        self.link_error(a, b).is_some()
    }

    /// Number of incident links over their summed error rate.
    pub fn qubit_utility(&self, q: usize) -> f64 {
        let (deg, sum) = self.incident_links(q).fold((0usize, 0.0), |(d, s), l| (d + 1, s + l.error));
        deg as f64 / sum
    }

    /// Utility of every qubit, indexed by qubit.
    pub fn utilities(&self) -> Vec<f64> {
        (0..self.num_qubits).map(|q| self.qubit_utility(q)).collect()
    }

    /// True if the subgraph induced on `qubits` is connected (and non-empty).
    pub fn is_connected_subset(&self, qubits: &[usize]) -> bool {
        let Some(&start) = qubits.first() else {
            return false;
        };
        let mut inside = vec![false; self.num_qubits];
        for &q in qubits {
            inside[q] = true;
        }
        let mut seen = vec![false; self.num_qubits];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(q) = queue.pop_front() {
            for n in self.neighbors(q) {
                if inside[n] && !seen[n] {
                    seen[n] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count == qubits.iter().collect::<BTreeSet<_>>().len()
    }

    /// Same topology with every link error multiplied by an independent
    /// log-normal draw, clamped to `(0, MAX_SCALED_ERROR]`.
    pub fn apply_variation(&self, model: &VariationModel) -> DeviceGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        let dist = model.distribution();
        let links = self
            .links
            .iter()
            .map(|l| {
                let scaled = l.error * dist.sample(&mut rng);
                Link { error: scaled.clamp(f64::MIN_POSITIVE, MAX_SCALED_ERROR), ..*l }
            })
            .collect();
        DeviceGraph { links, ..self.clone() }
    }
}

pub fn load_calibration(path: impl AsRef<Path>) -> Result<DeviceGraph, DeviceError> {
    DeviceGraph::from_json(&std::fs::read_to_string(path)?)
}

/// Log-normal multiplicative error-rate variation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationModel {
    pub mu: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl VariationModel {
    /// # Panics
    /// If `sigma` is not a positive finite number or `mu` is not finite.
    pub fn new(mu: f64, sigma: f64, seed: u64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive, got {sigma}");
        assert!(mu.is_finite(), "mu must be finite");
        VariationModel { mu, sigma, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        VariationModel { seed, ..self }
    }

    pub fn distribution(&self) -> LogNormal<f64> {
        LogNormal::new(self.mu, self.sigma).expect("validated log-normal parameters")
    }

    /// Scale factors this model would apply, in draw order.
    pub fn sample_factors(&self, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dist = self.distribution();
        (0..count).map(|_| dist.sample(&mut rng)).collect()
    }
}

/// Maximum-likelihood log-normal fit (population standard deviation of the
/// log-samples). Constant data yields `sigma = f64::EPSILON`.
pub fn fit_lognormal(samples: &[f64]) -> Result<VariationModel, FitError> {
    if samples.len() < 2 {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(FitError::NonPositive { index, value });
    }
    let n = samples.len() as f64;
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    let mut sigma = var.sqrt();
    if sigma.is_nan() || sigma <= f64::EPSILON {
        log::warn!("log-normal fit on constant data; flooring sigma at machine epsilon");
        sigma = f64::EPSILON;
    }
    Ok(VariationModel { mu, sigma, seed: 0 })
}
