//! Gate-list circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over a single register of
//! logical qubits. Circuits are validated on construction and immutable
//! afterwards, so they can be shared freely between compilation workers.

mod qasm;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use qasm::{parse_qasm, parse_qasm_named, QasmError};

/// Single-qubit operations understood by the IR. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "params", rename_all = "lowercase")]
pub enum SingleQubitOp {
    U1(f64),
    U2(f64, f64),
    U3(f64, f64, f64),
    Rx(f64),
    Ry(f64),
    Rz(f64),
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Id,
    Sx,
    Sxdg,
}

impl SingleQubitOp {
    /// Mnemonic used in OpenQASM source.
    pub fn name(&self) -> &'static str {
        match self {
            SingleQubitOp::U1(_) => "u1",
            SingleQubitOp::U2(..) => "u2",
            SingleQubitOp::U3(..) => "u3",
            SingleQubitOp::Rx(_) => "rx",
            SingleQubitOp::Ry(_) => "ry",
            SingleQubitOp::Rz(_) => "rz",
            SingleQubitOp::H => "h",
            SingleQubitOp::X => "x",
            SingleQubitOp::Y => "y",
            SingleQubitOp::Z => "z",
            SingleQubitOp::S => "s",
            SingleQubitOp::Sdg => "sdg",
            SingleQubitOp::T => "t",
            SingleQubitOp::Tdg => "tdg",
            SingleQubitOp::Id => "id",
            SingleQubitOp::Sx => "sx",
            SingleQubitOp::Sxdg => "sxdg",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            SingleQubitOp::U1(l) | SingleQubitOp::Rx(l) | SingleQubitOp::Ry(l) | SingleQubitOp::Rz(l) => {
                vec![l]
            }
            SingleQubitOp::U2(p, l) => vec![p, l],
            SingleQubitOp::U3(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    /// Builds an operation from its mnemonic and parameter list. Returns
    /// `None` for unknown names or a wrong parameter count.
    pub fn from_name(name: &str, params: &[f64]) -> Option<Self> {
        use SingleQubitOp::*;
        let op = match (name, params) {
            ("u1" | "p", [l]) => U1(*l),
            ("u2", [p, l]) => U2(*p, *l),
            ("u3" | "u" | "U", [t, p, l]) => U3(*t, *p, *l),
            ("rx", [t]) => Rx(*t),
            ("ry", [t]) => Ry(*t),
            ("rz", [t]) => Rz(*t),
            ("h", []) => H,
            ("x", []) => X,
            ("y", []) => Y,
            ("z", []) => Z,
            ("s", []) => S,
            ("sdg", []) => Sdg,
            ("t", []) => T,
            ("tdg", []) => Tdg,
            ("id", []) => Id,
            ("sx", []) => Sx,
            ("sxdg", []) => Sxdg,
            _ => return None,
        };
        Some(op)
    }

    pub fn is_known(name: &str) -> bool {
        matches!(
            name,
            "u1" | "p"
                | "u2"
                | "u3"
                | "u"
                | "U"
                | "rx"
                | "ry"
                | "rz"
                | "h"
                | "x"
                | "y"
                | "z"
                | "s"
                | "sdg"
                | "t"
                | "tdg"
                | "id"
                | "sx"
                | "sxdg"
        )
    }
}

/// One instruction of a circuit. Operands are qubit indices in whatever
/// index space the owning list uses (logical for a [`Circuit`], physical for
/// a routed executable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    Single { op: SingleQubitOp, qubit: usize },
    Cx { control: usize, target: usize },
    Swap { a: usize, b: usize },
    Measure { qubit: usize, clbit: usize },
    Barrier { qubits: Vec<usize> },
}

impl Gate {
    pub fn single(op: SingleQubitOp, qubit: usize) -> Self {
        Gate::Single { op, qubit }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Gate::Measure { qubit, clbit }
    }

    pub fn operands(&self) -> Vec<usize> {
        match self {
            Gate::Single { qubit, .. } | Gate::Measure { qubit, .. } => vec![*qubit],
            Gate::Cx { control, target } => vec![*control, *target],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::Barrier { qubits } => qubits.clone(),
        }
    }

    /// True for gates acting on two qubits at once (cx and swap).
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cx { .. } | Gate::Swap { .. })
    }

    /// Same gate with every qubit operand passed through `f`.
    pub fn remap(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match self {
            Gate::Single { op, qubit } => Gate::Single { op: *op, qubit: f(*qubit) },
            Gate::Cx { control, target } => Gate::Cx { control: f(*control), target: f(*target) },
            Gate::Swap { a, b } => Gate::Swap { a: f(*a), b: f(*b) },
            Gate::Measure { qubit, clbit } => Gate::Measure { qubit: f(*qubit), clbit: *clbit },
            Gate::Barrier { qubits } => Gate::Barrier { qubits: qubits.iter().map(|&q| f(q)).collect() },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} uses qubit {qubit}, but the circuit has {num_qubits} qubits")]
    QubitOutOfRange { gate: usize, qubit: usize, num_qubits: usize },
    #[error("gate {gate} writes clbit {clbit}, but the circuit has {num_clbits} clbits")]
    ClbitOutOfRange { gate: usize, clbit: usize, num_clbits: usize },
    #[error("gate {gate} repeats operand {qubit}")]
    DuplicateOperand { gate: usize, qubit: usize },
    #[error("gate {gate} acts on qubit {qubit} after it was measured")]
    MidCircuitMeasurement { gate: usize, qubit: usize },
}

/// A quantum program over `num_qubits` logical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    num_clbits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        num_clbits: usize,
        gates: Vec<Gate>,
    ) -> Result<Self, CircuitError> {
        let mut measured = vec![false; num_qubits];
        for (i, gate) in gates.iter().enumerate() {
            let ops = gate.operands();
            for (j, &q) in ops.iter().enumerate() {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange { gate: i, qubit: q, num_qubits });
                }
                if ops[..j].contains(&q) {
                    return Err(CircuitError::DuplicateOperand { gate: i, qubit: q });
                }
            }
            match gate {
                Gate::Measure { qubit, clbit } => {
                    if *clbit >= num_clbits {
                        return Err(CircuitError::ClbitOutOfRange { gate: i, clbit: *clbit, num_clbits });
                    }
                    measured[*qubit] = true;
                }
                Gate::Barrier { .. } => {}
                _ => {
                    if let Some(&q) = ops.iter().find(|&&q| measured[q]) {
                        return Err(CircuitError::MidCircuitMeasurement { gate: i, qubit: q });
                    }
                }
            }
        }
        Ok(Circuit { name: name.into(), num_qubits, num_clbits, gates })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn depth(&self) -> usize {
        circuit_depth(&self.gates)
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Measure { .. }))
    }

    pub fn count_two_qubit(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Copy of this circuit with every `swap` expanded into three `cx`.
    pub fn decompose_swaps(&self) -> Circuit {
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: decompose_swaps(&self.gates),
        }
    }

    /// Returns a new circuit with `gate` appended.
    pub fn with_gate(&self, gate: Gate) -> Result<Circuit, CircuitError> {
        let mut gates = self.gates.clone();
        gates.push(gate);
        Circuit::new(self.name.clone(), self.num_qubits, self.num_clbits, gates)
    }

    pub fn to_qasm(&self) -> String {
        qasm::to_qasm(self)
    }
}

/// Expands each `swap a,b` into `cx a,b; cx b,a; cx a,b`.
pub fn decompose_swaps(gates: &[Gate]) -> Vec<Gate> {
    let mut out = Vec::with_capacity(gates.len());
    for g in gates {
        match *g {
            Gate::Swap { a, b } => {
                out.push(Gate::cx(a, b));
                out.push(Gate::cx(b, a));
                out.push(Gate::cx(a, b));
            }
            _ => out.push(g.clone()),
        }
    }
    out
}

/// Longest chain of gates where consecutive gates share an operand.
///
/// Every gate, including barriers and measurements, occupies one layer on
/// each qubit it spans. The index space of the operands is irrelevant, so
/// this is used for both logical circuits and routed physical gate lists.
pub fn circuit_depth(gates: &[Gate]) -> usize {
    let width = gates.iter().flat_map(|g| g.operands()).max().map_or(0, |q| q + 1);
    let mut level = vec![0usize; width];
    let mut depth = 0;
    for g in gates {
        let ops = g.operands();
        let next = ops.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for q in ops {
            level[q] = next;
        }
        depth = depth.max(next);
    }
    depth
}
