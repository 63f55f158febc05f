//! Dense state-vector kernels. Qubit `q` is bit `q` of the basis index.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::circuit::SingleQubitOp;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn diag(a: Complex64, b: Complex64) -> Matrix2 {
    [[a, ZERO], [ZERO, b]]
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(c, phi + lambda)],
    ]
}

/// Unitary of a single-qubit gate.
pub fn matrix(op: &SingleQubitOp) -> Matrix2 {
    use SingleQubitOp::*;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match *op {
        U1(l) => diag(ONE, Complex64::from_polar(1.0, l)),
        U2(p, l) => u3(std::f64::consts::FRAC_PI_2, p, l),
        U3(t, p, l) => u3(t, p, l),
        Rx(t) => {
            let (s, c) = (t / 2.0).sin_cos();
            [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]]
        }
        Ry(t) => {
            let (s, c) = (t / 2.0).sin_cos();
            [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
        }
        Rz(t) => diag(Complex64::from_polar(1.0, -t / 2.0), Complex64::from_polar(1.0, t / 2.0)),
        H => [[h, h], [h, -h]],
        X => [[ZERO, ONE], [ONE, ZERO]],
        Y => [[ZERO, -I], [I, ZERO]],
        Z => diag(ONE, -ONE),
        S => diag(ONE, I),
        Sdg => diag(ONE, -I),
        T => diag(ONE, Complex64::from_polar(1.0, FRAC_PI_4)),
        Tdg => diag(ONE, Complex64::from_polar(1.0, -FRAC_PI_4)),
        Id => diag(ONE, ONE),
        Sx => {
            let (a, b) = (Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5));
            [[a, b], [b, a]]
        }
        Sxdg => {
            let (a, b) = (Complex64::new(0.5, -0.5), Complex64::new(0.5, 0.5));
            [[a, b], [b, a]]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn new(n: usize) -> Self {
        let mut amps = vec![ZERO; 1usize << n];
        amps[0] = ONE;
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let mask = 1usize << q;
        for base in (0..self.amps.len()).step_by(mask << 1) {
            for i in base..base + mask {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// Pauli `code` on `q`: 0 = I, 1 = X, 2 = Y, 3 = Z.
    pub fn apply_pauli(&mut self, q: usize, code: u8) {
        let mask = 1usize << q;
        match code {
            0 => {}
            1 => {
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        self.amps.swap(i, i | mask);
                    }
                }
            }
            2 => {
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                        self.amps[i] = -I * a1;
                        self.amps[i | mask] = I * a0;
                    }
                }
            }
            3 => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            _ => panic!("pauli code {code} out of range"),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}
