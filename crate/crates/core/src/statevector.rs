//! Dense statevector simulation over the joint estimation ⊗ position register.
//!
//! Amplitude index convention: `index = k << n | x`, where `k` is the value of
//! the estimation register and `x` the pixel position. Position qubits are
//! global qubits `0..n`, estimation qubit `j` is global qubit `n + j`, and bit
//! 0 of each register is its least-significant bit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{self, GateOp};
use crate::error::{Error, Result};

/// Default ceiling on simulated qubits (2^24 amplitudes, 256 MiB).
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Absolute tolerance for amplitude and probability equality.
pub const EQ_TOL: f64 = 1e-10;

/// Tolerance on the L2 norm after long gate sequences.
pub const NORM_TOL: f64 = 1e-9;

/// Split of the qubits into `q` estimation and `n` position qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    q: usize,
    n: usize,
}

impl RegisterLayout {
    pub fn new(q: usize, n: usize) -> Result<Self> {
        if q == 0 || n == 0 {
            return Err(Error::Layout(format!(
                "both registers need at least one qubit (q={q}, n={n})"
            )));
        }
        if q + n >= usize::BITS as usize - 1 {
            return Err(Error::Layout(format!("{} qubits cannot be indexed", q + n)));
        }
        Ok(Self { q, n })
    }

    /// Estimation qubits.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Position qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_qubits(&self) -> usize {
        self.q + self.n
    }

    /// Number of position basis states, `2^n`.
    pub fn positions(&self) -> usize {
        1 << self.n
    }

    /// Number of estimation bins, `2^q`.
    pub fn bins(&self) -> usize {
        1 << self.q
    }

    pub fn dim(&self) -> usize {
        1 << (self.q + self.n)
    }

    pub fn position_qubit(&self, bit: usize) -> usize {
        debug_assert!(bit < self.n);
        bit
    }

    pub fn estimation_qubit(&self, bit: usize) -> usize {
        debug_assert!(bit < self.q);
        self.n + bit
    }

    /// Global indices of the estimation register, least-significant first.
    pub fn estimation_qubits(&self) -> Vec<usize> {
        (self.n..self.n + self.q).collect()
    }

    pub fn index(&self, k: usize, x: usize) -> usize {
        (k << self.n) | x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩_E ⊗ |0⟩_P` for the given layout.
    pub fn init_zero(layout: &RegisterLayout, qubit_cap: usize) -> Result<Self> {
        Self::zero(layout.num_qubits(), qubit_cap)
    }

    /// All-zeros basis state on `num_qubits` qubits.
    pub fn zero(num_qubits: usize, qubit_cap: usize) -> Result<Self> {
        if num_qubits > qubit_cap {
            return Err(Error::QubitCap {
                requested: num_qubits,
                cap: qubit_cap,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; normalization is
    /// the caller's business.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Layout(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute amplitude difference against another state.
    pub fn sup_distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index >= self.num_qubits {
            return Err(Error::QubitIndex {
                index,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let stride = 1usize << target;
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * s;
                *b = (x - y) * s;
            }
        }
        Ok(())
    }

    pub fn apply_pauli_x(&mut self, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let stride = 1usize << target;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::OverlappingQubits(a));
        }
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amplitudes.len() {
            // visit each pair once, from the side with bit a set and bit b clear
            if i & ma != 0 && i & mb == 0 {
                self.amplitudes.swap(i, i ^ ma ^ mb);
            }
        }
        Ok(())
    }

    /// Multiplies by `e^{i·angle}` every amplitude whose index has a 1 at the
    /// target and at every control. An empty control set is a plain phase gate.
    pub fn apply_controlled_phase(
        &mut self,
        controls: &[usize],
        target: usize,
        angle: f64,
    ) -> Result<()> {
        self.check_qubit(target)?;
        let mut mask = 1usize << target;
        for &c in controls {
            self.check_qubit(c)?;
            let bit = 1usize << c;
            if mask & bit != 0 {
                return Err(Error::OverlappingQubits(c));
            }
            mask |= bit;
        }
        if !angle.is_finite() {
            return Err(Error::NonFinitePhase {
                index: target,
                value: angle,
            });
        }
        let phase = Complex64::from_polar(1.0, angle);
        let free = (self.amplitudes.len() - 1) & !mask;
        // walk every subset of the free bits with all mask bits forced on
        let mut sub = 0usize;
        loop {
            self.amplitudes[sub | mask] *= phase;
            if sub == free {
                break;
            }
            sub = sub.wrapping_sub(free) & free;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        match op {
            GateOp::Hadamard { target } => self.apply_hadamard(*target),
            GateOp::PauliX { target } => self.apply_pauli_x(*target),
            GateOp::Swap { a, b } => self.apply_swap(*a, *b),
            GateOp::ControlledPhase {
                controls,
                target,
                angle,
            } => self.apply_controlled_phase(controls, *target, *angle),
        }
    }

    /// Applies the inverse QFT on `register` (least-significant qubit first)
    /// as a gate sequence of Hadamards, controlled phases and bit-reversal swaps.
    pub fn apply_inverse_qft(&mut self, register: &[usize]) -> Result<()> {
        if register.is_empty() {
            return Err(Error::Layout("empty QFT register".into()));
        }
        if register.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Layout(format!(
                "QFT register {register:?} is not a contiguous ascending qubit range"
            )));
        }
        self.check_qubit(register[register.len() - 1])?;
        for op in circuit::inverse_qft_ops(register) {
            self.apply_gate(&op)?;
        }
        Ok(())
    }
}

/// Joint measurement probabilities `P(k, x)` over estimation value and position.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    layout: RegisterLayout,
    probs: Vec<f64>,
}

impl Marginals {
    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn prob(&self, k: usize, x: usize) -> f64 {
        self.probs[self.layout.index(k, x)]
    }

    /// `P(k, x)` for every `k` at position `x`.
    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.layout.bins()).map(|k| self.prob(k, x)).collect()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

pub fn marginal_distribution(state: &StateVector, layout: &RegisterLayout) -> Result<Marginals> {
    if state.num_qubits() != layout.num_qubits() {
        return Err(Error::Layout(format!(
            "state has {} qubits, layout expects {}",
            state.num_qubits(),
            layout.num_qubits()
        )));
    }
    Ok(Marginals {
        layout: *layout,
        probs: state.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
    })
}
