//! Gate-list IR and the circuit builders.
//!
//! Every builder emits plain [`GateOp`]s so the same list is both simulated by
//! [`StateVector`] and tallied for resource accounting.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::phasemap::PhaseImage;
use crate::statevector::{RegisterLayout, StateVector};

/// Largest position register the Gray traversal accepts.
pub const MAX_POSITION_QUBITS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Hadamard {
        target: usize,
    },
    PauliX {
        target: usize,
    },
    /// Only emitted by the inverse QFT for its bit-reversal stage.
    Swap {
        a: usize,
        b: usize,
    },
    /// Phase `e^{i·angle}` on the subspace where target and all controls are 1.
    ControlledPhase {
        controls: Vec<usize>,
        target: usize,
        angle: f64,
    },
}

impl GateOp {
    fn max_qubit(&self) -> usize {
        match self {
            GateOp::Hadamard { target } | GateOp::PauliX { target } => *target,
            GateOp::Swap { a, b } => *a.max(b),
            GateOp::ControlledPhase {
                controls, target, ..
            } => controls.iter().copied().fold(*target, usize::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Prepare,
    Oracle,
    InverseQft,
}

impl Stage {
    fn label(self) -> &'static str {
        match self {
            Stage::Prepare => "prepare",
            Stage::Oracle => "oracle",
            Stage::InverseQft => "inverse-qft",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: RegisterLayout,
    ops: Vec<GateOp>,
    stages: Vec<(Stage, Range<usize>)>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            ops: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Contiguous runs of ops tagged with the stage that produced them.
    pub fn stages(&self) -> &[(Stage, Range<usize>)] {
        &self.stages
    }

    pub fn stage_ops(&self, stage: Stage) -> impl Iterator<Item = &GateOp> {
        self.stages
            .iter()
            .filter(move |(s, _)| *s == stage)
            .flat_map(move |(_, r)| &self.ops[r.clone()])
    }

    pub fn push(&mut self, stage: Stage, op: GateOp) -> Result<()> {
        let top = op.max_qubit();
        if top >= self.layout.num_qubits() {
            return Err(Error::QubitIndex {
                index: top,
                num_qubits: self.layout.num_qubits(),
            });
        }
        if let GateOp::ControlledPhase {
            controls,
            target,
            angle,
        } = &op
        {
            if !angle.is_finite() {
                return Err(Error::NonFinitePhase {
                    index: *target,
                    value: *angle,
                });
            }
            let mut seen = vec![*target];
            for &c in controls {
                if seen.contains(&c) {
                    return Err(Error::OverlappingQubits(c));
                }
                seen.push(c);
            }
        }
        let at = self.ops.len();
        self.ops.push(op);
        match self.stages.last_mut() {
            Some((s, r)) if *s == stage => r.end = at + 1,
            _ => self.stages.push((stage, at..at + 1)),
        }
        Ok(())
    }

    /// Appends every op of `other`, keeping its stage tags.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::ShapeMismatch("circuit layouts differ".into()));
        }
        for (stage, range) in &other.stages {
            for op in &other.ops[range.clone()] {
                self.push(*stage, op.clone())?;
            }
        }
        Ok(())
    }

    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.layout.num_qubits() {
            return Err(Error::Layout(format!(
                "circuit acts on {} qubits, state has {}",
                self.layout.num_qubits(),
                state.num_qubits()
            )));
        }
        for op in &self.ops {
            state.apply_gate(op)?;
        }
        Ok(())
    }

    /// Runs the circuit on `|0…0⟩`.
    pub fn simulate(&self, qubit_cap: usize) -> Result<StateVector> {
        let mut state = StateVector::init_zero(&self.layout, qubit_cap)?;
        self.apply_to(&mut state)?;
        Ok(state)
    }

    /// Plain-text gate list, one op per line. Angles carry 17 significant digits
    /// so the text round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# qpipe circuit q={} n={}\n",
            self.layout.q(),
            self.layout.n()
        );
        for (stage, range) in &self.stages {
            let _ = writeln!(out, "# stage {}", stage.label());
            for op in &self.ops[range.clone()] {
                match op {
                    GateOp::Hadamard { target } => writeln!(out, "H {target}"),
                    GateOp::PauliX { target } => writeln!(out, "X {target}"),
                    GateOp::Swap { a, b } => writeln!(out, "SWAP {a} {b}"),
                    GateOp::ControlledPhase {
                        controls,
                        target,
                        angle,
                    } => {
                        let _ = write!(out, "CP {angle:.16e} {target}");
                        for c in controls {
                            let _ = write!(out, " {c}");
                        }
                        writeln!(out)
                    }
                }
                .expect("writing to a String cannot fail");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let layout = loop {
            let (_, line) = lines
                .next()
                .ok_or_else(|| Error::Parse("missing circuit header".into()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("# qpipe circuit")
                .ok_or_else(|| Error::Parse(format!("bad circuit header `{line}`")))?;
            let mut q = None;
            let mut n = None;
            for field in rest.split_whitespace() {
                match field.split_once('=') {
                    Some(("q", v)) => q = v.parse().ok(),
                    Some(("n", v)) => n = v.parse().ok(),
                    _ => {}
                }
            }
            match (q, n) {
                (Some(q), Some(n)) => break RegisterLayout::new(q, n)?,
                _ => return Err(Error::Parse(format!("bad circuit header `{line}`"))),
            }
        };

        let mut circuit = Circuit::new(layout);
        let mut stage = Stage::Oracle;
        for (lineno, line) in lines {
            let line = line.trim();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: `{line}`", lineno + 1));
            if line.is_empty() {
                continue;
            }
            if let Some(label) = line.strip_prefix("# stage ") {
                stage = match label.trim() {
                    "prepare" => Stage::Prepare,
                    "oracle" => Stage::Oracle,
                    "inverse-qft" => Stage::InverseQft,
                    _ => return Err(bad("unknown stage")),
                };
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let name = tokens.next().unwrap_or_default();
            let qubit = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("expected a qubit index"))
            };
            let op = match name {
                "H" => GateOp::Hadamard {
                    target: qubit(tokens.next())?,
                },
                "X" => GateOp::PauliX {
                    target: qubit(tokens.next())?,
                },
                "SWAP" => GateOp::Swap {
                    a: qubit(tokens.next())?,
                    b: qubit(tokens.next())?,
                },
                "CP" => {
                    let angle: f64 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("expected an angle"))?;
                    let target = qubit(tokens.next())?;
                    let controls = tokens
                        .map(|t| qubit(Some(t)))
                        .collect::<Result<Vec<_>>>()?;
                    GateOp::ControlledPhase {
                        controls,
                        target,
                        angle,
                    }
                }
                _ => return Err(bad("unknown gate")),
            };
            let arity = match op {
                GateOp::Hadamard { .. } | GateOp::PauliX { .. } => Some(2),
                GateOp::Swap { .. } => Some(3),
                GateOp::ControlledPhase { .. } => None,
            };
            if arity.is_some_and(|a| line.split_whitespace().count() > a) {
                return Err(bad("trailing tokens"));
            }
            circuit.push(stage, op)?;
        }
        Ok(circuit)
    }
}

/// One step of the reflected binary Gray code traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayStep {
    pub step: usize,
    pub code_word: usize,
    /// Bit that differs between this word and the next; `None` on the last step.
    pub transition_bit: Option<usize>,
}

pub fn gray_sequence(n: usize) -> Result<Vec<GrayStep>> {
    if n == 0 || n > MAX_POSITION_QUBITS {
        return Err(Error::Layout(format!(
            "Gray traversal needs 1..={MAX_POSITION_QUBITS} position qubits, got {n}"
        )));
    }
    let len = 1usize << n;
    let word = |s: usize| s ^ (s >> 1);
    Ok((0..len)
        .map(|s| GrayStep {
            step: s,
            code_word: word(s),
            transition_bit: (s + 1 < len)
                .then(|| (word(s) ^ word(s + 1)).trailing_zeros() as usize),
        })
        .collect())
}

/// Gates emitted for oracle construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleKind {
    /// Per-pixel X preparation and uncompute around each phase gate.
    Naive,
    /// Single Gray-code traversal with one X per transition.
    #[default]
    Gray,
}

/// How several phase images share the oracle stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fusion {
    /// One phase gate per pixel carrying the summed phase.
    #[default]
    Fused,
    /// One traversal block per image.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QpipeOptions {
    pub oracle: OracleKind,
    pub fusion: Fusion,
}

/// Phase angle in radians for a `2^k`-th power of the oracle, reduced mod 2π.
fn kickback_angle(turns: f64, k: usize) -> f64 {
    TAU * (turns * (1u64 << k) as f64).rem_euclid(1.0)
}

fn check_phases(layout: &RegisterLayout, theta: &[f64], k: usize) -> Result<()> {
    if theta.len() != layout.positions() {
        return Err(Error::ShapeMismatch(format!(
            "{} phases for a {}-position register",
            theta.len(),
            layout.positions()
        )));
    }
    if k >= layout.q() {
        return Err(Error::QubitIndex {
            index: k,
            num_qubits: layout.q(),
        });
    }
    for (index, &value) in theta.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinitePhase { index, value });
        }
    }
    Ok(())
}

/// Phase gate firing when `e_k` and every position qubit are 1. Position qubit
/// 0 is the target.
fn pixel_phase_gate(layout: &RegisterLayout, k: usize, turns: f64) -> GateOp {
    let mut controls = Vec::with_capacity(layout.n());
    controls.push(layout.estimation_qubit(k));
    controls.extend((1..layout.n()).map(|b| layout.position_qubit(b)));
    GateOp::ControlledPhase {
        controls,
        target: layout.position_qubit(0),
        angle: kickback_angle(turns, k),
    }
}

fn emit_naive(circuit: &mut Circuit, theta: &[f64], k: usize) -> Result<()> {
    let layout = *circuit.layout();
    check_phases(&layout, theta, k)?;
    for (pixel, &t) in theta.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let zero_bits: Vec<usize> = (0..layout.n()).filter(|b| pixel >> b & 1 == 0).collect();
        for &b in &zero_bits {
            circuit.push(Stage::Oracle, GateOp::PauliX { target: b })?;
        }
        circuit.push(Stage::Oracle, pixel_phase_gate(&layout, k, t))?;
        for &b in &zero_bits {
            circuit.push(Stage::Oracle, GateOp::PauliX { target: b })?;
        }
    }
    Ok(())
}

fn emit_gray(circuit: &mut Circuit, theta: &[f64], k: usize) -> Result<()> {
    let layout = *circuit.layout();
    check_phases(&layout, theta, k)?;
    let n = layout.n();
    // flip frame: position x fires the phase gate once x ^ frame == 1…1
    for b in 0..n {
        circuit.push(Stage::Oracle, GateOp::PauliX { target: b })?;
    }
    for step in gray_sequence(n)? {
        let t = theta[step.code_word];
        if t != 0.0 {
            circuit.push(Stage::Oracle, pixel_phase_gate(&layout, k, t))?;
        }
        if let Some(bit) = step.transition_bit {
            circuit.push(Stage::Oracle, GateOp::PauliX { target: bit })?;
        }
    }
    // last word is 10…0, so bits 0..n-1 are still flipped
    for b in 0..n - 1 {
        circuit.push(Stage::Oracle, GateOp::PauliX { target: b })?;
    }
    Ok(())
}

fn check_image(layout: &RegisterLayout, phases: &PhaseImage) -> Result<()> {
    if phases.n() != layout.n() {
        return Err(Error::ShapeMismatch(format!(
            "phase image has n={}, layout has n={}",
            phases.n(),
            layout.n()
        )));
    }
    Ok(())
}

/// Controlled `U_img^{2^k}` fragment with per-pixel X preparation.
pub fn build_naive_oracle(
    layout: &RegisterLayout,
    phases: &PhaseImage,
    k: usize,
) -> Result<Circuit> {
    check_image(layout, phases)?;
    let mut circuit = Circuit::new(*layout);
    emit_naive(&mut circuit, phases.theta(), k)?;
    Ok(circuit)
}

/// Controlled `U_img^{2^k}` fragment using a Gray-code traversal.
pub fn build_gray_oracle(
    layout: &RegisterLayout,
    phases: &PhaseImage,
    k: usize,
) -> Result<Circuit> {
    check_image(layout, phases)?;
    let mut circuit = Circuit::new(*layout);
    emit_gray(&mut circuit, phases.theta(), k)?;
    Ok(circuit)
}

/// Inverse QFT on `register` (least-significant qubit first): bit-reversal
/// swaps, then per qubit the controlled phase corrections and a Hadamard.
pub fn inverse_qft_ops(register: &[usize]) -> Vec<GateOp> {
    let q = register.len();
    let mut ops = Vec::with_capacity(q * (q + 2) / 2);
    for i in 0..q / 2 {
        ops.push(GateOp::Swap {
            a: register[i],
            b: register[q - 1 - i],
        });
    }
    for i in 0..q {
        for j in 0..i {
            ops.push(GateOp::ControlledPhase {
                controls: vec![register[j]],
                target: register[i],
                angle: -PI / (1u64 << (i - j)) as f64,
            });
        }
        ops.push(GateOp::Hadamard {
            target: register[i],
        });
    }
    ops
}

/// Full pipeline with the default Gray oracle and fused phases.
pub fn build_qpipe(layout: &RegisterLayout, images: &[PhaseImage]) -> Result<Circuit> {
    build_qpipe_with(layout, images, QpipeOptions::default())
}

/// Hadamards on every qubit, one oracle pass per estimation qubit with angle
/// scaled by `2^k`, then the inverse QFT on the estimation register.
pub fn build_qpipe_with(
    layout: &RegisterLayout,
    images: &[PhaseImage],
    options: QpipeOptions,
) -> Result<Circuit> {
    if images.is_empty() {
        return Err(Error::ShapeMismatch("at least one phase image is required".into()));
    }
    for image in images {
        check_image(layout, image)?;
    }
    let mut circuit = Circuit::new(*layout);
    for qubit in 0..layout.num_qubits() {
        circuit.push(Stage::Prepare, GateOp::Hadamard { target: qubit })?;
    }

    let blocks: Vec<Vec<f64>> = match options.fusion {
        Fusion::Fused => {
            let mut sum = vec![0.0; layout.positions()];
            for image in images {
                for (s, t) in sum.iter_mut().zip(image.theta()) {
                    *s += t;
                }
            }
            vec![sum]
        }
        Fusion::Sequential => images.iter().map(|i| i.theta().to_vec()).collect(),
    };

    for theta in &blocks {
        for k in 0..layout.q() {
            match options.oracle {
                OracleKind::Naive => emit_naive(&mut circuit, theta, k)?,
                OracleKind::Gray => emit_gray(&mut circuit, theta, k)?,
            }
        }
    }

    for op in inverse_qft_ops(&layout.estimation_qubits()) {
        circuit.push(Stage::InverseQft, op)?;
    }
    Ok(circuit)
}

/// Raw op counts over some part of a circuit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateTally {
    pub hadamard: usize,
    pub pauli_x: usize,
    pub swap: usize,
    pub controlled_phase: usize,
    /// Number of controlled-phase ops per control count.
    pub cp_arity: BTreeMap<usize, usize>,
}

impl GateTally {
    pub fn total(&self) -> usize {
        self.hadamard + self.pauli_x + self.swap + self.controlled_phase
    }

    fn add(&mut self, op: &GateOp) {
        match op {
            GateOp::Hadamard { .. } => self.hadamard += 1,
            GateOp::PauliX { .. } => self.pauli_x += 1,
            GateOp::Swap { .. } => self.swap += 1,
            GateOp::ControlledPhase { controls, .. } => {
                self.controlled_phase += 1;
                *self.cp_arity.entry(controls.len()).or_default() += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CircuitTally {
    pub total: GateTally,
    pub by_stage: BTreeMap<Stage, GateTally>,
}

impl CircuitTally {
    pub fn stage(&self, stage: Stage) -> GateTally {
        self.by_stage.get(&stage).cloned().unwrap_or_default()
    }
}

pub fn count_gates(circuit: &Circuit) -> CircuitTally {
    let mut tally = CircuitTally::default();
    for (stage, range) in circuit.stages() {
        let entry = tally.by_stage.entry(*stage).or_default();
        for op in &circuit.ops()[range.clone()] {
            entry.add(op);
            tally.total.add(op);
        }
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasemap::{MappingMode, PhaseMapping};
    use crate::statevector::DEFAULT_QUBIT_CAP;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mapping() -> PhaseMapping {
        PhaseMapping::new(MappingMode::FullTurn, 1.0).unwrap()
    }

    fn phases(n: usize, theta: Vec<f64>) -> PhaseImage {
        PhaseImage::from_turns(n, theta, mapping()).unwrap()
    }

    #[test]
    fn gray_sequence_examples() {
        let words: Vec<usize> = gray_sequence(2).unwrap().iter().map(|s| s.code_word).collect();
        assert_eq!(words, vec![0, 1, 3, 2]);

        let seq = gray_sequence(1).unwrap();
        assert_eq!(seq.iter().map(|s| s.code_word).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(seq[0].transition_bit, Some(0));
        assert_eq!(seq[1].transition_bit, None);

        let seq = gray_sequence(3).unwrap();
        let last = seq.last().unwrap().code_word;
        assert_eq!(last, 0b100);
        assert_eq!((0..3).filter(|b| last >> b & 1 == 0).count(), 2);

        assert!(gray_sequence(0).is_err());
        assert!(gray_sequence(MAX_POSITION_QUBITS + 1).is_err());
    }

    #[test]
    fn gray_sequence_visits_every_word_once() {
        for n in 1..=10 {
            let seq = gray_sequence(n).unwrap();
            let mut seen = vec![false; 1 << n];
            for (i, step) in seq.iter().enumerate() {
                assert_eq!(step.step, i);
                assert!(!seen[step.code_word]);
                seen[step.code_word] = true;
                if let Some(bit) = step.transition_bit {
                    assert_eq!(step.code_word ^ seq[i + 1].code_word, 1 << bit);
                }
            }
            assert!(seen.into_iter().all(|s| s));
            assert_eq!(seq.last().unwrap().code_word, 1 << (n - 1));
        }
    }

    #[test]
    fn naive_oracle_two_pixel_case() {
        let layout = RegisterLayout::new(1, 1).unwrap();
        let c = build_naive_oracle(&layout, &phases(1, vec![0.0, 0.25]), 0).unwrap();
        assert_eq!(
            c.ops(),
            &[GateOp::ControlledPhase {
                controls: vec![layout.estimation_qubit(0)],
                target: 0,
                angle: PI / 2.0,
            }]
        );
    }

    #[test]
    fn zero_image_oracles() {
        let layout = RegisterLayout::new(1, 2).unwrap();
        let zero = phases(2, vec![0.0; 4]);
        assert!(build_naive_oracle(&layout, &zero, 0).unwrap().is_empty());

        let gray = build_gray_oracle(&layout, &zero, 0).unwrap();
        let t = count_gates(&gray).total;
        assert_eq!(t.pauli_x, 2 * 2 + 4 - 2);
        assert_eq!(t.controlled_phase, 0);
        // the bare traversal is the identity
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for basis in 0..8 {
            let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 8];
            amps[basis] = num_complex::Complex64::new(rng.random(), 0.0);
            let orig = StateVector::from_amplitudes(amps).unwrap();
            let mut s = orig.clone();
            gray.apply_to(&mut s).unwrap();
            assert_eq!(s, orig);
        }
    }

    #[test]
    fn four_pixel_counts() {
        let layout = RegisterLayout::new(1, 2).unwrap();
        let p = phases(2, vec![0.1, 0.2, 0.3, 0.4]);
        let naive = count_gates(&build_naive_oracle(&layout, &p, 0).unwrap()).total;
        assert_eq!((naive.pauli_x, naive.controlled_phase), (8, 4));
        let gray = count_gates(&build_gray_oracle(&layout, &p, 0).unwrap()).total;
        assert_eq!((gray.pauli_x, gray.controlled_phase), (6, 4));
        assert_eq!(gray.cp_arity.get(&2), Some(&4));
    }

    #[test]
    fn gray_oracle_layout_matches_traversal() {
        // two initial X, CP, X, CP, X, CP, X, CP, one final X
        let layout = RegisterLayout::new(1, 2).unwrap();
        let c = build_gray_oracle(&layout, &phases(2, vec![0.1, 0.2, 0.3, 0.4]), 0).unwrap();
        let shape: String = c
            .ops()
            .iter()
            .map(|op| match op {
                GateOp::PauliX { .. } => 'X',
                GateOp::ControlledPhase { .. } => 'P',
                _ => '?',
            })
            .collect();
        assert_eq!(shape, "XXPXPXPXPX");
    }

    #[test]
    fn oracle_rejects_bad_input() {
        let layout = RegisterLayout::new(2, 2).unwrap();
        let p = phases(1, vec![0.1, 0.2]);
        assert!(build_gray_oracle(&layout, &p, 0).is_err());
        let p = phases(2, vec![0.1, 0.2, 0.3, 0.4]);
        assert!(build_gray_oracle(&layout, &p, 2).is_err());
        assert!(PhaseImage::from_turns(1, vec![f64::INFINITY, 0.0], mapping()).is_err());
        let mut c = Circuit::new(layout);
        assert!(emit_naive(&mut c, &[0.1, f64::NAN, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn qft_gate_count() {
        for q in 1..=10 {
            let ops = inverse_qft_ops(&(0..q).collect::<Vec<_>>());
            assert_eq!(ops.len(), q * (q + 2) / 2, "q={q}");
        }
    }

    #[test]
    fn qpipe_x_tally() {
        let layout = RegisterLayout::new(8, 6).unwrap();
        let theta: Vec<f64> = (0..64).map(|i| (i + 1) as f64 / 256.0).collect();
        let c = build_qpipe(&layout, &[phases(6, theta)]).unwrap();
        let tally = count_gates(&c);
        assert_eq!(tally.total.pauli_x, 592);
        assert_eq!(tally.stage(Stage::Oracle).controlled_phase, 8 * 64);
        assert_eq!(tally.stage(Stage::Prepare).hadamard, 14);
        assert_eq!(tally.stage(Stage::InverseQft).total(), 8 * 10 / 2);
    }

    #[test]
    fn empty_circuit_counts_nothing() {
        let c = Circuit::new(RegisterLayout::new(1, 1).unwrap());
        assert_eq!(count_gates(&c), CircuitTally::default());
        assert_eq!(count_gates(&c).total.total(), 0);
    }

    #[test]
    fn qpipe_rejects_mismatched_images() {
        let layout = RegisterLayout::new(2, 2).unwrap();
        let a = phases(2, vec![0.0; 4]);
        let b = phases(1, vec![0.0; 2]);
        assert!(build_qpipe(&layout, &[a, b]).is_err());
        assert!(build_qpipe(&layout, &[]).is_err());
    }

    #[test]
    fn exact_phases_decode_deterministically() {
        let layout = RegisterLayout::new(3, 2).unwrap();
        let bins = [5usize, 0, 3, 7];
        let theta: Vec<f64> = bins.iter().map(|b| *b as f64 / 8.0).collect();
        let state = build_qpipe(&layout, &[phases(2, theta)])
            .unwrap()
            .simulate(DEFAULT_QUBIT_CAP)
            .unwrap();
        let m = crate::statevector::marginal_distribution(&state, &layout).unwrap();
        for (x, &b) in bins.iter().enumerate() {
            assert!((m.prob(b, x) - 0.25).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn fusion_cancellation_suppresses_phase_gates() {
        let layout = RegisterLayout::new(2, 2).unwrap();
        let a = phases(2, vec![0.1, 0.2, 0.0, 0.4]);
        let neg = crate::phasemap::negate_phases(&a);
        let c = build_qpipe(&layout, &[a.clone(), neg.clone()]).unwrap();
        assert_eq!(count_gates(&c).stage(Stage::Oracle).controlled_phase, 0);

        let seq = build_qpipe_with(
            &layout,
            &[a, neg],
            QpipeOptions {
                fusion: Fusion::Sequential,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(count_gates(&seq).stage(Stage::Oracle).controlled_phase, 2 * 2 * 3);
    }

    #[test]
    fn text_round_trip() {
        let layout = RegisterLayout::new(3, 2).unwrap();
        let p = phases(2, vec![0.1, 1.0 / 3.0, 0.0, 0.77]);
        let c = build_qpipe(&layout, &[p]).unwrap();
        let text = c.to_text();
        assert!(text.lines().any(|l| l.starts_with("CP ")));
        assert!(text.contains("# stage inverse-qft"));
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);

        assert!(Circuit::from_text("H 0\n").is_err());
        assert!(Circuit::from_text("# qpipe circuit q=1 n=1\nZ 0\n").is_err());
        assert!(Circuit::from_text("# qpipe circuit q=1 n=1\nH 7\n").is_err());
        assert!(Circuit::from_text("# qpipe circuit q=1 n=1\nH 0 1\n").is_err());
    }

    #[test]
    fn builders_are_deterministic() {
        let layout = RegisterLayout::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let theta: Vec<f64> = (0..8).map(|_| rng.random()).collect();
        let a = build_qpipe(&layout, &[phases(3, theta.clone())]).unwrap();
        let b = build_qpipe(&layout, &[phases(3, theta)]).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}
