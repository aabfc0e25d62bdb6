//! Quantum edge detection.
//!
//! A directional gradient `I - shift(I)` is encoded in a single circuit by
//! fusing the phases of the image with the negated phases of its shifted copy.
//! The readout gives the difference directly; nothing is subtracted
//! classically. Classical finite differences with the same fill policy serve
//! as the baseline.
//!
//! Errors are measured on gradient magnitudes. A difference of exactly
//! `±I_range` sits on the `±π` phase boundary, where the sign is not
//! recoverable from the measurement.

use serde::Serialize;

use crate::circuit::build_qpipe;
use crate::error::{Error, Result};
use crate::phasemap::{
    map_phases, negate_phases, shift_image, Axis, Image, MappingMode, PhaseMapping, ShiftFill,
};
use crate::readout::{decode_table, DecodeSpec, Interpretation, ReadoutTable, ThresholdPolicy};
use crate::statevector::{marginal_distribution, Marginals, RegisterLayout, DEFAULT_QUBIT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Horizontal,
    Vertical,
    SobelMagnitude,
}

impl From<Axis> for Direction {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::Horizontal => Direction::Horizontal,
            Axis::Vertical => Direction::Vertical,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub direction: Direction,
}

impl GradientField {
    fn check_shape(&self, other: &GradientField) -> Result<()> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{} gradient fields",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QedConfig {
    /// Estimation qubits.
    pub q: usize,
    pub policy: ThresholdPolicy,
    pub mode: MappingMode,
    /// Normalization denominator; `None` uses the image default.
    pub intensity_range: Option<f64>,
    pub fill: ShiftFill,
    #[serde(skip)]
    pub qubit_cap: usize,
    pub include_annihilated_as_zero: bool,
}

impl Default for QedConfig {
    fn default() -> Self {
        Self {
            q: 8,
            policy: ThresholdPolicy::dynamic(),
            mode: MappingMode::HalfTurn,
            intensity_range: None,
            fill: ShiftFill::Zero,
            qubit_cap: DEFAULT_QUBIT_CAP,
            include_annihilated_as_zero: false,
        }
    }
}

impl QedConfig {
    pub fn mapping_for(&self, image: &Image) -> Result<PhaseMapping> {
        let range = self
            .intensity_range
            .unwrap_or_else(|| image.default_intensity_range());
        PhaseMapping::new(self.mode, range)
    }
}

pub fn classical_gradient(image: &Image, axis: Axis, fill: ShiftFill) -> GradientField {
    let shifted = shift_image(image, axis, fill);
    GradientField {
        width: image.width(),
        height: image.height(),
        values: image
            .pixels()
            .iter()
            .zip(shifted.pixels())
            .map(|(a, b)| a - b)
            .collect(),
        direction: axis.into(),
    }
}

/// Simulated measurement statistics for one directional gradient. Decoding
/// can be repeated with different thresholds without re-simulating.
#[derive(Debug, Clone)]
pub struct GradientEncoding {
    pub axis: Axis,
    pub width: usize,
    pub height: usize,
    pub mapping: PhaseMapping,
    pub marginals: Marginals,
}

impl GradientEncoding {
    pub fn simulate(image: &Image, axis: Axis, config: &QedConfig) -> Result<Self> {
        let mapping = config.mapping_for(image)?;
        let shifted = shift_image(image, axis, config.fill);
        let base = map_phases(image, mapping)?;
        let moved = negate_phases(&map_phases(&shifted, mapping)?);
        let layout = RegisterLayout::new(config.q, base.n())?;
        if layout.num_qubits() > config.qubit_cap {
            return Err(Error::QubitCap {
                requested: layout.num_qubits(),
                cap: config.qubit_cap,
            });
        }
        let circuit = build_qpipe(&layout, &[base, moved])?;
        let state = circuit.simulate(config.qubit_cap)?;
        Ok(Self {
            axis,
            width: image.width(),
            height: image.height(),
            mapping,
            marginals: marginal_distribution(&state, &layout)?,
        })
    }

    pub fn decode(&self, policy: &ThresholdPolicy) -> Result<QuantumGradient> {
        let spec = DecodeSpec::new(self.mapping, Interpretation::Signed);
        let table = decode_table(&self.marginals, policy, &spec, self.width * self.height)?;
        let values = table.rows.iter().map(|r| r.decoded.unwrap_or(0.0)).collect();
        let annihilated = table.rows.iter().map(|r| r.annihilated).collect();
        Ok(QuantumGradient {
            field: GradientField {
                width: self.width,
                height: self.height,
                values,
                direction: self.axis.into(),
            },
            annihilated,
            table,
        })
    }
}

#[derive(Debug, Clone)]
pub struct QuantumGradient {
    /// Signed gradient; annihilated pixels hold 0.
    pub field: GradientField,
    pub annihilated: Vec<bool>,
    pub table: ReadoutTable,
}

impl QuantumGradient {
    pub fn annihilated_count(&self) -> usize {
        self.annihilated.iter().filter(|a| **a).count()
    }
}

pub fn quantum_gradient(image: &Image, axis: Axis, config: &QedConfig) -> Result<QuantumGradient> {
    GradientEncoding::simulate(image, axis, config)?.decode(&config.policy)
}

/// `sqrt(|gx|² + |gy|²)` per pixel.
pub fn sobel_fuse(gx: &GradientField, gy: &GradientField) -> Result<GradientField> {
    gx.check_shape(gy)?;
    Ok(GradientField {
        width: gx.width,
        height: gx.height,
        values: gx
            .values
            .iter()
            .zip(&gy.values)
            .map(|(a, b)| a.abs().hypot(b.abs()))
            .collect(),
        direction: Direction::SobelMagnitude,
    })
}

/// Per-pixel `||classical| - |quantum||`; excluded pixels are `None`.
pub fn abs_errors(
    classical: &GradientField,
    quantum: &GradientField,
    annihilated: &[bool],
    include_annihilated_as_zero: bool,
) -> Result<Vec<Option<f64>>> {
    classical.check_shape(quantum)?;
    Ok(classical
        .values
        .iter()
        .zip(&quantum.values)
        .enumerate()
        .map(|(i, (c, q))| {
            let dead = annihilated.get(i).copied().unwrap_or(false);
            match (dead, include_annihilated_as_zero) {
                (true, false) => None,
                (true, true) => Some(c.abs()),
                (false, _) => Some((c.abs() - q.abs()).abs()),
            }
        })
        .collect())
}

/// Mean absolute error over included pixels. Zero when nothing is included.
pub fn mae(
    classical: &GradientField,
    quantum: &GradientField,
    annihilated: &[bool],
    include_annihilated_as_zero: bool,
) -> Result<f64> {
    let errs = abs_errors(classical, quantum, annihilated, include_annihilated_as_zero)?;
    let included: Vec<f64> = errs.into_iter().flatten().collect();
    if included.is_empty() {
        return Ok(0.0);
    }
    Ok(included.iter().sum::<f64>() / included.len() as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct QedReport {
    #[serde(skip)]
    pub classical: GradientField,
    #[serde(skip)]
    pub quantum: GradientField,
    pub direction: Direction,
    pub mae: f64,
    pub max_abs_error: f64,
    #[serde(skip)]
    pub per_pixel_abs_error: Vec<Option<f64>>,
    pub annihilated_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QedRun {
    pub config: QedConfig,
    pub intensity_range: f64,
    pub threshold: f64,
    pub width: usize,
    pub height: usize,
    pub results: Vec<QedReport>,
}

impl QedRun {
    pub fn report(&self, direction: Direction) -> Option<&QedReport> {
        self.results.iter().find(|r| r.direction == direction)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn build_report(
    classical: GradientField,
    quantum: GradientField,
    annihilated: &[bool],
    include: bool,
) -> Result<QedReport> {
    let per_pixel = abs_errors(&classical, &quantum, annihilated, include)?;
    let mae = mae(&classical, &quantum, annihilated, include)?;
    Ok(QedReport {
        direction: quantum.direction,
        max_abs_error: per_pixel.iter().flatten().copied().fold(0.0, f64::max),
        per_pixel_abs_error: per_pixel,
        annihilated_count: annihilated.iter().filter(|a| **a).count(),
        classical,
        quantum,
        mae,
    })
}

/// Runs the requested directions, plus the magnitude fusion when `sobel` is
/// set (which needs both directions and adds them if missing).
pub fn run_qed(image: &Image, config: &QedConfig, axes: &[Axis], sobel: bool) -> Result<QedRun> {
    let mut wanted: Vec<Axis> = axes.to_vec();
    if sobel {
        for axis in [Axis::Horizontal, Axis::Vertical] {
            if !wanted.contains(&axis) {
                wanted.push(axis);
            }
        }
    }
    let mapping = config.mapping_for(image)?;
    let n = crate::phasemap::position_qubits_for(image.len());
    let threshold = config.policy.resolve(n)?;
    let include = config.include_annihilated_as_zero;

    let mut results = Vec::new();
    let mut directional = Vec::new();
    for &axis in &wanted {
        let quantum = quantum_gradient(image, axis, config)?;
        let classical = classical_gradient(image, axis, config.fill);
        results.push(build_report(
            classical.clone(),
            quantum.field.clone(),
            &quantum.annihilated,
            include,
        )?);
        directional.push((axis, classical, quantum));
    }

    if sobel {
        let pick = |a: Axis| directional.iter().find(|(axis, _, _)| *axis == a).unwrap();
        let (_, cx, qx) = pick(Axis::Horizontal);
        let (_, cy, qy) = pick(Axis::Vertical);
        let dead: Vec<bool> = qx
            .annihilated
            .iter()
            .zip(&qy.annihilated)
            .map(|(a, b)| *a || *b)
            .collect();
        results.push(build_report(
            sobel_fuse(cx, cy)?,
            sobel_fuse(&qx.field, &qy.field)?,
            &dead,
            include,
        )?);
    }

    Ok(QedRun {
        config: *config,
        intensity_range: mapping.intensity_range,
        threshold,
        width: image.width(),
        height: image.height(),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(w: usize, h: usize, px: Vec<f64>) -> Image {
        Image::new(w, h, px).unwrap()
    }

    fn step_image() -> Image {
        let row = [200.0, 200.0, 0.0, 0.0];
        img(4, 4, row.iter().cycle().take(16).copied().collect())
    }

    #[test]
    fn classical_examples() {
        let c = img(3, 3, vec![5.0; 9]);
        let g = classical_gradient(&c, Axis::Horizontal, ShiftFill::Zero);
        for r in 0..3 {
            assert_eq!(g.get(r, 0), 5.0);
            assert_eq!(g.get(r, 1), 0.0);
            assert_eq!(g.get(r, 2), 0.0);
        }
        let wrapped = classical_gradient(&c, Axis::Vertical, ShiftFill::Wrap);
        assert!(wrapped.values.iter().all(|v| *v == 0.0));

        let row = [0.0, 0.0, 200.0, 200.0];
        let s = img(4, 2, row.iter().cycle().take(8).copied().collect());
        let gx = classical_gradient(&s, Axis::Horizontal, ShiftFill::Zero);
        assert_eq!(&gx.values[..4], &[0.0, 0.0, 200.0, 0.0]);
        let gy = classical_gradient(&s, Axis::Vertical, ShiftFill::Wrap);
        let m = sobel_fuse(&gx, &gy).unwrap();
        assert_eq!(m.values, gx.values.iter().map(|v| v.abs()).collect::<Vec<_>>());
    }

    #[test]
    fn sobel_examples() {
        let f = |v: Vec<f64>| GradientField {
            width: v.len(),
            height: 1,
            values: v,
            direction: Direction::Horizontal,
        };
        let m = sobel_fuse(&f(vec![3.0, -2.0]), &f(vec![-4.0, 0.0])).unwrap();
        assert_eq!(m.values, vec![5.0, 2.0]);
        let m2 = sobel_fuse(&f(vec![-4.0, 0.0]), &f(vec![3.0, -2.0])).unwrap();
        assert_eq!(m.values, m2.values);
        assert!(sobel_fuse(&f(vec![1.0]), &f(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn mae_examples() {
        let f = |v: Vec<f64>| GradientField {
            width: v.len(),
            height: 1,
            values: v,
            direction: Direction::Horizontal,
        };
        let a = f(vec![1.0, 2.0, 3.0]);
        assert_eq!(mae(&a, &a, &[], false).unwrap(), 0.0);
        assert_eq!(mae(&a, &f(vec![2.0, 3.0, 4.0]), &[], false).unwrap(), 1.0);
        // annihilated pixel excluded, or counted as a zero reading
        let q = f(vec![1.0, 0.0, 3.0]);
        assert_eq!(mae(&a, &q, &[false, true, false], false).unwrap(), 0.0);
        assert!((mae(&a, &q, &[false, true, false], true).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_image_gives_zero_field() {
        let z = img(4, 4, vec![0.0; 16]);
        let config = QedConfig {
            q: 4,
            intensity_range: Some(16.0),
            ..Default::default()
        };
        let run = run_qed(&z, &config, &[Axis::Horizontal], false).unwrap();
        let r = &run.results[0];
        assert!(r.quantum.values.iter().all(|v| *v == 0.0));
        assert_eq!(r.mae, 0.0);
    }

    #[test]
    fn half_turn_recovers_the_step_exactly() {
        let config = QedConfig {
            q: 8,
            intensity_range: Some(256.0),
            ..Default::default()
        };
        let run = run_qed(&step_image(), &config, &[Axis::Horizontal], false).unwrap();
        let r = &run.results[0];
        assert!(r.mae <= 1e-9, "mae {}", r.mae);
        assert!((r.quantum.get(0, 0) - 200.0).abs() < 1e-9);
        assert!((r.quantum.get(0, 2) + 200.0).abs() < 1e-9);
    }

    #[test]
    fn full_turn_aliases_the_step() {
        let config = QedConfig {
            q: 8,
            mode: MappingMode::FullTurn,
            intensity_range: Some(256.0),
            ..Default::default()
        };
        let run = run_qed(&step_image(), &config, &[Axis::Horizontal], false).unwrap();
        let r = &run.results[0];
        // 200 wraps to 200 - 256 = -56
        assert!((r.quantum.get(0, 0) + 56.0).abs() < 1e-9);
        assert!(r.max_abs_error >= 50.0);
    }

    #[test]
    fn quantized_image_is_exact_in_every_direction() {
        let px: Vec<f64> = (0..64).map(|i| ((i * 7 + i / 8 * 3) % 17) as f64).collect();
        let config = QedConfig {
            q: 8,
            intensity_range: Some(16.0),
            ..Default::default()
        };
        let run = run_qed(&img(8, 8, px), &config, &[Axis::Horizontal, Axis::Vertical], true).unwrap();
        assert_eq!(run.results.len(), 3);
        for r in &run.results {
            assert!(r.mae <= 1e-9, "{:?} mae {}", r.direction, r.mae);
        }
        let json = run.to_json();
        assert!(json.contains("\"mae\": 0.0"));
        assert!(json.contains("\"sobel-magnitude\""));
    }

    #[test]
    fn cap_is_checked_before_simulation() {
        let config = QedConfig {
            q: 8,
            qubit_cap: 10,
            ..Default::default()
        };
        let im = img(4, 4, vec![1.0; 16]);
        assert!(matches!(
            quantum_gradient(&im, Axis::Horizontal, &config),
            Err(Error::QubitCap { requested: 12, cap: 10 })
        ));
    }
}
