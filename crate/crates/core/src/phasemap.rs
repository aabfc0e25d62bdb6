//! Classical pre-processing: intensity to phase mapping, flattening with zero
//! padding, image shifts for finite differences and phase arithmetic.
//!
//! Phases are stored as fractions of a full turn. Radians only appear at the
//! circuit boundary.

use serde::Serialize;

use crate::error::{Error, Result};

/// Grayscale image, row-major, nonnegative finite intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    bit_depth_hint: Option<u32>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.is_empty() {
            return Err(Error::EmptyImage);
        }
        if width * height != pixels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        for (index, &value) in pixels.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Intensity {
                    index,
                    value,
                    reason: "intensities must be finite and nonnegative".into(),
                });
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
            bit_depth_hint: None,
        })
    }

    pub fn with_bit_depth(mut self, bits: u32) -> Self {
        self.bit_depth_hint = Some(bits);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn bit_depth_hint(&self) -> Option<u32> {
        self.bit_depth_hint
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn max_intensity(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    /// `2^bits` when a bit depth is known, otherwise `max + 1`.
    pub fn default_intensity_range(&self) -> f64 {
        match self.bit_depth_hint {
            Some(bits) => 2f64.powi(bits as i32),
            None => self.max_intensity() + 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingMode {
    /// `θ = I / I_range ∈ [0, 1)`.
    FullTurn,
    /// `θ = I / (2 I_range) ∈ [0, 0.5]`; decoded values are doubled.
    HalfTurn,
    /// `θ = I / I_range` wrapped into `[-0.5, 0.5)`.
    SignedCentered,
}

impl MappingMode {
    pub fn compensation(self) -> f64 {
        match self {
            MappingMode::HalfTurn => 2.0,
            MappingMode::FullTurn | MappingMode::SignedCentered => 1.0,
        }
    }
}

/// A mapping mode together with its normalization denominator `I_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMapping {
    pub mode: MappingMode,
    pub intensity_range: f64,
}

impl PhaseMapping {
    pub fn new(mode: MappingMode, intensity_range: f64) -> Result<Self> {
        if !intensity_range.is_finite() || intensity_range <= 0.0 {
            return Err(Error::IntensityRange(intensity_range));
        }
        Ok(Self {
            mode,
            intensity_range,
        })
    }

    pub fn compensation(&self) -> f64 {
        self.mode.compensation()
    }

    /// Phase fraction for one intensity.
    pub fn phase_of(&self, index: usize, intensity: f64) -> Result<f64> {
        if !intensity.is_finite() || intensity < 0.0 {
            return Err(Error::Intensity {
                index,
                value: intensity,
                reason: "intensities must be finite and nonnegative".into(),
            });
        }
        let range = self.intensity_range;
        match self.mode {
            MappingMode::FullTurn | MappingMode::SignedCentered if intensity >= range => {
                Err(Error::Intensity {
                    index,
                    value: intensity,
                    reason: format!("must be below the intensity range {range} or it aliases"),
                })
            }
            MappingMode::HalfTurn if intensity > range => Err(Error::Intensity {
                index,
                value: intensity,
                reason: format!("exceeds the intensity range {range}"),
            }),
            MappingMode::FullTurn => Ok(intensity / range),
            MappingMode::HalfTurn => Ok(intensity / (2.0 * range)),
            MappingMode::SignedCentered => {
                let t = intensity / range;
                Ok(if t >= 0.5 { t - 1.0 } else { t })
            }
        }
    }
}

/// Per-position phase fractions over a `2^n` position register.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseImage {
    n: usize,
    theta: Vec<f64>,
    mapping: PhaseMapping,
    pixel_count: usize,
}

impl PhaseImage {
    /// Builds a phase image directly from turns, zero-padding to `2^n`.
    pub fn from_turns(n: usize, mut theta: Vec<f64>, mapping: PhaseMapping) -> Result<Self> {
        let slots = 1usize << n;
        if theta.is_empty() || theta.len() > slots {
            return Err(Error::ShapeMismatch(format!(
                "{} phases do not fit a {n}-qubit position register",
                theta.len()
            )));
        }
        for (index, &value) in theta.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinitePhase { index, value });
            }
        }
        let pixel_count = theta.len();
        theta.resize(slots, 0.0);
        Ok(Self {
            n,
            theta,
            mapping,
            pixel_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All `2^n` entries, padding included.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn mapping(&self) -> PhaseMapping {
        self.mapping
    }

    pub fn mode(&self) -> MappingMode {
        self.mapping.mode
    }

    /// Positions holding real pixels; the rest are padding.
    pub fn pixel_count(&self) -> usize {
        self.pixel_count
    }

    pub fn pad_count(&self) -> usize {
        self.theta.len() - self.pixel_count
    }

    /// Number of entries with exactly nonzero phase.
    pub fn nonzero_count(&self) -> usize {
        self.theta.iter().filter(|t| **t != 0.0).count()
    }
}

/// Smallest `n ≥ 1` with `2^n ≥ count`.
pub fn position_qubits_for(count: usize) -> usize {
    (count.max(2).next_power_of_two().trailing_zeros()) as usize
}

/// Row-major flattening padded with zeros to the next power of two.
pub fn flatten_and_pad(image: &Image) -> Result<(usize, Vec<f64>)> {
    if image.is_empty() {
        return Err(Error::EmptyImage);
    }
    let n = position_qubits_for(image.len());
    let mut flat = image.pixels().to_vec();
    flat.resize(1 << n, 0.0);
    Ok((n, flat))
}

pub fn map_phases(image: &Image, mapping: PhaseMapping) -> Result<PhaseImage> {
    let (n, _) = flatten_and_pad(image)?;
    let theta = image
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &v)| mapping.phase_of(i, v))
        .collect::<Result<Vec<_>>>()?;
    PhaseImage::from_turns(n, theta, mapping)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Output `(r, c)` takes input `(r, c - 1)`.
    Horizontal,
    /// Output `(r, c)` takes input `(r - 1, c)`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftFill {
    /// Entering row or column is zero.
    #[default]
    Zero,
    /// Entering row or column wraps around from the opposite edge.
    Wrap,
}

pub fn shift_image(image: &Image, axis: Axis, fill: ShiftFill) -> Image {
    let (w, h) = (image.width(), image.height());
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let src = match (axis, fill) {
                (Axis::Horizontal, ShiftFill::Zero) => (c > 0).then(|| (r, c - 1)),
                (Axis::Horizontal, ShiftFill::Wrap) => Some((r, (c + w - 1) % w)),
                (Axis::Vertical, ShiftFill::Zero) => (r > 0).then(|| (r - 1, c)),
                (Axis::Vertical, ShiftFill::Wrap) => Some(((r + h - 1) % h, c)),
            };
            if let Some((sr, sc)) = src {
                out[r * w + c] = image.get(sr, sc);
            }
        }
    }
    Image {
        width: w,
        height: h,
        pixels: out,
        bit_depth_hint: image.bit_depth_hint,
    }
}

pub fn negate_phases(phases: &PhaseImage) -> PhaseImage {
    PhaseImage {
        theta: phases.theta.iter().map(|t| -t).collect(),
        ..phases.clone()
    }
}

/// Entrywise sum without modular reduction.
pub fn accumulate_phases(images: &[PhaseImage]) -> Result<PhaseImage> {
    let (first, rest) = images
        .split_first()
        .ok_or_else(|| Error::ShapeMismatch("no phase images to accumulate".into()))?;
    let mut acc = first.clone();
    for other in rest {
        if other.n != acc.n {
            return Err(Error::ShapeMismatch(format!(
                "position registers differ: n={} vs n={}",
                acc.n, other.n
            )));
        }
        if other.mapping != acc.mapping {
            return Err(Error::ShapeMismatch(format!(
                "incompatible mappings {:?} and {:?}",
                acc.mapping, other.mapping
            )));
        }
        for (a, b) in acc.theta.iter_mut().zip(&other.theta) {
            *a += b;
        }
        acc.pixel_count = acc.pixel_count.max(other.pixel_count);
    }
    Ok(acc)
}
