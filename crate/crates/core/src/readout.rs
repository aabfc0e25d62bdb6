//! Classical decoding of the estimation register.
//!
//! The measured distribution at each position is filtered against a joint
//! probability threshold, unwrapped around its peak and averaged. Signed
//! interpretation and mapping compensation then turn the mean bin into an
//! intensity.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phasemap::PhaseMapping;
use crate::statevector::Marginals;

/// Side-lobe constant `η / W` for capturing the second lateral bin,
/// `1 / (4π²) ≈ 0.025`.
pub const DIRICHLET_CONSTANT: f64 = 0.025;

/// Probability of measuring bin `k` on a `q`-qubit estimation register when
/// the encoded phase is `theta` turns.
pub fn dirichlet_kernel_prob(theta: f64, k: usize, q: usize) -> f64 {
    let bins = (1u64 << q) as f64;
    let mut delta = theta - k as f64 / bins;
    delta -= delta.round();
    let scaled = delta * bins;
    if delta.abs() < 1e-12 {
        return 1.0;
    }
    if (scaled - scaled.round()).abs() < 1e-9 {
        return 0.0;
    }
    let num = (PI * scaled).sin();
    let den = bins * (PI * delta).sin();
    (num / den).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThresholdPolicy {
    /// Drop bins whose joint probability is below `p`.
    Fixed { p: f64 },
    /// `P_th = η / (2^n · W)`.
    Dynamic { eta: f64, width: f64 },
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self::dynamic()
    }
}

impl ThresholdPolicy {
    pub fn fixed(p: f64) -> Self {
        Self::Fixed { p }
    }

    /// Dynamic policy with `η / W` equal to [`DIRICHLET_CONSTANT`]. Only the
    /// ratio matters; `W` is kept at one bin.
    pub fn dynamic() -> Self {
        Self::Dynamic {
            eta: DIRICHLET_CONSTANT,
            width: 1.0,
        }
    }

    pub fn resolve(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Threshold("position register must have n >= 1".into()));
        }
        match *self {
            Self::Fixed { p } => {
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::Threshold(format!("fixed threshold {p} must be positive")));
                }
                Ok(p)
            }
            Self::Dynamic { eta, width } => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(Error::Threshold(format!("eta={eta} must lie in (0, 1]")));
                }
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::Threshold(format!("width={width} must be positive")));
                }
                Ok(eta / (2f64.powi(n as i32) * width))
            }
        }
    }
}

/// Whether the mean bin is read on `[0, 2^q)` or on `[-2^{q-1}, 2^{q-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    Unsigned,
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeSpec {
    pub mapping: PhaseMapping,
    pub interpretation: Interpretation,
}

impl DecodeSpec {
    pub fn new(mapping: PhaseMapping, interpretation: Interpretation) -> Self {
        Self {
            mapping,
            interpretation,
        }
    }

    /// Bin value to intensity units, including mode compensation.
    pub fn scale(&self, q: usize) -> f64 {
        self.mapping.compensation() * self.mapping.intensity_range / (1u64 << q) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PixelReadout {
    pub x: usize,
    /// `P(k | x)` for every bin, before thresholding.
    pub conditional: Vec<f64>,
    /// Weighted mean bin after unwrapping and interpretation.
    pub bin_mean: Option<f64>,
    pub decoded: Option<f64>,
    /// Conditional mass that survived the threshold.
    pub retained_mass: f64,
    pub annihilated: bool,
}

/// Decodes one position from its joint probabilities `P(k, x)`.
///
/// Returns the interpreted mean bin and the retained conditional mass.
pub fn decode_bins(
    pixel: usize,
    joint: &[f64],
    n: usize,
    threshold: f64,
    interpretation: Interpretation,
) -> Result<(f64, f64)> {
    let bins = joint.len();
    assert!(bins.is_power_of_two(), "bin count must be a power of two");
    let prior = 2f64.powi(n as i32);

    let mut peak: Option<(usize, f64)> = None;
    for (k, &p) in joint.iter().enumerate() {
        if p >= threshold && peak.is_none_or(|(_, best)| p > best) {
            peak = Some((k, p));
        }
    }
    let Some((peak, _)) = peak else {
        return Err(Error::SignalAnnihilated { pixel, threshold });
    };

    let half = (bins / 2) as i64;
    let (mut weighted, mut mass) = (0.0, 0.0);
    for (k, &p) in joint.iter().enumerate() {
        if p < threshold {
            continue;
        }
        let offset = (k as i64 - peak as i64 + half).rem_euclid(bins as i64) - half;
        let cond = p * prior;
        weighted += (peak as i64 + offset) as f64 * cond;
        mass += cond;
    }
    let mean = weighted / mass;
    let wrapped = match interpretation {
        Interpretation::Unsigned => mean.rem_euclid(bins as f64),
        Interpretation::Signed => (mean + half as f64).rem_euclid(bins as f64) - half as f64,
    };
    Ok((wrapped, mass))
}

/// Decodes one position into intensity units.
pub fn decode_pixel(
    pixel: usize,
    joint: &[f64],
    n: usize,
    threshold: f64,
    spec: &DecodeSpec,
) -> Result<f64> {
    let q = joint.len().trailing_zeros() as usize;
    let (mean, _) = decode_bins(pixel, joint, n, threshold, spec.interpretation)?;
    Ok(mean * spec.scale(q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutTable {
    pub q: usize,
    pub n: usize,
    pub threshold_used: f64,
    pub spec: DecodeSpec,
    pub rows: Vec<PixelReadout>,
}

impl ReadoutTable {
    pub fn annihilated_count(&self) -> usize {
        self.rows.iter().filter(|r| r.annihilated).count()
    }

    /// Decoded values with annihilated pixels as `None`.
    pub fn decoded(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.decoded).collect()
    }

    /// CSV with columns `x,row,col,decoded,retained_mass,annihilated`.
    /// Annihilated pixels leave `decoded` empty.
    pub fn to_csv(&self, width: usize) -> String {
        let mut out = String::from("x,row,col,decoded,retained_mass,annihilated\n");
        for r in &self.rows {
            let decoded = r.decoded.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.x,
                r.x / width,
                r.x % width,
                decoded,
                r.retained_mass,
                r.annihilated
            );
        }
        out
    }
}

/// Decodes the first `pixel_count` positions. Annihilation is recorded per
/// row instead of aborting.
pub fn decode_table(
    marginals: &Marginals,
    policy: &ThresholdPolicy,
    spec: &DecodeSpec,
    pixel_count: usize,
) -> Result<ReadoutTable> {
    let layout = *marginals.layout();
    let (q, n) = (layout.q(), layout.n());
    if pixel_count > layout.positions() {
        return Err(Error::ShapeMismatch(format!(
            "{pixel_count} pixels on a {}-position register",
            layout.positions()
        )));
    }
    let threshold = policy.resolve(n)?;
    let prior = layout.positions() as f64;
    let scale = spec.scale(q);
    let rows = (0..pixel_count)
        .map(|x| {
            let joint = marginals.column(x);
            let conditional: Vec<f64> = joint.iter().map(|p| p * prior).collect();
            match decode_bins(x, &joint, n, threshold, spec.interpretation) {
                Ok((mean, mass)) => PixelReadout {
                    x,
                    conditional,
                    bin_mean: Some(mean),
                    decoded: Some(mean * scale),
                    retained_mass: mass,
                    annihilated: false,
                },
                Err(Error::SignalAnnihilated { .. }) => PixelReadout {
                    x,
                    conditional,
                    bin_mean: None,
                    decoded: None,
                    retained_mass: 0.0,
                    annihilated: true,
                },
                Err(e) => unreachable!("decode_bins only fails on annihilation: {e}"),
            }
        })
        .collect();
    Ok(ReadoutTable {
        q,
        n,
        threshold_used: threshold,
        spec: *spec,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasemap::MappingMode;
    use proptest::prelude::*;

    fn joint_from_conditional(cond: &[f64], n: usize) -> Vec<f64> {
        cond.iter().map(|p| p / 2f64.powi(n as i32)).collect()
    }

    fn spec(mode: MappingMode, range: f64, interpretation: Interpretation) -> DecodeSpec {
        DecodeSpec::new(PhaseMapping::new(mode, range).unwrap(), interpretation)
    }

    #[test]
    fn kernel_exact_bins() {
        assert_eq!(dirichlet_kernel_prob(5.0 / 8.0, 5, 3), 1.0);
        assert_eq!(dirichlet_kernel_prob(5.0 / 8.0, 4, 3), 0.0);
        assert_eq!(dirichlet_kernel_prob(-3.0 / 8.0, 5, 3), 1.0);
        assert_eq!(dirichlet_kernel_prob(1.0 + 1.0 / 8.0, 1, 3), 1.0);
    }

    #[test]
    fn kernel_midpoint() {
        let expected = 1.0 / (64.0 * (PI / 16.0).sin().powi(2));
        assert!((expected - 0.410533).abs() < 1e-6);
        assert!((dirichlet_kernel_prob(1.0 / 16.0, 0, 3) - expected).abs() < 1e-12);
        assert!((dirichlet_kernel_prob(1.0 / 16.0, 1, 3) - expected).abs() < 1e-12);
        // approaches 4/π² as the register grows
        let wide = dirichlet_kernel_prob(0.5 / 1024.0, 0, 10);
        assert!((wide - 4.0 / (PI * PI)).abs() < 1e-5);
    }

    #[test]
    fn kernel_sums_to_one() {
        for q in 1..=8 {
            for &theta in &[0.0, 0.013, 0.25, 0.4999, 0.77, -0.3] {
                let total: f64 = (0..1usize << q).map(|k| dirichlet_kernel_prob(theta, k, q)).sum();
                assert!((total - 1.0).abs() < 1e-10, "q={q} θ={theta}");
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let dynamic = ThresholdPolicy::dynamic().resolve(9).unwrap();
        assert!((dynamic - 0.025 / 512.0).abs() < 1e-18);
        assert!((dynamic - 4.88e-5).abs() < 1e-7);
        assert!(dynamic < 1.0 / 512.0);
        assert!((ThresholdPolicy::dynamic().resolve(10).unwrap() - 2.44e-5).abs() < 1e-7);
        assert_eq!(ThresholdPolicy::fixed(0.001).resolve(3).unwrap(), 0.001);
        assert_eq!(ThresholdPolicy::fixed(0.001).resolve(12).unwrap(), 0.001);

        assert!(ThresholdPolicy::fixed(0.0).resolve(3).is_err());
        assert!(ThresholdPolicy::fixed(-1.0).resolve(3).is_err());
        assert!(ThresholdPolicy::Dynamic { eta: 0.0, width: 1.0 }.resolve(3).is_err());
        assert!(ThresholdPolicy::Dynamic { eta: 1.5, width: 1.0 }.resolve(3).is_err());
        assert!(ThresholdPolicy::Dynamic { eta: 0.5, width: 0.0 }.resolve(3).is_err());
        assert!(ThresholdPolicy::dynamic().resolve(0).is_err());
    }

    #[test]
    fn exact_bin_decodes_exactly() {
        let mut cond = vec![0.0; 8];
        cond[5] = 1.0;
        let joint = joint_from_conditional(&cond, 2);
        let s = spec(MappingMode::FullTurn, 8.0, Interpretation::Unsigned);
        assert_eq!(decode_pixel(0, &joint, 2, 1e-6, &s).unwrap(), 5.0);
    }

    #[test]
    fn leakage_midpoint_with_half_turn_compensation() {
        // θ halfway between bins 99 and 100 on q = 8
        let theta = 99.5 / 256.0;
        let cond: Vec<f64> = (0..256).map(|k| dirichlet_kernel_prob(theta, k, 8)).collect();
        assert!((cond[99] - cond[100]).abs() < 1e-12);
        let n = 6;
        let joint = joint_from_conditional(&cond, n);
        let threshold = ThresholdPolicy::dynamic().resolve(n).unwrap();
        let (mean, _) = decode_bins(0, &joint, n, threshold, Interpretation::Signed).unwrap();
        assert!((mean - 99.5).abs() < 1e-6);
        let s = spec(MappingMode::HalfTurn, 256.0, Interpretation::Signed);
        assert!((decode_pixel(0, &joint, n, threshold, &s).unwrap() - 199.0).abs() < 1e-5);

        // two bins holding all the mass
        let mut cond = vec![0.0; 256];
        cond[99] = 0.5;
        cond[100] = 0.5;
        let joint = joint_from_conditional(&cond, n);
        assert_eq!(decode_pixel(0, &joint, n, threshold, &s).unwrap(), 199.0);
    }

    #[test]
    fn top_bin_reads_negative_when_signed() {
        let mut cond = vec![0.0; 8];
        cond[7] = 1.0;
        let joint = joint_from_conditional(&cond, 1);
        let signed = spec(MappingMode::SignedCentered, 8.0, Interpretation::Signed);
        assert_eq!(decode_pixel(0, &joint, 1, 1e-3, &signed).unwrap(), -1.0);
        let half = spec(MappingMode::HalfTurn, 8.0, Interpretation::Signed);
        assert_eq!(decode_pixel(0, &joint, 1, 1e-3, &half).unwrap(), -2.0);
        let unsigned = spec(MappingMode::FullTurn, 8.0, Interpretation::Unsigned);
        assert_eq!(decode_pixel(0, &joint, 1, 1e-3, &unsigned).unwrap(), 7.0);
    }

    #[test]
    fn recentering_handles_the_seam() {
        // peak straddling 0 and 2^q - 1
        let theta = -0.25 / 16.0;
        let cond: Vec<f64> = (0..16).map(|k| dirichlet_kernel_prob(theta, k, 4)).collect();
        let joint = joint_from_conditional(&cond, 1);
        let (mean, _) = decode_bins(0, &joint, 1, 1e-9, Interpretation::Signed).unwrap();
        assert!(mean.abs() < 0.5, "mean {mean}");
        assert!(mean < 0.0);
    }

    #[test]
    fn annihilation_is_reported() {
        let cond = vec![1.0 / 8.0; 8];
        let joint = joint_from_conditional(&cond, 3);
        match decode_bins(4, &joint, 3, 0.5, Interpretation::Signed) {
            Err(Error::SignalAnnihilated { pixel, .. }) => assert_eq!(pixel, 4),
            other => panic!("expected annihilation, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn exactness_on_the_grid(bin in 0usize..256, n in 1usize..10) {
            let theta = bin as f64 / 256.0;
            let cond: Vec<f64> = (0..256).map(|k| dirichlet_kernel_prob(theta, k, 8)).collect();
            let joint = joint_from_conditional(&cond, n);
            let threshold = 0.5 / 2f64.powi(n as i32);
            let (mean, mass) = decode_bins(0, &joint, n, threshold, Interpretation::Unsigned).unwrap();
            prop_assert_eq!(mean, bin as f64);
            prop_assert_eq!(mass, 1.0);
        }

        #[test]
        fn shifting_all_mass_shifts_the_mean(
            frac in 0.0..1.0f64, base in 20usize..200, shift in 0usize..8
        ) {
            let q = 8;
            let n = 4;
            let threshold = ThresholdPolicy::dynamic().resolve(n).unwrap();
            let decode = |b: usize| {
                let theta = (b as f64 + frac) / 256.0;
                let cond: Vec<f64> = (0..256).map(|k| dirichlet_kernel_prob(theta, k, q)).collect();
                decode_bins(0, &joint_from_conditional(&cond, n), n, threshold, Interpretation::Unsigned)
                    .unwrap()
                    .0
            };
            prop_assert!((decode(base + shift) - decode(base) - shift as f64).abs() < 1e-9);
        }

        #[test]
        fn raising_threshold_never_adds_mass(
            theta in 0.0..1.0f64, t1 in 1e-7..1e-2f64, t2 in 1e-7..1e-2f64
        ) {
            let n = 3;
            let cond: Vec<f64> = (0..64).map(|k| dirichlet_kernel_prob(theta, k, 6)).collect();
            let joint = joint_from_conditional(&cond, n);
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            let mass = |t| decode_bins(0, &joint, n, t, Interpretation::Unsigned).map(|r| r.1).unwrap_or(0.0);
            prop_assert!(mass(hi) <= mass(lo) + 1e-15);
        }
    }

    #[test]
    fn threshold_above_baseline_annihilates_everything() {
        let n = 4;
        let baseline = 1.0 / 16.0;
        for &theta in &[0.0, 0.1, 0.5, 0.93] {
            let cond: Vec<f64> = (0..32).map(|k| dirichlet_kernel_prob(theta, k, 5)).collect();
            let joint = joint_from_conditional(&cond, n);
            assert!(decode_bins(0, &joint, n, baseline * 1.0001, Interpretation::Signed).is_err());
        }
    }
}
