//! Seeded synthetic images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::phasemap::Image;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Left-to-right linear ramp over `[0, range)`.
    Ramp,
    /// Vertical bands alternating between `high` and 0 every `period` columns.
    Step { high: f64, period: usize },
    /// Ellipse phantom with multiplicative speckle `I·(1 + σg)`.
    PhantomSpeckle { sigma: f64 },
    /// Independent uniform samples in `[0, range)`.
    Uniform,
    /// Uniform integers in `0..=max_level`.
    Levels { max_level: u32 },
}

/// Generates a `width × height` image. `range` is the exclusive upper bound
/// for continuous generators; outputs never exceed it.
pub fn generate(
    generator: Generator,
    width: usize,
    height: usize,
    range: f64,
    seed: u64,
) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = range.next_down();
    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let v = match generator {
                Generator::Ramp => range * c as f64 / width as f64,
                Generator::Step { high, period } => {
                    if (c / period.max(1)) % 2 == 0 {
                        high
                    } else {
                        0.0
                    }
                }
                Generator::PhantomSpeckle { sigma } => {
                    let base = phantom(r, c, width, height) * range;
                    let g: f64 = StandardNormal.sample(&mut rng);
                    (base * (1.0 + sigma * g)).clamp(0.0, top)
                }
                Generator::Uniform => rng.random_range(0.0..range),
                Generator::Levels { max_level } => rng.random_range(0..=max_level) as f64,
            };
            pixels.push(v);
        }
    }
    Image::new(width, height, pixels)
}

/// Intensity fraction of a simple two-ellipse phantom at pixel `(r, c)`.
fn phantom(r: usize, c: usize, width: usize, height: usize) -> f64 {
    let x = (c as f64 + 0.5) / width as f64 * 2.0 - 1.0;
    let y = (r as f64 + 0.5) / height as f64 * 2.0 - 1.0;
    let inside = |cx: f64, cy: f64, a: f64, b: f64| ((x - cx) / a).powi(2) + ((y - cy) / b).powi(2) <= 1.0;
    if inside(0.15, 0.1, 0.25, 0.2) {
        0.9
    } else if inside(0.0, 0.0, 0.8, 0.9) {
        0.45
    } else {
        0.05
    }
}
