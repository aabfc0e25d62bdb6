//! Quantum edge detection on a noisy phantom, compared to the classical result.

use qpipe::cli::synth::{generate, Generator};
use qpipe::phasemap::Axis;
use qpipe::qed::{run_qed, QedConfig};

fn main() -> qpipe::Result<()> {
    let image = generate(Generator::PhantomSpeckle { sigma: 0.1 }, 16, 16, 256.0, 7)?;
    let config = QedConfig {
        q: 8,
        intensity_range: Some(256.0),
        ..Default::default()
    };
    let run = run_qed(&image, &config, &[Axis::Horizontal, Axis::Vertical], true)?;
    println!("{}", run.to_json());
    Ok(())
}
