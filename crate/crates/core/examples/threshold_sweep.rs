//! MAE against the readout threshold for a continuous-valued image.

use qpipe::cli::synth::{generate, Generator};
use qpipe::cli::threshold_sweep;
use qpipe::phasemap::Axis;
use qpipe::qed::QedConfig;

fn main() -> qpipe::Result<()> {
    let image = generate(Generator::Uniform, 16, 16, 256.0, 22)?;
    let config = QedConfig {
        intensity_range: Some(256.0),
        include_annihilated_as_zero: true,
        ..Default::default()
    };
    let thresholds = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    for row in threshold_sweep(&image, Axis::Horizontal, &config, &thresholds)? {
        println!("{:8} {:>9.1e}  mae {:8.4}  annihilated {}", row.label, row.threshold, row.mae, row.annihilated);
    }
    Ok(())
}
