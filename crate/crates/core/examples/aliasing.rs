//! A 200 to 0 step wraps under the full-turn mapping and survives under half-turn.

use qpipe::cli::synth::{generate, Generator};
use qpipe::phasemap::Axis;
use qpipe::qed::{quantum_gradient, QedConfig};
use qpipe::MappingMode;

fn main() -> qpipe::Result<()> {
    let image = generate(Generator::Step { high: 200.0, period: 2 }, 4, 1, 256.0, 0)?;
    for mode in [MappingMode::FullTurn, MappingMode::HalfTurn] {
        let config = QedConfig {
            mode,
            intensity_range: Some(256.0),
            ..Default::default()
        };
        let g = quantum_gradient(&image, Axis::Horizontal, &config)?;
        println!("{mode:?}: {:?}", g.field.values);
    }
    Ok(())
}
