//! Encodes a small grid image, simulates it and decodes every pixel.

use qpipe::circuit::build_qpipe;
use qpipe::phasemap::map_phases;
use qpipe::readout::{decode_table, DecodeSpec, Interpretation};
use qpipe::statevector::{marginal_distribution, DEFAULT_QUBIT_CAP};
use qpipe::{Image, MappingMode, PhaseMapping, RegisterLayout, ThresholdPolicy};

fn main() -> qpipe::Result<()> {
    let image = Image::new(4, 2, vec![0.0, 3.0, 9.0, 15.0, 4.0, 8.0, 12.0, 1.0])?;
    let mapping = PhaseMapping::new(MappingMode::FullTurn, 16.0)?;
    let phases = map_phases(&image, mapping)?;
    let layout = RegisterLayout::new(6, phases.n())?;
    let circuit = build_qpipe(&layout, std::slice::from_ref(&phases))?;
    println!("{} qubits, {} gates", layout.num_qubits(), circuit.len());

    let state = circuit.simulate(DEFAULT_QUBIT_CAP)?;
    let marginals = marginal_distribution(&state, &layout)?;
    let spec = DecodeSpec::new(mapping, Interpretation::Unsigned);
    let table = decode_table(&marginals, &ThresholdPolicy::dynamic(), &spec, image.len())?;
    print!("{}", table.to_csv(image.width()));
    Ok(())
}
