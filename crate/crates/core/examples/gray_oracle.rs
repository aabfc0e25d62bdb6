//! Compares the naive and Gray-code oracles for one estimation qubit.

use qpipe::circuit::{build_gray_oracle, build_naive_oracle, count_gates, gray_sequence};
use qpipe::phasemap::{MappingMode, PhaseImage, PhaseMapping};
use qpipe::RegisterLayout;

fn main() -> qpipe::Result<()> {
    let n = 3;
    for step in gray_sequence(n)? {
        println!("step {} word {:03b} flips {:?}", step.step, step.code_word, step.transition_bit);
    }
    let layout = RegisterLayout::new(1, n)?;
    let mapping = PhaseMapping::new(MappingMode::FullTurn, 8.0)?;
    let phases = PhaseImage::from_turns(n, (1..=8).map(|i| i as f64 / 9.0).collect(), mapping)?;
    let naive = count_gates(&build_naive_oracle(&layout, &phases, 0)?).total;
    let gray = count_gates(&build_gray_oracle(&layout, &phases, 0)?).total;
    println!("naive X = {}, Gray X = {}", naive.pauli_x, gray.pauli_x);
    println!("both use {} controlled phases", gray.controlled_phase);
    Ok(())
}
