//! Builds a Bell-like phase state by hand and checks the inverse QFT.

use qpipe::statevector::{StateVector, DEFAULT_QUBIT_CAP};

fn main() -> qpipe::Result<()> {
    let mut s = StateVector::zero(3, DEFAULT_QUBIT_CAP)?;
    for q in 0..3 {
        s.apply_hadamard(q)?;
    }
    // phase 2π·3/8 on the register basis |j> gives frequency 3 after the inverse QFT
    for q in 0..3 {
        s.apply_controlled_phase(&[], q, 2.0 * std::f64::consts::PI * 3.0 / 8.0 * (1 << q) as f64)?;
    }
    s.apply_inverse_qft(&[0, 1, 2])?;
    for (i, a) in s.amplitudes().iter().enumerate() {
        println!("|{i:03b}>  p = {:.6}", a.norm_sqr());
    }
    println!("norm = {:.12}", s.norm());
    Ok(())
}
