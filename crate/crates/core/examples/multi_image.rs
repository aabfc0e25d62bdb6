//! Two images encoded in one circuit read out as their pixelwise sum.

use qpipe::circuit::{build_qpipe_with, count_gates, Fusion, OracleKind, QpipeOptions, Stage};
use qpipe::phasemap::map_phases;
use qpipe::readout::{decode_table, DecodeSpec, Interpretation};
use qpipe::statevector::marginal_distribution;
use qpipe::{Image, MappingMode, PhaseMapping, RegisterLayout, ThresholdPolicy};

fn main() -> qpipe::Result<()> {
    let mapping = PhaseMapping::new(MappingMode::HalfTurn, 16.0)?;
    let a = map_phases(&Image::new(2, 2, vec![1.0, 2.0, 3.0, 4.0])?, mapping)?;
    let b = map_phases(&Image::new(2, 2, vec![4.0, 3.0, 2.0, 1.0])?, mapping)?;
    let layout = RegisterLayout::new(7, 2)?;
    for fusion in [Fusion::Fused, Fusion::Sequential] {
        let opts = QpipeOptions { oracle: OracleKind::Gray, fusion };
        let circuit = build_qpipe_with(&layout, &[a.clone(), b.clone()], opts)?;
        let cps = count_gates(&circuit).stage(Stage::Oracle).controlled_phase;
        let marginals = marginal_distribution(&circuit.simulate(24)?, &layout)?;
        let spec = DecodeSpec::new(mapping, Interpretation::Signed);
        let table = decode_table(&marginals, &ThresholdPolicy::dynamic(), &spec, 4)?;
        let sums: Vec<f64> = table.rows.iter().filter_map(|r| r.decoded).collect();
        println!("{fusion:?}: {cps} oracle CPs, decoded sums {sums:?}");
    }
    Ok(())
}
