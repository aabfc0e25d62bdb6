use std::f64::consts::PI;

use num_complex::Complex64;
use qpipe::circuit::{build_qpipe, build_qpipe_with, count_gates, Fusion, OracleKind, QpipeOptions, Stage};
use qpipe::complexity::{estimate_from_circuit, gray_counts, Method};
use qpipe::phasemap::{MappingMode, PhaseImage, PhaseMapping};
use qpipe::readout::{decode_table, dirichlet_kernel_prob, DecodeSpec, Interpretation, ThresholdPolicy};
use qpipe::statevector::{marginal_distribution, DEFAULT_QUBIT_CAP};
use qpipe::RegisterLayout;

fn turns() -> PhaseMapping {
    PhaseMapping::new(MappingMode::FullTurn, 1.0).unwrap()
}

#[test]
fn single_pixel_sixteenth_turn() {
    // pixel 0 carries 1/16 turn and lands in bin 1; pixel 1 carries none
    let layout = RegisterLayout::new(4, 1).unwrap();
    let phases = PhaseImage::from_turns(1, vec![1.0 / 16.0, 0.0], turns()).unwrap();
    let state = build_qpipe(&layout, &[phases]).unwrap().simulate(DEFAULT_QUBIT_CAP).unwrap();
    let amp = state.amplitudes()[layout.index(1, 0)];
    assert!((amp.norm_sqr() - 0.5).abs() < 1e-12, "{amp}");
    let m = marginal_distribution(&state, &layout).unwrap();
    assert!((m.prob(1, 0) - 0.5).abs() < 1e-12);
    assert!((m.prob(0, 1) - 0.5).abs() < 1e-12);
}

#[test]
fn kernel_matches_a_direct_sum() {
    for q in 1..=5 {
        for k in 0..1usize << q {
            for theta in [0.0, 0.013, 0.25, 0.49, 0.77] {
                let big = (1usize << q) as f64;
                let amp: Complex64 = (0..1usize << q)
                    .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 * (theta - k as f64 / big)))
                    .sum::<Complex64>()
                    / big;
                assert!((amp.norm_sqr() - dirichlet_kernel_prob(theta, k, q)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn formula_rows_match_ir_tallies() {
    for (q, n) in [(3, 2), (5, 4), (8, 6)] {
        let layout = RegisterLayout::new(q, n).unwrap();
        let pixels = 1usize << n;
        let theta: Vec<f64> = (0..pixels).map(|i| if i % 3 == 0 { 0.0 } else { i as f64 / 97.0 }).collect();
        let phases = PhaseImage::from_turns(n, theta, turns()).unwrap();
        let circuit = build_qpipe(&layout, std::slice::from_ref(&phases)).unwrap();
        let measured = estimate_from_circuit(Method::QPipeGray, &circuit, pixels as u64, phases.nonzero_count() as u64);
        let formula = gray_counts(q as u64, n as u64, pixels as u64, phases.nonzero_count() as u64);
        assert_eq!(measured.x_count, formula.x_count);
        assert_eq!(measured.cp_count, formula.cp_count);
        assert_eq!(measured.qft_count, formula.qft_count);
        assert_eq!(measured.hadamard_count, formula.hadamard_count);
    }
}

#[test]
fn sequential_and_fused_agree_on_state() {
    let layout = RegisterLayout::new(3, 2).unwrap();
    let a = PhaseImage::from_turns(2, vec![0.1, 0.2, 0.0, 0.4], turns()).unwrap();
    let b = PhaseImage::from_turns(2, vec![0.3, 0.0, 0.0, 0.05], turns()).unwrap();
    let run = |fusion| {
        let opts = QpipeOptions { oracle: OracleKind::Gray, fusion };
        build_qpipe_with(&layout, &[a.clone(), b.clone()], opts).unwrap()
    };
    let (fused, seq) = (run(Fusion::Fused), run(Fusion::Sequential));
    assert!(count_gates(&seq).stage(Stage::Oracle).controlled_phase > count_gates(&fused).stage(Stage::Oracle).controlled_phase);
    let d = fused.simulate(24).unwrap().sup_distance(&seq.simulate(24).unwrap());
    assert!(d < 1e-10, "{d}");
}

#[test]
fn decoding_a_grid_image_is_exact() {
    let (q, n) = (6, 3);
    let layout = RegisterLayout::new(q, n).unwrap();
    let mapping = PhaseMapping::new(MappingMode::FullTurn, 64.0).unwrap();
    let intensities = [0.0, 5.0, 17.0, 31.0, 32.0, 48.0, 60.0, 63.0];
    let theta = intensities.iter().map(|i| i / 64.0).collect();
    let phases = PhaseImage::from_turns(n, theta, mapping).unwrap();
    let state = build_qpipe(&layout, &[phases]).unwrap().simulate(24).unwrap();
    let m = marginal_distribution(&state, &layout).unwrap();
    let table = decode_table(
        &m,
        &ThresholdPolicy::dynamic(),
        &DecodeSpec::new(mapping, Interpretation::Unsigned),
        8,
    )
    .unwrap();
    let got: Vec<f64> = table.rows.iter().map(|r| r.decoded.unwrap()).collect();
    for (g, want) in got.iter().zip(intensities) {
        assert!((g - want).abs() < 1e-9, "{got:?}");
    }
}
