//! Phase-kickback image encoding with Gray-code oracle traversal.
//!
//! Pixel intensities are mapped to phase fractions, injected into a uniform
//! superposition over pixel positions through a diagonal oracle controlled by
//! an estimation register, and read back with an inverse QFT followed by a
//! thresholded probability-weighted average. Finite differences between two
//! images come for free by encoding one of them with negated phases, which is
//! what the edge detection pipeline in [`qed`] builds on.
//!
//! Modules, bottom-up:
//!
//! * [`statevector`]: dense complex simulator and register layout.
//! * [`circuit`]: gate-list IR, naive and Gray-code oracles, full pipeline builder.
//! * [`phasemap`]: intensity to phase mapping, padding and image shifts.
//! * [`readout`]: Dirichlet kernel, threshold policies and pixel decoding.
//! * [`complexity`]: closed-form resource counts and scaling tables.
//! * [`qed`]: quantum edge detection and MAE reporting.
//! * [`cli`]: command-line front end, image I/O and synthetic generators.

pub mod circuit;
pub mod cli;
pub mod complexity;
pub mod error;
pub mod phasemap;
pub mod qed;
pub mod readout;
pub mod statevector;

pub use circuit::{Circuit, GateOp};
pub use error::{Error, Result};
pub use phasemap::{Image, MappingMode, PhaseImage, PhaseMapping};
pub use readout::{ReadoutTable, ThresholdPolicy};
pub use statevector::{RegisterLayout, StateVector};
