//! Closed-form resource counts for the naive and Gray-code encoders, plus the
//! leading-term FRQI and NEQR rows used for comparison.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::circuit::{count_gates, Circuit, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "FRQI")]
    Frqi,
    #[serde(rename = "NEQR")]
    Neqr,
    #[serde(rename = "QPipeNaive")]
    QPipeNaive,
    #[serde(rename = "QPipeGray")]
    QPipeGray,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Frqi,
        Method::Neqr,
        Method::QPipeNaive,
        Method::QPipeGray,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Frqi => "FRQI",
            Method::Neqr => "NEQR",
            Method::QPipeNaive => "QPipeNaive",
            Method::QPipeGray => "QPipeGray",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    pub q: u64,
    pub n: u64,
    pub pixels: u64,
    pub nonzero: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceEstimate {
    pub method: Method,
    pub qubits: u64,
    /// `None` for rows that only carry a leading-term gate count.
    pub x_count: Option<u64>,
    pub cp_count: Option<u64>,
    pub hadamard_count: Option<u64>,
    pub qft_count: Option<u64>,
    pub total_gates: u64,
    pub depth_estimate: u64,
    pub params: Params,
    /// Gate and depth figures are big-O leading terms with unit constant.
    pub is_leading_term_only: bool,
    /// Pixel count is not `2^n`, so the X count is an upper bound.
    pub is_upper_bound: bool,
}

impl ResourceEstimate {
    pub fn is_estimate(&self) -> bool {
        self.is_leading_term_only || self.is_upper_bound
    }
}

/// Gates in the inverse QFT on `q` qubits (Hadamards, controlled phases and
/// bit-reversal swaps); equals `q(q+2)/2` for even `q` and rounds down for odd.
pub fn qft_gate_count(q: u64) -> u64 {
    q * (q + 2) / 2
}

/// Oracle depth leading term with unit constant.
pub fn depth_estimate(method: Method, q: u64, n: u64, pixels: u64, nonzero: u64) -> u64 {
    match method {
        Method::QPipeNaive => q * n * nonzero,
        Method::QPipeGray => q * (n * nonzero + pixels),
        Method::Frqi => pixels * pixels,
        Method::Neqr => q * pixels * n,
    }
}

fn qpipe_row(method: Method, q: u64, n: u64, pixels: u64, nonzero: u64, x_count: u64) -> ResourceEstimate {
    let hadamard = q + n;
    let cp = q * nonzero;
    let qft = qft_gate_count(q);
    ResourceEstimate {
        method,
        qubits: q + n,
        x_count: Some(x_count),
        cp_count: Some(cp),
        hadamard_count: Some(hadamard),
        qft_count: Some(qft),
        total_gates: hadamard + x_count + cp + qft,
        // Hadamard layer plus sequential QFT on top of the oracle term
        depth_estimate: depth_estimate(method, q, n, pixels, nonzero) + 1 + qft,
        params: Params {
            q,
            n,
            pixels,
            nonzero,
        },
        is_leading_term_only: false,
        is_upper_bound: pixels != 1 << n,
    }
}

/// `qnN` X gates, `q·N_{≠0}` phase gates.
pub fn naive_counts(q: u64, n: u64, pixels: u64, nonzero: u64) -> ResourceEstimate {
    qpipe_row(Method::QPipeNaive, q, n, pixels, nonzero, q * n * pixels)
}

/// `q(2n + N - 2)` X gates, `q·N_{≠0}` phase gates.
pub fn gray_counts(q: u64, n: u64, pixels: u64, nonzero: u64) -> ResourceEstimate {
    qpipe_row(Method::QPipeGray, q, n, pixels, nonzero, q * (2 * n + pixels - 2))
}

fn leading_term_row(method: Method, q: u64, n: u64, pixels: u64) -> ResourceEstimate {
    let (qubits, gates) = match method {
        Method::Frqi => (n + 1, pixels * pixels),
        Method::Neqr => (q + n, q * pixels * n),
        _ => unreachable!("Q-PIPE rows have exact counts"),
    };
    ResourceEstimate {
        method,
        qubits,
        x_count: None,
        cp_count: None,
        hadamard_count: None,
        qft_count: None,
        total_gates: gates,
        depth_estimate: gates,
        params: Params {
            q,
            n,
            pixels,
            nonzero: pixels,
        },
        is_leading_term_only: true,
        is_upper_bound: false,
    }
}

/// All four comparison rows for an `N = 2^n` image with every pixel nonzero.
pub fn comparative_counts(q: u64, n: u64) -> Vec<ResourceEstimate> {
    comparative_counts_for(q, n, 1 << n)
}

fn comparative_counts_for(q: u64, n: u64, pixels: u64) -> Vec<ResourceEstimate> {
    vec![
        leading_term_row(Method::Frqi, q, n, pixels),
        leading_term_row(Method::Neqr, q, n, pixels),
        naive_counts(q, n, pixels, pixels),
        gray_counts(q, n, pixels, pixels),
    ]
}

/// X-gate reduction of the Gray traversal over the naive encoder,
/// `nN / (2n + N - 2)` with `N = 2^n`.
pub fn reduction_ratio(n: u64) -> f64 {
    let pixels = (1u64 << n) as f64;
    let n = n as f64;
    n * pixels / (2.0 * n + pixels - 2.0)
}

/// Resource estimate from an IR tally of a built circuit.
pub fn estimate_from_circuit(method: Method, circuit: &Circuit, pixels: u64, nonzero: u64) -> ResourceEstimate {
    let tally = count_gates(circuit);
    let layout = circuit.layout();
    let (q, n) = (layout.q() as u64, layout.n() as u64);
    let oracle = tally.stage(Stage::Oracle);
    let x = oracle.pauli_x as u64;
    let cp = oracle.controlled_phase as u64;
    let h = tally.stage(Stage::Prepare).hadamard as u64;
    let qft = tally.stage(Stage::InverseQft).total() as u64;
    ResourceEstimate {
        method,
        qubits: q + n,
        x_count: Some(x),
        cp_count: Some(cp),
        hadamard_count: Some(h),
        qft_count: Some(qft),
        total_gates: tally.total.total() as u64,
        depth_estimate: depth_estimate(method, q, n, pixels, nonzero) + 1 + qft,
        params: Params {
            q,
            n,
            pixels,
            nonzero,
        },
        is_leading_term_only: false,
        is_upper_bound: pixels != 1 << n,
    }
}

pub const SCALING_CSV_HEADER: &str = "k,N,method,qubits,x_count,cp_count,total_gates,depth,is_estimate";

/// Scaling table for `k × k` images, one row per side length and method,
/// assuming every pixel is nonzero.
pub fn emit_scaling_table(q: u64, sides: impl IntoIterator<Item = u64>) -> Vec<(u64, ResourceEstimate)> {
    sides
        .into_iter()
        .flat_map(|k| {
            let pixels = k * k;
            let n = pixels.max(2).next_power_of_two().trailing_zeros() as u64;
            comparative_counts_for(q, n, pixels)
                .into_iter()
                .map(move |row| (k, row))
        })
        .collect()
}

pub fn scaling_table_csv(rows: &[(u64, ResourceEstimate)]) -> String {
    let mut out = format!("{SCALING_CSV_HEADER}\n");
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for (k, r) in rows {
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{},{},{},{}",
            r.params.pixels,
            r.method,
            r.qubits,
            opt(r.x_count),
            opt(r.cp_count),
            r.total_gates,
            r.depth_estimate,
            r.is_estimate()
        );
    }
    out
}
