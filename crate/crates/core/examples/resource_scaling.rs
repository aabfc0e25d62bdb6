//! Prints the resource table for a few image sizes and the X-gate reduction.

use qpipe::complexity::{comparative_counts, emit_scaling_table, reduction_ratio, scaling_table_csv};

fn main() {
    print!("{}", scaling_table_csv(&emit_scaling_table(8, [4, 16, 64])));
    for row in comparative_counts(8, 10) {
        println!("{}: total {:?}, depth {:?}", row.method, row.total_gates, row.depth_estimate);
    }
    for n in [4, 8, 12, 16, 20] {
        println!("n = {n:2}: naive/Gray X ratio {:.3}", reduction_ratio(n));
    }
}
