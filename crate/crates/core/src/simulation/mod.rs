//! Synthetic designs, cellwise contamination, performance metrics and
//! benchmark grids.

pub mod contamination;
pub mod design;
pub mod grid;
pub mod metrics;
pub mod protocol;

pub use contamination::{contaminate_cells, contaminated_row_fraction, mask_density, CellMask, ContaminationSpec};
pub use design::{ar1_covariance, gaussian_columns, gen_design, gen_response, SimDesign};
pub use grid::{
    aggregate, make_replicate, read_records, run_grid, run_replicate, write_aggregate, write_records, AggregateRow,
    BenchmarkRecord, GridConfig, Method,
};
pub use metrics::{compute_metrics, Metrics};
pub use protocol::{robust_standardize, run_protocol, synthetic_dataset, ProtocolConfig, SelectionRates};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from `seed` and a tag.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag)
}

/// Seed of one grid replicate; depends only on the base seed and the cell,
/// so any replicate can be regenerated in isolation.
pub fn replicate_seed(seed0: u64, e: f64, gamma: f64, r: usize) -> u64 {
    let e_code = (e * 1000.0).round() as u64;
    let g_code = (gamma * 10.0).round() as u64;
    let h = splitmix64(splitmix64(splitmix64(e_code) ^ g_code) ^ r as u64);
    seed0.wrapping_add(h)
}
