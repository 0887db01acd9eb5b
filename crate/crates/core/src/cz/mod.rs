pub mod ay;
pub mod decompose;

pub use ay::{default_j_range, default_w_samples, doubled, estimate_ay, log_spaced_w, AyEstimate};
pub use decompose::{check_decomposition, cz_decompose, BadPiece, CzCheck, CzDecomposition, DoubleFamily};
