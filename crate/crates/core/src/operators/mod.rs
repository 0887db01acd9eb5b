pub mod dyadic;
pub mod littlewood_paley;
pub mod peetre;

pub use dyadic::{
    dyadic_average, dyadic_maximal_by_tree, hl_maximal, shifted_dyadic_maximal, snapped_shift,
    DyadicCube,
};
pub use littlewood_paley::{lp_conv_shifted, FilterBank};
pub use peetre::{
    lambda_convolve, lambda_kernel, modulus_power, peetre_shifted, peetre_values,
    PeriodizedKernel, ShiftedOpParams,
};
