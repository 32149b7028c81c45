//! Exact finite-size stationary quantities in rational arithmetic.

pub mod finite;
pub mod hypergeometric;

pub use finite::{
    diffusion_exact, diffusion_exact_coefficients, exact_report, gamma_kernel, jump_kernel, mean_jumps,
    mean_jumps_coefficients, occupation_distribution, partition_function, partition_function_coefficients,
    ExactReport,
};
pub use hypergeometric::{appell_f1_terminating, gauss_2f1_terminating};
