//! L-function descriptors, invariants, the sine expansion and h_F.

pub mod descriptor;
pub mod functions;
pub mod oracle;
pub mod provider;

pub use descriptor::{GammaFactorTerm, LFunctionDescriptor, PolarPart};
pub use functions::{
    entire_product_check, fe_selfcheck, h_f_eval, h_s_product, inv_h_f, invariants, log_h_f,
    shift_to_zero_theta, sine_expansion, Invariants, SineExpansion,
};
pub use oracle::{conj_series_value, dirichlet_l, hurwitz_zeta, oracle_value, series_value, zeta};
pub use provider::{character_values, CoeffTable, CoefficientProvider};
