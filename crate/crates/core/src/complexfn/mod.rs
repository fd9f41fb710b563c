//! Complex special functions, truncated series and vertical-line quadrature.

pub mod gamma;
pub mod quad;
pub mod series;

pub use gamma::{
    bernoulli, bernoulli_poly, binom_remainder, gamma, gamma_derivative, gen_binomial, log_gamma,
    rgamma, stirling_remainder, upper_log,
};
pub use quad::{integrate_real, line_integral, LineContour, QuadResult};
pub use series::{
    inverse_factorial_to_powers, series_exp, stirling2_table, to_inverse_factorial, SeriesKind,
    TruncatedSeries,
};

pub use num_complex::Complex64 as C64;

/// Shorthand constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
