//! The conjecture side: zeta_A, Euler products, jets of A, moment polynomials,
//! ratios and one-level density predictions.

pub mod contour;
pub mod density;
pub mod euler;
pub mod explicit;
pub mod jet;
pub mod moments;
pub mod ratios;
pub mod zeta;

pub use contour::{contour_value, sign_sum, ContourGrid};
pub use density::{density_kernel, density_prediction, scaled_density_limit, TestFunction};
pub use euler::{
    a_closed, default_truncation, euler_p, euler_p1, euler_p_logderiv, named_product, EulerCache, EulerProductValue,
    NamedProduct,
};
pub use explicit::{q2_explicit, q3_explicit};
pub use jet::{a_jet, a_log_jet, a_partial, a_value};
pub use moments::{
    family_size, first_moment_main_term, leading_constant, moment_prediction, q_k, q_k_with_order, QkPolynomial,
};
pub use ratios::{logderiv_prediction, ratio_prediction};
pub use zeta::{inv_zeta_a, x_factor, zeta_a, zeta_a_logderiv, zeta_a_real};
