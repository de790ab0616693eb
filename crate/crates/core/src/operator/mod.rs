//! The weighted forward shift: truncated matrices, adjoint action, norm
//! bounds, the compact-perturbation decomposition and the rank-one model.

pub mod matrix;

pub use matrix::{a_coeff, apply_adjoint, apply_forward, build_matrix, build_matrix_sized, c_coeff, matrix_power_consistency, ShiftCoefficients, TruncatedMatrix};
pub mod bounds;

pub use bounds::{beta_bounds, check_sup_limsup, p_norm_bracket, p_norm_estimate, sup_abs_from, BetaBounds, NormBracket, SupValue};
pub mod decompose;
pub mod rank_one;

pub use decompose::{decompose_compact, CDecay, EssentialRadii, PerturbationDecomposition};
pub use rank_one::{rank_one_matrix_orbit, rank_one_perturb_orbit};
