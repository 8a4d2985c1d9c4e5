//! Gauss–Legendre rules, interpolation and prolongation operators, and
//! product-integration weights for logarithmic and absolute-value factors.

mod gauss;
mod interp;
mod moments;
mod pf;

pub use gauss::{gl16, legendre_and_derivative, legendre_values, GaussLegendre, NODES_PER_PANEL};
pub use interp::{half_panel_interpolation, lagrange_matrix, Prolongation};
pub use moments::{abs_moments, log_moments, product_weights, singular_weights, SingularKind};
pub use pf::{build_pf_bc, rank_one_pf_block, PfError};
