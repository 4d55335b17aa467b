//! Leading heat-kernel constants and the decay quadrature they share.

mod constants;
mod quad;

pub use constants::{
    c0_contact3d, c0_cr, c0_riemannian, c0_steptwo, popp_factor, x_over_sinh, C0Method, C0Result,
    Measure,
};
pub use quad::{gauss_legendre, halton, quad_decay, QuadMethod, QuadOptions, QuadResult};
