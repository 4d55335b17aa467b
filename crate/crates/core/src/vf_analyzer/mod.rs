//! Polynomial vector fields on `R^d`: brackets, the Hörmander filtration,
//! the `B_ℋ`/`Γ` matrices and the deterministic Taylor maps `M_N`, `F_N`.

pub mod examples;
mod field;
mod filtration;
mod flow;
mod gamma;
mod poly;
mod taylor;

pub use field::{vf_bracket, Frame, PolyVectorField};
pub use filtration::{
    check_equiregular, filtration, select_h, EquiregularityReport, FiltrationReport,
    DEFAULT_NMAX, DEFAULT_RANK_TOL,
};
pub use flow::ode_flow;
pub use gamma::{b_matrix, gamma_pack, GammaPack};
pub use poly::Polynomial;
pub use taylor::{lie_field, taylor_f, taylor_m, tensor_pushforward};
