//! Alternating-projection runs and checks of the two analytic update rules.

mod eigformula;
mod rankone;
mod trace;

pub use eigformula::{eig_formula_step, eig_formula_step_adaptive, negative_energy};
pub use rankone::{
    grad_half_dist2_psi, m_matrix, psi, psi_partial, solve3, thm41_residual, Mat3, RankOneParam,
};
pub use trace::{
    ap_step, ap_step_coeffs, run_ap, run_ap_with, APTrace, RunOptions, StopReason, TracePoint,
};
