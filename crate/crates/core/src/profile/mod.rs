//! Bubble profiles, cutoff, potential, ansatz and weighted norms.

pub mod ansatz;
pub mod bubble;
pub mod cutoff;
pub mod norms;
pub mod potential;

pub use ansatz::{Ansatz, AnsatzParts, Layout};
pub use bubble::{eval_bubble, eval_kernel, radial, radial_d, radial_d_over_r, radial_dd, radial_dmu, radial_laplacian, Bubble};
pub use cutoff::{eval_cutoff, CutoffEval, CutoffSpec};
pub use norms::{norm_dstar, norm_star, WeightedNormParams};
pub use potential::{eval_q, grad_q, PotentialSpec};
