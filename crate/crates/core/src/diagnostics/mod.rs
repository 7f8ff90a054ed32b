//! Diagnostics on solutions and pairs of solutions: normalized differences,
//! kernel projections, periodicity, Green-tail fits and the energy.

pub mod energy;
pub mod green_tail;
pub mod kernel;
pub mod periodicity;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::profile::norms::norm_star;
use crate::profile::{Ansatz, WeightedNormParams};

pub use energy::{energy, energy_field, energy_location_derivative, energy_mu_derivative, EnergyDerivativeReport};
pub use green_tail::{green_tail_fit, Annulus, GreenTailModel};
pub use kernel::{kernel_projection, KernelBasis, KernelProjection};
pub use periodicity::{periodicity_check, PeriodicityReport, Window};

/// η = (u¹ − u²)/‖u¹ − u²‖_*.
#[derive(Debug, Clone)]
pub struct DifferenceQuotient {
    pub eta: Field,
    /// ‖u¹ − u²‖_*
    pub diff_norm: f64,
}

#[derive(Debug, Clone)]
pub enum PairOutcome {
    /// The difference is below the floor; no quotient is formed.
    Identical { diff_norm: f64, floor: f64 },
    Distinct(DifferenceQuotient),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Identical,
    Distinct,
}

impl PairOutcome {
    pub fn diff_norm(&self) -> f64 {
        match self {
            PairOutcome::Identical { diff_norm, .. } => *diff_norm,
            PairOutcome::Distinct(q) => q.diff_norm,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            PairOutcome::Identical { .. } => Verdict::Identical,
            PairOutcome::Distinct(_) => Verdict::Distinct,
        }
    }
}

fn same_grid(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a.grid(), b.grid()) || {
        let (ga, gb) = (a.grid(), b.grid());
        ga.y1 == gb.y1 && ga.r == gb.r
    }
}

/// Star norm of u¹ − u² against the weights of `ansatz`; below `floor` the
/// pair is reported identical.
pub fn difference_quotient(u1: &Field, u2: &Field, ansatz: &Ansatz, norms: &WeightedNormParams, floor: f64) -> Result<PairOutcome> {
    if !same_grid(u1, u2) {
        return Err(Error::InvalidParameter("solutions live on different grids".into()));
    }
    let d = u1.zip_with(u2, |a, b| a - b)?;
    let diff_norm = norm_star(&d, ansatz, norms)?;
    if !(diff_norm > floor) {
        return Ok(PairOutcome::Identical { diff_norm, floor });
    }
    Ok(PairOutcome::Distinct(DifferenceQuotient { eta: d.map(|v| v / diff_norm), diff_norm }))
}

impl DifferenceQuotient {
    /// η̃_j(z) = μ_j^{−(N−2)/2} η(x_j + z/μ_j), in (z₁, |z'|), cubic interpolation.
    pub fn rescaled<'a>(&'a self, ansatz: &'a Ansatz, j: usize) -> Result<impl Fn(f64, f64) -> Result<f64> + 'a> {
        let b = ansatz.bubbles.get(j).ok_or_else(|| Error::Index(format!("bubble {j}")))?;
        let (c, mu) = (b.center[0], b.mu);
        let s = mu.powf(-ansatz.dims.half_nm2());
        Ok(move |z1: f64, zr: f64| Ok(s * self.eta.jet(c + z1 / mu, zr / mu)?.0))
    }
}
