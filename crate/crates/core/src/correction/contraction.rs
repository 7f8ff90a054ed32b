//! φ = 𝓛(l_L + N_L(φ)) by fixed-point iteration.

use serde::{Deserialize, Serialize};

use super::system::LinearizedSystem;
use super::{assemble_ll, eval_nl, CorrectionConfig};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::profile::{norm_dstar, norm_star, Ansatz};

#[derive(Debug, Clone)]
pub struct CorrectionResult {
    pub phi: Field,
    /// c_l in the order of [`LinearizedSystem::modes`].
    pub multipliers: Vec<f64>,
    /// |c_l|·‖W^{2*−2}Z_l‖_**, the size of each multiplier term.
    pub multiplier_norms: Vec<f64>,
    pub trace: Trace,
    pub ll_norm: f64,
    pub phi_norm: f64,
    pub nl_norm: f64,
    /// Nodes where W + φ < 0 at the final iterate.
    pub negative_nodes: usize,
    pub constraint_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// ‖φ_{k+1} − φ_k‖_* per step, starting from φ_0 = 0.
    pub steps: Vec<f64>,
    /// steps[k+1] / steps[k]
    pub ratios: Vec<f64>,
}

impl CorrectionResult {
    /// max_l |c_l|·‖W^{2*−2}Z_l‖_** / ‖l_L‖_**
    pub fn multiplier_certificate(&self) -> f64 {
        let m = self.multiplier_norms.iter().cloned().fold(0.0, f64::max);
        if self.ll_norm > 0.0 {
            m / self.ll_norm
        } else {
            m
        }
    }
}

impl Trace {
    /// Largest step ratio after the first iteration.
    pub fn max_ratio_after_first(&self) -> f64 {
        self.ratios.iter().skip(1).cloned().fold(0.0, f64::max)
    }
}

/// Runs the contraction on a prepared system.
pub fn contract_with(sys: &LinearizedSystem, cfg: &CorrectionConfig) -> Result<CorrectionResult> {
    let a: &Ansatz = &sys.ansatz;
    let grid = sys.grid.clone();
    let ll = assemble_ll(a, &grid);
    let ll_norm = norm_dstar(&ll, a, &cfg.norms)?;
    let mut phi = Field::zeros(grid.clone());
    let mut trace = Trace::default();
    let mut mult = vec![0.0; sys.modes.len()];
    let mut growing = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let (nl, _) = eval_nl(&sys.w, &phi)?;
        let rhs = ll.zip_with(&nl, |a, b| a + b)?;
        let (next, c) = sys.solve_with_tail(&rhs)?;
        let diff = next.zip_with(&phi, |a, b| a - b)?;
        let step = norm_star(&diff, a, &cfg.norms)?;
        if let Some(&prev) = trace.steps.last() {
            let ratio = if prev > 0.0 { step / prev } else { 0.0 };
            trace.ratios.push(ratio);
            if ratio >= 1.0 {
                growing += 1;
            } else {
                growing = 0;
            }
        }
        trace.steps.push(step);
        phi = next;
        mult = c;
        let size = norm_star(&phi, a, &cfg.norms)?;
        if step <= cfg.tol * size || step == 0.0 {
            converged = true;
            break;
        }
        // stalled at the round-off floor of the linear solve
        if growing > 0 && step <= cfg.floor * size {
            // the last step is noise, not contraction
            trace.steps.pop();
            trace.ratios.pop();
            converged = true;
            break;
        }
        if growing >= 3 {
            return Err(Error::NonConvergence(format!("contraction ratio >= 1 for 3 steps, trace {:?}", trace.steps)));
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!("contraction after {} steps, trace {:?}", cfg.max_iter, trace.steps)));
    }
    let (nl, negative_nodes) = eval_nl(&sys.w, &phi)?;
    if negative_nodes > 0 {
        return Err(Error::Positivity(format!("W + phi < 0 at {negative_nodes} nodes")));
    }
    let mut multiplier_norms = Vec::with_capacity(mult.len());
    for (l, c) in mult.iter().enumerate() {
        multiplier_norms.push(c.abs() * norm_dstar(&sys.mode_field(l)?, a, &cfg.norms)?);
    }
    Ok(CorrectionResult {
        multiplier_norms,
        phi_norm: norm_star(&phi, a, &cfg.norms)?,
        nl_norm: norm_dstar(&nl, a, &cfg.norms)?,
        constraint_residual: sys.constraint_residual(&phi),
        phi,
        multipliers: mult,
        trace,
        ll_norm,
        negative_nodes,
    })
}

/// Builds the grid and system for `ansatz`, then contracts.
pub fn contract(ansatz: &Ansatz, cfg: &CorrectionConfig) -> Result<(LinearizedSystem, CorrectionResult)> {
    let grid = super::grid_for(ansatz, cfg)?;
    let sys = LinearizedSystem::new(ansatz, grid, cfg.tail)?;
    let res = contract_with(&sys, cfg)?;
    Ok((sys, res))
}
