//! Split of the boundary Q-term ∫_{∂B_δ} Q u² ν_i into F₁ (the non-local part
//! of u against a|y−x_j|^β) and the four F₂ bounds, with
//! d = max_i |x_i − lattice point|.

use serde::{Deserialize, Serialize};

use super::{sphere_integral, AxiJet, PohozaevConfig};
use crate::error::{Error, Result};
use crate::profile::{bubble, Ansatz};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub ball: usize,
    pub mu: f64,
    pub delta: f64,
    /// max_i |s_i|
    pub d: f64,
    pub f1: f64,
    /// F₂,₁ … F₂,₄
    pub f2: [f64; 4],
    /// Predicted μ-exponent of F₂,₄: −(N−2+(β+4−N)θ).
    pub f24_order: f64,
    /// The overall budget −(β+2).
    pub budget_order: f64,
}

/// F₁ = a∫_∂ |y−x_j|^β (u − U_j)² ν₁ and F₂,ₖ = (d^β, δ^{β−1}d, δd^{β−1}, δ^{β+1})·∫_∂ S²
/// with S = Σ_i μ_i^{(N−2)/2}(1+μ_i|y−x_i|)^{2−N}.
pub fn boundary_term_estimates<F: AxiJet>(u: &F, ansatz: &Ansatz, cfg: &PohozaevConfig) -> Result<BoundaryReport> {
    let dims = &ansatz.dims;
    let q = &ansatz.potential;
    let b = ansatz.bubbles.get(cfg.ball).ok_or_else(|| Error::Index(format!("ball {}", cfg.ball)))?;
    let (c, mu, delta) = (b.center[0], b.mu, cfg.delta);
    let beta = q.beta;
    let nf = dims.nf();
    let k = dims.half_nm2();
    let d = ansatz.bubbles.iter().map(|bb| q.lattice_offset(bb.center[0]).abs()).fold(0.0, f64::max);
    let f1 = sphere_integral(
        |y1, r, n1, _| {
            let j = u.jet(y1, r)?;
            let dz = y1 - c;
            let rho = (dz * dz + r * r).sqrt();
            let v = j[0] - bubble::radial(dims, mu, rho);
            Ok(q.a * rho.powf(beta) * v * v * n1)
        },
        c,
        delta,
        dims,
        cfg.order,
    )?
    .value;
    let s2 = sphere_integral(
        |y1, r, _, _| {
            let mut s = 0.0;
            for bb in &ansatz.bubbles {
                let (dz, _) = (y1 - bb.center[0], 0.0);
                let dz = match ansatz.layout {
                    crate::profile::Layout::Wrapped { period } => dz - period * (dz / period).round(),
                    crate::profile::Layout::Chain => dz,
                };
                let rho = (dz * dz + r * r).sqrt();
                s += bb.mu.powf(k) * (1.0 + bb.mu * rho).powf(2.0 - nf);
            }
            Ok(s * s)
        },
        c,
        delta,
        dims,
        cfg.order,
    )?
    .value;
    let f2 = [d.powf(beta) * s2, delta.powf(beta - 1.0) * d * s2, delta * d.powf(beta - 1.0) * s2, delta.powf(beta + 1.0) * s2];
    Ok(BoundaryReport {
        ball: cfg.ball,
        mu,
        delta,
        d,
        f1,
        f2,
        f24_order: -(nf - 2.0 + (beta + 4.0 - nf) * cfg.theta),
        budget_order: -(beta + 2.0),
    })
}
