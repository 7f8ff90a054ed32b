use serde::{Deserialize, Serialize};

use super::ansatz::Ansatz;
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::grid::Field;

/// τ = 1 + ϑ for the weighted sup norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormParams {
    pub tau: f64,
    pub vartheta: f64,
}

impl WeightedNormParams {
    /// ϑ = min{(N−4)/2, β/2}/4.
    pub fn default_for(dims: &DimensionParams, beta: f64) -> Self {
        let vartheta = ((dims.nf() - 4.0) / 2.0).min(beta / 2.0) / 4.0;
        Self { tau: 1.0 + vartheta, vartheta }
    }

    pub fn new(dims: &DimensionParams, vartheta: f64) -> Result<Self> {
        let tau = 1.0 + vartheta;
        if !(vartheta > 0.0) || !(tau < dims.half_nm2()) {
            return Err(Error::InvalidParameter(format!("need 1 < τ < (N−2)/2, got τ = {tau}")));
        }
        Ok(Self { tau, vartheta })
    }
}

/// Σ_j μ_j^{(N−2)/2} (1 + μ_j|y − x_j|)^{−((N−2)/2 + τ)}
pub fn star_weight(a: &Ansatz, p: &WeightedNormParams, y1: f64, r: f64) -> f64 {
    let k = a.dims.half_nm2();
    (0..a.bubbles.len())
        .map(|i| {
            let mu = a.bubbles[i].mu;
            let (_, rho) = a.axi_offset(i, y1, r);
            mu.powf(k) * (1.0 + mu * rho).powf(-(k + p.tau))
        })
        .sum()
}

/// Σ_j μ_j^{(N+2)/2} (1 + μ_j|y − x_j|)^{−((N+2)/2 + τ)}
pub fn dstar_weight(a: &Ansatz, p: &WeightedNormParams, y1: f64, r: f64) -> f64 {
    let k = (a.dims.nf() + 2.0) / 2.0;
    (0..a.bubbles.len())
        .map(|i| {
            let mu = a.bubbles[i].mu;
            let (_, rho) = a.axi_offset(i, y1, r);
            mu.powf(k) * (1.0 + mu * rho).powf(-(k + p.tau))
        })
        .sum()
}

fn weighted_sup<W: Fn(f64, f64) -> f64>(f: &Field, w: W) -> Result<f64> {
    let g = f.grid();
    if g.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(g.nodes().fold(0.0, |m, (j, y1, r)| m.max(f.values()[j].abs() / w(y1, r))))
}

pub fn norm_star(f: &Field, a: &Ansatz, p: &WeightedNormParams) -> Result<f64> {
    weighted_sup(f, |y1, r| star_weight(a, p, y1, r))
}

pub fn norm_dstar(f: &Field, a: &Ansatz, p: &WeightedNormParams) -> Result<f64> {
    weighted_sup(f, |y1, r| dstar_weight(a, p, y1, r))
}
