use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};

/// One Aubin–Talenti profile U_{x,μ}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub center: Vec<f64>,
    pub mu: f64,
}

impl Bubble {
    pub fn new(center: Vec<f64>, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("bubble height must be positive, got {mu}")));
        }
        Ok(Self { center, mu })
    }

    /// Bubble centred at (x1, 0, …, 0).
    pub fn on_axis(dims: &DimensionParams, x1: f64, mu: f64) -> Result<Self> {
        let mut c = vec![0.0; dims.n];
        c[0] = x1;
        Self::new(c, mu)
    }

    pub fn distance(&self, y: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(y)
            .map(|(c, v)| (v - c) * (v - c))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_on_axis(&self) -> bool {
        self.center.iter().skip(1).all(|&c| c == 0.0)
    }
}

/// U at distance `rho` from the centre.
pub fn radial(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    let k = dims.half_nm2();
    dims.profile_const() * (mu / (1.0 + mu * mu * rho * rho)).powf(k)
}

/// U'(ρ)/ρ, regular at the centre.
pub fn radial_d_over_r(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    let k = dims.half_nm2();
    let s = mu * mu * rho * rho;
    -2.0 * k * dims.profile_const() * mu.powf(k + 2.0) * (1.0 + s).powf(-k - 1.0)
}

pub fn radial_d(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    rho * radial_d_over_r(dims, mu, rho)
}

/// U''(ρ).
pub fn radial_dd(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    let k = dims.half_nm2();
    let s = mu * mu * rho * rho;
    let c = -2.0 * k * dims.profile_const() * mu.powf(k + 2.0);
    c * (1.0 + s).powf(-k - 2.0) * (1.0 + s - 2.0 * (k + 1.0) * s)
}

/// ∂U/∂μ at distance ρ.
pub fn radial_dmu(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    let k = dims.half_nm2();
    let s = mu * mu * rho * rho;
    dims.profile_const() * k * mu.powf(k - 1.0) * (1.0 - s) * (1.0 + s).powf(-k - 1.0)
}

/// Closed-form ΔU.
pub fn radial_laplacian(dims: &DimensionParams, mu: f64, rho: f64) -> f64 {
    let nf = dims.nf();
    let k = dims.half_nm2();
    let s = mu * mu * rho * rho;
    -nf * (nf - 2.0) * dims.profile_const() * mu.powf(k + 2.0) * (1.0 + s).powf(-(nf + 2.0) / 2.0)
}

pub fn eval_bubble(b: &Bubble, dims: &DimensionParams, y: &[f64]) -> f64 {
    radial(dims, b.mu, b.distance(y))
}

/// ψ_0 = ∂U/∂μ and ψ_l = ∂U/∂y_l for l = 1..N.
pub fn eval_kernel(b: &Bubble, dims: &DimensionParams, l: usize, y: &[f64]) -> Result<f64> {
    if l > dims.n {
        return Err(Error::Index(format!("kernel index {l} outside 0..={}", dims.n)));
    }
    let rho = b.distance(y);
    if l == 0 {
        return Ok(radial_dmu(dims, b.mu, rho));
    }
    Ok(radial_d_over_r(dims, b.mu, rho) * (y[l - 1] - b.center[l - 1]))
}
