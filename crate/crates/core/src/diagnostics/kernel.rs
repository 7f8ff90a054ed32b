//! Projection of a rescaled difference onto the kernel {ψ_0, …, ψ_N} of the
//! linearized unit-bubble equation, in the U^{2*−2}-weighted product on B_R(0).

use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::bubble;
use crate::quadrature::gauss_nodes;

/// ψ_0 = ∂_μU_{0,μ}|_{μ=1}, ψ_l = ∂U_{0,1}/∂y_l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBasis {
    pub dims: DimensionParams,
}

impl KernelBasis {
    pub fn new(dims: DimensionParams) -> Self {
        Self { dims }
    }

    /// ψ_l at (z₁, |z'|); the transverse ψ_l (l ≥ 2) are evaluated on the
    /// half-plane z₂ = |z'|.
    pub fn psi(&self, l: usize, z1: f64, zr: f64) -> Result<f64> {
        let rho = (z1 * z1 + zr * zr).sqrt();
        match l {
            0 => Ok(bubble::radial_dmu(&self.dims, 1.0, rho)),
            1 => Ok(bubble::radial_d_over_r(&self.dims, 1.0, rho) * z1),
            2 => Ok(bubble::radial_d_over_r(&self.dims, 1.0, rho) * zr),
            l if l <= self.dims.n => Ok(0.0),
            _ => Err(Error::Index(format!("kernel index {l} outside 0..={}", self.dims.n))),
        }
    }

    pub fn weight(&self, rho: f64) -> f64 {
        bubble::radial(&self.dims, 1.0, rho).powf(self.dims.two_star - 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelProjection {
    /// b_0 … b_N
    pub coefficients: Vec<f64>,
    /// ‖η̃ − Σ b_l ψ_l‖ / ‖η̃‖ in the weighted L² norm on B_R.
    pub residual: f64,
    pub radius: f64,
    /// ⟨ψ_0, ψ_0⟩_w, ⟨ψ_1, ψ_1⟩_w
    pub gram: [f64; 2],
}

impl KernelProjection {
    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, b| m.max(b.abs()))
    }
}

/// Polar nodes (z₁, |z'|, weight) for ∫_{B_R} in R^N of an axisymmetric function.
fn ball_nodes(dims: &DimensionParams, radius: f64) -> Vec<(f64, f64, f64)> {
    let mut breaks = vec![0.0];
    let mut b = 0.25;
    while b < radius {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(radius);
    let ang = gauss_nodes(0.0, std::f64::consts::PI, 6);
    let e = dims.n as i32;
    let mut out = vec![];
    for w in breaks.windows(2) {
        for (rho, wr) in gauss_nodes(w[0], w[1], 2) {
            for &(t, wt) in &ang {
                let s = t.sin();
                out.push((rho * t.cos(), rho * s, dims.transverse_area() * wr * wt * rho.powi(e - 1) * s.powi(e - 2)));
            }
        }
    }
    out
}

/// b_l = ⟨η̃, ψ_l⟩_w / ⟨ψ_l, ψ_l⟩_w. On axisymmetric data the transverse
/// coefficients vanish by the angular integration and are returned as 0.
pub fn kernel_projection<F>(eta: F, basis: &KernelBasis, radius: f64) -> Result<KernelProjection>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("projection radius {radius}")));
    }
    let nodes = ball_nodes(&basis.dims, radius);
    let mut samples = Vec::with_capacity(nodes.len());
    for &(z1, zr, w) in &nodes {
        let rho = (z1 * z1 + zr * zr).sqrt();
        let ww = w * basis.weight(rho);
        samples.push((eta(z1, zr)?, basis.psi(0, z1, zr)?, basis.psi(1, z1, zr)?, ww));
    }
    let (mut g00, mut g01, mut g11, mut e0, mut e1, mut ee) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(e, p0, p1, w) in &samples {
        g00 += w * p0 * p0;
        g01 += w * p0 * p1;
        g11 += w * p1 * p1;
        e0 += w * e * p0;
        e1 += w * e * p1;
        ee += w * e * e;
    }
    let det = g00 * g11 - g01 * g01;
    if !(det > 1e-10 * g00 * g11) || !det.is_finite() {
        return Err(Error::Singular(format!("kernel Gram matrix on B_{radius} (det {det:e})")));
    }
    let b0 = (e0 * g11 - e1 * g01) / det;
    let b1 = (e1 * g00 - e0 * g01) / det;
    let mut rr = 0.0;
    for &(e, p0, p1, w) in &samples {
        let r = e - b0 * p0 - b1 * p1;
        rr += w * r * r;
    }
    let residual = if ee > 0.0 { (rr / ee).sqrt() } else { 0.0 };
    let mut coefficients = vec![0.0; basis.dims.n + 1];
    coefficients[0] = b0;
    coefficients[1] = b1;
    Ok(KernelProjection { coefficients, residual, radius, gram: [g00, g11] })
}
