//! I(u) = ½∫|∇u|² + Qu² − (1/2*)∫|u|^{2*} and its derivatives along the
//! ansatz parameters, by polar quadrature on the support ball of each bubble.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::profile::{bubble, Ansatz, Layout, PotentialSpec};
use crate::quadrature::{gauss, half_line, DerivedConstants, Estimate, QuadratureSpec};

/// ∫_{B_R(x_j)} f with f axisymmetric about the axis through x_j.
fn ball_quadrature<F>(ansatz: &Ansatz, j: usize, f: F, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    let b = &ansatz.bubbles[j];
    let (c, mu) = (b.center[0], b.mu);
    let n = ansatz.dims.n as i32;
    let cut = ansatz.cutoff;
    let g = |rho: f64| {
        if rho <= 0.0 || rho >= cut.outer_radius {
            return 0.0;
        }
        let h = |t: f64| f(c + rho * t.cos(), rho * t.sin()) * t.sin().powi(n - 2);
        rho.powi(n - 1) * gauss(&h, 0.0, std::f64::consts::PI, 4)
    };
    let mut extra = vec![cut.inner_radius, cut.outer_radius];
    if let Some(rc) = ansatz.potential.clip_radius() {
        // the clip sphere sits on the lattice point, |s| off the centre
        let s = ansatz.potential.lattice_offset(c).abs();
        extra.extend([rc - s, rc, rc + s].into_iter().filter(|&v| v > 0.0));
    }
    let e = half_line(&g, 1.0 / mu, spec, &extra)?;
    Ok(e.scale(ansatz.dims.transverse_area()))
}

fn check_disjoint(ansatz: &Ansatz) -> Result<()> {
    let reach = 2.0 * ansatz.cutoff.outer_radius;
    for i in 0..ansatz.bubbles.len() {
        for j in (i + 1)..ansatz.bubbles.len() {
            if ansatz.separation(i, j) < reach {
                return Err(Error::InvalidParameter(format!("supports of bubbles {i} and {j} overlap")));
            }
        }
    }
    if let Layout::Wrapped { period } = ansatz.layout {
        if period < reach {
            return Err(Error::InvalidParameter(format!("period {period} below the support diameter")));
        }
    }
    Ok(())
}

/// I(W), the supports ξ_j being disjoint.
pub fn energy(ansatz: &Ansatz, spec: &QuadratureSpec) -> Result<Estimate> {
    check_disjoint(ansatz)?;
    let p1 = ansatz.dims.two_star;
    let q = &ansatz.potential;
    let e = |y1: f64, r: f64| {
        let w = ansatz.w_axi(y1, r);
        let (g1, gr) = ansatz.grad_w_axi(y1, r);
        0.5 * (g1 * g1 + gr * gr) + 0.5 * q.eval_axi(y1, r) * w * w - w.abs().powf(p1) / p1
    };
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for j in 0..ansatz.bubbles.len() {
        total = total.add(ball_quadrature(ansatz, j, e, spec)?);
    }
    Ok(total)
}

/// I(u) on the grid of `u`: grid quadrature with gradients from the cubic jet.
pub fn energy_field(u: &Field, potential: &PotentialSpec) -> Result<f64> {
    let g = u.grid();
    let w = g.quadrature_weights();
    let p1 = g.dims.two_star;
    let mut s = 0.0;
    for (k, y1, r) in g.nodes() {
        let (v, d1, dr) = u.jet(y1, r)?;
        s += w[k] * (0.5 * (d1 * d1 + dr * dr) + 0.5 * potential.eval_axi(y1, r) * v * v - v.abs().powf(p1) / p1);
    }
    Ok(s)
}

/// −ΔW + QW − |W|^{2*−2}W
fn euler_lagrange(ansatz: &Ansatz, y1: f64, r: f64) -> f64 {
    let w = ansatz.w_axi(y1, r);
    -ansatz.laplacian_w_axi(y1, r) + ansatz.potential.eval_axi(y1, r) * w - w.abs().powf(ansatz.dims.two_star - 2.0) * w
}

/// ∂I/∂μ_j = ∫(−ΔW + QW − W^{2*−1}) ξ_j ∂_μU_j.
pub fn energy_mu_derivative_of(ansatz: &Ansatz, j: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    check_disjoint(ansatz)?;
    let b = ansatz.bubbles.get(j).ok_or_else(|| Error::Index(format!("bubble {j}")))?;
    let (c, mu) = (b.center[0], b.mu);
    let f = |y1: f64, r: f64| {
        let rho = ((y1 - c).powi(2) + r * r).sqrt();
        euler_lagrange(ansatz, y1, r) * ansatz.cutoff.value(rho) * bubble::radial_dmu(&ansatz.dims, mu, rho)
    };
    ball_quadrature(ansatz, j, f, spec)
}

/// dI/dμ along a common change of every height.
pub fn energy_mu_derivative(ansatz: &Ansatz, spec: &QuadratureSpec) -> Result<Estimate> {
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for j in 0..ansatz.bubbles.len() {
        total = total.add(energy_mu_derivative_of(ansatz, j, spec)?);
    }
    Ok(total)
}

/// ∂I/∂x_{j,i}; the transverse components (i ≥ 2) vanish on the axis.
pub fn energy_location_derivative(ansatz: &Ansatz, j: usize, i: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    if i == 0 || i > ansatz.dims.n {
        return Err(Error::Index(format!("direction {i} outside 1..={}", ansatz.dims.n)));
    }
    let b = ansatz.bubbles.get(j).ok_or_else(|| Error::Index(format!("bubble {j}")))?;
    if i > 1 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    check_disjoint(ansatz)?;
    let (c, mu) = (b.center[0], b.mu);
    let f = |y1: f64, r: f64| {
        let dz = y1 - c;
        let rho = (dz * dz + r * r).sqrt();
        let (xi, xd, _) = ansatz.cutoff.radial(rho);
        let xd_r = if rho > 0.0 { xd / rho } else { 0.0 };
        // ∂(ξU)/∂x₁ = −∂(ξU)/∂y₁
        let dw = -(xd_r * bubble::radial(&ansatz.dims, mu, rho) + xi * bubble::radial_d_over_r(&ansatz.dims, mu, rho)) * dz;
        euler_lagrange(ansatz, y1, r) * dw
    };
    ball_quadrature(ansatz, j, f, spec)
}

/// Measured dI/dμ next to the two-term form
/// Σ_j [−B₁ˢ μ^{−(β+3)} + B₂ Σ_{i≠j} μ^{−(N−1)} d_{ij}^{−(N−2)}], with B₁ˢ the signed
/// ((β+2)/2)aJ_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDerivativeReport {
    pub mu: f64,
    pub measured: Estimate,
    pub predicted: f64,
    /// μ^{−(β+3)}
    pub remainder_scale: f64,
}

impl EnergyDerivativeReport {
    pub fn new(ansatz: &Ansatz, constants: &DerivedConstants, spec: &QuadratureSpec) -> Result<Self> {
        let mu = ansatz.bubbles.iter().map(|b| b.mu).sum::<f64>() / ansatz.bubbles.len() as f64;
        let measured = energy_mu_derivative(ansatz, spec)?;
        let (n, beta) = (ansatz.dims.nf(), ansatz.potential.beta);
        let m = ansatz.bubbles.len();
        let mut predicted = 0.0;
        for j in 0..m {
            predicted -= constants.b1_signed * mu.powf(-(beta + 3.0));
            for i in 0..m {
                if i != j {
                    predicted += constants.b2.value * mu.powf(1.0 - n) * ansatz.separation(i, j).powf(2.0 - n);
                }
            }
        }
        Ok(Self { mu, measured, predicted, remainder_scale: mu.powf(-(beta + 3.0)) })
    }
}
