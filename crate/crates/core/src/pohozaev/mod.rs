//! Local Pohozaev identities on balls B_δ(x_j) around the bubble centres.
//!
//! Fields are read through [`AxiJet`] (value and axisymmetric gradient).
//! Surface and ball integrals reduce to the polar angle with weight
//! sin^{N−2}, the transverse sphere contributing |S^{N−2}|.

pub mod boundary;
pub mod identities;

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::profile::{bubble, Ansatz};
use crate::quadrature::Estimate;

pub use boundary::{boundary_term_estimates, BoundaryReport};
pub use identities::{dilation_identity, finite_ball_interaction_constant, translation_identity, IdentityKind, PohozaevReport, Term};

/// Value and (∂/∂y₁, ∂/∂r) of an axisymmetric function.
pub trait AxiJet: Sync {
    fn jet(&self, y1: f64, r: f64) -> Result<[f64; 3]>;
}

/// u = W + φ with W in closed form and φ interpolated from the grid.
#[derive(Debug, Clone, Copy)]
pub struct SolutionView<'a> {
    pub ansatz: &'a Ansatz,
    pub phi: &'a Field,
}

impl AxiJet for SolutionView<'_> {
    fn jet(&self, y1: f64, r: f64) -> Result<[f64; 3]> {
        let (p, p1, pr) = self.phi.jet(y1, r)?;
        let w = self.ansatz.w_axi(y1, r);
        let (w1, wr) = self.ansatz.grad_w_axi(y1, r);
        Ok([w + p, w1 + p1, wr + pr])
    }
}

impl AxiJet for Field {
    fn jet(&self, y1: f64, r: f64) -> Result<[f64; 3]> {
        let (v, d1, dr) = Field::jet(self, y1, r)?;
        Ok([v, d1, dr])
    }
}

/// A closed-form jet.
pub struct FnJet<F>(pub F);

impl<F: Fn(f64, f64) -> [f64; 3] + Sync> AxiJet for FnJet<F> {
    fn jet(&self, y1: f64, r: f64) -> Result<[f64; 3]> {
        Ok((self.0)(y1, r))
    }
}

/// Exact bubble U_{(c,0),μ}.
pub fn bubble_jet(dims: &DimensionParams, centre: f64, mu: f64, y1: f64, r: f64) -> [f64; 3] {
    let dz = y1 - centre;
    let rho = (dz * dz + r * r).sqrt();
    let d = bubble::radial_d_over_r(dims, mu, rho);
    [bubble::radial(dims, mu, rho), d * dz, d * r]
}

/// θ = max{(β+4−N)/(β+1−2τ), 1}; a non-positive denominator gives 1.
pub fn theta_exponent(n: usize, beta: f64, tau: f64) -> f64 {
    let den = beta + 1.0 - 2.0 * tau;
    if den <= 0.0 {
        return 1.0;
    }
    ((beta + 4.0 - n as f64) / den).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevConfig {
    pub theta: f64,
    /// δ = μ^{−θ}
    pub delta: f64,
    /// Gauss–Legendre nodes per angular / radial panel.
    pub order: usize,
    pub ball: usize,
    /// 1-based coordinate direction for the translation identity.
    pub direction: usize,
}

impl PohozaevConfig {
    /// δ from θ and the height of bubble `ball`; checks δ < L/4.
    pub fn new(ansatz: &Ansatz, tau: f64, ball: usize) -> Result<Self> {
        let b = ansatz.bubbles.get(ball).ok_or_else(|| Error::Index(format!("ball {ball}")))?;
        let theta = theta_exponent(ansatz.dims.n, ansatz.potential.beta, tau);
        let delta = b.mu.powf(-theta);
        let l = ansatz.potential.period_l;
        if delta >= l / 4.0 {
            return Err(Error::InvalidParameter(format!("δ = {delta} not below L/4 = {}", l / 4.0)));
        }
        Ok(Self { theta, delta, order: 24, ball, direction: 1 })
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("δ = {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }
}

fn gl(order: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(order).ok_or_else(|| Error::InvalidParameter("quadrature order 0".into()))?;
    Ok(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
}

/// ∫_0^π g(θ) sin^{N−2}θ dθ on `panels` equal panels.
fn angular(n: usize, rule: &[(f64, f64)], panels: usize, g: &mut dyn FnMut(f64) -> Result<f64>) -> Result<f64> {
    let h = std::f64::consts::PI / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        for &(x, w) in rule {
            let t = a + 0.5 * h * (x + 1.0);
            s += 0.5 * h * w * t.sin().powi(n as i32 - 2) * g(t)?;
        }
    }
    Ok(s)
}

/// ∫_{∂B_δ((c,0))} f over the sphere; f receives (y₁, r, ν₁, ν_r).
/// The error estimate compares one and two angular panels.
pub fn sphere_integral<F>(f: F, centre: f64, radius: f64, dims: &DimensionParams, order: usize) -> Result<Estimate>
where
    F: Fn(f64, f64, f64, f64) -> Result<f64>,
{
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("sphere radius {radius}")));
    }
    let rule = gl(order)?;
    let n = dims.n;
    let mut g = |t: f64| {
        let (c, s) = (t.cos(), t.sin());
        f(centre + radius * c, radius * s, c, s)
    };
    let coarse = angular(n, &rule, 1, &mut g)?;
    let fine = angular(n, &rule, 2, &mut g)?;
    let m = dims.transverse_area() * radius.powi(n as i32 - 1);
    Ok(Estimate { value: m * fine, error: m * (fine - coarse).abs() })
}

/// ∫_{B_δ((c,0))} f, f receiving (y₁, r), in polar form.
pub fn ball_integral<F>(f: F, centre: f64, radius: f64, dims: &DimensionParams, order: usize) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {radius}")));
    }
    let rule = gl(order)?;
    let n = dims.n;
    let level = |panels: usize| -> Result<f64> {
        let h = radius / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            for &(x, w) in &rule {
                let rho = p as f64 * h + 0.5 * h * (x + 1.0);
                let mut g = |t: f64| f(centre + rho * t.cos(), rho * t.sin());
                s += 0.5 * h * w * rho.powi(n as i32 - 1) * angular(n, &rule, panels, &mut g)?;
            }
        }
        Ok(s)
    };
    let coarse = level(1)?;
    let fine = level(2)?;
    let m = dims.transverse_area();
    Ok(Estimate { value: m * fine, error: m * (fine - coarse).abs() })
}

/// Rejects spheres resolved by fewer than two grid spacings.
pub fn check_resolution(phi: &Field, centre: f64, radius: f64) -> Result<()> {
    let g = phi.grid();
    let span = |nodes: &[f64], lo: f64, hi: f64| {
        nodes
            .windows(2)
            .filter(|w| w[1] >= lo && w[0] <= hi)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    };
    let h = span(&g.y1, centre - radius, centre + radius).max(span(&g.r, 0.0, radius));
    if radius < 2.0 * h {
        return Err(Error::InvalidParameter(format!("radius {radius} under grid resolution (spacing {h})")));
    }
    if !g.covers(centre - radius, radius) || !g.covers(centre + radius, radius) {
        return Err(Error::OutsideCoverage(format!("ball at {centre} radius {radius}")));
    }
    Ok(())
}
