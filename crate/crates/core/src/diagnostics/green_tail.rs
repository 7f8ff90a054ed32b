//! Least-squares fit of a field on annuli around the centres to monopoles
//! and axial dipoles of the Green function G(x, y) = g_N |x − y|^{2−N}.
//! Transverse dipoles vanish on axisymmetric data and are not fitted.

use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::pohozaev::AxiJet;
use crate::profile::Layout;
use crate::quadrature::gauss_nodes;

/// inner ≤ |y − x_j| ≤ outer
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenTailModel {
    pub dims: DimensionParams,
    pub layout: Layout,
    pub centres: Vec<f64>,
    /// A_{j,0}
    pub monopole: Vec<f64>,
    /// A_{j,e₁}
    pub dipole: Vec<f64>,
    /// Weighted L² misfit relative to the data on the annuli.
    pub residual: f64,
    /// Ratio of extreme singular values of the column-scaled design.
    pub condition: f64,
    pub samples: usize,
}

const IMAGES: i32 = 200;

/// (G(x, y), ∂G/∂x₁(x, y)) for x = (c, 0), summed over images when wrapped.
fn green_pair(dims: &DimensionParams, layout: Layout, c: f64, y1: f64, r: f64) -> (f64, f64) {
    let n = dims.nf();
    let g = dims.green_const;
    let one = |dz: f64| {
        let d2 = dz * dz + r * r;
        let d = d2.sqrt();
        let v = g * d.powf(2.0 - n);
        // ∂/∂x₁ of |y − x|^{2−N} = (N−2)|y − x|^{−N}(y₁ − x₁)
        (v, (n - 2.0) * v * dz / d2)
    };
    match layout {
        Layout::Chain => one(y1 - c),
        Layout::Wrapped { period } => {
            let (mut a, mut b) = (0.0, 0.0);
            for m in -IMAGES..=IMAGES {
                let (p, q) = one(y1 - c - m as f64 * period);
                a += p;
                b += q;
            }
            (a, b)
        }
    }
}

impl GreenTailModel {
    pub fn eval(&self, y1: f64, r: f64) -> f64 {
        let mut s = 0.0;
        for (j, &c) in self.centres.iter().enumerate() {
            let (g, dg) = green_pair(&self.dims, self.layout, c, y1, r);
            s += self.monopole[j] * g + self.dipole[j] * dg;
        }
        s
    }
}

/// Fits η on the annulus around every centre. The annuli must stay clear of
/// the cores (inner ≥ 2·core) and of each other.
pub fn green_tail_fit<F: AxiJet>(
    eta: &F,
    dims: &DimensionParams,
    layout: Layout,
    centres: &[f64],
    annulus: Annulus,
    core: f64,
) -> Result<GreenTailModel> {
    if centres.is_empty() {
        return Err(Error::InvalidParameter("no centres to fit".into()));
    }
    if !(annulus.inner >= 2.0 * core && annulus.outer > annulus.inner) {
        return Err(Error::InvalidParameter(format!("annulus {annulus:?} must avoid the cores of radius 2·{core}")));
    }
    let mut sep = f64::INFINITY;
    for i in 0..centres.len() {
        for j in (i + 1)..centres.len() {
            let mut d = (centres[j] - centres[i]).abs();
            if let Layout::Wrapped { period } = layout {
                d = d.min(period - d);
            }
            sep = sep.min(d);
        }
    }
    if 2.0 * annulus.outer >= sep {
        return Err(Error::InvalidParameter(format!("annuli of radius {} overlap at separation {sep}", annulus.outer)));
    }
    // polar sample points with quadrature weights on each annulus
    let e = dims.n as i32;
    let radial = gauss_nodes(annulus.inner, annulus.outer, 1);
    let angular = gauss_nodes(0.0, std::f64::consts::PI, 2);
    let mut pts = vec![];
    for &c in centres {
        for &(rho, wr) in &radial {
            for &(t, wt) in &angular {
                let s = t.sin();
                pts.push((c + rho * t.cos(), rho * s, wr * wt * rho.powi(e - 1) * s.powi(e - 2)));
            }
        }
    }
    let nc = 2 * centres.len();
    let mut a = Mat::<f64>::zeros(pts.len(), nc);
    let mut b = Mat::<f64>::zeros(pts.len(), 1);
    for (i, &(y1, r, w)) in pts.iter().enumerate() {
        let sw = w.sqrt();
        for (j, &c) in centres.iter().enumerate() {
            let (g, dg) = green_pair(dims, layout, c, y1, r);
            a[(i, j)] = sw * g;
            a[(i, centres.len() + j)] = sw * dg;
        }
        b[(i, 0)] = sw * eta.jet(y1, r)?[0];
    }
    let scale: Vec<f64> = (0..nc).map(|j| (0..pts.len()).map(|i| a[(i, j)].powi(2)).sum::<f64>().sqrt()).collect();
    if scale.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::IllConditioned("empty design column".into()));
    }
    for j in 0..nc {
        for i in 0..pts.len() {
            a[(i, j)] /= scale[j];
        }
    }
    let sv = a.singular_values().map_err(|e| Error::IllConditioned(format!("{e:?}")))?;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    if !(condition < 1e12) {
        return Err(Error::IllConditioned(format!("Green-tail design, condition {condition:e}")));
    }
    let x = a.qr().solve_lstsq(&b);
    let coef: Vec<f64> = (0..nc).map(|j| x[(j, 0)] / scale[j]).collect();
    let (mut rr, mut bb) = (0.0, 0.0);
    for i in 0..pts.len() {
        let fit: f64 = (0..nc).map(|j| a[(i, j)] * x[(j, 0)]).sum();
        rr += (b[(i, 0)] - fit).powi(2);
        bb += b[(i, 0)].powi(2);
    }
    let m = centres.len();
    Ok(GreenTailModel {
        dims: *dims,
        layout,
        centres: centres.to_vec(),
        monopole: coef[..m].to_vec(),
        dipole: coef[m..].to_vec(),
        residual: if bb > 0.0 { (rr / bb).sqrt() } else { 0.0 },
        condition,
        samples: pts.len(),
    })
}
