use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;

/// Radial cutoff ξ: 1 on |z| ≤ inner_radius, 0 on |z| ≥ outer_radius.
///
/// The ramp is the C^∞ step p/(p+q) with p = f(1−t), q = f(t), f(x) = e^{−1/x},
/// t = (|z| − inner)/(outer − inner).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { inner_radius: 1.0, outer_radius: 2.0 }
    }
}

/// Result of [`eval_cutoff`] for the requested order.
#[derive(Debug, Clone, PartialEq)]
pub enum CutoffEval {
    Value(f64),
    Gradient(Vec<f64>),
    Laplacian(f64),
}

fn f0(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (-1.0 / x).exp();
    let x2 = x * x;
    (f, f / x2, f * (1.0 / (x2 * x2) - 2.0 / (x2 * x)))
}

impl CutoffSpec {
    fn width(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// (ξ, ξ', ξ'') as functions of the radius.
    pub fn radial(&self, rho: f64) -> (f64, f64, f64) {
        if rho <= self.inner_radius {
            return (1.0, 0.0, 0.0);
        }
        if rho >= self.outer_radius {
            return (0.0, 0.0, 0.0);
        }
        let w = self.width();
        let t = (rho - self.inner_radius) / w;
        let (p, pd, pdd) = f0(1.0 - t);
        let (q, qd, qdd) = f0(t);
        // d/dt of p(1−t) flips sign
        let (pd, pdd) = (-pd, pdd);
        let s = p + q;
        let num1 = pd * q - p * qd;
        let x1 = num1 / (s * s);
        let sd = pd + qd;
        let x2 = (pdd * q - p * qdd) / (s * s) - 2.0 * num1 * sd / (s * s * s);
        (p / s, x1 / w, x2 / (w * w))
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.radial(rho).0
    }

    /// Δξ = ξ'' + (N−1)ξ'/ρ.
    pub fn laplacian(&self, dims: &DimensionParams, rho: f64) -> f64 {
        let (_, d1, d2) = self.radial(rho);
        if d1 == 0.0 && d2 == 0.0 {
            return 0.0;
        }
        d2 + (dims.nf() - 1.0) * d1 / rho
    }
}

/// ξ, ∇ξ or Δξ at `z` depending on `order`.
pub fn eval_cutoff(c: &CutoffSpec, dims: &DimensionParams, z: &[f64], order: u8) -> CutoffEval {
    let rho = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    match order {
        0 => CutoffEval::Value(c.value(rho)),
        1 => {
            let (_, d1, _) = c.radial(rho);
            if d1 == 0.0 {
                CutoffEval::Gradient(vec![0.0; z.len()])
            } else {
                CutoffEval::Gradient(z.iter().map(|v| d1 * v / rho).collect())
            }
        }
        _ => CutoffEval::Laplacian(c.laplacian(dims, rho)),
    }
}
