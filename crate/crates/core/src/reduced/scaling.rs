//! μ ∝ L^{(N−2)/(β−N+4)}: solve the balance per spacing and regress.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{solve_reduced, LatticeMode, LatticeState};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::quadrature::DerivedConstants;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub spacings: Vec<f64>,
    pub heights: Vec<f64>,
    pub slope: f64,
    /// 95% confidence half-width of the slope.
    pub slope_ci: f64,
    pub predicted_slope: f64,
    pub intercept: f64,
    /// exp(intercept), the fitted μ/L^slope.
    pub prefactor: f64,
    /// (C₄ S̄)^{1/(N−4−β)} with S̄ the mean unit-spacing lattice sum.
    pub prefactor_predicted: f64,
    pub b_bar: f64,
    /// prefactor / B̄ − 1
    pub prefactor_residual: f64,
    /// max over spacings of |Σ_j r_j| / ((m+1) μ^{−(β+2)}).
    pub residual_max: f64,
}

impl ScalingFit {
    pub fn slope_rel_error(&self) -> f64 {
        (self.slope / self.predicted_slope - 1.0).abs()
    }
}

/// Least-squares slope of y on x with its 95% half-width.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::IllConditioned(format!("need at least 3 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::IllConditioned("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0).map_err(|e| Error::IllConditioned(e.to_string()))?.inverse_cdf(0.975);
    Ok((slope, t * se, intercept))
}

/// Solves height and shifts for each spacing and fits log μ against log L.
pub fn scaling_fit(dims: &DimensionParams, consts: &DerivedConstants, spacings: &[f64], m: usize, mode: LatticeMode) -> Result<ScalingFit> {
    if spacings.len() < 4 {
        return Err(Error::IllConditioned(format!("scaling fit needs at least 4 spacings, got {}", spacings.len())));
    }
    let nf = dims.nf();
    let beta = consts.beta;
    let mut heights = Vec::with_capacity(spacings.len());
    let mut residual_max: f64 = 0.0;
    for &l in spacings {
        let st = LatticeState::new(m, l, 1.0, dims, mode)?;
        let (st, res) = solve_reduced(&st, consts, dims)?;
        let total: f64 = res.height.iter().sum();
        residual_max = residual_max.max(total.abs() / (st.len() as f64 * st.mu.powf(-(beta + 2.0))));
        heights.push(st.mu);
    }
    let lx: Vec<f64> = spacings.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = heights.iter().map(|v| v.ln()).collect();
    let (slope, slope_ci, intercept) = fit_line(&lx, &ly)?;
    let unit = LatticeState::new(m, 1.0, 1.0, dims, mode)?;
    let mut sum = 0.0;
    for j in 0..unit.len() {
        sum += unit.lattice_sum(j, nf - 2.0)?;
    }
    let prefactor_predicted = (consts.c4.value * sum / unit.len() as f64).powf(1.0 / (nf - 4.0 - beta));
    let prefactor = intercept.exp();
    Ok(ScalingFit {
        spacings: spacings.to_vec(),
        heights,
        slope,
        slope_ci,
        predicted_slope: (nf - 2.0) / (beta - nf + 4.0),
        intercept,
        prefactor,
        prefactor_predicted,
        b_bar: consts.b_bar.value,
        prefactor_residual: prefactor / consts.b_bar.value - 1.0,
        residual_max,
    })
}
