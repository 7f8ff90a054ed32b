//! Two-bubble interaction ∫U_i^{2*−1}U_j.

use serde::{Deserialize, Serialize};

use super::{half_line, interval, Estimate, QuadratureSpec};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::{radial, Bubble};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionResult {
    pub value: Estimate,
    /// A_N I_pow μ_i^{−(N−2)/2} μ_j^{−(N−2)/2} d^{2−N}; None when min(μ)·d < 10.
    pub asymptotic: Option<f64>,
    pub separation: f64,
}

impl InteractionResult {
    pub fn ratio(&self) -> Option<f64> {
        self.asymptotic.map(|a| self.value.value / a)
    }
}

/// ∫ over the half-space nearer to a centre at the origin of f(|z|) g(|z − d e|),
/// in polar coordinates about the origin. The half-space is z·e < d/2.
fn half_space(
    dims: &DimensionParams,
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    d: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let e = dims.nf() - 2.0;
    let radial_part = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        // θ ranges over cos θ < d/(2ρ)
        let t0 = if rho <= d / 2.0 { 0.0 } else { (d / (2.0 * rho)).acos() };
        let ang = |t: f64| {
            let dist2 = rho * rho + d * d - 2.0 * rho * d * t.cos();
            g(dist2.max(0.0).sqrt()) * t.sin().powf(e)
        };
        let mid = 0.5 * (t0 + std::f64::consts::PI);
        let a = interval(&ang, t0, mid, 2).add(interval(&ang, mid, std::f64::consts::PI, 2));
        rho.powf(dims.nf() - 1.0) * f(rho) * a.value
    };
    let est = half_line(&radial_part, scale, spec, &[d / 2.0, d])?;
    Ok(est.scale(dims.transverse_area()))
}

/// ∫ U_i^{2*−1} U_j over R^N.
pub fn interaction_integral(bi: &Bubble, bj: &Bubble, dims: &DimensionParams, spec: &QuadratureSpec) -> Result<InteractionResult> {
    let d = bi.distance(&bj.center);
    if !(d > 0.0) {
        return Err(Error::Coincident(0, 1));
    }
    let p = (dims.nf() + 2.0) / (dims.nf() - 2.0);
    let (mi, mj) = (bi.mu, bj.mu);
    let ui_p = move |r: f64| radial(dims, mi, r).powf(p);
    let uj = move |r: f64| radial(dims, mj, r);
    let near_i = half_space(dims, &ui_p, &uj, d, 1.0 / mi, spec)?;
    let near_j = half_space(dims, &uj, &ui_p, d, 1.0 / mj, spec)?;
    let value = near_i.add(near_j);
    let k = dims.half_nm2();
    let asymptotic = if mi.min(mj) * d >= 10.0 {
        let ipow = super::universal::flux_value(dims);
        Some(dims.profile_const() * ipow * mi.powf(-k) * mj.powf(-k) * d.powf(2.0 - dims.nf()))
    } else {
        None
    };
    Ok(InteractionResult { value, asymptotic, separation: d })
}

/// ∫ U_i U_j over R^N, finite for N ≥ 5.
pub fn overlap_integral(bi: &Bubble, bj: &Bubble, dims: &DimensionParams, spec: &QuadratureSpec) -> Result<Estimate> {
    let d = bi.distance(&bj.center);
    if !(d > 0.0) {
        return Err(Error::Coincident(0, 1));
    }
    let (mi, mj) = (bi.mu, bj.mu);
    let ui = move |r: f64| radial(dims, mi, r);
    let uj = move |r: f64| radial(dims, mj, r);
    Ok(half_space(dims, &ui, &uj, d, 1.0 / mi, spec)?.add(half_space(dims, &uj, &ui, d, 1.0 / mj, spec)?))
}

/// A_N² μ_i^{−k} μ_j^{−k} R_N d^{4−N}, the far-field form of [`overlap_integral`],
/// with R_N = π^{N/2} Γ((N−4)/2) / Γ((N−2)/2)² from the Riesz composition rule.
pub fn overlap_asymptotic(mu_i: f64, mu_j: f64, d: f64, dims: &DimensionParams) -> f64 {
    use statrs::function::gamma::gamma;
    let nf = dims.nf();
    let k = dims.half_nm2();
    let riesz = std::f64::consts::PI.powf(nf / 2.0) * gamma((nf - 4.0) / 2.0) / gamma((nf - 2.0) / 2.0).powi(2);
    dims.profile_const().powi(2) * (mu_i * mu_j).powf(-k) * riesz * d.powf(4.0 - nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec { tol: 1e-6, ..Default::default() }
    }

    #[test]
    fn far_field_ratio() {
        let d = DimensionParams::new(5).unwrap();
        let bi = Bubble::on_axis(&d, 0.0, 1.0).unwrap();
        let bj = Bubble::on_axis(&d, 40.0, 1.0).unwrap();
        let r = interaction_integral(&bi, &bj, &d, &spec()).unwrap();
        let q = r.ratio().unwrap();
        assert!((0.95..=1.05).contains(&q), "ratio {q}");
    }

    #[test]
    fn symmetric_at_equal_heights() {
        let d = DimensionParams::new(6).unwrap();
        let bi = Bubble::on_axis(&d, 0.0, 2.0).unwrap();
        let bj = Bubble::on_axis(&d, 7.0, 2.0).unwrap();
        let a = interaction_integral(&bi, &bj, &d, &spec()).unwrap().value.value;
        let b = interaction_integral(&bj, &bi, &d, &spec()).unwrap().value.value;
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn decay_exponent() {
        let d = DimensionParams::new(5).unwrap();
        let bi = Bubble::on_axis(&d, 0.0, 1.0).unwrap();
        let seps = [20.0, 40.0, 80.0, 160.0];
        let vals: Vec<f64> = seps
            .iter()
            .map(|&s| {
                let bj = Bubble::on_axis(&d, s, 1.0).unwrap();
                interaction_integral(&bi, &bj, &d, &spec()).unwrap().value.value
            })
            .collect();
        let slope = (vals[3] / vals[2]).ln() / 2f64.ln();
        assert!((slope + 3.0).abs() < 0.03, "slope {slope}");
        // value · d^{N−2} approaches A_N I_pow
        let lim = d.profile_const() * super::super::universal::flux_value(&d);
        let errs: Vec<f64> = vals.iter().zip(seps).map(|(v, s)| (v * s.powi(3) / lim - 1.0).abs()).collect();
        assert!(errs[3] < errs[0] && errs[3] < 0.01, "{errs:?}");
    }

    #[test]
    fn overlap_far_field() {
        let d = DimensionParams::new(7).unwrap();
        let bi = Bubble::on_axis(&d, 0.0, 4.0).unwrap();
        let bj = Bubble::on_axis(&d, 40.0, 4.0).unwrap();
        let v = overlap_integral(&bi, &bj, &d, &spec()).unwrap().value;
        let q = v / overlap_asymptotic(4.0, 4.0, 40.0, &d);
        assert!((q - 1.0).abs() < 0.02, "ratio {q}");
    }

    #[test]
    fn near_field_has_no_asymptotic() {
        let d = DimensionParams::new(5).unwrap();
        let bi = Bubble::on_axis(&d, 0.0, 1.0).unwrap();
        let bj = Bubble::on_axis(&d, 3.0, 1.0).unwrap();
        assert!(interaction_integral(&bi, &bj, &d, &spec()).unwrap().asymptotic.is_none());
    }
}
