use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension-dependent constants of the critical problem in R^N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionParams {
    pub n: usize,
    /// Critical Sobolev exponent 2N/(N-2).
    pub two_star: f64,
    /// Surface measure of the unit (N-1)-sphere.
    pub sphere_area: f64,
    /// Normalisation of the Newtonian kernel, ((N-2)ω_{N-1})^{-1}.
    pub green_const: f64,
}

/// Surface measure of the unit sphere S^k ⊂ R^{k+1}.
pub fn unit_sphere_area(k: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^k| = 2π/(k-1) |S^{k-2}|
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_area(k - 2),
    }
}

impl DimensionParams {
    pub fn new(n: usize) -> Result<Self> {
        if n < 5 {
            return Err(Error::Dimension(n));
        }
        let nf = n as f64;
        let sphere_area = unit_sphere_area(n - 1);
        Ok(Self {
            n,
            two_star: 2.0 * nf / (nf - 2.0),
            sphere_area,
            green_const: 1.0 / ((nf - 2.0) * sphere_area),
        })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// (N-2)/2, the scaling exponent of the bubble.
    pub fn half_nm2(&self) -> f64 {
        (self.nf() - 2.0) / 2.0
    }

    /// Profile constant A_N = (N(N-2))^{(N-2)/4}.
    pub fn profile_const(&self) -> f64 {
        let nf = self.nf();
        (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0)
    }

    /// Measure of the transverse sphere S^{N-2}, the weight of axisymmetric integrals.
    pub fn transverse_area(&self) -> f64 {
        unit_sphere_area(self.n - 2)
    }

    /// Volume of the unit ball.
    pub fn ball_volume(&self) -> f64 {
        self.sphere_area / self.nf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas_match_gamma_formula() {
        for k in 0..12usize {
            let d = (k + 1) as f64;
            let expect = 2.0 * PI.powf(d / 2.0) / statrs::function::gamma::gamma(d / 2.0);
            assert!((unit_sphere_area(k) - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(DimensionParams::new(4).is_err());
        let d = DimensionParams::new(5).unwrap();
        assert!((d.two_star - 10.0 / 3.0).abs() < 1e-15);
        assert!(d.green_const > 0.0);
    }
}
