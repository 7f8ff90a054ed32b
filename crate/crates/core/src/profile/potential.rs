use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Q(y) = a·d^β + remainder_scale·d^{β+1}, clipped to [0, clip_ceiling],
/// where d is the distance from y to the nearest lattice point (jL, 0, …, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub a: f64,
    pub beta: f64,
    pub period_l: f64,
    pub remainder_scale: f64,
    /// `None` disables clipping.
    pub clip_ceiling: Option<f64>,
}

impl PotentialSpec {
    /// Default clipping at a·(L/2)^β.
    pub fn new(a: f64, beta: f64, period_l: f64) -> Result<Self> {
        let spec = Self {
            a,
            beta,
            period_l,
            remainder_scale: 0.0,
            clip_ceiling: Some((a * (period_l / 2.0).powf(beta)).abs()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn unclipped(a: f64, beta: f64, period_l: f64) -> Result<Self> {
        let spec = Self { a, beta, period_l, remainder_scale: 0.0, clip_ceiling: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_remainder(mut self, scale: f64) -> Result<Self> {
        self.remainder_scale = scale;
        self.validate()?;
        Ok(self)
    }

    /// Clip Q at its (unclipped) value at distance `rho` from the lattice.
    pub fn with_clip_radius(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("clip radius must be positive, got {rho}")));
        }
        self.clip_ceiling = Some(self.raw(rho).abs());
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period_l > 0.0) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {}", self.period_l)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        if self.clip_ceiling.is_none() && (self.a < 0.0 || self.remainder_scale < 0.0) {
            return Err(Error::Rejected(
                "negative coefficients without clipping make Q negative near the lattice".into(),
            ));
        }
        Ok(())
    }

    /// Radius beyond which the clip is active, if any (pure-power case).
    pub fn clip_radius(&self) -> Option<f64> {
        let c = self.clip_ceiling?;
        if self.a <= 0.0 {
            return None;
        }
        // bisection on the monotone raw profile
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.raw(hi) < c {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.raw(mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    fn raw(&self, d: f64) -> f64 {
        self.a * d.powf(self.beta) + self.remainder_scale * d.powf(self.beta + 1.0)
    }

    fn raw_d(&self, d: f64) -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        self.a * self.beta * d.powf(self.beta - 1.0)
            + self.remainder_scale * (self.beta + 1.0) * d.powf(self.beta)
    }

    /// Q as a function of the lattice distance d.
    pub fn of_distance(&self, d: f64) -> f64 {
        let v = self.raw(d).max(0.0);
        match self.clip_ceiling {
            Some(c) => v.min(c),
            None => v,
        }
    }

    /// dQ/dd, zero wherever a clip is active.
    pub fn of_distance_d(&self, d: f64) -> f64 {
        let v = self.raw(d);
        if v <= 0.0 {
            return 0.0;
        }
        if let Some(c) = self.clip_ceiling {
            if v >= c {
                return 0.0;
            }
        }
        self.raw_d(d)
    }

    /// Signed offset in y₁ to the nearest lattice point.
    pub fn lattice_offset(&self, y1: f64) -> f64 {
        y1 - self.period_l * (y1 / self.period_l).round()
    }

    pub fn eval_axi(&self, y1: f64, r: f64) -> f64 {
        let dz = self.lattice_offset(y1);
        self.of_distance((dz * dz + r * r).sqrt())
    }

    /// (∂Q/∂y₁, ∂Q/∂r) in axisymmetric coordinates.
    pub fn grad_axi(&self, y1: f64, r: f64) -> (f64, f64) {
        let dz = self.lattice_offset(y1);
        let d = (dz * dz + r * r).sqrt();
        if d == 0.0 {
            return (0.0, 0.0);
        }
        let g = self.of_distance_d(d);
        (g * dz / d, g * r / d)
    }
}

pub fn eval_q(p: &PotentialSpec, y: &[f64]) -> f64 {
    let r = y.iter().skip(1).map(|v| v * v).sum::<f64>().sqrt();
    p.eval_axi(y[0], r)
}

pub fn grad_q(p: &PotentialSpec, y: &[f64]) -> Vec<f64> {
    let dz = p.lattice_offset(y[0]);
    let d = (dz * dz + y.iter().skip(1).map(|v| v * v).sum::<f64>()).sqrt();
    let mut g = vec![0.0; y.len()];
    if d == 0.0 {
        return g;
    }
    let s = p.of_distance_d(d) / d;
    g[0] = s * dz;
    for k in 1..y.len() {
        g[k] = s * y[k];
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_on_lattice_and_is_periodic() {
        let p = PotentialSpec::new(1.0, 3.5, 10.0).unwrap();
        for j in -3..4 {
            assert_eq!(eval_q(&p, &[j as f64 * 10.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
        }
        let y = [1.3, 0.4, 0.2, -0.7, 0.1];
        let mut z = y;
        z[0] += 10.0;
        assert!((eval_q(&p, &y) - eval_q(&p, &z)).abs() < 1e-12);
    }

    #[test]
    fn formula_before_clipping() {
        let p = PotentialSpec::new(1.0, 3.5, 10.0).unwrap();
        let v = eval_q(&p, &[0.0, 2.0, 0.0, 0.0, 0.0]);
        assert!((v - 2f64.powf(3.5)).abs() < 1e-12);
        let far = eval_q(&p, &[5.0, 6.0, 0.0, 0.0, 0.0]);
        assert_eq!(far, 5f64.powf(3.5));
    }

    #[test]
    fn negative_amplitude_needs_clipping() {
        assert!(PotentialSpec::unclipped(-1.0, 3.0, 8.0).is_err());
        let p = PotentialSpec::new(-1.0, 3.0, 8.0).unwrap();
        assert_eq!(eval_q(&p, &[1.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn clip_radius_round_trip() {
        let p = PotentialSpec::new(1.0, 4.0, 8.0).unwrap().with_clip_radius(0.2).unwrap();
        assert!((p.clip_radius().unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(p.of_distance_d(0.3), 0.0);
        assert!(p.of_distance_d(0.1) > 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = PotentialSpec::new(1.0, 4.5, 6.0).unwrap().with_remainder(0.3).unwrap();
        let y = [6.4, 0.3, -0.2, 0.1, 0.0, 0.2, 0.1];
        let g = grad_q(&p, &y);
        for k in 0..7 {
            let h = 1e-6;
            let mut a = y;
            let mut b = y;
            a[k] += h;
            b[k] -= h;
            let fd = (eval_q(&p, &a) - eval_q(&p, &b)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6);
        }
    }
}
