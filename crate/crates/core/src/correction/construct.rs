//! Balanced lattice solutions at a requested height.
//!
//! Q is clipped at radius t/μ around each lattice point. For β in the window
//! the potential energy alone has no critical height, so t is tuned until the
//! dilation multiplier of the unshifted lattice vanishes at the requested μ;
//! the outer loop then settles heights and centres.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::full::{solve_full_on, FullSolution, OuterOptions};
use super::system::{LinearizedSystem, ModeKind};
use super::{contract_with, grid_for, CorrectionConfig};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::{Ansatz, Layout, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub mu: f64,
    pub l: f64,
    /// Number of bubbles.
    pub count: usize,
    pub wrapped: bool,
}

impl LatticeSpec {
    pub fn dims(&self) -> Result<DimensionParams> {
        DimensionParams::new(self.n)
    }

    /// Lattice with clip radius t/μ, all heights μ and no shifts.
    pub fn ansatz(&self, t: f64) -> Result<Ansatz> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("empty lattice".into()));
        }
        let dims = self.dims()?;
        let pot = PotentialSpec::new(self.a, self.beta, self.l)?.with_clip_radius(t / self.mu)?;
        let layout = if self.wrapped { Layout::Wrapped { period: self.count as f64 * self.l } } else { Layout::Chain };
        Ansatz::lattice(dims, &vec![self.mu; self.count], &vec![0.0; self.count], pot, layout)
    }
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub spec: LatticeSpec,
    /// μ·(clip radius)
    pub clip_t: f64,
    pub calibration_evals: usize,
    pub solution: FullSolution,
}

/// Mean dilation multiplier of the unshifted lattice.
fn dilation_multiplier(spec: &LatticeSpec, t: f64, cfg: &CorrectionConfig) -> Result<f64> {
    let a = spec.ansatz(t)?;
    let grid = grid_for(&a, cfg)?;
    let sys = LinearizedSystem::new(&a, grid, cfg.tail)?;
    let res = contract_with(&sys, cfg)?;
    let mut s = 0.0;
    for j in 0..spec.count {
        let l = sys.mode_index(j, ModeKind::Dilation).ok_or_else(|| Error::Index(format!("mode of bubble {j}")))?;
        s += res.multipliers[l];
    }
    Ok(s / spec.count as f64)
}

struct Tolerance {
    x: f64,
    f: f64,
}

impl roots::Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.f
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.x
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 60
    }
}

/// t with vanishing dilation multiplier, by Brent's method in ln t on
/// [t_lo, t_hi]; stops once ln t is known to within `rtol`.
pub fn calibrate_clip(spec: &LatticeSpec, cfg: &CorrectionConfig, t_lo: f64, t_hi: f64, rtol: f64) -> Result<(f64, usize)> {
    let fa = dilation_multiplier(spec, t_lo, cfg)?;
    let fb = dilation_multiplier(spec, t_hi, cfg)?;
    if fa.signum() == fb.signum() {
        return Err(Error::Rejected(format!(
            "no balanced clip radius in [{t_lo}, {t_hi}]/μ: dilation multiplier {fa:e}, {fb:e}"
        )));
    }
    // the solver revisits bracket ends, so values are cached
    let mut seen: HashMap<u64, f64> = HashMap::from([(t_lo.ln().to_bits(), fa), (t_hi.ln().to_bits(), fb)]);
    let mut failure = None;
    let f = |x: f64| {
        if let Some(&v) = seen.get(&x.to_bits()) {
            return v;
        }
        let v = match dilation_multiplier(spec, x.exp(), cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        };
        seen.insert(x.to_bits(), v);
        v
    };
    let mut tol = Tolerance { x: rtol, f: 1e-9 * fa.abs().max(fb.abs()) };
    let root = roots::find_root_brent(t_lo.ln(), t_hi.ln(), f, &mut tol);
    let evals = seen.len();
    if let Some(e) = failure {
        return Err(e);
    }
    let x = root.map_err(|e| Error::NonConvergence(format!("clip calibration: {e}")))?;
    Ok((x.exp(), evals))
}

/// Calibrates the clip, then solves for heights and centres on a grid
/// built around the unshifted lattice.
pub fn construct(spec: &LatticeSpec, cfg: &CorrectionConfig, opts: &OuterOptions) -> Result<Construction> {
    let (t, evals) = calibrate_clip(spec, cfg, 0.05, 2.0, 1e-4)?;
    let a = spec.ansatz(t)?;
    let grid = grid_for(&a, cfg)?;
    let solution = solve_full_on(&a, grid, cfg, opts)?;
    Ok(Construction { spec: *spec, clip_t: t, calibration_evals: evals, solution })
}
