//! Discretized correction φ = u − W on the axisymmetric grid: the error term
//! l_L, the nonlinear remainder N_L, the constrained linear solve with
//! multipliers, the contraction iteration and the outer loop driving the
//! multipliers to zero.

pub mod construct;
pub mod contraction;
pub mod full;
pub mod system;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::grid::{AxiGrid, Field, GridSpec};
use crate::profile::{bubble, Ansatz, Layout, WeightedNormParams};

pub use construct::{calibrate_clip, construct, Construction, LatticeSpec};
pub use contraction::{contract, contract_with, CorrectionResult, Trace};
pub use full::{solve_full, solve_full_on, FullSolution, OuterOptions, OuterStep};
pub use system::{LinearizedSystem, Mode, ModeKind};

/// Dirichlet data on the truncation boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailBoundary {
    Zero,
    /// φ = Σ_j U_j on the boundary (all cutoffs vanish there, so this is the
    /// bubble tail u would carry without the potential).
    BubbleTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionConfig {
    /// Margin from the outermost centres to the box, and the radial extent.
    pub pad: f64,
    pub h_max: f64,
    pub q: f64,
    pub level: u32,
    pub tail: TailBoundary,
    pub norms: WeightedNormParams,
    /// Contraction stops when ‖φ_{k+1} − φ_k‖_* < tol·‖φ_k‖_*.
    pub tol: f64,
    /// Accepted once the step stops shrinking below floor·‖φ‖_*.
    pub floor: f64,
    pub max_iter: usize,
}

impl CorrectionConfig {
    pub fn new(norms: WeightedNormParams) -> Self {
        Self { pad: 6.0, h_max: 0.25, q: 0.2, level: 0, tail: TailBoundary::BubbleTail, norms, tol: 1e-8, floor: 1e-7, max_iter: 40 }
    }
}

/// Grid clustered at the bubble centres of `ansatz`.
pub fn grid_spec_for(ansatz: &Ansatz, cfg: &CorrectionConfig) -> GridSpec {
    let anchors: Vec<f64> = ansatz.bubbles.iter().map(|b| b.center[0]).collect();
    let mu = ansatz.bubbles.iter().map(|b| b.mu).fold(0.0, f64::max);
    let mut spec = match ansatz.layout {
        Layout::Chain => GridSpec::around(&anchors, mu, cfg.pad),
        Layout::Wrapped { period } => GridSpec::periodic(&anchors, period, mu, cfg.pad),
    };
    spec.h_max = cfg.h_max;
    spec.q = cfg.q;
    spec.level = cfg.level;
    spec
}

pub fn grid_for(ansatz: &Ansatz, cfg: &CorrectionConfig) -> Result<Arc<AxiGrid>> {
    Ok(Arc::new(grid_spec_for(ansatz, cfg).build(&ansatz.dims)?))
}

/// W sampled on the grid.
pub fn sample_w(ansatz: &Ansatz, grid: &Arc<AxiGrid>) -> Field {
    Field::sample(grid.clone(), |y1, r| ansatz.w_axi(y1, r))
}

/// l_L = (W^{2*−1} − Σ ξ_j U_j^{2*−1}) − Q W + Σ (U_j Δξ_j + 2∇ξ_j·∇U_j).
pub fn assemble_ll(ansatz: &Ansatz, grid: &Arc<AxiGrid>) -> Field {
    let p = ansatz.dims.two_star - 1.0;
    Field::sample(grid.clone(), |y1, r| {
        let pt = ansatz.parts_axi(y1, r);
        if pt.w == 0.0 && pt.cut_terms == 0.0 {
            return 0.0;
        }
        pt.w.powf(p) - pt.sum_xi_up - ansatz.potential.eval_axi(y1, r) * pt.w + pt.cut_terms
    })
}

/// N_L(φ) = (W+φ)_+^{2*−1} − W^{2*−1} − (2*−1) W^{2*−2} φ, with the number of
/// nodes where W + φ < 0.
pub fn eval_nl(w: &Field, phi: &Field) -> Result<(Field, usize)> {
    let p = w.grid().dims.two_star - 1.0;
    let neg = w.values().iter().zip(phi.values()).filter(|(a, b)| *a + *b < 0.0).count();
    let f = w.zip_with(phi, |w, f| {
        let u = (w + f).max(0.0);
        if w == 0.0 {
            return u.powf(p);
        }
        u.powf(p) - w.powf(p) - p * w.powf(p - 1.0) * f
    })?;
    Ok((f, neg))
}

/// Max nodal residual of −Δ_hU − U^{2*−1} for the exact bubble over nested
/// refinements; `orders[k]` = log₂(errors[k]/errors[k+1]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub nodes: Vec<usize>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

pub fn bubble_residual_study(dims: &DimensionParams, mu: f64, pad: f64, levels: usize) -> Result<RefinementStudy> {
    if levels < 2 {
        return Err(Error::InvalidParameter("a refinement study needs two levels".into()));
    }
    let p = dims.two_star - 1.0;
    let mut spec = GridSpec::around(&[0.0], mu, pad);
    let (mut nodes, mut errors) = (vec![], vec![]);
    for _ in 0..levels {
        let g = Arc::new(spec.build(dims)?);
        let u = Field::sample(g.clone(), |y1, r| bubble::radial(dims, mu, (y1 * y1 + r * r).sqrt()));
        let lap = g.apply_laplacian(u.values());
        let mut e = 0.0f64;
        for (j, _, _) in g.nodes() {
            if g.is_boundary(j / g.nr(), j % g.nr()) {
                continue;
            }
            e = e.max((-lap[j] - u.values()[j].powf(p)).abs());
        }
        nodes.push(g.len());
        errors.push(e);
        spec = spec.refined();
    }
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(RefinementStudy { nodes, errors, orders })
}

/// Σ_j U_j over all images of the layout, for the boundary data.
pub fn bubble_tail(ansatz: &Ansatz, y1: f64, r: f64) -> f64 {
    let dims = &ansatz.dims;
    let mut s = 0.0;
    for b in &ansatz.bubbles {
        let dz = y1 - b.center[0];
        match ansatz.layout {
            Layout::Chain => s += bubble::radial(dims, b.mu, (dz * dz + r * r).sqrt()),
            Layout::Wrapped { period } => {
                let base = dz - period * (dz / period).round();
                for n in -200i32..=200 {
                    let z = base + n as f64 * period;
                    s += bubble::radial(dims, b.mu, (z * z + r * r).sqrt());
                }
            }
        }
    }
    s
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::profile::{norm_dstar, PotentialSpec};

    #[test]
    fn exact_bubble_residual_is_second_order() {
        let d = DimensionParams::new(7).unwrap();
        let t = std::time::Instant::now();
        let s = bubble_residual_study(&d, 4.0, 3.0, 4).unwrap();
        assert!(s.orders[1..].iter().all(|&o| o >= 1.8), "{s:?}");
        assert!(s.errors.windows(2).all(|w| w[1] < w[0]));
        assert!(t.elapsed().as_secs_f64() < 10.0);
    }

    pub(crate) fn chain(n: usize, mus: &[f64], l: f64, pot: PotentialSpec) -> Ansatz {
        let dims = DimensionParams::new(n).unwrap();
        let mut p = pot;
        p.period_l = l;
        Ansatz::lattice(dims, mus, &vec![0.0; mus.len()], p, Layout::Chain).unwrap()
    }

    #[test]
    fn ll_vanishes_inside_inner_ball_and_outside_supports() {
        // Q ≡ 0 through a zero amplitude with clipping
        let pot = PotentialSpec::new(0.0, 4.0, 10.0).unwrap();
        let a = chain(7, &[8.0], 10.0, pot);
        let cfg = CorrectionConfig::new(WeightedNormParams::default_for(&a.dims, 4.0));
        let g = grid_for(&a, &cfg).unwrap();
        let l = assemble_ll(&a, &g);
        for (j, y1, r) in g.nodes() {
            let rho = (y1 * y1 + r * r).sqrt();
            if rho < 1.0 || rho > 2.0 {
                assert_eq!(l.values()[j], 0.0, "at ({y1}, {r})");
            }
        }
        assert!(l.max_abs() > 0.0);
    }

    #[test]
    fn nl_taylor_remainder() {
        let pot = PotentialSpec::new(1.0, 4.0, 12.0).unwrap();
        let a = chain(6, &[6.0, 6.0], 12.0, pot);
        let cfg = CorrectionConfig::new(WeightedNormParams::default_for(&a.dims, 4.0));
        let g = grid_for(&a, &cfg).unwrap();
        let w = sample_w(&a, &g);
        let (z, neg) = eval_nl(&w, &Field::zeros(g.clone())).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert_eq!(neg, 0);
        // quadratic in the amplitude for N = 6 (2*−1 = 2)
        let phi = w.map(|v| 0.1 * v);
        let mut norms = vec![];
        for s in [1.0, 0.5, 0.25] {
            let (n, _) = eval_nl(&w, &phi.map(|v| s * v)).unwrap();
            norms.push(norm_dstar(&n, &a, &cfg.norms).unwrap());
        }
        for w2 in norms.windows(2) {
            assert!((w2[0] / w2[1] - 4.0).abs() < 0.8, "{norms:?}");
        }
    }
}
