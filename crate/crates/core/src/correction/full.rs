//! Outer loop: adjust heights and centres until every multiplier vanishes.
//!
//! Unknowns t_j = ln(μ_j/μ_ref) and σ_j = μ_ref² s_j (centre offset along the
//! axis); residuals μ_ref·c_{j,1} and c_{j,N+1}/μ_ref. Newton with a
//! forward-difference Jacobian on a grid fixed at the start.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::contraction::{contract_with, CorrectionResult};
use super::system::{LinearizedSystem, ModeKind};
use super::CorrectionConfig;
use crate::error::{Error, Result};
use crate::grid::{AxiGrid, Field};
use crate::profile::{Ansatz, Bubble};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterStep {
    pub heights: Vec<f64>,
    pub centres: Vec<f64>,
    pub max_multiplier: f64,
    pub certificate: f64,
}

#[derive(Debug, Clone)]
pub struct FullSolution {
    pub ansatz: Ansatz,
    /// u = W + φ
    pub u: Field,
    pub correction: CorrectionResult,
    pub history: Vec<OuterStep>,
    /// max_l |c_l|·‖W^{2*−2}Z_l‖_** / ‖l_L‖_**
    pub certificate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterOptions {
    /// Stop once the certificate has dropped by this factor from the start,
    pub tol: f64,
    /// or below this absolute level.
    pub abs_tol: f64,
    pub max_outer: usize,
    pub fd_step: f64,
    /// Keep the centres where they start and solve for the heights only.
    pub fix_centres: bool,
}

impl Default for OuterOptions {
    fn default() -> Self {
        Self { tol: 1e-4, abs_tol: 1e-14, max_outer: 25, fd_step: 1e-5, fix_centres: false }
    }
}

struct Eval {
    sys: LinearizedSystem,
    res: CorrectionResult,
    r: Vec<f64>,
}

fn rebuild(base: &Ansatz, mu_ref: f64, x0: &[f64], theta: &[f64]) -> Result<Ansatz> {
    let n = x0.len();
    let mut a = base.clone();
    for j in 0..n {
        let mu = mu_ref * theta[j].exp();
        let x = x0[j] + theta[n + j] / (mu_ref * mu_ref);
        a.bubbles[j] = Bubble::on_axis(&a.dims, x, mu)?;
    }
    Ok(a)
}

fn evaluate(a: &Ansatz, grid: &Arc<AxiGrid>, cfg: &CorrectionConfig, mu_ref: f64) -> Result<Eval> {
    let sys = LinearizedSystem::new(a, grid.clone(), cfg.tail)?;
    let res = contract_with(&sys, cfg)?;
    let nb = a.bubbles.len();
    let mut r = vec![0.0; 2 * nb];
    for (l, m) in sys.modes.iter().enumerate() {
        match m.kind {
            ModeKind::Dilation => r[m.bubble] = res.multipliers[l] / mu_ref,
            ModeKind::Translation => r[nb + m.bubble] = res.multipliers[l] * mu_ref,
        }
    }
    Ok(Eval { sys, res, r })
}

/// The certificate over the modes being solved for.
fn certificate(e: &Eval, fixed: bool) -> f64 {
    if !fixed {
        return e.res.multiplier_certificate();
    }
    let m = e
        .sys
        .modes
        .iter()
        .zip(&e.res.multiplier_norms)
        .filter(|(m, _)| m.kind == ModeKind::Dilation)
        .fold(0.0f64, |a, (_, v)| a.max(*v));
    if e.res.ll_norm > 0.0 {
        m / e.res.ll_norm
    } else {
        m
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Newton on (heights, centres) until the multiplier terms vanish relative to l_L.
pub fn solve_full(ansatz: &Ansatz, cfg: &CorrectionConfig, opts: &OuterOptions) -> Result<FullSolution> {
    let grid = super::grid_for(ansatz, cfg)?;
    solve_full_on(ansatz, grid, cfg, opts)
}

pub fn solve_full_on(ansatz: &Ansatz, grid: Arc<AxiGrid>, cfg: &CorrectionConfig, opts: &OuterOptions) -> Result<FullSolution> {
    let nb = ansatz.bubbles.len();
    let mu_ref = ansatz.bubbles.iter().map(|b| b.mu).sum::<f64>() / nb as f64;
    let x0: Vec<f64> = ansatz.bubbles.iter().map(|b| b.center[0]).collect();
    let mut theta: Vec<f64> = ansatz.bubbles.iter().map(|b| (b.mu / mu_ref).ln()).chain(std::iter::repeat(0.0).take(nb)).collect();
    let mut a = rebuild(ansatz, mu_ref, &x0, &theta)?;
    let mut cur = evaluate(&a, &grid, cfg, mu_ref)?;
    let mut history = vec![];
    let cert0 = certificate(&cur, opts.fix_centres);
    for _ in 0..opts.max_outer {
        let max_c = max_abs(&cur.res.multipliers);
        let cert = certificate(&cur, opts.fix_centres);
        history.push(OuterStep {
            heights: a.bubbles.iter().map(|b| b.mu).collect(),
            centres: a.bubbles.iter().map(|b| b.center[0]).collect(),
            max_multiplier: max_c,
            certificate: cert,
        });
        if cert <= opts.tol * cert0 || cert <= opts.abs_tol {
            let w = cur.sys.w.clone();
            let u = w.zip_with(&cur.res.phi, |a, b| a + b)?;
            let certificate = cert;
            return Ok(FullSolution { ansatz: a, u, correction: cur.res, history, certificate });
        }
        // forward-difference Jacobian
        let np = if opts.fix_centres { nb } else { theta.len() };
        let mut jac = faer::Mat::<f64>::zeros(np, np);
        for q in 0..np {
            let mut th = theta.clone();
            let h = if q < nb { opts.fd_step } else { opts.fd_step * mu_ref };
            th[q] += h;
            let e = evaluate(&rebuild(ansatz, mu_ref, &x0, &th)?, &grid, cfg, mu_ref)?;
            for p in 0..np {
                jac[(p, q)] = (e.r[p] - cur.r[p]) / h;
            }
        }
        let rhs = faer::Mat::<f64>::from_fn(np, 1, |p, _| -cur.r[p]);
        use faer::prelude::*;
        let step = jac.full_piv_lu().solve(&rhs);
        if (0..np).any(|p| !step[(p, 0)].is_finite()) {
            return Err(Error::Singular("outer Jacobian".into()));
        }
        // backtracking on the residual
        let norm0 = max_abs(&cur.r[..np]);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..6 {
            let th: Vec<f64> = (0..theta.len()).map(|p| if p < np { theta[p] + lambda * step[(p, 0)] } else { theta[p] }).collect();
            let cand = rebuild(ansatz, mu_ref, &x0, &th)?;
            if let Ok(e) = evaluate(&cand, &grid, cfg, mu_ref) {
                if max_abs(&e.r[..np]) < norm0 {
                    accepted = Some((th, cand, e));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((th, cand, e)) => {
                theta = th;
                a = cand;
                cur = e;
            }
            None => {
                return Err(Error::NonConvergence(format!(
                    "outer loop stalled at max|c| = {:e}, certificate {:e} of {:e}",
                    max_abs(&cur.res.multipliers),
                    certificate(&cur, opts.fix_centres),
                    cert0
                )))
            }
        }
    }
    Err(Error::NonConvergence(format!("outer loop after {} steps, max|c| = {:e}", opts.max_outer, max_abs(&cur.res.multipliers))))
}
