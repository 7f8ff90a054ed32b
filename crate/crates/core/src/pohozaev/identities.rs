//! Translation and dilation identities, term by term.
//!
//! Translation (direction i):
//!   −∫_∂ ∂_νu ∂_iu + ½∫_∂ |∇u|²ν_i + ½∫_∂ Qu²ν_i − ½∫_B ∂_iQ u² − (1/2*)∫_∂ u^{2*}ν_i = 0
//! Dilation:
//!   −∫_∂ ∂_νu ⟨y−x,∇u⟩ + ½∫_∂ |∇u|²⟨y−x,ν⟩ + ((2−N)/2)∫_∂ ∂_νu u + ½∫_∂ Qu²⟨y−x,ν⟩
//!   − ½∫_B u²⟨∇Q,y−x⟩ − ∫_B Qu² − (1/2*)∫_∂ u^{2*}⟨y−x,ν⟩ = 0
//!
//! Every term is stored with the sign it carries above, so the residual is
//! their plain sum. The interaction term is the excess of the gradient and
//! power surface terms over those of the exact bubble U_{x_j,μ_j} (which
//! satisfies the Q-free identity on any ball); the potential term collects
//! the Q terms with the opposite sign.

use serde::{Deserialize, Serialize};

use super::{ball_integral, bubble_jet, sphere_integral, AxiJet, PohozaevConfig};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::{bubble, Ansatz, Layout};
use crate::quadrature::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityKind {
    Translation,
    Dilation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
    pub error: f64,
    /// Predicted power of μ, where one is claimed.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub kind: IdentityKind,
    pub ball: usize,
    pub direction: usize,
    pub centre: f64,
    pub mu: f64,
    pub delta: f64,
    pub theta: f64,
    pub terms: Vec<Term>,
    /// Σ terms
    pub residual: f64,
    pub interaction: f64,
    /// Dilation: B'(δμ) Σ_{i≠j} (μ_iμ_j)^{−(N−2)/2}|x_i−x_j|^{2−N}.
    pub interaction_predicted: Option<f64>,
    pub potential: f64,
    /// Translation: s_j ∫_{B_δ(x_j)} ∂²_{11}Q U_j², the linearisation of the
    /// volume ∂Q term in the centre offset.
    pub volume_dq_linear: Option<f64>,
}

impl PohozaevReport {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// interaction / potential
    pub fn balance_ratio(&self) -> f64 {
        self.interaction / self.potential
    }

    /// Largest term magnitude, the scale of the residual.
    pub fn scale(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.value.abs()))
    }
}

fn term(name: &str, e: Estimate, order: Option<f64>) -> Term {
    Term { name: name.into(), value: e.value, error: e.error, order }
}

/// u^{2*} − U^{2*} without cancellation.
fn pow_excess(u: f64, big: f64, p2: f64) -> f64 {
    let v = u - big;
    if u > 0.0 && big > 0.0 {
        big.powf(p2) * (p2 * (v / big).ln_1p()).exp_m1()
    } else {
        u.max(0.0).powf(p2) - big.powf(p2)
    }
}

/// B'(R) = A_N [((N−2)/2) ∫_{B_R} U^{2*−1} − R ∫_{∂B_R} U^{2*−1}] for the unit
/// bubble; tends to ((N−2)/2) A_N I_pow as R → ∞.
pub fn finite_ball_interaction_constant(dims: &DimensionParams, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius}")));
    }
    let p = dims.two_star - 1.0;
    let n = dims.n as i32;
    let up = |rho: f64| bubble::radial(dims, 1.0, rho).powf(p);
    let rule = super::gl(24)?;
    let mut vol = 0.0;
    let mut a = 0.0;
    let mut b = radius.min(1.0);
    while a < radius {
        let h = b - a;
        for &(x, w) in &rule {
            let r = a + 0.5 * h * (x + 1.0);
            vol += 0.5 * h * w * r.powi(n - 1) * up(r);
        }
        a = b;
        b = (2.0 * b).min(radius);
    }
    let area = dims.sphere_area;
    Ok(dims.profile_const() * (dims.half_nm2() * area * vol - radius * area * radius.powi(n - 1) * up(radius)))
}

/// Σ over the other bubbles (and their images on a ring) of (μ_iμ_j)^{−k} d^{2−N}.
fn interaction_sum(ansatz: &Ansatz, j: usize) -> f64 {
    let n = ansatz.dims.nf();
    let k = ansatz.dims.half_nm2();
    let bj = &ansatz.bubbles[j];
    let mut s = 0.0;
    for (i, bi) in ansatz.bubbles.iter().enumerate() {
        let d0 = bi.center[0] - bj.center[0];
        let w = (bi.mu * bj.mu).powf(-k);
        match ansatz.layout {
            Layout::Chain => {
                if i != j {
                    s += w * d0.abs().powf(2.0 - n);
                }
            }
            Layout::Wrapped { period } => {
                for m in -200i32..=200 {
                    if i == j && m == 0 {
                        continue;
                    }
                    s += w * (d0 + m as f64 * period).abs().powf(2.0 - n);
                }
            }
        }
    }
    s
}

struct Ball {
    centre: f64,
    mu: f64,
    delta: f64,
}

fn ball_of(ansatz: &Ansatz, cfg: &PohozaevConfig) -> Result<Ball> {
    let b = ansatz.bubbles.get(cfg.ball).ok_or_else(|| Error::Index(format!("ball {}", cfg.ball)))?;
    Ok(Ball { centre: b.center[0], mu: b.mu, delta: cfg.delta })
}

/// Translation identity on B_δ(x_j) in direction `cfg.direction`. Directions
/// other than the lattice axis vanish identically on axisymmetric fields.
pub fn translation_identity<F: AxiJet>(u: &F, ansatz: &Ansatz, cfg: &PohozaevConfig) -> Result<PohozaevReport> {
    let n = ansatz.dims.n;
    if cfg.direction == 0 || cfg.direction > n {
        return Err(Error::Index(format!("direction {} outside 1..={n}", cfg.direction)));
    }
    let bl = ball_of(ansatz, cfg)?;
    let beta = ansatz.potential.beta;
    let names = ["grad_normal", "grad_square", "boundary_q", "volume_dq", "boundary_pow"];
    let mut report = PohozaevReport {
        kind: IdentityKind::Translation,
        ball: cfg.ball,
        direction: cfg.direction,
        centre: bl.centre,
        mu: bl.mu,
        delta: bl.delta,
        theta: cfg.theta,
        terms: vec![],
        residual: 0.0,
        interaction: 0.0,
        interaction_predicted: None,
        potential: 0.0,
        volume_dq_linear: None,
    };
    let nf = n as f64;
    let orders = [None, None, Some(-(beta + 2.0)), Some(-(beta + 2.0)), Some(-nf)];
    if cfg.direction != 1 {
        report.terms = names.iter().zip(orders).map(|(nm, o)| Term { name: (*nm).into(), value: 0.0, error: 0.0, order: o }).collect();
        report.volume_dq_linear = Some(0.0);
        return Ok(report);
    }
    let dims = &ansatz.dims;
    let q = &ansatz.potential;
    let p2 = dims.two_star;
    let (c, d, ord) = (bl.centre, bl.delta, cfg.order);
    let sph = |f: &dyn Fn([f64; 3], f64, f64, f64, f64) -> f64| {
        sphere_integral(|y1, r, n1, nr| Ok(f(u.jet(y1, r)?, y1, r, n1, nr)), c, d, dims, ord)
    };
    let dn = |j: [f64; 3], n1: f64, nr: f64| j[1] * n1 + j[2] * nr;
    let t1 = sph(&|j, _, _, n1, nr| -dn(j, n1, nr) * j[1])?;
    let t2 = sph(&|j, _, _, n1, _| 0.5 * (j[1] * j[1] + j[2] * j[2]) * n1)?;
    let t3 = sph(&|j, y1, r, n1, _| 0.5 * q.eval_axi(y1, r) * j[0] * j[0] * n1)?;
    let t4 = ball_integral(|y1, r| Ok(-0.5 * q.grad_axi(y1, r).0 * u.jet(y1, r)?[0].powi(2)), c, d, dims, ord)?;
    let t5 = sph(&|j, _, _, n1, _| -j[0].max(0.0).powf(p2) / p2 * n1)?;
    let excess = sphere_integral(
        |y1, r, n1, nr| {
            let ju = u.jet(y1, r)?;
            let jb = bubble_jet(dims, c, bl.mu, y1, r);
            let v = [ju[0] - jb[0], ju[1] - jb[1], ju[2] - jb[2]];
            let a = dn(jb, n1, nr);
            let b = dn(v, n1, nr);
            let grad = -(a * v[1] + b * jb[1] + b * v[1]) + 0.5 * (2.0 * (jb[1] * v[1] + jb[2] * v[2]) + v[1] * v[1] + v[2] * v[2]) * n1;
            Ok(grad - pow_excess(ju[0], jb[0], p2) / p2 * n1)
        },
        c,
        d,
        dims,
        ord,
    )?;
    let est = [t1, t2, t3, t4, t5];
    report.terms = names.iter().zip(est).zip(orders).map(|((nm, e), o)| term(nm, e, o)).collect();
    report.residual = report.terms.iter().map(|t| t.value).sum();
    report.interaction = excess.value;
    report.potential = -(t3.value + t4.value);
    // ∂²Q/∂y₁² by central differences of the closed-form gradient
    let x_lattice = c - q.lattice_offset(c);
    let s = c - x_lattice;
    let hq = 1e-6 * d;
    let lin = ball_integral(
        |y1, r| {
            let q11 = (q.grad_axi(y1 + hq, r).0 - q.grad_axi(y1 - hq, r).0) / (2.0 * hq);
            Ok(q11 * bubble_jet(dims, x_lattice, bl.mu, y1, r)[0].powi(2))
        },
        x_lattice,
        d,
        dims,
        ord,
    )?;
    report.volume_dq_linear = Some(-0.5 * s * lin.value);
    Ok(report)
}

/// Dilation identity on B_δ(x_j).
pub fn dilation_identity<F: AxiJet>(u: &F, ansatz: &Ansatz, cfg: &PohozaevConfig) -> Result<PohozaevReport> {
    let bl = ball_of(ansatz, cfg)?;
    let dims = &ansatz.dims;
    let q = &ansatz.potential;
    let beta = q.beta;
    let nf = dims.nf();
    let k = dims.half_nm2();
    let p2 = dims.two_star;
    let (c, d, ord) = (bl.centre, bl.delta, cfg.order);
    let sph = |f: &dyn Fn([f64; 3], f64, f64, f64, f64) -> f64| {
        sphere_integral(|y1, r, n1, nr| Ok(f(u.jet(y1, r)?, y1, r, n1, nr)), c, d, dims, ord)
    };
    let dn = |j: [f64; 3], n1: f64, nr: f64| j[1] * n1 + j[2] * nr;
    let d1 = sph(&|j, _, _, n1, nr| -d * dn(j, n1, nr).powi(2))?;
    let d2 = sph(&|j, _, _, _, _| 0.5 * d * (j[1] * j[1] + j[2] * j[2]))?;
    let d3 = sph(&|j, _, _, n1, nr| -k * dn(j, n1, nr) * j[0])?;
    let d4 = sph(&|j, y1, r, _, _| 0.5 * d * q.eval_axi(y1, r) * j[0] * j[0])?;
    let d5 = ball_integral(
        |y1, r| {
            let (g1, gr) = q.grad_axi(y1, r);
            Ok(-0.5 * u.jet(y1, r)?[0].powi(2) * (g1 * (y1 - c) + gr * r))
        },
        c,
        d,
        dims,
        ord,
    )?;
    let d6 = ball_integral(|y1, r| Ok(-q.eval_axi(y1, r) * u.jet(y1, r)?[0].powi(2)), c, d, dims, ord)?;
    let d7 = sph(&|j, _, _, _, _| -d * j[0].max(0.0).powf(p2) / p2)?;
    let excess = sphere_integral(
        |y1, r, n1, nr| {
            let ju = u.jet(y1, r)?;
            let jb = bubble_jet(dims, c, bl.mu, y1, r);
            let v = [ju[0] - jb[0], ju[1] - jb[1], ju[2] - jb[2]];
            let a = dn(jb, n1, nr);
            let b = dn(v, n1, nr);
            let grad = -d * (2.0 * a * b + b * b) + 0.5 * d * (2.0 * (jb[1] * v[1] + jb[2] * v[2]) + v[1] * v[1] + v[2] * v[2])
                - k * (jb[0] * b + v[0] * a + v[0] * b);
            Ok(grad - d * pow_excess(ju[0], jb[0], p2) / p2)
        },
        c,
        d,
        dims,
        ord,
    )?;
    let names = ["grad_normal", "grad_square", "grad_value", "boundary_q", "volume_dq", "volume_q", "boundary_pow"];
    let orders = [None, None, None, Some(-(beta + 2.0)), Some(-(beta + 2.0)), Some(-(beta + 2.0)), Some(-nf)];
    let est = [d1, d2, d3, d4, d5, d6, d7];
    let terms: Vec<Term> = names.iter().zip(est).zip(orders).map(|((nm, e), o)| term(nm, e, o)).collect();
    let residual = terms.iter().map(|t| t.value).sum();
    let predicted = finite_ball_interaction_constant(dims, d * bl.mu)? * interaction_sum(ansatz, cfg.ball);
    Ok(PohozaevReport {
        kind: IdentityKind::Dilation,
        ball: cfg.ball,
        direction: 0,
        centre: c,
        mu: bl.mu,
        delta: d,
        theta: cfg.theta,
        terms,
        residual,
        interaction: excess.value,
        interaction_predicted: Some(predicted),
        potential: -(d4.value + d5.value + d6.value),
        volume_dq_linear: None,
    })
}
