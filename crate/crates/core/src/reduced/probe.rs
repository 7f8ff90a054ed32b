//! Projected identity against U_i when Q does not vanish on the lattice.
//!
//! With Q(x_j) = q0 ≠ 0 the projection of the equation on U_i carries the
//! term q0∫U_i² = q0 J_2/μ², which has to be balanced by everything else. The
//! probe evaluates the terms available at the reduced level (correction φ = 0)
//! and reports whether the leading one dominates them.

use serde::{Deserialize, Serialize};

use super::LatticeState;
use crate::dims::DimensionParams;
use crate::error::Result;
use crate::profile::{radial, radial_d, Bubble, CutoffSpec, PotentialSpec};
use crate::quadrature::derived::clipped_q_moment;
use crate::quadrature::{interaction_integral, interval, overlap_integral, radial_integral_scaled, QuadratureSpec, UniversalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Required ratio of the leading term to the largest competitor.
    pub margin: f64,
    pub potential: PotentialSpec,
    pub cutoff: CutoffSpec,
    pub quad: QuadratureSpec,
    /// Bubble to project on; the middle one when None.
    pub bubble: Option<usize>,
}

impl ProbeConfig {
    pub fn new(potential: PotentialSpec) -> Self {
        Self { margin: 4.0, potential, cutoff: CutoffSpec::default(), quad: QuadratureSpec { tol: 1e-6, ..Default::default() }, bubble: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    /// q0 = 0, nothing to balance.
    NoObstruction,
    Contradiction,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub q0: f64,
    pub mu: f64,
    pub l: f64,
    pub bubble: usize,
    /// q0 J_2 / μ²
    pub leading: f64,
    pub competitors: Vec<ProbeTerm>,
    /// leading / max competitor
    pub dominance: f64,
    pub margin: f64,
    pub verdict: ProbeVerdict,
}

impl ProbeReport {
    pub fn largest_competitor(&self) -> f64 {
        self.competitors.iter().fold(0.0, |a, t| a.max(t.value.abs()))
    }
}

pub fn nonexistence_probe(
    q0: f64,
    state: &LatticeState,
    univ: &UniversalConstants,
    dims: &DimensionParams,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    let mu = state.mu;
    let i = cfg.bubble.unwrap_or(state.m / 2).min(state.m);
    let mut pot = cfg.potential;
    pot.period_l = state.l;
    let p = dims.two_star - 1.0;
    let spec = &cfg.quad;
    let j2 = univ.j_2.value;
    let leading = q0 * j2 * mu.powi(-2);
    let bubbles: Vec<Bubble> = (0..state.len()).map(|j| Bubble::new(state.center(j), mu)).collect::<Result<_>>()?;
    let bi = &bubbles[i];
    let ceiling = pot.clip_ceiling.unwrap_or_else(|| pot.of_distance(state.l / 2.0));

    let mut overlaps = vec![0.0; state.len()];
    let mut interaction = 0.0;
    for (j, bj) in bubbles.iter().enumerate() {
        if j == i {
            overlaps[j] = j2 * mu.powi(-2);
            continue;
        }
        overlaps[j] = overlap_integral(bi, bj, dims, spec)?.value;
        interaction += interaction_integral(bi, bj, dims, spec)?.value.value;
    }

    let mut terms = vec![];
    terms.push(ProbeTerm { name: "potential variation, own bubble".into(), value: clipped_q_moment(dims, &pot, mu, spec)?.value.abs() });
    let cross: f64 = overlaps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, o)| o).sum();
    terms.push(ProbeTerm { name: "potential variation, other bubbles".into(), value: ceiling * cross });
    let shift: f64 = state
        .shifts
        .iter()
        .zip(&overlaps)
        .map(|(s, o)| pot.of_distance(s.iter().map(|v| v * v).sum::<f64>().sqrt()) * o)
        .sum();
    terms.push(ProbeTerm { name: "centre shift".into(), value: shift });

    let cut = cfg.cutoff;
    let (r1, r2) = (cut.inner_radius, cut.outer_radius);
    let tail = radial_integral_scaled(
        |r: f64| (1.0 - cut.value(r)) * (q0 + pot.of_distance(r)).abs() * radial(dims, mu, r).powi(2),
        dims,
        spec,
        1.0 / mu,
        &[r1, r2],
    )?;
    terms.push(ProbeTerm { name: "potential outside the cutoff".into(), value: tail.value });
    let ring = |r: f64| {
        let (_, d1, _) = cut.radial(r);
        let u = radial(dims, mu, r);
        r.powf(dims.nf() - 1.0) * (cut.laplacian(dims, r) * u * u + d1 * radial_d(dims, mu, r) * u)
    };
    let cutoff = interval(&ring, r1, r2, 32).value * dims.sphere_area;
    terms.push(ProbeTerm { name: "cutoff derivatives".into(), value: cutoff.abs() });
    terms.push(ProbeTerm { name: "bubble interaction".into(), value: p * interaction });

    let largest = terms.iter().fold(0.0, |a: f64, t| a.max(t.value.abs()));
    let dominance = if largest > 0.0 { leading.abs() / largest } else { f64::INFINITY };
    let verdict = if q0 == 0.0 {
        ProbeVerdict::NoObstruction
    } else if dominance >= cfg.margin {
        ProbeVerdict::Contradiction
    } else {
        ProbeVerdict::Inconclusive
    };
    Ok(ProbeReport { q0, mu, l: state.l, bubble: i, leading, competitors: terms, dominance, margin: cfg.margin, verdict })
}
