//! One-period translation defect sup |u(y − Le₁) − u(y)| / star weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::AxiGrid;
use crate::pohozaev::AxiJet;
use crate::profile::norms::star_weight;
use crate::profile::{Ansatz, WeightedNormParams};

/// y₁ ∈ [y1_lo, y1_hi], r ≤ r_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub y1_lo: f64,
    pub y1_hi: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub period: f64,
    pub defect: f64,
    /// defect / sup_window |u| / star weight
    pub relative: f64,
    /// (y₁, r) of the largest defect
    pub worst: (f64, f64),
    pub samples: usize,
}

/// Defect sampled at the nodes of `grid` inside the window. Both y and y − Le₁
/// must lie in the grid's coverage.
pub fn periodicity_check<F: AxiJet>(
    u: &F,
    grid: &AxiGrid,
    ansatz: &Ansatz,
    norms: &WeightedNormParams,
    period: f64,
    window: Window,
) -> Result<PeriodicityReport> {
    if !(window.y1_hi > window.y1_lo && window.r_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("empty window {window:?}")));
    }
    for y1 in [window.y1_lo, window.y1_hi, window.y1_lo - period, window.y1_hi - period] {
        if !grid.covers(y1, window.r_max) {
            return Err(Error::OutsideCoverage(format!("window point y₁ = {y1}, r = {}", window.r_max)));
        }
    }
    let (mut defect, mut size, mut worst, mut samples) = (0.0f64, 0.0f64, (0.0, 0.0), 0);
    for (_, y1, r) in grid.nodes() {
        if y1 < window.y1_lo || y1 > window.y1_hi || r > window.r_max {
            continue;
        }
        let w = star_weight(ansatz, norms, y1, r);
        let here = u.jet(y1, r)?[0];
        let back = u.jet(y1 - period, r)?[0];
        let d = (back - here).abs() / w;
        if d > defect {
            defect = d;
            worst = (y1, r);
        }
        size = size.max(here.abs() / w);
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::EmptyGrid);
    }
    let relative = if size > 0.0 { defect / size } else { 0.0 };
    Ok(PeriodicityReport { period, defect, relative, worst, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionParams;
    use crate::grid::GridSpec;
    use crate::pohozaev::FnJet;
    use crate::profile::{Layout, PotentialSpec};

    #[test]
    fn periodized_field_has_no_defect() {
        let dims = DimensionParams::new(7).unwrap();
        let l = 6.0;
        let pot = PotentialSpec::new(1.0, 4.0, l).unwrap();
        let a = Ansatz::lattice(dims, &[4.0, 4.0], &[0.0, 0.0], pot, Layout::Wrapped { period: 2.0 * l }).unwrap();
        let g = GridSpec::periodic(&[0.0, l], 2.0 * l, 4.0, 4.0).build(&dims).unwrap();
        let p = WeightedNormParams::default_for(&dims, 4.0);
        let per = FnJet(|y1: f64, r: f64| [(y1 * std::f64::consts::TAU / l).cos() * (-r * r).exp(), 0.0, 0.0]);
        let w = Window { y1_lo: l, y1_hi: 2.0 * l, r_max: 3.0 };
        let rep = periodicity_check(&per, &g, &a, &p, l, w).unwrap();
        assert!(rep.defect < 1e-12, "{}", rep.defect);
        assert!(rep.samples > 100);
        // a field periodic only in 2L is caught
        let half = FnJet(|y1: f64, r: f64| [(y1 * std::f64::consts::PI / l).cos() * (-r * r).exp(), 0.0, 0.0]);
        assert!(periodicity_check(&half, &g, &a, &p, l, w).unwrap().relative > 0.5);
    }

    #[test]
    fn window_must_be_covered() {
        let dims = DimensionParams::new(7).unwrap();
        let pot = PotentialSpec::new(1.0, 4.0, 6.0).unwrap();
        let a = Ansatz::lattice(dims, &[4.0, 4.0], &[0.0, 0.0], pot, Layout::Chain).unwrap();
        let g = GridSpec::around(&[0.0, 6.0], 4.0, 2.0).build(&dims).unwrap();
        let p = WeightedNormParams::default_for(&dims, 4.0);
        let f = FnJet(|_: f64, _: f64| [1.0, 0.0, 0.0]);
        let w = Window { y1_lo: 0.0, y1_hi: 6.0, r_max: 1.0 };
        assert!(matches!(periodicity_check(&f, &g, &a, &p, 6.0, w), Err(Error::OutsideCoverage(_))));
    }
}
