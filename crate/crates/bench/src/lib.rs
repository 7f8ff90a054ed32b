//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use bubblelab::correction::{grid_for, CorrectionConfig};
use bubblelab::{Ansatz, AxiGrid, DimensionParams, Layout, PotentialSpec, WeightedNormParams};

/// Three-bubble chain at N = 7, β = 4 on the default correction grid.
pub fn chain(mu: f64) -> (Ansatz, CorrectionConfig, Arc<AxiGrid>) {
    let dims = DimensionParams::new(7).expect("N = 7");
    let pot = PotentialSpec::new(1.0, 4.0, 10.0).expect("potential");
    let a = Ansatz::lattice(dims, &[mu; 3], &[0.0; 3], pot, Layout::Chain).expect("ansatz");
    let cfg = CorrectionConfig::new(WeightedNormParams::default_for(&dims, 4.0));
    let g = grid_for(&a, &cfg).expect("grid");
    (a, cfg, g)
}
