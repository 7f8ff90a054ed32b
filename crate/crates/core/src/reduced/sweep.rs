//! Parameter sweeps over (N, β, L) written as CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{feasibility_check, scaling_fit, LatticeMode};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::PotentialSpec;
use crate::quadrature::{compute_universal, derive_constants, QuadratureSpec};

/// One CSV line. Rejected (N, β) pairs get a single line with empty numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub m: usize,
    pub mu: Option<f64>,
    pub slope: Option<f64>,
    pub residual_max: Option<f64>,
    pub verdict: String,
}

pub fn run_sweep(cases: &[(usize, f64)], spacings: &[f64], m: usize, mode: LatticeMode, quad: &QuadratureSpec) -> Result<Vec<SweepRow>> {
    let mut rows = vec![];
    for &(n, beta) in cases {
        let dims = DimensionParams::new(n)?;
        let verdict = feasibility_check(&dims, beta);
        if !verdict.is_accept() {
            rows.push(SweepRow { n, beta, l: None, m, mu: None, slope: None, residual_max: None, verdict: verdict.label().into() });
            continue;
        }
        let pot = PotentialSpec::new(1.0, beta, spacings[0])?;
        let univ = compute_universal(&dims, &pot, quad)?;
        let consts = derive_constants(&univ, &dims, &pot)?;
        let fit = scaling_fit(&dims, &consts, spacings, m, mode)?;
        for (l, mu) in fit.spacings.iter().zip(&fit.heights) {
            rows.push(SweepRow {
                n,
                beta,
                l: Some(*l),
                m,
                mu: Some(*mu),
                slope: Some(fit.slope),
                residual_max: Some(fit.residual_max),
                verdict: verdict.label().into(),
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
