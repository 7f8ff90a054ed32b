//! Run parameters: defaults, then the config file, then command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub mu: f64,
    /// Lattice spacing; construct/correct/pohozaev/diagnose default to 8(μ/16)^{1/5}.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Sites 0..=m.
    pub m: usize,
    /// Contraction tolerance.
    pub tol: f64,
    pub seed: u64,
    pub wrapped: bool,
    /// Grid: margin, grading, largest step.
    pub pad: f64,
    pub q: f64,
    pub h_max: f64,
    /// μ·(clip radius) for `correct`; the default clip is at L/2.
    pub clip_t: Option<f64>,
    /// Outer loop: certificate reduction factor.
    pub outer_tol: f64,
    pub spacings: Vec<f64>,
    /// (N, β) pairs for `sweep`.
    pub cases: Vec<(usize, f64)>,
    pub q0: f64,
    /// Kernel projection radius in core radii.
    pub kernel_radius: f64,
    /// Relative height perturbation for the uniqueness pair.
    pub perturbation: f64,
    /// Samples per inequality check.
    pub samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n: 7,
            beta: 4.0,
            a: 1.0,
            mu: 16.0,
            l: None,
            m: 1,
            tol: 1e-8,
            seed: 0,
            wrapped: true,
            pad: 4.0,
            q: 0.05,
            h_max: 0.0625,
            clip_t: None,
            outer_tol: 1e-4,
            spacings: vec![8.0, 16.0, 32.0, 64.0],
            cases: vec![(5, 1.5), (5, 2.0), (5, 2.5), (6, 2.5), (6, 3.0), (7, 3.5), (7, 4.0), (7, 4.5), (7, 2.0), (7, 5.5)],
            q0: 1.0,
            kernel_radius: 10.0,
            perturbation: 0.05,
            samples: 1000,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub q0: Option<f64>,
}

impl Params {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, Box<dyn std::error::Error>> {
        let mut p: Params = match path {
            Some(path) => toml::from_str(&std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?)?,
            None => Params::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { p.$f = v; })* };
        }
        set!(n, beta, a, mu, m, tol, seed, q0);
        if o.l.is_some() {
            p.l = o.l;
        }
        Ok(p)
    }

    pub fn spacing(&self) -> f64 {
        self.l.unwrap_or_else(|| 8.0 * (self.mu / 16.0).powf(0.2))
    }
}
