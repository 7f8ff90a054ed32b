//! Radial and axisymmetric quadrature, universal integrals of the unit bubble,
//! derived reduced-system constants, the Newtonian convolution and numeric
//! checks of the interaction inequalities.

pub mod derived;
pub mod green;
pub mod inequalities;
pub mod interaction;
pub mod universal;

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};

pub use derived::{derive_constants, DerivedConstants};
pub use green::{green_convolve, newton_potential_radial};
pub use interaction::{interaction_integral, overlap_asymptotic, overlap_integral, InteractionResult};
pub use universal::{compute_universal, UniversalConstants};

/// Panel layout for half-line integrals.
///
/// `[0, ∞)` is cut at dyadic breakpoints `scale·2^k` from `scale·2^{-40}` up to
/// `scale·truncation` (further if an extra breakpoint lies beyond), each panel
/// integrated by Gauss–Legendre. Past the truncation radius dyadic panels
/// continue until their contributions either vanish or decay geometrically,
/// and the remaining geometric series is summed in closed form, which is
/// exact for algebraic tails. The second level halves every panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub truncation: f64,
    pub min_panels: usize,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { truncation: 50.0, min_panels: 16, tol: 1e-8 }
    }
}

/// A value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { value: self.value * s, error: self.error * s.abs() }
    }

    pub fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, error: self.error + o.error }
    }
}

const GL_NODES: usize = 20;

fn gl_rule() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(GL_NODES).unwrap()).as_node_weight_pairs().to_vec()
    })
}

/// Composite Gauss–Legendre on `pieces` equal sub-panels of [a, b].
pub fn gauss<G: Fn(f64) -> f64 + ?Sized>(g: &G, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * h;
        let (c, m) = (0.5 * h, lo + 0.5 * h);
        s += c * gl_rule().iter().map(|&(x, w)| w * g(m + c * x)).sum::<f64>();
    }
    s
}

/// Nodes and weights of composite Gauss–Legendre on `pieces` equal sub-panels of [a, b].
pub fn gauss_nodes(a: f64, b: f64, pieces: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / pieces as f64;
    let mut out = Vec::with_capacity(pieces * GL_NODES);
    for k in 0..pieces {
        let (c, m) = (0.5 * h, a + (k as f64 + 0.5) * h);
        out.extend(gl_rule().iter().map(|&(x, w)| (m + c * x, c * w)));
    }
    out
}

/// ∫_a^b g, with the one-panel/two-panel difference as error.
pub fn interval<G: Fn(f64) -> f64 + ?Sized>(g: &G, a: f64, b: f64, pieces: usize) -> Estimate {
    let coarse = gauss(g, a, b, pieces);
    let fine = gauss(g, a, b, 2 * pieces);
    Estimate { value: fine, error: (fine - coarse).abs() }
}

fn dyadic_breaks(scale: f64, truncation: f64, min_panels: usize, extra: &[f64]) -> Vec<f64> {
    let far = extra.iter().cloned().fold(0.0, f64::max);
    let top = (scale * truncation).max(2.0 * far);
    let mut b: Vec<f64> = vec![0.0];
    let mut k = -40;
    while scale * 2f64.powi(k) < top {
        b.push(scale * 2f64.powi(k));
        k += 1;
    }
    b.push(top);
    for &e in extra {
        if e > 0.0 && e < top {
            b.push(e);
        }
    }
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup();
    // split the widest panels until the minimum count is met
    while b.len() - 1 < min_panels {
        let (i, _) = b.windows(2).enumerate().fold((0, 0.0), |acc, (i, w)| if w[1] - w[0] > acc.1 { (i, w[1] - w[0]) } else { acc });
        b.insert(i + 1, 0.5 * (b[i] + b[i + 1]));
    }
    b
}

/// Dyadic continuation beyond `r0` with geometric extrapolation.
fn tail<G: Fn(f64) -> f64 + ?Sized>(g: &G, r0: f64, body: f64) -> Estimate {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = r0;
    let mut prev: Option<f64> = None;
    let mut prev_q: Option<f64> = None;
    for j in 0..900 {
        let hi = 2.0 * lo;
        if !hi.is_finite() {
            break;
        }
        let e = interval(g, lo, hi, 1);
        total += e.value;
        err += e.error;
        let scale_ref = (body + total).abs().max(1e-300);
        if e.value.abs() < 1e-18 * scale_ref {
            return Estimate { value: total, error: err };
        }
        if let Some(p) = prev {
            let q = e.value / p;
            if let Some(pq) = prev_q {
                if j >= 6 && q > 0.0 && q < 1.0 && (q - pq).abs() < 1e-9 * q {
                    let rest = e.value * q / (1.0 - q);
                    let dq = (q - pq).abs();
                    return Estimate { value: total + rest, error: err + e.value.abs() * dq / (1.0 - q).powi(2) };
                }
            }
            prev_q = Some(q);
        }
        prev = Some(e.value);
        lo = hi;
    }
    Estimate { value: total, error: err + f64::INFINITY }
}

/// ∫_0^∞ g(r) dr with panels adapted to the length `scale`, plus optional
/// extra breakpoints (discontinuities, kinks).
pub fn half_line<G: Fn(f64) -> f64 + ?Sized>(g: &G, scale: f64, spec: &QuadratureSpec, extra: &[f64]) -> Result<Estimate> {
    let breaks = dyadic_breaks(scale, spec.truncation, spec.min_panels, extra);
    let mut body = Estimate { value: 0.0, error: 0.0 };
    for w in breaks.windows(2) {
        body = body.add(interval(g, w[0], w[1], 1));
    }
    let t = tail(g, *breaks.last().unwrap(), body.value);
    check(body.add(t), spec.tol)
}

fn check(est: Estimate, tol: f64) -> Result<Estimate> {
    if !est.value.is_finite() {
        return Err(Error::Quadrature { estimate: f64::INFINITY, tol });
    }
    if est.error > tol * est.value.abs().max(1e-300) && est.error > 1e-300 {
        return Err(Error::Quadrature { estimate: est.rel_error(), tol });
    }
    Ok(est)
}

/// ω_{N−1} ∫_0^∞ r^{N−1} f(r) dr.
pub fn radial_integral<F: Fn(f64) -> f64>(f: F, dims: &DimensionParams, spec: &QuadratureSpec) -> Result<Estimate> {
    radial_integral_scaled(f, dims, spec, 1.0, &[])
}

pub fn radial_integral_scaled<F: Fn(f64) -> f64>(
    f: F,
    dims: &DimensionParams,
    spec: &QuadratureSpec,
    scale: f64,
    extra: &[f64],
) -> Result<Estimate> {
    let e = dims.nf() - 1.0;
    let g = |r: f64| if r == 0.0 { 0.0 } else { r.powf(e) * f(r) };
    Ok(half_line(&g, scale, spec, extra)?.scale(dims.sphere_area))
}

/// ∫_{S^{N−1}} h(cos θ) dσ = ω_{N−2} ∫_0^π h(cos θ) sin^{N−2}θ dθ.
///
/// Panels are graded geometrically towards θ = π/2, where h may fail to be
/// smooth (|cos θ|^β).
pub fn angular_integral<H: Fn(f64) -> f64>(h: H, dims: &DimensionParams) -> Estimate {
    let e = dims.nf() - 2.0;
    let g = |t: f64| h(t.cos()) * t.sin().powf(e);
    let half = std::f64::consts::FRAC_PI_2;
    let mut pts = vec![0.0];
    for k in 0..40 {
        pts.push(half - half * 0.5f64.powi(k + 1));
    }
    pts.push(half);
    let mut out = Estimate { value: 0.0, error: 0.0 };
    for w in pts.windows(2) {
        out = out.add(interval(&g, w[0], w[1], 1)).add(interval(&g, std::f64::consts::PI - w[1], std::f64::consts::PI - w[0], 1));
    }
    out.scale(dims.transverse_area())
}
