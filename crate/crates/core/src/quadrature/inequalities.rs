//! Numeric checks of the interaction inequalities used in the error estimates.
//!
//! Each check samples parameters and points, evaluates LHS/RHS without the
//! constant, and compares the largest ratio against an explicit constant that
//! is uniform over the sampling box.

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use serde::{Deserialize, Serialize};

use super::green::newton_potential_radial;
use super::QuadratureSpec;
use crate::dims::DimensionParams;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lemma: String,
    pub samples: usize,
    /// Largest LHS/RHS over the sample.
    pub measured_c: f64,
    /// Explicit bound valid over the whole sampling box.
    pub uniform_c: f64,
    pub pass: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// (1+|y−x_i|)^{−α}(1+|y−x_j|)^{−β} divided by
/// (1+|x_i−x_j|)^{−σ}((1+|y−x_i|)^{−(α+β−σ)} + (1+|y−x_j|)^{−(α+β−σ)}).
pub fn lemma_a1_ratio(alpha: f64, beta: f64, sigma: f64, y: &[f64], xi: &[f64], xj: &[f64]) -> f64 {
    let (di, dj, d) = (1.0 + dist(y, xi), 1.0 + dist(y, xj), 1.0 + dist(xi, xj));
    let lhs = di.powf(-alpha) * dj.powf(-beta);
    let e = alpha + beta - sigma;
    lhs / (d.powf(-sigma) * (di.powf(-e) + dj.powf(-e)))
}

/// On the side nearer x_i, |y − x_j| ≥ |x_i − x_j|/2, hence the ratio is at most 2^σ.
pub fn lemma_a1_constant(sigma: f64) -> f64 {
    2f64.powf(sigma)
}

/// (1+|y|)^σ ∫|y−z|^{2−N}(1+|z|)^{−(2+σ)} dz at |y| = r.
pub fn lemma_a2_ratio(dims: &DimensionParams, sigma: f64, r: f64) -> Result<f64> {
    let spec = QuadratureSpec { tol: 1e-7, ..Default::default() };
    let v = newton_potential_radial(|s| (1.0 + s).powf(-(2.0 + sigma)), dims, r, &spec)?;
    Ok((1.0 + r).powf(sigma) * v.value)
}

/// ω_{N−1}(2^{N−2}/(N−2−σ) + 1/σ + 2^{N−2}/N), from splitting Newton's formula at |y|.
pub fn lemma_a2_constant(dims: &DimensionParams, sigma: f64) -> f64 {
    let nf = dims.nf();
    let p = 2f64.powf(nf - 2.0);
    dims.sphere_area * (p / (nf - 2.0 - sigma) + 1.0 / sigma + p / nf)
}

/// Σ_j (1+μ|y−x_j|)^{−γ} / (1+μ|y−x_i|)^{−γ} for the chain x_j = jL e₁, j = 0..=m.
pub fn lemma_a3_ratio(mu: f64, l: f64, m: usize, gamma: f64, i: usize, y: &[f64]) -> f64 {
    let rest: f64 = y[1..].iter().map(|v| v * v).sum();
    let d = |j: usize| ((y[0] - j as f64 * l).powi(2) + rest).sqrt();
    let s: f64 = (0..=m).map(|j| (1.0 + mu * d(j)).powf(-gamma)).sum();
    s / (1.0 + mu * d(i)).powf(-gamma)
}

/// 1 + 2ζ(γ)((1+μ)/(μ(L−1)))^γ on B₁(x_i), exponent θ' = γ.
pub fn lemma_a3_constant(mu: f64, l: f64, gamma: f64) -> f64 {
    1.0 + 2.0 * zeta(gamma) * ((1.0 + mu) / (mu * (l - 1.0))).powf(gamma)
}

/// Riemann ζ(s) for s > 1 by direct summation with an Euler–Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    let n = 64usize;
    let head: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
}

fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s = norm(&v).max(1e-12);
    let r = radius * rng.gen::<f64>();
    v.iter().map(|x| x / s * r).collect()
}

/// α, β ∈ [τ, 6], σ ∈ (0, min(α, β)], points in R^N with N ∈ 5..=8.
pub fn check_lemma_a1(samples: usize, seed: u64) -> InequalityReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..samples {
        let n = rng.gen_range(5..=8usize);
        let tau = 1.0 + rng.gen::<f64>() * 0.5;
        let alpha = rng.gen_range(tau..6.0);
        let beta = rng.gen_range(tau..6.0);
        let sigma = rng.gen_range(1e-3..=alpha.min(beta));
        let xi = random_point(&mut rng, n, 50.0);
        let xj = random_point(&mut rng, n, 50.0);
        let scale = 10f64.powf(rng.gen_range(-1.0..3.0));
        let y = random_point(&mut rng, n, scale);
        let q = lemma_a1_ratio(alpha, beta, sigma, &y, &xi, &xj);
        ok &= q <= lemma_a1_constant(sigma) * (1.0 + 1e-12);
        worst = worst.max(q);
    }
    let uniform_c = lemma_a1_constant(6.0);
    InequalityReport { lemma: "A.1".into(), samples, measured_c: worst, uniform_c, pass: ok && worst <= uniform_c }
}

/// σ ∈ [0.25, N − 2.25], |y| log-uniform in [10^{−2}, 10^6], N ∈ 5..=8.
pub fn check_lemma_a2(samples: usize, seed: u64) -> Result<InequalityReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut uniform_c: f64 = 0.0;
    for n in 5..=8usize {
        let d = DimensionParams::new(n)?;
        let hi = d.nf() - 2.25;
        uniform_c = uniform_c.max(lemma_a2_constant(&d, 0.25)).max(lemma_a2_constant(&d, hi));
    }
    for _ in 0..samples {
        let n = rng.gen_range(5..=8usize);
        let d = DimensionParams::new(n)?;
        let sigma = rng.gen_range(0.25..=d.nf() - 2.25);
        let r = if rng.gen_bool(0.05) { 0.0 } else { 10f64.powf(rng.gen_range(-2.0..6.0)) };
        let q = lemma_a2_ratio(&d, sigma, r)?;
        ok &= q.is_finite() && q <= lemma_a2_constant(&d, sigma);
        worst = worst.max(q);
    }
    Ok(InequalityReport { lemma: "A.2".into(), samples, measured_c: worst, uniform_c, pass: ok && worst <= uniform_c })
}

/// γ ∈ (1.1, 4], μ ∈ [1, 64], L ∈ [4, 64], m ∈ 1..=8, y ∈ B₁(x_i).
pub fn check_lemma_a3(samples: usize, seed: u64) -> InequalityReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..samples {
        let gamma = rng.gen_range(1.1..=4.0);
        let mu = rng.gen_range(1.0..=64.0);
        let l = rng.gen_range(4.0..=64.0);
        let m = rng.gen_range(1..=8usize);
        let i = rng.gen_range(0..=m);
        let n = rng.gen_range(5..=8usize);
        let mut y = random_point(&mut rng, n, 1.0);
        y[0] += i as f64 * l;
        let q = lemma_a3_ratio(mu, l, m, gamma, i, &y);
        ok &= q <= lemma_a3_constant(mu, l, gamma);
        worst = worst.max(q);
    }
    let uniform_c = lemma_a3_constant(1.0, 4.0, 1.1);
    InequalityReport { lemma: "A.3".into(), samples, measured_c: worst, uniform_c, pass: ok && worst <= uniform_c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn a1_sharp_at_midpoint() {
        // y halfway between, α = β = σ: ratio = 2^σ(1+d/2)^{σ}.../ exact value computed by hand
        let xi = vec![0.0; 5];
        let mut xj = vec![0.0; 5];
        xj[0] = 1000.0;
        let mut y = vec![0.0; 5];
        y[0] = 500.0;
        let q = lemma_a1_ratio(2.0, 2.0, 2.0, &y, &xi, &xj);
        let expect = 501f64.powi(-4) / (1001f64.powi(-2) * 2.0 * 501f64.powi(-2));
        assert!((q - expect).abs() < 1e-12 * expect);
        assert!(q < lemma_a1_constant(2.0));
    }

    #[test]
    fn a2_saturates() {
        let d = DimensionParams::new(6).unwrap();
        let sigma = 2.0;
        let a = lemma_a2_ratio(&d, sigma, 1e4).unwrap();
        let b = lemma_a2_ratio(&d, sigma, 1e6).unwrap();
        assert!((a / b - 1.0).abs() < 0.01, "{a} {b}");
        // limit ω(1/(N−2−σ) + 1/σ)
        let lim = d.sphere_area * (1.0 / (d.nf() - 2.0 - sigma) + 1.0 / sigma);
        assert!((b / lim - 1.0).abs() < 0.01);
    }

    #[test]
    fn suites_pass() {
        let r1 = check_lemma_a1(1000, 1);
        let r2 = check_lemma_a2(200, 2).unwrap();
        let r3 = check_lemma_a3(1000, 3);
        for r in [r1, r2, r3] {
            assert!(r.pass, "{r:?}");
        }
    }
}
