//! Lattice amplitude system a_j^β = B̄ Σ_{i≠j} a_i |i − j|^{−(N−2)}.

use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::LatticeMode;
use crate::dims::DimensionParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSolution {
    pub amplitudes: Vec<f64>,
    /// min_j a_j
    pub c0: f64,
    /// max_j a_j
    pub c1: f64,
    pub iterations: usize,
    pub newton: bool,
    /// max_j |a_j^β − B̄ Σ a_i |i−j|^{−(N−2)}| / a_j^β
    pub residual: f64,
}

const DAMPING: f64 = 0.5;
const FIXED_POINT_CAP: usize = 200;

fn coupling(m: usize, n: f64, mode: LatticeMode) -> Vec<Vec<f64>> {
    let len = m + 1;
    (0..len)
        .map(|j| {
            (0..len)
                .map(|i| {
                    if i == j {
                        return 0.0;
                    }
                    let mut d = i.abs_diff(j);
                    if mode == LatticeMode::Wrapped {
                        d = d.min(len - d);
                    }
                    (d as f64).powf(2.0 - n)
                })
                .collect()
        })
        .collect()
}

fn residual(a: &[f64], k: &[Vec<f64>], b_bar: f64, beta: f64) -> f64 {
    a.iter()
        .enumerate()
        .map(|(j, aj)| {
            let s: f64 = k[j].iter().zip(a).map(|(c, ai)| c * ai).sum();
            (aj.powf(beta) - b_bar * s).abs() / aj.powf(beta)
        })
        .fold(0.0, f64::max)
}

/// Damped fixed point from unit amplitudes.
pub fn solve_lattice_amplitudes(m: usize, dims: &DimensionParams, beta: f64, b_bar: f64, tol: f64) -> Result<AmplitudeSolution> {
    solve_lattice_amplitudes_from(&vec![1.0; m + 1], dims, beta, b_bar, tol, LatticeMode::Chain)
}

/// a_j ← (1−w) a_j + w (B̄ Σ a_i |i−j|^{−(N−2)})^{1/β}, then Newton if the
/// damped map has not met `tol` after 200 sweeps.
pub fn solve_lattice_amplitudes_from(
    start: &[f64],
    dims: &DimensionParams,
    beta: f64,
    b_bar: f64,
    tol: f64,
    mode: LatticeMode,
) -> Result<AmplitudeSolution> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!("amplitude system needs beta > 1, got {beta}")));
    }
    if !(b_bar > 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude system needs B_bar > 0, got {b_bar}")));
    }
    if start.len() < 2 {
        return Err(Error::InvalidParameter("amplitude system needs at least two sites".into()));
    }
    if start.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Positivity("starting amplitudes must be positive".into()));
    }
    let m = start.len() - 1;
    let k = coupling(m, dims.nf(), mode);
    let mut a = start.to_vec();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..FIXED_POINT_CAP {
        iterations = it + 1;
        let mut next = a.clone();
        let mut delta: f64 = 0.0;
        for j in 0..=m {
            let s: f64 = k[j].iter().zip(&a).map(|(c, ai)| c * ai).sum();
            let target = (b_bar * s).powf(1.0 / beta);
            next[j] = (1.0 - DAMPING) * a[j] + DAMPING * target;
            if !(next[j] > 0.0) || !next[j].is_finite() {
                return Err(Error::Positivity(format!("amplitude {j} left (0, inf) at sweep {it}")));
            }
            delta = delta.max((next[j] - a[j]).abs());
        }
        a = next;
        if delta < tol {
            converged = true;
            break;
        }
    }
    let mut newton = false;
    if !converged {
        newton = true;
        converged = newton_solve(&mut a, &k, b_bar, beta, tol, &mut iterations)?;
    }
    if !converged {
        return Err(Error::NonConvergence(format!("lattice amplitudes after {iterations} iterations")));
    }
    let c0 = a.iter().cloned().fold(f64::MAX, f64::min);
    let c1 = a.iter().cloned().fold(0.0, f64::max);
    let residual = residual(&a, &k, b_bar, beta);
    Ok(AmplitudeSolution { amplitudes: a, c0, c1, iterations, newton, residual })
}

/// Newton in t = ln a on β t_j − ln(B̄ Σ a_i K_ji) = 0, which stays positive
/// and is well scaled even when β is close to 1.
fn newton_solve(a: &mut [f64], k: &[Vec<f64>], b_bar: f64, beta: f64, tol: f64, iterations: &mut usize) -> Result<bool> {
    let n = a.len();
    for _ in 0..100 {
        *iterations += 1;
        let s: Vec<f64> = (0..n).map(|j| k[j].iter().zip(a.iter()).map(|(c, ai)| c * ai).sum::<f64>()).collect();
        let f = Mat::<f64>::from_fn(n, 1, |j, _| beta * a[j].ln() - (b_bar * s[j]).ln());
        let jac = Mat::<f64>::from_fn(n, n, |j, i| {
            let d = if i == j { beta } else { 0.0 };
            d - k[j][i] * a[i] / s[j]
        });
        let step = jac.partial_piv_lu().solve(&f);
        let mut delta: f64 = 0.0;
        for j in 0..n {
            let st = step[(j, 0)];
            if !st.is_finite() {
                return Err(Error::Singular("amplitude Newton Jacobian".into()));
            }
            let next = a[j] * (-st).exp();
            if !(next > 0.0) || !next.is_finite() {
                return Err(Error::Positivity(format!("amplitude {j} left (0, inf) in Newton step")));
            }
            delta = delta.max(st.abs());
            a[j] = next;
        }
        // relative change; roundoff in ln a limits it to a few ulps
        if delta < tol.max(1e-13) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// μ_j = (Λ/a_j)^{2/(N−2)} with Λ = L^{(N−2)²/(2(β−N+4))}.
pub fn heights_from_amplitudes(amplitudes: &[f64], l: f64, dims: &DimensionParams, beta: f64) -> Vec<f64> {
    let nm2 = dims.nf() - 2.0;
    let lambda = l.powf(nm2 * nm2 / (2.0 * (beta - nm2 + 2.0)));
    amplitudes.iter().map(|a| (lambda / a).powf(2.0 / nm2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn dims(n: usize) -> DimensionParams {
        DimensionParams::new(n).unwrap()
    }

    #[test]
    fn symmetric_pair_closed_form() {
        let d = dims(7);
        let (beta, b_bar) = (4.0f64, 0.37f64);
        let expect = b_bar.powf(1.0 / (beta - 1.0));
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let start = [rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)];
            let s = solve_lattice_amplitudes_from(&start, &d, beta, b_bar, 1e-13, LatticeMode::Chain).unwrap();
            for a in &s.amplitudes {
                assert!((a / expect - 1.0).abs() < 1e-10, "{a} vs {expect}");
            }
        }
    }

    #[test]
    fn reflection_invariance() {
        let d = dims(6);
        let s = solve_lattice_amplitudes(9, &d, 3.0, 2.0, 1e-13).unwrap();
        let a = &s.amplitudes;
        for j in 0..a.len() {
            assert!((a[j] - a[a.len() - 1 - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn brackets_stable_in_m() {
        let d = dims(7);
        let mut prev: Option<(f64, f64)> = None;
        for m in [4, 8, 16, 32, 64] {
            let s = solve_lattice_amplitudes(m, &d, 4.0, 1.5, 1e-12).unwrap();
            assert!(s.c0 > 0.0 && s.c0 <= s.c1);
            assert!(s.amplitudes.iter().all(|a| (s.c0..=s.c1).contains(a)));
            assert!(s.residual < 1e-10);
            if let Some((c0, c1)) = prev {
                if m >= 16 {
                    assert!((s.c0 / c0 - 1.0).abs() < 0.05 && (s.c1 / c1 - 1.0).abs() < 0.05);
                }
            }
            prev = Some((s.c0, s.c1));
        }
    }

    #[test]
    fn random_starts_agree() {
        let d = dims(5);
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let base = solve_lattice_amplitudes(6, &d, 2.0, 1.0, 1e-13).unwrap();
        for _ in 0..10 {
            let start: Vec<f64> = (0..7).map(|_| rng.gen_range(0.1..10.0)).collect();
            let s = solve_lattice_amplitudes_from(&start, &d, 2.0, 1.0, 1e-13, LatticeMode::Chain).unwrap();
            for (a, b) in s.amplitudes.iter().zip(&base.amplitudes) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn slow_map_falls_back_to_newton() {
        // β close to 1 makes the damped map contract slowly
        let d = dims(5);
        let s = solve_lattice_amplitudes(3, &d, 1.02, 1.0, 1e-14).unwrap();
        assert!(s.newton);
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn wrapped_amplitudes_are_uniform() {
        let d = dims(7);
        let s = solve_lattice_amplitudes_from(&[1.0, 2.0, 3.0, 0.5, 1.0], &d, 4.0, 1.0, 1e-13, LatticeMode::Wrapped).unwrap();
        assert!((s.c1 - s.c0) < 1e-9);
    }

    #[test]
    fn invalid_inputs() {
        let d = dims(7);
        assert!(solve_lattice_amplitudes(3, &d, 0.9, 1.0, 1e-10).is_err());
        assert!(solve_lattice_amplitudes(3, &d, 4.0, 0.0, 1e-10).is_err());
        assert!(matches!(
            solve_lattice_amplitudes_from(&[1.0, -1.0], &d, 4.0, 1.0, 1e-10, LatticeMode::Chain),
            Err(Error::Positivity(_))
        ));
    }

    #[test]
    fn heights_scale_with_spacing() {
        let d = dims(7);
        let h8 = heights_from_amplitudes(&[1.0], 8.0, &d, 4.0)[0];
        let h16 = heights_from_amplitudes(&[1.0], 16.0, &d, 4.0)[0];
        assert!(((h16 / h8).log2() - 5.0).abs() < 1e-12);
    }
}
