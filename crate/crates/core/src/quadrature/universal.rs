//! Integrals of the unit bubble U_{0,1} that feed the reduced-system constants.

use serde::{Deserialize, Serialize};

use super::{angular_integral, half_line, radial_integral, Estimate, QuadratureSpec};
use crate::dims::DimensionParams;
use crate::error::{Error, Result};
use crate::profile::PotentialSpec;

/// Unit-bubble integrals, each with its quadrature error estimate.
///
/// `j_beta` is the Hadamard finite part of ∫|y|^β U²: inside the admissible
/// window N−4 < β < N−2 the integral diverges like R^{β+4−N}, and the finite
/// part is what the change of variables ∫Q U_μ² = a μ^{−(β+2)} J_β produces
/// once the divergent tail is absorbed by the clipped far field. It is
/// negative throughout the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    pub n: usize,
    pub beta: f64,
    pub a_n: f64,
    pub i_2star: Estimate,
    pub i_grad: Estimate,
    pub i_pow: Estimate,
    pub j_2: Estimate,
    pub j_beta: Estimate,
    /// ∫|y|^{β−2} U², convergent for β < N−2.
    pub m_beta_m2: Estimate,
    /// ∫|y_i|^{β−2} y_i U ∂_iU.
    pub j_beta_prime: Estimate,
    /// ∫|y|^β U^{2*−1} ψ_0.
    pub j_beta_dil: Estimate,
    /// Angular factor of ∫|y_i|^{β−2} y_i U², zero by parity.
    pub odd_moment: Estimate,
    /// ∫U^{2*−2} (∂_1U)², the translation Gram entry.
    pub gram_translation: Estimate,
    /// ∫U^{2*−2} ψ_0², the dilation Gram entry.
    pub gram_dilation: Estimate,
}

/// Finite part of ∫_0^∞ ρ^{N−1+β} U(ρ)² dρ, without the sphere factor.
///
/// Split at ρ = 1; beyond it the leading A²ρ^{4−2N} is subtracted and its
/// integral from 1 to ∞ is replaced by the analytic continuation −A²/(β+4−N).
pub fn finite_part_radial(dims: &DimensionParams, beta: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let nf = dims.nf();
    let a2 = dims.profile_const().powi(2);
    let lead = beta + 4.0 - nf;
    if lead.abs() < 1e-12 {
        return Err(Error::Divergent(format!("logarithmic divergence at beta = {beta}")));
    }
    let g = |r: f64| {
        if r <= 0.0 {
            0.0
        } else if r < 1.0 {
            r.powf(nf - 1.0 + beta) * a2 * (1.0 + r * r).powf(2.0 - nf)
        } else {
            // U² − A²ρ^{4−2N} = A²ρ^{4−2N} expm1((2−N) ln1p(ρ^{−2}))
            let x = r.powi(-2);
            a2 * r.powf(beta + 3.0 - nf) * ((2.0 - nf) * x.ln_1p()).exp_m1()
        }
    };
    let body = half_line(&g, 1.0, spec, &[1.0])?;
    // for lead < 0 this is the convergent tail itself
    Ok(Estimate { value: body.value - a2 / lead, error: body.error })
}

/// Fill every unit-bubble integral for the dimension and the potential exponent.
pub fn compute_universal(dims: &DimensionParams, potential: &PotentialSpec, spec: &QuadratureSpec) -> Result<UniversalConstants> {
    let beta = potential.beta;
    let nf = dims.nf();
    if !(beta > nf - 4.0 && beta < nf - 2.0) {
        return Err(Error::Divergent(format!(
            "beta-moments need {} < beta < {}, got {beta}",
            nf - 4.0,
            nf - 2.0
        )));
    }
    let a = dims.profile_const();
    let k = dims.half_nm2();
    let p = (nf + 2.0) / (nf - 2.0);
    // closed forms of the unit bubble in s = ρ²
    let u = move |r: f64| a * (1.0 + r * r).powf(-k);
    let du = move |r: f64| -(nf - 2.0) * a * r * (1.0 + r * r).powf(-nf / 2.0);
    let psi0 = move |r: f64| {
        let s = r * r;
        k * a * (1.0 - s) * (1.0 + s).powf(-k - 1.0)
    };

    let i_2star = radial_integral(|r| u(r).powf(dims.two_star), dims, spec)?;
    let i_grad = radial_integral(|r| du(r).powi(2), dims, spec)?;
    let i_pow = radial_integral(|r| u(r).powf(p), dims, spec)?;
    let j_2 = radial_integral(|r| u(r).powi(2), dims, spec)?;
    let j_beta = finite_part_radial(dims, beta, spec)?.scale(dims.sphere_area);
    let m_beta_m2 = radial_integral(|r| r.powf(beta - 2.0) * u(r).powi(2), dims, spec)?;

    let ang_beta = angular_integral(|c| c.abs().powf(beta), dims);
    let rad_prime = radial_integral(|r| r.powf(beta - 1.0) * u(r) * du(r), dims, spec)?;
    let j_beta_prime = Estimate {
        value: rad_prime.value * ang_beta.value / dims.sphere_area,
        error: rad_prime.error * ang_beta.value / dims.sphere_area,
    };
    let j_beta_dil = radial_integral(|r| r.powf(beta) * u(r).powf(p) * psi0(r), dims, spec)?;
    let odd_moment = angular_integral(|c| c.abs().powf(beta - 2.0) * c, dims);
    let g_tr = radial_integral(|r| u(r).powf(p - 1.0) * du(r).powi(2), dims, spec)?.scale(1.0 / nf);
    let g_dil = radial_integral(|r| u(r).powf(p - 1.0) * psi0(r).powi(2), dims, spec)?;

    Ok(UniversalConstants {
        n: dims.n,
        beta,
        a_n: a,
        i_2star,
        i_grad,
        i_pow,
        j_2,
        j_beta,
        m_beta_m2,
        j_beta_prime,
        j_beta_dil,
        odd_moment,
        gram_translation: g_tr,
        gram_dilation: g_dil,
    })
}

/// (N−2) ω_{N−1} A_N: the flux of −∇U through a large sphere.
pub fn flux_value(dims: &DimensionParams) -> f64 {
    (dims.nf() - 2.0) * dims.sphere_area * dims.profile_const()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(n: usize, beta: f64) -> UniversalConstants {
        let d = DimensionParams::new(n).unwrap();
        let pot = PotentialSpec::new(1.0, beta, 16.0).unwrap();
        compute_universal(&d, &pot, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn i_pow_matches_flux() {
        for (n, beta) in [(5, 2.0), (6, 3.0), (7, 4.0)] {
            let c = consts(n, beta);
            let d = DimensionParams::new(n).unwrap();
            let f = flux_value(&d);
            assert!((c.i_pow.value - f).abs() < 1e-10 * f, "N={n}: {} vs {f}", c.i_pow.value);
        }
        // N = 5: 3 ω_4 15^{3/4}
        let d = DimensionParams::new(5).unwrap();
        let expect = 3.0 * d.sphere_area * 15f64.powf(0.75);
        assert!((consts(5, 2.0).i_pow.value - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn energy_identity() {
        for n in 5..10 {
            let c = consts(n, n as f64 - 3.0);
            assert!((c.i_2star.value - c.i_grad.value).abs() < 1e-8 * c.i_grad.value);
        }
    }

    #[test]
    fn finite_part_matches_beta_function() {
        // ∫_0^∞ ρ^{β+N−1}(1+ρ²)^{2−N} = Γ((β+N)/2) Γ((N−4−β)/2) / (2Γ(N−2)) by continuation
        for (n, beta) in [(7usize, 4.0), (7, 4.5), (5, 2.0), (6, 2.7)] {
            let d = DimensionParams::new(n).unwrap();
            let nf = n as f64;
            let a2 = d.profile_const().powi(2);
            let closed = d.sphere_area * a2 * 0.5 * statrs::function::gamma::gamma((beta + nf) / 2.0) * statrs::function::gamma::gamma((nf - 4.0 - beta) / 2.0)
                / statrs::function::gamma::gamma(nf - 2.0);
            let c = consts(n, beta);
            assert!(c.j_beta.value < 0.0);
            assert!((c.j_beta.value - closed).abs() < 1e-8 * closed.abs(), "{} vs {closed}", c.j_beta.value);
        }
    }

    #[test]
    fn finite_part_equals_integral_when_convergent() {
        let d = DimensionParams::new(7).unwrap();
        let spec = QuadratureSpec::default();
        let beta = 1.5;
        let fp = finite_part_radial(&d, beta, &spec).unwrap();
        let direct = radial_integral(|r| r.powf(beta) * crate::profile::radial(&d, 1.0, r).powi(2), &d, &spec).unwrap();
        assert!((fp.value * d.sphere_area - direct.value).abs() < 1e-9 * direct.value);
    }

    #[test]
    fn two_levels_agree() {
        let c = consts(5, 2.0);
        for e in [c.i_pow, c.j_2, c.i_2star, c.m_beta_m2, c.j_beta_dil, c.gram_dilation] {
            assert!(e.rel_error() < 1e-8, "{e:?}");
        }
    }

    #[test]
    fn odd_moment_vanishes() {
        let c = consts(7, 4.0);
        assert!(c.odd_moment.value.abs() < 1e-13);
    }

    #[test]
    fn prime_moment_by_parts() {
        // ∫|y_1|^{β−2} y_1 U ∂_1U = −(β−1)/2 ∫|y_1|^{β−2} U²
        let d = DimensionParams::new(7).unwrap();
        let beta = 4.0;
        let c = consts(7, beta);
        let spec = QuadratureSpec::default();
        let rad = radial_integral(|r| r.powf(beta - 2.0) * crate::profile::radial(&d, 1.0, r).powi(2), &d, &spec).unwrap();
        let ang = angular_integral(|x| x.abs().powf(beta - 2.0), &d).value / d.sphere_area;
        let expect = -(beta - 1.0) / 2.0 * rad.value * ang;
        assert!((c.j_beta_prime.value - expect).abs() < 1e-8 * expect.abs());
    }

    #[test]
    fn m_moment_matches_2d_brute_force() {
        // ∫|y|^{β−2} U² by nested 1D rules in (y_1, r) with measure ω_{N−2} r^{N−2}
        let d = DimensionParams::new(7).unwrap();
        let beta = 4.0;
        let c = consts(7, beta);
        let spec = QuadratureSpec { tol: 1e-6, ..Default::default() };
        let inner = |y1: f64| {
            let g = |r: f64| {
                let rr = (y1 * y1 + r * r).sqrt();
                r.powi(5) * rr.powf(beta - 2.0) * crate::profile::radial(&d, 1.0, rr).powi(2)
            };
            half_line(&g, 1.0, &spec, &[]).unwrap().value
        };
        let outer = 2.0 * half_line(&inner, 1.0, &spec, &[]).unwrap().value * d.transverse_area();
        assert!((outer - c.m_beta_m2.value).abs() < 1e-6 * outer, "{outer} vs {}", c.m_beta_m2.value);
    }

    #[test]
    fn outside_window_is_divergent() {
        let d = DimensionParams::new(7).unwrap();
        let pot = PotentialSpec::new(1.0, 5.0, 16.0).unwrap();
        assert!(matches!(compute_universal(&d, &pot, &QuadratureSpec::default()), Err(Error::Divergent(_))));
    }

    #[test]
    fn gram_entries_positive() {
        let c = consts(6, 3.0);
        assert!(c.gram_translation.value > 0.0 && c.gram_dilation.value > 0.0);
    }
}
