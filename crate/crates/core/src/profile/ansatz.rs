use serde::{Deserialize, Serialize};

use super::bubble::{self, Bubble};
use super::cutoff::CutoffSpec;
use super::potential::PotentialSpec;
use crate::dims::DimensionParams;
use crate::error::{Error, Result};

/// How the bubbles see each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    /// A finite segment of the lattice in free space.
    Chain,
    /// The bubbles live on a ring of circumference `period` in y₁.
    Wrapped { period: f64 },
}

/// Cutoff sum W = Σ_i ξ(y − x_i) U_{x_i, μ_i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    pub dims: DimensionParams,
    pub bubbles: Vec<Bubble>,
    pub cutoff: CutoffSpec,
    pub potential: PotentialSpec,
    pub layout: Layout,
}

/// Nodewise ingredients of W and of ΔW.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnsatzParts {
    pub w: f64,
    /// Σ ξ_i U_i^{2*−1}
    pub sum_xi_up: f64,
    /// Σ (U_i Δξ_i + 2∇ξ_i·∇U_i)
    pub cut_terms: f64,
}

impl Ansatz {
    pub fn new(
        dims: DimensionParams,
        bubbles: Vec<Bubble>,
        cutoff: CutoffSpec,
        potential: PotentialSpec,
        layout: Layout,
    ) -> Result<Self> {
        if bubbles.is_empty() {
            return Err(Error::InvalidParameter("ansatz needs at least one bubble".into()));
        }
        for b in &bubbles {
            if b.center.len() != dims.n {
                return Err(Error::InvalidParameter(format!(
                    "bubble center has {} coordinates, expected {}",
                    b.center.len(),
                    dims.n
                )));
            }
        }
        let a = Self { dims, bubbles, cutoff, potential, layout };
        for i in 0..a.bubbles.len() {
            for j in (i + 1)..a.bubbles.len() {
                if a.separation(i, j) == 0.0 {
                    return Err(Error::Coincident(i, j));
                }
            }
        }
        Ok(a)
    }

    /// m+1 bubbles at x_j = (jL + s_j, 0, …, 0) with heights μ_j.
    pub fn lattice(
        dims: DimensionParams,
        heights: &[f64],
        shifts: &[f64],
        potential: PotentialSpec,
        layout: Layout,
    ) -> Result<Self> {
        if heights.len() != shifts.len() {
            return Err(Error::InvalidParameter("heights and shifts differ in length".into()));
        }
        let l = potential.period_l;
        let mut bubbles = Vec::with_capacity(heights.len());
        for (j, (&mu, &s)) in heights.iter().zip(shifts).enumerate() {
            if s.abs() >= l / 4.0 {
                return Err(Error::InvalidParameter(format!("shift {s} of bubble {j} is not below L/4")));
            }
            bubbles.push(Bubble::on_axis(&dims, j as f64 * l + s, mu)?);
        }
        Self::new(dims, bubbles, CutoffSpec::default(), potential, layout)
    }

    pub fn m(&self) -> usize {
        self.bubbles.len() - 1
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.bubbles.iter().all(Bubble::is_on_axis)
    }

    fn wrap(&self, dz: f64) -> f64 {
        match self.layout {
            Layout::Chain => dz,
            Layout::Wrapped { period } => dz - period * (dz / period).round(),
        }
    }

    /// Distance between two centres, respecting the layout.
    pub fn separation(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.bubbles[i].center, &self.bubbles[j].center);
        let mut s = self.wrap(b[0] - a[0]).powi(2);
        for k in 1..a.len() {
            s += (b[k] - a[k]).powi(2);
        }
        s.sqrt()
    }

    /// y − x_i in full coordinates.
    pub fn offset(&self, i: usize, y: &[f64]) -> Vec<f64> {
        let c = &self.bubbles[i].center;
        let mut z: Vec<f64> = y.iter().zip(c).map(|(a, b)| a - b).collect();
        z[0] = self.wrap(z[0]);
        z
    }

    /// (y₁ − x_{i,1}, |y − x_i|) for an on-axis centre.
    #[inline]
    pub fn axi_offset(&self, i: usize, y1: f64, r: f64) -> (f64, f64) {
        let dz = self.wrap(y1 - self.bubbles[i].center[0]);
        (dz, (dz * dz + r * r).sqrt())
    }

    pub fn eval_w(&self, y: &[f64]) -> f64 {
        (0..self.bubbles.len())
            .map(|i| {
                let z = self.offset(i, y);
                let rho = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.cutoff.value(rho) * bubble::radial(&self.dims, self.bubbles[i].mu, rho)
            })
            .sum()
    }

    pub fn w_axi(&self, y1: f64, r: f64) -> f64 {
        let mut w = 0.0;
        for (i, b) in self.bubbles.iter().enumerate() {
            let (_, rho) = self.axi_offset(i, y1, r);
            let xi = self.cutoff.value(rho);
            if xi > 0.0 {
                w += xi * bubble::radial(&self.dims, b.mu, rho);
            }
        }
        w
    }

    /// (∂W/∂y₁, ∂W/∂r).
    pub fn grad_w_axi(&self, y1: f64, r: f64) -> (f64, f64) {
        let (mut g1, mut gr) = (0.0, 0.0);
        for (i, b) in self.bubbles.iter().enumerate() {
            let (dz, rho) = self.axi_offset(i, y1, r);
            let (xi, xd, _) = self.cutoff.radial(rho);
            if xi == 0.0 && xd == 0.0 {
                continue;
            }
            let u = bubble::radial(&self.dims, b.mu, rho);
            let ud_r = bubble::radial_d_over_r(&self.dims, b.mu, rho);
            let xd_r = if rho > 0.0 { xd / rho } else { 0.0 };
            let s = xd_r * u + xi * ud_r;
            g1 += s * dz;
            gr += s * r;
        }
        (g1, gr)
    }

    pub fn parts_axi(&self, y1: f64, r: f64) -> AnsatzParts {
        let p = self.dims.two_star - 1.0;
        let mut out = AnsatzParts::default();
        for (i, b) in self.bubbles.iter().enumerate() {
            let (_, rho) = self.axi_offset(i, y1, r);
            if rho >= self.cutoff.outer_radius {
                continue;
            }
            let (xi, xd, _) = self.cutoff.radial(rho);
            let u = bubble::radial(&self.dims, b.mu, rho);
            out.w += xi * u;
            out.sum_xi_up += xi * u.powf(p);
            if xd != 0.0 {
                let lap_xi = self.cutoff.laplacian(&self.dims, rho);
                out.cut_terms += u * lap_xi + 2.0 * xd * bubble::radial_d(&self.dims, b.mu, rho);
            }
        }
        out
    }

    /// Exact ΔW from the closed-form pieces.
    pub fn laplacian_w_axi(&self, y1: f64, r: f64) -> f64 {
        let pt = self.parts_axi(y1, r);
        -pt.sum_xi_up + pt.cut_terms
    }

    fn check_z_index(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.bubbles.len() {
            return Err(Error::Index(format!("bubble index {i} outside 0..={}", self.m())));
        }
        if j == 0 || j > self.dims.n + 1 {
            return Err(Error::Index(format!("mode index {j} outside 1..={}", self.dims.n + 1)));
        }
        Ok(())
    }

    /// Z_{ij}: ξ_i ∂W_i/∂x_{i,j} for j ≤ N (derivative in the centre coordinate),
    /// ∂W_i/∂μ_i for j = N+1.
    pub fn eval_zij(&self, i: usize, j: usize, y: &[f64]) -> Result<f64> {
        self.check_z_index(i, j)?;
        let z = self.offset(i, y);
        let rho = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(self.z_from_offset(i, j, z[j.min(self.dims.n) - 1], rho))
    }

    /// Z_{ij} on the axisymmetric grid; only j = 1 and j = N+1 survive there.
    pub fn z_axi(&self, i: usize, j: usize, y1: f64, r: f64) -> Result<f64> {
        self.check_z_index(i, j)?;
        let (dz, rho) = self.axi_offset(i, y1, r);
        let comp = if j == 1 { dz } else { 0.0 };
        Ok(self.z_from_offset(i, j, comp, rho))
    }

    fn z_from_offset(&self, i: usize, j: usize, comp: f64, rho: f64) -> f64 {
        let (xi, xd, _) = self.cutoff.radial(rho);
        if xi == 0.0 {
            return 0.0;
        }
        let mu = self.bubbles[i].mu;
        if j == self.dims.n + 1 {
            return xi * bubble::radial_dmu(&self.dims, mu, rho);
        }
        let u = bubble::radial(&self.dims, mu, rho);
        let xd_r = if rho > 0.0 { xd / rho } else { 0.0 };
        -xi * comp * (xd_r * u + xi * bubble::radial_d_over_r(&self.dims, mu, rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(l: f64) -> Ansatz {
        let dims = DimensionParams::new(7).unwrap();
        let pot = PotentialSpec::new(1.0, 4.0, l).unwrap();
        Ansatz::lattice(dims, &[3.0, 3.0], &[0.0, 0.0], pot, Layout::Chain).unwrap()
    }

    #[test]
    fn w_equals_bubble_inside_inner_ball() {
        let a = pair(10.0);
        let y = [0.3, 0.2, 0.0, 0.0, 0.1, 0.0, 0.0];
        let u = bubble::eval_bubble(&a.bubbles[0], &a.dims, &y);
        assert_eq!(a.eval_w(&y), u);
        assert_eq!(a.eval_w(&a.bubbles[0].center.clone()), bubble::eval_bubble(&a.bubbles[0], &a.dims, &a.bubbles[0].center));
        assert_eq!(a.eval_w(&[5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn coincident_centres_rejected() {
        let dims = DimensionParams::new(5).unwrap();
        let b = Bubble::on_axis(&dims, 0.0, 1.0).unwrap();
        let pot = PotentialSpec::new(1.0, 2.0, 8.0).unwrap();
        let r = Ansatz::new(dims, vec![b.clone(), b], CutoffSpec::default(), pot, Layout::Chain);
        assert!(matches!(r, Err(Error::Coincident(0, 1))));
    }

    #[test]
    fn z_matches_centre_finite_difference() {
        let a = pair(10.0);
        let h = 1e-6;
        for &y in &[[0.2, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0], [1.4, 0.3, 0.1, 0.0, 0.0, 0.0, 0.0]] {
            let mut ap = a.clone();
            let mut am = a.clone();
            ap.bubbles[0].center[0] += h;
            am.bubbles[0].center[0] -= h;
            let rho = a.bubbles[0].distance(&y);
            let fd = a.cutoff.value(rho) * (ap.eval_w(&y) - am.eval_w(&y)) / (2.0 * h);
            let z = a.eval_zij(0, 1, &y).unwrap();
            assert!((fd - z).abs() < 1e-5 * (1.0 + z.abs()), "{fd} vs {z}");
        }
        assert!(a.eval_zij(0, 9, &[0.0; 7]).is_err());
        assert!(a.eval_zij(2, 1, &[0.0; 7]).is_err());
        assert_eq!(a.eval_zij(0, 1, &[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        let psi0 = bubble::radial_dmu(&a.dims, 3.0, 0.0);
        assert_eq!(a.eval_zij(0, 8, &a.bubbles[0].center.clone()).unwrap(), psi0);
    }

    #[test]
    fn laplacian_of_w_matches_finite_differences() {
        let a = pair(10.0);
        let (y1, r) = (1.3, 0.4);
        let h = 1e-4;
        let f = |y1: f64, r: f64| a.w_axi(y1, r);
        let fzz = (f(y1 + h, r) - 2.0 * f(y1, r) + f(y1 - h, r)) / (h * h);
        let frr = (f(y1, r + h) - 2.0 * f(y1, r) + f(y1, r - h)) / (h * h);
        let fr = (f(y1, r + h) - f(y1, r - h)) / (2.0 * h);
        let fd = fzz + frr + (a.dims.nf() - 2.0) * fr / r;
        let an = a.laplacian_w_axi(y1, r);
        assert!((fd - an).abs() < 1e-4 * (1.0 + an.abs()), "{fd} vs {an}");
        let (g1, gr) = a.grad_w_axi(y1, r);
        assert!((g1 - (f(y1 + h, r) - f(y1 - h, r)) / (2.0 * h)).abs() < 1e-6);
        assert!((gr - fr).abs() < 1e-6);
    }

    #[test]
    fn wrapped_layout_uses_minimal_image() {
        let dims = DimensionParams::new(7).unwrap();
        let pot = PotentialSpec::new(1.0, 4.0, 6.0).unwrap();
        let a = Ansatz::lattice(dims, &[2.0; 3], &[0.0; 3], pot, Layout::Wrapped { period: 18.0 }).unwrap();
        assert!((a.separation(0, 2) - 6.0).abs() < 1e-12);
        assert!((a.w_axi(-0.5, 0.1) - a.w_axi(17.5, 0.1)).abs() < 1e-12);
    }
}
