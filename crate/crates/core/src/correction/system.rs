//! −Δφ + Qφ − (2*−1)W^{2*−2}φ = h + Σ c_l W^{2*−2} Z_l subject to
//! ∫ φ W^{2*−2} Z_l = 0, on the axisymmetric subspace.
//!
//! A = −Δ_h + Q − (2*−1)W^{2*−2} is factored once (sparse LU). With
//! X = A^{−1}G and y = A^{−1}h the multipliers follow from the small system
//! (CᵀX) c = −Cᵀy and φ = y + X c.

use std::sync::Arc;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bubble_tail, TailBoundary};
use crate::error::{Error, Result};
use crate::grid::{AxiGrid, Field};
use crate::profile::Ansatz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    /// Z_{i,1}, translation along the lattice axis.
    Translation,
    /// Z_{i,N+1}, dilation.
    Dilation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub bubble: usize,
    pub kind: ModeKind,
}

impl Mode {
    /// Index j of Z_{i,j}.
    pub fn j(&self, n: usize) -> usize {
        match self.kind {
            ModeKind::Translation => 1,
            ModeKind::Dilation => n + 1,
        }
    }
}

pub struct LinearizedSystem {
    pub ansatz: Ansatz,
    pub grid: Arc<AxiGrid>,
    pub modes: Vec<Mode>,
    /// W on the grid.
    pub w: Field,
    /// W^{2*−2} Z_l, column l before scaling.
    pub columns: Vec<Vec<f64>>,
    /// quadrature weight × W^{2*−2} Z_l
    rows: Vec<Vec<f64>>,
    col_scale: Vec<f64>,
    boundary_nodes: Vec<usize>,
    boundary_tail: Vec<f64>,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    /// A^{−1} G with scaled columns.
    x: Vec<Vec<f64>>,
    schur: faer::linalg::solvers::PartialPivLu<f64>,
    /// Condition number of CᵀX (scaled).
    pub schur_condition: f64,
}

impl LinearizedSystem {
    pub fn new(ansatz: &Ansatz, grid: Arc<AxiGrid>, tail: TailBoundary) -> Result<Self> {
        if !ansatz.is_axisymmetric() {
            return Err(Error::InvalidParameter("the grid solver needs all centres on the axis".into()));
        }
        let dims = ansatz.dims;
        let p = dims.two_star - 1.0;
        let n = grid.len();
        let w = super::sample_w(ansatz, &grid);
        let pot = ansatz.potential;
        let nr = grid.nr();
        // operator rows, in parallel
        let rows_trip: Vec<Vec<Triplet<usize, usize, f64>>> = (0..grid.n1())
            .into_par_iter()
            .map(|i| {
                let mut t = Vec::with_capacity(nr * 6);
                for k in 0..nr {
                    let row = grid.idx(i, k);
                    if grid.is_boundary(i, k) {
                        t.push(Triplet::new(row, row, 1.0));
                        continue;
                    }
                    let wv = w.values()[row];
                    let diag = pot.eval_axi(grid.y1[i], grid.r[k]) - if wv > 0.0 { p * wv.powf(p - 1.0) } else { 0.0 };
                    for (col, c) in grid.laplacian_stencil(i, k) {
                        let v = if col == row { diag - c } else { -c };
                        t.push(Triplet::new(row, col, v));
                    }
                }
                t
            })
            .collect();
        let trip: Vec<Triplet<usize, usize, f64>> = rows_trip.into_iter().flatten().collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip).map_err(|e| Error::Singular(format!("assembly: {e:?}")))?;
        let lu = a.sp_lu().map_err(|e| Error::Singular(format!("sparse LU: {e:?}")))?;

        let mut modes = vec![];
        for b in 0..ansatz.bubbles.len() {
            modes.push(Mode { bubble: b, kind: ModeKind::Translation });
            modes.push(Mode { bubble: b, kind: ModeKind::Dilation });
        }
        let weights = grid.quadrature_weights();
        let mut columns = vec![];
        let mut rows = vec![];
        let mut col_scale = vec![];
        for m in &modes {
            let j = m.j(dims.n);
            let mut col = vec![0.0; n];
            for (idx, y1, r) in grid.nodes() {
                let wv = w.values()[idx];
                if wv <= 0.0 {
                    continue;
                }
                col[idx] = wv.powf(p - 1.0) * ansatz.z_axi(m.bubble, j, y1, r)?;
            }
            let row: Vec<f64> = col.iter().zip(&weights).map(|(c, q)| c * q).collect();
            for (idx, _, _) in grid.nodes() {
                let (i, k) = (idx / nr, idx % nr);
                if grid.is_boundary(i, k) {
                    col[idx] = 0.0;
                }
            }
            let s = col.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
            if !(s > 0.0) {
                return Err(Error::Singular(format!("constraint mode {m:?} vanishes on the grid")));
            }
            col_scale.push(1.0 / s);
            columns.push(col);
            rows.push(row);
        }
        let boundary_nodes: Vec<usize> = grid.nodes().filter(|(j, _, _)| grid.is_boundary(j / nr, j % nr)).map(|(j, _, _)| j).collect();
        let boundary_tail: Vec<f64> = match tail {
            TailBoundary::Zero => vec![0.0; boundary_nodes.len()],
            TailBoundary::BubbleTail => boundary_nodes
                .par_iter()
                .map(|&j| bubble_tail(ansatz, grid.y1[j / nr], grid.r[j % nr]))
                .collect(),
        };

        let nm = modes.len();
        let mut g = Mat::<f64>::zeros(n, nm);
        for (l, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                g[(i, l)] = v * col_scale[l];
            }
        }
        lu.solve_in_place(g.as_mut());
        let x: Vec<Vec<f64>> = (0..nm).map(|l| (0..n).map(|i| g[(i, l)]).collect()).collect();
        // constraint rows scaled so CᵀX has unit-sized entries on the diagonal
        let s_mat = Mat::<f64>::from_fn(nm, nm, |a, b| dot(&rows[a], &x[b]));
        let row_scale: Vec<f64> = (0..nm).map(|a| 1.0 / s_mat[(a, a)].abs().max(1e-300)).collect();
        let s_mat = Mat::<f64>::from_fn(nm, nm, |a, b| s_mat[(a, b)] * row_scale[a]);
        let sv = s_mat.singular_values().map_err(|e| Error::Singular(format!("{e:?}")))?;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let schur_condition = smax / smin;
        if !(schur_condition < 1e13) {
            return Err(Error::Singular(format!("constraint system condition number {schur_condition:e}")));
        }
        let rows: Vec<Vec<f64>> = rows.into_iter().zip(&row_scale).map(|(r, s)| r.iter().map(|v| v * s).collect()).collect();
        let schur = s_mat.partial_piv_lu();
        Ok(Self { ansatz: ansatz.clone(), grid, modes, w, columns, rows, col_scale, boundary_nodes, boundary_tail, lu, x, schur, schur_condition })
    }

    /// Solves with homogeneous boundary data.
    pub fn solve(&self, h: &Field) -> Result<(Field, Vec<f64>)> {
        self.solve_impl(h, false)
    }

    /// Solves with the configured tail on the boundary.
    pub fn solve_with_tail(&self, h: &Field) -> Result<(Field, Vec<f64>)> {
        self.solve_impl(h, true)
    }

    fn solve_impl(&self, h: &Field, tail: bool) -> Result<(Field, Vec<f64>)> {
        let n = self.grid.len();
        if h.values().len() != n {
            return Err(Error::InvalidParameter("right-hand side lives on another grid".into()));
        }
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| h.values()[i]);
        for (b, &j) in self.boundary_nodes.iter().enumerate() {
            rhs[(j, 0)] = if tail { self.boundary_tail[b] } else { 0.0 };
        }
        self.lu.solve_in_place(rhs.as_mut());
        let y: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
        let nm = self.modes.len();
        let cy = Mat::<f64>::from_fn(nm, 1, |a, _| -dot(&self.rows[a], &y));
        let c = self.schur.solve(&cy);
        let mut phi = y;
        for l in 0..nm {
            let cl = c[(l, 0)];
            for (v, xv) in phi.iter_mut().zip(&self.x[l]) {
                *v += cl * xv;
            }
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        let mult: Vec<f64> = (0..nm).map(|l| c[(l, 0)] * self.col_scale[l]).collect();
        Ok((Field::new(self.grid.clone(), phi)?, mult))
    }

    /// max_l |∫ φ W^{2*−2} Z_l| / ∫|φ W^{2*−2} Z_l|, the relative constraint defect.
    pub fn constraint_residual(&self, phi: &Field) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let s: f64 = row.iter().zip(phi.values()).map(|(a, b)| a * b).sum();
                let m: f64 = row.iter().zip(phi.values()).map(|(a, b)| (a * b).abs()).sum();
                if m > 0.0 {
                    s.abs() / m
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// W^{2*−2} Z_l as a field.
    pub fn mode_field(&self, l: usize) -> Result<Field> {
        Field::new(self.grid.clone(), self.columns[l].clone())
    }

    /// Index of a mode in the multiplier vector.
    pub fn mode_index(&self, bubble: usize, kind: ModeKind) -> Option<usize> {
        self.modes.iter().position(|m| m.bubble == bubble && m.kind == kind)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
