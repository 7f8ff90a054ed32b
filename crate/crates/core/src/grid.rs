//! Axisymmetric (y₁, r) collocation grids and sampled fields.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dims::DimensionParams;
use crate::error::{Error, Result};

/// Boundary treatment in y₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxialBoundary {
    /// Homogeneous Dirichlet at both ends.
    Dirichlet,
    /// Periodic with the given period; the node at `lo + period` is identified with `lo`.
    Periodic(f64),
}

/// Parameters of a graded grid.
///
/// Node density in each direction is the derivative of
/// S(x) = x/h_max + Σ_c asinh((x − c)/ε)/q, with ε = 1/μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub y1_lo: f64,
    pub y1_hi: f64,
    pub r_max: f64,
    /// Centres on the axis where the grid clusters; also forced nodes.
    pub anchors: Vec<f64>,
    pub mu: f64,
    pub h_max: f64,
    pub q: f64,
    pub boundary: AxialBoundary,
    /// Each level doubles the node count per segment.
    pub level: u32,
}

impl GridSpec {
    /// Box around a chain of centres with margin `pad`.
    pub fn around(anchors: &[f64], mu: f64, pad: f64) -> Self {
        let lo = anchors.iter().cloned().fold(f64::INFINITY, f64::min) - pad;
        let hi = anchors.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad;
        Self {
            y1_lo: lo,
            y1_hi: hi,
            r_max: pad,
            anchors: anchors.to_vec(),
            mu,
            h_max: 0.25,
            q: 0.2,
            boundary: AxialBoundary::Dirichlet,
            level: 0,
        }
    }

    /// One periodic cell [lo, lo + period) holding all the centres.
    pub fn periodic(anchors: &[f64], period: f64, mu: f64, r_max: f64) -> Self {
        let lo = anchors.first().copied().unwrap_or(0.0) - period / (2.0 * anchors.len().max(1) as f64);
        Self {
            y1_lo: lo,
            y1_hi: lo + period,
            r_max,
            anchors: anchors.to_vec(),
            mu,
            h_max: 0.25,
            q: 0.2,
            boundary: AxialBoundary::Periodic(period),
            level: 0,
        }
    }

    pub fn refined(&self) -> Self {
        let mut s = self.clone();
        s.level += 1;
        s
    }

    fn density_integral(&self, centres: &[f64], x: f64) -> f64 {
        let eps = 1.0 / self.mu;
        x / self.h_max + centres.iter().map(|c| ((x - c) / eps).asinh() / self.q).sum::<f64>()
    }

    fn place(&self, centres: &[f64], knots: &[f64]) -> Vec<f64> {
        let mult = 2f64.powi(self.level as i32);
        let mut nodes = vec![knots[0]];
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = (self.density_integral(centres, a), self.density_integral(centres, b));
            let base = (sb - sa).ceil().max(2.0);
            let n = (base * mult) as usize;
            for k in 1..=n {
                let target = sa + (sb - sa) * k as f64 / n as f64;
                if k == n {
                    nodes.push(b);
                    break;
                }
                // invert the monotone S by bisection
                let (mut lo, mut hi) = (a, b);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if self.density_integral(centres, mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                nodes.push(0.5 * (lo + hi));
            }
        }
        nodes
    }

    pub fn build(&self, dims: &DimensionParams) -> Result<AxiGrid> {
        if !(self.y1_hi > self.y1_lo) || !(self.r_max > 0.0) || !(self.mu > 0.0) || self.anchors.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let y1 = match self.boundary {
            AxialBoundary::Dirichlet => self.chain_nodes(),
            AxialBoundary::Periodic(p) => self.periodic_nodes(p)?,
        };
        let r = self.place(&[0.0], &[0.0, self.r_max]);
        AxiGrid::new(*dims, y1, r, self.boundary)
    }

    /// Segments run between each centre and the midpoints to its neighbours;
    /// each segment is graded by its own centre only, so the node pattern is
    /// mirror-symmetric about every centre up to the neighbouring midpoints.
    fn chain_nodes(&self) -> Vec<f64> {
        let mut cs: Vec<f64> = self.anchors.iter().copied().filter(|&c| c > self.y1_lo && c < self.y1_hi).collect();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cs.dedup();
        if cs.is_empty() {
            return self.place(&[], &[self.y1_lo, self.y1_hi]);
        }
        let mut nodes = vec![self.y1_lo];
        let mut left = self.y1_lo;
        for (i, &c) in cs.iter().enumerate() {
            let right = if i + 1 < cs.len() { 0.5 * (c + cs[i + 1]) } else { self.y1_hi };
            // mirror the shorter side of the segment pair so the pattern is symmetric about c
            let half = (c - left).min(right - c);
            let mut knots = vec![];
            if c - left > half {
                knots.push(left);
            }
            knots.extend([c - half, c, c + half]);
            if right - c > half {
                knots.push(right);
            }
            let seg = self.place(&[c], &knots);
            nodes.extend_from_slice(&seg[1..]);
            left = right;
        }
        nodes
    }

    /// One cell around the first anchor, replicated so every period cell
    /// carries an identical node pattern.
    fn periodic_nodes(&self, p: f64) -> Result<Vec<f64>> {
        let n = self.anchors.len();
        let cell = p / n as f64;
        let a0 = self.anchors[0];
        for (j, &a) in self.anchors.iter().enumerate() {
            if (a - (a0 + j as f64 * cell)).abs() > 1e-12 * p.max(1.0) {
                return Err(Error::InvalidParameter("periodic grids need equally spaced anchors".into()));
            }
        }
        let images: Vec<f64> = (-12..=12).map(|j| a0 + j as f64 * cell).collect();
        let mut one = self.place(&images, &[a0 - cell / 2.0, a0, a0 + cell / 2.0]);
        one.pop();
        let mut nodes = Vec::with_capacity(one.len() * n);
        for j in 0..n {
            nodes.extend(one.iter().map(|v| v + j as f64 * cell));
        }
        Ok(nodes)
    }
}

/// Tensor grid in (y₁, r); r[0] = 0 is the symmetry axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiGrid {
    pub dims: DimensionParams,
    pub y1: Vec<f64>,
    pub r: Vec<f64>,
    pub boundary: AxialBoundary,
}

impl AxiGrid {
    pub fn new(dims: DimensionParams, y1: Vec<f64>, r: Vec<f64>, boundary: AxialBoundary) -> Result<Self> {
        if y1.len() < 3 || r.len() < 3 {
            return Err(Error::EmptyGrid);
        }
        if r[0] != 0.0 {
            return Err(Error::InvalidParameter("first radial node must sit on the axis".into()));
        }
        if y1.windows(2).any(|w| w[1] <= w[0]) || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid nodes must be strictly increasing".into()));
        }
        Ok(Self { dims, y1, r, boundary })
    }

    pub fn n1(&self) -> usize {
        self.y1.len()
    }
    pub fn nr(&self) -> usize {
        self.r.len()
    }
    pub fn len(&self) -> usize {
        self.n1() * self.nr()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index: y₁ is the slow axis.
    #[inline]
    pub fn idx(&self, i: usize, k: usize) -> usize {
        i * self.nr() + k
    }

    pub fn period(&self) -> Option<f64> {
        match self.boundary {
            AxialBoundary::Periodic(p) => Some(p),
            AxialBoundary::Dirichlet => None,
        }
    }

    pub fn is_boundary(&self, i: usize, k: usize) -> bool {
        k + 1 == self.nr() || (self.period().is_none() && (i == 0 || i + 1 == self.n1()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.n1()).flat_map(move |i| (0..self.nr()).map(move |k| (self.idx(i, k), self.y1[i], self.r[k])))
    }

    /// Neighbour y₁ indices and spacings (h₋, h₊) of an interior row.
    pub fn axial_stencil(&self, i: usize) -> Option<(usize, usize, f64, f64)> {
        let n = self.n1();
        match self.boundary {
            AxialBoundary::Dirichlet => {
                if i == 0 || i + 1 == n {
                    None
                } else {
                    Some((i - 1, i + 1, self.y1[i] - self.y1[i - 1], self.y1[i + 1] - self.y1[i]))
                }
            }
            AxialBoundary::Periodic(p) => {
                let (im, hm) = if i == 0 { (n - 1, self.y1[0] + p - self.y1[n - 1]) } else { (i - 1, self.y1[i] - self.y1[i - 1]) };
                let (ip, hp) = if i + 1 == n { (0, self.y1[0] + p - self.y1[n - 1]) } else { (i + 1, self.y1[i + 1] - self.y1[i]) };
                Some((im, ip, hm, hp))
            }
        }
    }

    /// Discrete Laplacian stencil at an interior node: list of (index, weight).
    pub fn laplacian_stencil(&self, i: usize, k: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(5);
        let (im, ip, hm, hp) = self.axial_stencil(i).expect("interior row");
        let c = self.idx(i, k);
        out.push((self.idx(im, k), 2.0 / (hm * (hm + hp))));
        out.push((self.idx(ip, k), 2.0 / (hp * (hm + hp))));
        let mut diag = -2.0 / (hm * hp);
        let nt = self.dims.nf() - 2.0;
        if k == 0 {
            // f_rr + (N−2) f_r / r → (N−1) f_rr on the axis, with even reflection
            let h = self.r[1];
            let w = (nt + 1.0) * 2.0 / (h * h);
            out.push((self.idx(i, 1), w));
            diag -= w;
        } else {
            let (h_m, h_p) = (self.r[k] - self.r[k - 1], self.r[k + 1] - self.r[k]);
            let rr = self.r[k];
            let s = h_m + h_p;
            let wm = 2.0 / (h_m * s) - nt / rr * h_p / (h_m * s);
            let wp = 2.0 / (h_p * s) + nt / rr * h_m / (h_p * s);
            let w0 = -2.0 / (h_m * h_p) + nt / rr * (h_p - h_m) / (h_m * h_p);
            out.push((self.idx(i, k - 1), wm));
            out.push((self.idx(i, k + 1), wp));
            diag += w0;
        }
        out.push((c, diag));
        out
    }

    /// Apply the discrete Laplacian; boundary nodes get 0.
    pub fn apply_laplacian(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for i in 0..self.n1() {
            for k in 0..self.nr() {
                if self.is_boundary(i, k) {
                    continue;
                }
                out[self.idx(i, k)] = self.laplacian_stencil(i, k).iter().map(|&(j, w)| w * f[j]).sum();
            }
        }
        out
    }

    /// Trapezoid weights for ∫_{R^N} f dy = ω_{N−2} ∫∫ f r^{N−2} dr dy₁.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let om = self.dims.transverse_area();
        let n1 = self.n1();
        let w1: Vec<f64> = (0..n1)
            .map(|i| match self.boundary {
                AxialBoundary::Periodic(p) => {
                    let prev = if i == 0 { self.y1[0] + p - self.y1[n1 - 1] } else { self.y1[i] - self.y1[i - 1] };
                    let next = if i + 1 == n1 { self.y1[0] + p - self.y1[n1 - 1] } else { self.y1[i + 1] - self.y1[i] };
                    0.5 * (prev + next)
                }
                AxialBoundary::Dirichlet => {
                    let prev = if i == 0 { 0.0 } else { self.y1[i] - self.y1[i - 1] };
                    let next = if i + 1 == n1 { 0.0 } else { self.y1[i + 1] - self.y1[i] };
                    0.5 * (prev + next)
                }
            })
            .collect();
        // linear interpolant times r^{N−2}, integrated exactly on each interval
        let e = self.dims.nf() - 2.0;
        let mut wr = vec![0.0; self.nr()];
        for k in 0..self.nr() - 1 {
            let (a, b) = (self.r[k], self.r[k + 1]);
            let h = b - a;
            let m0 = (b.powf(e + 1.0) - a.powf(e + 1.0)) / (e + 1.0);
            let m1 = (b.powf(e + 2.0) - a.powf(e + 2.0)) / (e + 2.0);
            wr[k] += (b * m0 - m1) / h;
            wr[k + 1] += (m1 - a * m0) / h;
        }
        let mut w = Vec::with_capacity(self.len());
        for a in &w1 {
            for b in &wr {
                w.push(om * a * b);
            }
        }
        w
    }

    /// Index of the grid interval containing x (clamped).
    pub fn locate(nodes: &[f64], x: f64) -> usize {
        match nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(nodes.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(nodes.len() - 2),
        }
    }

    pub fn covers(&self, y1: f64, r: f64) -> bool {
        let r_ok = r >= 0.0 && r <= *self.r.last().unwrap();
        let y_ok = self.period().is_some() || (y1 >= self.y1[0] && y1 <= *self.y1.last().unwrap());
        r_ok && y_ok
    }
}

/// A scalar function sampled on an [`AxiGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<AxiGrid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<AxiGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<AxiGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    /// Sample f(y₁, r) at every node, in parallel.
    pub fn sample<F: Fn(f64, f64) -> f64 + Sync>(grid: Arc<AxiGrid>, f: F) -> Self {
        use rayon::prelude::*;
        let nr = grid.nr();
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|j| f(grid.y1[j / nr], grid.r[j % nr]))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<AxiGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Result<Self> {
        if self.grid != other.grid && *self.grid != *other.grid {
            return Err(Error::InvalidParameter("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integrate(&self) -> f64 {
        self.grid.quadrature_weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    /// Value and (∂/∂y₁, ∂/∂r) from the tensor cubic through the surrounding
    /// 4×4 nodes. The field is taken even in r across the axis.
    pub fn jet(&self, y1: f64, r: f64) -> Result<(f64, f64, f64)> {
        let g = &self.grid;
        let r = r.abs();
        if !g.covers(y1, r) {
            return Err(Error::OutsideCoverage(format!("({y1}, {r})")));
        }
        let n1 = g.n1() as isize;
        let nr = g.nr() as isize;
        // axial stencil: (coordinate, row)
        let mut ys = [(0.0, 0usize); 4];
        match g.period() {
            Some(p) => {
                let y = g.y1[0] + (y1 - g.y1[0]).rem_euclid(p);
                let i = if y >= g.y1[n1 as usize - 1] { n1 - 1 } else { AxiGrid::locate(&g.y1, y) as isize };
                for (t, slot) in ys.iter_mut().enumerate() {
                    let j = i - 1 + t as isize;
                    let wraps = j.div_euclid(n1);
                    let jj = j.rem_euclid(n1) as usize;
                    *slot = (g.y1[jj] + wraps as f64 * p - (y - y1), jj);
                }
            }
            None => {
                let i = (AxiGrid::locate(&g.y1, y1) as isize - 1).clamp(0, n1 - 4);
                for (t, slot) in ys.iter_mut().enumerate() {
                    let jj = (i + t as isize) as usize;
                    *slot = (g.y1[jj], jj);
                }
            }
        }
        let k0 = (AxiGrid::locate(&g.r, r) as isize - 1).min(nr - 4);
        let mut rs = [(0.0, 0usize); 4];
        for (t, slot) in rs.iter_mut().enumerate() {
            let k = k0 + t as isize;
            *slot = if k < 0 { (-g.r[(-k) as usize], (-k) as usize) } else { (g.r[k as usize], k as usize) };
        }
        let (wy, dy) = lagrange4(&ys.map(|v| v.0), y1);
        let (wr, dr) = lagrange4(&rs.map(|v| v.0), r);
        let (mut v, mut v1, mut vr) = (0.0, 0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let f = self.values[g.idx(ys[a].1, rs[b].1)];
                v += wy[a] * wr[b] * f;
                v1 += dy[a] * wr[b] * f;
                vr += wy[a] * dr[b] * f;
            }
        }
        Ok((v, v1, vr))
    }

    /// Bilinear interpolation; periodic wrap in y₁ when applicable.
    pub fn interpolate(&self, y1: f64, r: f64) -> Result<f64> {
        let g = &self.grid;
        let r = r.abs();
        if !g.covers(y1, r) {
            return Err(Error::OutsideCoverage(format!("({y1}, {r})")));
        }
        let k = AxiGrid::locate(&g.r, r);
        let tr = (r - g.r[k]) / (g.r[k + 1] - g.r[k]);
        let (i0, i1, t1) = match g.period() {
            Some(p) => {
                let n = g.n1();
                let y = g.y1[0] + (y1 - g.y1[0]).rem_euclid(p);
                if y >= g.y1[n - 1] {
                    (n - 1, 0, (y - g.y1[n - 1]) / (g.y1[0] + p - g.y1[n - 1]))
                } else {
                    let i = AxiGrid::locate(&g.y1, y);
                    (i, i + 1, (y - g.y1[i]) / (g.y1[i + 1] - g.y1[i]))
                }
            }
            None => {
                let i = AxiGrid::locate(&g.y1, y1);
                (i, i + 1, (y1 - g.y1[i]) / (g.y1[i + 1] - g.y1[i]))
            }
        };
        let v = |i: usize, kk: usize| self.values[g.idx(i, kk)];
        Ok((1.0 - t1) * ((1.0 - tr) * v(i0, k) + tr * v(i0, k + 1)) + t1 * ((1.0 - tr) * v(i1, k) + tr * v(i1, k + 1)))
    }

    /// Binary layout: magic, N, n₁, n_r, bounds, node coordinates, values (all little-endian).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        w.write_all(b"AXIF")?;
        w.write_all(&(g.dims.n as u32).to_le_bytes())?;
        w.write_all(&(g.n1() as u64).to_le_bytes())?;
        w.write_all(&(g.nr() as u64).to_le_bytes())?;
        let period = g.period().unwrap_or(0.0);
        for v in [g.y1[0], *g.y1.last().unwrap(), 0.0, *g.r.last().unwrap(), period] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in g.y1.iter().chain(&g.r).chain(&self.values) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut rd: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        rd.read_exact(&mut magic)?;
        if &magic != b"AXIF" {
            return Err(Error::Format("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        rd.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        rd.read_exact(&mut b8)?;
        let n1 = u64::from_le_bytes(b8) as usize;
        rd.read_exact(&mut b8)?;
        let nr = u64::from_le_bytes(b8) as usize;
        let mut read_f = |rd: &mut R| -> Result<f64> {
            rd.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let mut bounds = [0.0; 5];
        for b in bounds.iter_mut() {
            *b = read_f(&mut rd)?;
        }
        let mut take = |k: usize, rd: &mut R| -> Result<Vec<f64>> { (0..k).map(|_| read_f(rd)).collect() };
        let y1 = take(n1, &mut rd)?;
        let r = take(nr, &mut rd)?;
        let values = take(n1 * nr, &mut rd)?;
        let boundary = if bounds[4] > 0.0 { AxialBoundary::Periodic(bounds[4]) } else { AxialBoundary::Dirichlet };
        let grid = AxiGrid::new(DimensionParams::new(n)?, y1, r, boundary)?;
        Field::new(Arc::new(grid), values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(f))
    }
}

/// Cubic Lagrange weights and their derivatives at x.
fn lagrange4(xs: &[f64; 4], x: f64) -> ([f64; 4], [f64; 4]) {
    let mut w = [0.0; 4];
    let mut d = [0.0; 4];
    for i in 0..4 {
        let mut den = 1.0;
        for j in 0..4 {
            if j != i {
                den *= xs[i] - xs[j];
            }
        }
        let mut num = 1.0;
        let mut dnum = 0.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            dnum = dnum * (x - xs[j]) + num;
            num *= x - xs[j];
        }
        w[i] = num / den;
        d[i] = dnum / den;
    }
    (w, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::bubble;

    fn dims() -> DimensionParams {
        DimensionParams::new(7).unwrap()
    }

    #[test]
    fn jet_reproduces_even_cubics() {
        let g = Arc::new(GridSpec::around(&[0.0, 6.0], 8.0, 3.0).build(&dims()).unwrap());
        let f = Field::sample(g, |y, r| y * y * y - 2.0 * r * r * y + r * r + 1.0);
        for &(y, r) in &[(0.013, 0.0), (0.3, 0.02), (5.1, 1.7), (-2.9, 2.95), (8.9, 0.5)] {
            let (v, v1, vr) = f.jet(y, r).unwrap();
            assert!((v - (y * y * y - 2.0 * r * r * y + r * r + 1.0)).abs() < 1e-10);
            assert!((v1 - (3.0 * y * y - 2.0 * r * r)).abs() < 1e-9);
            assert!((vr - (-4.0 * r * y + 2.0 * r)).abs() < 1e-9);
        }
    }

    #[test]
    fn jet_wraps_periodic_grids() {
        let p = 6.0;
        let g = Arc::new(GridSpec::periodic(&[0.0], p, 4.0, 3.0).build(&dims()).unwrap());
        let k = 2.0 * std::f64::consts::PI / p;
        let f = Field::sample(g, |y, r| (k * y).cos() * (1.0 + r * r));
        for &y in &[-3.0, -2.999, 0.01, 2.9, 3.0, 9.2] {
            let (v, v1, _) = f.jet(y, 0.4).unwrap();
            assert!((v - (k * y).cos() * 1.16).abs() < 1e-4, "{y}");
            assert!((v1 + k * (k * y).sin() * 1.16).abs() < 1e-3, "{y}");
        }
    }

    #[test]
    fn anchors_are_nodes_and_refinement_nests() {
        let spec = GridSpec::around(&[0.0, 6.0], 8.0, 3.0);
        let g = spec.build(&dims()).unwrap();
        assert!(g.y1.contains(&0.0) && g.y1.contains(&6.0));
        let f = spec.refined().build(&dims()).unwrap();
        assert_eq!(f.n1(), 2 * g.n1() - 1);
        for (i, v) in g.y1.iter().enumerate() {
            assert!((f.y1[2 * i] - v).abs() < 1e-12);
        }
        let core = g.y1.iter().filter(|v| v.abs() < 1.0 / 8.0).count();
        assert!(core >= 8, "only {core} nodes in the core");
    }

    #[test]
    fn chain_grid_is_mirror_symmetric_about_each_centre() {
        let spec = GridSpec::around(&[0.0, 6.0, 12.0], 16.0, 3.0);
        let g = spec.build(&dims()).unwrap();
        for &c in &[0.0, 6.0, 12.0] {
            let left: Vec<f64> = g.y1.iter().filter(|&&v| v < c && v >= c - 3.0).map(|v| c - v).collect();
            let mut right: Vec<f64> = g.y1.iter().filter(|&&v| v > c && v <= c + 3.0).map(|v| v - c).collect();
            right.reverse();
            assert_eq!(left.len(), right.len());
            for (a, b) in left.iter().zip(&right) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_weights_converge_at_second_order() {
        // volume of the cylinder [−1,1] × B^{N−1}_1
        let expect = 2.0 * dims().transverse_area() / (dims().nf() - 1.0);
        let mut spec = GridSpec::around(&[0.0], 1.0, 1.0);
        let mut errs = vec![];
        for _ in 0..3 {
            let g = Arc::new(spec.build(&dims()).unwrap());
            errs.push((Field::sample(g, |_, _| 1.0).integrate() - expect).abs() / expect);
            spec = spec.refined();
        }
        assert!(errs.iter().all(|&e| e < 1e-12), "{errs:?}");
        // a smooth non-polynomial integrand converges at second order
        let f = |y1: f64, r: f64| (-(y1 * y1 + r * r)).exp();
        let mut spec = GridSpec::around(&[0.0], 1.0, 6.0);
        let mut vals = vec![];
        for _ in 0..3 {
            let g = Arc::new(spec.build(&dims()).unwrap());
            vals.push(Field::sample(g, f).integrate());
            spec = spec.refined();
        }
        let gauss = std::f64::consts::PI.powf(dims().nf() / 2.0);
        let e: Vec<f64> = vals.iter().map(|v| (v - gauss).abs() / gauss).collect();
        assert!((e[1] / e[2]).log2() > 1.8 && e[2] < 2e-3, "{e:?}");
    }

    #[test]
    fn laplacian_is_second_order_on_bubble() {
        let d = dims();
        let mut errs = vec![];
        let mut spec = GridSpec::around(&[0.0], 4.0, 3.0);
        for _ in 0..3 {
            let g = Arc::new(spec.build(&d).unwrap());
            let u = Field::sample(g.clone(), |y1, r| bubble::radial(&d, 4.0, (y1 * y1 + r * r).sqrt()));
            let lap = g.apply_laplacian(u.values());
            let mut e: f64 = 0.0;
            for (j, y1, r) in g.nodes() {
                let i = j / g.nr();
                let k = j % g.nr();
                if g.is_boundary(i, k) {
                    continue;
                }
                let ex = bubble::radial_laplacian(&d, 4.0, (y1 * y1 + r * r).sqrt());
                e = e.max((lap[j] - ex).abs());
            }
            errs.push(e);
            spec = spec.refined();
        }
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 1.8, "{errs:?}");
    }

    #[test]
    fn binary_round_trip() {
        let g = Arc::new(GridSpec::periodic(&[0.0, 5.0], 10.0, 2.0, 3.0).build(&dims()).unwrap());
        let f = Field::sample(g, |y1, r| y1.sin() + r);
        let mut buf = vec![];
        f.write_binary(&mut buf).unwrap();
        let back = Field::read_binary(buf.as_slice()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn periodic_interpolation_wraps() {
        let g = Arc::new(GridSpec::periodic(&[0.0], 4.0, 1.0, 2.0).build(&dims()).unwrap());
        let f = Field::sample(g, |y1, _| (y1 * std::f64::consts::PI / 2.0).cos());
        let a = f.interpolate(0.3, 0.5).unwrap();
        let b = f.interpolate(4.3, 0.5).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(f.interpolate(0.0, 5.0).is_err());
    }
}
