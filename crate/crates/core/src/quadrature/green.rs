//! Newtonian potential (−Δ)^{−1} f = C_N ∫|y−z|^{2−N} f(z) dz of axisymmetric fields.
//!
//! The transverse sphere is integrated out into a ring kernel K(y₁−z₁, r, ρ);
//! the remaining (z₁, ρ) integral runs cell by cell over the tensor cubic
//! Lagrange interpolant of f. Cells within two of the target are split three times
//! (8×8 sub-cells) and the sub-cell holding the target is integrated in
//! polar (Duffy) coordinates centred on it, which absorbs the logarithmic
//! singularity of K.

use std::num::NonZeroUsize;
use std::sync::{Arc, OnceLock};

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use super::{half_line, Estimate, QuadratureSpec};
use crate::dims::{unit_sphere_area, DimensionParams};
use crate::error::{Error, Result};
use crate::grid::{AxiGrid, Field};

fn rule(n: usize) -> &'static [(f64, f64)] {
    static R4: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R8: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R16: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let cell = match n {
        4 => &R4,
        8 => &R8,
        16 => &R16,
        _ => unreachable!("unsupported rule size"),
    };
    cell.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(n).unwrap())
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x, w))
            .collect()
    })
}

fn gl<F: FnMut(f64) -> f64>(n: usize, a: f64, b: f64, mut f: F) -> f64 {
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    rule(n).iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// ∫_{S^{N−2}} |y − z|^{2−N} dσ for y = (y₁, r e), z = (z₁, ρ ω), as a function of
/// dy = y₁ − z₁, r and ρ.
pub fn ring_kernel(dims: &DimensionParams, dy: f64, r: f64, rho: f64) -> f64 {
    let n = dims.n;
    let m = (dims.nf() - 2.0) / 2.0;
    let b = 2.0 * r * rho;
    let c = dy * dy + (r - rho) * (r - rho);
    if b <= 1e-14 * (c + b) {
        return dims.transverse_area() * c.powf(-m);
    }
    let e = (n - 3) as i32;
    // a − b cos φ = c + 2b sin²(φ/2), no cancellation near the ring
    let g = |phi: f64| {
        let s = (0.5 * phi).sin();
        (c + 2.0 * b * s * s).powf(-m) * phi.sin().powi(e)
    };
    let pi = std::f64::consts::PI;
    let w = (c / b).sqrt().max(1e-14);
    let mut total = 0.0;
    if w >= 0.5 {
        total += gl(16, 0.0, 0.5 * pi, g) + gl(16, 0.5 * pi, pi, g);
    } else {
        let mut lo = 0.0;
        let mut hi = w;
        while hi < pi {
            total += gl(8, lo, hi, g);
            lo = hi;
            hi *= 2.0;
        }
        total += gl(8, lo, pi, g);
    }
    unit_sphere_area(n - 3) * total
}

/// ∫_{R^N} |y − z|^{2−N} f(|z|) dz at |y| = r by Newton's theorem:
/// ω_{N−1} ∫_0^∞ s^{N−1} f(s) max(r, s)^{2−N} ds.
pub fn newton_potential_radial<F: Fn(f64) -> f64>(f: F, dims: &DimensionParams, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let nf = dims.nf();
    let g = |s: f64| if s <= 0.0 { 0.0 } else { s.powf(nf - 1.0) * f(s) * s.max(r).powf(2.0 - nf) };
    let scale = if r > 0.0 { r.min(1.0) } else { 1.0 };
    Ok(half_line(&g, scale, spec, &[r])?.scale(dims.sphere_area))
}

/// Source cell with the 4×4 node stencil of its tensor cubic interpolant.
struct Cell {
    z0: f64,
    z1: f64,
    r0: f64,
    r1: f64,
    zs: [f64; 4],
    rs: [f64; 4],
    f: [[f64; 4]; 4],
}

fn lagrange(nodes: &[f64; 4], x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for j in 0..4 {
        for m in 0..4 {
            if m != j {
                w[j] *= (x - nodes[m]) / (nodes[j] - nodes[m]);
            }
        }
    }
    w
}

impl Cell {
    fn value(&self, z: f64, rho: f64) -> f64 {
        let wz = lagrange(&self.zs, z);
        let wr = lagrange(&self.rs, rho);
        let mut s = 0.0;
        for a in 0..4 {
            let row: f64 = (0..4).map(|b| wr[b] * self.f[a][b]).sum();
            s += wz[a] * row;
        }
        s
    }
}

fn rect(dims: &DimensionParams, c: &Cell, za: f64, zb: f64, ra: f64, rb: f64, yt: f64, rt: f64, n: usize) -> f64 {
    let e = (dims.n - 2) as i32;
    gl(n, za, zb, |z| gl(n, ra, rb, |rho| c.value(z, rho) * rho.powi(e) * ring_kernel(dims, yt - z, rt, rho)))
}

fn duffy(dims: &DimensionParams, c: &Cell, za: f64, zb: f64, ra: f64, rb: f64, yt: f64, rt: f64) -> f64 {
    let e = (dims.n - 2) as i32;
    let corners = [(za, ra), (zb, ra), (zb, rb), (za, rb)];
    let mut total = 0.0;
    for k in 0..4 {
        let (ax, ay) = corners[k];
        let (bx, by) = corners[(k + 1) % 4];
        let (pax, pay) = (ax - yt, ay - rt);
        let (abx, aby) = (bx - ax, by - ay);
        let det = (pax * aby - pay * abx).abs();
        if det < 1e-300 {
            continue;
        }
        total += det
            * gl(8, 0.0, 1.0, |u| {
                u * gl(8, 0.0, 1.0, |v| {
                    let z = yt + u * (pax + v * abx);
                    let rho = rt + u * (pay + v * aby);
                    c.value(z, rho) * rho.powi(e) * ring_kernel(dims, yt - z, rt, rho)
                })
            });
    }
    total
}

fn cells(f: &Field) -> Vec<(usize, usize, Cell)> {
    let g = f.grid();
    let v = f.values();
    let (n1, nr) = (g.n1(), g.nr());
    let period = g.period();
    let ncol = if period.is_some() { n1 } else { n1 - 1 };
    // axial stencil: index and coordinate offset (periodic images shift by ±p)
    let axial = |i: i64| -> (usize, f64) {
        match period {
            Some(p) => {
                let n = n1 as i64;
                let w = i.rem_euclid(n);
                (w as usize, g.y1[w as usize] + p * ((i - w) / n) as f64)
            }
            None => (i as usize, g.y1[i as usize]),
        }
    };
    let mut out = Vec::new();
    for i in 0..ncol {
        let first = match period {
            Some(_) => i as i64 - 1,
            None => (i as i64 - 1).clamp(0, n1 as i64 - 4),
        };
        let zcols: Vec<(usize, f64)> = (0..4).map(|a| axial(first + a)).collect();
        let z1 = axial(i as i64 + 1).1;
        for k in 0..nr - 1 {
            // radial stencil: the axis node is mirrored as r → −r with equal value
            let kf = (k as i64 - 1).min(nr as i64 - 4);
            let rows: Vec<(usize, f64)> = (0..4)
                .map(|b| {
                    let kk = kf + b;
                    if kk < 0 {
                        (1, -g.r[1])
                    } else {
                        (kk as usize, g.r[kk as usize])
                    }
                })
                .collect();
            let mut vals = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    vals[a][b] = v[g.idx(zcols[a].0, rows[b].0)];
                }
            }
            if vals.iter().flatten().all(|&x| x == 0.0) {
                continue;
            }
            out.push((
                i,
                k,
                Cell {
                    z0: g.y1[i],
                    z1,
                    r0: g.r[k],
                    r1: g.r[k + 1],
                    zs: [zcols[0].1, zcols[1].1, zcols[2].1, zcols[3].1],
                    rs: [rows[0].1, rows[1].1, rows[2].1, rows[3].1],
                    f: vals,
                },
            ));
        }
    }
    out
}

fn convolve_one(dims: &DimensionParams, g: &AxiGrid, cells: &[(usize, usize, Cell)], yt: f64, rt: f64) -> f64 {
    let it = AxiGrid::locate(&g.y1, yt) as i64;
    let kt = AxiGrid::locate(&g.r, rt) as i64;
    let mut total = 0.0;
    for (i, k, c) in cells {
        let near = (*i as i64 - it).abs() <= 2 && (*k as i64 - kt).abs() <= 2;
        if !near {
            total += rect(dims, c, c.z0, c.z1, c.r0, c.r1, yt, rt, 4);
            continue;
        }
        const SUB: usize = 8;
        let hz = (c.z1 - c.z0) / SUB as f64;
        let hr = (c.r1 - c.r0) / SUB as f64;
        for a in 0..SUB {
            let (za, zb) = (c.z0 + a as f64 * hz, c.z0 + (a + 1) as f64 * hz);
            for b in 0..SUB {
                let (ra, rb) = (c.r0 + b as f64 * hr, c.r0 + (b + 1) as f64 * hr);
                let tol = 1e-12 * (hz + hr);
                let holds = yt >= za - tol && yt <= zb + tol && rt >= ra - tol && rt <= rb + tol;
                total += if holds {
                    duffy(dims, c, za, zb, ra, rb, yt, rt)
                } else {
                    rect(dims, c, za, zb, ra, rb, yt, rt, 4)
                };
            }
        }
    }
    dims.green_const * total
}

/// (−Δ)^{−1} f at the target points (y₁, r), with f taken as zero outside the grid.
pub fn green_convolve(f: &Field, targets: &[(f64, f64)]) -> Result<Vec<f64>> {
    let g = f.grid().clone();
    for &(y, r) in targets {
        if !g.covers(y, r) {
            return Err(Error::OutsideCoverage(format!("Green target ({y}, {r})")));
        }
    }
    let cs = cells(f);
    let dims = g.dims;
    Ok(targets
        .par_iter()
        .map(|&(y, r)| {
            let y = match g.period() {
                Some(p) => g.y1[0] + (y - g.y1[0]).rem_euclid(p),
                None => y,
            };
            convolve_one(&dims, &g, &cs, y, r.abs())
        })
        .collect())
}

/// (−Δ)^{−1} f at every node of `target`.
pub fn green_convolve_field(f: &Field, target: Arc<AxiGrid>) -> Result<Field> {
    let pts: Vec<(f64, f64)> = target.nodes().map(|(_, y, r)| (y, r)).collect();
    let vals = green_convolve(f, &pts)?;
    Field::new(target, vals)
}
