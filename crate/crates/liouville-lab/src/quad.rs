//! Singular quadrature: corrected cell weights for the boundary weight
//! `|y - x0|^(-2a)` and a matrix-free Green operator with near-field cell
//! refinement.
//!
//! Plain node-centered midpoint quadrature is second-order accurate for
//! smooth integrands but loses accuracy wherever the integrand varies on a
//! scale comparable to the cell. Both difficulties here are local — the
//! weight blows up at `x0`, the Green kernel at the target point — so every
//! cell whose distance to the critical point is below a fixed multiple of
//! its diameter is integrated by recursive quadrisection instead. The
//! recursion splits a cell at its node, so the critical point never
//! coincides with a deeper node and all leaf evaluations stay finite.

use crate::disk::{green_val, newton_kernel, smooth_kernel, CellBounds, DiskMesh, P2};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("field length {got} does not match mesh size {want}")]
    LengthMismatch { want: usize, got: usize },
    #[error("non-finite value in integrand at node {0}")]
    NonFinite(usize),
    #[error("weight evaluated at the singular point")]
    SingularPoint,
    #[error("alpha must lie in the open interval (0, 1/2)")]
    BadAlpha,
}

/// Cells closer to the critical point than this multiple of their diameter
/// are integrated by recursive refinement.
const NEAR_FACTOR: f64 = 3.0;
const GREEN_DEPTH: u32 = 7;
const WEIGHT_DEPTH: u32 = 14;

/// Pointwise weight `|y - x0|^(-2a)`; rejects the singular point itself.
pub fn weight_eval(y: P2, x0: P2, alpha: f64) -> Result<f64, QuadError> {
    let t = (y - x0).norm();
    if t == 0.0 {
        return Err(QuadError::SingularPoint);
    }
    Ok(t.powf(-2.0 * alpha))
}

/// Recursive cell integral of the Green kernel `y -> G(x, y)`.
///
/// Leaf rule: stop when the node is at least `NEAR_FACTOR` diameters from
/// `x` or the depth budget is spent. A leaf whose node coincides with `x`
/// (only possible at depth 0, i.e. the diagonal entry before any split) is
/// replaced by the equal-area disk around `x`, for which the logarithmic
/// part integrates in closed form.
fn green_cell_integral(x: P2, cell: CellBounds, depth_left: u32) -> f64 {
    let a = cell.area();
    if a == 0.0 {
        return 0.0;
    }
    let node = cell.node();
    let d = (x - node).norm();
    if depth_left == 0 || d >= NEAR_FACTOR * cell.diam() {
        if d == 0.0 {
            let r_eq = (a / std::f64::consts::PI).sqrt();
            return r_eq * r_eq * (1.0 - 2.0 * r_eq.ln()) / 4.0 + a * smooth_kernel(x, x);
        }
        return green_val(x, node) * a;
    }
    cell.quadrisect()
        .iter()
        .map(|ch| green_cell_integral(x, *ch, depth_left - 1))
        .sum()
}

/// Same recursion for a single kernel half (used by the potential split).
fn kernel_cell_integral(
    x: P2,
    cell: CellBounds,
    depth_left: u32,
    kern: &dyn Fn(P2, P2) -> f64,
    diag: &dyn Fn(P2, f64) -> f64,
) -> f64 {
    let a = cell.area();
    if a == 0.0 {
        return 0.0;
    }
    let node = cell.node();
    let d = (x - node).norm();
    if depth_left == 0 || d >= NEAR_FACTOR * cell.diam() {
        if d == 0.0 {
            return diag(x, a);
        }
        return kern(x, node) * a;
    }
    cell.quadrisect()
        .iter()
        .map(|ch| kernel_cell_integral(x, *ch, depth_left - 1, kern, diag))
        .sum()
}

/// Recursive cell integral of the weight `|y - x0|^(-2a)`.
fn weight_cell_integral(x0: P2, alpha: f64, cell: CellBounds, depth_left: u32) -> f64 {
    let a = cell.area();
    if a == 0.0 {
        return 0.0;
    }
    let node = cell.node();
    let d = (x0 - node).norm();
    if depth_left == 0 || d >= NEAR_FACTOR * cell.diam() {
        if d == 0.0 {
            let r_eq = (a / std::f64::consts::PI).sqrt();
            return a * r_eq.powf(-2.0 * alpha) / (1.0 - alpha);
        }
        return d.powf(-2.0 * alpha) * a;
    }
    cell.quadrisect()
        .iter()
        .map(|ch| weight_cell_integral(x0, alpha, *ch, depth_left - 1))
        .sum()
}

/// Nodal weight values together with singularity-corrected cell weights.
///
/// `corrected_cell_weight[j]` approximates the exact cell integral
/// `∫_cell |y - x0|^(-2a) dy`; away from `x0` this is the midpoint value
/// `w(node) * area`, near `x0` the refined integral. Weighted sums against
/// these cell weights converge for every exponent in `(0, 1/2)` even though
/// the nodal values blow up near `x0`.
pub struct WeightField {
    pub values: Vec<f64>,
    pub corrected_cell_weight: Vec<f64>,
    pub x0: P2,
    pub alpha: f64,
}

impl WeightField {
    /// Weight field for the mesh's own singularity configuration.
    pub fn new(mesh: &DiskMesh) -> Result<Self, QuadError> {
        Self::with(mesh, mesh.x0, mesh.alpha)
    }

    /// Weight field with an explicit pole and exponent.
    pub fn with(mesh: &DiskMesh, x0: P2, alpha: f64) -> Result<Self, QuadError> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 0.5 {
            return Err(QuadError::BadAlpha);
        }
        let mut values = Vec::with_capacity(mesh.len());
        for &p in &mesh.nodes {
            values.push(weight_eval(p, x0, alpha)?);
        }
        let corrected: Vec<f64> = mesh
            .cells
            .par_iter()
            .map(|cell| {
                let a = cell.area();
                if a == 0.0 {
                    return 0.0;
                }
                let node = cell.node();
                if (x0 - node).norm() < NEAR_FACTOR * cell.diam() {
                    weight_cell_integral(x0, alpha, *cell, WEIGHT_DEPTH)
                } else {
                    (x0 - node).norm().powf(-2.0 * alpha) * a
                }
            })
            .collect();
        Ok(Self { values, corrected_cell_weight: corrected, x0, alpha })
    }

    /// Trivial weight (w == 1): corrected weights reduce to plain cell areas.
    pub fn unweighted(mesh: &DiskMesh) -> Self {
        Self {
            values: vec![1.0; mesh.len()],
            corrected_cell_weight: mesh.cell_area.clone(),
            x0: mesh.x0,
            alpha: 0.0,
        }
    }
}

/// Weighted integral `∫ f(y) |y - x0|^(-2a) dy` by corrected midpoint sums.
pub fn integrate_weighted(f: &[f64], w: &WeightField) -> Result<f64, QuadError> {
    if f.len() != w.corrected_cell_weight.len() {
        return Err(QuadError::LengthMismatch { want: w.corrected_cell_weight.len(), got: f.len() });
    }
    for (i, v) in f.iter().enumerate() {
        if !v.is_finite() {
            return Err(QuadError::NonFinite(i));
        }
    }
    Ok(f.iter().zip(&w.corrected_cell_weight).map(|(v, cw)| v * cw).sum())
}

/// Matrix-free discrete Green operator `(K rho)_i = ∫ G(x_i, y) rho(y) dy`.
///
/// Far pairs use plain midpoint terms `G(x_i, x_j) a_j`; pairs within the
/// near-field rule carry precomputed corrections, stored as deltas against
/// the plain term so the hot loop stays branch-free. Rows at boundary nodes
/// are identically zero — the kernel vanishes there, so the represented
/// field satisfies the Dirichlet condition exactly.
pub struct GreenOperator {
    nodes: Vec<P2>,
    areas: Vec<f64>,
    boundary: Vec<bool>,
    cells: Vec<CellBounds>,
    diag: Vec<f64>,
    near_offsets: Vec<u32>,
    near_cols: Vec<u32>,
    near_delta: Vec<f64>,
}

struct RingInfo {
    r: f64,
    diam: f64,
}

/// Candidate source cells that could satisfy the near-field rule for a
/// target at `x`. On a structured mesh this scans rings whose radial band
/// can reach `x`; otherwise it degenerates to all cells. Candidates are a
/// superset; the exact distance test runs afterwards.
fn near_candidates(mesh: &DiskMesh, x: P2, out: &mut Vec<usize>, rings: &[RingInfo]) {
    out.clear();
    if mesh.is_structured() {
        let n_t = mesh.n_t;
        let dt = 2.0 * std::f64::consts::PI / n_t as f64;
        let rx = x.norm();
        let ang = x.y.atan2(x.x).rem_euclid(2.0 * std::f64::consts::PI);
        for (ir, info) in rings.iter().enumerate() {
            // Ring nodes sit exactly at radius info.r, so d >= |rx - r| and
            // d^2 = (rx - r)^2 + 4 rx r sin^2(dtheta/2): the angular window
            // comes from the chord, not the arc (rings near the origin curl
            // back within reach of each other at any angle).
            let reach = NEAR_FACTOR * info.diam;
            let gap2 = (rx - info.r) * (rx - info.r);
            if gap2 >= reach * reach {
                continue;
            }
            let denom = 4.0 * rx * info.r;
            let m = if denom <= 1e-24 {
                n_t
            } else {
                let s2 = (reach * reach - gap2) / denom;
                if s2 >= 1.0 {
                    n_t
                } else {
                    (2.0 * s2.sqrt().asin() / dt).ceil() as usize + 2
                }
            };
            if 2 * m + 1 >= n_t {
                for j in 0..n_t {
                    out.push(ir * n_t + j);
                }
            } else {
                let jc = (ang / dt).floor() as isize;
                for off in -(m as isize)..=(m as isize) {
                    let j = (jc + off).rem_euclid(n_t as isize) as usize;
                    out.push(ir * n_t + j);
                }
            }
        }
    } else {
        out.extend(0..mesh.len());
    }
}

impl GreenOperator {
    pub fn new(mesh: &DiskMesh) -> Self {
        let rings: Vec<RingInfo> = if mesh.is_structured() {
            let dt = 2.0 * std::f64::consts::PI / mesh.n_t as f64;
            (0..mesh.n_r)
                .map(|i| {
                    let c = mesh.cells[mesh.idx(i, 0)];
                    let r = 0.5 * (c.r0 + c.r1);
                    RingInfo { r, diam: ((c.r1 - c.r0).powi(2) + (r * dt).powi(2)).sqrt() }
                })
                .collect()
        } else {
            Vec::new()
        };

        let rows: Vec<(f64, Vec<(u32, f64)>)> = (0..mesh.len())
            .into_par_iter()
            .map(|i| {
                if mesh.boundary[i] {
                    return (0.0, Vec::new());
                }
                let x = mesh.nodes[i];
                let diag = green_cell_integral(x, mesh.cells[i], GREEN_DEPTH);
                let mut cand = Vec::new();
                near_candidates(mesh, x, &mut cand, &rings);
                let mut near = Vec::new();
                for j in cand {
                    if j == i || mesh.cell_area[j] == 0.0 {
                        continue;
                    }
                    let cell = mesh.cells[j];
                    let d = (x - mesh.nodes[j]).norm();
                    if d < NEAR_FACTOR * cell.diam() {
                        let exact = green_cell_integral(x, cell, GREEN_DEPTH);
                        let plain = green_val(x, mesh.nodes[j]) * mesh.cell_area[j];
                        near.push((j as u32, exact - plain));
                    }
                }
                near.sort_unstable_by_key(|&(j, _)| j);
                (diag, near)
            })
            .collect();

        let mut diag = Vec::with_capacity(mesh.len());
        let mut near_offsets = Vec::with_capacity(mesh.len() + 1);
        let mut near_cols = Vec::new();
        let mut near_delta = Vec::new();
        near_offsets.push(0u32);
        for (d, near) in rows {
            diag.push(d);
            for (j, delta) in near {
                near_cols.push(j);
                near_delta.push(delta);
            }
            near_offsets.push(near_cols.len() as u32);
        }

        Self {
            nodes: mesh.nodes.clone(),
            areas: mesh.cell_area.clone(),
            boundary: mesh.boundary.clone(),
            cells: mesh.cells.clone(),
            diag,
            near_offsets,
            near_cols,
            near_delta,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the operator to a nodal density. Rows are computed in
    /// parallel but each row is a fixed-order sequential sum, so the result
    /// does not depend on the thread count.
    pub fn apply(&self, rho: &[f64]) -> Result<Vec<f64>, QuadError> {
        if rho.len() != self.nodes.len() {
            return Err(QuadError::LengthMismatch { want: self.nodes.len(), got: rho.len() });
        }
        let out: Vec<f64> = (0..self.nodes.len())
            .into_par_iter()
            .map(|i| {
                if self.boundary[i] {
                    return 0.0;
                }
                let x = self.nodes[i];
                let mut s = 0.0;
                for j in 0..self.nodes.len() {
                    if j == i || self.areas[j] == 0.0 {
                        continue;
                    }
                    s += green_val(x, self.nodes[j]) * self.areas[j] * rho[j];
                }
                let lo = self.near_offsets[i] as usize;
                let hi = self.near_offsets[i + 1] as usize;
                for k in lo..hi {
                    s += self.near_delta[k] * rho[self.near_cols[k] as usize];
                }
                s + self.diag[i] * rho[i]
            })
            .collect();
        Ok(out)
    }

    /// Evaluates the represented field at an arbitrary point of the disk
    /// (typically the origin, which is never a node).
    pub fn eval_at(&self, x: P2, rho: &[f64]) -> Result<f64, QuadError> {
        if rho.len() != self.nodes.len() {
            return Err(QuadError::LengthMismatch { want: self.nodes.len(), got: rho.len() });
        }
        let mut s = 0.0;
        for j in 0..self.nodes.len() {
            if self.areas[j] == 0.0 {
                continue;
            }
            let cell = self.cells[j];
            let d = (x - self.nodes[j]).norm();
            if d < NEAR_FACTOR * cell.diam() {
                s += green_cell_integral(x, cell, GREEN_DEPTH) * rho[j];
            } else {
                s += green_val(x, self.nodes[j]) * self.areas[j] * rho[j];
            }
        }
        Ok(s)
    }

    /// Dense column-major matrix of the operator, for Newton solves.
    pub fn to_dense(&self) -> crate::linalg::ColMajor {
        let n = self.nodes.len();
        let mut m = crate::linalg::ColMajor::zeros(n);
        {
            let data = &mut m.data;
            let chunks: Vec<(usize, Vec<f64>)> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let mut col = vec![0.0; n];
                    if self.areas[j] > 0.0 {
                        for i in 0..n {
                            if i == j || self.boundary[i] {
                                continue;
                            }
                            col[i] = green_val(self.nodes[i], self.nodes[j]) * self.areas[j];
                        }
                    }
                    (j, col)
                })
                .collect();
            for (j, col) in chunks {
                data[j * n..(j + 1) * n].copy_from_slice(&col);
            }
            for i in 0..n {
                let lo = self.near_offsets[i] as usize;
                let hi = self.near_offsets[i + 1] as usize;
                for k in lo..hi {
                    let j = self.near_cols[k] as usize;
                    data[j * n + i] += self.near_delta[k];
                }
                data[i * n + i] = self.diag[i];
            }
        }
        m
    }
}

/// Green potential of a nodal density (builds a fresh operator; hold a
/// `GreenOperator` for repeated applications).
pub fn green_apply(mesh: &DiskMesh, rho: &[f64]) -> Result<Vec<f64>, QuadError> {
    GreenOperator::new(mesh).apply(rho)
}

/// Splits the Green potential into the free-space logarithmic part
/// `v1 = -(1/2п) ∫ ln|x-y| rho dy` and the harmonic remainder `v2`.
/// The two halves use one near-field decomposition, so `v1 + v2` matches
/// the unsplit potential to rounding, and their sum vanishes on the
/// boundary circle where the kernels cancel exactly.
pub fn newtonian_potential_split(mesh: &DiskMesh, rho: &[f64]) -> Result<(Vec<f64>, Vec<f64>), QuadError> {
    if rho.len() != mesh.len() {
        return Err(QuadError::LengthMismatch { want: mesh.len(), got: rho.len() });
    }
    let newton_diag = |x: P2, a: f64| {
        let r_eq = (a / std::f64::consts::PI).sqrt();
        let _ = x;
        r_eq * r_eq * (1.0 - 2.0 * r_eq.ln()) / 4.0
    };
    let smooth_diag = |x: P2, a: f64| a * smooth_kernel(x, x);

    let pairs: Vec<(f64, f64)> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let x = mesh.nodes[i];
            let mut v1 = 0.0;
            let mut v2 = 0.0;
            for j in 0..mesh.len() {
                if mesh.cell_area[j] == 0.0 {
                    continue;
                }
                let cell = mesh.cells[j];
                let d = (x - mesh.nodes[j]).norm();
                if d < NEAR_FACTOR * cell.diam() {
                    v1 += kernel_cell_integral(x, cell, GREEN_DEPTH, &newton_kernel, &newton_diag) * rho[j];
                    v2 += kernel_cell_integral(x, cell, GREEN_DEPTH, &smooth_kernel, &smooth_diag) * rho[j];
                } else {
                    v1 += newton_kernel(x, mesh.nodes[j]) * mesh.cell_area[j] * rho[j];
                    v2 += smooth_kernel(x, mesh.nodes[j]) * mesh.cell_area[j] * rho[j];
                }
            }
            (v1, v2)
        })
        .collect();
    Ok(pairs.into_iter().unzip())
}
