//! Unit-disk and half-disk geometry, graded polar meshes, and the exact
//! Dirichlet Green function.
//!
//! Meshes are node-centered polar partitions: radial cell edges follow
//! `R_i = 1 - (1 - i/n_r)^g` so that `g > 1` concentrates resolution at the
//! boundary circle, where both the singular weight and the concentrating
//! solutions live. Every node carries the exact polar bounds of its cell, so
//! quadrature routines can refine individual cells without re-meshing.

use nalgebra::Vector2;
use serde::Serialize;
use thiserror::Error;

/// 2D point / vector type used throughout the crate.
pub type P2 = Vector2<f64>;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("green function evaluated at coincident points; use the cell quadrature for the diagonal")]
    CoincidentPoints,
    #[error("ball B(x, delta/2) is not contained in the unit disk")]
    BallNotInDisk,
    #[error("operation requires an unrefined structured mesh")]
    UnstructuredMesh,
}

/// Location and strength of the boundary singularity `|x - x0|^(-2a)`.
///
/// The exponent must stay strictly inside `(0, 1/2)`: the weight is then
/// integrable over the disk and the boundary corrections of the singular
/// quadrature vanish with refinement.
#[derive(Clone, Copy, Debug)]
pub struct SingularityConfig {
    pub x0_angle: f64,
    pub alpha: f64,
}

impl SingularityConfig {
    pub fn new(x0_angle: f64, alpha: f64) -> Result<Self, DiskError> {
        if !x0_angle.is_finite() {
            return Err(DiskError::InvalidParameter("x0_angle must be finite".into()));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 0.5 {
            return Err(DiskError::InvalidParameter(
                "alpha must lie in the open interval (0, 1/2)".into(),
            ));
        }
        Ok(Self { x0_angle, alpha })
    }

    /// Unit vector at the configured angle, renormalized to |x0| = 1.
    pub fn x0(&self) -> P2 {
        let v = P2::new(self.x0_angle.cos(), self.x0_angle.sin());
        v / v.norm()
    }
}

/// Polar extent of one quadrature cell. Boundary nodes carry degenerate
/// bounds with `r0 == r1 == 1` and zero area.
#[derive(Clone, Copy, Debug)]
pub struct CellBounds {
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl CellBounds {
    #[inline]
    pub fn area(&self) -> f64 {
        0.5 * (self.r1 * self.r1 - self.r0 * self.r0) * (self.t1 - self.t0)
    }

    /// Cell node: arithmetic center in (r, theta).
    #[inline]
    pub fn node(&self) -> P2 {
        let r = 0.5 * (self.r0 + self.r1);
        let t = 0.5 * (self.t0 + self.t1);
        P2::new(r * t.cos(), r * t.sin())
    }

    /// Diameter estimate used by near-field rules.
    #[inline]
    pub fn diam(&self) -> f64 {
        let dr = self.r1 - self.r0;
        let dt = 0.5 * (self.r0 + self.r1) * (self.t1 - self.t0);
        (dr * dr + dt * dt).sqrt()
    }

    /// Children splitting both polar extents at their midpoints. The parent
    /// node becomes a shared corner, never a child node, so recursive
    /// integrators can refine a cell around its own node.
    pub fn quadrisect(&self) -> [CellBounds; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            CellBounds { r0: self.r0, r1: rm, t0: self.t0, t1: tm },
            CellBounds { r0: self.r0, r1: rm, t0: tm, t1: self.t1 },
            CellBounds { r0: rm, r1: self.r1, t0: self.t0, t1: tm },
            CellBounds { r0: rm, r1: self.r1, t0: tm, t1: self.t1 },
        ]
    }
}

/// Local refinement request: cells whose node falls inside the ball are
/// quadrisected `levels` times.
#[derive(Clone, Copy, Debug)]
pub struct RefineRegion {
    pub center: P2,
    pub radius: f64,
    pub levels: u32,
}

/// Node-centered polar mesh of the closed unit disk.
///
/// Interior nodes sit at cell centers; one extra ring of zero-area nodes
/// lies exactly on the unit circle so solution fields carry their boundary
/// values explicitly. The singular point `x0` is snapped to the nearest
/// angular cell edge, which keeps it off every node while aligning the
/// radial grading lines with it.
pub struct DiskMesh {
    pub nodes: Vec<P2>,
    pub cell_area: Vec<f64>,
    pub boundary: Vec<bool>,
    pub cells: Vec<CellBounds>,
    pub n_r: usize,
    pub n_t: usize,
    pub grade_exponent: f64,
    /// Snapped singular point, |x0| = 1.
    pub x0: P2,
    pub alpha: f64,
    structured: bool,
}

/// Radial cell edges `R_i = 1 - (1 - i/n_r)^g`, finest at the boundary for g > 1.
fn radial_edges(n_r: usize, grade: f64) -> Vec<f64> {
    (0..=n_r)
        .map(|i| {
            let s = 1.0 - i as f64 / n_r as f64;
            1.0 - s.powf(grade)
        })
        .collect()
}

impl DiskMesh {
    pub fn build(
        n_r: usize,
        n_t: usize,
        grade_exponent: f64,
        refine: &[RefineRegion],
        cfg: &SingularityConfig,
    ) -> Result<Self, DiskError> {
        if n_r < 8 || n_t < 8 {
            return Err(DiskError::InvalidParameter("n_r and n_t must both be at least 8".into()));
        }
        if !grade_exponent.is_finite() || grade_exponent < 1.0 {
            return Err(DiskError::InvalidParameter("grade_exponent must be >= 1".into()));
        }
        for reg in refine {
            if !reg.radius.is_finite() || reg.radius <= 0.0 || !reg.center.x.is_finite() || !reg.center.y.is_finite() {
                return Err(DiskError::InvalidParameter("refine region must have finite center and positive radius".into()));
            }
            if reg.levels == 0 {
                return Err(DiskError::InvalidParameter("refine levels must be >= 1".into()));
            }
        }

        let edges = radial_edges(n_r, grade_exponent);
        let dt = 2.0 * std::f64::consts::PI / n_t as f64;

        // Snap x0 to the nearest angular cell edge so that no node shares its
        // angle; nodes sit at half-offsets.
        let k = (cfg.x0_angle / dt).round().rem_euclid(n_t as f64);
        let theta0 = k * dt;
        let x0_raw = P2::new(theta0.cos(), theta0.sin());
        let x0 = x0_raw / x0_raw.norm();

        let mut cells = Vec::with_capacity((n_r + 1) * n_t);
        for i in 0..n_r {
            for j in 0..n_t {
                cells.push(CellBounds {
                    r0: edges[i],
                    r1: edges[i + 1],
                    t0: j as f64 * dt,
                    t1: (j + 1) as f64 * dt,
                });
            }
        }
        // Boundary ring: degenerate cells on the unit circle.
        for j in 0..n_t {
            cells.push(CellBounds { r0: 1.0, r1: 1.0, t0: j as f64 * dt, t1: (j + 1) as f64 * dt });
        }

        let mut mesh = Self {
            nodes: Vec::new(),
            cell_area: Vec::new(),
            boundary: Vec::new(),
            cells,
            n_r,
            n_t,
            grade_exponent,
            x0,
            alpha: cfg.alpha,
            structured: true,
        };
        mesh.rebuild_node_arrays();

        for reg in refine {
            for _ in 0..reg.levels {
                mesh.refine_pass(reg);
            }
        }
        Ok(mesh)
    }

    fn rebuild_node_arrays(&mut self) {
        self.nodes = self.cells.iter().map(|c| c.node()).collect();
        self.cell_area = self.cells.iter().map(|c| c.area()).collect();
        self.boundary = self.cells.iter().map(|c| c.r0 >= 1.0).collect();
        // Boundary nodes must have |x| = 1 exactly up to rounding.
        for (node, &b) in self.nodes.iter_mut().zip(&self.boundary) {
            if b {
                let n = node.norm();
                *node /= n;
            }
        }
    }

    fn refine_pass(&mut self, reg: &RefineRegion) {
        let mut out = Vec::with_capacity(self.cells.len());
        let mut split_any = false;
        for cell in &self.cells {
            let inside = (cell.node() - reg.center).norm() <= reg.radius;
            if inside && cell.area() > 0.0 {
                out.extend_from_slice(&cell.quadrisect());
                split_any = true;
            } else {
                out.push(*cell);
            }
        }
        if split_any {
            self.structured = false;
            self.cells = out;
            self.rebuild_node_arrays();
        }
    }

    /// True while the (i, j) ring/angle indexing is intact (no local refinement).
    pub fn is_structured(&self) -> bool {
        self.structured
    }

    /// Flat index of ring `i` (0..=n_r, where i == n_r is the boundary ring)
    /// and angular cell `j`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.structured);
        i * self.n_t + j
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_area.iter().sum()
    }

    /// Distance from a node to the boundary circle.
    pub fn boundary_distance(&self, x: P2) -> f64 {
        1.0 - x.norm()
    }

    /// Writes `(idx, x1, x2, area, is_boundary)` rows for debugging.
    pub fn to_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "idx,x1,x2,area,is_boundary")?;
        for (i, node) in self.nodes.iter().enumerate() {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{}",
                i, node.x, node.y, self.cell_area[i], self.boundary[i] as u8
            )?;
        }
        Ok(())
    }
}

#[inline]
fn cross2(x: P2, y: P2) -> f64 {
    x.x * y.y - x.y * y.x
}

/// Value form of the Green kernel, assuming `x != y`.
///
/// `G(x, y) = (1/4п) * ln( ((1 - <x,y>)^2 + (x ^ y)^2) / |x - y|^2 )`, which
/// is the complex-notation kernel `ln(|1 - conj(x) y| / |x - y|) / 2п`
/// rewritten with a dot and a cross product. Both quadratic forms are
/// symmetric in (x, y) at the floating-point level, so `green(x, y)` and
/// `green(y, x)` agree to the last bit.
#[inline]
pub fn green_val(x: P2, y: P2) -> f64 {
    let dot = x.dot(&y);
    let cross = cross2(x, y);
    let num2 = (1.0 - dot) * (1.0 - dot) + cross * cross;
    let den2 = (x - y).norm_squared();
    0.25 / std::f64::consts::PI * (num2 / den2).ln()
}

/// Dirichlet Green function of the unit disk.
///
/// Positive for interior pairs, zero when either point reaches the circle,
/// and an error on coincident points — the logarithmic diagonal must go
/// through the cell quadrature instead.
pub fn green(x: P2, y: P2) -> Result<f64, DiskError> {
    if (x - y).norm_squared() == 0.0 {
        return Err(DiskError::CoincidentPoints);
    }
    Ok(green_val(x, y))
}

/// Newtonian half of the kernel: `-(1/2п) ln |x - y|`.
#[inline]
pub fn newton_kernel(x: P2, y: P2) -> f64 {
    -0.25 / std::f64::consts::PI * (x - y).norm_squared().ln()
}

/// Harmonic remainder: `(1/2п) ln |1 - conj(x) y|`, smooth for interior x.
#[inline]
pub fn smooth_kernel(x: P2, y: P2) -> f64 {
    let dot = x.dot(&y);
    let cross = cross2(x, y);
    0.25 / std::f64::consts::PI * ((1.0 - dot) * (1.0 - dot) + cross * cross).ln()
}

/// 12-point Gauss-Legendre nodes/weights on [0, 1].
pub(crate) const GL12: [(f64, f64); 12] = [
    (0.009219682876640378, 0.023587668193255914),
    (0.047941371814762571, 0.053469662997659215),
    (0.115048662902847656, 0.080039164271673113),
    (0.206341022856691276, 0.101583713361532960),
    (0.316084250500909903, 0.116746268269177404),
    (0.437383295744265542, 0.124573522906701393),
    (0.562616704255734458, 0.124573522906701393),
    (0.683915749499090097, 0.116746268269177404),
    (0.793658977143308724, 0.101583713361532960),
    (0.884951337097152344, 0.080039164271673113),
    (0.952058628185237429, 0.053469662997659215),
    (0.990780317123359622, 0.023587668193255914),
];

/// Mass of the Green function over a small ball around its pole:
/// `∫_{B(xi, delta/2)} G(xi, y) dy`.
///
/// The logarithmic factor is integrated exactly in the radial direction
/// (`∫_0^R (-ln t) t dt = R^2 (1 - 2 ln R)/4`); the harmonic remainder is
/// smooth on the ball and handled by Gauss-Legendre in t and the trapezoid
/// rule in the angle, both spectrally accurate here.
pub fn green_small_ball_mass(xi: P2, delta: f64) -> Result<f64, DiskError> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(DiskError::InvalidParameter("delta must be positive".into()));
    }
    let radius = 0.5 * delta;
    if xi.norm() + radius > 1.0 + 1e-12 {
        return Err(DiskError::BallNotInDisk);
    }
    let log_part = radius * radius * (1.0 - 2.0 * radius.ln()) / 4.0;

    let n_theta = 64;
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut smooth_part = 0.0;
    for &(tq, wq) in GL12.iter() {
        let t = tq * radius;
        let mut ring = 0.0;
        for m in 0..n_theta {
            let th = m as f64 * dtheta;
            let y = P2::new(xi.x + t * th.cos(), xi.y + t * th.sin());
            ring += smooth_kernel(xi, y);
        }
        smooth_part += ring * dtheta * t * wq * radius;
    }
    Ok(log_part + smooth_part)
}

/// Boundary discretization of the half disk `B+ = {|x| <= 1, x1 >= 0}`.
///
/// The flat part lies on the x2-axis, where the outward normal is exactly
/// `(-1, 0)`; flat nodes are constructed with a literal zero first
/// coordinate so the `<x - p, nu>`-weighted integrals annihilate there at
/// machine precision.
#[derive(Debug)]
pub struct HalfDiskGeometry {
    pub flat_normal: P2,
    pub arc_nodes: Vec<P2>,
    pub arc_weights: Vec<f64>,
    pub flat_nodes: Vec<P2>,
    pub flat_weights: Vec<f64>,
}

/// Role of a node in the half-disk chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HalfNodeKind {
    Interior,
    Arc,
    Flat,
    Corner,
}

/// Structured mesh of the half disk, polar about the chart corner `x0 = 0`.
///
/// Columns 0 and `n_t + 1` hold the flat-boundary nodes at angles ∓п/2; row
/// `n_r` holds the arc. Interior cells partition the half disk (total area
/// п/2); boundary nodes carry zero area plus the arclength weights used by
/// the balance integrals.
pub struct HalfDiskMesh {
    pub nodes: Vec<P2>,
    pub cell_area: Vec<f64>,
    pub arc_weight: Vec<f64>,
    pub flat_weight: Vec<f64>,
    pub kind: Vec<HalfNodeKind>,
    pub n_r: usize,
    pub n_t: usize,
}

impl HalfDiskMesh {
    pub fn cols(&self) -> usize {
        self.n_t + 2
    }

    pub fn rows(&self) -> usize {
        self.n_r + 1
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.cols() + j
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_area.iter().sum()
    }
}

/// Builds the half-disk chart at the given resolution.
pub fn build_half_disk(n_r: usize, n_t: usize) -> Result<(HalfDiskGeometry, HalfDiskMesh), DiskError> {
    if n_r < 8 || n_t < 8 {
        return Err(DiskError::InvalidParameter("n_r and n_t must both be at least 8".into()));
    }
    let edges = radial_edges(n_r, 1.0);
    let dt = std::f64::consts::PI / n_t as f64;
    let cols = n_t + 2;
    let rows = n_r + 1;
    let mut nodes = vec![P2::zeros(); rows * cols];
    let mut area = vec![0.0; rows * cols];
    let mut arc_w = vec![0.0; rows * cols];
    let mut flat_w = vec![0.0; rows * cols];
    let mut kind = vec![HalfNodeKind::Interior; rows * cols];

    let theta = |j: usize| -> f64 { -0.5 * std::f64::consts::PI + (j as f64 - 0.5) * dt };

    for i in 0..rows {
        let (r, dr) = if i < n_r {
            (0.5 * (edges[i] + edges[i + 1]), edges[i + 1] - edges[i])
        } else {
            (1.0, 0.0)
        };
        for j in 0..cols {
            let id = i * cols + j;
            if j == 0 || j == cols - 1 {
                // Flat boundary column: first coordinate exactly zero.
                let sign = if j == 0 { -1.0 } else { 1.0 };
                nodes[id] = P2::new(0.0, sign * r);
                if i < n_r {
                    kind[id] = HalfNodeKind::Flat;
                    flat_w[id] = dr;
                } else {
                    kind[id] = HalfNodeKind::Corner;
                }
            } else if i == n_r {
                let t = theta(j);
                nodes[id] = P2::new(t.cos(), t.sin());
                kind[id] = HalfNodeKind::Arc;
                arc_w[id] = dt;
            } else {
                let t = theta(j);
                nodes[id] = P2::new(r * t.cos(), r * t.sin());
                area[id] = 0.5 * (edges[i + 1] * edges[i + 1] - edges[i] * edges[i]) * dt;
            }
        }
    }

    let mesh = HalfDiskMesh { nodes, cell_area: area, arc_weight: arc_w, flat_weight: flat_w, kind, n_r, n_t };

    let mut geom = HalfDiskGeometry {
        flat_normal: P2::new(-1.0, 0.0),
        arc_nodes: Vec::new(),
        arc_weights: Vec::new(),
        flat_nodes: Vec::new(),
        flat_weights: Vec::new(),
    };
    for id in 0..mesh.len() {
        match mesh.kind[id] {
            HalfNodeKind::Arc => {
                geom.arc_nodes.push(mesh.nodes[id]);
                geom.arc_weights.push(mesh.arc_weight[id]);
            }
            HalfNodeKind::Flat => {
                geom.flat_nodes.push(mesh.nodes[id]);
                geom.flat_weights.push(mesh.flat_weight[id]);
            }
            _ => {}
        }
    }
    Ok((geom, mesh))
}
