//! Synthetic concentration fields: bubbles, superpositions, and Green
//! projections used as exactly-known inputs for the extraction and
//! balance experiments.
//!
//! The bubble `U(x) = ln(8 m^2 / (1 + m^2 |x - c|^2)^2)` satisfies
//! `-ΔU = e^U` on the plane with total mass exactly 8п. Radial integrals of
//! `e^U` collapse under the substitution `T(s) = -4 / (1 + m^2 s^2)`, whose
//! differential is exactly `e^U s ds`; quadrature in `T` therefore resolves
//! the concentration scale automatically, for any m.
//!
//! For a ball concentric with the bubble the Dirichlet projection
//! `∫_B G(x, y) e^U 1_{B(c,R)} dy` is available in closed form (radial
//! Newtonian potential plus the harmonic extension `m_R ln|1 - conj(c) x|`),
//! so the "difference to the far-field re-solve" fields carry no quadrature
//! noise at all.

use crate::disk::{green_val, DiskMesh, P2};
use rayon::prelude::*;

/// Standard concentration profile with scale `mu` and center `c`.
#[derive(Clone, Copy, Debug)]
pub struct Bubble {
    pub mu: f64,
    pub center: P2,
}

impl Bubble {
    /// `U(x) = ln(8 mu^2) - 2 ln(1 + mu^2 |x - c|^2)`.
    pub fn log_density(&self, x: P2) -> f64 {
        let s2 = (x - self.center).norm_squared();
        (8.0 * self.mu * self.mu).ln() - 2.0 * (1.0 + self.mu * self.mu * s2).ln()
    }

    pub fn peak_value(&self) -> f64 {
        (8.0 * self.mu * self.mu).ln()
    }

    /// Radial mass function `m(s) = ∫_0^s e^U t dt = 4 mu^2 s^2 / (1 + mu^2 s^2)`;
    /// the 2D mass of the ball B(c, s) is `2п m(s)`, approaching 8п.
    pub fn radial_mass(&self, s: f64) -> f64 {
        let t = self.mu * self.mu * s * s;
        4.0 * t / (1.0 + t)
    }
}

/// Closed-form mass of `e^U` over the concentric ball B(c, R): `2п m(R)`.
pub fn ball_mass_exact(bubble: &Bubble, radius: f64) -> f64 {
    2.0 * std::f64::consts::PI * bubble.radial_mass(radius)
}

/// Interior/exterior split of the plane mass 8п when the bubble is
/// truncated to the disk; `radius` is the distance from the center to the
/// boundary circle.
#[derive(Clone, Copy, Debug)]
pub struct TailInfo {
    pub radius: f64,
    pub interior_mass: f64,
    pub exterior_mass: f64,
}

pub fn bubble_tail(bubble: &Bubble) -> TailInfo {
    let radius = 1.0 - bubble.center.norm();
    let interior = ball_mass_exact(bubble, radius);
    TailInfo {
        radius,
        interior_mass: interior,
        exterior_mass: 8.0 * std::f64::consts::PI - interior,
    }
}

/// Nodal evaluation of a single bubble.
pub fn bubble_field(mesh: &DiskMesh, bubble: &Bubble) -> Vec<f64> {
    mesh.nodes.iter().map(|&p| bubble.log_density(p)).collect()
}

/// Superposition `u = ln(Σ_k e^{U_k})` evaluated stably: the exact field
/// whose exponential is the sum of the bubble densities, so local masses
/// add exactly.
pub fn superposed_field(mesh: &DiskMesh, bubbles: &[Bubble]) -> Vec<f64> {
    mesh.nodes
        .iter()
        .map(|&p| {
            let vals: Vec<f64> = bubbles.iter().map(|b| b.log_density(p)).collect();
            let top = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            top + vals.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
        })
        .collect()
}

/// Positive abscissas and weights of 24-point Gauss-Legendre on [-1, 1].
const GL24_SYM: [(f64, f64); 12] = [
    (0.995187219997021311, 0.012341229799987091),
    (0.974728555971309474, 0.028531388628933743),
    (0.938274552002732798, 0.044277438817419551),
    (0.886415527004400960, 0.059298584915436742),
    (0.820001985973902947, 0.073346481411080411),
    (0.740124191578554358, 0.086190161531953288),
    (0.648093651936975546, 0.097618652104114065),
    (0.545421471388839563, 0.107444270115965607),
    (0.433793507626045127, 0.115505668053725613),
    (0.315042679696163397, 0.121670472927803419),
    (0.191118867473616311, 0.125837456346828303),
    (0.064056892862605630, 0.127938195346752215),
];

fn gl24_unit() -> [(f64, f64); 24] {
    let mut out = [(0.0, 0.0); 24];
    for (i, &(x, w)) in GL24_SYM.iter().enumerate() {
        out[2 * i] = (0.5 * (1.0 - x), 0.5 * w);
        out[2 * i + 1] = (0.5 * (1.0 + x), 0.5 * w);
    }
    out
}

/// Radial extent of the disk seen from an interior point `c` along the
/// direction `e`: the positive root of `|c + s e| = 1`.
fn disk_extent(c: P2, e: P2) -> f64 {
    let b = c.dot(&e);
    (-b) + (b * b + 1.0 - c.norm_squared()).sqrt()
}

/// `∫_{B(z, radius)} g(y) e^U dy` by the exact radial substitution.
///
/// Rays from the bubble center parameterize the ball; along each ray the
/// density integrates exactly in `T`, so for `g ≡ 1` the rule is exact for
/// every `mu` (no resolution requirement), and for smooth `g` the error
/// comes from `g` alone.
pub fn bubble_ball_integral(bubble: &Bubble, z: P2, radius: f64, g: &dyn Fn(P2) -> f64) -> f64 {
    let mu2 = bubble.mu * bubble.mu;
    let t_of = |s: f64| -4.0 / (1.0 + mu2 * s * s);
    let s_of = |t: f64| ((-4.0 / t - 1.0).max(0.0) / mu2).sqrt();
    let c = bubble.center;
    let ecc = z - c;
    let e2 = ecc.norm_squared();
    let n_psi = 64usize;
    let dpsi = 2.0 * std::f64::consts::PI / n_psi as f64;
    let gl = gl24_unit();
    let mut total = 0.0;
    for m in 0..n_psi {
        let psi = (m as f64 + 0.5) * dpsi;
        let dir = P2::new(psi.cos(), psi.sin());
        // |c + s dir - z| = radius: s^2 - 2 s <dir, ecc> + e2 - radius^2 = 0.
        let b = dir.dot(&ecc);
        let disc = b * b - (e2 - radius * radius);
        if disc <= 0.0 {
            continue;
        }
        let root = disc.sqrt();
        let s_lo = (b - root).max(0.0);
        let s_hi = b + root;
        if s_hi <= s_lo {
            continue;
        }
        let t_lo = t_of(s_lo);
        let t_hi = t_of(s_hi);
        let span = t_hi - t_lo;
        let mut ray = 0.0;
        for &(q, w) in gl.iter() {
            let t = t_lo + span * q;
            let s = s_of(t);
            ray += g(c + s * dir) * w;
        }
        total += ray * span;
    }
    total * dpsi
}

/// Closed-form Dirichlet Green projection of a bubble density restricted
/// to the concentric ball B(c, R):
///
/// inside the ball  `u = -2 ln(1 + mu^2 s^2) + 2 ln(1 + mu^2 R^2) - m_R ln R + m_R ln|1 - conj(c) x|`
/// outside          `u = -m_R ln|x - c| + m_R ln|1 - conj(c) x|`
///
/// with `m_R = radial_mass(R)`. The two branches agree at `s = R`, the
/// Laplacian equals `-e^U` inside and 0 outside, and the harmonic term is
/// exactly the extension of the boundary trace, so `u = 0` on the circle.
pub fn ball_projection_value(bubble: &Bubble, ball_radius: f64, x: P2) -> f64 {
    let c = bubble.center;
    let mu2 = bubble.mu * bubble.mu;
    let m_r = bubble.radial_mass(ball_radius);
    let s2 = (x - c).norm_squared();
    let dot = c.dot(&x);
    let cross = c.x * x.y - c.y * x.x;
    // ln|1 - conj(c) x|
    let harmonic = 0.5 * ((1.0 - dot) * (1.0 - dot) + cross * cross).ln();
    let newtonian = if s2 >= ball_radius * ball_radius {
        -0.5 * m_r * s2.ln()
    } else {
        -2.0 * (1.0 + mu2 * s2).ln() + 2.0 * (1.0 + mu2 * ball_radius * ball_radius).ln()
            - m_r * ball_radius.ln()
    };
    newtonian + m_r * harmonic
}

/// Green projection of the density outside the concentric ball,
/// `∫_{B_1 \ B(c, R)} G(x, y) e^U dy`, by the radial substitution with 96
/// angular rays. Smooth tail densities make this a reporting-grade field;
/// the ball part carries the mass and goes through the closed form.
pub fn tail_projection_value(bubble: &Bubble, ball_radius: f64, x: P2) -> f64 {
    if x.norm() >= 1.0 - 1e-14 {
        return 0.0;
    }
    let mu2 = bubble.mu * bubble.mu;
    let t_of = |s: f64| -4.0 / (1.0 + mu2 * s * s);
    let s_of = |t: f64| ((-4.0 / t - 1.0).max(0.0) / mu2).sqrt();
    let c = bubble.center;
    let n_psi = 96usize;
    let dpsi = 2.0 * std::f64::consts::PI / n_psi as f64;
    let gl = gl24_unit();
    let mut total = 0.0;
    for m in 0..n_psi {
        let psi = (m as f64 + 0.5) * dpsi;
        let dir = P2::new(psi.cos(), psi.sin());
        let s_hi = disk_extent(c, dir);
        if s_hi <= ball_radius {
            continue;
        }
        let t_lo = t_of(ball_radius);
        let t_hi = t_of(s_hi);
        let span = t_hi - t_lo;
        let mut ray = 0.0;
        for &(q, w) in gl.iter() {
            let t = t_lo + span * q;
            let s = s_of(t);
            let y = c + s * dir;
            if (y - x).norm_squared() == 0.0 {
                continue;
            }
            ray += green_val(x, y) * w;
        }
        total += ray * span;
    }
    total * dpsi
}

/// One member of a manufactured concentrating family: the full projected
/// field, its ball-restricted part (the difference to the far-field
/// re-solve), and the defining parameters.
pub struct ProjectedMember {
    pub bubble: Bubble,
    pub ball_radius: f64,
    /// `G[e^U 1_disk]` nodally: closed-form ball part plus quadrature tail.
    pub u: Vec<f64>,
    /// `G[e^U 1_ball]` nodally (closed form).
    pub u_diff: Vec<f64>,
}

pub fn project_member(mesh: &DiskMesh, bubble: Bubble, ball_radius: f64) -> ProjectedMember {
    let u_diff: Vec<f64> = mesh
        .nodes
        .par_iter()
        .map(|&p| {
            if p.norm() >= 1.0 - 1e-14 {
                0.0
            } else {
                ball_projection_value(&bubble, ball_radius, p)
            }
        })
        .collect();
    let u: Vec<f64> = mesh
        .nodes
        .par_iter()
        .zip(u_diff.par_iter())
        .map(|(&p, &d)| d + tail_projection_value(&bubble, ball_radius, p))
        .collect();
    ProjectedMember { bubble, ball_radius, u, u_diff }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{DiskMesh, SingularityConfig};

    fn mesh() -> DiskMesh {
        let cfg = SingularityConfig::new(0.0, 0.25).unwrap();
        DiskMesh::build(24, 48, 1.5, &[], &cfg).unwrap()
    }

    #[test]
    fn bubble_center_value_and_tail_split() {
        let b = Bubble { mu: 1e3, center: P2::new(0.0, 0.0) };
        assert!((b.log_density(b.center) - (8e6f64).ln()).abs() < 1e-12);
        let tail = bubble_tail(&b);
        assert!((tail.interior_mass + tail.exterior_mass - 8.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(tail.exterior_mass < 1e-4 * tail.interior_mass);
    }

    #[test]
    fn concentric_ball_integral_is_exact_for_unit_multiplier() {
        let b = Bubble { mu: 1e3, center: P2::new(0.0, 0.0) };
        let got = bubble_ball_integral(&b, b.center, 0.1, &|_| 1.0);
        let want = ball_mass_exact(&b, 0.1);
        assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
        // The tail 8п/(1 + (mu R)^2) is 1/10001 of the total here.
        assert!((want - 8.0 * std::f64::consts::PI).abs() < 1.1e-4 * want);
    }

    #[test]
    fn off_center_ball_integral_matches_brute_force() {
        let b = Bubble { mu: 3.0, center: P2::new(0.2, 0.1) };
        let z = P2::new(0.3, 0.15);
        let radius = 0.25;
        let got = bubble_ball_integral(&b, z, radius, &|_| 1.0);
        // Brute-force midpoint rule in polar coordinates about z.
        let (nr, nt) = (600usize, 600usize);
        let mut brute = 0.0;
        for i in 0..nr {
            let s = (i as f64 + 0.5) / nr as f64 * radius;
            for j in 0..nt {
                let t = (j as f64 + 0.5) / nt as f64 * 2.0 * std::f64::consts::PI;
                let y = z + s * P2::new(t.cos(), t.sin());
                brute += b.log_density(y).exp() * s;
            }
        }
        brute *= radius / nr as f64 * 2.0 * std::f64::consts::PI / nt as f64;
        assert!((got - brute).abs() < 2e-3 * brute, "{got} vs {brute}");
    }

    #[test]
    fn superposition_adds_densities_exactly() {
        let m = mesh();
        let b1 = Bubble { mu: 40.0, center: P2::new(0.5, 0.0) };
        let b2 = Bubble { mu: 40.0, center: P2::new(-0.5, 0.0) };
        let u = superposed_field(&m, &[b1, b2]);
        for (i, &p) in m.nodes.iter().enumerate() {
            let want = (b1.log_density(p).exp() + b2.log_density(p).exp()).ln();
            assert!((u[i] - want).abs() < 1e-9, "node {i}");
        }
    }

    #[test]
    fn ball_projection_vanishes_on_the_circle_and_is_continuous() {
        let b = Bubble { mu: 5.0, center: P2::new(0.3, -0.2) };
        let radius = 0.3;
        for k in 0..12 {
            let t = k as f64 * 0.5236;
            let x = P2::new(t.cos(), t.sin());
            assert!(ball_projection_value(&b, radius, x).abs() < 1e-12);
        }
        let dir = P2::new(0.6, 0.8);
        let inner = ball_projection_value(&b, radius, b.center + (radius - 1e-9) * dir);
        let outer = ball_projection_value(&b, radius, b.center + (radius + 1e-9) * dir);
        assert!((inner - outer).abs() < 1e-6, "{inner} vs {outer}");
    }

    #[test]
    fn ball_projection_has_the_bubble_laplacian_inside_and_none_outside() {
        let b = Bubble { mu: 5.0, center: P2::new(0.3, -0.2) };
        let radius = 0.3;
        let h = 1e-4;
        let lap = |x: P2| {
            let f = |p: P2| ball_projection_value(&b, radius, p);
            (f(x + P2::new(h, 0.0)) + f(x - P2::new(h, 0.0)) + f(x + P2::new(0.0, h))
                + f(x - P2::new(0.0, h))
                - 4.0 * f(x))
                / (h * h)
        };
        let inside = b.center + P2::new(0.1, 0.05);
        let want = -b.log_density(inside).exp();
        let got = lap(inside);
        assert!((got - want).abs() < 1e-3 * want.abs(), "{got} vs {want}");
        let outside = b.center + P2::new(0.45, 0.0);
        assert!(lap(outside).abs() < 1e-3 * want.abs());
    }

    #[test]
    fn projected_member_splits_ball_and_tail_consistently() {
        let m = mesh();
        let b = Bubble { mu: 50.0, center: P2::new(0.6, 0.0) };
        let member = project_member(&m, b, 0.08);
        for i in 0..m.len() {
            if m.boundary[i] {
                assert_eq!(member.u[i], 0.0);
                assert_eq!(member.u_diff[i], 0.0);
            } else {
                // Tail contribution is nonnegative: both densities and the
                // kernel are nonnegative inside the disk.
                assert!(member.u[i] - member.u_diff[i] > -1e-12);
            }
        }
        // The full projected field solves -Δu = e^U: check via the residual
        // of the representation at an off-node probe using finite sums is
        // covered by the Laplacian tests; here assert the peak sits at the
        // node closest to the bubble center.
        let peak_node = (0..m.len()).max_by(|&a, &b_| member.u[a].partial_cmp(&member.u[b_]).unwrap()).unwrap();
        let closest = (0..m.len())
            .min_by(|&a, &b_| {
                (m.nodes[a] - b.center)
                    .norm()
                    .partial_cmp(&(m.nodes[b_] - b.center).norm())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(peak_node, closest);
    }
}
