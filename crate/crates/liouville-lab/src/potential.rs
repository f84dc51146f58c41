//! Prescribed-curvature potentials with exactly-known Hölder data.
//!
//! Two shapes cover the experiments: a constant, and a cone-like "bump"
//! `V(x) = level - A * min(|x - c|, r)^s` clipped to `[0, b]`. The bump's
//! Hölder modulus at its own exponent is the coefficient `A` by
//! construction, which is what the compactness experiments need: the
//! hypothesis `|V(x) - V(y)| <= A |x - y|^s` can be asserted rather than
//! estimated.

use crate::disk::P2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("level must satisfy 0 <= level <= bound_b")]
    LevelOutOfRange,
    #[error("bound_b must be finite and nonnegative")]
    BadBound,
    #[error("hoelder_A must be finite and nonnegative")]
    BadCoefficient,
    #[error("hoelder_s must lie in the half-open interval (1/2, 1]")]
    BadExponent,
    #[error("bump_radius must be positive")]
    BadRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    Constant,
    HoelderBump,
}

/// Curvature function V with sup bound `bound_b` and Hölder data `(A, s)`.
#[derive(Clone, Debug)]
pub struct Potential {
    pub kind: PotentialKind,
    pub level: f64,
    pub bound_b: f64,
    pub hoelder_a: f64,
    pub hoelder_s: f64,
    pub bump_center: P2,
    pub bump_radius: f64,
}

impl Potential {
    pub fn constant(level: f64, bound_b: f64) -> Result<Self, PotentialError> {
        if !bound_b.is_finite() || bound_b < 0.0 {
            return Err(PotentialError::BadBound);
        }
        if !level.is_finite() || level < 0.0 || level > bound_b {
            return Err(PotentialError::LevelOutOfRange);
        }
        Ok(Self {
            kind: PotentialKind::Constant,
            level,
            bound_b,
            hoelder_a: 0.0,
            hoelder_s: 1.0,
            bump_center: P2::zeros(),
            bump_radius: 1.0,
        })
    }

    pub fn hoelder_bump(
        level: f64,
        bound_b: f64,
        hoelder_a: f64,
        hoelder_s: f64,
        bump_center: P2,
        bump_radius: f64,
    ) -> Result<Self, PotentialError> {
        if !bound_b.is_finite() || bound_b < 0.0 {
            return Err(PotentialError::BadBound);
        }
        if !level.is_finite() || level < 0.0 || level > bound_b {
            return Err(PotentialError::LevelOutOfRange);
        }
        if !hoelder_a.is_finite() || hoelder_a < 0.0 {
            return Err(PotentialError::BadCoefficient);
        }
        if !hoelder_s.is_finite() || hoelder_s <= 0.5 || hoelder_s > 1.0 {
            return Err(PotentialError::BadExponent);
        }
        if !bump_radius.is_finite() || bump_radius <= 0.0 {
            return Err(PotentialError::BadRadius);
        }
        Ok(Self {
            kind: PotentialKind::HoelderBump,
            level,
            bound_b,
            hoelder_a,
            hoelder_s,
            bump_center,
            bump_radius,
        })
    }

    /// Pointwise value, clipped into `[0, bound_b]`. Clipping composes the
    /// raw profile with 1-Lipschitz maps, so the Hölder modulus at exponent
    /// `hoelder_s` never exceeds `hoelder_a`.
    pub fn eval(&self, x: P2) -> f64 {
        let raw = match self.kind {
            PotentialKind::Constant => self.level,
            PotentialKind::HoelderBump => {
                let d = (x - self.bump_center).norm().min(self.bump_radius);
                self.level - self.hoelder_a * d.powf(self.hoelder_s)
            }
        };
        raw.clamp(0.0, self.bound_b)
    }

    pub fn values(&self, nodes: &[P2]) -> Vec<f64> {
        nodes.iter().map(|&p| self.eval(p)).collect()
    }

    pub fn sup_bound(&self) -> f64 {
        self.bound_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn constant_is_constant_and_bounded() {
        let v = Potential::constant(1.0, 2.0).unwrap();
        assert_eq!(v.eval(P2::new(0.3, -0.9)), 1.0);
        assert_eq!(v.eval(P2::zeros()), 1.0);
    }

    #[test]
    fn values_stay_inside_the_stated_bounds() {
        let v = Potential::hoelder_bump(1.0, 1.0, 3.0, 0.75, P2::new(1.0, 0.0), 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = P2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let val = v.eval(p);
            assert!((0.0..=v.bound_b).contains(&val), "{val}");
        }
    }

    #[test]
    fn bump_respects_its_own_hoelder_modulus() {
        let a = 2.0;
        let s = 0.75;
        let v = Potential::hoelder_bump(2.0, 2.0, a, s, P2::new(0.2, 0.1), 0.8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let p = P2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let q = P2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d = (p - q).norm();
            if d < 1e-12 {
                continue;
            }
            let lhs = (v.eval(p) - v.eval(q)).abs();
            assert!(lhs <= a * d.powf(s) + 1e-12, "|dV| = {lhs} at distance {d}");
        }
    }

    #[test]
    fn validation_rejects_out_of_range_parameters() {
        assert!(Potential::constant(-1.0, 1.0).is_err());
        assert!(Potential::constant(2.0, 1.0).is_err());
        assert!(Potential::constant(1.0, f64::NAN).is_err());
        assert!(Potential::hoelder_bump(1.0, 1.0, -1.0, 0.75, P2::zeros(), 1.0).is_err());
        assert!(Potential::hoelder_bump(1.0, 1.0, 1.0, 0.5, P2::zeros(), 1.0).is_err());
        assert!(Potential::hoelder_bump(1.0, 1.0, 1.0, 1.2, P2::zeros(), 1.0).is_err());
        assert!(Potential::hoelder_bump(1.0, 1.0, 1.0, 0.75, P2::zeros(), 0.0).is_err());
    }
}
