//! Damped Newton solver for the fixed-point form `u = K[l V w e^u]` and
//! mass-targeted continuation through the fold.
//!
//! The unknown is the nodal field u; the Green operator K already encodes
//! the boundary condition (its boundary rows are zero), so boundary nodes
//! reduce to identity rows of the Jacobian `I - K diag(l V w e^u)` and stay
//! exactly zero. In mass-targeted mode the scale l joins the unknowns and a
//! bordered system enforces `total_mass = target`; that system stays
//! regular at the fold, which is how a family is driven around it toward
//! concentration.
//!
//! The Jacobian is frozen between refactorizations: a dense LU at desk
//! scale costs seconds while an extra damped iteration costs milliseconds,
//! so the solver refactors only on stalls or every few steps.

use crate::disk::{DiskMesh, P2};
use crate::linalg::{ColMajor, DenseLu, LinAlgError};
use crate::potential::Potential;
use crate::quad::{GreenOperator, QuadError, WeightField};
use thiserror::Error;

/// Nodal exponential overflow guard: e^700 is near the f64 limit.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// Smallest-singular-value threshold below which a Newton breakdown is
/// classified as a fold of the solution branch rather than a generic
/// non-convergence. Calibrated on the closed-form radial branch, whose
/// Jacobian loses rank at the fold while staying well-conditioned elsewhere.
const FOLD_SIGMA: f64 = 0.25;

/// Iterations a frozen Jacobian may serve before a mandatory refresh.
const REFRESH_AFTER: usize = 6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("nodal exponent overflow at node {node} (u = {value:.3e}); shorten the continuation step")]
    BlowupEscape { node: usize, value: f64 },
    #[error("fold detected near lambda = {lambda:.6} (smallest singular value {sigma_min:.3e})")]
    FoldDetected { lambda: f64, sigma_min: f64 },
    #[error("newton did not converge: residual {residual_norm:.3e} after {iters} iterations")]
    NonConvergence { residual_norm: f64, iters: usize },
    #[error("no real branch at lambda = {lambda} (past the fold at 2)")]
    NoRealRoot { lambda: f64 },
    #[error("mass target {target} exceeds the ceiling {ceiling}")]
    MassCeiling { target: f64, ceiling: f64 },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("invalid solver input: {0}")]
    Invalid(String),
}

/// Newton iteration controls.
#[derive(Clone, Copy, Debug)]
pub struct SolverOpts {
    pub tol: f64,
    pub max_iter: usize,
    pub damping_min: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, damping_min: 1e-9 }
    }
}

impl SolverOpts {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) {
            return Err(SolverError::Invalid("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(SolverError::Invalid("max_iter must be at least 1".into()));
        }
        if !(self.damping_min > 0.0 && self.damping_min <= 1.0) {
            return Err(SolverError::Invalid("damping_min must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Discretized problem: mesh, singular weight, curvature, and the Green
/// operator in both matrix-free and dense form.
pub struct LiouvilleProblem<'a> {
    pub mesh: &'a DiskMesh,
    pub weights: &'a WeightField,
    pub v_values: Vec<f64>,
    op: GreenOperator,
    k_dense: ColMajor,
    /// Corrected cell weight divided by cell area (density form of w).
    w_tilde: Vec<f64>,
}

/// Accepted solution of the discrete problem.
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub u: Vec<f64>,
    pub lambda: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    /// `∫ l V w e^u` by corrected quadrature.
    pub total_mass: f64,
    /// Same integral with the curvature factor dropped: `∫ l w e^u`.
    pub weight_mass: f64,
    pub peak: f64,
    pub peak_node: usize,
    pub peak_location: P2,
    /// Field value at the origin via the Green representation.
    pub u_center: f64,
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

impl<'a> LiouvilleProblem<'a> {
    pub fn new(
        mesh: &'a DiskMesh,
        weights: &'a WeightField,
        potential: &Potential,
    ) -> Result<Self, SolverError> {
        if weights.values.len() != mesh.len() {
            return Err(SolverError::Invalid("weight field does not match mesh".into()));
        }
        let v_values = potential.values(&mesh.nodes);
        let op = GreenOperator::new(mesh);
        let k_dense = op.to_dense();
        let w_tilde: Vec<f64> = (0..mesh.len())
            .map(|j| {
                let a = mesh.cell_area[j];
                if a > 0.0 {
                    weights.corrected_cell_weight[j] / a
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self { mesh, weights, v_values, op, k_dense, w_tilde })
    }

    /// Density `l V w e^u` in the averaged form the Green operator consumes.
    fn density(&self, u: &[f64], lambda: f64) -> Result<Vec<f64>, SolverError> {
        for (node, &value) in u.iter().enumerate() {
            if !value.is_finite() || value > OVERFLOW_GUARD {
                return Err(SolverError::BlowupEscape { node, value });
            }
        }
        Ok((0..u.len())
            .map(|j| lambda * self.v_values[j] * self.w_tilde[j] * u[j].exp())
            .collect())
    }

    /// Residual `u - K[l V w e^u]`; zero exactly at a discrete solution.
    pub fn residual(&self, u: &[f64], lambda: f64) -> Result<Vec<f64>, SolverError> {
        if u.len() != self.mesh.len() {
            return Err(SolverError::Invalid("field length does not match mesh".into()));
        }
        let rho = self.density(u, lambda)?;
        let ku = self.op.apply(&rho)?;
        Ok(u.iter().zip(&ku).map(|(a, b)| a - b).collect())
    }

    /// `∫ l V w e^u` by corrected cell weights.
    pub fn total_mass(&self, u: &[f64], lambda: f64) -> f64 {
        (0..u.len())
            .map(|j| lambda * self.v_values[j] * u[j].exp() * self.weights.corrected_cell_weight[j])
            .sum()
    }

    fn weight_mass(&self, u: &[f64], lambda: f64) -> f64 {
        (0..u.len())
            .map(|j| lambda * u[j].exp() * self.weights.corrected_cell_weight[j])
            .sum()
    }

    /// Jacobian `I - K diag(l V w e^u)` as a dense column-major matrix.
    fn jacobian(&self, u: &[f64], lambda: f64) -> Result<ColMajor, SolverError> {
        let rho = self.density(u, lambda)?;
        let n = self.mesh.len();
        let mut j = ColMajor::zeros(n);
        for col in 0..n {
            let scale = rho[col];
            let src = &self.k_dense.data[col * n..(col + 1) * n];
            let dst = j.col_mut(col);
            for i in 0..n {
                dst[i] = -src[i] * scale;
            }
            dst[col] += 1.0;
        }
        Ok(j)
    }

    fn accept(&self, u: Vec<f64>, lambda: f64, residual_norm: f64, iters: usize) -> Result<SolutionField, SolverError> {
        let total_mass = self.total_mass(&u, lambda);
        let weight_mass = self.weight_mass(&u, lambda);
        let (peak_node, peak) = u
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let rho = self.density(&u, lambda)?;
        let u_center = self.op.eval_at(P2::zeros(), &rho)?;
        Ok(SolutionField {
            peak_location: self.mesh.nodes[peak_node],
            u,
            lambda,
            residual_norm,
            newton_iters: iters,
            total_mass,
            weight_mass,
            peak,
            peak_node,
            u_center,
        })
    }

    fn enforce_boundary(&self, u: &mut [f64]) {
        for (j, &b) in self.mesh.boundary.iter().enumerate() {
            if b {
                u[j] = 0.0;
            }
        }
    }
}

/// Damped Newton at fixed lambda.
pub fn newton_solve(
    problem: &LiouvilleProblem,
    u0: &[f64],
    lambda: f64,
    opts: &SolverOpts,
) -> Result<SolutionField, SolverError> {
    opts.validate()?;
    if u0.len() != problem.mesh.len() {
        return Err(SolverError::Invalid("initial field length does not match mesh".into()));
    }
    let mut u = u0.to_vec();
    problem.enforce_boundary(&mut u);
    let mut r = problem.residual(&u, lambda)?;
    let mut rn = norm_inf(&r);
    let mut lu: Option<DenseLu> = None;
    let mut since_factor = 0usize;

    for iter in 0..opts.max_iter {
        if rn <= opts.tol {
            return problem.accept(u, lambda, rn, iter);
        }
        if lu.is_none() || since_factor >= REFRESH_AFTER {
            lu = Some(DenseLu::factor(problem.jacobian(&u, lambda)?)?);
            since_factor = 0;
        }
        let fac = lu.as_ref().unwrap();
        let mut delta: Vec<f64> = r.iter().map(|v| -v).collect();
        fac.solve_in_place(&mut delta, false)?;

        let mut stepped = false;
        let mut fresh = since_factor == 0;
        loop {
            let mut tau = 1.0;
            for _ in 0..30 {
                if tau < opts.damping_min {
                    break;
                }
                let mut u_try: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + tau * d).collect();
                problem.enforce_boundary(&mut u_try);
                match problem.residual(&u_try, lambda) {
                    Ok(r_try) => {
                        let rn_try = norm_inf(&r_try);
                        if rn_try < rn {
                            u = u_try;
                            r = r_try;
                            rn = rn_try;
                            stepped = true;
                            if tau < 0.25 {
                                lu = None; // stale direction; refresh next iteration
                            }
                            break;
                        }
                    }
                    Err(SolverError::BlowupEscape { .. }) => {}
                    Err(e) => return Err(e),
                }
                tau *= 0.5;
            }
            if stepped || fresh {
                break;
            }
            // The frozen Jacobian failed to produce descent; one refresh at
            // the current iterate before declaring a breakdown.
            lu = Some(DenseLu::factor(problem.jacobian(&u, lambda)?)?);
            since_factor = 0;
            fresh = true;
            let fac = lu.as_ref().unwrap();
            delta = r.iter().map(|v| -v).collect();
            fac.solve_in_place(&mut delta, false)?;
        }

        if !stepped {
            let sigma_min = lu.as_ref().unwrap().smallest_singular_value(24)?;
            if sigma_min < FOLD_SIGMA {
                return Err(SolverError::FoldDetected { lambda, sigma_min });
            }
            return Err(SolverError::NonConvergence { residual_norm: rn, iters: iter });
        }
        since_factor += 1;
    }
    if rn <= opts.tol {
        return problem.accept(u, lambda, rn, opts.max_iter);
    }
    Err(SolverError::NonConvergence { residual_norm: rn, iters: opts.max_iter })
}

/// Newton on the bordered system `(u, l)` with `total_mass(u, l) = target`.
/// Regular at the fold, where the fixed-lambda Jacobian is singular.
fn solve_to_mass(
    problem: &LiouvilleProblem,
    u0: &[f64],
    lambda0: f64,
    target: f64,
    opts: &SolverOpts,
) -> Result<SolutionField, SolverError> {
    opts.validate()?;
    let n = problem.mesh.len();
    let mut u = u0.to_vec();
    problem.enforce_boundary(&mut u);
    let mut lambda = lambda0;

    let merit = |problem: &LiouvilleProblem, u: &[f64], lambda: f64| -> Result<(Vec<f64>, f64, f64), SolverError> {
        let r = problem.residual(u, lambda)?;
        let g = problem.total_mass(u, lambda) - target;
        let m = norm_inf(&r).max(g.abs());
        Ok((r, g, m))
    };

    let assemble = |problem: &LiouvilleProblem, u: &[f64], lambda: f64| -> Result<ColMajor, SolverError> {
        let rho = problem.density(u, lambda)?;
        let mut big = ColMajor::zeros(n + 1);
        for col in 0..n {
            let scale = rho[col];
            let src = &problem.k_dense.data[col * n..(col + 1) * n];
            let dst = big.col_mut(col);
            for i in 0..n {
                dst[i] = -src[i] * scale;
            }
            dst[col] += 1.0;
            // d(mass)/du_col
            dst[n] = lambda
                * problem.v_values[col]
                * u[col].exp()
                * problem.weights.corrected_cell_weight[col];
        }
        // d/d(lambda): column N holds -K[V w e^u] and d(mass)/dl.
        let c: Vec<f64> = (0..n)
            .map(|j| problem.v_values[j] * problem.w_tilde[j] * u[j].exp())
            .collect();
        let kc = problem.op.apply(&c)?;
        let dst = big.col_mut(n);
        for i in 0..n {
            dst[i] = -kc[i];
        }
        dst[n] = (0..n)
            .map(|j| problem.v_values[j] * u[j].exp() * problem.weights.corrected_cell_weight[j])
            .sum();
        Ok(big)
    };

    let (mut r, mut g, mut m) = merit(problem, &u, lambda)?;
    let tol = opts.tol.max(1e-12 * target.abs());
    let mut lu: Option<DenseLu> = None;
    let mut since_factor = 0usize;

    for iter in 0..opts.max_iter {
        if m <= tol {
            return problem.accept(u, lambda, norm_inf(&r), iter);
        }
        if lu.is_none() || since_factor >= REFRESH_AFTER {
            lu = Some(DenseLu::factor(assemble(problem, &u, lambda)?)?);
            since_factor = 0;
        }
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        rhs.push(-g);
        lu.as_ref().unwrap().solve_in_place(&mut rhs, false)?;

        let mut stepped = false;
        let mut fresh = since_factor == 0;
        loop {
            let mut tau = 1.0;
            for _ in 0..30 {
                if tau < opts.damping_min {
                    break;
                }
                let mut u_try: Vec<f64> = u.iter().zip(rhs.iter()).map(|(a, d)| a + tau * d).collect();
                problem.enforce_boundary(&mut u_try);
                let lambda_try = lambda + tau * rhs[n];
                match merit(problem, &u_try, lambda_try) {
                    Ok((r_try, g_try, m_try)) => {
                        if m_try < m {
                            u = u_try;
                            lambda = lambda_try;
                            r = r_try;
                            g = g_try;
                            m = m_try;
                            stepped = true;
                            if tau < 0.25 {
                                lu = None;
                            }
                            break;
                        }
                    }
                    Err(SolverError::BlowupEscape { .. }) => {}
                    Err(e) => return Err(e),
                }
                tau *= 0.5;
            }
            if stepped || fresh {
                break;
            }
            lu = Some(DenseLu::factor(assemble(problem, &u, lambda)?)?);
            since_factor = 0;
            fresh = true;
            rhs = r.iter().map(|v| -v).collect();
            rhs.push(-g);
            lu.as_ref().unwrap().solve_in_place(&mut rhs, false)?;
        }

        if !stepped {
            return Err(SolverError::NonConvergence { residual_norm: m, iters: iter });
        }
        since_factor += 1;
    }
    if m <= tol {
        return problem.accept(u, lambda, norm_inf(&r), opts.max_iter);
    }
    Err(SolverError::NonConvergence { residual_norm: m, iters: opts.max_iter })
}

/// Continuation schedule: fixed lambdas or mass targets.
#[derive(Clone, Debug)]
pub enum Schedule {
    Lambda(Vec<f64>),
    MassTargets(Vec<f64>),
}

/// Halting thresholds for a family run.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    pub max_peak: f64,
    pub max_mass: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { max_peak: f64::INFINITY, max_mass: 16.0 * std::f64::consts::PI - 0.1 }
    }
}

/// Ordered solution family. `halted` records a stop-rule cut; `failed`
/// records a target the solver could not reach (earlier members are kept).
pub struct Family {
    pub members: Vec<SolutionField>,
    pub halted: Option<String>,
    pub failed: Option<String>,
}

fn retryable(e: &SolverError) -> bool {
    matches!(
        e,
        SolverError::NonConvergence { .. }
            | SolverError::FoldDetected { .. }
            | SolverError::BlowupEscape { .. }
            | SolverError::LinAlg(LinAlgError::Singular(_))
    )
}

/// Reaches one mass target from the current state, inserting midpoint
/// targets on failure (internal points are consumed for warm starts but not
/// recorded as family members).
fn reach_mass(
    problem: &LiouvilleProblem,
    prev2: &mut Option<SolutionField>,
    prev: &mut SolutionField,
    target: f64,
    opts: &SolverOpts,
    depth: u32,
) -> Result<SolutionField, SolverError> {
    // Secant predictor in the mass parameter, clamped against wild
    // extrapolation; the trivial state (u = 0, l = 0, mass 0) seeds it.
    let (u_pred, lambda_pred) = match prev2 {
        Some(p2) if (prev.total_mass - p2.total_mass).abs() > 1e-12 => {
            let s = ((target - prev.total_mass) / (prev.total_mass - p2.total_mass)).clamp(0.0, 4.0);
            let u: Vec<f64> = prev
                .u
                .iter()
                .zip(&p2.u)
                .map(|(a, b)| a + s * (a - b))
                .collect();
            (u, prev.lambda + s * (prev.lambda - p2.lambda))
        }
        _ => {
            let base: f64 = (0..problem.mesh.len())
                .map(|j| problem.v_values[j] * problem.weights.corrected_cell_weight[j])
                .sum();
            let lambda0 = if prev.lambda > 0.0 { prev.lambda } else { (target / base).clamp(0.0, 1.0) };
            (prev.u.clone(), lambda0)
        }
    };
    match solve_to_mass(problem, &u_pred, lambda_pred, target, opts) {
        Ok(sol) => {
            *prev2 = Some(prev.clone());
            *prev = sol.clone();
            Ok(sol)
        }
        Err(e) if depth < 12 && retryable(&e) => {
            let mid = 0.5 * (prev.total_mass + target);
            if (target - mid).abs() < 1e-10 * target.abs().max(1.0) {
                return Err(e);
            }
            reach_mass(problem, prev2, prev, mid, opts, depth + 1)?;
            reach_mass(problem, prev2, prev, target, opts, depth + 1)
        }
        Err(e) => Err(e),
    }
}

fn trivial_state(problem: &LiouvilleProblem) -> SolutionField {
    SolutionField {
        u: vec![0.0; problem.mesh.len()],
        lambda: 0.0,
        residual_norm: 0.0,
        newton_iters: 0,
        total_mass: 0.0,
        weight_mass: 0.0,
        peak: 0.0,
        peak_node: 0,
        peak_location: problem.mesh.nodes[0],
        u_center: 0.0,
    }
}

/// Runs a continuation schedule. Mass targets must be strictly increasing
/// and below the ceiling; lambda schedules run plain warm-started Newton.
pub fn continuation_run(
    problem: &LiouvilleProblem,
    schedule: &Schedule,
    stop: &StopRule,
    opts: &SolverOpts,
) -> Result<Family, SolverError> {
    let mut family = Family { members: Vec::new(), halted: None, failed: None };
    match schedule {
        Schedule::Lambda(lams) => {
            let mut u = vec![0.0; problem.mesh.len()];
            for &lam in lams {
                if lam < 0.0 {
                    return Err(SolverError::Invalid("lambda targets must be nonnegative".into()));
                }
                match newton_solve(problem, &u, lam, opts) {
                    Ok(sol) => {
                        u = sol.u.clone();
                        let stop_hit = sol.peak > stop.max_peak || sol.total_mass > stop.max_mass;
                        family.members.push(sol);
                        if stop_hit {
                            family.halted = Some(format!("stop rule hit at lambda = {lam}"));
                            break;
                        }
                    }
                    Err(e) => {
                        family.failed = Some(e.to_string());
                        break;
                    }
                }
            }
        }
        Schedule::MassTargets(targets) => {
            let hard_ceiling = 16.0 * std::f64::consts::PI;
            for w in targets.windows(2) {
                if w[1] <= w[0] {
                    return Err(SolverError::Invalid("mass targets must be strictly increasing".into()));
                }
            }
            for &m in targets {
                if m < 0.0 {
                    return Err(SolverError::Invalid("mass targets must be nonnegative".into()));
                }
                if m > stop.max_mass.min(hard_ceiling) {
                    return Err(SolverError::MassCeiling { target: m, ceiling: stop.max_mass.min(hard_ceiling) });
                }
            }
            let mut prev = trivial_state(problem);
            let mut prev2: Option<SolutionField> = None;
            for &m in targets {
                if m == 0.0 {
                    family.members.push(trivial_state(problem));
                    continue;
                }
                match reach_mass(problem, &mut prev2, &mut prev, m, opts, 0) {
                    Ok(sol) => {
                        let stop_hit = sol.peak > stop.max_peak || sol.total_mass > stop.max_mass;
                        family.members.push(sol);
                        if stop_hit {
                            family.halted = Some(format!("stop rule hit at mass target {m}"));
                            break;
                        }
                    }
                    Err(e) => {
                        family.failed = Some(e.to_string());
                        break;
                    }
                }
            }
        }
    }
    Ok(family)
}

/// Brackets the fold of the fixed-lambda branch by bisection on Newton
/// solvability, warm-starting each trial from the last good state.
pub fn fold_locate(
    problem: &LiouvilleProblem,
    lambda_lo: f64,
    lambda_hi: f64,
    width: f64,
    opts: &SolverOpts,
) -> Result<f64, SolverError> {
    if !(lambda_lo < lambda_hi) || !(width > 0.0) {
        return Err(SolverError::Invalid("need lambda_lo < lambda_hi and width > 0".into()));
    }
    let mut lo_state = newton_solve(problem, &vec![0.0; problem.mesh.len()], lambda_lo, opts)?;
    if newton_solve(problem, &lo_state.u, lambda_hi, opts).is_ok() {
        return Err(SolverError::Invalid("no fold inside the bracket; branch solvable at lambda_hi".into()));
    }
    let mut lo = lambda_lo;
    let mut hi = lambda_hi;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        match newton_solve(problem, &lo_state.u, mid, opts) {
            Ok(sol) => {
                lo = mid;
                lo_state = sol;
            }
            Err(e) if retryable(&e) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form radial branch of `-Δu = l e^u` on the unit disk:
/// `u(r) = ln(8 m^2 / (l (1 + m^2 r^2)^2))` solves the problem whenever
/// `8 m^2 = l (1 + m^2)^2`, which pins the boundary value to zero. Two
/// roots exist for `l < 2` and merge at the fold `l = 2`.
pub struct GelfandBranch {
    pub lambda: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
}

impl GelfandBranch {
    pub fn value(&self, r: f64, minus_branch: bool) -> f64 {
        let mu = if minus_branch { self.mu_minus } else { self.mu_plus };
        let m2 = mu * mu;
        (8.0 * m2 / (self.lambda * (1.0 + m2 * r * r).powi(2))).ln()
    }

    pub fn field(&self, mesh: &DiskMesh, minus_branch: bool) -> Vec<f64> {
        mesh.nodes.iter().map(|p| self.value(p.norm(), minus_branch)).collect()
    }

    /// `∫_{B1} l e^u = 8 pi m^2 / (1 + m^2)` in closed form.
    pub fn mass(&self, minus_branch: bool) -> f64 {
        let mu = if minus_branch { self.mu_minus } else { self.mu_plus };
        let m2 = mu * mu;
        8.0 * std::f64::consts::PI * m2 / (1.0 + m2)
    }

    pub fn center_value(&self, minus_branch: bool) -> f64 {
        self.value(0.0, minus_branch)
    }
}

/// Roots of `8 m^2 = l (1 + m^2)^2` for `0 < l <= 2`.
pub fn gelfand_exact(lambda: f64) -> Result<GelfandBranch, SolverError> {
    if !(lambda > 0.0) {
        return Err(SolverError::Invalid("lambda must be positive".into()));
    }
    if lambda > 2.0 {
        return Err(SolverError::NoRealRoot { lambda });
    }
    // Quadratic in t = m^2: l t^2 + (2l - 8) t + l = 0.
    let root = (2.0 * (2.0 - lambda)).sqrt();
    let t_minus = (4.0 - lambda - 2.0 * root) / lambda;
    let t_plus = (4.0 - lambda + 2.0 * root) / lambda;
    Ok(GelfandBranch { lambda, mu_minus: t_minus.max(0.0).sqrt(), mu_plus: t_plus.max(0.0).sqrt() })
}
