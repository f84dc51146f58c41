//! C ABI for the singular Liouville laboratory.
//!
//! The surface is a single opaque handle, [`LlLab`], built from the same
//! JSON configuration the command-line tool accepts. Every entry point
//! returns an [`LlStatus`]; a human-readable description of the most recent
//! failure on the calling thread is available through [`ll_last_error`].
//! Panics never unwind across the boundary — they are caught and reported
//! as [`LlStatus::Panic`].
//!
//! The generated header is committed at `include/liouville_lab.h` and
//! refreshed by the build script on every compile.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use liouville_lab::config::LabConfig;
use liouville_lab::disk::{green, DiskMesh, P2};
use liouville_lab::extract::{extract_with_offset, DensityEval};
use liouville_lab::potential::Potential;
use liouville_lab::quad::WeightField;
use liouville_lab::solver::{
    continuation_run, newton_solve, LiouvilleProblem, Schedule, SolutionField,
};

/// Outcome of a call across the C boundary.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LlStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// The configuration or an argument violated a hypothesis.
    InvalidArgument = 2,
    /// The nonlinear solve or continuation did not converge.
    SolverFailure = 3,
    /// A panic was caught at the boundary; see `ll_last_error`.
    Panic = 4,
}

/// Scalar facts about one accepted solution.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct LlSolveStats {
    pub lambda: f64,
    /// `∫ λ V w e^u` by corrected quadrature.
    pub total_mass: f64,
    /// Same integral with the potential dropped.
    pub weight_mass: f64,
    pub peak: f64,
    pub u_center: f64,
    pub residual_norm: f64,
    pub newton_iters: u64,
}

/// One extracted concentration candidate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct LlCandidate {
    pub center_x: f64,
    pub center_y: f64,
    /// Concentration scale: distance to the boundary capped by the
    /// separation from earlier candidates.
    pub delta: f64,
    pub peak: f64,
    pub boundary_distance: f64,
    /// Mass of the claimed ball under the configured density.
    pub local_mass: f64,
    /// `local_mass / 8π`, the quantization reading.
    pub mass_over_8pi: f64,
}

/// Opaque laboratory scene: mesh, singular weight, and potential, as
/// described by a JSON configuration.
pub struct LlLab {
    config: LabConfig,
    mesh: DiskMesh,
    weights: WeightField,
    potential: Potential,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn fail(status: LlStatus, message: &str) -> LlStatus {
    set_error(message);
    status
}

/// Description of the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the same
/// thread.
#[no_mangle]
pub extern "C" fn ll_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn guarded(body: impl FnOnce() -> LlStatus) -> LlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic across the C boundary".to_string());
            fail(LlStatus::Panic, &msg)
        }
    }
}

fn build_lab(config_json: &str) -> Result<LlLab, String> {
    let config = LabConfig::from_json_str(config_json).map_err(|e| e.to_string())?;
    let singularity = config.singularity().map_err(|e| e.to_string())?;
    let mesh = DiskMesh::build(
        config.mesh.n_r,
        config.mesh.n_t,
        config.mesh.grade_exponent,
        &[],
        &singularity,
    )
    .map_err(|e| e.to_string())?;
    let weights = WeightField::new(&mesh).map_err(|e| e.to_string())?;
    let potential = config.build_potential().map_err(|e| e.to_string())?;
    Ok(LlLab { config, mesh, weights, potential })
}

/// Build a laboratory from a JSON configuration (`"{}"` selects every
/// default) and store the handle in `out`.
///
/// # Safety
/// `config_json` must point to a NUL-terminated string and `out` to a
/// writable handle slot. On any status other than `Ok`, `*out` is null.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_new(
    config_json: *const c_char,
    out: *mut *mut LlLab,
) -> LlStatus {
    if out.is_null() {
        return fail(LlStatus::NullPointer, "out handle pointer is null");
    }
    *out = std::ptr::null_mut();
    if config_json.is_null() {
        return fail(LlStatus::NullPointer, "config_json is null");
    }
    let text = match CStr::from_ptr(config_json).to_str() {
        Ok(t) => t.to_owned(),
        Err(_) => return fail(LlStatus::InvalidArgument, "config_json is not UTF-8"),
    };
    guarded(|| match build_lab(&text) {
        Ok(lab) => {
            *out = Box::into_raw(Box::new(lab));
            LlStatus::Ok
        }
        Err(message) => fail(LlStatus::InvalidArgument, &message),
    })
}

/// Release a handle obtained from [`ll_lab_new`]. A null handle is a no-op.
///
/// # Safety
/// `lab` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_free(lab: *mut LlLab) {
    if !lab.is_null() {
        drop(Box::from_raw(lab));
    }
}

/// Number of mesh nodes; solution buffers hold exactly this many doubles.
///
/// # Safety
/// `lab` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_node_count(lab: *const LlLab) -> usize {
    if lab.is_null() {
        return 0;
    }
    (*lab).mesh.len()
}

/// Copy node coordinates as interleaved pairs `x0 y0 x1 y1 …` into
/// `out_xy`, which must hold `2 * ll_lab_node_count` doubles.
///
/// # Safety
/// `lab` must be a live handle and `out_xy` writable for the stated length.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_nodes(lab: *const LlLab, out_xy: *mut f64) -> LlStatus {
    if lab.is_null() || out_xy.is_null() {
        return fail(LlStatus::NullPointer, "lab or out_xy is null");
    }
    let mesh = &(*lab).mesh;
    let out = std::slice::from_raw_parts_mut(out_xy, 2 * mesh.len());
    for (i, p) in mesh.nodes.iter().enumerate() {
        out[2 * i] = p.x;
        out[2 * i + 1] = p.y;
    }
    LlStatus::Ok
}

unsafe fn deliver(
    lab: &LlLab,
    sol: &SolutionField,
    u_out: *mut f64,
    stats_out: *mut LlSolveStats,
) {
    let out = std::slice::from_raw_parts_mut(u_out, lab.mesh.len());
    out.copy_from_slice(&sol.u);
    if !stats_out.is_null() {
        *stats_out = LlSolveStats {
            lambda: sol.lambda,
            total_mass: sol.total_mass,
            weight_mass: sol.weight_mass,
            peak: sol.peak,
            u_center: sol.u_center,
            residual_norm: sol.residual_norm,
            newton_iters: sol.newton_iters as u64,
        };
    }
}

/// Solve at a fixed coupling `lambda` from the zero initial field and write
/// the nodal solution into `u_out` (`ll_lab_node_count` doubles).
/// `stats_out` may be null.
///
/// # Safety
/// `lab` must be a live handle and `u_out` writable for the stated length.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_solve_lambda(
    lab: *const LlLab,
    lambda: f64,
    u_out: *mut f64,
    stats_out: *mut LlSolveStats,
) -> LlStatus {
    if lab.is_null() || u_out.is_null() {
        return fail(LlStatus::NullPointer, "lab or u_out is null");
    }
    let lab = &*lab;
    guarded(|| {
        let problem = match LiouvilleProblem::new(&lab.mesh, &lab.weights, &lab.potential) {
            Ok(p) => p,
            Err(e) => return fail(LlStatus::InvalidArgument, &e.to_string()),
        };
        let opts = lab.config.solver_opts();
        match newton_solve(&problem, &vec![0.0; lab.mesh.len()], lambda, &opts) {
            Ok(sol) => {
                deliver(lab, &sol, u_out, stats_out);
                LlStatus::Ok
            }
            Err(e) => fail(LlStatus::SolverFailure, &e.to_string()),
        }
    })
}

/// Continue the trivial branch to the prescribed total mass and write the
/// nodal solution into `u_out` (`ll_lab_node_count` doubles). `stats_out`
/// may be null.
///
/// # Safety
/// `lab` must be a live handle and `u_out` writable for the stated length.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_solve_mass(
    lab: *const LlLab,
    mass: f64,
    u_out: *mut f64,
    stats_out: *mut LlSolveStats,
) -> LlStatus {
    if lab.is_null() || u_out.is_null() {
        return fail(LlStatus::NullPointer, "lab or u_out is null");
    }
    let lab = &*lab;
    guarded(|| {
        let problem = match LiouvilleProblem::new(&lab.mesh, &lab.weights, &lab.potential) {
            Ok(p) => p,
            Err(e) => return fail(LlStatus::InvalidArgument, &e.to_string()),
        };
        let schedule = Schedule::MassTargets(vec![mass]);
        let stop = lab.config.stop_rule();
        let opts = lab.config.solver_opts();
        match continuation_run(&problem, &schedule, &stop, &opts) {
            Ok(family) => match (family.members.last(), family.failed) {
                (Some(sol), None) => {
                    deliver(lab, sol, u_out, stats_out);
                    LlStatus::Ok
                }
                (_, failed) => fail(
                    LlStatus::SolverFailure,
                    failed.as_deref().unwrap_or("continuation returned no members"),
                ),
            },
            Err(e) => fail(LlStatus::SolverFailure, &e.to_string()),
        }
    })
}

/// Extract concentration candidates from a nodal field `u` at coupling
/// `lambda`, using the extraction settings of the handle's configuration.
/// At most `capacity` candidates are written to `candidates_out`;
/// `count_out` receives the number found (which may exceed `capacity`) and
/// `exterior_sup_out` the field supremum outside every claimed ball (NaN
/// when the balls cover the mesh). `exterior_sup_out` may be null.
///
/// # Safety
/// `lab` must be a live handle, `u` readable for `ll_lab_node_count`
/// doubles, `candidates_out` writable for `capacity` entries, and
/// `count_out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_lab_extract(
    lab: *const LlLab,
    u: *const f64,
    lambda: f64,
    candidates_out: *mut LlCandidate,
    capacity: usize,
    count_out: *mut usize,
    exterior_sup_out: *mut f64,
) -> LlStatus {
    if lab.is_null() || u.is_null() || count_out.is_null() {
        return fail(LlStatus::NullPointer, "lab, u, or count_out is null");
    }
    if capacity > 0 && candidates_out.is_null() {
        return fail(LlStatus::NullPointer, "candidates_out is null with nonzero capacity");
    }
    let lab = &*lab;
    let field = std::slice::from_raw_parts(u, lab.mesh.len()).to_vec();
    *count_out = 0;
    guarded(|| {
        let v_values: Vec<f64> =
            lab.mesh.nodes.iter().map(|&p| lab.potential.eval(p)).collect();
        let cell_masses: Vec<f64> = (0..lab.mesh.len())
            .map(|i| {
                lambda * v_values[i] * field[i].exp() * lab.weights.corrected_cell_weight[i]
            })
            .collect();
        let report = match extract_with_offset(
            &lab.mesh,
            &field,
            lab.config.extraction.epsilon,
            lab.config.extraction.peak_threshold_offset,
            lab.config.extraction.max_candidates,
            DensityEval::CellMass(&cell_masses),
        ) {
            Ok(r) => r,
            Err(e) => return fail(LlStatus::InvalidArgument, &e.to_string()),
        };
        *count_out = report.candidates.len();
        let written = report.candidates.len().min(capacity);
        if written > 0 {
            let out = std::slice::from_raw_parts_mut(candidates_out, written);
            for (slot, (cand, &q8)) in out
                .iter_mut()
                .zip(report.candidates.iter().zip(report.quantization_8pi.iter()))
            {
                *slot = LlCandidate {
                    center_x: cand.center.x,
                    center_y: cand.center.y,
                    delta: cand.delta,
                    peak: cand.peak,
                    boundary_distance: cand.boundary_distance,
                    local_mass: cand.local_mass,
                    mass_over_8pi: q8,
                };
            }
        }
        if !exterior_sup_out.is_null() {
            *exterior_sup_out = report.exterior_sup.unwrap_or(f64::NAN);
        }
        LlStatus::Ok
    })
}

/// Dirichlet Green function of the unit disk, `G(x, y)`. Returns NaN when
/// either point lies outside the closed disk or on the diagonal.
#[no_mangle]
pub extern "C" fn ll_green_value(x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    let x = P2::new(x1, x2);
    let y = P2::new(y1, y2);
    if x.norm() > 1.0 || y.norm() > 1.0 {
        return f64::NAN;
    }
    match green(x, y) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}
