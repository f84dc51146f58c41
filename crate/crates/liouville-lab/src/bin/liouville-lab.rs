//! Command-line laboratory driver.
//!
//! Verbs: `verify` (built-in oracle suites), `solve` (one target),
//! `continue` (full continuation schedule), `extract` (blow-up extraction
//! on a stored solution), `pohozaev` (balance terms for a stored family).
//!
//! Exit codes: 0 success, 1 solver/analysis failure (summaries are still
//! written), 2 config rejection, 3 I/O failure. Data goes to files under
//! the output directory; logs and timing go to standard error only, so
//! identical inputs produce byte-identical outputs.

use clap::{Args, Parser, Subcommand};
use liouville_lab::config::{ConfigError, ContinuationMode, LabConfig};
use liouville_lab::disk::{build_half_disk, green_val, DiskMesh, SingularityConfig, P2};
use liouville_lab::extract::{extract_with_offset, DensityEval, StructuredInterp};
use liouville_lab::families::{ball_mass_exact, bubble_ball_integral, bubble_tail, Bubble};
use liouville_lab::pohozaev::{
    calibrate_boundary_coeff, grad_diff_norm, manufactured_identity_check, pohozaev_boundary,
    pohozaev_lhs, PivotPoint, PohozaevReport, BOUNDARY_COEFF,
};
use liouville_lab::potential::Potential;
use liouville_lab::quad::{green_apply, GreenOperator, WeightField};
use liouville_lab::report::{
    log_wall_clock, pohozaev_json, read_solution_csv, write_extraction_json, write_family_csv,
    write_pohozaev_csv, write_solution_csv, write_summary_json,
};
use liouville_lab::solver::{
    continuation_run, fold_locate, newton_solve, LiouvilleProblem, Schedule, SolutionField,
    SolverError,
};
use rand::Rng;
use rand::SeedableRng;
use std::path::{Path, PathBuf};
use std::time::Instant;

const EXIT_SOLVER: i32 = 1;
const EXIT_CONFIG: i32 = 2;
const EXIT_IO: i32 = 3;

/// Radius of the half-disk chart used by the pohozaev verb, as a fraction
/// of the disk (the chart corner sits at the boundary singularity).
const CHART_RADIUS: f64 = 0.5;

#[derive(Parser)]
#[command(name = "liouville-lab", version, about = "Boundary-singular Liouville laboratory")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir from the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Size of the worker thread pool (default: one thread per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for the sampling-based verification checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the built-in oracle suites and write a check summary.
    Verify(Common),
    /// Solve for the first continuation target and store the solution.
    Solve(Common),
    /// Run the full continuation schedule and store the family.
    Continue(Common),
    /// Extract blow-up candidates from a stored solution file.
    Extract {
        #[command(flatten)]
        common: Common,
        /// Solution CSV produced by `solve` or `continue`.
        #[arg(long)]
        solution: PathBuf,
    },
    /// Compute the balance terms for every member of a stored family.
    Pohozaev {
        #[command(flatten)]
        common: Common,
        /// Directory holding solution_####.csv files.
        #[arg(long)]
        family: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match &e {
            ConfigError::Io(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<liouville_lab::report::ReportError> for Failure {
    fn from(e: liouville_lab::report::ReportError) -> Self {
        Failure::new(EXIT_IO, e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Failure::new(EXIT_SOLVER, e.to_string())
    }
}

impl From<liouville_lab::disk::DiskError> for Failure {
    fn from(e: liouville_lab::disk::DiskError) -> Self {
        Failure::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<liouville_lab::quad::QuadError> for Failure {
    fn from(e: liouville_lab::quad::QuadError) -> Self {
        Failure::new(EXIT_SOLVER, e.to_string())
    }
}

impl From<liouville_lab::extract::ExtractError> for Failure {
    fn from(e: liouville_lab::extract::ExtractError) -> Self {
        Failure::new(EXIT_SOLVER, e.to_string())
    }
}

impl From<liouville_lab::pohozaev::PohozaevError> for Failure {
    fn from(e: liouville_lab::pohozaev::PohozaevError) -> Self {
        Failure::new(EXIT_SOLVER, e.to_string())
    }
}

fn main() {
    liouville_lab::linalg::pin_blas_threads();
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("[liouville-lab] error: {}", f.message);
            f.code
        }
    };
    std::process::exit(code);
}

enum Action {
    Verify,
    Solve,
    Continue,
    Extract(PathBuf),
    Pohozaev(PathBuf),
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let (common, action) = match cli.verb {
        Verb::Verify(c) => (c, Action::Verify),
        Verb::Solve(c) => (c, Action::Solve),
        Verb::Continue(c) => (c, Action::Continue),
        Verb::Extract { common, solution } => (common, Action::Extract(solution)),
        Verb::Pohozaev { common, family } => (common, Action::Pohozaev(family)),
    };
    let mut config = LabConfig::from_json_file(&common.config)?;
    if let Some(out) = &common.out {
        config.output.dir = out.display().to_string();
    }
    let seed = common.seed;
    let run = move || -> Result<(), Failure> {
        match action {
            Action::Verify => cmd_verify(&config, seed),
            Action::Solve => cmd_solve(&config),
            Action::Continue => cmd_continue(&config),
            Action::Extract(solution) => cmd_extract(&config, &solution),
            Action::Pohozaev(family) => cmd_pohozaev(&config, &family),
        }
    };
    match common.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
            pool.install(run)
        }
        None => run(),
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Scene {
    mesh: DiskMesh,
    weights: WeightField,
    potential: Potential,
}

fn build_scene(config: &LabConfig) -> Result<Scene, Failure> {
    let sing = config.singularity()?;
    let mesh = DiskMesh::build(
        config.mesh.n_r,
        config.mesh.n_t,
        config.mesh.grade_exponent,
        &[],
        &sing,
    )?;
    let weights = WeightField::new(&mesh)?;
    let potential = config.build_potential()?;
    Ok(Scene { mesh, weights, potential })
}

fn summary_base(config: &LabConfig, command: &str) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "config": serde_json::from_str::<serde_json::Value>(&config.to_json_string()).unwrap(),
        "mesh": {
            "n_r": config.mesh.n_r,
            "n_t": config.mesh.n_t,
            "grade_exponent": config.mesh.grade_exponent,
        },
    })
}

// ---------------------------------------------------------------- verify --

fn check_green_kernel(seed: u64) -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let p = P2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.norm() < 0.95 {
            return p;
        }
    };
    let mut max_sym = 0.0f64;
    let mut max_bnd = 0.0f64;
    let mut max_cen = 0.0f64;
    for k in 0..32 {
        let x = sample(&mut rng);
        let mut y = sample(&mut rng);
        if (x - y).norm() < 1e-6 {
            y.x = -y.x;
        }
        max_sym = max_sym.max((green_val(x, y) - green_val(y, x)).abs());
        let t = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
        let b = P2::new(t.cos(), t.sin());
        max_bnd = max_bnd.max(green_val(b, y).abs());
        if y.norm() > 1e-3 {
            let expect = -y.norm().ln() / (2.0 * std::f64::consts::PI);
            max_cen = max_cen.max((green_val(P2::zeros(), y) - expect).abs());
        }
    }
    Check {
        name: "green_kernel",
        pass: max_sym <= 1e-12 && max_bnd <= 1e-12 && max_cen <= 1e-12,
        detail: format!("symmetry {max_sym:.3e}, boundary {max_bnd:.3e}, center row {max_cen:.3e}"),
    }
}

fn poisson_error(n_r: usize, n_t: usize) -> Result<f64, Failure> {
    let cfg = SingularityConfig::new(0.0, 0.25)?;
    let mesh = DiskMesh::build(n_r, n_t, 1.0, &[], &cfg)?;
    let rho = vec![1.0; mesh.len()];
    let ku = green_apply(&mesh, &rho)?;
    let err = mesh
        .nodes
        .iter()
        .zip(&ku)
        .map(|(p, &v)| (v - 0.25 * (1.0 - p.norm_squared())).abs())
        .fold(0.0f64, f64::max);
    Ok(err / 0.25)
}

fn check_poisson_oracle() -> Result<Check, Failure> {
    let coarse = poisson_error(32, 64)?;
    let fine = poisson_error(64, 128)?;
    Ok(Check {
        name: "poisson_oracle",
        pass: fine <= 0.01 && coarse / fine >= 3.0,
        detail: format!("relative error {coarse:.3e} -> {fine:.3e} (ratio {:.2})", coarse / fine),
    })
}

fn check_gelfand_oracle() -> Result<Check, Failure> {
    let cfg = SingularityConfig::new(0.0, 1e-6)?;
    let mesh = DiskMesh::build(24, 48, 1.0, &[], &cfg)?;
    let weights = WeightField::new(&mesh)?;
    let potential = Potential::constant(1.0, 1.0).map_err(ConfigError::from)?;
    let problem = LiouvilleProblem::new(&mesh, &weights, &potential)?;
    // Failed attempts past the fold burn the whole iteration budget, so cap
    // it below the library default; converging solves need far fewer.
    let opts = liouville_lab::solver::SolverOpts { max_iter: 30, ..Default::default() };
    let sol = newton_solve(&problem, &vec![0.0; mesh.len()], 1.0, &opts)?;
    let center_err = (sol.u_center - 0.316685).abs();
    let fold = fold_locate(&problem, 1.6, 2.4, 0.02, &opts)?;
    let fold_err = (fold - 2.0).abs();
    Ok(Check {
        name: "gelfand_oracle",
        pass: center_err <= 1e-2 && fold_err <= 0.05,
        detail: format!("u(0) error {center_err:.3e}, fold at {fold:.4}"),
    })
}

fn check_bubble_mass() -> Check {
    let bubble = Bubble { mu: 1e3, center: P2::new(0.3, 0.2) };
    let one = |_: P2| 1.0;
    let mut worst = 0.0f64;
    for radius in [0.1, 0.4] {
        let got = bubble_ball_integral(&bubble, bubble.center, radius, &one);
        let want = ball_mass_exact(&bubble, radius);
        worst = worst.max((got - want).abs() / want);
    }
    let tail = bubble_tail(&bubble);
    let plane = tail.interior_mass + tail.exterior_mass;
    let plane_err = (plane - liouville_lab::BUBBLE_MASS).abs() / liouville_lab::BUBBLE_MASS;
    Check {
        name: "bubble_mass",
        pass: worst <= 1e-3 && plane_err <= 1e-9,
        detail: format!("ball error {worst:.3e}, plane mass error {plane_err:.3e}"),
    }
}

fn check_manufactured_pohozaev() -> Result<Check, Failure> {
    let gap = manufactured_identity_check(64)?;
    let (chosen, gaps) = calibrate_boundary_coeff(64)?;
    Ok(Check {
        name: "manufactured_pohozaev",
        pass: gap <= 1e-3 && chosen == -0.5 && gaps[1] > 100.0 * gaps[0],
        detail: format!("identity gap {gap:.3e}, coefficient {chosen}, rejected-sign gap {:.3e}", gaps[1]),
    })
}

fn cmd_verify(config: &LabConfig, seed: u64) -> Result<(), Failure> {
    let started = Instant::now();
    let checks = vec![
        check_green_kernel(seed),
        check_poisson_oracle()?,
        check_gelfand_oracle()?,
        check_bubble_mass(),
        check_manufactured_pohozaev()?,
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!("check {}: {} ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    let mut summary = summary_base(config, "verify");
    summary["checks"] = serde_json::Value::Array(
        checks
            .iter()
            .map(|c| serde_json::json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect(),
    );
    summary["all_pass"] = serde_json::Value::Bool(all_pass);
    write_summary_json(Path::new(&config.output.dir), &summary)?;
    log_wall_clock("verify", started);
    if all_pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_SOLVER, "one or more verification suites failed"))
    }
}

// ------------------------------------------------------- solve / continue --

fn solution_summary(sol: &SolutionField) -> serde_json::Value {
    serde_json::json!({
        "lambda": sol.lambda,
        "total_mass": sol.total_mass,
        "weight_mass": sol.weight_mass,
        "peak": sol.peak,
        "u_center": sol.u_center,
        "residual_norm": sol.residual_norm,
        "newton_iters": sol.newton_iters,
    })
}

fn write_failed_summary(config: &LabConfig, command: &str, error: &str) -> Result<(), Failure> {
    let mut summary = summary_base(config, command);
    summary["converged"] = serde_json::Value::Bool(false);
    summary["error"] = serde_json::Value::String(error.to_string());
    write_summary_json(Path::new(&config.output.dir), &summary)?;
    Ok(())
}

fn cmd_solve(config: &LabConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let scene = build_scene(config)?;
    let problem = LiouvilleProblem::new(&scene.mesh, &scene.weights, &scene.potential)?;
    let Some(&target) = config.continuation.targets.first() else {
        return Err(Failure::new(EXIT_CONFIG, "continuation.targets must not be empty"));
    };
    let opts = config.solver_opts();
    let result = match config.continuation.mode {
        ContinuationMode::Lambda => newton_solve(&problem, &vec![0.0; scene.mesh.len()], target, &opts),
        ContinuationMode::Mass => {
            let schedule = Schedule::MassTargets(vec![target]);
            continuation_run(&problem, &schedule, &config.stop_rule(), &opts).and_then(|fam| {
                if let Some(msg) = fam.failed {
                    Err(SolverError::Invalid(msg))
                } else {
                    fam.members
                        .into_iter()
                        .next()
                        .ok_or_else(|| SolverError::Invalid("empty continuation result".into()))
                }
            })
        }
    };
    let sol = match result {
        Ok(sol) => sol,
        Err(e) => {
            write_failed_summary(config, "solve", &e.to_string())?;
            return Err(e.into());
        }
    };
    let out = Path::new(&config.output.dir);
    let v_values = scene.potential.values(&scene.mesh.nodes);
    let path = write_solution_csv(out, 0, &scene.mesh, &scene.weights, &v_values, &sol)?;
    let mut summary = summary_base(config, "solve");
    summary["converged"] = serde_json::Value::Bool(true);
    summary["solution"] = solution_summary(&sol);
    summary["files"] = serde_json::json!([path.file_name().unwrap().to_str().unwrap()]);
    write_summary_json(out, &summary)?;
    log_wall_clock("solve", started);
    Ok(())
}

fn cmd_continue(config: &LabConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let scene = build_scene(config)?;
    let problem = LiouvilleProblem::new(&scene.mesh, &scene.weights, &scene.potential)?;
    let family = continuation_run(
        &problem,
        &config.schedule(),
        &config.stop_rule(),
        &config.solver_opts(),
    )?;
    let out = Path::new(&config.output.dir);
    let v_values = scene.potential.values(&scene.mesh.nodes);
    let mut files = Vec::new();
    for (k, sol) in family.members.iter().enumerate() {
        let p = write_solution_csv(out, k, &scene.mesh, &scene.weights, &v_values, sol)?;
        files.push(p.file_name().unwrap().to_str().unwrap().to_string());
    }
    write_family_csv(out, &family.members)?;
    let mut summary = summary_base(config, "continue");
    summary["converged"] = serde_json::Value::Bool(family.failed.is_none());
    summary["members"] = serde_json::Value::Array(
        family.members.iter().map(solution_summary).collect(),
    );
    summary["files"] = serde_json::json!(files);
    summary["halted"] = match &family.halted {
        Some(h) => serde_json::Value::String(h.clone()),
        None => serde_json::Value::Null,
    };
    summary["failed"] = match &family.failed {
        Some(f) => serde_json::Value::String(f.clone()),
        None => serde_json::Value::Null,
    };
    write_summary_json(out, &summary)?;
    log_wall_clock("continue", started);
    if let Some(msg) = family.failed {
        return Err(Failure::new(EXIT_SOLVER, msg));
    }
    Ok(())
}

// ----------------------------------------------------------------- extract --

fn cell_masses(scene: &Scene, u: &[f64], lambda: f64) -> Vec<f64> {
    let v_values = scene.potential.values(&scene.mesh.nodes);
    (0..scene.mesh.len())
        .map(|i| lambda * v_values[i] * u[i].exp() * scene.weights.corrected_cell_weight[i])
        .collect()
}

fn cmd_extract(config: &LabConfig, solution: &Path) -> Result<(), Failure> {
    let started = Instant::now();
    let scene = build_scene(config)?;
    let (u, lambda) = read_solution_csv(solution)?;
    if u.len() != scene.mesh.len() {
        return Err(Failure::new(
            EXIT_IO,
            format!(
                "solution file holds {} nodes but the configured mesh has {}",
                u.len(),
                scene.mesh.len()
            ),
        ));
    }
    let masses = cell_masses(&scene, &u, lambda);
    let report = extract_with_offset(
        &scene.mesh,
        &u,
        config.extraction.epsilon,
        config.extraction.peak_threshold_offset,
        config.extraction.max_candidates,
        DensityEval::CellMass(&masses),
    )?;
    let out = Path::new(&config.output.dir);
    write_extraction_json(out, &report)?;
    let mut summary = summary_base(config, "extract");
    summary["solution_file"] = serde_json::Value::String(solution.display().to_string());
    summary["candidates"] = serde_json::json!(report.candidates.len());
    summary["exterior_sup"] = serde_json::json!(report.exterior_sup);
    summary["mass_over_8pi"] = serde_json::json!(report.quantization_8pi);
    write_summary_json(out, &summary)?;
    log_wall_clock("extract", started);
    Ok(())
}

// ---------------------------------------------------------------- pohozaev --

/// Samples a full-disk nodal field into the half-disk chart whose corner is
/// the boundary singularity and whose flat edge is tangent to the circle;
/// points outside the closed disk take the boundary value zero.
struct Chart {
    origin: P2,
    e1: P2,
    e2: P2,
    rho: f64,
}

impl Chart {
    fn new(x0: P2) -> Self {
        let e1 = -x0;
        Self { origin: x0, e1, e2: P2::new(-e1.y, e1.x), rho: CHART_RADIUS }
    }

    fn to_disk(&self, y: P2) -> P2 {
        self.origin + self.rho * (y.x * self.e1 + y.y * self.e2)
    }

    fn from_disk(&self, x: P2) -> P2 {
        let d = x - self.origin;
        P2::new(d.dot(&self.e1) / self.rho, d.dot(&self.e2) / self.rho)
    }
}

fn member_report(
    scene: &Scene,
    config: &LabConfig,
    u: &[f64],
    lambda: f64,
) -> Result<Option<PohozaevReport>, Failure> {
    let masses = cell_masses(scene, u, lambda);
    let extraction = extract_with_offset(
        &scene.mesh,
        u,
        config.extraction.epsilon,
        config.extraction.peak_threshold_offset,
        config.extraction.max_candidates,
        DensityEval::CellMass(&masses),
    )?;
    let Some(candidate) = extraction.candidates.first() else {
        return Ok(None);
    };
    let alpha = scene.mesh.alpha;
    let v_star = scene.potential.eval(candidate.center);

    // Masked re-solve: the Green representation is linear in the density,
    // so the family member re-solved without its concentration ball is
    // exactly u minus the projection of the ball's own density.
    let op = GreenOperator::new(&scene.mesh);
    let v_values = scene.potential.values(&scene.mesh.nodes);
    let ball = candidate.delta * config.extraction.epsilon;
    let rho_ball: Vec<f64> = (0..scene.mesh.len())
        .map(|i| {
            if (scene.mesh.nodes[i] - candidate.center).norm() <= ball {
                let a = scene.mesh.cell_area[i];
                if a > 0.0 {
                    lambda * v_values[i] * u[i].exp() * scene.weights.corrected_cell_weight[i] / a
                } else {
                    0.0
                }
            } else {
                0.0
            }
        })
        .collect();
    let u_ball = op.apply(&rho_ball)?;
    let u_ref: Vec<f64> = u.iter().zip(&u_ball).map(|(a, b)| a - b).collect();
    let gq = grad_diff_norm(&scene.mesh, u, &u_ref, 1.5)?;

    // Chart transfer: sample u and the density into the half-disk whose
    // corner sits at x0. In chart coordinates the member solves
    // -lap(u) = lambda_chart V |y|^(-2a) e^u with lambda_chart below.
    let chart = Chart::new(scene.mesh.x0);
    let n_half = config.mesh.n_r.max(16);
    let (_, half) = build_half_disk(n_half, n_half)?;
    let interp = StructuredInterp::new(&scene.mesh)?;
    let lambda_chart = lambda * chart.rho.powf(2.0 - 2.0 * alpha);
    let mut u_chart = vec![0.0; half.len()];
    let mut f_chart = vec![0.0; half.len()];
    for i in 0..half.len() {
        let y = half.nodes[i];
        let x = chart.to_disk(y);
        let inside = x.norm() <= 1.0;
        let val = if inside { interp.eval(&scene.mesh, u, x).0 } else { 0.0 };
        u_chart[i] = val;
        let r = y.norm();
        if inside && r > 1e-14 {
            f_chart[i] =
                lambda_chart * scene.potential.eval(x) * r.powf(-2.0 * alpha) * val.exp();
        }
    }
    let pivot = PivotPoint::new(chart.from_disk(candidate.center).y);
    let report = liouville_lab::pohozaev::assemble_report(
        &half,
        &u_chart,
        &f_chart,
        &pivot,
        v_star,
        alpha,
        lambda_chart,
        candidate.local_mass,
        vec![(1.5, gq)],
    )?;
    Ok(Some(report))
}

fn cmd_pohozaev(config: &LabConfig, family: &Path) -> Result<(), Failure> {
    let started = Instant::now();
    let scene = build_scene(config)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(family)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", family.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("solution_") && n.ends_with(".csv"))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::new(
            EXIT_IO,
            format!("no solution_####.csv files under {}", family.display()),
        ));
    }

    // Row 0 is the manufactured calibration: the balance evaluated on a
    // field with a known closed-form identity, at the check's default
    // resolution or finer.
    let n = config.mesh.n_r.max(liouville_lab::pohozaev::DEFAULT_IDENTITY_RESOLUTION);
    let (_, half) = build_half_disk(n, n)?;
    let u_m: Vec<f64> = half.nodes.iter().map(|x| x.x * (1.0 - x.norm_squared())).collect();
    let f_m: Vec<f64> = half.nodes.iter().map(|x| 8.0 * x.x).collect();
    let pivot0 = PivotPoint::new(0.0);
    let lhs_m = pohozaev_lhs(&half, &u_m, &f_m, &pivot0)?;
    let a_m = pohozaev_boundary(&half, &u_m, &pivot0, BOUNDARY_COEFF)?;
    let mut reports = vec![PohozaevReport {
        lhs_interior: lhs_m,
        a_term: a_m,
        b_term: 0.0,
        interior_2a: [0.0, 0.0],
        residual: 0.0,
        identity_gap: liouville_lab::pohozaev::identity_gap(lhs_m, a_m),
        grad_q_norms: Vec::new(),
    }];

    let mut skipped = Vec::new();
    for path in &files {
        let (u, lambda) = read_solution_csv(path)?;
        if u.len() != scene.mesh.len() {
            return Err(Failure::new(
                EXIT_IO,
                format!(
                    "{} holds {} nodes but the configured mesh has {}",
                    path.display(),
                    u.len(),
                    scene.mesh.len()
                ),
            ));
        }
        match member_report(&scene, config, &u, lambda)? {
            Some(rep) => reports.push(rep),
            None => skipped.push(path.file_name().unwrap().to_str().unwrap().to_string()),
        }
    }

    let out = Path::new(&config.output.dir);
    write_pohozaev_csv(out, &reports)?;
    let mut summary = summary_base(config, "pohozaev");
    summary["family_dir"] = serde_json::Value::String(family.display().to_string());
    summary["members"] = serde_json::json!(files.len());
    summary["rows"] = serde_json::json!(reports.len());
    summary["calibration_identity_gap"] = serde_json::json!(reports[0].identity_gap);
    summary["skipped_no_candidate"] = serde_json::json!(skipped);
    summary["reports"] = serde_json::Value::Array(reports.iter().map(pohozaev_json).collect());
    write_summary_json(out, &summary)?;
    log_wall_clock("pohozaev", started);
    Ok(())
}
