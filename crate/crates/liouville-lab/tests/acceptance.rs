//! Acceptance suite: the laboratory's headline guarantees, one printed
//! pass/fail line per criterion.
//!
//! 1. Green/Poisson oracle accuracy and convergence under refinement.
//! 2. Closed-form branch value and fold location for the unweighted problem.
//! 3. Mass quantization against the 8π bubble mass on synthetic fields.
//! 4. Extraction geometry: boundary-distance/scale ratios with a stable
//!    fitted constant across bubble sharpness and extraction radius.
//! 5. Exterior boundedness along a mass-driven concentrating family.
//! 6. Pohozaev identity closure and flat-boundary annihilation.
//! 7. Compactness mechanism: residual arithmetic and monotone decay of the
//!    q = 1.5 gradient distance along a concentrating family.
//! 8. Hypothesis enforcement at config parse (exit code 2).
//! 9. Byte-identical outputs across worker-pool sizes.

use liouville_lab::disk::{DiskMesh, SingularityConfig, P2};
use liouville_lab::extract::{delta_order_check, extract, extract_with_offset, DensityEval};
use liouville_lab::families::{
    ball_mass_exact, bubble_ball_integral, project_member, superposed_field, Bubble,
};
use liouville_lab::pohozaev::{
    grad_diff_norm, manufactured_identity_check, pohozaev_boundary, theorem2_residual,
    PivotPoint,
};
use liouville_lab::potential::Potential;
use liouville_lab::quad::{green_apply, weight_eval, WeightField};
use liouville_lab::solver::{
    continuation_run, fold_locate, newton_solve, LiouvilleProblem, Schedule, SolverOpts,
    StopRule,
};
use std::process::Command;

struct Gate {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn mesh(n_r: usize, n_t: usize, grade: f64, alpha: f64) -> DiskMesh {
    let cfg = SingularityConfig::new(0.0, alpha).unwrap();
    DiskMesh::build(n_r, n_t, grade, &[], &cfg).unwrap()
}

/// Nearest non-boundary node to a requested point.
fn snap(mesh: &DiskMesh, p: P2) -> (usize, P2) {
    let i = (0..mesh.len())
        .filter(|&i| !mesh.boundary[i])
        .min_by(|&a, &b| {
            (mesh.nodes[a] - p)
                .norm()
                .partial_cmp(&(mesh.nodes[b] - p).norm())
                .unwrap()
        })
        .unwrap();
    (i, mesh.nodes[i])
}

// --------------------------------------------------------------------- 1 --

fn poisson_relative_error(n_r: usize, n_t: usize) -> f64 {
    let m = mesh(n_r, n_t, 1.0, 0.25);
    let ku = green_apply(&m, &vec![1.0; m.len()]).unwrap();
    m.nodes
        .iter()
        .zip(&ku)
        .map(|(p, &v)| (v - 0.25 * (1.0 - p.norm_squared())).abs())
        .fold(0.0f64, f64::max)
        / 0.25
}

fn criterion_1() -> Gate {
    let started = std::time::Instant::now();
    let coarse = poisson_relative_error(32, 64);
    let fine = poisson_relative_error(64, 128);
    let secs = started.elapsed().as_secs_f64();
    Gate {
        label: "Green/Poisson oracle",
        pass: fine <= 0.01 && coarse / fine >= 3.0 && secs <= 30.0,
        detail: format!(
            "error {coarse:.3e} -> {fine:.3e}, ratio {:.2}, {secs:.1}s",
            coarse / fine
        ),
    }
}

// --------------------------------------------------------------------- 2 --

fn criterion_2() -> Gate {
    let cfg = SingularityConfig::new(0.0, 1e-6).unwrap();
    let m = DiskMesh::build(24, 48, 1.0, &[], &cfg).unwrap();
    let w = WeightField::new(&m).unwrap();
    let v = Potential::constant(1.0, 1.0).unwrap();
    let problem = LiouvilleProblem::new(&m, &w, &v).unwrap();
    let opts = SolverOpts { max_iter: 30, ..Default::default() };
    let sol = newton_solve(&problem, &vec![0.0; m.len()], 1.0, &opts).unwrap();
    let center_err = (sol.u_center - 0.316685).abs();
    let fold = fold_locate(&problem, 1.6, 2.4, 0.02, &opts).unwrap();
    Gate {
        label: "closed-form branch and fold",
        pass: center_err <= 1e-2 && (fold - 2.0).abs() <= 0.05,
        detail: format!("u(0) error {center_err:.2e}, fold {fold:.4}"),
    }
}

// --------------------------------------------------------------------- 3 --

fn criterion_3() -> Gate {
    let m = mesh(32, 64, 2.0, 1e-3);
    let mut pass = true;
    let mut detail = String::new();

    // Ball integral oracle in closed form.
    let b = Bubble { mu: 1e3, center: P2::new(0.3, 0.2) };
    let one = |_: P2| 1.0;
    let mut oracle_worst = 0.0f64;
    for radius in [0.05, 0.2, 0.5] {
        let got = bubble_ball_integral(&b, b.center, radius, &one);
        let want = ball_mass_exact(&b, radius);
        oracle_worst = oracle_worst.max((got - want).abs() / want);
    }
    pass &= oracle_worst <= 1e-3;

    // One and two synthetic bubbles; claimed masses against 8π.
    for m_count in [1usize, 2] {
        let mut bubbles = vec![Bubble { mu: 1e3, center: snap(&m, P2::new(0.9, 0.0)).1 }];
        if m_count == 2 {
            bubbles.push(Bubble { mu: 1e3, center: snap(&m, P2::new(0.0, 0.9)).1 });
        }
        let u = superposed_field(&m, &bubbles);
        let bl = bubbles.clone();
        let density = move |c: P2, r: f64| -> f64 {
            bl.iter().map(|b| bubble_ball_integral(b, c, r, &one)).sum()
        };
        let report =
            extract_with_offset(&m, &u, 0.1, 5.0, 4, DensityEval::Analytic(&density)).unwrap();
        let total: f64 = report.quantization_8pi.iter().sum();
        let count_ok = report.candidates.len() == m_count;
        let mass_ok = (total - m_count as f64).abs() <= 0.05 * m_count as f64;
        pass &= count_ok && mass_ok;
        detail.push_str(&format!("m={m_count}: {} peaks, sum {total:.4}; ", report.candidates.len()));
    }
    detail.push_str(&format!("oracle error {oracle_worst:.1e}"));
    Gate { label: "mass quantization", pass, detail }
}

// --------------------------------------------------------------------- 4 --

fn criterion_4() -> Gate {
    let m = mesh(48, 96, 2.0, 1e-3);
    let (i0, c0) = snap(&m, P2::new(0.5, 0.0));
    let bd0 = 1.0 - c0.norm();
    let mut cs = Vec::new();
    let mut ratios_ok = true;
    let mut detail = String::new();
    let (row0, col0) = (i0 / m.n_t, i0 % m.n_t);
    for epsilon in [0.05f64, 0.1] {
        // Second center: whole radial steps inward along the same column,
        // just past the first claimed ball.
        let mut k = 1usize;
        let c1 = loop {
            let cand = m.nodes[m.idx(row0 - k, col0)];
            if (cand - c0).norm() >= 1.05 * bd0 * epsilon {
                break cand;
            }
            k += 1;
        };
        for mu in [1e2f64, 1e3] {
            let bubbles = [
                Bubble { mu, center: c0 },
                Bubble { mu: mu / 2.0, center: c1 },
            ];
            let u = superposed_field(&m, &bubbles);
            let one = |_: P2| 1.0;
            let density = move |c: P2, r: f64| -> f64 {
                bubbles.iter().map(|b| bubble_ball_integral(b, c, r, &one)).sum()
            };
            let threshold = bubbles[1].peak_value() - 1.0;
            let report =
                extract(&m, &u, epsilon, threshold, 2, DensityEval::Analytic(&density)).unwrap();
            if report.candidates.len() != 2 {
                ratios_ok = false;
                detail.push_str(&format!(
                    "mu={mu:.0e} eps={epsilon}: {} peaks; ",
                    report.candidates.len()
                ));
                continue;
            }
            let order = delta_order_check(&report, epsilon);
            ratios_ok &= order.ratios.iter().all(|r| *r >= 1.0 - 1e-12);
            cs.push(order.fitted_c);
        }
    }
    let c_mean = cs.iter().sum::<f64>() / cs.len() as f64;
    let stable = cs.iter().all(|c| (c - c_mean).abs() <= 0.2 * c_mean);
    let c_global = cs.iter().fold(0.0f64, |a, &b| a.max(b));
    detail.push_str(&format!(
        "fitted C {:?} (mean {c_mean:.3}, max {c_global:.3})",
        cs.iter().map(|c| (c * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    ));
    Gate { label: "extraction geometry", pass: ratios_ok && stable, detail }
}

// --------------------------------------------------------------------- 5 --

fn criterion_5() -> Gate {
    let cfg = SingularityConfig::new(0.0, 1e-3).unwrap();
    let m = DiskMesh::build(32, 64, 2.0, &[], &cfg).unwrap();
    let w = WeightField::new(&m).unwrap();
    let v = Potential::constant(1.0, 1.0).unwrap();
    let problem = LiouvilleProblem::new(&m, &w, &v).unwrap();
    let targets: Vec<f64> = (0..7).map(|k| 6.0 + 3.0 * k as f64).collect();
    let family = continuation_run(
        &problem,
        &Schedule::MassTargets(targets),
        &StopRule::default(),
        &SolverOpts::default(),
    )
    .unwrap();
    if let Some(why) = &family.failed {
        return Gate {
            label: "exterior boundedness",
            pass: false,
            detail: format!("continuation failed: {why}"),
        };
    }
    let mut peaks = Vec::new();
    let mut exteriors = Vec::new();
    for sol in &family.members {
        let masses: Vec<f64> = (0..m.len())
            .map(|i| {
                sol.lambda * problem.v_values[i] * sol.u[i].exp() * w.corrected_cell_weight[i]
            })
            .collect();
        let report =
            extract(&m, &sol.u, 0.2, f64::NEG_INFINITY, 1, DensityEval::CellMass(&masses))
                .unwrap();
        peaks.push(report.candidates[0].peak);
        exteriors.push(report.exterior_sup.unwrap());
    }
    let growth = peaks.last().unwrap() - peaks.first().unwrap();
    let max_step = exteriors
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0f64, f64::max);
    Gate {
        label: "exterior boundedness",
        pass: growth >= 5.0 && max_step <= 2.0,
        detail: format!("peak growth {growth:.2}, largest exterior step {max_step:.2}"),
    }
}

// --------------------------------------------------------------------- 6 --

fn criterion_6() -> Gate {
    let gap64 = manufactured_identity_check(64).unwrap();
    let gap128 = manufactured_identity_check(128).unwrap();

    // Flat annihilation probed end to end: a field supported in a strip
    // along the flat edge, away from the arc; the coefficient-dependent
    // part of the boundary functional must then vanish identically.
    let (_, half) = liouville_lab::disk::build_half_disk(32, 32).unwrap();
    let u: Vec<f64> = half
        .nodes
        .iter()
        .map(|x| {
            let a = (0.2 - x.x).max(0.0).powi(3);
            let b = (0.81 - x.y * x.y).max(0.0);
            a * b * x.y
        })
        .collect();
    let pivot = PivotPoint::new(0.1);
    let a1 = pohozaev_boundary(&half, &u, &pivot, 1.0).unwrap();
    let a0 = pohozaev_boundary(&half, &u, &pivot, 0.0).unwrap();
    let flat_leak = (a1 - a0).abs();
    Gate {
        label: "identity closure",
        pass: gap64 <= 1e-3 && gap128 <= gap64 / 3.0 && flat_leak <= 1e-12,
        detail: format!("gap {gap64:.2e} -> {gap128:.2e}, flat leak {flat_leak:.1e}"),
    }
}

// --------------------------------------------------------------------- 7 --

fn criterion_7() -> Gate {
    let alpha = 0.25;
    let m = mesh(48, 96, 2.0, alpha);
    let x0 = m.x0;
    let v = Potential::hoelder_bump(1.0, 1.0, 1.0, 0.75, x0, 1.0).unwrap();
    let epsilon = 0.1;

    let mut residual_exact = true;
    let mut grads = Vec::new();
    let mut masses = Vec::new();
    for i in 0..6 {
        let delta = 0.3 * 0.7f64.powi(i);
        let kappa = 0.8f64.powi(i);
        let (_, center) = snap(&m, P2::new(1.0 - delta, 0.0));
        // Ball strictly inside the disk; the concentration scale keeps
        // mu * radius = kappa shrinking so the weighted mass vanishes.
        let radius = 0.9 * (1.0 - center.norm());
        let bubble = Bubble { mu: kappa / radius, center };
        let member = project_member(&m, bubble, radius);

        let weighted = move |c: P2, r: f64| -> f64 {
            bubble_ball_integral(&bubble, c, r, &|p| weight_eval(p, x0, alpha).unwrap())
        };
        let report = extract(
            &m,
            &member.u,
            epsilon,
            f64::NEG_INFINITY,
            1,
            DensityEval::Analytic(&weighted),
        )
        .unwrap();
        let cand = &report.candidates[0];
        let v_star = v.eval(cand.center);
        let residual = theorem2_residual(cand.local_mass, alpha, v_star);
        let manual = 2.0 * (1.0 - 2.0 * alpha) * v_star * cand.local_mass;
        residual_exact &= (residual - manual).abs() <= 1e-14 * manual.abs().max(1e-300);
        masses.push(cand.local_mass);

        // Masked re-solve: the member without its ball contribution is the
        // tail projection, so the difference is the ball projection.
        let u_ref: Vec<f64> = member.u.iter().zip(&member.u_diff).map(|(a, b)| a - b).collect();
        grads.push(grad_diff_norm(&m, &member.u, &u_ref, 1.5).unwrap());
    }
    let mass_decreasing = masses[2..].windows(2).all(|w| w[1] < w[0]);
    let tail_monotone = grads[2..].windows(2).all(|w| w[1] < w[0]);
    Gate {
        label: "compactness mechanism",
        pass: residual_exact && mass_decreasing && tail_monotone,
        detail: format!(
            "residual exact {residual_exact}, grad norms {:?}",
            grads.iter().map(|g| (g * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        ),
    }
}

// --------------------------------------------------------------------- 8 --

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_liouville-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn criterion_8() -> Gate {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("alpha.json", r#"{"singularity": {"alpha": 0.7}}"#),
        (
            "s.json",
            r#"{"potential": {"kind": "hoelder_bump", "hoelder_s": 0.3, "hoelder_A": 1.0}}"#,
        ),
        ("ceiling.json", r#"{"continuation": {"mass_ceiling": 50.27}}"#),
    ];
    let mut pass = true;
    let mut codes = Vec::new();
    for (name, body) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = run_cli(&["verify", "--config", path.to_str().unwrap()]);
        let code = out.status.code().unwrap_or(-1);
        codes.push(code);
        pass &= code == 2;
    }
    Gate {
        label: "hypothesis enforcement",
        pass,
        detail: format!("exit codes {codes:?}"),
    }
}

// --------------------------------------------------------------------- 9 --

fn criterion_9() -> Gate {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, "{}").unwrap();
    let out_dir = dir.path().join("out");
    let run = |threads: &str| {
        let out = run_cli(&[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(out.status.success(), "verify failed: {out:?}");
        std::fs::read(out_dir.join("summary.json")).unwrap()
    };
    let first = run("1");
    let second = run("4");
    Gate {
        label: "determinism across thread pools",
        pass: first == second,
        detail: format!("{} bytes, identical: {}", first.len(), first == second),
    }
}

#[test]
fn acceptance() {
    let gates = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    let mut all = true;
    for (k, g) in gates.iter().enumerate() {
        println!(
            "criterion {}: {} — {} ({})",
            k + 1,
            if g.pass { "pass" } else { "FAIL" },
            g.label,
            g.detail
        );
        all &= g.pass;
    }
    assert!(all, "at least one acceptance criterion failed (see lines above)");
}
