//! Deterministic output files: CSV for per-node and per-member data, JSON
//! for extraction results and run summaries.
//!
//! Determinism contract: identical inputs produce byte-identical files.
//! Floats print with 17 significant digits (`{:.16e}`, round-trip safe),
//! rows follow storage order, and nothing time- or host-dependent is ever
//! written (wall-clock readings go to standard error, not to files).

use crate::disk::DiskMesh;
use crate::extract::ExtractionReport;
use crate::pohozaev::PohozaevReport;
use crate::quad::WeightField;
use crate::solver::SolutionField;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("field length {got} does not match mesh size {want}")]
    LengthMismatch { want: usize, got: usize },
}

/// Round-trip-safe float rendering used in every CSV cell.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_bytes(path: &Path, data: &[u8]) -> Result<(), ReportError> {
    let io = |source: std::io::Error| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, data).map_err(io)
}

/// Per-node solution table: coordinates, field value, curvature value, and
/// the corrected quadrature weight, with the scalar diagnostics in a
/// comment preamble. Total mass is recomputable as
/// `lambda * sum(v * exp(u) * cell_weight)`.
pub fn write_solution_csv(
    dir: &Path,
    index: usize,
    mesh: &DiskMesh,
    weights: &WeightField,
    v_values: &[f64],
    sol: &SolutionField,
) -> Result<PathBuf, ReportError> {
    if sol.u.len() != mesh.len() {
        return Err(ReportError::LengthMismatch { want: mesh.len(), got: sol.u.len() });
    }
    if v_values.len() != mesh.len() {
        return Err(ReportError::LengthMismatch { want: mesh.len(), got: v_values.len() });
    }
    let mut buf = String::new();
    for (key, value) in [
        ("lambda", sol.lambda),
        ("total_mass", sol.total_mass),
        ("weight_mass", sol.weight_mass),
        ("peak", sol.peak),
        ("u_center", sol.u_center),
        ("residual_norm", sol.residual_norm),
    ] {
        buf.push_str(&format!("# {key} {}\n", fmt_float(value)));
    }
    buf.push_str(&format!("# newton_iters {}\n", sol.newton_iters));
    buf.push_str("x1,x2,u,v,cell_weight\n");
    for i in 0..mesh.len() {
        buf.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(mesh.nodes[i].x),
            fmt_float(mesh.nodes[i].y),
            fmt_float(sol.u[i]),
            fmt_float(v_values[i]),
            fmt_float(weights.corrected_cell_weight[i]),
        ));
    }
    let path = dir.join(format!("solution_{index:04}.csv"));
    write_bytes(&path, buf.as_bytes())?;
    Ok(path)
}

/// One row per family member: the scalar course of a continuation run.
pub fn write_family_csv(dir: &Path, members: &[SolutionField]) -> Result<PathBuf, ReportError> {
    let mut buf = String::from(
        "member,lambda,total_mass,weight_mass,peak,peak_x1,peak_x2,u_center,residual_norm,newton_iters\n",
    );
    for (k, s) in members.iter().enumerate() {
        buf.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            k,
            fmt_float(s.lambda),
            fmt_float(s.total_mass),
            fmt_float(s.weight_mass),
            fmt_float(s.peak),
            fmt_float(s.peak_location.x),
            fmt_float(s.peak_location.y),
            fmt_float(s.u_center),
            fmt_float(s.residual_norm),
            s.newton_iters,
        ));
    }
    let path = dir.join("family.csv");
    write_bytes(&path, buf.as_bytes())?;
    Ok(path)
}

/// Extraction results in the documented JSON shape: `epsilon`, the
/// candidate list (center, scale, peak, distances, masses), `exterior_sup`.
pub fn extraction_json(report: &ExtractionReport) -> serde_json::Value {
    let candidates: Vec<serde_json::Value> = report
        .candidates
        .iter()
        .zip(&report.lemma_ratios)
        .map(|(c, ratio)| {
            serde_json::json!({
                "center": [c.center.x, c.center.y],
                "delta": c.delta,
                "peak": c.peak,
                "boundary_distance": c.boundary_distance,
                "singularity_distance": c.singularity_distance,
                "rescale_offset": c.rescale_offset,
                "local_mass": c.local_mass,
                "clipped": c.clipped,
                "mass_over_4pi": c.local_mass / (0.5 * crate::BUBBLE_MASS),
                "mass_over_8pi": c.local_mass / crate::BUBBLE_MASS,
                "boundary_distance_over_delta": ratio,
            })
        })
        .collect();
    serde_json::json!({
        "epsilon": report.epsilon,
        "candidates": candidates,
        "exterior_sup": report.exterior_sup,
        "truncated": report.truncated,
    })
}

pub fn write_extraction_json(dir: &Path, report: &ExtractionReport) -> Result<PathBuf, ReportError> {
    let path = dir.join("extraction.json");
    let mut text = serde_json::to_string_pretty(&extraction_json(report))
        .expect("json serialization cannot fail");
    text.push('\n');
    write_bytes(&path, text.as_bytes())?;
    Ok(path)
}

/// Every named balance term of one report as a JSON object.
pub fn pohozaev_json(report: &PohozaevReport) -> serde_json::Value {
    serde_json::json!({
        "lhs_interior": report.lhs_interior,
        "a_term": report.a_term,
        "b_term": report.b_term,
        "interior_2a_mass": report.interior_2a[0],
        "interior_2a_cross": report.interior_2a[1],
        "residual": report.residual,
        "identity_gap": report.identity_gap,
        "grad_q_norms": report
            .grad_q_norms
            .iter()
            .map(|(q, n)| serde_json::json!({"q": q, "norm": n}))
            .collect::<Vec<_>>(),
    })
}

/// One row per analyzed member with every balance term, plus a long-form
/// companion table for the gradient norms (member, q, norm).
pub fn write_pohozaev_csv(dir: &Path, reports: &[PohozaevReport]) -> Result<PathBuf, ReportError> {
    let mut buf = String::from(
        "member,lhs_interior,a_term,b_term,interior_2a_mass,interior_2a_cross,residual,identity_gap\n",
    );
    let mut norms = String::from("member,q,norm\n");
    for (k, r) in reports.iter().enumerate() {
        buf.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            k,
            fmt_float(r.lhs_interior),
            fmt_float(r.a_term),
            fmt_float(r.b_term),
            fmt_float(r.interior_2a[0]),
            fmt_float(r.interior_2a[1]),
            fmt_float(r.residual),
            fmt_float(r.identity_gap),
        ));
        for (q, n) in &r.grad_q_norms {
            norms.push_str(&format!("{},{},{}\n", k, fmt_float(*q), fmt_float(*n)));
        }
    }
    let path = dir.join("pohozaev.csv");
    write_bytes(&path, buf.as_bytes())?;
    write_bytes(&dir.join("grad_norms.csv"), norms.as_bytes())?;
    Ok(path)
}

/// Pretty-printed JSON summary with a trailing newline.
pub fn write_summary_json(dir: &Path, summary: &serde_json::Value) -> Result<PathBuf, ReportError> {
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).expect("json serialization cannot fail");
    text.push('\n');
    write_bytes(&path, text.as_bytes())?;
    Ok(path)
}

/// Reads a solution CSV written by [`write_solution_csv`] back into the
/// nodal field and its lambda (for the extract/pohozaev verbs).
pub fn read_solution_csv(path: &Path) -> Result<(Vec<f64>, f64), ReportError> {
    let io = |source: std::io::Error| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let bad = |msg: &str| ReportError::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, msg),
    };
    let mut lambda = f64::NAN;
    let mut u = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some(v) = rest.strip_prefix("lambda ") {
                lambda = v.parse().map_err(|_| bad("bad lambda line"))?;
            }
            continue;
        }
        if !saw_header {
            if !line.starts_with("x1,") {
                return Err(bad("missing column header"));
            }
            saw_header = true;
            continue;
        }
        let col = line.split(',').nth(2).ok_or_else(|| bad("row with fewer than 3 columns"))?;
        u.push(col.parse().map_err(|_| bad("non-numeric field value"))?);
    }
    if !lambda.is_finite() {
        return Err(bad("missing lambda preamble"));
    }
    Ok((u, lambda))
}

/// Writes stderr-only progress notes; files never carry timing.
pub fn log_wall_clock(label: &str, start: std::time::Instant) {
    let _ = writeln!(
        std::io::stderr(),
        "[liouville-lab] {label}: {:.3}s",
        start.elapsed().as_secs_f64()
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{DiskMesh, SingularityConfig, P2};
    use crate::extract::{BlowupCandidate, ExtractionReport};
    use crate::quad::WeightField;

    fn tiny_mesh() -> (DiskMesh, WeightField) {
        let cfg = SingularityConfig::new(0.0, 0.25).unwrap();
        let mesh = DiskMesh::build(8, 8, 1.5, &[], &cfg).unwrap();
        let w = WeightField::new(&mesh).unwrap();
        (mesh, w)
    }

    fn dummy_solution(n: usize) -> SolutionField {
        SolutionField {
            u: vec![0.125; n],
            lambda: 0.5,
            residual_norm: 1e-12,
            newton_iters: 3,
            total_mass: 1.5,
            weight_mass: 1.5,
            peak: 0.125,
            peak_node: 0,
            peak_location: P2::new(0.1, 0.0),
            u_center: 0.125,
        }
    }

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(fmt_float(std::f64::consts::PI), "3.1415926535897931e0");
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn solution_csv_round_trips_and_is_byte_stable() {
        let (mesh, w) = tiny_mesh();
        let v = vec![1.0; mesh.len()];
        let sol = dummy_solution(mesh.len());
        let dir = tempfile::tempdir().unwrap();
        let p1 = write_solution_csv(dir.path(), 7, &mesh, &w, &v, &sol).unwrap();
        assert!(p1.file_name().unwrap().to_str().unwrap() == "solution_0007.csv");
        let bytes1 = std::fs::read(&p1).unwrap();
        write_solution_csv(dir.path(), 7, &mesh, &w, &v, &sol).unwrap();
        assert_eq!(bytes1, std::fs::read(&p1).unwrap());
        let (u, lambda) = read_solution_csv(&p1).unwrap();
        assert_eq!(u, sol.u);
        assert_eq!(lambda, 0.5);
    }

    #[test]
    fn extraction_json_carries_the_documented_shape() {
        let report = ExtractionReport {
            epsilon: 0.1,
            candidates: vec![BlowupCandidate {
                center: P2::new(0.9, 0.0),
                node: 11,
                delta: 0.05,
                peak: 9.0,
                boundary_distance: 0.1,
                singularity_distance: 0.1,
                rescale_offset: 3.0,
                local_mass: 25.0,
                clipped: false,
            }],
            exterior_sup: Some(1.25),
            truncated: false,
            quantization_4pi: vec![25.0 / (4.0 * std::f64::consts::PI)],
            quantization_8pi: vec![25.0 / (8.0 * std::f64::consts::PI)],
            lemma_ratios: vec![1.0],
        };
        let value = extraction_json(&report);
        assert_eq!(value["epsilon"], 0.1);
        assert_eq!(value["candidates"][0]["center"][0], 0.9);
        assert_eq!(value["candidates"][0]["local_mass"], 25.0);
        let q = value["candidates"][0]["mass_over_8pi"].as_f64().unwrap();
        assert!((q - 25.0 / crate::BUBBLE_MASS).abs() < 1e-15);
        let q4 = value["candidates"][0]["mass_over_4pi"].as_f64().unwrap();
        assert!((q4 - 2.0 * q).abs() < 1e-15);
        assert_eq!(value["candidates"][0]["boundary_distance_over_delta"], 1.0);
        assert_eq!(value["candidates"][0]["clipped"], false);
        assert_eq!(value["exterior_sup"], 1.25);
        assert_eq!(value["truncated"], false);
        let dir = tempfile::tempdir().unwrap();
        let path = write_extraction_json(dir.path(), &report).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.ends_with('\n'));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, value);
    }

    #[test]
    fn pohozaev_csv_includes_identity_gap_and_norm_table() {
        let rep = PohozaevReport {
            lhs_interior: -3.1,
            a_term: 3.1,
            b_term: 0.5,
            interior_2a: [-0.25, 0.01],
            residual: 1.5,
            identity_gap: 2e-4,
            grad_q_norms: vec![(1.5, 0.7), (1.9, 0.9)],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = write_pohozaev_csv(dir.path(), &[rep]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("member,lhs_interior,"));
        assert!(text.contains("identity_gap"));
        assert_eq!(text.lines().count(), 2);
        let norms = std::fs::read_to_string(dir.path().join("grad_norms.csv")).unwrap();
        assert_eq!(norms.lines().count(), 3);
    }

    #[test]
    fn family_csv_has_one_row_per_member() {
        let dir = tempfile::tempdir().unwrap();
        let sols = vec![dummy_solution(4), dummy_solution(4)];
        let path = write_family_csv(dir.path(), &sols).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("0,"));
    }
}
