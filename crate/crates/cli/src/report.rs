//! Report bundle: one byte-stable text report plus one CSV per matrix or
//! table. Floats go through the shared 17-significant-digit formatter, so
//! identical runs produce identical bytes. Wall-clock timings land in their
//! own sidecar CSV and stay out of the stable surface; the configured output
//! directory is likewise omitted from the text, since moving the bundle must
//! not change it.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::PathBuf;

use xyergo::numfmt::fmt_f64;
use xyergo::{MinimizerSet, SequenceValue};

use crate::pipeline::{Engine, PointType};

pub const SCHEMA_VERSION: u32 = 1;

fn fmt_usizes(values: &[usize]) -> String {
    if values.is_empty() {
        return "none".to_string();
    }
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_floats(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

fn fmt_minimizers(set: &MinimizerSet) -> String {
    match set {
        MinimizerSet::Points(points) => format!("points {}", fmt_floats(points)),
        MinimizerSet::Interval { lo, hi } => {
            format!("interval {}..{}", fmt_f64(*lo), fmt_f64(*hi))
        }
    }
}

fn fmt_sequence_value(value: &SequenceValue) -> String {
    match value {
        SequenceValue::Finite(v) => fmt_f64(*v),
        SequenceValue::Divergent => "DIVERGENT".to_string(),
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => fmt_f64(v),
        None => "UNAVAILABLE".to_string(),
    }
}

pub fn render(engine: &Engine, incomplete: Option<&str>) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "schema_version: {SCHEMA_VERSION}").unwrap();
    if let Some(reason) = incomplete {
        writeln!(w, "incomplete: {reason}").unwrap();
    }

    let cfg = &engine.config;
    writeln!(w, "\n[config]").unwrap();
    writeln!(w, "kind: {}", cfg.potential.kind_name()).unwrap();
    writeln!(w, "n_cells: {}", cfg.n_cells).unwrap();
    writeln!(w, "seed: {}", cfg.seed).unwrap();
    writeln!(w, "tol_zero: {}", fmt_f64(cfg.tol_zero())).unwrap();
    writeln!(w, "solver_tol: {}", fmt_f64(cfg.tolerances.solver_tol)).unwrap();
    let (lo, hi) = cfg.window();
    writeln!(w, "window: {lo}..{hi}").unwrap();
    writeln!(w, "commands: {}", cfg.commands.join(",")).unwrap();

    if let Some(spectral) = engine.peek_spectral() {
        writeln!(w, "\n[twist]").unwrap();
        writeln!(w, "passed: {}", spectral.twist.passed).unwrap();
        writeln!(
            w,
            "max_mixed_partial: {}",
            fmt_f64(spectral.twist.max_mixed_partial)
        )
        .unwrap();
        writeln!(w, "margin: {}", fmt_f64(spectral.twist.margin)).unwrap();
        writeln!(w, "sample_density: {}", spectral.twist.sample_density).unwrap();

        writeln!(w, "\n[spectral]").unwrap();
        writeln!(w, "alpha_grid: {}", fmt_f64(spectral.alpha_grid)).unwrap();
        writeln!(w, "alpha_diag_grid: {}", fmt_f64(spectral.alpha_diag_grid)).unwrap();
        writeln!(
            w,
            "alpha_diag_refined: {}",
            fmt_f64(spectral.alpha_diag_refined)
        )
        .unwrap();
        writeln!(w, "refined_argmin: {}", fmt_f64(spectral.refined_argmin)).unwrap();
        writeln!(w, "agreement_gap: {}", fmt_f64(spectral.agreement_gap)).unwrap();
        writeln!(w, "witness: {}", fmt_usizes(&spectral.witness)).unwrap();
        writeln!(w, "witness_mean: {}", fmt_f64(spectral.witness_mean)).unwrap();
        writeln!(w, "minimizer_set: {}", fmt_minimizers(&spectral.minimizer_set)).unwrap();
    }

    if let Some(sub) = engine.peek_subaction() {
        writeln!(w, "\n[subaction]").unwrap();
        writeln!(w, "iterations: {}", sub.iterations).unwrap();
        writeln!(w, "residual: {}", fmt_f64(sub.residual)).unwrap();
        let min = sub.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = sub.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(w, "value_min: {}", fmt_f64(min)).unwrap();
        writeln!(w, "value_max: {}", fmt_f64(max)).unwrap();
        writeln!(w, "anchored: {}", engine.peek_anchored().is_some()).unwrap();
    }

    if let Some(barrier) = engine.peek_barrier() {
        writeln!(w, "\n[barrier]").unwrap();
        writeln!(w, "window: {}..{}", barrier.window.0, barrier.window.1).unwrap();
        writeln!(w, "agreement: {}", fmt_f64(barrier.agreement)).unwrap();
        writeln!(w, "relay_letters: {}", fmt_usizes(&barrier.aubry)).unwrap();
    }

    for (i, q) in engine.peek_barrier_queries().iter().enumerate() {
        writeln!(w, "\n[barrier_query {i}]").unwrap();
        writeln!(w, "from: {}", fmt_f64(q.query.from)).unwrap();
        writeln!(w, "to: {}", fmt_f64(q.query.to)).unwrap();
        let kind = match q.query.point_type {
            PointType::Fixed => "fixed",
            PointType::Letter => "letter",
        };
        writeln!(w, "point_type: {kind}").unwrap();
        writeln!(w, "from_node: {}", q.from_node).unwrap();
        writeln!(w, "to_node: {}", q.to_node).unwrap();
        if let Some(v) = q.letter_value {
            writeln!(w, "value: {}", fmt_f64(v)).unwrap();
        }
        if let Some(seq) = &q.sequence {
            writeln!(w, "value: {}", fmt_sequence_value(&seq.value)).unwrap();
            writeln!(w, "growth_rate: {}", fmt_f64(seq.growth_rate)).unwrap();
            writeln!(w, "phase_dependent: {}", seq.phase_dependent).unwrap();
            writeln!(w, "self_overlap: {}", seq.self_overlap).unwrap();
            writeln!(w, "barrier_candidate: {}", fmt_opt(seq.barrier_candidate)).unwrap();
            writeln!(w, "suffix_candidate: {}", fmt_opt(seq.suffix_candidate)).unwrap();
            writeln!(w, "prefix_trace: {}", fmt_floats(&seq.prefix_trace)).unwrap();
        }
    }

    if let Some(report) = engine.peek_aubry() {
        writeln!(w, "\n[aubry]").unwrap();
        writeln!(w, "tol_zero: {}", fmt_f64(report.tol_zero)).unwrap();
        writeln!(w, "letters: {}", fmt_usizes(&report.aubry_letters)).unwrap();
        for (i, class) in report.classes.iter().enumerate() {
            writeln!(w, "class {i}: {}", fmt_usizes(class)).unwrap();
        }
        writeln!(w, "m_distance: {}", fmt_floats(&report.m_distance)).unwrap();
    }

    if let Some(support) = engine.peek_mather() {
        writeln!(w, "\n[mather]").unwrap();
        writeln!(w, "witness_nodes: {}", fmt_usizes(&support.witness_nodes)).unwrap();
        writeln!(
            w,
            "zero_loop_letters: {}",
            fmt_usizes(&support.zero_loop_letters)
        )
        .unwrap();
        writeln!(w, "hausdorff: {}", fmt_opt(support.hausdorff)).unwrap();
        writeln!(w, "cell: {}", fmt_f64(support.cell)).unwrap();
    }

    for cert in engine.peek_static() {
        writeln!(w, "\n[static]").unwrap();
        writeln!(w, "word: {}", fmt_usizes(&cert.word)).unwrap();
        writeln!(w, "is_static: {}", cert.is_static).unwrap();
        writeln!(w, "is_semistatic: {}", cert.is_semistatic).unwrap();
        writeln!(w, "static_defect: {}", fmt_f64(cert.static_defect)).unwrap();
        writeln!(w, "semistatic_defect: {}", fmt_f64(cert.semistatic_defect)).unwrap();
        writeln!(w, "worst_violation: {}", fmt_f64(cert.worst_violation)).unwrap();
        writeln!(w, "checked_pairs: {}", cert.checked_pairs).unwrap();
    }

    for (n, traces) in engine.peek_descent() {
        writeln!(w, "\n[descent n={n}]").unwrap();
        let converged = traces.iter().filter(|t| t.converged).count();
        writeln!(w, "starts: {}", traces.len()).unwrap();
        writeln!(w, "converged: {converged}").unwrap();
        let best = traces
            .iter()
            .filter_map(|t| t.energies.last().copied())
            .fold(f64::INFINITY, f64::min);
        writeln!(w, "best_energy: {}", fmt_f64(best)).unwrap();
        let spread = traces.iter().map(|t| t.final_spread).fold(0.0f64, f64::max);
        writeln!(w, "worst_final_spread: {}", fmt_f64(spread)).unwrap();
    }

    if let Some(gap) = engine.peek_gap() {
        writeln!(w, "\n[gap]").unwrap();
        writeln!(w, "delta: {}", fmt_f64(gap.delta)).unwrap();
        writeln!(w, "phi_delta: {}", fmt_f64(gap.phi_delta)).unwrap();
        writeln!(w, "far_empty: {}", gap.far_empty).unwrap();
    }

    if let Some(tpo) = engine.peek_tpo() {
        writeln!(w, "\n[tpo]").unwrap();
        writeln!(w, "a: {}", fmt_f64(tpo.a)).unwrap();
        writeln!(w, "epsilon: {}", fmt_f64(tpo.epsilon)).unwrap();
        writeln!(w, "unique_min: {}", tpo.unique_min).unwrap();
        writeln!(w, "argmin: {}", fmt_f64(tpo.argmin)).unwrap();
        writeln!(w, "second_derivative: {}", fmt_f64(tpo.second_derivative)).unwrap();
        writeln!(w, "robustness_radius: {}", fmt_f64(tpo.robustness_radius)).unwrap();
        writeln!(w, "levels_passed: {}", tpo.levels_passed).unwrap();
        writeln!(w, "levels_total: {}", tpo.levels_total).unwrap();
    }

    writeln!(w, "\n[checks]").unwrap();
    for check in &engine.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        writeln!(w, "{}: {verdict} ({})", check.name, check.detail).unwrap();
    }
    let overall = incomplete.is_none() && engine.all_passed();
    writeln!(w, "result: {}", if overall { "PASS" } else { "FAIL" }).unwrap();

    out
}

/// Write the report text, per-table CSVs, and the timings sidecar into the
/// configured output directory. Returns the report path.
pub fn write_all(engine: &Engine, incomplete: Option<&str>) -> io::Result<PathBuf> {
    let dir = engine.config.output_dir.clone();
    fs::create_dir_all(&dir)?;

    let matrix_csv = |name: &str, m: &xyergo::MinPlusMatrix| -> io::Result<()> {
        let mut buf = Vec::new();
        m.write_csv(&mut buf)?;
        fs::write(dir.join(name), buf)
    };

    if let Some(weights) = engine.peek_weights() {
        matrix_csv("weights.csv", weights.matrix())?;
    }
    if let Some(reduced) = engine.peek_reduced() {
        matrix_csv("reduced.csv", reduced.matrix())?;
    }
    if let Some(mane) = engine.peek_mane() {
        matrix_csv("mane.csv", mane.matrix())?;
    }
    if let Some(barrier) = engine.peek_barrier() {
        matrix_csv("barrier_closed.csv", barrier.closed_form())?;
        matrix_csv("barrier_windowed.csv", barrier.windowed_liminf())?;
    }

    if let Some(sub) = engine.peek_subaction() {
        let mut buf = String::from("node,abscissa,value,anchored\n");
        let anchored = engine.peek_anchored();
        for (i, &v) in sub.values.iter().enumerate() {
            let anchored_cell = anchored
                .map(|a| fmt_f64(a[i]))
                .unwrap_or_default();
            writeln!(
                buf,
                "{i},{},{},{anchored_cell}",
                fmt_f64(engine.grid.node(i)),
                fmt_f64(v)
            )
            .unwrap();
        }
        fs::write(dir.join("subaction.csv"), buf)?;
    }

    if !engine.peek_descent().is_empty() {
        let mut buf = String::from("n,start,converged,sweeps,energy,final_spread,residual\n");
        for (n, traces) in engine.peek_descent() {
            for (k, t) in traces.iter().enumerate() {
                writeln!(
                    buf,
                    "{n},{k},{},{},{},{},{}",
                    t.converged,
                    t.sweeps,
                    fmt_f64(*t.energies.last().unwrap()),
                    fmt_f64(t.final_spread),
                    fmt_f64(t.residual)
                )
                .unwrap();
            }
        }
        fs::write(dir.join("descent.csv"), buf)?;
    }

    if let Some(gap) = engine.peek_gap() {
        let mut buf = String::from("n,phi\n");
        for &(n, v) in &gap.per_n {
            writeln!(buf, "{n},{}", fmt_f64(v)).unwrap();
        }
        fs::write(dir.join("gap.csv"), buf)?;
    }

    // sidecar: wall-clock stage timings, excluded from byte comparisons
    let mut buf = String::from("stage,seconds\n");
    for (stage, secs) in &engine.timings {
        writeln!(buf, "{stage},{secs:.6}").unwrap();
    }
    fs::write(dir.join("timings.csv"), buf)?;

    let path = dir.join("report.txt");
    fs::write(&path, render(engine, incomplete))?;
    Ok(path)
}
