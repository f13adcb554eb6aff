//! Calibrated subactions on the letter graph.
//!
//! A subaction v satisfies v(b) - v(a) <= r(a, b) on every edge, with
//! equality attainable into every node b (calibration). It is the min-plus
//! eigenvector of the reduced weights at eigenvalue zero, computed by value
//! iteration with per-sweep renormalization.
//!
//! The stopping test uses the raw, pre-renormalization update delta. That is
//! deliberate: renormalization cancels uniform drift, so a wrong alpha
//! (weights reduced by alpha - 0.1, say) would look converged under the
//! renormalized delta while the raw delta honestly plateaus at 0.1 and
//! triggers the non-convergence error.

use crate::error::{Error, Result};
use crate::lettergraph::ReducedMatrix;
use crate::minplus::MinPlusMatrix;

/// Default iteration budget: 64 sweeps per grid node.
pub fn default_max_iters(node_count: usize) -> usize {
    64 * node_count
}

/// Default stopping tolerance for the raw update delta.
pub const SOLVER_TOL: f64 = 1e-12;

/// Calibrated-edge floor: reweighted entries may not dip below this.
pub const REWEIGHT_TOL: f64 = -1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Subaction {
    pub values: Vec<f64>,
    /// The alpha already baked into the reduced weights.
    pub alpha: f64,
    /// Max calibration residual of the returned values.
    pub residual: f64,
    pub iterations: usize,
}

/// r_u(a, b) = r(a, b) + v(a) - v(b). Nonnegative up to REWEIGHT_TOL; cycle
/// sums telescope back to the reduced ones exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ReweightedGraph {
    matrix: MinPlusMatrix,
    values: Vec<f64>,
}

impl ReweightedGraph {
    pub fn matrix(&self) -> &MinPlusMatrix {
        &self.matrix
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationReport {
    /// Per-node residual min_a (r(a, b) + v(a)) - v(b).
    pub per_node: Vec<f64>,
    pub max_abs_residual: f64,
    /// Largest positive excess of v(b) - v(a) over r(a, b); zero when the
    /// subaction inequality holds everywhere.
    pub max_inequality_violation: f64,
}

fn sweep(m: &MinPlusMatrix, v: &[f64], out: &mut [f64]) {
    let n = m.dim();
    out.fill(f64::INFINITY);
    for a in 0..n {
        let va = v[a];
        if !va.is_finite() {
            continue;
        }
        for b in 0..n {
            let cand = va + m.get(a, b);
            if cand < out[b] {
                out[b] = cand;
            }
        }
    }
}

fn iterate(r: &ReducedMatrix, mut v: Vec<f64>, tol: f64, max_iters: usize) -> Result<(Vec<f64>, usize)> {
    let m = r.matrix();
    let n = m.dim();
    let mut next = vec![0.0; n];
    let mut last_delta = f64::INFINITY;
    for iter in 1..=max_iters {
        sweep(m, &v, &mut next);
        let mut delta = 0.0f64;
        for b in 0..n {
            let d = (next[b] - v[b]).abs();
            if d > delta {
                delta = d;
            }
        }
        let min = next.iter().copied().fold(f64::INFINITY, f64::min);
        for x in next.iter_mut() {
            *x -= min;
        }
        std::mem::swap(&mut v, &mut next);
        if delta <= tol {
            return Ok((v, iter));
        }
        last_delta = delta;
    }
    Err(Error::NonConvergent {
        iterations: max_iters,
        residual: last_delta,
    })
}

pub fn solve_subaction(r: &ReducedMatrix, tol: f64, max_iters: usize) -> Result<Subaction> {
    if tol <= 0.0 {
        return Err(Error::Invalid(format!("solver tol must be positive, got {tol}")));
    }
    let n = r.matrix().dim();
    let (values, iterations) = iterate(r, vec![0.0; n], tol, max_iters)?;
    let report = verify_calibration(r, &values)?;
    Ok(Subaction {
        values,
        alpha: r.alpha(),
        residual: report.max_abs_residual,
        iterations,
    })
}

/// Solve twice from different starts (flat zero vs row minima) and report the
/// sup-difference after matching normalizations. A visible gap means the
/// subaction is not unique beyond constants, which is dynamically meaningful
/// and worth surfacing rather than hiding.
pub fn subaction_ambiguity(r: &ReducedMatrix, tol: f64, max_iters: usize) -> Result<f64> {
    let m = r.matrix();
    let n = m.dim();
    let (a, _) = iterate(r, vec![0.0; n], tol, max_iters)?;
    let row_min: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let base = row_min.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = row_min.iter().map(|x| x - base).collect();
    let (b, _) = iterate(r, shifted, tol, max_iters)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

pub fn verify_calibration(r: &ReducedMatrix, values: &[f64]) -> Result<CalibrationReport> {
    let m = r.matrix();
    let n = m.dim();
    if values.len() != n {
        return Err(Error::SizeMismatch {
            left: values.len(),
            right: n,
        });
    }
    let mut per_node = vec![f64::INFINITY; n];
    let mut max_violation = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let edge = m.get(a, b);
            let cand = edge + values[a];
            if cand - values[b] < per_node[b] {
                per_node[b] = cand - values[b];
            }
            let excess = values[b] - values[a] - edge;
            if excess > max_violation {
                max_violation = excess;
            }
        }
    }
    let max_abs = per_node.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok(CalibrationReport {
        per_node,
        max_abs_residual: max_abs,
        max_inequality_violation: max_violation,
    })
}

pub fn reweight(r: &ReducedMatrix, sub: &Subaction) -> Result<ReweightedGraph> {
    let m = r.matrix();
    let n = m.dim();
    if sub.values.len() != n {
        return Err(Error::SizeMismatch {
            left: sub.values.len(),
            right: n,
        });
    }
    let mut matrix = MinPlusMatrix::new(n, 0.0);
    for a in 0..n {
        for b in 0..n {
            let value = m.get(a, b) + sub.values[a] - sub.values[b];
            if value < REWEIGHT_TOL {
                return Err(Error::NegativeReweight {
                    from: a,
                    to: b,
                    value,
                });
            }
            matrix.set(a, b, value);
        }
    }
    Ok(ReweightedGraph {
        matrix,
        values: sub.values.clone(),
    })
}

/// Shift values so the minimum over the given letters is zero. The standard
/// normalization anchors at the Aubry letters once those are known.
pub fn anchored(values: &[f64], letters: &[usize]) -> Result<Vec<f64>> {
    if letters.is_empty() {
        return Err(Error::Invalid("anchoring needs a nonempty letter set".into()));
    }
    let base = letters
        .iter()
        .map(|&i| values[i])
        .fold(f64::INFINITY, f64::min);
    Ok(values.iter().map(|v| v - base).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lettergraph::{build_graph, reduce, LetterGrid};
    use crate::potential::PotentialSpec;
    use crate::spectrum::karp_min_mean;

    fn reduced(spec: &PotentialSpec, n_cells: usize) -> ReducedMatrix {
        let grid = LetterGrid::new(n_cells).unwrap();
        let w = build_graph(spec, grid).unwrap();
        let alpha = karp_min_mean(w.matrix()).unwrap();
        reduce(&w, alpha)
    }

    #[test]
    fn product_two_node_fixed_point() {
        let r = reduced(&PotentialSpec::Product, 1);
        let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(2)).unwrap();
        assert_eq!(sub.values, vec![1.0, 0.0]);
        assert!(sub.residual <= 1e-12);

        // zeros land exactly on the calibrated edges (into 0 via 1, into 1 via 1)
        let rw = reweight(&r, &sub).unwrap();
        assert_eq!(rw.weight(0, 0), 1.0);
        assert_eq!(rw.weight(0, 1), 2.0);
        assert_eq!(rw.weight(1, 0), 0.0);
        assert_eq!(rw.weight(1, 1), 0.0);
    }

    #[test]
    fn zero_diagonal_means_zero_subaction() {
        let r = reduced(&PotentialSpec::SquaredDifference, 4);
        let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(5)).unwrap();
        assert!(sub.values.iter().all(|&v| v == 0.0));
        let rw = reweight(&r, &sub).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(rw.weight(a, b).to_bits(), r.weight(a, b).to_bits());
            }
        }
    }

    #[test]
    fn well_potential_anchors_at_center() {
        let r = reduced(&PotentialSpec::SquaredDifferencePlusWell, 8);
        let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(9)).unwrap();
        assert_eq!(sub.values[4], 0.0);
        assert!(sub.values.iter().all(|&v| v >= 0.0));
        assert!(sub.residual <= 1e-9);
        let report = verify_calibration(&r, &sub.values).unwrap();
        assert!(report.max_inequality_violation <= 1e-9);
    }

    #[test]
    fn wrong_alpha_is_detected_as_non_convergence() {
        let grid = LetterGrid::new(8).unwrap();
        let w = build_graph(&PotentialSpec::Product, grid).unwrap();
        let alpha = karp_min_mean(w.matrix()).unwrap();
        for bad in [alpha - 0.1, alpha + 0.1] {
            let r = reduce(&w, bad);
            let err = solve_subaction(&r, SOLVER_TOL, default_max_iters(9));
            match err {
                Err(Error::NonConvergent { residual, .. }) => {
                    assert!(
                        residual >= 0.05,
                        "residual {residual} not bounded away from zero"
                    );
                }
                other => panic!("expected non-convergence, got {other:?}"),
            }
        }
    }

    #[test]
    fn perturbed_values_fail_verification() {
        let r = reduced(&PotentialSpec::SquaredDifferencePlusWell, 8);
        let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(9)).unwrap();
        let mut bumped = sub.values.clone();
        bumped[0] += 0.1;
        let report = verify_calibration(&r, &bumped).unwrap();
        assert!(
            report.per_node[0] <= -0.1 + 1e-9 || report.max_inequality_violation > 1e-9,
            "bump went unnoticed: {report:?}"
        );
    }

    #[test]
    fn cycle_sums_survive_reweighting() {
        let r = reduced(&PotentialSpec::SquaredDifferencePlusWell, 8);
        let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(9)).unwrap();
        let rw = reweight(&r, &sub).unwrap();
        let cycles: [&[usize]; 3] = [&[4], &[0, 8], &[1, 5, 7]];
        for cycle in cycles {
            let len = cycle.len();
            let before: f64 = (0..len)
                .map(|i| r.weight(cycle[i], cycle[(i + 1) % len]))
                .sum();
            let after: f64 = (0..len)
                .map(|i| rw.weight(cycle[i], cycle[(i + 1) % len]))
                .sum();
            assert!((before - after).abs() <= 1e-12);
        }
    }

    #[test]
    fn ambiguity_of_builtins_is_negligible() {
        for spec in [
            PotentialSpec::Projection,
            PotentialSpec::Product,
            PotentialSpec::SquaredDifference,
            PotentialSpec::SquaredDifferencePlusWell,
        ] {
            let r = reduced(&spec, 8);
            let gap = subaction_ambiguity(&r, SOLVER_TOL, default_max_iters(9)).unwrap();
            assert!(gap <= 1e-9, "{spec:?}: ambiguity {gap}");
        }
    }

    #[test]
    fn anchoring_zeros_the_letter_minimum() {
        let values = vec![3.0, 1.5, 2.0, 0.25];
        let out = anchored(&values, &[1, 2]).unwrap();
        assert_eq!(out, vec![1.5, 0.0, 0.5, -1.25]);
        assert!(anchored(&values, &[]).is_err());
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let r = reduced(&PotentialSpec::Product, 1);
        assert!(verify_calibration(&r, &[0.0, 0.0, 0.0]).is_err());
        let sub = Subaction {
            values: vec![0.0; 5],
            alpha: 0.0,
            residual: 0.0,
            iterations: 0,
        };
        assert!(matches!(
            reweight(&r, &sub),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn stale_subaction_is_rejected_by_reweight() {
        let r = reduced(&PotentialSpec::Product, 1);
        let sub = Subaction {
            values: vec![0.0, 5.0],
            alpha: r.alpha(),
            residual: 0.0,
            iterations: 0,
        };
        assert!(matches!(
            reweight(&r, &sub),
            Err(Error::NegativeReweight { .. })
        ));
    }

    mod properties {
        use super::*;
        use crate::spectrum::tests::random_twist_quadratic;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        // Not proptest: the generator needs the twist rejection loop and the
        // full pipeline; a seeded loop keeps it deterministic and fast.
        #[test]
        fn random_twist_potentials_solve_cleanly() {
            let mut rng = ChaCha8Rng::seed_from_u64(5150);
            for _ in 0..10 {
                let spec = random_twist_quadratic(&mut rng);
                let r = reduced(&spec, 16);
                let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(17)).unwrap();
                assert!(sub.residual <= 1e-9);
                let report = verify_calibration(&r, &sub.values).unwrap();
                assert!(report.max_inequality_violation <= 1e-9);
                let rw = reweight(&r, &sub).unwrap();
                assert!(rw.matrix().min_entry() >= REWEIGHT_TOL);
            }
        }
    }
}
