//! Continuous-space experiments: periodic-orbit coordinate descent, crossing
//! surgery, the gap table phi(delta; n), and the perturbation study around a
//! chosen target abscissa.
//!
//! Descent works in [0,1]^n directly, not on the grid: each coordinate is
//! re-minimized against its neighbors by a dense scan plus golden-section
//! refinement, keeping the current value unless a strictly better one is
//! found, so recorded energies never increase. Under a twist certificate the
//! minimizers collapse to constant orbits.

use crate::error::{Error, Result};
use crate::lettergraph::{build_graph, reduce, LetterGrid};
use crate::minplus::MinPlusMatrix;
use crate::potential::{certify_twist, perturb, PotentialSpec, UnivariatePoly};
use crate::spectrum::{diagonal_analysis, karp_min_mean, MinimizerSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

pub const DESCENT_SCAN: usize = 65;
pub const DESCENT_GOLDEN_ITERS: usize = 40;
/// A converged trace must leave every coordinate this close to its
/// one-dimensional minimum.
pub const DESCENT_RESIDUAL_TOL: f64 = 1e-8;

const TPO_LEVELS: usize = 8;
const FD_CURVATURE_STEP: f64 = 1e-4;

#[derive(Clone, Debug)]
pub enum DescentInit {
    Vector(Vec<f64>),
    Seed(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDescentTrace {
    pub n: usize,
    /// Orbit after each sweep, the initial point first.
    pub iterates: Vec<Vec<f64>>,
    /// Cyclic energy per recorded iterate; nonincreasing.
    pub energies: Vec<f64>,
    pub converged: bool,
    pub final_spread: f64,
    /// Worst distance-to-optimum over single coordinates at the final point.
    pub residual: f64,
    pub sweeps: usize,
}

fn orbit_energy(spec: &PotentialSpec, x: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|i| spec.eval_raw(x[i], x[(i + 1) % n])).sum()
}

/// Minimize f over [0,1]: dense scan, golden refinement of the best bracket,
/// and the incumbent kept on ties so the caller's energy cannot rise.
fn line_min(f: &dyn Fn(f64) -> f64, current: f64) -> (f64, f64) {
    let mut best_t = current;
    let mut best_v = f(current);
    let step = 1.0 / (DESCENT_SCAN - 1) as f64;
    let mut best_i = 0;
    let mut scan_v = f64::INFINITY;
    for i in 0..DESCENT_SCAN {
        let t = i as f64 * step;
        let v = f(t);
        if v < scan_v {
            scan_v = v;
            best_i = i;
        }
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    let mut a = if best_i == 0 { 0.0 } else { (best_i - 1) as f64 * step };
    let mut b = ((best_i + 1) as f64 * step).min(1.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..DESCENT_GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    for cand in [c, d, 0.5 * (a + b)] {
        let v = f(cand);
        if v < best_v {
            best_v = v;
            best_t = cand;
        }
    }
    (best_t, best_v)
}

fn require_twist(spec: &PotentialSpec) -> Result<()> {
    let cert = certify_twist(spec, 64)?;
    if !cert.passed {
        return Err(Error::NotTwist {
            max: cert.max_mixed_partial,
        });
    }
    Ok(())
}

/// Cyclic coordinate descent over period-n orbits.
pub fn orbit_descent(
    spec: &PotentialSpec,
    n: usize,
    init: DescentInit,
    tol: f64,
    max_sweeps: usize,
) -> Result<OrbitDescentTrace> {
    require_twist(spec)?;
    if n == 0 {
        return Err(Error::EmptyOrbit);
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("descent tol must be positive, got {tol}")));
    }
    let mut x = match init {
        DescentInit::Vector(v) => {
            if v.len() != n {
                return Err(Error::OrbitLengthMismatch {
                    left: v.len(),
                    right: n,
                });
            }
            if let Some(&bad) = v.iter().find(|&&t| !(0.0..=1.0).contains(&t)) {
                return Err(Error::Invalid(format!("orbit coordinate {bad} outside [0,1]")));
            }
            v
        }
        DescentInit::Seed(seed) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect()
        }
    };

    let coord_objective = |x: &[f64], i: usize, t: f64| -> f64 {
        if n == 1 {
            spec.eval_raw(t, t)
        } else {
            let prev = x[(i + n - 1) % n];
            let next = x[(i + 1) % n];
            spec.eval_raw(prev, t) + spec.eval_raw(t, next)
        }
    };

    let mut iterates = vec![x.clone()];
    let mut energies = vec![orbit_energy(spec, &x)];
    let mut converged_by_displacement = false;
    let mut sweeps = 0;
    for _ in 0..max_sweeps {
        sweeps += 1;
        let mut displacement: f64 = 0.0;
        for i in 0..n {
            let f = |t: f64| coord_objective(&x, i, t);
            let (t, _) = line_min(&f, x[i]);
            displacement = displacement.max((t - x[i]).abs());
            x[i] = t;
        }
        iterates.push(x.clone());
        energies.push(orbit_energy(spec, &x));
        if displacement < tol {
            converged_by_displacement = true;
            break;
        }
    }

    let mut residual: f64 = 0.0;
    for i in 0..n {
        let f = |t: f64| coord_objective(&x, i, t);
        let here = f(x[i]);
        let (_, best) = line_min(&f, x[i]);
        residual = residual.max(here - best);
    }
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(OrbitDescentTrace {
        n,
        iterates,
        energies,
        converged: converged_by_displacement && residual <= DESCENT_RESIDUAL_TOL,
        final_spread: max - min,
        residual,
        sweeps,
    })
}

/// Run descent from many seeds; results come back in seed order.
pub fn multi_descent(
    spec: &PotentialSpec,
    n: usize,
    seeds: &[u64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<OrbitDescentTrace>> {
    seeds
        .par_iter()
        .map(|&s| orbit_descent(spec, n, DescentInit::Seed(s), tol, max_sweeps))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurgeryOutcome {
    pub w: Vec<f64>,
    pub z: Vec<f64>,
    /// S(w) + S(z) - S(x) - S(y) over one cyclic period; nonpositive under
    /// twist, exactly zero for comparable pairs.
    pub energy_delta: f64,
}

pub fn crossing_surgery(x: &[f64], y: &[f64], spec: &PotentialSpec) -> Result<SurgeryOutcome> {
    if x.len() != y.len() {
        return Err(Error::OrbitLengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyOrbit);
    }
    if let Some(&bad) = x.iter().chain(y).find(|&&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::Invalid(format!("orbit coordinate {bad} outside [0,1]")));
    }
    let w: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| a.min(b)).collect();
    let z: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| a.max(b)).collect();
    // grouped so a comparable pair cancels exactly: the surgered energies
    // are then the same two doubles in some order
    let energy_delta = (orbit_energy(spec, &w) + orbit_energy(spec, &z))
        - (orbit_energy(spec, x) + orbit_energy(spec, y));
    Ok(SurgeryOutcome { w, z, energy_delta })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapTable {
    pub delta: f64,
    /// (n, phi(delta; n)) for n = 1 ..= n_max.
    pub per_n: Vec<(usize, f64)>,
    pub phi_delta: f64,
    /// No grid node sits delta away from the minimizer set: every row is
    /// infinite.
    pub far_empty: bool,
}

/// Minimal reduced cycle sums over cycles that visit at least one node far
/// from the minimizer set, via a doubled (node, seen-far) state space.
pub fn gap_phi(
    spec: &PotentialSpec,
    n_cells: usize,
    delta: f64,
    n_max: usize,
) -> Result<GapTable> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::Invalid(format!("delta must be finite and >= 0, got {delta}")));
    }
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let grid = LetterGrid::new(n_cells)?;
    let w = build_graph(spec, grid)?;
    let alpha = karp_min_mean(w.matrix())?;
    let r = reduce(&w, alpha);
    let diag = diagonal_analysis(spec, grid)?;
    let k = grid.node_count();
    let far: Vec<bool> = (0..k)
        .map(|a| crate::aubry::minimizer_distance(grid.node(a), &diag.minimizer_set) >= delta)
        .collect();

    if far.iter().all(|&f| !f) {
        let per_n = (1..=n_max).map(|n| (n, f64::INFINITY)).collect();
        return Ok(GapTable {
            delta,
            per_n,
            phi_delta: f64::INFINITY,
            far_empty: true,
        });
    }

    // state 2a + seen, seen sticky once a far node is entered
    let idx = |a: usize, seen: bool| 2 * a + seen as usize;
    let mut m = MinPlusMatrix::new(2 * k, f64::INFINITY);
    for a in 0..k {
        for b in 0..k {
            let wgt = r.weight(a, b);
            for seen in [false, true] {
                m.set(idx(a, seen), idx(b, seen || far[b]), wgt);
            }
        }
    }

    let mut per_n = Vec::with_capacity(n_max);
    let mut power = m.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = power.multiply(&m)?;
        }
        let phi_n = (0..k)
            .map(|s| power.get(idx(s, far[s]), idx(s, true)))
            .fold(f64::INFINITY, f64::min);
        per_n.push((n, phi_n));
    }
    let phi_delta = per_n.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    Ok(GapTable {
        delta,
        per_n,
        phi_delta,
        far_empty: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TPOReport {
    pub base: PotentialSpec,
    pub a: f64,
    pub epsilon: f64,
    /// The perturbed diagonal has a single refined minimizer with positive
    /// finite-difference curvature there.
    pub unique_min: bool,
    pub argmin: f64,
    pub second_derivative: f64,
    /// Largest tested coefficient-noise level below which every trial kept a
    /// unique minimum. A lower-bound estimate from randomized probing, not a
    /// proof.
    pub robustness_radius: f64,
    pub levels_passed: usize,
    pub levels_total: usize,
}

fn diagonal_uniqueness(spec: &PotentialSpec, grid: LetterGrid) -> Result<(bool, f64, f64)> {
    let diag = diagonal_analysis(spec, grid)?;
    let (unique, argmin) = match &diag.minimizer_set {
        MinimizerSet::Points(ps) if ps.len() == 1 => (true, ps[0]),
        _ => (false, diag.refined_argmin),
    };
    let g = |t: f64| spec.eval_raw(t, t);
    let h = FD_CURVATURE_STEP;
    let sd = (g(argmin + h) - 2.0 * g(argmin) + g(argmin - h)) / (h * h);
    Ok((unique && sd > 0.0, argmin, sd))
}

/// Pin the minimum at `a` by adding epsilon (x - a)^2, then probe how much
/// coefficient noise the uniqueness survives.
pub fn tpo_experiment(
    base: &PotentialSpec,
    a: f64,
    epsilon: f64,
    grid: LetterGrid,
    trials: usize,
    noise: f64,
    seed: u64,
) -> Result<TPOReport> {
    require_twist(base)?;
    if !(0.0 < a && a < 1.0) {
        return Err(Error::Invalid(format!("target abscissa {a} must lie inside (0,1)")));
    }
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::Invalid(format!("noise must be finite and >= 0, got {noise}")));
    }
    let spec_eps = perturb(base, UnivariatePoly::well_at(a), epsilon)?;
    let (unique_min, argmin, second_derivative) = diagonal_uniqueness(&spec_eps, grid)?;

    let poly = spec_eps.to_polynomial();
    let degree = poly.degree;
    let coeffs = poly.coeffs;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let per_level = (trials / TPO_LEVELS).max(1);
    let mut robustness_radius = 0.0;
    let mut levels_passed = 0;
    if unique_min && noise > 0.0 {
        'ladder: for level in 1..=TPO_LEVELS {
            let magnitude = noise * level as f64 / TPO_LEVELS as f64;
            for _ in 0..per_level {
                let jittered: Vec<f64> = coeffs
                    .iter()
                    .map(|c| c + rng.gen_range(-magnitude..=magnitude))
                    .collect();
                let candidate = PotentialSpec::Polynomial(crate::potential::BivariatePoly::new(
                    degree, jittered,
                )?);
                let (ok, _, _) = diagonal_uniqueness(&candidate, grid)?;
                if !ok {
                    break 'ladder;
                }
            }
            robustness_radius = magnitude;
            levels_passed = level;
        }
    }
    Ok(TPOReport {
        base: base.clone(),
        a,
        epsilon,
        unique_min,
        argmin,
        second_derivative,
        robustness_radius,
        levels_passed,
        levels_total: TPO_LEVELS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aubry::tests::seesaw;

    fn assert_monotone(trace: &OrbitDescentTrace) {
        for pair in trace.energies.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "energy rose: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn well_descends_to_the_constant_center_orbit() {
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        for seed in [3u64, 17, 40] {
            let trace =
                orbit_descent(&spec, 4, DescentInit::Seed(seed), 1e-10, 200).unwrap();
            assert!(trace.converged);
            assert!(trace.final_spread <= 1e-6, "spread {}", trace.final_spread);
            let last = trace.iterates.last().unwrap();
            for &t in last {
                assert!((t - 0.5).abs() <= 1e-6, "coordinate {t}");
            }
            assert!(trace.energies.last().unwrap().abs() <= 1e-9);
            assert_monotone(&trace);
        }
    }

    #[test]
    fn product_descends_to_ones() {
        let trace = orbit_descent(
            &PotentialSpec::Product,
            3,
            DescentInit::Seed(5),
            1e-10,
            200,
        )
        .unwrap();
        assert!(trace.converged);
        let last = trace.iterates.last().unwrap();
        for &t in last {
            assert_eq!(t, 1.0);
        }
        assert_eq!(*trace.energies.last().unwrap(), -3.0);
    }

    #[test]
    fn single_coordinate_minimizes_the_diagonal() {
        let trace = orbit_descent(
            &PotentialSpec::SquaredDifferencePlusWell,
            1,
            DescentInit::Vector(vec![0.9]),
            1e-10,
            50,
        )
        .unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterates.last().unwrap()[0], 0.5);
        assert_eq!(*trace.energies.last().unwrap(), 0.0);
    }

    #[test]
    fn descent_rejects_bad_inputs() {
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        assert!(matches!(
            orbit_descent(&seesaw(), 2, DescentInit::Seed(1), 1e-8, 10),
            Err(Error::NotTwist { .. })
        ));
        assert!(matches!(
            orbit_descent(&spec, 0, DescentInit::Seed(1), 1e-8, 10),
            Err(Error::EmptyOrbit)
        ));
        assert!(matches!(
            orbit_descent(&spec, 3, DescentInit::Vector(vec![0.1, 0.2]), 1e-8, 10),
            Err(Error::OrbitLengthMismatch { left: 2, right: 3 })
        ));
        assert!(orbit_descent(&spec, 2, DescentInit::Vector(vec![0.1, 1.2]), 1e-8, 10).is_err());
    }

    #[test]
    fn multi_descent_is_ordered_and_consistent() {
        let seeds = [1u64, 2, 3, 4];
        let traces = multi_descent(
            &PotentialSpec::SquaredDifferencePlusWell,
            3,
            &seeds,
            1e-10,
            200,
        )
        .unwrap();
        assert_eq!(traces.len(), 4);
        let singles: Vec<_> = seeds
            .iter()
            .map(|&s| {
                orbit_descent(
                    &PotentialSpec::SquaredDifferencePlusWell,
                    3,
                    DescentInit::Seed(s),
                    1e-10,
                    200,
                )
                .unwrap()
            })
            .collect();
        assert_eq!(traces, singles);
    }

    #[test]
    fn surgery_on_the_crossed_pair() {
        let out =
            crossing_surgery(&[0.0, 1.0], &[1.0, 0.0], &PotentialSpec::SquaredDifference)
                .unwrap();
        assert_eq!(out.w, vec![0.0, 0.0]);
        assert_eq!(out.z, vec![1.0, 1.0]);
        assert_eq!(out.energy_delta, -4.0);
    }

    #[test]
    fn surgery_is_exactly_neutral_for_comparable_pairs() {
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        let x = [0.1, 0.2, 0.3];
        let y = [0.4, 0.2, 0.9];
        // y dominates x nowhere? fix: compare against a dominating partner
        let hi = [0.4, 0.25, 0.9];
        let out = crossing_surgery(&x, &hi, &spec).unwrap();
        assert_eq!(out.w, x.to_vec());
        assert_eq!(out.z, hi.to_vec());
        assert_eq!(out.energy_delta.to_bits(), 0.0f64.to_bits());

        let same = crossing_surgery(&y, &y, &spec).unwrap();
        assert_eq!(same.energy_delta.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn surgery_never_raises_energy_under_twist() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(23);
        for spec in [
            PotentialSpec::Product,
            PotentialSpec::SquaredDifferencePlusWell,
        ] {
            for _ in 0..100 {
                let n = rng.gen_range(1..=6);
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
                let out = crossing_surgery(&x, &y, &spec).unwrap();
                assert!(out.energy_delta <= 1e-12, "{spec:?}: delta {}", out.energy_delta);
            }
        }
    }

    #[test]
    fn surgery_rejects_mismatched_lengths() {
        let spec = PotentialSpec::Product;
        assert!(crossing_surgery(&[0.1], &[0.1, 0.2], &spec).is_err());
        assert!(crossing_surgery(&[], &[], &spec).is_err());
        assert!(crossing_surgery(&[1.5], &[0.0], &spec).is_err());
    }

    #[test]
    fn gap_frozen_value_at_quarter_delta() {
        let table = gap_phi(&PotentialSpec::SquaredDifferencePlusWell, 8, 0.25, 6).unwrap();
        assert!(!table.far_empty);
        assert_eq!(table.per_n[0], (1, 0.0625));
        for &(n, v) in &table.per_n {
            assert!(v >= 0.0625 - 1e-12, "phi({n}) = {v} dips below phi(1)");
        }
        assert_eq!(table.phi_delta, 0.0625);
    }

    #[test]
    fn gap_shrinks_with_delta_and_flags_empty_far_sets() {
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        let wide = gap_phi(&spec, 8, 0.25, 5).unwrap();
        let narrow = gap_phi(&spec, 8, 0.125, 5).unwrap();
        for (&(_, v_narrow), &(_, v_wide)) in narrow.per_n.iter().zip(&wide.per_n) {
            assert!(v_narrow <= v_wide + 1e-12);
        }
        assert!(narrow.phi_delta > 0.0);

        let empty = gap_phi(&spec, 8, 0.9, 4).unwrap();
        assert!(empty.far_empty);
        assert!(empty.phi_delta.is_infinite());
        assert!(empty.per_n.iter().all(|&(_, v)| v.is_infinite()));
    }

    // every cyclic node tuple of length n, keeping those that pass within
    // delta of nothing in the minimizer set at least once
    fn brute_gap(spec: &PotentialSpec, n_cells: usize, delta: f64, n: usize) -> f64 {
        let grid = LetterGrid::new(n_cells).unwrap();
        let w = build_graph(spec, grid).unwrap();
        let alpha = karp_min_mean(w.matrix()).unwrap();
        let r = reduce(&w, alpha);
        let diag = diagonal_analysis(spec, grid).unwrap();
        let k = grid.node_count();
        let far: Vec<bool> = (0..k)
            .map(|a| {
                crate::aubry::minimizer_distance(grid.node(a), &diag.minimizer_set) >= delta
            })
            .collect();
        let mut best = f64::INFINITY;
        let mut cycle = vec![0usize; n];
        loop {
            if cycle.iter().any(|&a| far[a]) {
                let sum: f64 = (0..n).map(|i| r.weight(cycle[i], cycle[(i + 1) % n])).sum();
                best = best.min(sum);
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == n {
                    return best;
                }
                cycle[pos] += 1;
                if cycle[pos] < k {
                    break;
                }
                cycle[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn gap_dp_matches_enumeration_on_small_grids() {
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        let table = gap_phi(&spec, 4, 0.25, 4).unwrap();
        for &(n, v) in &table.per_n {
            let brute = brute_gap(&spec, 4, 0.25, n);
            assert!(
                (v - brute).abs() <= 1e-12,
                "n = {n}: dp {v} vs enumeration {brute}"
            );
        }
    }

    #[test]
    fn tpo_pins_a_unique_minimum_on_the_degenerate_base() {
        let grid = LetterGrid::new(128).unwrap();
        let report = tpo_experiment(
            &PotentialSpec::SquaredDifference,
            0.3,
            0.05,
            grid,
            16,
            0.0,
            7,
        )
        .unwrap();
        assert!(report.unique_min);
        assert!((report.argmin - 0.3).abs() <= 1e-6);
        assert!((report.second_derivative - 0.1).abs() <= 1e-9);
    }

    #[test]
    fn tpo_flags_the_unperturbed_degenerate_base() {
        let grid = LetterGrid::new(128).unwrap();
        let report =
            tpo_experiment(&PotentialSpec::SquaredDifference, 0.3, 0.0, grid, 8, 0.0, 7)
                .unwrap();
        assert!(!report.unique_min);
        assert_eq!(report.robustness_radius, 0.0);
    }

    #[test]
    fn tpo_ladder_is_deterministic_and_reports_progress() {
        let grid = LetterGrid::new(64).unwrap();
        let run = || {
            tpo_experiment(
                &PotentialSpec::SquaredDifference,
                0.7,
                0.05,
                grid,
                16,
                0.005,
                11,
            )
            .unwrap()
        };
        let first = run();
        let second = run();
        assert_eq!(first, second);
        assert!(first.unique_min);
        assert!(first.levels_passed > 0, "no noise level survived");
        assert!(first.robustness_radius > 0.0);
        assert_eq!(first.levels_total, TPO_LEVELS);
    }

    #[test]
    fn tpo_rejects_bad_targets() {
        let grid = LetterGrid::new(8).unwrap();
        assert!(tpo_experiment(&seesaw(), 0.3, 0.05, grid, 4, 0.0, 1).is_err());
        assert!(
            tpo_experiment(&PotentialSpec::SquaredDifference, 0.0, 0.05, grid, 4, 0.0, 1)
                .is_err()
        );
        assert!(
            tpo_experiment(&PotentialSpec::SquaredDifference, 0.3, 0.05, grid, 0, 0.0, 1)
                .is_err()
        );
    }

    #[test]
    fn descent_energy_matches_grid_dp() {
        // grid DP: min diagonal of the n-th min-plus power of the raw weights
        let spec = PotentialSpec::SquaredDifferencePlusWell;
        let n = 3;
        let grid = LetterGrid::new(32).unwrap();
        let w = build_graph(&spec, grid).unwrap();
        let mut power = w.matrix().clone();
        for _ in 1..n {
            power = power.multiply(w.matrix()).unwrap();
        }
        let dp = power.min_diagonal();
        let trace = orbit_descent(&spec, n, DescentInit::Seed(9), 1e-10, 200).unwrap();
        let lip = crate::potential::lipschitz_bound(&spec, 64).unwrap();
        let slack = 1e-6 + n as f64 * lip.l_planar / 32.0;
        let energy = *trace.energies.last().unwrap();
        assert!(energy <= dp + slack);
        assert!(dp <= energy + slack);
    }
}
