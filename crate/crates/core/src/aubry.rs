//! Aubry letters, Peierls equivalence classes, static-orbit certificates,
//! and the Mather-support containment checks.
//!
//! Membership is decided on the letter graph: a is an Aubry letter iff
//! D(a, a) vanishes, cross-checked against the barrier diagonal H(a, a)
//! (the two characterizations must agree or the run aborts). The bridge to
//! sequence space: a^inf is Aubry iff a is an Aubry letter, and a periodic
//! word is Aubry iff its static certificate passes.

use crate::error::{Error, Result};
use crate::lettergraph::{LetterGrid, ReducedMatrix};
use crate::mane::{BarrierMatrix, ManeMatrix};
use crate::spectrum::{MinimizerSet, SpectralResult};
use crate::subaction::Subaction;

/// D values are sums of at most N+1 doubles, so the zero test scales the
/// machine epsilon by the grid size with an absolute floor.
pub fn default_tol_zero(n_cells: usize) -> f64 {
    (10.0 * f64::EPSILON * n_cells as f64).max(1e-9)
}

/// Letters whose self Mañé value vanishes.
pub fn aubry_letters(mane: &ManeMatrix, tol_zero: f64) -> Result<Vec<usize>> {
    let letters: Vec<usize> = (0..mane.dim())
        .filter(|&a| mane.get(a, a).abs() <= tol_zero)
        .collect();
    if letters.is_empty() {
        return Err(Error::EmptyAubry { tol: tol_zero });
    }
    Ok(letters)
}

/// The barrier diagonal must single out exactly the same letters as the
/// Mañé diagonal. Requires the barrier to have been relayed through the
/// same letter set.
fn verify_barrier_diagonal(
    mane: &ManeMatrix,
    barrier: &BarrierMatrix,
    letters: &[usize],
    tol_zero: f64,
) -> Result<()> {
    if barrier.aubry != letters {
        return Err(Error::Invalid(format!(
            "barrier was relayed through {:?}, not the Aubry letters {letters:?}",
            barrier.aubry
        )));
    }
    for a in 0..mane.dim() {
        let d_diag = mane.get(a, a);
        let h_diag = barrier.get(a, a);
        if (d_diag.abs() <= tol_zero) != (h_diag.abs() <= tol_zero) {
            return Err(Error::AubryMismatch {
                letter: a,
                d_diag,
                h_diag,
            });
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partition under the symmetrized-barrier relation, with transitivity
/// verified rather than imposed: a failure means the tolerance does not
/// separate the classes and must surface.
fn classes_from(
    related: impl Fn(usize, usize) -> bool,
    aubry: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let k = aubry.len();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if related(i, j) && related(j, l) && !related(i, l) {
                    return Err(Error::NotTransitive {
                        a: aubry[i],
                        b: aubry[j],
                        c: aubry[l],
                    });
                }
            }
        }
    }
    let mut uf = UnionFind::new(k);
    for i in 0..k {
        for j in i + 1..k {
            if related(i, j) {
                uf.union(i, j);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = uf.find(i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_slot[r]].push(aubry[i]);
    }
    Ok(classes)
}

/// a ~ b iff H(a, b) + H(b, a) <= tol_zero, over the Aubry letters.
pub fn equivalence_classes(
    barrier: &BarrierMatrix,
    aubry: &[usize],
    tol_zero: f64,
) -> Result<Vec<Vec<usize>>> {
    if aubry.is_empty() {
        return Err(Error::EmptyAubry { tol: tol_zero });
    }
    let h = barrier.closed_form();
    if let Some(&bad) = aubry.iter().find(|&&a| a >= h.dim()) {
        return Err(Error::PointOffGrid {
            index: bad,
            max: h.dim() - 1,
        });
    }
    classes_from(
        |i, j| h.get(aubry[i], aubry[j]) + h.get(aubry[j], aubry[i]) <= tol_zero,
        aubry,
    )
}

/// Distance from an abscissa to the refined minimizer set.
pub fn minimizer_distance(x: f64, m: &MinimizerSet) -> f64 {
    match m {
        MinimizerSet::Points(ps) => ps
            .iter()
            .map(|p| (x - p).abs())
            .fold(f64::INFINITY, f64::min),
        MinimizerSet::Interval { lo, hi } => (lo - x).max(x - hi).max(0.0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AubryReport {
    pub aubry_letters: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    /// Per Aubry letter, distance from its abscissa to the refined
    /// minimizer set of the diagonal.
    pub m_distance: Vec<f64>,
    pub tol_zero: f64,
}

pub fn aubry_report(
    grid: LetterGrid,
    mane: &ManeMatrix,
    barrier: &BarrierMatrix,
    minimizers: &MinimizerSet,
    tol_zero: f64,
) -> Result<AubryReport> {
    let letters = aubry_letters(mane, tol_zero)?;
    verify_barrier_diagonal(mane, barrier, &letters, tol_zero)?;
    let classes = equivalence_classes(barrier, &letters, tol_zero)?;
    let m_distance = letters
        .iter()
        .map(|&a| minimizer_distance(grid.node(a), minimizers))
        .collect();
    Ok(AubryReport {
        aubry_letters: letters,
        classes,
        m_distance,
        tol_zero,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticCertificate {
    pub word: Vec<usize>,
    pub is_static: bool,
    pub is_semistatic: bool,
    /// max over pairs of |sum + D(p_j, p_i)|.
    pub static_defect: f64,
    /// max over pairs of |sum - D(p_i, p_j)|.
    pub semistatic_defect: f64,
    /// Defect of the strongest property claimed; distance to the nearest
    /// certificate when neither holds.
    pub worst_violation: f64,
    pub checked_pairs: usize,
}

/// Check the static and semi-static partial-sum identities over every pair
/// 0 <= i < j <= 2 len on the cyclic word.
pub fn static_check(
    word: &[usize],
    r: &ReducedMatrix,
    mane: &ManeMatrix,
    tol: f64,
) -> Result<StaticCertificate> {
    if word.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let n = mane.dim();
    if let Some(&bad) = word.iter().find(|&&p| p >= n) {
        return Err(Error::PointOffGrid { index: bad, max: n - 1 });
    }
    let len = word.len();
    let at = |t: usize| word[t % len];
    // prefix sums over the cyclic word, out to 2 len edges
    let mut prefix = vec![0.0];
    for t in 0..2 * len {
        let last = *prefix.last().unwrap();
        prefix.push(last + r.weight(at(t), at(t + 1)));
    }
    let mut static_defect: f64 = 0.0;
    let mut semistatic_defect: f64 = 0.0;
    let mut checked_pairs = 0;
    for i in 0..2 * len {
        for j in i + 1..=2 * len {
            let sum = prefix[j] - prefix[i];
            static_defect = static_defect.max((sum + mane.get(at(j), at(i))).abs());
            semistatic_defect = semistatic_defect.max((sum - mane.get(at(i), at(j))).abs());
            checked_pairs += 1;
        }
    }
    let is_static = static_defect <= tol;
    let is_semistatic = semistatic_defect <= tol;
    let worst_violation = if is_static {
        static_defect
    } else if is_semistatic {
        semistatic_defect
    } else {
        static_defect.min(semistatic_defect)
    };
    Ok(StaticCertificate {
        word: word.to_vec(),
        is_static,
        is_semistatic,
        static_defect,
        semistatic_defect,
        worst_violation,
        checked_pairs,
    })
}

/// Largest deviation from v(p_{k+1}) - v(p_k) = r(p_k, p_{k+1}) along the
/// cyclic word; vanishes for static words.
pub fn static_subaction_defect(word: &[usize], r: &ReducedMatrix, sub: &Subaction) -> f64 {
    let len = word.len();
    let at = |t: usize| word[t % len];
    (0..len)
        .map(|k| (sub.values[at(k + 1)] - sub.values[at(k)] - r.weight(at(k), at(k + 1))).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatherSupport {
    pub witness_nodes: Vec<usize>,
    /// Letters with a zero-mean self-loop: candidates for optimal Dirac
    /// measures.
    pub zero_loop_letters: Vec<usize>,
    /// Two-sided set distance between the zero-loop abscissae and the
    /// refined minimizer set; present only under a passing twist
    /// certificate, where the sets must agree within one cell.
    pub hausdorff: Option<f64>,
    pub cell: f64,
}

fn hausdorff_to_minimizers(loops: &[f64], m: &MinimizerSet) -> f64 {
    let forward = loops
        .iter()
        .map(|&x| minimizer_distance(x, m))
        .fold(0.0f64, f64::max);
    let dist_to_loops = |y: f64| {
        loops
            .iter()
            .map(|l| (y - l).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let backward = match m {
        MinimizerSet::Points(ps) => ps.iter().map(|&p| dist_to_loops(p)).fold(0.0f64, f64::max),
        MinimizerSet::Interval { lo, hi } => {
            // the sup over [lo, hi] is attained at an endpoint or at a
            // midpoint between consecutive loop abscissae
            let mut candidates = vec![*lo, *hi];
            let mut sorted = loops.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for pair in sorted.windows(2) {
                let mid = 0.5 * (pair[0] + pair[1]);
                if mid > *lo && mid < *hi {
                    candidates.push(mid);
                }
            }
            candidates
                .into_iter()
                .map(dist_to_loops)
                .fold(0.0f64, f64::max)
        }
    };
    forward.max(backward)
}

/// Containments around the optimal measures: the witness cycle must sit
/// inside the Aubry set, and under twist the zero-loop letters trace the
/// minimizer set within one cell.
pub fn mather_support(
    spectral: &SpectralResult,
    r: &ReducedMatrix,
    aubry: &[usize],
    tol_zero: f64,
) -> Result<MatherSupport> {
    for &node in &spectral.witness {
        if !aubry.contains(&node) {
            return Err(Error::WitnessEscapes { node });
        }
    }
    let grid = r.grid();
    let n = r.matrix().dim();
    let zero_loop_letters: Vec<usize> = (0..n)
        .filter(|&a| r.weight(a, a).abs() <= tol_zero)
        .collect();
    let cell = grid.spacing();
    let hausdorff = if spectral.twist.passed {
        let loops: Vec<f64> = zero_loop_letters.iter().map(|&a| grid.node(a)).collect();
        if loops.is_empty() {
            return Err(Error::SupportMismatch(
                "no zero-mean self-loops under a passing twist certificate".into(),
            ));
        }
        let d = hausdorff_to_minimizers(&loops, &spectral.minimizer_set);
        if d > cell + 1e-12 {
            return Err(Error::SupportMismatch(format!(
                "zero-loop letters sit {d} from the minimizer set, over one cell {cell}"
            )));
        }
        Some(d)
    } else {
        None
    };
    Ok(MatherSupport {
        witness_nodes: spectral.witness.clone(),
        zero_loop_letters,
        hausdorff,
        cell,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lettergraph::{build_graph, reduce, LetterGrid};
    use crate::mane::tests::pipeline;
    use crate::mane::{default_window, peierls_letter};
    use crate::potential::{BivariatePoly, PotentialSpec};
    use crate::spectrum::{diagonal_analysis, spectral_analysis};
    use crate::subaction::{default_max_iters, solve_subaction, SOLVER_TOL};

    // (x - y)^2 + (x - 1/4)^2 (x - 3/4)^2: equal wells on-grid at N = 8
    pub(crate) fn double_well() -> PotentialSpec {
        let mut coeffs = vec![0.0; 25];
        coeffs[0] = 0.03515625;
        coeffs[2] = 1.0;
        coeffs[5] = -0.375;
        coeffs[6] = -2.0;
        coeffs[10] = 2.375;
        coeffs[15] = -2.0;
        coeffs[20] = 1.0;
        PotentialSpec::Polynomial(BivariatePoly::new(4, coeffs).unwrap())
    }

    // (x + y - 1)^2: not twist, every letter lies on a zero two-cycle
    pub(crate) fn seesaw() -> PotentialSpec {
        let coeffs = vec![1.0, -2.0, 1.0, -2.0, 2.0, 0.0, 1.0, 0.0, 0.0];
        PotentialSpec::Polynomial(BivariatePoly::new(2, coeffs).unwrap())
    }

    #[test]
    fn builtin_aubry_letters() {
        let p = pipeline(&PotentialSpec::Product, 1);
        assert_eq!(aubry_letters(&p.mane, 1e-9).unwrap(), vec![1]);

        let p = pipeline(&PotentialSpec::SquaredDifference, 8);
        assert_eq!(
            aubry_letters(&p.mane, 1e-9).unwrap(),
            (0..9).collect::<Vec<_>>()
        );

        let p = pipeline(&PotentialSpec::SquaredDifferencePlusWell, 8);
        assert_eq!(aubry_letters(&p.mane, 1e-9).unwrap(), vec![4]);
    }

    #[test]
    fn tol_zero_scales_with_grid() {
        assert_eq!(default_tol_zero(8), 1e-9);
        let big = default_tol_zero(1 << 24);
        assert!(big > 1e-9 && big < 1e-6);
    }

    #[test]
    fn wrong_relay_set_is_caught() {
        let p = pipeline(&PotentialSpec::Product, 1);
        let barrier = peierls_letter(&p.r, &p.mane, &[0], (2, 8)).unwrap();
        let grid = LetterGrid::new(1).unwrap();
        let diag = diagonal_analysis(&PotentialSpec::Product, grid).unwrap();
        let err = aubry_report(grid, &p.mane, &barrier, &diag.minimizer_set, 1e-9);
        assert!(err.is_err());

        // same wrong relay, but aligned letter lists: the diagonal check fires
        let relay = barrier.aubry.clone();
        let mismatch = verify_barrier_diagonal(&p.mane, &barrier, &relay, 1e-9);
        assert!(matches!(mismatch, Err(Error::AubryMismatch { .. })));
    }

    #[test]
    fn flat_potential_classes_are_singletons() {
        let p = pipeline(&PotentialSpec::SquaredDifference, 2);
        let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
        let barrier = peierls_letter(&p.r, &p.mane, &aubry, default_window(3)).unwrap();
        let classes = equivalence_classes(&barrier, &aubry, 1e-9).unwrap();
        assert_eq!(classes, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn double_well_splits_into_two_classes() {
        let spec = double_well();
        let grid = LetterGrid::new(8).unwrap();
        let p = pipeline(&spec, 8);
        let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
        assert_eq!(aubry, vec![2, 6]);
        let barrier = peierls_letter(&p.r, &p.mane, &aubry, default_window(9)).unwrap();
        let diag = diagonal_analysis(&spec, grid).unwrap();
        let report = aubry_report(grid, &p.mane, &barrier, &diag.minimizer_set, 1e-9).unwrap();
        assert_eq!(report.classes, vec![vec![2], vec![6]]);
        for d in &report.m_distance {
            assert!(*d <= 1e-6, "letter sits {d} from the wells");
        }
    }

    #[test]
    fn seesaw_pairs_letters_with_their_mirrors() {
        let spec = seesaw();
        let p = pipeline(&spec, 8);
        let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
        assert_eq!(aubry, (0..9).collect::<Vec<_>>());
        let barrier = peierls_letter(&p.r, &p.mane, &aubry, default_window(9)).unwrap();
        let classes = equivalence_classes(&barrier, &aubry, 1e-9).unwrap();
        assert_eq!(
            classes,
            vec![
                vec![0, 8],
                vec![1, 7],
                vec![2, 6],
                vec![3, 5],
                vec![4]
            ]
        );
    }

    #[test]
    fn intransitive_relation_surfaces_the_triple() {
        // knife-edge tolerances: 0~1 and 1~2 hold, 0~2 fails
        let sums = [[0.0, 0.9, 1.8], [0.9, 0.0, 0.9], [1.8, 0.9, 0.0]];
        let err = classes_from(|i, j| sums[i][j] <= 1.0, &[0, 1, 2]);
        assert!(matches!(
            err,
            Err(Error::NotTransitive { a: 0, b: 1, c: 2 })
        ));
    }

    #[test]
    fn product_static_certificates() {
        let p = pipeline(&PotentialSpec::Product, 1);
        let cert = static_check(&[1], &p.r, &p.mane, 1e-9).unwrap();
        assert!(cert.is_static);
        assert!(cert.is_semistatic);
        assert_eq!(cert.static_defect, 0.0);
        assert_eq!(cert.checked_pairs, 3);

        let cert = static_check(&[0], &p.r, &p.mane, 1e-9).unwrap();
        assert!(!cert.is_static);
        assert!(!cert.is_semistatic);
        // sums grow as k while -D(0,0) = -1 stays put
        assert!(cert.static_defect >= 2.0);
    }

    #[test]
    fn seesaw_two_cycles_are_static_and_shift_invariant() {
        let spec = seesaw();
        let p = pipeline(&spec, 8);
        for a in 0..=8usize {
            let word = [a, 8 - a];
            let cert = static_check(&word, &p.r, &p.mane, 1e-9).unwrap();
            assert!(cert.is_static, "cycle {word:?}: defect {}", cert.static_defect);
            assert!(cert.is_semistatic);
            let shifted = [8 - a, a];
            assert!(static_check(&shifted, &p.r, &p.mane, 1e-9).unwrap().is_static);
        }
    }

    #[test]
    fn static_words_satisfy_the_subaction_identity() {
        for (spec, n_cells, word) in [
            (PotentialSpec::Product, 1, vec![1usize]),
            (PotentialSpec::SquaredDifferencePlusWell, 8, vec![4]),
            (seesaw(), 8, vec![2, 6]),
        ] {
            let grid = LetterGrid::new(n_cells).unwrap();
            let w = build_graph(&spec, grid).unwrap();
            let alpha = crate::spectrum::karp_min_mean(w.matrix()).unwrap();
            let r = reduce(&w, alpha);
            let sub =
                solve_subaction(&r, SOLVER_TOL, default_max_iters(grid.node_count())).unwrap();
            let defect = static_subaction_defect(&word, &r, &sub);
            assert!(defect <= 1e-9, "{spec:?}: defect {defect}");
        }
    }

    #[test]
    fn projection_words_off_the_aubry_letter_fail() {
        let p = pipeline(&PotentialSpec::Projection, 2);
        let cert = static_check(&[0], &p.r, &p.mane, 1e-9).unwrap();
        assert!(cert.is_static);
        let cert = static_check(&[2, 0], &p.r, &p.mane, 1e-9).unwrap();
        assert!(!cert.is_static);
        assert!(cert.static_defect > 0.5);
    }

    #[test]
    fn random_words_respect_the_squeeze() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let p = pipeline(&PotentialSpec::SquaredDifferencePlusWell, 8);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let len = rng.gen_range(1..=4);
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..9)).collect();
            let cert = static_check(&word, &p.r, &p.mane, 1e-9).unwrap();
            if cert.is_static {
                assert!(cert.is_semistatic, "{word:?}");
            }
            // partial sums dominate the Mañé hop, which dominates the
            // reversed hop's negation
            let at = |t: usize| word[t % len];
            let mut prefix = vec![0.0];
            for t in 0..2 * len {
                let last = *prefix.last().unwrap();
                prefix.push(last + p.r.weight(at(t), at(t + 1)));
            }
            for i in 0..2 * len {
                for j in i + 1..=2 * len {
                    let sum = prefix[j] - prefix[i];
                    assert!(sum >= p.mane.get(at(i), at(j)) - 1e-12);
                    assert!(p.mane.get(at(i), at(j)) >= -p.mane.get(at(j), at(i)) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn certificates_reject_bad_words() {
        let p = pipeline(&PotentialSpec::Product, 1);
        assert!(static_check(&[], &p.r, &p.mane, 1e-9).is_err());
        assert!(static_check(&[5], &p.r, &p.mane, 1e-9).is_err());
    }

    #[test]
    fn minimizer_distances() {
        let pts = MinimizerSet::Points(vec![0.25, 0.75]);
        assert_eq!(minimizer_distance(0.25, &pts), 0.0);
        assert_eq!(minimizer_distance(0.5, &pts), 0.25);
        assert_eq!(minimizer_distance(1.0, &pts), 0.25);
        let iv = MinimizerSet::Interval { lo: 0.25, hi: 0.5 };
        assert_eq!(minimizer_distance(0.375, &iv), 0.0);
        assert_eq!(minimizer_distance(0.125, &iv), 0.125);
        assert_eq!(minimizer_distance(0.75, &iv), 0.25);
    }

    #[test]
    fn mather_support_builtins() {
        let grid = LetterGrid::new(8).unwrap();
        for spec in [
            PotentialSpec::SquaredDifference,
            PotentialSpec::SquaredDifferencePlusWell,
            double_well(),
        ] {
            let spectral = spectral_analysis(&spec, grid).unwrap();
            let p = pipeline(&spec, 8);
            let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
            let support = mather_support(&spectral, &p.r, &aubry, 1e-9).unwrap();
            assert!(spectral.twist.passed);
            let d = support.hausdorff.expect("twist passed");
            assert!(d <= support.cell, "{spec:?}: set distance {d}");
        }
    }

    #[test]
    fn mather_support_skips_the_trace_check_without_twist() {
        let spec = seesaw();
        let grid = LetterGrid::new(8).unwrap();
        let spectral = spectral_analysis(&spec, grid).unwrap();
        assert!(!spectral.twist.passed);
        let p = pipeline(&spec, 8);
        let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
        let support = mather_support(&spectral, &p.r, &aubry, 1e-9).unwrap();
        assert_eq!(support.hausdorff, None);
        assert_eq!(support.zero_loop_letters, vec![4]);
    }

    #[test]
    fn escaped_witness_is_an_error() {
        let grid = LetterGrid::new(1).unwrap();
        let spectral = spectral_analysis(&PotentialSpec::Product, grid).unwrap();
        let p = pipeline(&PotentialSpec::Product, 1);
        let err = mather_support(&spectral, &p.r, &[0], 1e-9);
        assert!(matches!(err, Err(Error::WitnessEscapes { node: 1 })));
    }

    #[test]
    fn aubry_letters_stay_near_the_diagonal_minimum() {
        // twist containment: letters only where g sits within l_planar / N
        // of its minimum
        let spec = double_well();
        let bound = crate::potential::lipschitz_bound(&spec, 64).unwrap();
        let p = pipeline(&spec, 8);
        let aubry = aubry_letters(&p.mane, 1e-9).unwrap();
        let grid = LetterGrid::new(8).unwrap();
        let g_min = (0..9)
            .map(|a| spec.eval(grid.node(a), grid.node(a)).unwrap())
            .fold(f64::INFINITY, f64::min);
        for &a in &aubry {
            let g = spec.eval(grid.node(a), grid.node(a)).unwrap();
            assert!(g - g_min <= bound.l_planar / 8.0 + 1e-12);
        }
    }
}
