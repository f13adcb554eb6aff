//! Optimal ergodic averages on the letter graph.
//!
//! The optimal mean alpha is the minimum cycle mean of the weight matrix,
//! computed by Karp's recurrence. A witness cycle attaining it is recovered
//! from the reduced path closure, not from Karp's predecessor table: the
//! cycle that happens to sit on Karp's optimal walk need not attain the
//! minimum mean, so predecessor walks are unsound as witnesses.
//!
//! The diagonal story runs alongside: for twist potentials the optimal mean
//! equals the minimum of a |-> h(a, a), so the module also minimizes the
//! diagonal profile on the grid and refines it off-grid.

use crate::error::{Error, Result};
use crate::lettergraph::{LetterGrid, WeightMatrix};
use crate::minplus::MinPlusMatrix;
use crate::potential::{certify_twist, lipschitz_bound, PotentialSpec, TwistCertificate};

/// Absolute tolerance for recognizing zero-mean cycles in reduced weights.
pub const WITNESS_TOL: f64 = 1e-9;

/// A witness cycle must reproduce alpha to this relative accuracy.
const VERIFY_TOL: f64 = 1e-8;

const GOLDEN_ITERS: usize = 100;
const REFINE_SCAN: usize = 33;

/// Minimum cycle mean of an arbitrary min-plus matrix via Karp's recurrence.
///
/// Weights are shifted by the diagonal minimum before the recurrence so the
/// walk-length table stays O(1) in magnitude; the shift is added back at the
/// end. Without it, d_n grows like n * alpha and the final differences lose
/// the digits the 1e-12 contracts downstream need.
pub fn karp_min_mean(m: &MinPlusMatrix) -> Result<f64> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let diag = m.min_diagonal();
    let shift = if diag.is_finite() { diag } else { 0.0 };
    let mm = m.map(|v| v - shift);

    // d[k][v] = min weight of a k-edge walk from node 0 to v.
    let mut table = vec![vec![f64::INFINITY; n]; n + 1];
    table[0][0] = 0.0;
    for k in 0..n {
        for v in 0..n {
            let dv = table[k][v];
            if !dv.is_finite() {
                continue;
            }
            for u in 0..n {
                let cand = dv + mm.get(v, u);
                if cand < table[k + 1][u] {
                    table[k + 1][u] = cand;
                }
            }
        }
    }

    let mut best = f64::INFINITY;
    for v in 0..n {
        let dn = table[n][v];
        if !dn.is_finite() {
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            let dk = table[k][v];
            if dk.is_finite() {
                let ratio = (dn - dk) / (n - k) as f64;
                if ratio > worst {
                    worst = ratio;
                }
            }
        }
        if worst.is_finite() && worst < best {
            best = worst;
        }
    }
    if !best.is_finite() {
        return Err(Error::Invalid(
            "minimum cycle mean undefined: no closed walk through the source".into(),
        ));
    }
    Ok(best + shift)
}

/// Sum of edge weights around a cycle divided by its length.
pub fn cycle_mean(m: &MinPlusMatrix, cycle: &[usize]) -> f64 {
    assert!(!cycle.is_empty());
    let len = cycle.len();
    let total: f64 = (0..len)
        .map(|i| m.get(cycle[i], cycle[(i + 1) % len]))
        .sum();
    total / len as f64
}

/// Optimal mean together with a verified witness cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalMean {
    pub alpha: f64,
    /// Simple cycle attaining alpha; node indices, first node not repeated.
    pub witness: Vec<usize>,
    /// Mean of the witness on the original weights; agrees with alpha.
    pub witness_mean: f64,
}

pub fn optimal_mean(w: &WeightMatrix) -> Result<OptimalMean> {
    let m = w.matrix();
    let alpha = karp_min_mean(m)?;
    let witness = zero_cycle_witness(m, alpha)?;
    let witness_mean = cycle_mean(m, &witness);
    let scale = alpha.abs().max(1.0);
    if (witness_mean - alpha).abs() > VERIFY_TOL * scale {
        return Err(Error::Invalid(format!(
            "witness cycle mean {witness_mean} disagrees with alpha {alpha}"
        )));
    }
    Ok(OptimalMean {
        alpha,
        witness,
        witness_mean,
    })
}

/// Find a simple cycle whose reduced sum vanishes. Nodes on optimal cycles
/// show a zero diagonal in the reduced path closure; the smallest such node
/// is chosen, then the shortest zero excursion through it, then the walk is
/// rebuilt greedily against backward cost-to-go vectors and the first simple
/// subcycle is cut out. Every tie breaks toward the smallest node index, so
/// the result is deterministic.
fn zero_cycle_witness(m: &MinPlusMatrix, alpha: f64) -> Result<Vec<usize>> {
    let n = m.dim();
    let r = m.map(|v| v - alpha);
    let closure = r.path_closure(n)?;
    let vstar = (0..n)
        .find(|&v| closure.get(v, v).abs() <= WITNESS_TOL)
        .ok_or_else(|| {
            Error::Invalid("no zero-mean cycle found in reduced closure".into())
        })?;

    // Shortest excursion length: smallest k with a near-zero k-edge walk
    // vstar -> vstar.
    let mut forward = vec![f64::INFINITY; n];
    forward[vstar] = 0.0;
    let mut k_star = 0;
    for k in 1..=n {
        let mut next = vec![f64::INFINITY; n];
        for p in 0..n {
            let fp = forward[p];
            if !fp.is_finite() {
                continue;
            }
            for u in 0..n {
                let cand = fp + r.get(p, u);
                if cand < next[u] {
                    next[u] = cand;
                }
            }
        }
        forward = next;
        if forward[vstar].abs() <= WITNESS_TOL {
            k_star = k;
            break;
        }
    }
    if k_star == 0 {
        return Err(Error::Invalid(
            "zero-mean cycle vanished during reconstruction".into(),
        ));
    }

    // Backward cost-to-go: cost[t][u] = min walk u -> vstar in k_star - t edges.
    let mut cost = vec![vec![f64::INFINITY; n]; k_star + 1];
    cost[k_star][vstar] = 0.0;
    for t in (0..k_star).rev() {
        for u in 0..n {
            let mut best = f64::INFINITY;
            for j in 0..n {
                let cand = r.get(u, j) + cost[t + 1][j];
                if cand < best {
                    best = cand;
                }
            }
            cost[t][u] = best;
        }
    }

    let mut walk = Vec::with_capacity(k_star + 1);
    walk.push(vstar);
    let mut at = vstar;
    for t in 0..k_star {
        let mut best = f64::INFINITY;
        let mut pick = usize::MAX;
        for j in 0..n {
            let cand = r.get(at, j) + cost[t + 1][j];
            if cand < best {
                best = cand;
                pick = j;
            }
        }
        if pick == usize::MAX {
            return Err(Error::WitnessEscapes { node: at });
        }
        walk.push(pick);
        at = pick;
    }

    // First simple subcycle of the walk; subcycles of a zero-sum walk are
    // themselves zero-sum because no cycle is negative in reduced weights.
    let mut seen_at = vec![usize::MAX; n];
    for (t, &u) in walk.iter().enumerate() {
        if seen_at[u] != usize::MAX {
            return Ok(walk[seen_at[u]..t].to_vec());
        }
        seen_at[u] = t;
    }
    Err(Error::WitnessEscapes { node: vstar })
}

/// Minimizers of the diagonal profile a |-> h(a, a).
#[derive(Clone, Debug, PartialEq)]
pub enum MinimizerSet {
    /// Isolated minimizers, sorted ascending, deduplicated at 1e-6.
    Points(Vec<f64>),
    /// More than a quarter of the nodes sit at the minimum level: report the
    /// hull of the qualifying nodes instead of a point list.
    Interval { lo: f64, hi: f64 },
}

/// Node-level threshold for "attains the diagonal minimum".
pub const MINIMIZER_LEVEL_TOL: f64 = 1e-9;

const MINIMIZER_DEDUP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalAnalysis {
    /// Minimum of h(a, a) over grid nodes.
    pub alpha_diag_grid: f64,
    /// Minimum of h(a, a) over the whole interval, refined off-grid.
    pub alpha_diag_refined: f64,
    /// Location of the refined minimum.
    pub refined_argmin: f64,
    pub minimizer_set: MinimizerSet,
}

/// Scan an interval, then golden-section the bracket around the best sample.
/// Endpoints stay in the candidate set so boundary minima are exact.
fn refine_interval(spec: &PotentialSpec, lo: f64, hi: f64) -> (f64, f64) {
    let g = |a: f64| spec.eval_raw(a, a);
    debug_assert!(lo <= hi);
    if hi - lo <= f64::EPSILON {
        return (lo, g(lo));
    }
    let step = (hi - lo) / (REFINE_SCAN - 1) as f64;
    let mut best_i = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..REFINE_SCAN {
        let a = if i + 1 == REFINE_SCAN { hi } else { lo + i as f64 * step };
        let v = g(a);
        if v < best_val {
            best_val = v;
            best_i = i;
        }
    }
    let mut a = if best_i == 0 { lo } else { lo + (best_i - 1) as f64 * step };
    let mut b = if best_i + 2 >= REFINE_SCAN {
        hi
    } else {
        lo + (best_i + 1) as f64 * step
    };
    let mut best_a = if best_i + 1 == REFINE_SCAN {
        hi
    } else {
        lo + best_i as f64 * step
    };

    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    for cand in [c, d, 0.5 * (a + b), lo, hi] {
        let v = g(cand);
        if v < best_val {
            best_val = v;
            best_a = cand;
        }
    }
    (best_a, best_val)
}

pub fn diagonal_analysis(spec: &PotentialSpec, grid: LetterGrid) -> Result<DiagonalAnalysis> {
    let count = grid.node_count();
    let g: Vec<f64> = grid.nodes().map(|a| spec.eval_raw(a, a)).collect();
    let grid_min = g.iter().copied().fold(f64::INFINITY, f64::min);

    // Cells worth refining: the true in-cell minimum can undershoot the
    // endpoint minimum by at most the diagonal slope times half a cell, so a
    // slack of l_shift * spacing is safely generous.
    let lip = lipschitz_bound(spec, count.max(64))?;
    let slack = lip.l_shift * grid.spacing();
    let mut refined_min = grid_min;
    let mut refined_argmin = {
        let i = g.iter().position(|&v| v == grid_min).unwrap();
        grid.node(i)
    };
    for i in 0..count - 1 {
        if g[i].min(g[i + 1]) <= grid_min + slack {
            let (a, v) = refine_interval(spec, grid.node(i), grid.node(i + 1));
            if v < refined_min {
                refined_min = v;
                refined_argmin = a;
            }
        }
    }

    let qualifying: Vec<usize> = (0..count)
        .filter(|&i| g[i] <= grid_min + MINIMIZER_LEVEL_TOL)
        .collect();
    let minimizer_set = if qualifying.len() * 4 > count {
        MinimizerSet::Interval {
            lo: grid.node(qualifying[0]),
            hi: grid.node(*qualifying.last().unwrap()),
        }
    } else {
        let mut points = Vec::new();
        let mut run_start = 0;
        while run_start < qualifying.len() {
            let mut run_end = run_start;
            while run_end + 1 < qualifying.len()
                && qualifying[run_end + 1] == qualifying[run_end] + 1
            {
                run_end += 1;
            }
            let lo = (grid.node(qualifying[run_start]) - grid.spacing()).max(0.0);
            let hi = (grid.node(qualifying[run_end]) + grid.spacing()).min(1.0);
            let (a, _) = refine_interval(spec, lo, hi);
            if points
                .last()
                .is_none_or(|&prev: &f64| (a - prev).abs() > MINIMIZER_DEDUP)
            {
                points.push(a);
            }
            run_start = run_end + 1;
        }
        MinimizerSet::Points(points)
    };

    Ok(DiagonalAnalysis {
        alpha_diag_grid: grid_min,
        alpha_diag_refined: refined_min,
        refined_argmin,
        minimizer_set,
    })
}

/// Everything the optimal-mean layer knows about one potential on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub n_cells: usize,
    /// Minimum cycle mean on the letter graph.
    pub alpha_grid: f64,
    pub alpha_diag_grid: f64,
    pub alpha_diag_refined: f64,
    pub refined_argmin: f64,
    /// alpha_grid - alpha_diag_grid; vanishes for certified twist potentials.
    pub agreement_gap: f64,
    pub witness: Vec<usize>,
    pub witness_mean: f64,
    pub twist: TwistCertificate,
    pub minimizer_set: MinimizerSet,
}

pub fn spectral_analysis(spec: &PotentialSpec, grid: LetterGrid) -> Result<SpectralResult> {
    let w = crate::lettergraph::build_graph(spec, grid)?;
    let mean = optimal_mean(&w)?;
    let diag = diagonal_analysis(spec, grid)?;
    let twist = certify_twist(spec, grid.node_count().max(64))?;
    Ok(SpectralResult {
        n_cells: grid.n_cells(),
        alpha_grid: mean.alpha,
        alpha_diag_grid: diag.alpha_diag_grid,
        alpha_diag_refined: diag.alpha_diag_refined,
        refined_argmin: diag.refined_argmin,
        agreement_gap: mean.alpha - diag.alpha_diag_grid,
        witness: mean.witness,
        witness_mean: mean.witness_mean,
        twist,
        minimizer_set: diag.minimizer_set,
    })
}

/// Per-length minimal walk means: per_n = (min entry of w^n) / n. The tail
/// minimum is the liminf estimate; it converges to alpha from below with an
/// O(1/n) closing correction.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanTrace {
    pub per_n: Vec<f64>,
    pub liminf: f64,
    pub n_max: usize,
}

pub fn mean_trace(m: &MinPlusMatrix, n_max: usize) -> Result<MeanTrace> {
    if n_max == 0 {
        return Err(Error::Invalid("mean trace needs n_max >= 1".into()));
    }
    let mut per_n = Vec::with_capacity(n_max);
    let mut power = m.clone();
    per_n.push(power.min_entry());
    for n in 2..=n_max {
        power = power.multiply(m)?;
        per_n.push(power.min_entry() / n as f64);
    }
    let tail_start = n_max / 2;
    let liminf = per_n[tail_start..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(MeanTrace {
        per_n,
        liminf,
        n_max,
    })
}
