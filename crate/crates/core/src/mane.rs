//! Mañé potentials, Peierls barriers, and their sequence-level values.
//!
//! D(a, b) is the minimal reduced weight over paths a -> b with at least one
//! edge. It is computed on the reweighted (nonnegative) graph and then
//! un-reweighted, which keeps the closure numerically stable: no near-zero
//! negative cycle can compound. H(a, b) relays through the Aubry letters,
//! min_c D(a, c) + D(c, b), and is cross-checked against a windowed liminf
//! proxy built from plain matrix powers.
//!
//! Sequence-level values live on eventually periodic points: follow the
//! point's own letters for a forced prefix, then close with a barrier hop to
//! the target's first letter. A strictly positive reduced period sum means
//! the prefix sums run away and the value is divergent.

use crate::error::{Error, Result};
use crate::lettergraph::{LetterGrid, ReducedMatrix};
use crate::minplus::MinPlusMatrix;
use crate::subaction::ReweightedGraph;

/// Per-period reduced sums above this are reported divergent.
pub const DIVERGENCE_TOL: f64 = 1e-9;

/// Phase spread above this sets the phase-dependence flag.
const PHASE_TOL: f64 = 1e-9;

const DIAG_TOL: f64 = 1e-12;

/// Letter-level Mañé potential.
#[derive(Clone, Debug, PartialEq)]
pub struct ManeMatrix {
    matrix: MinPlusMatrix,
}

impl ManeMatrix {
    pub fn matrix(&self) -> &MinPlusMatrix {
        &self.matrix
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// All-pairs >= 1-edge shortest paths on the reweighted graph, un-reweighted
/// back to reduced units: D(a, b) = dist_u(a, b) - v(a) + v(b).
pub fn mane_matrix(rw: &ReweightedGraph) -> Result<ManeMatrix> {
    let m = rw.matrix();
    let n = m.dim();
    if m.min_entry() < crate::subaction::REWEIGHT_TOL {
        return Err(Error::Invalid(
            "reweighted graph has a negative entry; subaction is stale".into(),
        ));
    }
    let dist = m.path_closure(n)?;
    let v = rw.values();
    let mut matrix = MinPlusMatrix::new(n, 0.0);
    for a in 0..n {
        for b in 0..n {
            matrix.set(a, b, dist.get(a, b) - v[a] + v[b]);
        }
    }
    // cheap sanity: no negative cycles survive an exact alpha
    for a in 0..n {
        if matrix.get(a, a) < -DIAG_TOL {
            return Err(Error::Invalid(format!(
                "negative self-value D({a},{a}) = {}; alpha is stale",
                matrix.get(a, a)
            )));
        }
        for b in 0..n {
            if matrix.get(a, b) + matrix.get(b, a) < -DIAG_TOL {
                return Err(Error::Invalid(format!(
                    "negative round trip D({a},{b}) + D({b},{a})"
                )));
            }
        }
    }
    Ok(ManeMatrix { matrix })
}

/// Peierls barrier: closed form through the Aubry letters plus the windowed
/// liminf proxy and their disagreement.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierMatrix {
    closed_form: MinPlusMatrix,
    windowed_liminf: MinPlusMatrix,
    pub agreement: f64,
    pub window: (usize, usize),
    pub aubry: Vec<usize>,
}

impl BarrierMatrix {
    pub fn closed_form(&self) -> &MinPlusMatrix {
        &self.closed_form
    }

    pub fn windowed_liminf(&self) -> &MinPlusMatrix {
        &self.windowed_liminf
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.closed_form.get(a, b)
    }
}

/// Default barrier window: path lengths from one grid diameter to four.
pub fn default_window(node_count: usize) -> (usize, usize) {
    (node_count, 4 * node_count)
}

pub fn peierls_letter(
    r: &ReducedMatrix,
    mane: &ManeMatrix,
    aubry: &[usize],
    window: (usize, usize),
) -> Result<BarrierMatrix> {
    let n = mane.dim();
    if r.matrix().dim() != n {
        return Err(Error::SizeMismatch {
            left: r.matrix().dim(),
            right: n,
        });
    }
    if aubry.is_empty() {
        return Err(Error::Invalid(
            "empty Aubry letter set handed to the barrier".into(),
        ));
    }
    if let Some(&bad) = aubry.iter().find(|&&c| c >= n) {
        return Err(Error::PointOffGrid { index: bad, max: n - 1 });
    }
    let (lo, hi) = window;
    if lo < 1 || hi < lo {
        return Err(Error::Invalid(format!("bad barrier window [{lo}, {hi}]")));
    }

    let mut closed_form = MinPlusMatrix::new(n, f64::INFINITY);
    for a in 0..n {
        for b in 0..n {
            let mut best = f64::INFINITY;
            for &c in aubry {
                let cand = mane.get(a, c) + mane.get(c, b);
                if cand < best {
                    best = cand;
                }
            }
            closed_form.set(a, b, best);
        }
    }

    // Liminf proxy: fold the elementwise minimum of r^n over the upper half
    // of the window, where transients from short paths have died out.
    let tail_lo = lo + (hi - lo) / 2;
    let base = r.matrix();
    let mut power = base.clone();
    let mut folded: Option<MinPlusMatrix> = None;
    for len in 1..=hi {
        if len > 1 {
            power = power.multiply(base)?;
        }
        if len >= tail_lo {
            folded = Some(match folded {
                None => power.clone(),
                Some(acc) => acc.elementwise_min(&power)?,
            });
        }
    }
    let windowed_liminf = folded.expect("window upper bound is >= its tail start");
    let agreement = closed_form.max_abs_diff(&windowed_liminf)?;

    Ok(BarrierMatrix {
        closed_form,
        windowed_liminf,
        agreement,
        window,
        aubry: aubry.to_vec(),
    })
}

/// A point of the sequence space with eventually periodic letters, given by
/// grid node indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodicPoint {
    pub preperiod: Vec<usize>,
    pub period: Vec<usize>,
}

fn gcd(a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl EventuallyPeriodicPoint {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(Self { preperiod, period })
    }

    /// The fixed point a^inf at one node.
    pub fn fixed(node: usize) -> Self {
        Self {
            preperiod: Vec::new(),
            period: vec![node],
        }
    }

    pub fn check_on_grid(&self, node_count: usize) -> Result<()> {
        for &i in self.preperiod.iter().chain(&self.period) {
            if i >= node_count {
                return Err(Error::PointOffGrid {
                    index: i,
                    max: node_count - 1,
                });
            }
        }
        Ok(())
    }

    pub fn letter(&self, i: usize) -> usize {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn first_letter(&self) -> usize {
        self.letter(0)
    }

    /// The shifted point sigma^n(x).
    pub fn shifted(&self, n: usize) -> Self {
        if n <= self.preperiod.len() {
            Self {
                preperiod: self.preperiod[n..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let rot = (n - self.preperiod.len()) % self.period.len();
            let mut period = self.period[rot..].to_vec();
            period.extend_from_slice(&self.period[..rot]);
            Self {
                preperiod: Vec::new(),
                period,
            }
        }
    }

    pub fn shift(&self) -> Self {
        self.shifted(1)
    }

    /// Equality as points of the sequence space (letterwise), not as
    /// representations: agreement over both preperiods plus one common
    /// period is decisive.
    pub fn seq_eq(&self, other: &Self) -> bool {
        let k = self.preperiod.len().max(other.preperiod.len());
        let l = self.period.len() / gcd(self.period.len(), other.period.len())
            * other.period.len();
        (0..k + l).all(|i| self.letter(i) == other.letter(i))
    }
}

/// Metric d(x, y) = sum |x_i - y_i| / 2^i, evaluated in closed form for
/// eventually periodic points (head term by term, periodic tail as a
/// geometric series).
pub fn shift_distance(
    x: &EventuallyPeriodicPoint,
    y: &EventuallyPeriodicPoint,
    grid: LetterGrid,
) -> Result<f64> {
    x.check_on_grid(grid.node_count())?;
    y.check_on_grid(grid.node_count())?;
    let k = x.preperiod.len().max(y.preperiod.len());
    let m = x.period.len() / gcd(x.period.len(), y.period.len()) * y.period.len();
    let gap = |i: usize| (grid.node(x.letter(i)) - grid.node(y.letter(i))).abs();
    let mut head = 0.0;
    for i in 0..k {
        head += gap(i) * 0.5f64.powi(i as i32);
    }
    let mut block = 0.0;
    for t in 0..m {
        block += gap(k + t) * 0.5f64.powi(t as i32);
    }
    let tail = 0.5f64.powi(k as i32) * block / (1.0 - 0.5f64.powi(m as i32));
    Ok(head + tail)
}

/// Value of a sequence-level barrier computation.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceValue {
    Finite(f64),
    Divergent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceBarrierResult {
    pub value: SequenceValue,
    /// Per-step growth of the prefix sums when divergent; zero otherwise.
    pub growth_rate: f64,
    /// P_K along the source point, K = 0 ..= preperiod + two periods.
    pub prefix_trace: Vec<f64>,
    /// The phase candidates do not agree within tolerance; the reported
    /// value is their minimum.
    pub phase_dependent: bool,
    /// The target is an exact shifted suffix of the source, so cutting with
    /// no barrier hop was also a candidate.
    pub self_overlap: bool,
    /// min over phases j of P_j + B(x_j, y_0); present when finite.
    pub barrier_candidate: Option<f64>,
    /// min over n with sigma^n(x) = y of P_n; present when such n exist.
    pub suffix_candidate: Option<f64>,
}

fn sequence_value(
    x: &EventuallyPeriodicPoint,
    y: &EventuallyPeriodicPoint,
    r: &ReducedMatrix,
    tail: &MinPlusMatrix,
) -> Result<SequenceBarrierResult> {
    let n = r.matrix().dim();
    if tail.dim() != n {
        return Err(Error::SizeMismatch {
            left: tail.dim(),
            right: n,
        });
    }
    x.check_on_grid(n)?;
    y.check_on_grid(n)?;

    let u = x.preperiod.len();
    let l = x.period.len();
    let span = u + 2 * l;

    let mut prefix_trace = Vec::with_capacity(span + 1);
    prefix_trace.push(0.0);
    for t in 0..span {
        let step = r.weight(x.letter(t), x.letter(t + 1));
        prefix_trace.push(prefix_trace[t] + step);
    }

    let period_sum: f64 = (0..l)
        .map(|i| r.weight(x.period[i], x.period[(i + 1) % l]))
        .sum();
    if period_sum > DIVERGENCE_TOL {
        return Ok(SequenceBarrierResult {
            value: SequenceValue::Divergent,
            growth_rate: period_sum / l as f64,
            prefix_trace,
            phase_dependent: false,
            self_overlap: false,
            barrier_candidate: None,
            suffix_candidate: None,
        });
    }
    if period_sum < -DIVERGENCE_TOL {
        return Err(Error::Invalid(format!(
            "period cycle sum {period_sum} is negative; alpha is stale"
        )));
    }

    let y0 = y.first_letter();
    let mut best_phase = f64::INFINITY;
    let mut worst_phase = f64::NEG_INFINITY;
    for j in (u + l)..(u + 2 * l) {
        let cand = prefix_trace[j] + tail.get(x.letter(j), y0);
        if cand < best_phase {
            best_phase = cand;
        }
        if cand > worst_phase {
            worst_phase = cand;
        }
    }
    let phase_dependent = worst_phase - best_phase > PHASE_TOL;

    let mut suffix_candidate: Option<f64> = None;
    for shift_n in 1..=span {
        if x.shifted(shift_n).seq_eq(y) {
            let cand = prefix_trace[shift_n];
            suffix_candidate = Some(match suffix_candidate {
                None => cand,
                Some(prev) => prev.min(cand),
            });
        }
    }

    let value = match suffix_candidate {
        Some(s) => best_phase.min(s),
        None => best_phase,
    };
    Ok(SequenceBarrierResult {
        value: SequenceValue::Finite(value),
        growth_rate: 0.0,
        prefix_trace,
        phase_dependent,
        self_overlap: suffix_candidate.is_some(),
        barrier_candidate: Some(best_phase),
        suffix_candidate,
    })
}

/// Sequence-level Mañé value: forced prefix along x, then a D hop to y's
/// first letter.
pub fn sequence_mane(
    x: &EventuallyPeriodicPoint,
    y: &EventuallyPeriodicPoint,
    r: &ReducedMatrix,
    mane: &ManeMatrix,
) -> Result<SequenceBarrierResult> {
    sequence_value(x, y, r, mane.matrix())
}

/// Sequence-level Peierls value: same prefix logic with the H tail.
pub fn sequence_barrier(
    x: &EventuallyPeriodicPoint,
    y: &EventuallyPeriodicPoint,
    r: &ReducedMatrix,
    barrier: &BarrierMatrix,
) -> Result<SequenceBarrierResult> {
    sequence_value(x, y, r, barrier.closed_form())
}
