use rand::Rng;
use rand_chacha::ChaCha8Rng;
use xyergo::{
    aubry_letters, build_graph, default_max_iters, default_tol_zero, default_window,
    karp_min_mean, mane_matrix, peierls_letter, reduce, reweight, solve_subaction,
    BarrierMatrix, BivariatePoly, EventuallyPeriodicPoint, LetterGrid, ManeMatrix,
    PotentialSpec, ReducedMatrix, ReweightedGraph, Subaction, SOLVER_TOL,
};

/// Everything downstream of the weight matrix, built once per test case.
pub struct Stack {
    pub grid: LetterGrid,
    pub alpha: f64,
    pub r: ReducedMatrix,
    pub sub: Subaction,
    pub rw: ReweightedGraph,
    pub mane: ManeMatrix,
}

pub fn stack(spec: &PotentialSpec, n_cells: usize) -> Stack {
    let grid = LetterGrid::new(n_cells).unwrap();
    let w = build_graph(spec, grid).unwrap();
    let alpha = karp_min_mean(w.matrix()).unwrap();
    let r = reduce(&w, alpha);
    let sub = solve_subaction(&r, SOLVER_TOL, default_max_iters(grid.node_count())).unwrap();
    let rw = reweight(&r, &sub).unwrap();
    let mane = mane_matrix(&rw).unwrap();
    Stack {
        grid,
        alpha,
        r,
        sub,
        rw,
        mane,
    }
}

pub fn barrier_for(s: &Stack) -> BarrierMatrix {
    let letters = aubry_letters(&s.mane, default_tol_zero(s.grid.n_cells())).unwrap();
    peierls_letter(&s.r, &s.mane, &letters, default_window(s.grid.node_count())).unwrap()
}

/// (x - y)^2 + (x - 1/4)^2 (x - 3/4)^2: twist, diagonal wells at 1/4 and 3/4.
pub fn double_well() -> PotentialSpec {
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

/// c2 (x - y)^2 + c3 y^2 + c1 x + c0 y with c2 > 0: mixed partial -2 c2 < 0.
pub fn random_twist_quadratic(rng: &mut ChaCha8Rng) -> PotentialSpec {
    let c2: f64 = rng.gen_range(0.2..2.0);
    let c1: f64 = rng.gen_range(-1.0..1.0);
    let c0: f64 = rng.gen_range(-1.0..1.0);
    let c3: f64 = rng.gen_range(-1.0..1.0);
    let coeffs = vec![0.0, c0, c2, c1, -2.0 * c2, 0.0, c2 + c3, 0.0, 0.0];
    PotentialSpec::Polynomial(BivariatePoly::new(2, coeffs).unwrap())
}

/// Cylinder relaxation of the sequence value: follow the first `forced`
/// letters of the source, score every visit to y0 at time >= 1, then walk
/// freely for up to n_bound steps. Never above the exact-suffix value.
pub fn sequence_oracle(
    x: &EventuallyPeriodicPoint,
    y0: usize,
    r: &ReducedMatrix,
    forced: usize,
    n_bound: usize,
) -> f64 {
    let n = r.matrix().dim();
    let mut prefix = vec![0.0];
    for t in 0..forced - 1 {
        let last = *prefix.last().unwrap();
        prefix.push(last + r.weight(x.letter(t), x.letter(t + 1)));
    }
    let mut best = f64::INFINITY;
    for (t, &p) in prefix.iter().enumerate() {
        if x.letter(t) == y0 && t >= 1 {
            best = best.min(p);
        }
    }
    let mut dp = vec![f64::INFINITY; n];
    dp[x.letter(forced - 1)] = 0.0;
    let base = prefix[forced - 1];
    for _ in 0..=(n_bound.saturating_sub(forced)) {
        let mut next = vec![f64::INFINITY; n];
        for a in 0..n {
            if !dp[a].is_finite() {
                continue;
            }
            for b in 0..n {
                let cand = dp[a] + r.weight(a, b);
                if cand < next[b] {
                    next[b] = cand;
                }
            }
        }
        dp = next;
        best = best.min(base + dp[y0]);
    }
    best
}
