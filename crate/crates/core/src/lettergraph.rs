//! Discretization of a potential onto a finite letter graph.
//!
//! The grid has nodes i / N for i = 0..=N; the complete directed graph on
//! those nodes carries edge weight w(i, j) = h(i/N, j/N). Orbits of the full
//! system correspond to walks here, and every downstream quantity (optimal
//! mean, subaction, barriers) is computed on this graph.

use crate::error::{Error, Result};
use crate::minplus::MinPlusMatrix;
use crate::potential::PotentialSpec;

/// Uniform grid on [0, 1] with `n_cells` cells, hence `n_cells + 1` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LetterGrid {
    n_cells: usize,
}

impl LetterGrid {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn node_count(&self) -> usize {
        self.n_cells + 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// Value of node i. Panics if i is out of range; indices come from the
    /// matrix layer which shares this grid.
    pub fn node(&self, i: usize) -> f64 {
        assert!(i <= self.n_cells, "node index {i} out of range");
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.node_count()).map(move |i| self.node(i))
    }

    /// Index of the grid node nearest to x; ties round up, inputs clamp to
    /// the unit interval.
    pub fn nearest_node(&self, x: f64) -> usize {
        let clamped = x.clamp(0.0, 1.0);
        let idx = (clamped * self.n_cells as f64).round() as usize;
        idx.min(self.n_cells)
    }
}

/// Edge weights w(i, j) = h(i/N, j/N) on the complete letter graph.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    grid: LetterGrid,
    matrix: MinPlusMatrix,
}

impl WeightMatrix {
    pub fn grid(&self) -> LetterGrid {
        self.grid
    }

    pub fn matrix(&self) -> &MinPlusMatrix {
        &self.matrix
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn min_entry(&self) -> f64 {
        self.matrix.min_entry()
    }

    pub fn min_diagonal(&self) -> f64 {
        self.matrix.min_diagonal()
    }
}

/// Evaluate the potential on every ordered node pair.
pub fn build_graph(spec: &PotentialSpec, grid: LetterGrid) -> Result<WeightMatrix> {
    let n = grid.node_count();
    let mut matrix = MinPlusMatrix::new(n, 0.0);
    for i in 0..n {
        let x = grid.node(i);
        for j in 0..n {
            let y = grid.node(j);
            matrix.set(i, j, spec.eval(x, y)?);
        }
    }
    Ok(WeightMatrix { grid, matrix })
}

/// Weights with the optimal mean subtracted: r = w - alpha. Optimal cycles
/// become zero-mean cycles and all cycle means stay nonnegative up to
/// discretization error.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMatrix {
    grid: LetterGrid,
    alpha: f64,
    matrix: MinPlusMatrix,
}

impl ReducedMatrix {
    pub fn grid(&self) -> LetterGrid {
        self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &MinPlusMatrix {
        &self.matrix
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

pub fn reduce(weights: &WeightMatrix, alpha: f64) -> ReducedMatrix {
    ReducedMatrix {
        grid: weights.grid,
        alpha,
        matrix: weights.matrix.map(|v| v - alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node_table(spec: &PotentialSpec) -> [[f64; 2]; 2] {
        let grid = LetterGrid::new(1).unwrap();
        let w = build_graph(spec, grid).unwrap();
        [
            [w.weight(0, 0), w.weight(0, 1)],
            [w.weight(1, 0), w.weight(1, 1)],
        ]
    }

    #[test]
    fn two_node_tables_of_builtins() {
        assert_eq!(
            two_node_table(&PotentialSpec::Projection),
            [[0.0, 0.0], [1.0, 1.0]]
        );
        assert_eq!(
            two_node_table(&PotentialSpec::Product),
            [[0.0, 0.0], [0.0, -1.0]]
        );
        assert_eq!(
            two_node_table(&PotentialSpec::SquaredDifference),
            [[0.0, 1.0], [1.0, 0.0]]
        );
        assert_eq!(
            two_node_table(&PotentialSpec::SquaredDifferencePlusWell),
            [[0.25, 1.25], [1.25, 0.25]]
        );
    }

    #[test]
    fn reduce_shifts_every_entry() {
        let grid = LetterGrid::new(1).unwrap();
        let w = build_graph(&PotentialSpec::Product, grid).unwrap();
        let r = reduce(&w, -1.0);
        assert_eq!(r.weight(0, 0), 1.0);
        assert_eq!(r.weight(0, 1), 1.0);
        assert_eq!(r.weight(1, 0), 1.0);
        assert_eq!(r.weight(1, 1), 0.0);
        assert_eq!(r.alpha(), -1.0);

        let grid = LetterGrid::new(16).unwrap();
        let w = build_graph(&PotentialSpec::SquaredDifferencePlusWell, grid).unwrap();
        let alpha = 0.0625;
        let r = reduce(&w, alpha);
        for i in 0..grid.node_count() {
            for j in 0..grid.node_count() {
                let expect = w.weight(i, j) - alpha;
                assert_eq!(r.weight(i, j).to_bits(), expect.to_bits());
            }
        }
    }

    #[test]
    fn grid_nodes_hit_exact_endpoints() {
        let grid = LetterGrid::new(128).unwrap();
        assert_eq!(grid.node(0), 0.0);
        assert_eq!(grid.node(128), 1.0);
        assert_eq!(grid.node(64), 0.5);
        assert_eq!(grid.node_count(), 129);
        assert_eq!(grid.spacing(), 1.0 / 128.0);
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(matches!(LetterGrid::new(0), Err(Error::EmptyGrid)));
    }

    #[test]
    fn nearest_node_round_trips_and_clamps() {
        for n in [1usize, 7, 64, 128] {
            let grid = LetterGrid::new(n).unwrap();
            for i in 0..grid.node_count() {
                assert_eq!(grid.nearest_node(grid.node(i)), i, "n={n} i={i}");
            }
        }
        let grid = LetterGrid::new(10).unwrap();
        assert_eq!(grid.nearest_node(-3.0), 0);
        assert_eq!(grid.nearest_node(2.5), 10);
        // half-cell accuracy everywhere
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let i = grid.nearest_node(x);
            assert!((grid.node(i) - x).abs() <= 0.05 + 1e-15);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Weight matrices inherit symmetry from symmetric potentials.
            #[test]
            fn squared_difference_graph_is_symmetric(n in 1usize..24) {
                let grid = LetterGrid::new(n).unwrap();
                let w = build_graph(&PotentialSpec::SquaredDifference, grid).unwrap();
                for i in 0..grid.node_count() {
                    for j in 0..grid.node_count() {
                        prop_assert_eq!(w.weight(i, j), w.weight(j, i));
                    }
                }
            }

            // Every edge weight is the potential at its node pair.
            #[test]
            fn weights_match_pointwise_eval(n in 1usize..24, i in 0usize..25, j in 0usize..25) {
                let grid = LetterGrid::new(n).unwrap();
                prop_assume!(i <= n && j <= n);
                let spec = PotentialSpec::SquaredDifferencePlusWell;
                let w = build_graph(&spec, grid).unwrap();
                let direct = spec.eval(grid.node(i), grid.node(j)).unwrap();
                prop_assert_eq!(w.weight(i, j), direct);
            }
        }
    }
}
