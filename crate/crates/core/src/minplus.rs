//! Dense min-plus (tropical) matrix kernels.
//!
//! Entry (i, j) of a product is `min_k a(i,k) + b(k,j)`: matrix powers give
//! minimal k-edge path weights. `UNREACHABLE` (+inf) is the absorbing sentinel:
//! it survives no min and poisons every sum. Reductions scan k in ascending
//! order with a strict `<`, so results are bitwise identical regardless of
//! thread count.

use crate::error::{Error, Result};
use crate::numfmt::fmt_f64;
use rayon::prelude::*;
use std::io::Write;

/// Sentinel for "no path". Absorbing under `tropical_add`, loses every min.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Totalized addition: the sentinel absorbs, finite values add normally.
#[inline]
pub fn tropical_add(a: f64, b: f64) -> f64 {
    if a == UNREACHABLE || b == UNREACHABLE {
        UNREACHABLE
    } else {
        a + b
    }
}

/// Row-major dense square matrix over the min-plus semiring.
#[derive(Clone, Debug, PartialEq)]
pub struct MinPlusMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Parallelize row blocks only past this dimension; below it the rayon
/// dispatch costs more than the work.
const PAR_THRESHOLD: usize = 96;

/// Memory budget for materialized power traces (512 MiB of f64 payload).
pub const TRACE_BUDGET_BYTES: usize = 512 << 20;

impl MinPlusMatrix {
    pub fn new(dim: usize, fill: f64) -> Self {
        Self {
            dim,
            data: vec![fill; dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    /// Min-plus identity: 0 on the diagonal, unreachable elsewhere.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::new(dim, UNREACHABLE);
        for i in 0..dim {
            m.set(i, i, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Smallest entry (the sentinel loses unless the matrix is all-sentinel).
    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(UNREACHABLE, f64::min)
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(UNREACHABLE, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn elementwise_min(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let mut worst = 0.0f64;
        for (a, b) in self.data.iter().zip(&other.data) {
            if a == b {
                continue; // covers equal infinities
            }
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::SizeMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    fn multiply_row(&self, other: &Self, i: usize, out: &mut [f64]) {
        let n = self.dim;
        let a_row = self.row(i);
        for j in 0..n {
            let mut best = UNREACHABLE;
            // Ascending k with strict `<`: first achiever wins, deterministic.
            for k in 0..n {
                let cand = tropical_add(a_row[k], other.data[k * n + j]);
                if cand < best {
                    best = cand;
                }
            }
            out[j] = best;
        }
    }

    /// Min-plus product. Row blocks run in parallel; each row is a sequential
    /// ascending scan, so the output does not depend on the thread count.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut data = vec![UNREACHABLE; n * n];
        if n >= PAR_THRESHOLD {
            data.par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out)| self.multiply_row(other, i, out));
        } else {
            for (i, out) in data.chunks_mut(n).enumerate() {
                self.multiply_row(other, i, out);
            }
        }
        Ok(Self { dim: n, data })
    }

    /// Min over paths of exactly 1..=max_edges edges. (self min identity)^k is
    /// the min over paths with at most k edges; square-and-multiply keeps the
    /// exponent exact so near-zero cycles are never traversed more often than
    /// the bound allows. When every cycle has nonnegative weight and
    /// max_edges >= dim, this is the full >=1-edge shortest path closure.
    pub fn path_closure(&self, max_edges: usize) -> Result<Self> {
        assert!(max_edges >= 1);
        let relaxed = self.elementwise_min(&Self::identity(self.dim))?;
        let mut acc = MinPlusMatrix::identity(self.dim);
        let mut square = relaxed;
        let mut exp = max_edges - 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.multiply(&square)?;
            }
            exp >>= 1;
            if exp > 0 {
                square = square.multiply(&square)?;
            }
        }
        // One final factor of the raw matrix restores the >=1 edge constraint.
        self.multiply(&acc)
    }

    /// Successive powers self^1, self^2, ... as a lazy walk.
    pub fn powers(&self) -> Powers<'_> {
        Powers {
            base: self,
            current: None,
        }
    }

    /// Materialize self^1..=self^n_max. Fails when the trace would exceed the
    /// memory budget; callers that only fold over powers should use `powers()`.
    pub fn power_trace(&self, n_max: usize) -> Result<Vec<MinPlusMatrix>> {
        assert!(n_max >= 1);
        let bytes = n_max
            .saturating_mul(self.dim * self.dim)
            .saturating_mul(std::mem::size_of::<f64>());
        if bytes > TRACE_BUDGET_BYTES {
            return Err(Error::TraceBudget {
                count: n_max,
                dim: self.dim,
                bytes,
                budget: TRACE_BUDGET_BYTES,
            });
        }
        let mut out = Vec::with_capacity(n_max);
        for power in self.powers().take(n_max) {
            out.push(power?);
        }
        Ok(out)
    }

    /// CSV export: one row per line, full-precision decimal entries.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.dim {
            let line: Vec<String> = self.row(i).iter().map(|&v| fmt_f64(v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Iterator over successive min-plus powers of a base matrix.
pub struct Powers<'a> {
    base: &'a MinPlusMatrix,
    current: Option<MinPlusMatrix>,
}

impl Iterator for Powers<'_> {
    type Item = Result<MinPlusMatrix>;

    fn next(&mut self) -> Option<Self::Item> {
        let next = match &self.current {
            None => self.base.clone(),
            Some(cur) => match cur.multiply(self.base) {
                Ok(m) => m,
                Err(e) => return Some(Err(e)),
            },
        };
        self.current = Some(next.clone());
        Some(Ok(next))
    }
}
