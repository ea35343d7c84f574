//! Submatrix density and likelihood over square count matrices.
//!
//! The density of a block `(S, T)` is its sum divided by `sqrt(|S| * |T|)`.
//! The likelihood of a cell `(u, v)` against a block is the mean value over
//! the cross-shaped cell set `S x {v}  ∪  {u} x T`, with `(u, v)` counted once
//! when it lies inside both arms.
//!
//! [`Submatrix`] keeps the block membership together with cached row sums
//! (every row, summed over the current columns), cached column sums (every
//! column, summed over the current rows) and the block total. Adding or
//! removing one index costs `O(n_b)`.

use std::mem;

use crate::error::{Error, Result};
use crate::hcms::CountMatrix;

/// Membership flags over `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    flags: Vec<bool>,
    len: usize,
}

impl IndexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            flags: vec![false; n],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            flags: vec![true; n],
            len: n,
        }
    }

    /// Panics if an index is `>= n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Set whose members are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::from_indices(n, (0..n).filter(|&i| mask >> i & 1 == 1))
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.flags.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.flags[i]
    }

    /// Returns true if `i` was not already present.
    pub fn insert(&mut self, i: usize) -> bool {
        let was = mem::replace(&mut self.flags[i], true);
        if !was {
            self.len += 1;
        }
        !was
    }

    /// Returns true if `i` was present.
    pub fn remove(&mut self, i: usize) -> bool {
        let was = mem::replace(&mut self.flags[i], false);
        if was {
            self.len -= 1;
        }
        was
    }

    pub fn clear(&mut self) {
        self.flags.fill(false);
        self.len = 0;
    }

    pub fn fill(&mut self) {
        self.flags.fill(true);
        self.len = self.flags.len();
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn footprint_bytes(&self) -> usize {
        self.flags.capacity()
    }
}

/// Sum of `m[s][t]` over `s in rows`, `t in cols`.
pub fn block_sum(m: &CountMatrix, rows: &IndexSet, cols: &IndexSet) -> f64 {
    rows.iter().map(|s| row_sum(m, s, cols)).sum()
}

/// Block density. Errors when either index set is empty.
pub fn density(m: &CountMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    Ok(block_sum(m, rows, cols) / ((rows.len() * cols.len()) as f64).sqrt())
}

/// Sum of row `u` restricted to `cols`.
pub fn row_sum(m: &CountMatrix, u: usize, cols: &IndexSet) -> f64 {
    m.row(u)
        .iter()
        .zip(&cols.flags)
        .filter_map(|(&x, &on)| on.then_some(x))
        .sum()
}

/// Sum of column `v` restricted to `rows`.
pub fn col_sum(m: &CountMatrix, rows: &IndexSet, v: usize) -> f64 {
    rows.iter().map(|s| m.get(s, v)).sum()
}

/// Mean value over `rows x {v}  ∪  {u} x cols`.
pub fn likelihood(
    m: &CountMatrix,
    u: usize,
    v: usize,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<f64> {
    let overlap = rows.contains(u) && cols.contains(v);
    let cells = rows.len() + cols.len() - usize::from(overlap);
    if cells == 0 {
        return Err(Error::EmptyCellSet);
    }
    let mut sum = col_sum(m, rows, v) + row_sum(m, u, cols);
    if overlap {
        sum -= m.get(u, v);
    }
    Ok(sum / cells as f64)
}

/// One greedy membership change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pick {
    Row(usize),
    Col(usize),
}

/// A row/column block of a fixed-size matrix with incrementally maintained
/// sums. The caller must pass the same backing matrix to every mutating call
/// and report any change to it through [`Submatrix::record_cell_update`] or
/// [`Submatrix::scale`].
#[derive(Clone, Debug)]
pub struct Submatrix {
    rows: IndexSet,
    cols: IndexSet,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    total: f64,
}

impl Submatrix {
    /// Empty block over an `n x n` matrix.
    pub fn new(n: usize) -> Self {
        Self {
            rows: IndexSet::empty(n),
            cols: IndexSet::empty(n),
            row_sums: vec![0.0; n],
            col_sums: vec![0.0; n],
            total: 0.0,
        }
    }

    /// Block `{u} x {v}` over `m`.
    pub fn seeded(m: &CountMatrix, u: usize, v: usize) -> Self {
        let mut s = Self::new(m.size());
        s.reseed(m, u, v);
        s
    }

    /// Resets to the block `{u} x {v}` without reallocating.
    pub fn reseed(&mut self, m: &CountMatrix, u: usize, v: usize) {
        let n = m.size();
        debug_assert_eq!(n, self.rows.universe());
        self.rows.clear();
        self.cols.clear();
        self.rows.insert(u);
        self.cols.insert(v);
        for s in 0..n {
            self.row_sums[s] = m.get(s, v);
        }
        self.col_sums.copy_from_slice(m.row(u));
        self.total = m.get(u, v);
    }

    /// Resets to the whole matrix without reallocating.
    pub fn fill(&mut self, m: &CountMatrix) {
        let n = m.size();
        debug_assert_eq!(n, self.rows.universe());
        self.rows.fill();
        self.cols.fill();
        self.col_sums.fill(0.0);
        let mut total = 0.0;
        for s in 0..n {
            let row = m.row(s);
            let mut acc = 0.0;
            for (c, &x) in self.col_sums.iter_mut().zip(row) {
                *c += x;
                acc += x;
            }
            self.row_sums[s] = acc;
            total += acc;
        }
        self.total = total;
    }

    #[inline]
    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }

    #[inline]
    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }

    /// Sum of row `u` over the current columns (defined for every row).
    #[inline]
    pub fn row_sum(&self, u: usize) -> f64 {
        self.row_sums[u]
    }

    /// Sum of column `v` over the current rows (defined for every column).
    #[inline]
    pub fn col_sum(&self, v: usize) -> f64 {
        self.col_sums[v]
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Current density, or `None` while a side is empty.
    #[inline]
    pub fn density(&self) -> Option<f64> {
        density_of(self.total, self.rows.len(), self.cols.len())
    }

    /// Density after adding row `u`. `u` must not be a member.
    #[inline]
    pub fn density_with_row(&self, u: usize) -> Option<f64> {
        density_of(
            self.total + self.row_sums[u],
            self.rows.len() + 1,
            self.cols.len(),
        )
    }

    #[inline]
    pub fn density_with_col(&self, v: usize) -> Option<f64> {
        density_of(
            self.total + self.col_sums[v],
            self.rows.len(),
            self.cols.len() + 1,
        )
    }

    /// Density after removing row `u`. `u` must be a member.
    #[inline]
    pub fn density_without_row(&self, u: usize) -> Option<f64> {
        density_of(
            self.total - self.row_sums[u],
            self.rows.len() - 1,
            self.cols.len(),
        )
    }

    #[inline]
    pub fn density_without_col(&self, v: usize) -> Option<f64> {
        density_of(
            self.total - self.col_sums[v],
            self.rows.len(),
            self.cols.len() - 1,
        )
    }

    pub fn add_row(&mut self, m: &CountMatrix, u: usize) {
        if !self.rows.insert(u) {
            return;
        }
        self.total += self.row_sums[u];
        for (c, &x) in self.col_sums.iter_mut().zip(m.row(u)) {
            *c += x;
        }
    }

    pub fn add_col(&mut self, m: &CountMatrix, v: usize) {
        if !self.cols.insert(v) {
            return;
        }
        self.total += self.col_sums[v];
        for (s, r) in self.row_sums.iter_mut().enumerate() {
            *r += m.get(s, v);
        }
    }

    pub fn remove_row(&mut self, m: &CountMatrix, u: usize) {
        if !self.rows.remove(u) {
            return;
        }
        self.total = clamp_zero(self.total - self.row_sums[u]);
        for (c, &x) in self.col_sums.iter_mut().zip(m.row(u)) {
            *c = clamp_zero(*c - x);
        }
    }

    pub fn remove_col(&mut self, m: &CountMatrix, v: usize) {
        if !self.cols.remove(v) {
            return;
        }
        self.total = clamp_zero(self.total - self.col_sums[v]);
        for (s, r) in self.row_sums.iter_mut().enumerate() {
            *r = clamp_zero(*r - m.get(s, v));
        }
    }

    /// Keeps the caches in step with `m[u][v] += w`.
    #[inline]
    pub fn record_cell_update(&mut self, u: usize, v: usize, w: f64) {
        let in_row = self.rows.contains(u);
        let in_col = self.cols.contains(v);
        if in_col {
            self.row_sums[u] += w;
        }
        if in_row {
            self.col_sums[v] += w;
        }
        if in_row && in_col {
            self.total += w;
        }
    }

    /// Keeps the caches in step with the whole matrix being scaled.
    pub fn scale(&mut self, factor: f64) {
        if factor == 1.0 {
            return;
        }
        for x in self.row_sums.iter_mut().chain(self.col_sums.iter_mut()) {
            *x *= factor;
        }
        self.total *= factor;
    }

    /// Member row with the smallest sum, lowest index on ties.
    pub fn min_member_row(&self) -> Option<usize> {
        argmin_inside(&self.row_sums, &self.rows)
    }

    /// Member column with the smallest sum, lowest index on ties.
    pub fn min_member_col(&self) -> Option<usize> {
        argmin_inside(&self.col_sums, &self.cols)
    }

    /// Likelihood of `(u, v)` against this block, from cached sums.
    pub fn likelihood(&self, m: &CountMatrix, u: usize, v: usize) -> Result<f64> {
        let overlap = self.rows.contains(u) && self.cols.contains(v);
        let cells = self.rows.len() + self.cols.len() - usize::from(overlap);
        if cells == 0 {
            return Err(Error::EmptyCellSet);
        }
        let mut sum = self.col_sums[v] + self.row_sums[u];
        if overlap {
            sum -= m.get(u, v);
        }
        Ok(clamp_zero(sum) / cells as f64)
    }

    /// Largest relative disagreement between the caches and a full
    /// recomputation from `m`.
    pub fn cache_error(&self, m: &CountMatrix) -> f64 {
        let rel = |cached: f64, exact: f64| {
            let scale = cached.abs().max(exact.abs());
            if scale == 0.0 {
                0.0
            } else {
                (cached - exact).abs() / scale
            }
        };
        let mut worst = rel(self.total, block_sum(m, &self.rows, &self.cols));
        for u in 0..m.size() {
            worst = worst.max(rel(self.row_sums[u], row_sum(m, u, &self.cols)));
            worst = worst.max(rel(self.col_sums[u], col_sum(m, &self.rows, u)));
        }
        worst
    }

    pub fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>()
            + self.rows.footprint_bytes()
            + self.cols.footprint_bytes()
            + (self.row_sums.capacity() + self.col_sums.capacity()) * mem::size_of::<f64>()
    }
}

#[inline]
fn density_of(total: f64, rows: usize, cols: usize) -> Option<f64> {
    (rows > 0 && cols > 0).then(|| total / ((rows * cols) as f64).sqrt())
}

/// Subtraction of non-negative sums can leave `-1e-17` style residue.
#[inline]
fn clamp_zero(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Index of the largest value among positions where `member` is false.
/// Lowest index wins ties.
#[inline]
fn argmax_outside(values: &[f64], members: &IndexSet) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut at = usize::MAX;
    for (i, (&x, &taken)) in values.iter().zip(&members.flags).enumerate() {
        if !taken && x > best {
            best = x;
            at = i;
        }
    }
    (at != usize::MAX).then_some(at)
}

/// Index of the smallest value among members. Lowest index wins ties.
#[inline]
fn argmin_inside(values: &[f64], members: &IndexSet) -> Option<usize> {
    let mut best = f64::INFINITY;
    let mut at = usize::MAX;
    for (i, (&x, &taken)) in values.iter().zip(&members.flags).enumerate() {
        if taken && (x < best || at == usize::MAX) {
            best = x;
            at = i;
        }
    }
    (at != usize::MAX).then_some(at)
}

/// Reusable scratch space for the seeded greedy expansion.
#[derive(Clone, Debug)]
pub struct GreedyExpansion {
    sub: Submatrix,
}

impl GreedyExpansion {
    pub fn new(n: usize) -> Self {
        Self {
            sub: Submatrix::new(n),
        }
    }

    /// Grows a block from `{u} x {v}` one index at a time, always taking the
    /// remaining row or column with the largest sum against the block (a row
    /// only when its sum is strictly larger), until every index is taken.
    /// Returns the best density seen along the way.
    pub fn run(&mut self, m: &CountMatrix, u: usize, v: usize) -> f64 {
        self.run_inner(m, u, v, |_| {})
    }

    /// Like [`GreedyExpansion::run`], also reporting every pick in order.
    pub fn run_traced(
        &mut self,
        m: &CountMatrix,
        u: usize,
        v: usize,
        picks: &mut Vec<Pick>,
    ) -> f64 {
        picks.clear();
        self.run_inner(m, u, v, |p| picks.push(p))
    }

    fn run_inner<F: FnMut(Pick)>(
        &mut self,
        m: &CountMatrix,
        u: usize,
        v: usize,
        mut on_pick: F,
    ) -> f64 {
        let sub = &mut self.sub;
        sub.reseed(m, u, v);
        let mut best = m.get(u, v);
        loop {
            let row = argmax_outside(&sub.row_sums, &sub.rows);
            let col = argmax_outside(&sub.col_sums, &sub.cols);
            let pick = match (row, col) {
                (Some(r), Some(c)) => {
                    if sub.row_sums[r] > sub.col_sums[c] {
                        Pick::Row(r)
                    } else {
                        Pick::Col(c)
                    }
                }
                (Some(r), None) => Pick::Row(r),
                (None, Some(c)) => Pick::Col(c),
                (None, None) => break,
            };
            match pick {
                Pick::Row(r) => sub.add_row(m, r),
                Pick::Col(c) => sub.add_col(m, c),
            }
            on_pick(pick);
            if let Some(d) = sub.density() {
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn footprint_bytes(&self) -> usize {
        self.sub.footprint_bytes()
    }
}

/// Density of the dense block found by greedy expansion around `(u, v)`.
pub fn edge_submatrix_density(m: &CountMatrix, u: usize, v: usize) -> f64 {
    GreedyExpansion::new(m.size()).run(m, u, v)
}
