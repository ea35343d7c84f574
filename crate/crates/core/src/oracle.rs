//! Slow reference implementations. Nothing in the scoring path uses these;
//! they exist so tests can check the sketch and the greedy searches against
//! exact answers.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hcms::{decay_multiplier, CountMatrix};
use crate::submatrix::IndexSet;
use crate::NodeId;

/// Largest matrix side the exhaustive searches accept.
pub const MAX_BRUTE_SIZE: usize = 16;

/// Exact per-edge decayed counts, with the same clock semantics as
/// [`crate::hcms::HCms`].
#[derive(Clone, Debug, Default)]
pub struct ExactCounter {
    counts: HashMap<(NodeId, NodeId), f64>,
    last_tick: Option<i64>,
}

impl ExactCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, u: NodeId, v: NodeId, w: f64) -> Result<()> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeight(w));
        }
        *self.counts.entry((u, v)).or_insert(0.0) += w;
        Ok(())
    }

    pub fn decay(&mut self, factor: f64, elapsed: u64) -> Result<()> {
        let m = decay_multiplier(factor, elapsed)?;
        if m != 1.0 {
            for c in self.counts.values_mut() {
                *c *= m;
            }
        }
        if let Some(t) = self.last_tick.as_mut() {
            *t = t.saturating_add(elapsed.min(i64::MAX as u64) as i64);
        }
        Ok(())
    }

    pub fn advance_to(&mut self, tick: i64, factor: f64) -> Result<()> {
        match self.last_tick {
            Some(prev) if tick < prev => Err(Error::StreamOrder {
                previous: prev,
                got: tick,
            }),
            Some(prev) => {
                self.decay(factor, (tick as i128 - prev as i128) as u64)?;
                self.last_tick = Some(tick);
                Ok(())
            }
            None => {
                decay_multiplier(factor, 0)?;
                self.last_tick = Some(tick);
                Ok(())
            }
        }
    }

    pub fn exact_count(&self, u: NodeId, v: NodeId) -> f64 {
        self.counts.get(&(u, v)).copied().unwrap_or(0.0)
    }

    pub fn keys(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.counts.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Optimal block found by exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub struct DensestBlock {
    pub density: f64,
    pub rows: IndexSet,
    pub cols: IndexSet,
}

/// Densest block over all non-empty row and column subsets. Among equal
/// densities the smallest row bitmask wins, then the smallest column bitmask.
pub fn brute_densest(m: &CountMatrix) -> Result<DensestBlock> {
    search(m, None)
}

/// Densest block whose rows contain `u` and whose columns contain `v`.
pub fn brute_seeded_densest(m: &CountMatrix, u: usize, v: usize) -> Result<f64> {
    if u >= m.size() || v >= m.size() {
        return Err(Error::IndexOutOfRange {
            index: u.max(v),
            buckets: m.size(),
        });
    }
    search(m, Some((u, v))).map(|b| b.density)
}

fn search(m: &CountMatrix, seed: Option<(usize, usize)>) -> Result<DensestBlock> {
    let n = m.size();
    if n > MAX_BRUTE_SIZE {
        return Err(Error::MatrixTooLarge {
            size: n,
            limit: MAX_BRUTE_SIZE,
        });
    }
    if n == 0 {
        return Err(Error::EmptyIndexSet);
    }
    let full = 1u64 << n;
    let (need_row, need_col) = match seed {
        Some((u, v)) => (1u64 << u, 1u64 << v),
        None => (0, 0),
    };
    let mut col_sums = vec![0.0; n];
    let mut subset_sums = vec![0.0; full as usize];
    let mut best: Option<(f64, u64, u64)> = None;
    for rmask in 1..full {
        if rmask & need_row != need_row {
            continue;
        }
        col_sums.fill(0.0);
        for s in (0..n).filter(|&s| rmask >> s & 1 == 1) {
            for (c, &x) in col_sums.iter_mut().zip(m.row(s)) {
                *c += x;
            }
        }
        let nrows = rmask.count_ones() as f64;
        for cmask in 1..full {
            let low = cmask.trailing_zeros() as usize;
            subset_sums[cmask as usize] =
                subset_sums[(cmask & (cmask - 1)) as usize] + col_sums[low];
            if cmask & need_col != need_col {
                continue;
            }
            let d = subset_sums[cmask as usize] / (nrows * cmask.count_ones() as f64).sqrt();
            if best.is_none_or(|(b, _, _)| d > b) {
                best = Some((d, rmask, cmask));
            }
        }
    }
    let (density, rmask, cmask) = best.expect("non-empty search space");
    Ok(DensestBlock {
        density,
        rows: IndexSet::from_mask(n, rmask),
        cols: IndexSet::from_mask(n, cmask),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submatrix::density;

    fn block3() -> CountMatrix {
        CountMatrix::from_rows(&[[9.0, 9.0, 0.0], [9.0, 9.0, 0.0], [0.0, 0.0, 1.0]])
    }

    #[test]
    fn exact_counter_examples() {
        let mut c = ExactCounter::new();
        assert_eq!(c.exact_count(1, 2), 0.0);
        c.update(1, 2, 3.0).unwrap();
        assert_eq!(c.exact_count(1, 2), 3.0);
        c.decay(0.9, 1).unwrap();
        assert!((c.exact_count(1, 2) - 2.7).abs() < 1e-12);
        assert_eq!(c.exact_count(2, 1), 0.0);
        assert!(c.update(1, 2, -1.0).is_err());
    }

    #[test]
    fn exact_counter_clock() {
        let mut c = ExactCounter::new();
        c.advance_to(5, 0.5).unwrap();
        c.update(0, 0, 4.0).unwrap();
        c.advance_to(7, 0.5).unwrap();
        assert_eq!(c.exact_count(0, 0), 1.0);
        assert!(c.advance_to(6, 0.5).is_err());
    }

    #[test]
    fn densest_block_example() {
        let b = brute_densest(&block3()).unwrap();
        assert_eq!(b.density, 18.0);
        assert_eq!(b.rows.to_vec(), vec![0, 1]);
        assert_eq!(b.cols.to_vec(), vec![0, 1]);
    }

    #[test]
    fn densest_block_ties_and_symmetry() {
        let b = brute_densest(&CountMatrix::zeros(2)).unwrap();
        assert_eq!(b.density, 0.0);
        assert_eq!(b.rows.to_vec(), vec![0]);
        assert_eq!(b.cols.to_vec(), vec![0]);
        for n in 1..=5 {
            let ones = CountMatrix::from_rows(&vec![vec![1.0; n]; n]);
            let b = brute_densest(&ones).unwrap();
            assert!((b.density - n as f64).abs() < 1e-12);
            assert_eq!(b.rows.len(), n);
            assert_eq!(b.cols.len(), n);
        }
    }

    #[test]
    fn densest_block_density_is_consistent() {
        let m = CountMatrix::from_rows(&[
            [0.3, 2.0, 0.1, 0.0],
            [1.7, 0.0, 2.2, 0.4],
            [0.0, 1.1, 0.0, 3.0],
            [0.9, 0.0, 0.0, 0.2],
        ]);
        let b = brute_densest(&m).unwrap();
        let direct = density(&m, &b.rows, &b.cols).unwrap();
        assert!((b.density - direct).abs() < 1e-12);
    }

    #[test]
    fn seeded_examples() {
        let d = brute_seeded_densest(&block3(), 2, 2).unwrap();
        assert!((d - 37.0 / 3.0).abs() < 1e-12);
        assert_eq!(brute_seeded_densest(&block3(), 0, 0).unwrap(), 18.0);
        let diag = CountMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 7.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(brute_seeded_densest(&diag, 1, 1).unwrap(), 7.0);
        assert_eq!(
            brute_seeded_densest(&CountMatrix::zeros(3), 1, 2).unwrap(),
            0.0
        );
    }

    #[test]
    fn size_limit_enforced() {
        assert!(matches!(
            brute_densest(&CountMatrix::zeros(17)),
            Err(Error::MatrixTooLarge { .. })
        ));
        assert!(brute_seeded_densest(&CountMatrix::zeros(3), 3, 0).is_err());
    }
}
