//! Edge scoring on a temporally decaying sketch.
//!
//! Both scorers decay the sketch once per elapsed tick, insert the edge and
//! only then score it, so an edge always sees its own contribution. With more
//! than one hash row each row is scored independently and the minimum is
//! reported, mirroring the count-min estimate.

use std::mem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hcms::{decay_multiplier, CountMatrix, HCms};
use crate::submatrix::{GreedyExpansion, Submatrix};
use crate::{min_score, EdgeRecord, EdgeScorer};

/// Offset mixed into the seed for the initial-block PRNG so it does not
/// replay the hash parameter stream.
const INIT_CELL_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn check_weight(w: f64) -> Result<()> {
    if w >= 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidWeight(w))
    }
}

/// Scores each edge by the density of a dense block grown greedily around
/// its cell.
#[derive(Clone, Debug)]
pub struct AnoEdgeG {
    sketch: HCms,
    decay: f64,
    scratch: GreedyExpansion,
}

impl AnoEdgeG {
    pub fn new(rows: usize, buckets: usize, decay: f64, seed: u64) -> Result<Self> {
        Self::from_sketch(HCms::new(rows, buckets, seed)?, decay)
    }

    pub fn from_sketch(sketch: HCms, decay: f64) -> Result<Self> {
        decay_multiplier(decay, 0)?;
        let scratch = GreedyExpansion::new(sketch.buckets());
        Ok(Self {
            sketch,
            decay,
            scratch,
        })
    }

    pub fn sketch(&self) -> &HCms {
        &self.sketch
    }
}

impl EdgeScorer for AnoEdgeG {
    fn score_edge(&mut self, e: &EdgeRecord) -> Result<f64> {
        check_weight(e.w)?;
        self.sketch.advance_to(e.t, self.decay)?;
        self.sketch.update(e.u, e.v, e.w)?;
        let sketch = &self.sketch;
        let scratch = &mut self.scratch;
        Ok(min_score((0..sketch.rows()).map(|r| {
            let (i, j) = sketch.cell(r, e.u, e.v);
            scratch.run(sketch.matrix(r), i, j)
        })))
    }

    fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>() - mem::size_of::<HCms>() - mem::size_of::<GreedyExpansion>()
            + self.sketch.footprint_bytes()
            + self.scratch.footprint_bytes()
    }
}

/// Adds row `u` and then column `v` to `sub`, each only if it strictly raises
/// the block density.
pub fn expand(m: &CountMatrix, sub: &mut Submatrix, u: usize, v: usize) {
    if !sub.rows().contains(u) {
        if let (Some(now), Some(next)) = (sub.density(), sub.density_with_row(u)) {
            if next > now {
                sub.add_row(m, u);
            }
        }
    }
    if !sub.cols().contains(v) {
        if let (Some(now), Some(next)) = (sub.density(), sub.density_with_col(v)) {
            if next > now {
                sub.add_col(m, v);
            }
        }
    }
}

/// Repeatedly drops the lightest row or column while that strictly raises
/// the density. The lighter of the two candidates is tried first (the column
/// on ties). The last row and last column are never dropped.
pub fn condense(m: &CountMatrix, sub: &mut Submatrix) {
    loop {
        let Some(now) = sub.density() else { return };
        let row = (sub.rows().len() > 1)
            .then(|| sub.min_member_row())
            .flatten();
        let col = (sub.cols().len() > 1)
            .then(|| sub.min_member_col())
            .flatten();
        let row_first = match (row, col) {
            (Some(r), Some(c)) => sub.row_sum(r) < sub.col_sum(c),
            _ => true,
        };
        let try_row = |sub: &mut Submatrix| match row {
            Some(r) if sub.density_without_row(r).is_some_and(|d| d > now) => {
                sub.remove_row(m, r);
                true
            }
            _ => false,
        };
        let try_col = |sub: &mut Submatrix| match col {
            Some(c) if sub.density_without_col(c).is_some_and(|d| d > now) => {
                sub.remove_col(m, c);
                true
            }
            _ => false,
        };
        let removed = (row_first && try_row(sub)) || try_col(sub) || (!row_first && try_row(sub));
        if !removed {
            return;
        }
    }
}

/// Keeps one dense block per hash row and scores each edge by its likelihood
/// against that block.
#[derive(Clone, Debug)]
pub struct AnoEdgeL {
    sketch: HCms,
    decay: f64,
    blocks: Vec<Submatrix>,
}

impl AnoEdgeL {
    /// Each row's block starts at a 1x1 cell drawn from a PRNG seeded by
    /// `seed`.
    pub fn new(rows: usize, buckets: usize, decay: f64, seed: u64) -> Result<Self> {
        let sketch = HCms::new(rows, buckets, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ INIT_CELL_SEED_SALT);
        let cells: Vec<(usize, usize)> = (0..rows)
            .map(|_| (rng.gen_range(0..buckets), rng.gen_range(0..buckets)))
            .collect();
        Self::with_initial_cells(sketch, decay, &cells)
    }

    /// Starts row `r`'s block at `cells[r]`.
    pub fn with_initial_cells(sketch: HCms, decay: f64, cells: &[(usize, usize)]) -> Result<Self> {
        decay_multiplier(decay, 0)?;
        let n = sketch.buckets();
        if cells.len() != sketch.rows() {
            return Err(Error::InvalidShape {
                rows: cells.len(),
                buckets: n,
            });
        }
        let mut blocks = Vec::with_capacity(cells.len());
        for (r, &(u, v)) in cells.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    buckets: n,
                });
            }
            blocks.push(Submatrix::seeded(sketch.matrix(r), u, v));
        }
        Ok(Self {
            sketch,
            decay,
            blocks,
        })
    }

    pub fn sketch(&self) -> &HCms {
        &self.sketch
    }

    /// The maintained block of hash row `r`.
    pub fn block(&self, r: usize) -> &Submatrix {
        &self.blocks[r]
    }
}

impl EdgeScorer for AnoEdgeL {
    fn score_edge(&mut self, e: &EdgeRecord) -> Result<f64> {
        check_weight(e.w)?;
        let multiplier = self.sketch.advance_to(e.t, self.decay)?;
        for b in &mut self.blocks {
            b.scale(multiplier);
        }
        self.sketch.update(e.u, e.v, e.w)?;
        let mut score = f64::INFINITY;
        for (r, block) in self.blocks.iter_mut().enumerate() {
            let (i, j) = self.sketch.cell(r, e.u, e.v);
            let m = self.sketch.matrix(r);
            block.record_cell_update(i, j, e.w);
            expand(m, block, i, j);
            condense(m, block);
            score = score.min(block.likelihood(m, i, j)?);
        }
        Ok(score)
    }

    fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>() - mem::size_of::<HCms>()
            + self.sketch.footprint_bytes()
            + self.blocks.capacity() * mem::size_of::<Submatrix>()
            + self
                .blocks
                .iter()
                .map(|b| b.footprint_bytes() - mem::size_of::<Submatrix>())
                .sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hcms::{HashFunction, RowHashes};

    fn edge(u: u64, v: u64, t: i64) -> EdgeRecord {
        EdgeRecord { u, v, w: 1.0, t }
    }

    fn rand_matrix(rng: &mut ChaCha8Rng, n: usize) -> CountMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.4) {
                            rng.gen_range(0.0..5.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        CountMatrix::from_rows(&rows)
    }

    #[test]
    fn first_edge_scores_its_weight() {
        let mut g = AnoEdgeG::new(1, 32, 0.9, 1).unwrap();
        assert_eq!(g.score_edge(&edge(3, 4, 0)).unwrap(), 1.0);
    }

    #[test]
    fn repeated_edge_scores_its_count() {
        let mut g = AnoEdgeG::new(1, 32, 0.9, 1).unwrap();
        let mut last = 0.0;
        for k in 1..=100 {
            last = g.score_edge(&edge(7, 8, 5)).unwrap();
            assert_eq!(last, k as f64);
        }
        assert_eq!(last, 100.0);
    }

    #[test]
    fn out_of_order_edges_rejected() {
        let mut g = AnoEdgeG::new(2, 8, 0.9, 1).unwrap();
        g.score_edge(&edge(1, 2, 10)).unwrap();
        assert!(matches!(
            g.score_edge(&edge(1, 2, 9)),
            Err(Error::StreamOrder { .. })
        ));
        let mut l = AnoEdgeL::new(2, 8, 0.9, 1).unwrap();
        l.score_edge(&edge(1, 2, 10)).unwrap();
        assert!(matches!(
            l.score_edge(&edge(1, 2, 9)),
            Err(Error::StreamOrder { .. })
        ));
    }

    #[test]
    fn bad_decay_rejected() {
        assert!(AnoEdgeG::new(2, 8, 0.0, 1).is_err());
        assert!(AnoEdgeL::new(2, 8, 1.1, 1).is_err());
    }

    #[test]
    fn decay_lowers_repeat_scores() {
        let mut g = AnoEdgeG::new(1, 16, 0.5, 1).unwrap();
        g.score_edge(&edge(1, 1, 0)).unwrap();
        g.score_edge(&edge(1, 1, 0)).unwrap();
        // 2 * 0.5 + 1
        assert_eq!(g.score_edge(&edge(1, 1, 1)).unwrap(), 2.0);
    }

    #[test]
    fn anoedge_l_first_edge_at_initial_cell() {
        let sketch = HCms::new(1, 16, 3).unwrap();
        let cell = sketch.cell(0, 10, 20);
        let mut l = AnoEdgeL::with_initial_cells(sketch, 0.9, &[cell]).unwrap();
        assert_eq!(l.score_edge(&edge(10, 20, 0)).unwrap(), 1.0);
    }

    #[test]
    fn anoedge_l_probe_far_from_block_scores_zero() {
        // identity-style hashing: node i -> bucket i
        let table: Vec<u32> = (0..8).collect();
        let h = RowHashes {
            source: HashFunction::from_table(table.clone(), 8).unwrap(),
            destination: HashFunction::from_table(table, 8).unwrap(),
        };
        let sketch = HCms::with_hashes(8, vec![h]).unwrap();
        let mut l = AnoEdgeL::with_initial_cells(sketch, 1.0, &[(0, 0)]).unwrap();
        for _ in 0..20 {
            for u in 0..3 {
                for v in 0..3 {
                    l.score_edge(&edge(u, v, 0)).unwrap();
                }
            }
        }
        assert_eq!(l.block(0).rows().to_vec(), vec![0, 1, 2]);
        assert_eq!(l.block(0).cols().to_vec(), vec![0, 1, 2]);
        // neither row 6 nor column 7 touches the block, so the cross is all zeros
        assert_eq!(l.score_edge(&edge(6, 7, 0)).unwrap(), 0.0);
        assert!(l.score_edge(&edge(1, 1, 0)).unwrap() > 10.0);
    }

    #[test]
    fn expand_adds_row_then_column() {
        let m = CountMatrix::from_rows(&[[5.0, 5.0], [5.0, 5.0]]);
        let mut sub = Submatrix::seeded(&m, 0, 0);
        expand(&m, &mut sub, 1, 1);
        assert_eq!(sub.rows().to_vec(), vec![0, 1]);
        assert_eq!(sub.cols().to_vec(), vec![0, 1]);
        assert_eq!(sub.density(), Some(10.0));
        let before = sub.clone();
        expand(&m, &mut sub, 0, 1);
        assert_eq!(sub.rows(), before.rows());
        assert_eq!(sub.cols(), before.cols());
    }

    #[test]
    fn condense_drops_empty_row() {
        let m = CountMatrix::from_rows(&[[9.0, 0.0], [0.0, 0.0]]);
        let mut sub = Submatrix::seeded(&m, 0, 0);
        sub.add_row(&m, 1);
        condense(&m, &mut sub);
        assert_eq!(sub.rows().to_vec(), vec![0]);
        assert_eq!(sub.cols().to_vec(), vec![0]);
        assert_eq!(sub.density(), Some(9.0));
    }

    #[test]
    fn condense_keeps_single_cell() {
        let m = CountMatrix::from_rows(&[[0.0, 3.0], [4.0, 0.0]]);
        let mut sub = Submatrix::seeded(&m, 0, 0);
        condense(&m, &mut sub);
        assert_eq!(sub.rows().to_vec(), vec![0]);
        assert_eq!(sub.cols().to_vec(), vec![0]);
    }

    #[test]
    fn expand_and_condense_never_lower_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let n = 6;
            let m = rand_matrix(&mut rng, n);
            let mut sub = Submatrix::seeded(&m, rng.gen_range(0..n), rng.gen_range(0..n));
            for _ in 0..rng.gen_range(0..6) {
                sub.add_row(&m, rng.gen_range(0..n));
                sub.add_col(&m, rng.gen_range(0..n));
            }
            let d0 = sub.density().unwrap();
            expand(&m, &mut sub, rng.gen_range(0..n), rng.gen_range(0..n));
            let d1 = sub.density().unwrap();
            assert!(d1 >= d0);
            condense(&m, &mut sub);
            let d2 = sub.density().unwrap();
            assert!(d2 >= d1);
            assert!(!sub.rows().is_empty() && !sub.cols().is_empty());
            let direct = crate::submatrix::density(&m, sub.rows(), sub.cols()).unwrap();
            assert!((direct - d2).abs() <= 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn maintained_blocks_stay_coherent_and_nonempty() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut l = AnoEdgeL::new(2, 8, 0.8, 4).unwrap();
        let mut t = 0;
        for _ in 0..20_000 {
            if rng.gen_bool(0.05) {
                t += rng.gen_range(1..3);
            }
            let s = l
                .score_edge(&EdgeRecord {
                    u: rng.gen_range(0..30),
                    v: rng.gen_range(0..30),
                    w: rng.gen_range(0.0..2.0),
                    t,
                })
                .unwrap();
            assert!(s.is_finite() && s >= 0.0);
        }
        for r in 0..2 {
            let b = l.block(r);
            assert!(!b.rows().is_empty() && !b.cols().is_empty());
            assert!(b.cache_error(l.sketch().matrix(r)) < 1e-6);
        }
    }

    #[test]
    fn anoedge_g_invariant_under_relabeling() {
        let n_nodes = 40u64;
        let buckets = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut perm: Vec<u64> = (0..n_nodes).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut inverse = vec![0u64; perm.len()];
        for (x, &px) in perm.iter().enumerate() {
            inverse[px as usize] = x as u64;
        }
        let tables: Vec<(Vec<u32>, Vec<u32>)> = (0..2)
            .map(|_| {
                let t = |rng: &mut ChaCha8Rng| -> Vec<u32> {
                    (0..n_nodes)
                        .map(|_| rng.gen_range(0..buckets as u32))
                        .collect()
                };
                (t(&mut rng), t(&mut rng))
            })
            .collect();
        let make = |relabel: bool| {
            let hashes = tables
                .iter()
                .map(|(src, dst)| {
                    let compose = |tab: &Vec<u32>| -> Vec<u32> {
                        if relabel {
                            (0..n_nodes)
                                .map(|y| tab[inverse[y as usize] as usize])
                                .collect()
                        } else {
                            tab.clone()
                        }
                    };
                    RowHashes {
                        source: HashFunction::from_table(compose(src), buckets).unwrap(),
                        destination: HashFunction::from_table(compose(dst), buckets).unwrap(),
                    }
                })
                .collect();
            AnoEdgeG::from_sketch(HCms::with_hashes(buckets, hashes).unwrap(), 1.0).unwrap()
        };
        let (mut plain, mut relabeled) = (make(false), make(true));
        for _ in 0..2000 {
            let (u, v) = (rng.gen_range(0..n_nodes), rng.gen_range(0..n_nodes));
            let a = plain.score_edge(&edge(u, v, 0)).unwrap();
            let b = relabeled
                .score_edge(&edge(perm[u as usize], perm[v as usize], 0))
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn scores_are_finite_and_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut g = AnoEdgeG::new(2, 16, 0.9, 3).unwrap();
        let mut t = 0;
        for _ in 0..5000 {
            t += rng.gen_range(0..2);
            let s = g
                .score_edge(&EdgeRecord {
                    u: rng.gen_range(0..100),
                    v: rng.gen_range(0..100),
                    w: rng.gen_range(0.0..3.0),
                    t,
                })
                .unwrap();
            assert!(s.is_finite() && s >= 0.0);
        }
    }
}
