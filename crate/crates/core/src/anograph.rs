//! Snapshot scoring. The sketch is cleared for every snapshot, filled with
//! the snapshot's edges and scored by the density of a dense block found in
//! each hash row's matrix (minimum over rows).

use std::mem;

use crate::error::{Error, Result};
use crate::hcms::{CountMatrix, HCms};
use crate::submatrix::{GreedyExpansion, Pick, Submatrix};
use crate::{min_score, GraphScorer, GraphSnapshot};

/// Reusable scratch space for greedy peeling.
#[derive(Clone, Debug)]
pub struct GreedyPeel {
    sub: Submatrix,
}

impl GreedyPeel {
    pub fn new(n: usize) -> Self {
        Self {
            sub: Submatrix::new(n),
        }
    }

    /// Starts from the full matrix and repeatedly removes the lightest row or
    /// column (the row only when strictly lighter), returning the best
    /// density seen. Within a factor two of the densest block.
    pub fn run(&mut self, m: &CountMatrix) -> f64 {
        self.run_inner(m, |_| {})
    }

    pub fn run_traced(&mut self, m: &CountMatrix, picks: &mut Vec<Pick>) -> f64 {
        picks.clear();
        self.run_inner(m, |p| picks.push(p))
    }

    fn run_inner<F: FnMut(Pick)>(&mut self, m: &CountMatrix, mut on_pick: F) -> f64 {
        let sub = &mut self.sub;
        sub.fill(m);
        let mut best = sub.density().unwrap_or(0.0);
        // Once either side is empty no further density is defined, so the
        // rest of the peel cannot change the answer.
        while let (Some(r), Some(c)) = (sub.min_member_row(), sub.min_member_col()) {
            let pick = if sub.row_sum(r) < sub.col_sum(c) {
                sub.remove_row(m, r);
                Pick::Row(r)
            } else {
                sub.remove_col(m, c);
                Pick::Col(c)
            };
            on_pick(pick);
            match sub.density() {
                Some(d) if d > best => best = d,
                Some(_) => {}
                None => break,
            }
        }
        best
    }

    pub fn footprint_bytes(&self) -> usize {
        self.sub.footprint_bytes()
    }
}

/// Greedy-peel density of `m`.
pub fn anograph_density(m: &CountMatrix) -> f64 {
    GreedyPeel::new(m.size()).run(m)
}

/// The `k` largest cells of `m`, largest first; equal values are ordered by
/// row, then column.
pub fn top_cells(m: &CountMatrix, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(k.min(m.cells().len()));
    let mut prev: Option<(f64, usize)> = None;
    for _ in 0..k {
        match next_cell_below(m, prev) {
            Some(p) => {
                out.push((p.1 / m.size(), p.1 % m.size()));
                prev = Some(p);
            }
            None => break,
        }
    }
    out
}

/// First cell, in (value desc, index asc) order, strictly after `prev`.
#[inline]
fn next_cell_below(m: &CountMatrix, prev: Option<(f64, usize)>) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (idx, &x) in m.cells().iter().enumerate() {
        if let Some((pv, pi)) = prev {
            if !(x < pv || (x == pv && idx > pi)) {
                continue;
            }
        }
        if best.is_none_or(|(bv, _)| x > bv) {
            best = Some((x, idx));
        }
    }
    best
}

/// Best greedy-expansion density over the `k` largest cells.
pub fn anograph_k_density(m: &CountMatrix, k: usize) -> Result<f64> {
    anograph_k_density_with(&mut GreedyExpansion::new(m.size()), m, k)
}

fn anograph_k_density_with(
    scratch: &mut GreedyExpansion,
    m: &CountMatrix,
    k: usize,
) -> Result<f64> {
    let max = m.cells().len();
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let n = m.size();
    let mut best = 0.0f64;
    let mut prev = None;
    for _ in 0..k {
        let Some(p) = next_cell_below(m, prev) else {
            break;
        };
        best = best.max(scratch.run(m, p.1 / n, p.1 % n));
        prev = Some(p);
    }
    Ok(best)
}

fn fill_sketch(sketch: &mut HCms, graph: &GraphSnapshot) -> Result<()> {
    sketch.reset();
    for e in &graph.edges {
        sketch.update(e.u, e.v, e.w)?;
    }
    Ok(())
}

/// Snapshot scorer based on greedy peeling.
#[derive(Clone, Debug)]
pub struct AnoGraph {
    sketch: HCms,
    peel: GreedyPeel,
}

impl AnoGraph {
    pub fn new(rows: usize, buckets: usize, seed: u64) -> Result<Self> {
        Ok(Self::from_sketch(HCms::new(rows, buckets, seed)?))
    }

    pub fn from_sketch(sketch: HCms) -> Self {
        let peel = GreedyPeel::new(sketch.buckets());
        Self { sketch, peel }
    }

    pub fn sketch(&self) -> &HCms {
        &self.sketch
    }
}

impl GraphScorer for AnoGraph {
    fn score_graph(&mut self, graph: &GraphSnapshot) -> Result<f64> {
        fill_sketch(&mut self.sketch, graph)?;
        let peel = &mut self.peel;
        Ok(min_score(
            self.sketch.matrices().iter().map(|m| peel.run(m)),
        ))
    }

    fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>() - mem::size_of::<HCms>() - mem::size_of::<GreedyPeel>()
            + self.sketch.footprint_bytes()
            + self.peel.footprint_bytes()
    }
}

/// Snapshot scorer that grows dense blocks around the `k` heaviest cells.
#[derive(Clone, Debug)]
pub struct AnoGraphK {
    sketch: HCms,
    k: usize,
    scratch: GreedyExpansion,
}

impl AnoGraphK {
    pub fn new(rows: usize, buckets: usize, k: usize, seed: u64) -> Result<Self> {
        Self::from_sketch(HCms::new(rows, buckets, seed)?, k)
    }

    pub fn from_sketch(sketch: HCms, k: usize) -> Result<Self> {
        let max = sketch.buckets() * sketch.buckets();
        if k == 0 || k > max {
            return Err(Error::KOutOfRange { k, max });
        }
        let scratch = GreedyExpansion::new(sketch.buckets());
        Ok(Self { sketch, k, scratch })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sketch(&self) -> &HCms {
        &self.sketch
    }
}

impl GraphScorer for AnoGraphK {
    fn score_graph(&mut self, graph: &GraphSnapshot) -> Result<f64> {
        fill_sketch(&mut self.sketch, graph)?;
        let mut score = f64::INFINITY;
        for m in self.sketch.matrices() {
            score = score.min(anograph_k_density_with(&mut self.scratch, m, self.k)?);
        }
        Ok(score)
    }

    fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>() - mem::size_of::<HCms>() - mem::size_of::<GreedyExpansion>()
            + self.sketch.footprint_bytes()
            + self.scratch.footprint_bytes()
    }
}
