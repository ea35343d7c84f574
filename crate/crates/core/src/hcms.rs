//! Higher-order count-min sketch.
//!
//! A plain count-min sketch hashes a key into one bucket per row. Here every
//! row owns an `n_b x n_b` matrix and two independent hash functions, one for
//! the source node and one for the destination node, so an edge `(u, v)` lands
//! in cell `(h_src(u), h_dst(v))`. Dense subgraphs of the stream show up as
//! dense submatrices, and the per-key estimate keeps the usual guarantee: the
//! minimum over rows never undercounts.
//!
//! Counts are `f64` because temporal decay multiplies them by a factor below
//! one. The sketch never grows after construction.

use std::io::{self, Write};
use std::mem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::NodeId;

/// 2^61 - 1.
const MERSENNE_61: u64 = (1 << 61) - 1;

/// Square, row-major matrix of non-negative counts.
#[derive(Clone, Debug, PartialEq)]
pub struct CountMatrix {
    n: usize,
    cells: Vec<f64>,
}

impl CountMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            cells: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from explicit rows. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), n, "matrix must be square");
            cells.extend_from_slice(row);
        }
        Self { n, cells }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.cells[row * self.n + col] = value;
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.cells[row * self.n + col] += value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.cells[row * self.n..(row + 1) * self.n]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.cells {
            *c *= factor;
        }
    }

    pub fn fill(&mut self, value: f64) {
        self.cells.fill(value);
    }

    /// Heap plus inline bytes held by this matrix.
    pub fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>() + self.cells.capacity() * mem::size_of::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum HashKind {
    /// `((a * x + b) mod p) mod n_b` with `p = 2^61 - 1`.
    Universal { a: u64, b: u64 },
    /// Explicit bucket per id, indexed by `x mod table.len()`.
    Table(Vec<u32>),
}

/// Maps a node id to a bucket in `[0, n_b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFunction {
    kind: HashKind,
    buckets: usize,
}

impl HashFunction {
    /// Draws a member of the universal family from `rng`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, buckets: usize) -> Self {
        let a = rng.gen_range(1..MERSENNE_61);
        let b = rng.gen_range(0..MERSENNE_61);
        Self {
            kind: HashKind::Universal { a, b },
            buckets,
        }
    }

    /// Hash given by an explicit lookup table. Every entry must be `< buckets`.
    pub fn from_table(table: Vec<u32>, buckets: usize) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidShape { rows: 0, buckets });
        }
        if let Some(&bad) = table.iter().find(|&&b| b as usize >= buckets) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                buckets,
            });
        }
        Ok(Self {
            kind: HashKind::Table(table),
            buckets,
        })
    }

    #[inline]
    pub fn buckets(&self) -> usize {
        self.buckets
    }

    #[inline]
    pub fn bucket(&self, x: NodeId) -> usize {
        match &self.kind {
            HashKind::Universal { a, b } => {
                let x = x % MERSENNE_61;
                let h = mod_mersenne(*a as u128 * x as u128 + *b as u128);
                (h % self.buckets as u64) as usize
            }
            HashKind::Table(table) => table[(x % table.len() as u64) as usize] as usize,
        }
    }

    fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>()
            + match &self.kind {
                HashKind::Universal { .. } => 0,
                HashKind::Table(t) => t.capacity() * mem::size_of::<u32>(),
            }
    }
}

#[inline]
fn mod_mersenne(x: u128) -> u64 {
    let p = MERSENNE_61 as u128;
    let folded = (x & p) + (x >> 61);
    let folded = (folded & p) + (folded >> 61);
    let r = folded as u64;
    if r >= MERSENNE_61 {
        r - MERSENNE_61
    } else {
        r
    }
}

/// Hash pair for one sketch row: sources index matrix rows, destinations
/// index matrix columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowHashes {
    pub source: HashFunction,
    pub destination: HashFunction,
}

#[derive(Clone, Debug)]
pub struct HCms {
    buckets: usize,
    matrices: Vec<CountMatrix>,
    hashes: Vec<RowHashes>,
    last_tick: Option<i64>,
}

impl HCms {
    /// Creates an all-zero sketch with `rows` hash rows of `buckets x buckets`
    /// matrices. Hash functions are derived deterministically from `seed`.
    pub fn new(rows: usize, buckets: usize, seed: u64) -> Result<Self> {
        check_shape(rows, buckets)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hashes = (0..rows)
            .map(|_| RowHashes {
                source: HashFunction::random(&mut rng, buckets),
                destination: HashFunction::random(&mut rng, buckets),
            })
            .collect();
        Ok(Self::assemble(buckets, hashes))
    }

    /// Creates an all-zero sketch around caller-supplied hash pairs.
    pub fn with_hashes(buckets: usize, hashes: Vec<RowHashes>) -> Result<Self> {
        check_shape(hashes.len(), buckets)?;
        for h in &hashes {
            for f in [&h.source, &h.destination] {
                if f.buckets() != buckets {
                    return Err(Error::InvalidShape {
                        rows: hashes.len(),
                        buckets: f.buckets(),
                    });
                }
            }
        }
        Ok(Self::assemble(buckets, hashes))
    }

    fn assemble(buckets: usize, hashes: Vec<RowHashes>) -> Self {
        Self {
            buckets,
            matrices: vec![CountMatrix::zeros(buckets); hashes.len()],
            hashes,
            last_tick: None,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.matrices.len()
    }

    #[inline]
    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn matrix(&self, row: usize) -> &CountMatrix {
        &self.matrices[row]
    }

    pub fn matrices(&self) -> &[CountMatrix] {
        &self.matrices
    }

    pub fn hashes(&self, row: usize) -> &RowHashes {
        &self.hashes[row]
    }

    /// Cell that `(u, v)` maps to in the given row.
    #[inline]
    pub fn cell(&self, row: usize, u: NodeId, v: NodeId) -> (usize, usize) {
        let h = &self.hashes[row];
        (h.source.bucket(u), h.destination.bucket(v))
    }

    pub fn last_tick(&self) -> Option<i64> {
        self.last_tick
    }

    /// Adds `w` to the cell of `(u, v)` in every row.
    pub fn update(&mut self, u: NodeId, v: NodeId, w: f64) -> Result<()> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeight(w));
        }
        for (m, h) in self.matrices.iter_mut().zip(&self.hashes) {
            m.add(h.source.bucket(u), h.destination.bucket(v), w);
        }
        Ok(())
    }

    /// Multiplies every count by `factor^elapsed` and advances the clock.
    pub fn decay(&mut self, factor: f64, elapsed: u64) -> Result<()> {
        let multiplier = decay_multiplier(factor, elapsed)?;
        if multiplier != 1.0 {
            for m in &mut self.matrices {
                m.scale(multiplier);
            }
        }
        if let Some(t) = self.last_tick.as_mut() {
            *t = t.saturating_add(elapsed.min(i64::MAX as u64) as i64);
        }
        Ok(())
    }

    /// Moves the sketch clock to `tick`, decaying once per elapsed tick.
    /// Returns the multiplier that was applied to every count.
    pub fn advance_to(&mut self, tick: i64, factor: f64) -> Result<f64> {
        match self.last_tick {
            None => {
                decay_multiplier(factor, 0)?;
                self.last_tick = Some(tick);
                Ok(1.0)
            }
            Some(prev) if tick < prev => Err(Error::StreamOrder {
                previous: prev,
                got: tick,
            }),
            Some(prev) => {
                let elapsed = (tick as i128 - prev as i128) as u64;
                let multiplier = decay_multiplier(factor, elapsed)?;
                if multiplier != 1.0 {
                    for m in &mut self.matrices {
                        m.scale(multiplier);
                    }
                }
                self.last_tick = Some(tick);
                Ok(multiplier)
            }
        }
    }

    /// Zeroes every count. Hash functions and clock are kept.
    pub fn reset(&mut self) {
        for m in &mut self.matrices {
            m.fill(0.0);
        }
    }

    /// Count-min estimate for `(u, v)`.
    pub fn estimate(&self, u: NodeId, v: NodeId) -> f64 {
        self.matrices
            .iter()
            .zip(&self.hashes)
            .map(|(m, h)| m.get(h.source.bucket(u), h.destination.bucket(v)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Structural size of the sketch in bytes: inline fields plus every
    /// owned buffer's capacity.
    pub fn footprint_bytes(&self) -> usize {
        mem::size_of::<Self>()
            + self.matrices.capacity() * mem::size_of::<CountMatrix>()
            + self
                .matrices
                .iter()
                .map(|m| m.footprint_bytes() - mem::size_of::<CountMatrix>())
                .sum::<usize>()
            + self.hashes.capacity() * mem::size_of::<RowHashes>()
            + self
                .hashes
                .iter()
                .map(|h| {
                    h.source.footprint_bytes() + h.destination.footprint_bytes()
                        - 2 * mem::size_of::<HashFunction>()
                })
                .sum::<usize>()
    }

    /// Writes every matrix as CSV, row-major, one block per hash row,
    /// blocks separated by a blank line.
    pub fn dump_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, m) in self.matrices.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            for r in 0..m.size() {
                let line = m
                    .row(r)
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }
}

fn check_shape(rows: usize, buckets: usize) -> Result<()> {
    if rows == 0 || buckets < 2 {
        return Err(Error::InvalidShape { rows, buckets });
    }
    Ok(())
}

/// `factor^elapsed`, validating the factor.
pub fn decay_multiplier(factor: f64, elapsed: u64) -> Result<f64> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::InvalidDecay(factor));
    }
    Ok(if elapsed == 0 || factor == 1.0 {
        1.0
    } else if elapsed <= i32::MAX as u64 {
        factor.powi(elapsed as i32)
    } else {
        factor.powf(elapsed as f64)
    })
}
