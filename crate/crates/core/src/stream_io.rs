//! Edge-stream ingestion, node interning, time windowing, label joining and
//! synthetic stream generation.
//!
//! Edge files are headerless UTF-8 CSV with one edge per line:
//! `source,destination,timestamp` (`csv-uvt`, weight 1) or
//! `source,destination,weight,timestamp` (`csv-uvwt`). Label files hold one
//! `0`/`1` per line, aligned with the edge file by position.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::NodeId;

/// One stream element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub w: f64,
    pub t: i64,
}

impl EdgeRecord {
    pub fn new(u: NodeId, v: NodeId, t: i64) -> Self {
        Self { u, v, w: 1.0, t }
    }

    pub fn reversed(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
            ..*self
        }
    }
}

/// All edges whose tick falls in one window.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSnapshot {
    pub index: usize,
    /// First tick of the window (inclusive).
    pub start: i64,
    pub edges: Vec<EdgeRecord>,
    pub label: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// `source,destination,timestamp`
    CsvUvt,
    /// `source,destination,weight,timestamp`
    CsvUvwt,
}

impl InputFormat {
    fn fields(self) -> usize {
        match self {
            InputFormat::CsvUvt => 3,
            InputFormat::CsvUvwt => 4,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv-uvt" => Ok(InputFormat::CsvUvt),
            "csv-uvwt" => Ok(InputFormat::CsvUvwt),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::CsvUvt => "csv-uvt",
            InputFormat::CsvUvwt => "csv-uvwt",
        })
    }
}

/// Maps node names to dense ids in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interner {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as NodeId;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// One name per line, in id order.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for n in &self.names {
            writeln!(out, "{n}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> std::io::Result<Self> {
        let mut interner = Self::new();
        for line in input.lines() {
            let line = line?;
            let id = interner.names.len() as NodeId;
            interner.names.push(line.clone());
            interner.ids.entry(line).or_insert(id);
        }
        Ok(interner)
    }
}

/// Streaming reader over an edge file. Yields records in file order and
/// rejects timestamps that go backwards.
pub struct EdgeReader<R> {
    input: R,
    format: InputFormat,
    path: PathBuf,
    interner: Interner,
    line_no: usize,
    last_tick: Option<i64>,
    buf: String,
}

impl<R: BufRead> EdgeReader<R> {
    /// `path` is only used in error messages.
    pub fn new(input: R, format: InputFormat, path: impl Into<PathBuf>) -> Self {
        Self {
            input,
            format,
            path: path.into(),
            interner: Interner::new(),
            line_no: 0,
            last_tick: None,
            buf: String::new(),
        }
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub fn into_interner(self) -> Interner {
        self.interner
    }

    fn parse_error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line_no,
            message: message.into(),
        }
    }

    fn parse_line(&mut self, line: &str) -> Result<EdgeRecord> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != self.format.fields() {
            return Err(self.parse_error(format!(
                "expected {} fields for {}, found {}",
                self.format.fields(),
                self.format,
                fields.len()
            )));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(self.parse_error("empty node name"));
        }
        let w = match self.format {
            InputFormat::CsvUvt => 1.0,
            InputFormat::CsvUvwt => {
                let w: f64 = fields[2]
                    .parse()
                    .map_err(|_| self.parse_error(format!("bad weight `{}`", fields[2])))?;
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(
                        self.parse_error(format!("weight must be finite and >= 0, got {w}"))
                    );
                }
                w
            }
        };
        let ts = fields[fields.len() - 1];
        let t: i64 = ts
            .parse()
            .map_err(|_| self.parse_error(format!("bad timestamp `{ts}`")))?;
        if let Some(prev) = self.last_tick {
            if t < prev {
                return Err(Error::StreamOrderAt {
                    path: self.path.clone(),
                    line: self.line_no,
                    previous: prev,
                    got: t,
                });
            }
        }
        self.last_tick = Some(t);
        let u = self.interner.intern(fields[0]);
        let v = self.interner.intern(fields[1]);
        Ok(EdgeRecord { u, v, w, t })
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<EdgeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line_no += 1;
            let line = std::mem::take(&mut self.buf);
            let trimmed = line.trim();
            if trimmed.is_empty() {
                self.buf = line;
                continue;
            }
            let rec = self.parse_line(trimmed);
            self.buf = line;
            return Some(rec);
        }
    }
}

/// A fully materialized edge file.
#[derive(Clone, Debug, Default)]
pub struct EdgeStream {
    pub edges: Vec<EdgeRecord>,
    pub interner: Interner,
}

impl EdgeStream {
    pub fn distinct_ticks(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for e in &self.edges {
            if last != Some(e.t) {
                n += 1;
                last = Some(e.t);
            }
        }
        n
    }
}

pub fn parse_edge_stream(path: impl AsRef<Path>, format: InputFormat) -> Result<EdgeStream> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut reader = EdgeReader::new(BufReader::with_capacity(1 << 20, file), format, path);
    let mut edges = Vec::new();
    for rec in reader.by_ref() {
        edges.push(rec?);
    }
    Ok(EdgeStream {
        edges,
        interner: reader.into_interner(),
    })
}

pub fn parse_labels<R: BufRead>(input: R, path: impl Into<PathBuf>) -> Result<Vec<bool>> {
    let path = path.into();
    let mut labels = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match line.trim() {
            "" => continue,
            "0" => labels.push(false),
            "1" => labels.push(true),
            other => {
                return Err(Error::Parse {
                    path,
                    line: i + 1,
                    message: format!("expected 0 or 1, found `{other}`"),
                })
            }
        }
    }
    Ok(labels)
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    parse_labels(BufReader::new(File::open(path)?), path)
}

/// Splits a time-ordered stream into consecutive half-open windows of
/// `window_ticks`, anchored at the first edge's tick. Windows with no edges
/// are still emitted.
pub fn window_graphs(edges: &[EdgeRecord], window_ticks: u64) -> Result<Vec<GraphSnapshot>> {
    if window_ticks == 0 {
        return Err(Error::InvalidWindow);
    }
    let Some(first) = edges.first() else {
        return Ok(Vec::new());
    };
    let origin = first.t;
    let window_of = |t: i64| -> Result<usize> {
        if t < origin {
            return Err(Error::StreamOrder {
                previous: origin,
                got: t,
            });
        }
        Ok(((t as i128 - origin as i128) / window_ticks as i128) as usize)
    };
    let mut snapshots: Vec<GraphSnapshot> = Vec::new();
    let mut last_t = origin;
    for e in edges {
        if e.t < last_t {
            return Err(Error::StreamOrder {
                previous: last_t,
                got: e.t,
            });
        }
        last_t = e.t;
        let k = window_of(e.t)?;
        while snapshots.len() <= k {
            let index = snapshots.len();
            snapshots.push(GraphSnapshot {
                index,
                start: origin.saturating_add((index as i64).saturating_mul(window_ticks as i64)),
                edges: Vec::new(),
                label: None,
            });
        }
        snapshots[k].edges.push(*e);
    }
    Ok(snapshots)
}

/// Marks a snapshot anomalous when at least `edge_threshold` of its edges
/// carry a positive label. `edge_labels` must align with the concatenated
/// snapshot edges.
pub fn label_snapshots(
    mut snapshots: Vec<GraphSnapshot>,
    edge_labels: &[bool],
    edge_threshold: usize,
) -> Result<Vec<GraphSnapshot>> {
    let total: usize = snapshots.iter().map(|s| s.edges.len()).sum();
    if total != edge_labels.len() {
        return Err(Error::Alignment {
            items: total,
            labels: edge_labels.len(),
        });
    }
    let mut offset = 0;
    for s in &mut snapshots {
        let n = s.edges.len();
        let positives = edge_labels[offset..offset + n]
            .iter()
            .filter(|&&l| l)
            .count();
        s.label = Some(positives >= edge_threshold);
        offset += n;
    }
    Ok(snapshots)
}

/// A dense burst of edges among a fixed set of nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BurstSpec {
    /// Edges are drawn uniformly from `nodes x nodes`.
    pub nodes: Vec<NodeId>,
    pub start: i64,
    pub duration: u64,
    pub edges: usize,
}

/// Uniform background traffic over `0..nodes` plus injected bursts.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub nodes: u64,
    /// Background covers ticks `0..ticks`.
    pub ticks: u64,
    pub background_per_tick: usize,
    pub bursts: Vec<BurstSpec>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `burst_count` bursts of `burst_nodes` random nodes each, spread evenly
    /// over the background span.
    #[allow(clippy::too_many_arguments)]
    pub fn with_even_bursts(
        nodes: u64,
        ticks: u64,
        background_per_tick: usize,
        burst_count: usize,
        burst_nodes: usize,
        burst_edges: usize,
        burst_duration: u64,
        seed: u64,
    ) -> Result<Self> {
        if burst_nodes as u64 > nodes {
            return Err(Error::InvalidSynthSpec(format!(
                "burst of {burst_nodes} nodes does not fit in {nodes} nodes"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let bursts = (0..burst_count)
            .map(|i| BurstSpec {
                nodes: index::sample(&mut rng, nodes as usize, burst_nodes)
                    .into_iter()
                    .map(|x| x as NodeId)
                    .collect(),
                start: ((2 * i + 1) as u64 * ticks / (2 * burst_count as u64)) as i64,
                duration: burst_duration,
                edges: burst_edges,
            })
            .collect();
        Ok(Self {
            nodes,
            ticks,
            background_per_tick,
            bursts,
            seed,
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSynthSpec(m));
        if self.nodes == 0 {
            return bad("node count is zero".into());
        }
        let background = self.ticks as u128 * self.background_per_tick as u128;
        let burst_edges: usize = self.bursts.iter().map(|b| b.edges).sum();
        if background == 0 && burst_edges == 0 {
            return bad("spec produces no edges".into());
        }
        for b in &self.bursts {
            if b.nodes.is_empty() || b.duration == 0 {
                return bad("burst needs nodes and a positive duration".into());
            }
            if b.start < 0 {
                return bad("burst starts before tick 0".into());
            }
            if let Some(&n) = b.nodes.iter().find(|&&n| n >= self.nodes) {
                return bad(format!("burst node {n} outside 0..{}", self.nodes));
            }
        }
        Ok(())
    }
}

/// Generates a time-ordered stream and per-edge labels (`true` for burst
/// edges). The output depends only on `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Vec<EdgeRecord>, Vec<bool>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let end = spec
        .bursts
        .iter()
        .map(|b| b.start as u64 + b.duration)
        .chain([spec.ticks])
        .max()
        .unwrap_or(0);
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut tick_buf: Vec<(EdgeRecord, bool)> = Vec::new();
    for t in 0..end {
        tick_buf.clear();
        let tick = t as i64;
        if t < spec.ticks {
            for _ in 0..spec.background_per_tick {
                let u = rng.gen_range(0..spec.nodes);
                let v = rng.gen_range(0..spec.nodes);
                tick_buf.push((EdgeRecord::new(u, v, tick), false));
            }
        }
        for b in &spec.bursts {
            let start = b.start as u64;
            if t < start || t >= start + b.duration {
                continue;
            }
            let offset = t - start;
            let here = b.edges / b.duration as usize
                + usize::from((offset as usize) < b.edges % b.duration as usize);
            for _ in 0..here {
                let u = b.nodes[rng.gen_range(0..b.nodes.len())];
                let v = b.nodes[rng.gen_range(0..b.nodes.len())];
                tick_buf.push((EdgeRecord::new(u, v, tick), true));
            }
        }
        tick_buf.shuffle(&mut rng);
        for &(e, l) in &tick_buf {
            edges.push(e);
            labels.push(l);
        }
    }
    Ok((edges, labels))
}

/// Writes edges in `csv-uvt` form when every weight is 1, else `csv-uvwt`.
pub fn write_edges<W: Write>(edges: &[EdgeRecord], mut out: W) -> std::io::Result<InputFormat> {
    let unit = edges.iter().all(|e| e.w == 1.0);
    for e in edges {
        if unit {
            writeln!(out, "{},{},{}", e.u, e.v, e.t)?;
        } else {
            writeln!(out, "{},{},{},{}", e.u, e.v, e.w, e.t)?;
        }
    }
    Ok(if unit {
        InputFormat::CsvUvt
    } else {
        InputFormat::CsvUvwt
    })
}

pub fn write_labels<W: Write>(labels: &[bool], mut out: W) -> std::io::Result<()> {
    for &l in labels {
        writeln!(out, "{}", u8::from(l))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn read(text: &str, format: InputFormat) -> Result<(Vec<EdgeRecord>, Interner)> {
        let mut r = EdgeReader::new(Cursor::new(text.to_string()), format, "mem.csv");
        let edges = r.by_ref().collect::<Result<Vec<_>>>()?;
        Ok((edges, r.into_interner()))
    }

    #[test]
    fn parses_uvt_line() {
        let (edges, names) = read("7,42,1616161\n", InputFormat::CsvUvt).unwrap();
        assert_eq!(edges.len(), 1);
        let e = edges[0];
        assert_eq!(names.name(e.u), Some("7"));
        assert_eq!(names.name(e.v), Some("42"));
        assert_eq!(e.w, 1.0);
        assert_eq!(e.t, 1616161);
    }

    #[test]
    fn parses_uvwt_and_interns() {
        let (edges, names) = read("a,b,2.5,1\nb,a,0,1\n\na,c,1,3\n", InputFormat::CsvUvwt).unwrap();
        assert_eq!(edges.len(), 3);
        assert_eq!(names.len(), 3);
        assert_eq!(edges[0].u, edges[1].v);
        assert_eq!(edges[0].w, 2.5);
        assert_eq!(edges[1].w, 0.0);
    }

    #[test]
    fn empty_input_yields_nothing() {
        assert!(read("", InputFormat::CsvUvt).unwrap().0.is_empty());
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = read("1,2,3\n1,2\n", InputFormat::CsvUvt).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read("1,2,x\n", InputFormat::CsvUvt).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read("1,2,-1,5\n", InputFormat::CsvUvwt).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read("1,2,5\n1,3,4\n", InputFormat::CsvUvt).unwrap_err();
        assert!(matches!(
            err,
            Error::StreamOrderAt {
                line: 2,
                previous: 5,
                got: 4,
                ..
            }
        ));
    }

    #[test]
    fn format_ids() {
        assert_eq!(
            "csv-uvt".parse::<InputFormat>().unwrap(),
            InputFormat::CsvUvt
        );
        assert_eq!(
            "csv-uvwt".parse::<InputFormat>().unwrap(),
            InputFormat::CsvUvwt
        );
        assert!("tsv".parse::<InputFormat>().is_err());
    }

    #[test]
    fn labels_parse() {
        assert_eq!(
            parse_labels(Cursor::new("1\n0\n1"), "l").unwrap(),
            vec![true, false, true]
        );
        assert!(matches!(
            parse_labels(Cursor::new("1\n2\n"), "l"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn windows_examples() {
        let edges: Vec<EdgeRecord> = (0..4).map(|t| EdgeRecord::new(0, 1, t)).collect();
        let w = window_graphs(&edges, 2).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(
            w[0].edges.iter().map(|e| e.t).collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert_eq!(
            w[1].edges.iter().map(|e| e.t).collect::<Vec<_>>(),
            vec![2, 3]
        );
        let same: Vec<EdgeRecord> = (0..5).map(|_| EdgeRecord::new(0, 1, 9)).collect();
        assert_eq!(window_graphs(&same, 30).unwrap().len(), 1);
        assert!(window_graphs(&edges, 0).is_err());
        assert!(window_graphs(&[], 5).unwrap().is_empty());
    }

    #[test]
    fn empty_windows_are_emitted() {
        let edges = vec![EdgeRecord::new(0, 1, 100), EdgeRecord::new(0, 1, 131)];
        let w = window_graphs(&edges, 10).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(
            w.iter().map(|s| s.start).collect::<Vec<_>>(),
            vec![100, 110, 120, 130]
        );
        assert!(w[1].edges.is_empty() && w[2].edges.is_empty());
    }

    #[test]
    fn snapshot_label_threshold_boundary() {
        let snap = |n: usize| GraphSnapshot {
            index: 0,
            start: 0,
            edges: vec![EdgeRecord::new(0, 0, 0); n],
            label: None,
        };
        let labels49: Vec<bool> = (0..60).map(|i| i < 49).collect();
        let labels50: Vec<bool> = (0..60).map(|i| i < 50).collect();
        assert_eq!(
            label_snapshots(vec![snap(60)], &labels49, 50).unwrap()[0].label,
            Some(false)
        );
        assert_eq!(
            label_snapshots(vec![snap(60)], &labels50, 50).unwrap()[0].label,
            Some(true)
        );
        assert!(matches!(
            label_snapshots(vec![snap(60)], &labels50[..59], 50),
            Err(Error::Alignment {
                items: 60,
                labels: 59
            })
        ));
    }

    #[test]
    fn synthetic_examples() {
        let quiet = SyntheticSpec {
            nodes: 100,
            ticks: 50,
            background_per_tick: 10,
            bursts: vec![],
            seed: 1,
        };
        let (edges, labels) = generate_synthetic(&quiet).unwrap();
        assert_eq!(edges.len(), 500);
        assert!(labels.iter().all(|&l| !l));

        let spec = SyntheticSpec::with_even_bursts(100, 1000, 10, 1, 5, 500, 10, 42).unwrap();
        let (edges, labels) = generate_synthetic(&spec).unwrap();
        assert_eq!(edges.len(), 10_500);
        assert_eq!(labels.iter().filter(|&&l| l).count(), 500);
        let burst_nodes = &spec.bursts[0].nodes;
        assert_eq!(burst_nodes.len(), 5);
        for (e, &l) in edges.iter().zip(&labels) {
            if l {
                assert!(burst_nodes.contains(&e.u) && burst_nodes.contains(&e.v));
            }
        }
        assert!(edges.windows(2).all(|p| p[0].t <= p[1].t));

        let (again, again_labels) = generate_synthetic(&spec).unwrap();
        assert_eq!(again, edges);
        assert_eq!(again_labels, labels);
    }

    #[test]
    fn synthetic_rejects_empty_specs() {
        let empty = SyntheticSpec {
            nodes: 10,
            ticks: 0,
            background_per_tick: 5,
            bursts: vec![],
            seed: 0,
        };
        assert!(matches!(
            generate_synthetic(&empty),
            Err(Error::InvalidSynthSpec(_))
        ));
        let no_nodes = SyntheticSpec {
            nodes: 0,
            ticks: 5,
            ..empty.clone()
        };
        assert!(generate_synthetic(&no_nodes).is_err());
        let bad_burst = SyntheticSpec {
            ticks: 5,
            bursts: vec![BurstSpec {
                nodes: vec![11],
                start: 0,
                duration: 1,
                edges: 3,
            }],
            ..empty
        };
        assert!(generate_synthetic(&bad_burst).is_err());
    }

    #[test]
    fn write_then_parse_round_trips() {
        let spec = SyntheticSpec::with_even_bursts(30, 20, 4, 1, 3, 12, 2, 9).unwrap();
        let (edges, labels) = generate_synthetic(&spec).unwrap();
        let mut buf = Vec::new();
        let fmt = write_edges(&edges, &mut buf).unwrap();
        assert_eq!(fmt, InputFormat::CsvUvt);
        let (parsed, names) = read(std::str::from_utf8(&buf).unwrap(), fmt).unwrap();
        assert_eq!(parsed.len(), edges.len());
        for (p, e) in parsed.iter().zip(&edges) {
            assert_eq!(names.name(p.u).unwrap(), e.u.to_string());
            assert_eq!(names.name(p.v).unwrap(), e.v.to_string());
            assert_eq!(p.t, e.t);
        }
        let mut lbuf = Vec::new();
        write_labels(&labels, &mut lbuf).unwrap();
        assert_eq!(parse_labels(Cursor::new(lbuf), "l").unwrap(), labels);
    }

    proptest! {
        #[test]
        fn interner_is_bijective_and_round_trips(names in proptest::collection::vec("[a-z0-9.:]{1,8}", 0..60)) {
            let mut it = Interner::new();
            let ids: Vec<NodeId> = names.iter().map(|n| it.intern(n)).collect();
            for (a, ia) in names.iter().zip(&ids) {
                for (b, ib) in names.iter().zip(&ids) {
                    prop_assert_eq!(a == b, ia == ib);
                }
                prop_assert_eq!(it.name(*ia), Some(a.as_str()));
            }
            let mut buf = Vec::new();
            it.write_to(&mut buf).unwrap();
            let back = Interner::read_from(Cursor::new(buf)).unwrap();
            prop_assert_eq!(back, it);
        }

        #[test]
        fn windowing_partitions_the_stream(
            gaps in proptest::collection::vec(0i64..7, 1..200),
            window in 1u64..20,
            start in -50i64..50,
        ) {
            let mut t = start;
            let edges: Vec<EdgeRecord> = gaps.iter().enumerate().map(|(i, g)| {
                t += g;
                EdgeRecord::new(i as u64, 0, t)
            }).collect();
            let labels: Vec<bool> = edges.iter().map(|e| e.u % 3 == 0).collect();
            let snaps = window_graphs(&edges, window).unwrap();
            let flat: Vec<EdgeRecord> = snaps.iter().flat_map(|s| s.edges.iter().copied()).collect();
            prop_assert_eq!(&flat, &edges);
            for (k, s) in snaps.iter().enumerate() {
                prop_assert_eq!(s.index, k);
                for e in &s.edges {
                    prop_assert!(s.start <= e.t && e.t < s.start + window as i64);
                }
            }
            let labelled = label_snapshots(snaps.clone(), &labels, 1).unwrap();
            let mut offset = 0;
            let mut total = 0;
            for s in &labelled {
                let pos = labels[offset..offset + s.edges.len()].iter().filter(|&&l| l).count();
                prop_assert_eq!(s.label, Some(pos >= 1));
                total += pos;
                offset += s.edges.len();
            }
            prop_assert_eq!(total, labels.iter().filter(|&&l| l).count());
        }
    }
}
