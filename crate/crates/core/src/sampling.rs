//! Sample generation, query lattices, and static-dataset ingestion.
//!
//! All randomness comes from [`SampleRng`], ChaCha with 8 rounds seeded via
//! `seed_from_u64`. Its output stream is fixed by the algorithm, so equal
//! seeds give identical samples on every platform.

use std::io::Read;

use kdtree::distance::squared_euclidean;
use kdtree::KdTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidBox(format!(
                "corner dimensions {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && u > l))
        {
            return Err(Error::InvalidBox(format!(
                "upper {upper:?} must exceed lower {lower:?}"
            )));
        }
        Ok(BoundingBox { lower, upper })
    }

    /// Cube of side `side` centred at `center`.
    pub fn cube(center: &[f64], side: f64) -> Result<Self> {
        let h = 0.5 * side;
        Self::new(
            center.iter().map(|c| c - h).collect(),
            center.iter().map(|c| c + h).collect(),
        )
    }

    /// Smallest box containing all `points`.
    pub fn enclosing(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for j in 0..dim {
                lower[j] = lower[j].min(p[j]);
                upper[j] = upper[j].max(p[j]);
            }
        }
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Mean side length, the `L` of the average sample spacing.
    pub fn mean_side(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .sum::<f64>()
            / self.dim() as f64
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| l <= x && x <= u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryProvenance {
    /// `points_per_dim` evenly spaced values over each closed interval.
    Lattice {
        points_per_dim: usize,
        intervals: Vec<(f64, f64)>,
    },
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    points: Vec<Vec<f64>>,
    provenance: QueryProvenance,
}

impl QuerySet {
    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(
                "query points must share a positive dimension".into(),
            ));
        }
        Ok(QuerySet {
            points,
            provenance: QueryProvenance::Explicit,
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(Vec::len).unwrap_or(0)
    }

    pub fn provenance(&self) -> &QueryProvenance {
        &self.provenance
    }

    /// Index of the first query outside `bbox`, if any.
    pub fn first_outside(&self, bbox: &BoundingBox) -> Option<usize> {
        self.points.iter().position(|q| !bbox.contains(q))
    }
}

/// `count` independent uniform draws from `bbox`.
pub fn sample_uniform(bbox: &BoundingBox, count: usize, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            bbox.lower
                .iter()
                .zip(&bbox.upper)
                .map(|(&l, &u)| (l + (u - l) * rng.random::<f64>()).min(u))
                .collect()
        })
        .collect()
}

fn lattice_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// `p^d` grid of side `side` centred at `center`, corners included. The
/// last coordinate varies fastest.
pub fn build_lattice(center: &[f64], side: f64, p: usize) -> Result<QuerySet> {
    if p == 0 || center.is_empty() || !(side >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lattice needs p >= 1 and side >= 0 (p={p}, side={side})"
        )));
    }
    let axes: Vec<Vec<f64>> = center
        .iter()
        .map(|&c| {
            if p == 1 {
                return vec![c];
            }
            let denom = 2.0 * (p - 1) as f64;
            (0..p)
                .map(|j| c + side * (2.0 * j as f64 - (p - 1) as f64) / denom)
                .collect()
        })
        .collect();
    let h = 0.5 * side;
    Ok(QuerySet {
        points: lattice_points(&axes),
        provenance: QueryProvenance::Lattice {
            points_per_dim: p,
            intervals: center.iter().map(|c| (c - h, c + h)).collect(),
        },
    })
}

/// Cube centred at `center` whose side is `query_extent / qpdf`.
pub fn box_from_qpdf(query_extent: f64, qpdf: f64, center: &[f64]) -> Result<BoundingBox> {
    if !(qpdf > 0.0 && qpdf <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "qpdf must lie in (0, 1], got {qpdf}"
        )));
    }
    BoundingBox::cube(center, query_extent / qpdf)
}

/// Fixed table of input/value pairs, free of near-duplicate inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticDataset {
    inputs: Vec<Vec<f64>>,
    values: Vec<f64>,
    delta: f64,
    columns: Vec<String>,
}

impl StaticDataset {
    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn with_columns(mut self, columns: Vec<String>) -> Self {
        self.columns = columns;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map(Vec::len).unwrap_or(0)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// One single-linkage pass; returns `None` when no two rows are within δ.
fn merge_once(rows: &[(Vec<f64>, f64)], delta: f64) -> Option<Vec<(Vec<f64>, f64)>> {
    let dim = rows[0].0.len();
    let mut tree = KdTree::with_capacity(dim, 16);
    for (i, (x, _)) in rows.iter().enumerate() {
        tree.add(x.as_slice(), i).ok()?;
    }
    let mut parent: Vec<usize> = (0..rows.len()).collect();
    let mut merged = false;
    for (i, (x, _)) in rows.iter().enumerate() {
        let near = tree.within(x, delta * delta, &squared_euclidean).ok()?;
        for (_, &j) in near {
            if j == i {
                continue;
            }
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
                merged = true;
            }
        }
    }
    if !merged {
        return None;
    }

    // Clusters are emitted in order of their smallest member index.
    let mut slot = vec![usize::MAX; rows.len()];
    let mut sums: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    for (i, (x, v)) in rows.iter().enumerate() {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = sums.len();
            sums.push((vec![0.0; dim], 0.0, 0));
        }
        let acc = &mut sums[slot[root]];
        acc.0.iter_mut().zip(x).for_each(|(s, xi)| *s += xi);
        acc.1 += v;
        acc.2 += 1;
    }
    Some(
        sums.into_iter()
            .map(|(s, v, c)| {
                let c = c as f64;
                (s.into_iter().map(|x| x / c).collect(), v / c)
            })
            .collect(),
    )
}

/// Replaces every single-linkage cluster of inputs at threshold `delta`
/// (pairs at distance ≤ δ are linked) with the mean input and mean value,
/// repeating until no two inputs are within δ.
pub fn dedup_cluster(rows: Vec<(Vec<f64>, f64)>, delta: f64) -> Result<StaticDataset> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dedup threshold must be >= 0, got {delta}"
        )));
    }
    let dim = rows.first().map(|r| r.0.len()).unwrap_or(0);
    if rows
        .iter()
        .any(|(x, v)| x.len() != dim || !v.is_finite() || x.iter().any(|c| !c.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "rows must share a dimension and be finite".into(),
        ));
    }
    let mut rows = rows;
    while rows.len() > 1 {
        match merge_once(&rows, delta) {
            Some(next) => rows = next,
            None => break,
        }
    }
    if dim == 0 || rows.len() < dim + 1 {
        return Err(Error::EmptyAfterDedup {
            survivors: rows.len(),
            dim,
        });
    }
    let (inputs, values) = rows.into_iter().unzip();
    Ok(StaticDataset {
        inputs,
        values,
        delta,
        columns: Vec::new(),
    })
}

/// Percentile of ascending `sorted` data with linear interpolation between
/// order statistics at fractional rank `(n - 1) · pct / 100`.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let rank = (sorted.len() - 1) as f64 * pct / 100.0;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

/// Lattice of `p` points per coordinate spanning each coordinate's
/// `[lo_pct, hi_pct]` percentile interval, endpoints included.
pub fn percentile_lattice(
    ds: &StaticDataset,
    p: usize,
    lo_pct: f64,
    hi_pct: f64,
) -> Result<QuerySet> {
    if ds.is_empty() || p == 0 {
        return Err(Error::InvalidArgument(
            "percentile lattice needs data and p >= 1".into(),
        ));
    }
    let mut intervals = Vec::with_capacity(ds.dim());
    for j in 0..ds.dim() {
        let mut col: Vec<f64> = ds.inputs.iter().map(|x| x[j]).collect();
        col.sort_by(f64::total_cmp);
        let (lo, hi) = (percentile(&col, lo_pct), percentile(&col, hi_pct));
        if !(hi > lo) {
            return Err(Error::DegenerateInterval(j));
        }
        intervals.push((lo, hi));
    }
    let axes: Vec<Vec<f64>> = intervals
        .iter()
        .map(|&(lo, hi)| {
            if p == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..p)
                    .map(|i| lo + (hi - lo) * i as f64 / (p - 1) as f64)
                    .collect()
            }
        })
        .collect();
    Ok(QuerySet {
        points: lattice_points(&axes),
        provenance: QueryProvenance::Lattice {
            points_per_dim: p,
            intervals,
        },
    })
}

/// Fisher-Yates permutation of `0..n` drawn from `rng`.
pub fn shuffled_index(n: usize, rng: &mut SampleRng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Reads `(inputs, value)` rows from a headed CSV, picking inputs and the
/// value by column name. Parse failures report the 1-based file line.
pub fn read_static_csv<R: Read>(
    reader: R,
    input_columns: &[String],
    value_column: &str,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let locate = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse {
                row: 1,
                message: format!("missing column `{name}`"),
            })
    };
    let input_idx = input_columns
        .iter()
        .map(|c| locate(c))
        .collect::<Result<Vec<_>>>()?;
    let value_idx = locate(value_column)?;
    if input_idx.is_empty() {
        return Err(Error::InvalidArgument("no input columns selected".into()));
    }

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("").trim();
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    row: line,
                    message: format!("cannot parse `{raw}` as a number"),
                })
        };
        let x = input_idx
            .iter()
            .map(|&i| field(i))
            .collect::<Result<Vec<_>>>()?;
        rows.push((x, field(value_idx)?));
    }
    Ok(rows)
}
