//! Iterative upsampling runs and the convergence rates they produce.

mod aggregate;
mod rates;
mod schedule;

pub use aggregate::{aggregate, AggregateRow, RateStats, TrialAggregate};
pub use rates::{grad_rate, msd_rate, RateEstimator, MIN_VALID_QUERIES, RATE_FLOOR};
pub use schedule::{avg_sample_spacing, next_sample_total, Schedule};

use rayon::prelude::*;

use crate::error::{Error, GeometryError, Result};
use crate::geometry::{walk_to_containing_simplex, GeometryTolerances, LocationStatus, PointSet};
use crate::gradient::simplex_gradient;
use crate::sampling::{
    sample_uniform, seeded_rng, shuffled_index, BoundingBox, QuerySet, StaticDataset,
};

/// Rates at one upsampling step `k ≥ 2`. Undefined rates are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRecord {
    pub k: usize,
    pub n_k: usize,
    pub samp: f64,
    pub r_msd: Option<f64>,
    pub r_grad: Option<f64>,
    /// Queries interpolated in all three snapshots `k-2`, `k-1`, `k`.
    pub valid_count: usize,
}

/// All records of one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub seed: u64,
    pub records: Vec<RateRecord>,
}

/// Interpolant values and gradients at every query for one sample total.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub values: Vec<Option<f64>>,
    pub gradients: Vec<Option<Vec<f64>>>,
}

impl Snapshot {
    /// Evaluates the interpolant of `ps` at each query in parallel. Queries
    /// outside the hull (or on a degenerate simplex) are left undefined; a
    /// walk that fails to terminate is an error.
    pub fn evaluate(ps: &PointSet, queries: &[Vec<f64>]) -> Result<Self> {
        let results: Vec<(Option<f64>, Option<Vec<f64>>)> = queries
            .par_iter()
            .map(|q| evaluate_query(ps, q))
            .collect::<std::result::Result<_, GeometryError>>()?;
        let (values, gradients) = results.into_iter().unzip();
        Ok(Snapshot {
            n: ps.len(),
            values,
            gradients,
        })
    }
}

fn evaluate_query(
    ps: &PointSet,
    q: &[f64],
) -> std::result::Result<(Option<f64>, Option<Vec<f64>>), GeometryError> {
    let walk = walk_to_containing_simplex(ps, q)?;
    match walk.status {
        LocationStatus::Interior => {
            let verts = walk.simplex.vertices();
            let value = verts
                .iter()
                .zip(&walk.weights)
                .map(|(&v, w)| w * ps.value(v))
                .sum();
            let points: Vec<&[f64]> = verts.iter().map(|&v| ps.point(v)).collect();
            let vals: Vec<f64> = verts.iter().map(|&v| ps.value(v)).collect();
            match simplex_gradient(&points, &vals) {
                Ok(g) => Ok((Some(value), Some(g))),
                Err(GeometryError::DegenerateSimplex(_)) => Ok((None, None)),
                Err(e) => Err(e),
            }
        }
        LocationStatus::Extrapolation => Ok((None, None)),
        LocationStatus::Degenerate => Err(GeometryError::WalkDidNotTerminate(walk.flips)),
    }
}

fn differences(a: &[Option<f64>], b: &[Option<f64>]) -> Vec<Option<f64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Some(y.as_ref()? - x.as_ref()?))
        .collect()
}

fn gradient_differences(a: &[Option<Vec<f64>>], b: &[Option<Vec<f64>>]) -> Vec<Option<Vec<f64>>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            Some(
                x.as_ref()?
                    .iter()
                    .zip(y.as_ref()?)
                    .map(|(u, v)| v - u)
                    .collect(),
            )
        })
        .collect()
}

/// Rates from three consecutive snapshots, with `k` the index of the last.
pub fn rate_record(
    estimator: &RateEstimator,
    k: usize,
    samp: f64,
    snaps: [&Snapshot; 3],
) -> RateRecord {
    let [s0, s1, s2] = snaps;
    let prev = differences(&s0.values, &s1.values);
    let cur = differences(&s1.values, &s2.values);
    let prev_g = gradient_differences(&s0.gradients, &s1.gradients);
    let cur_g = gradient_differences(&s1.gradients, &s2.gradients);

    let valid: Vec<usize> = (0..prev.len())
        .filter(|&i| prev[i].is_some() && cur[i].is_some())
        .collect();
    let value_scale = valid
        .iter()
        .flat_map(|&i| [s0.values[i], s1.values[i], s2.values[i]])
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let grad_scale = valid
        .iter()
        .flat_map(|&i| [&s0.gradients[i], &s1.gradients[i], &s2.gradients[i]])
        .flatten()
        .flat_map(|g| g.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    RateRecord {
        k,
        n_k: s2.n,
        samp,
        r_msd: estimator.msd(&prev, &cur, value_scale),
        r_grad: estimator.grad(&prev_g, &cur_g, grad_scale),
        valid_count: valid.len(),
    }
}

/// Runs the density diagnostic for a fixed schedule and query set.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    schedule: Schedule,
    tolerances: GeometryTolerances,
    min_valid: usize,
}

impl Diagnostic {
    pub fn new(schedule: Schedule) -> Result<Self> {
        schedule.validate()?;
        Ok(Diagnostic {
            schedule,
            tolerances: GeometryTolerances::default(),
            min_valid: MIN_VALID_QUERIES,
        })
    }

    pub fn with_tolerances(mut self, tolerances: GeometryTolerances) -> Result<Self> {
        tolerances.validate()?;
        self.tolerances = tolerances;
        Ok(self)
    }

    pub fn with_min_valid(mut self, min_valid: usize) -> Self {
        self.min_valid = min_valid;
        self
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Samples `f` uniformly in `bbox` (seeded by `seed`), upsampling
    /// according to the schedule.
    pub fn run_dynamic<F>(
        &self,
        f: F,
        bbox: &BoundingBox,
        queries: &QuerySet,
        seed: u64,
    ) -> Result<Vec<RateRecord>>
    where
        F: Fn(&[f64]) -> f64,
    {
        let d = bbox.dim();
        self.schedule.validate_for_dim(d)?;
        check_queries(queries, d)?;
        if let Some(index) = queries.first_outside(bbox) {
            return Err(Error::QueryOutsideBox { index });
        }
        let mut rng = seeded_rng(seed);
        let totals = self.schedule.totals(d);
        self.run(d, bbox.mean_side(), queries, &totals, |count| {
            let pts = sample_uniform(bbox, count, &mut rng);
            let vals = pts.iter().map(|p| f(p)).collect();
            (pts, vals)
        })
    }

    /// Draws samples from `ds` without replacement, in an order fixed by
    /// `seed`, until the schedule or the dataset is exhausted.
    pub fn run_static(
        &self,
        ds: &StaticDataset,
        queries: &QuerySet,
        seed: u64,
    ) -> Result<Vec<RateRecord>> {
        let d = ds.dim();
        if ds.len() < d + 1 {
            return Err(Error::EmptyAfterDedup {
                survivors: ds.len(),
                dim: d,
            });
        }
        self.schedule.validate_for_dim(d)?;
        check_queries(queries, d)?;
        if self.schedule.n0 > ds.len() {
            return Err(Error::InvalidSchedule(format!(
                "n0 = {} exceeds the {} available samples",
                self.schedule.n0,
                ds.len()
            )));
        }
        let order = shuffled_index(ds.len(), &mut seeded_rng(seed));
        let side = BoundingBox::enclosing(ds.inputs())?.mean_side();
        let totals = self.schedule.totals_capped(d, ds.len());
        let mut next = 0;
        self.run(d, side, queries, &totals, |count| {
            let picked = &order[next..next + count];
            next += count;
            let pts = picked.iter().map(|&i| ds.inputs()[i].clone()).collect();
            let vals = picked.iter().map(|&i| ds.values()[i]).collect();
            (pts, vals)
        })
    }

    fn run<D>(
        &self,
        d: usize,
        side: f64,
        queries: &QuerySet,
        totals: &[usize],
        mut draw: D,
    ) -> Result<Vec<RateRecord>>
    where
        D: FnMut(usize) -> (Vec<Vec<f64>>, Vec<f64>),
    {
        let estimator = RateEstimator::new(self.schedule.b).with_min_valid(self.min_valid);
        let mut coords: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut window: Vec<Snapshot> = Vec::with_capacity(3);
        let mut records = Vec::new();

        for (k, &n_k) in totals.iter().enumerate() {
            let (pts, vals) = draw(n_k - values.len());
            coords.extend(pts.into_iter().flatten());
            values.extend(vals);
            let ps = PointSet::with_tolerances(d, coords.clone(), values.clone(), self.tolerances)?;
            let snap = Snapshot::evaluate(&ps, queries.points())?;
            log::debug!("k={k} n={n_k}: snapshot done");

            if window.len() == 3 {
                window.remove(0);
            }
            window.push(snap);
            if window.len() == 3 {
                let rec = rate_record(
                    &estimator,
                    k,
                    avg_sample_spacing(n_k, side, d),
                    [&window[0], &window[1], &window[2]],
                );
                let excluded = queries.len() - rec.valid_count;
                if excluded * 10 > queries.len() {
                    log::warn!(
                        "k={k} n={n_k}: {excluded} of {} queries outside the sample hull",
                        queries.len()
                    );
                }
                records.push(rec);
            }
        }
        Ok(records)
    }
}

fn check_queries(queries: &QuerySet, d: usize) -> Result<()> {
    if queries.is_empty() {
        return Err(Error::InvalidArgument("query set is empty".into()));
    }
    match queries.points().iter().find(|q| q.len() != d) {
        Some(q) => Err(GeometryError::DimensionMismatch {
            expected: d,
            got: q.len(),
        }
        .into()),
        None => Ok(()),
    }
}
