use std::collections::BTreeMap;

use super::RateRecord;
use crate::error::{Error, Result};
use crate::sampling::percentile;

/// Summary of the defined rates at one step across trials.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub d10: f64,
    pub d90: f64,
}

impl RateStats {
    /// `None` when no rate is defined.
    pub fn from_rates(rates: &[f64]) -> Option<Self> {
        if rates.is_empty() {
            return None;
        }
        let mut sorted = rates.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(RateStats {
            count: sorted.len(),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            median: percentile(&sorted, 50.0),
            q25: percentile(&sorted, 25.0),
            q75: percentile(&sorted, 75.0),
            d10: percentile(&sorted, 10.0),
            d90: percentile(&sorted, 90.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub k: usize,
    pub n_k: usize,
    pub samp: f64,
    pub msd: Option<RateStats>,
    pub grad: Option<RateStats>,
}

impl AggregateRow {
    pub fn msd_count(&self) -> usize {
        self.msd.as_ref().map_or(0, |s| s.count)
    }

    pub fn grad_count(&self) -> usize {
        self.grad.as_ref().map_or(0, |s| s.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialAggregate {
    pub rows: Vec<AggregateRow>,
}

/// Combines per-trial records step by step. Every trial must share the
/// same `(k, n_k)` schedule for the steps it reports.
pub fn aggregate(trials: &[Vec<RateRecord>]) -> Result<TrialAggregate> {
    struct Acc {
        n_k: usize,
        samp: f64,
        msd: Vec<f64>,
        grad: Vec<f64>,
    }
    let mut by_k: BTreeMap<usize, Acc> = BTreeMap::new();
    for trial in trials {
        for r in trial {
            let acc = by_k.entry(r.k).or_insert_with(|| Acc {
                n_k: r.n_k,
                samp: r.samp,
                msd: Vec::new(),
                grad: Vec::new(),
            });
            if acc.n_k != r.n_k {
                return Err(Error::ScheduleMismatch {
                    k: r.k,
                    expected: acc.n_k,
                    found: r.n_k,
                    source_name: None,
                });
            }
            acc.msd.extend(r.r_msd);
            acc.grad.extend(r.r_grad);
        }
    }
    let rows = by_k
        .into_iter()
        .map(|(k, acc)| AggregateRow {
            k,
            n_k: acc.n_k,
            samp: acc.samp,
            msd: RateStats::from_rates(&acc.msd),
            grad: RateStats::from_rates(&acc.grad),
        })
        .collect();
    Ok(TrialAggregate { rows })
}
