//! Convergence rates between successive interpolant differences.

/// Minimum number of queries valid in both difference arrays.
pub const MIN_VALID_QUERIES: usize = 10;

/// Difference norms at or below `RATE_FLOOR · scale` make a rate undefined.
pub const RATE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimator {
    pub b: f64,
    pub min_valid: usize,
    pub floor: f64,
}

impl RateEstimator {
    pub fn new(b: f64) -> Self {
        RateEstimator {
            b,
            min_valid: MIN_VALID_QUERIES,
            floor: RATE_FLOOR,
        }
    }

    pub fn with_min_valid(mut self, min_valid: usize) -> Self {
        self.min_valid = min_valid;
        self
    }

    fn log_ratio(&self, prev: f64, cur: f64, count: usize, scale: f64) -> Option<f64> {
        let limit = self.floor * scale;
        if count < self.min_valid || count == 0 || prev <= limit || cur <= limit {
            return None;
        }
        Some((prev / cur).ln() / self.b.ln())
    }

    /// `log_b` of the ratio of root-mean-square differences, over queries
    /// where both arrays are defined. `scale` is the magnitude of the
    /// interpolated values.
    pub fn msd(&self, prev: &[Option<f64>], cur: &[Option<f64>], scale: f64) -> Option<f64> {
        let (mut sp, mut sc, mut count) = (0.0, 0.0, 0usize);
        for (p, c) in prev.iter().zip(cur) {
            if let (Some(p), Some(c)) = (p, c) {
                sp += p * p;
                sc += c * c;
                count += 1;
            }
        }
        let n = count as f64;
        self.log_ratio((sp / n).sqrt(), (sc / n).sqrt(), count, scale)
    }

    /// `log_b` of the ratio of Frobenius norms of the gradient differences
    /// over the common valid queries.
    pub fn grad(
        &self,
        prev: &[Option<Vec<f64>>],
        cur: &[Option<Vec<f64>>],
        scale: f64,
    ) -> Option<f64> {
        let (mut sp, mut sc, mut count) = (0.0, 0.0, 0usize);
        for (p, c) in prev.iter().zip(cur) {
            if let (Some(p), Some(c)) = (p, c) {
                sp += p.iter().map(|x| x * x).sum::<f64>();
                sc += c.iter().map(|x| x * x).sum::<f64>();
                count += 1;
            }
        }
        self.log_ratio(sp.sqrt(), sc.sqrt(), count, scale)
    }
}

pub fn msd_rate(prev: &[Option<f64>], cur: &[Option<f64>], b: f64, scale: f64) -> Option<f64> {
    RateEstimator::new(b).msd(prev, cur, scale)
}

pub fn grad_rate(
    prev: &[Option<Vec<f64>>],
    cur: &[Option<Vec<f64>>],
    b: f64,
    scale: f64,
) -> Option<f64> {
    RateEstimator::new(b).grad(prev, cur, scale)
}
