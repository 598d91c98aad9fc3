use crate::error::{Error, Result};

/// Sample total after one upsampling step: `round((b·n^(1/d) − (b − 1))^d)`
/// with halves rounded away from zero, and at least `n + 1`.
///
/// The map fixes `n = 1`, and for `n ≥ 10^4` the ratio to `n` is close to
/// `b^d`, so `n^(1/d)` (and the sample spacing) scales by about `b`.
pub fn next_sample_total(n: usize, b: f64, d: usize) -> usize {
    let root = (n as f64).powf(1.0 / d as f64);
    let total = (b * root - (b - 1.0)).powi(d as i32).round();
    (total as usize).max(n + 1)
}

/// `L / n^(1/d)`.
pub fn avg_sample_spacing(n: usize, side: f64, d: usize) -> f64 {
    side / (n as f64).powf(1.0 / d as f64)
}

/// Upsampling schedule: growth factor, initial sample count and stop rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub b: f64,
    pub n0: usize,
    /// Iterate while the sample total does not exceed this.
    pub max_samples: Option<usize>,
    /// Upper bound on the number of snapshots.
    pub max_iterations: Option<usize>,
}

impl Schedule {
    pub fn new(
        b: f64,
        n0: usize,
        max_samples: Option<usize>,
        max_iterations: Option<usize>,
    ) -> Result<Self> {
        let s = Schedule {
            b,
            n0,
            max_samples,
            max_iterations,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0 && self.b <= 2.0) {
            return Err(Error::InvalidSchedule(format!(
                "b must lie in (1, 2], got {}",
                self.b
            )));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidSchedule("n0 must be positive".into()));
        }
        match (self.max_samples, self.max_iterations) {
            (None, None) => Err(Error::InvalidSchedule("a stop rule is required".into())),
            (Some(m), _) if m < self.n0 => Err(Error::InvalidSchedule(format!(
                "max samples {m} is below n0 {}",
                self.n0
            ))),
            (_, Some(0)) => Err(Error::InvalidSchedule(
                "max iterations must be positive".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn validate_for_dim(&self, d: usize) -> Result<()> {
        self.validate()?;
        if self.n0 < d + 1 {
            return Err(Error::InvalidSchedule(format!(
                "n0 = {} is below d + 1 = {}",
                self.n0,
                d + 1
            )));
        }
        Ok(())
    }

    /// Sample totals `n_0, n_1, …` visited by a run in dimension `d`.
    pub fn totals(&self, d: usize) -> Vec<usize> {
        self.totals_capped(d, usize::MAX)
    }

    /// As [`Schedule::totals`], additionally stopping before any total that
    /// exceeds `available` samples.
    pub fn totals_capped(&self, d: usize, available: usize) -> Vec<usize> {
        let cap = self.max_samples.unwrap_or(usize::MAX).min(available);
        let max_iter = self.max_iterations.unwrap_or(usize::MAX);
        let mut out = Vec::new();
        let mut n = self.n0;
        while n <= cap && out.len() < max_iter {
            out.push(n);
            n = next_sample_total(n, self.b, d);
        }
        out
    }
}
