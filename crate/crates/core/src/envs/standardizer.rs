use crate::error::{Error, Result};

pub const STANDARDIZE_EPSILON: f64 = 1e-8;

/// Per-dimension running mean/variance (Welford) used to standardize
/// observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningStandardizer {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningStandardizer {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn from_parts(count: u64, mean: Vec<f64>, m2: Vec<f64>) -> Result<Self> {
        if mean.len() != m2.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                actual: m2.len(),
            });
        }
        Ok(Self { count, mean, m2 })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn m2(&self) -> &[f64] {
        &self.m2
    }

    /// Population variance `m2 / count`; zero before any sample.
    pub fn variance(&self) -> Vec<f64> {
        if self.count == 0 {
            return vec![0.0; self.dim()];
        }
        self.m2.iter().map(|m| m / self.count as f64).collect()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        self.check(x)?;
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &xi) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = xi - *mean;
            *mean += delta / n;
            *m2 += delta * (xi - *mean);
        }
        Ok(())
    }

    /// `(x - mean) / (sqrt(variance) + eps)`, or zeros while fewer than two
    /// samples have been seen.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, x: &mut [f64]) {
        if self.count < 2 {
            x.fill(0.0);
            return;
        }
        let n = self.count as f64;
        for ((xi, mean), m2) in x.iter_mut().zip(&self.mean).zip(&self.m2) {
            *xi = (*xi - mean) / ((m2 / n).sqrt() + STANDARDIZE_EPSILON);
        }
    }
}
