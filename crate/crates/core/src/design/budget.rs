use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample budget: `total` samples over `batches` batches of `per_batch` each,
/// with at most `max_unique` distinct targets per batch (`None` = unlimited).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub total: usize,
    pub batches: usize,
    pub per_batch: usize,
    pub max_unique: Option<usize>,
}

impl BudgetConfig {
    /// Splits `total` evenly over `batches`; `batches` must divide `total`.
    pub fn new(total: usize, batches: usize, max_unique: Option<usize>) -> Result<Self> {
        if batches == 0 {
            return Ok(BudgetConfig { total: 0, batches: 0, per_batch: 0, max_unique });
        }
        if total == 0 || !total.is_multiple_of(batches) {
            return Err(Error::InvalidBudget(format!("{batches} batches do not divide {total} samples")));
        }
        let b = BudgetConfig { total, batches, per_batch: total / batches, max_unique };
        b.validate()?;
        Ok(b)
    }

    pub fn per_batch(per_batch: usize, batches: usize, max_unique: Option<usize>) -> Result<Self> {
        let b = BudgetConfig { total: per_batch * batches, batches, per_batch, max_unique };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.batches > 0 && self.per_batch == 0 {
            return Err(Error::InvalidBudget("per-batch sample count must be positive".into()));
        }
        if self.per_batch * self.batches != self.total {
            return Err(Error::InvalidBudget(format!(
                "{} batches of {} do not make {} samples",
                self.batches, self.per_batch, self.total
            )));
        }
        if self.max_unique == Some(0) {
            return Err(Error::InvalidBudget("max_unique must be at least 1".into()));
        }
        Ok(())
    }
}

/// `n` samples over `k` slots: `⌊n/k⌋` each, the first `n mod k` slots get one more.
pub fn split_evenly(n: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_goes_to_the_earliest() {
        assert_eq!(split_evenly(5, 2), vec![3, 2]);
        assert_eq!(split_evenly(10, 3), vec![4, 3, 3]);
        assert_eq!(split_evenly(2, 3), vec![1, 1, 0]);
    }

    #[test]
    fn budget_checks() {
        assert_eq!(BudgetConfig::new(30, 3, None).unwrap().per_batch, 10);
        assert!(BudgetConfig::new(31, 3, None).is_err());
        assert!(BudgetConfig::new(30, 3, Some(0)).is_err());
        assert_eq!(BudgetConfig::new(30, 0, None).unwrap().per_batch, 0);
    }
}
