//! Wielandt and Dulmage-Mendelsohn bounds on the weak CSR threshold.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// `Wi(n)`: 0 for `n = 1`, `(n-1)^2 + 1` otherwise.
pub fn wielandt_bound(n: usize) -> Result<usize> {
    match n {
        0 => Err(Error::Precondition("n must be at least 1".into())),
        1 => Ok(0),
        _ => Ok((n - 1) * (n - 1) + 1),
    }
}

/// `DM(g, n) = g(n-2) + n` for `1 <= g <= n`.
pub fn dm_bound(g: usize, n: usize) -> Result<usize> {
    if g == 0 || g > n {
        return Err(Error::Precondition(format!("girth {g} outside 1..={n}")));
    }
    // g(n-2) + n, written to stay in unsigned arithmetic for n = 1
    Ok(g * n + n - 2 * g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundPair {
    pub wi: usize,
    pub dm: usize,
    pub g: usize,
    pub n: usize,
}

impl BoundPair {
    pub fn new(g: usize, n: usize) -> Result<Self> {
        Ok(BoundPair { wi: wielandt_bound(n)?, dm: dm_bound(g, n)?, g, n })
    }

    pub fn min(&self) -> usize {
        self.wi.min(self.dm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundComparison {
    /// `DM(g, n)` compared to `Wi(n)`.
    pub dm_vs_wi: Ordering,
    /// Whether `T1 = Wi(n)` is possible at all, i.e. `g` is `n - 1` or `n`.
    pub wielandt_attainable: bool,
}

/// `DM(g, n) >= Wi(n)` exactly when `g >= n - 1`.
pub fn compare_bounds(g: usize, n: usize) -> Result<BoundComparison> {
    if n < 2 {
        return Err(Error::Precondition("bound comparison needs n >= 2".into()));
    }
    let pair = BoundPair::new(g, n)?;
    Ok(BoundComparison { dm_vs_wi: pair.dm.cmp(&pair.wi), wielandt_attainable: g + 1 >= n })
}
