//! The discrete opinion grid `{-1, -1+δ, ..., 1-δ, 1}` and the media recommendation.
//!
//! Opinions are stored as integer indices `m ∈ [-M, M]` with `M = 1/δ`, so the
//! opinion value is `m / M`. All comparisons on the grid are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the opinion grid, stored as its integer index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridOpinion(pub i32);

impl GridOpinion {
    pub fn index(self) -> i32 {
        self.0
    }

    pub fn value(self, grid: &OpinionGrid) -> f64 {
        f64::from(self.0) / f64::from(grid.inv_delta())
    }
}

/// The media recommendation `s(x) ∈ {-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recommendation {
    Left,
    Neutral,
    Right,
}

impl Recommendation {
    pub fn sign(self) -> i32 {
        match self {
            Recommendation::Left => -1,
            Recommendation::Neutral => 0,
            Recommendation::Right => 1,
        }
    }
}

/// Grid resolution `δ = 1/M` and the extremism threshold `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpinionGrid {
    inv_delta: i32,
    lambda: f64,
    lambda_index: i32,
}

impl OpinionGrid {
    /// Builds a grid from `δ` and `λ`.
    ///
    /// `δ` must be `1/M` for an integer `M ≥ 2` and `λ` must lie in `(0, 1)`.
    pub fn new(delta: f64, lambda: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || delta > 0.5 {
            return Err(Error::InvalidGrid(format!(
                "delta must lie in (0, 1/2], got {delta}"
            )));
        }
        let m = (1.0 / delta).round();
        if (m * delta - 1.0).abs() > 1e-9 || m > f64::from(1 << 20) {
            return Err(Error::InvalidGrid(format!(
                "1/delta must be a (moderate) integer, got delta = {delta}"
            )));
        }
        Self::with_inv_delta(m as i32, lambda)
    }

    /// Builds a grid from `M = 1/δ` directly.
    pub fn with_inv_delta(inv_delta: i32, lambda: f64) -> Result<Self> {
        if inv_delta < 2 {
            return Err(Error::InvalidGrid(format!(
                "1/delta must be at least 2, got {inv_delta}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 {
            return Err(Error::InvalidGrid(format!(
                "lambda must lie in (0, 1), got {lambda}"
            )));
        }
        // Largest grid index whose value does not exceed lambda.
        let lambda_index = (lambda * f64::from(inv_delta) + 1e-9).floor() as i32;
        Ok(OpinionGrid {
            inv_delta,
            lambda,
            lambda_index,
        })
    }

    /// `M = 1/δ`.
    pub fn inv_delta(&self) -> i32 {
        self.inv_delta
    }

    pub fn delta(&self) -> f64 {
        1.0 / f64::from(self.inv_delta)
    }

    /// The threshold as configured.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Index of the effective threshold `λ'`, the largest grid value `≤ λ`.
    pub fn lambda_index(&self) -> i32 {
        self.lambda_index
    }

    pub fn effective_lambda(&self) -> f64 {
        f64::from(self.lambda_index) / f64::from(self.inv_delta)
    }

    /// Number of grid points, `2M + 1`.
    pub fn len(&self) -> usize {
        2 * self.inv_delta as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> GridOpinion {
        GridOpinion(-self.inv_delta)
    }

    pub fn max(&self) -> GridOpinion {
        GridOpinion(self.inv_delta)
    }

    pub fn contains(&self, x: GridOpinion) -> bool {
        x.0.abs() <= self.inv_delta
    }

    /// All grid points in increasing order.
    pub fn points(&self) -> impl Iterator<Item = GridOpinion> {
        (-self.inv_delta..=self.inv_delta).map(GridOpinion)
    }

    /// The grid point whose value is exactly `value`, up to floating noise.
    pub fn opinion(&self, value: f64) -> Result<GridOpinion> {
        let t = value * f64::from(self.inv_delta);
        let r = t.round();
        if !value.is_finite() || (t - r).abs() > 1e-6 || r.abs() > f64::from(self.inv_delta) {
            return Err(Error::InvalidProfile(format!(
                "{value} is not a point of the grid with delta = 1/{}",
                self.inv_delta
            )));
        }
        Ok(GridOpinion(r as i32))
    }

    /// Nearest grid point to an arbitrary real, clamped to `[-1, 1]`.
    /// An exact midpoint goes to the point with smaller absolute value.
    pub fn round(&self, value: f64) -> GridOpinion {
        let t = (value * f64::from(self.inv_delta))
            .clamp(-f64::from(self.inv_delta), f64::from(self.inv_delta));
        let lo = t.floor();
        let frac = t - lo;
        let idx = if (frac - 0.5).abs() <= 1e-12 {
            if lo.abs() <= (lo + 1.0).abs() {
                lo
            } else {
                lo + 1.0
            }
        } else if frac < 0.5 {
            lo
        } else {
            lo + 1.0
        };
        GridOpinion(idx as i32)
    }

    /// `s(x)`: `-1` below `-λ'`, `+1` above `λ'`, otherwise `0`.
    pub fn recommend(&self, x: GridOpinion) -> Recommendation {
        if x.0 < -self.lambda_index {
            Recommendation::Left
        } else if x.0 > self.lambda_index {
            Recommendation::Right
        } else {
            Recommendation::Neutral
        }
    }

    /// Whether `|x| > λ'`.
    pub fn is_extreme(&self, x: GridOpinion) -> bool {
        x.0.abs() > self.lambda_index
    }
}

impl fmt::Display for OpinionGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "delta = 1/{}, lambda' = {}/{}",
            self.inv_delta, self.lambda_index, self.inv_delta
        )
    }
}

/// Tie-break among equally good grid points: keep `current` if it is one of
/// them, otherwise take the smallest `|y|`, then the smallest `y`.
pub fn break_tie(tied: &[GridOpinion], current: GridOpinion) -> GridOpinion {
    if tied.contains(&current) {
        return current;
    }
    *tied
        .iter()
        .min_by_key(|y| (y.0.abs(), y.0))
        .expect("tie set is never empty")
}

/// Rounds the rational `num / den` (in index units) to the nearest grid
/// index, resolving an exact midpoint with [`break_tie`]. `den` must be
/// positive.
pub fn round_ratio(num: i128, den: i128, current: GridOpinion, inv_delta: i32) -> GridOpinion {
    debug_assert!(den > 0);
    let lo = num.div_euclid(den);
    let rem = num.rem_euclid(den);
    let m = i128::from(inv_delta);
    match (2 * rem).cmp(&den) {
        std::cmp::Ordering::Less => GridOpinion(lo.clamp(-m, m) as i32),
        std::cmp::Ordering::Greater => GridOpinion((lo + 1).clamp(-m, m) as i32),
        std::cmp::Ordering::Equal => {
            let a = GridOpinion(lo.clamp(-m, m) as i32);
            let b = GridOpinion((lo + 1).clamp(-m, m) as i32);
            break_tie(&[a, b], current)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_delta() {
        assert!(OpinionGrid::new(0.3, 0.5).is_err());
        assert!(OpinionGrid::new(1.0, 0.5).is_err());
        assert!(OpinionGrid::new(0.0, 0.5).is_err());
        assert!(OpinionGrid::new(0.25, 1.0).is_err());
        assert!(OpinionGrid::new(0.25, 0.5).is_ok());
    }

    #[test]
    fn effective_lambda_is_largest_grid_value_below() {
        let g = OpinionGrid::new(0.25, 0.6).unwrap();
        assert_eq!(g.lambda_index(), 2);
        let g = OpinionGrid::new(0.125, 0.5).unwrap();
        assert_eq!(g.lambda_index(), 4);
        let g = OpinionGrid::new(0.5, 0.3).unwrap();
        assert_eq!(g.lambda_index(), 0);
    }

    #[test]
    fn recommendation_boundaries() {
        let g = OpinionGrid::new(0.25, 0.5).unwrap();
        assert_eq!(g.recommend(GridOpinion(-3)), Recommendation::Left);
        assert_eq!(g.recommend(GridOpinion(-2)), Recommendation::Neutral);
        assert_eq!(g.recommend(GridOpinion(2)), Recommendation::Neutral);
        assert_eq!(g.recommend(GridOpinion(3)), Recommendation::Right);
    }

    #[test]
    fn rounding_prefers_smaller_magnitude_on_ties() {
        let g = OpinionGrid::new(0.5, 0.5).unwrap();
        assert_eq!(g.round(0.25), GridOpinion(0));
        assert_eq!(g.round(-0.25), GridOpinion(0));
        assert_eq!(g.round(0.75), GridOpinion(1));
        assert_eq!(g.round(0.8), GridOpinion(2));
        assert_eq!(g.round(7.0), GridOpinion(2));
    }

    #[test]
    fn round_ratio_midpoints() {
        // 1/2 between 0 and 1: current wins, else smaller magnitude.
        assert_eq!(round_ratio(1, 2, GridOpinion(1), 4), GridOpinion(1));
        assert_eq!(round_ratio(1, 2, GridOpinion(-3), 4), GridOpinion(0));
        assert_eq!(round_ratio(-3, 2, GridOpinion(4), 4), GridOpinion(-1));
        assert_eq!(round_ratio(-7, 3, GridOpinion(0), 4), GridOpinion(-2));
        assert_eq!(round_ratio(9, 1, GridOpinion(0), 4), GridOpinion(4));
    }

    #[test]
    fn opinion_accepts_only_grid_points() {
        let g = OpinionGrid::new(0.25, 0.5).unwrap();
        assert_eq!(g.opinion(-0.75).unwrap(), GridOpinion(-3));
        assert!(g.opinion(0.3).is_err());
        assert!(g.opinion(1.25).is_err());
    }
}
