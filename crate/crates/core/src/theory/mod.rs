//! Closed-form results for the symmetric two-block model and the
//! convergence step bound, evaluated in exact rational arithmetic.

mod classify;
mod twoblock;

pub use classify::{
    classify, AppliedCase, BTildeInterval, CaseRow, ConsensusRegime, InitialPattern, RegimeKind,
};
pub use twoblock::{
    block_target, slacks_hold, stability_slacks, twoblock_stable, twoblock_sync_run,
    TwoBlockParams, TwoBlockRun,
};

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::{GridOpinion, OpinionGrid};

/// Exact rational number used throughout the theory kit.
pub type Rational = Ratio<i128>;

/// Converts a float to the simplest nearby rational, such as `0.1 → 1/10`.
pub fn rational(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::InvalidParams(format!("{x} is not a finite number")));
    }
    Rational::approximate_float(x)
        .ok_or_else(|| Error::InvalidParams(format!("{x} has no rational approximation")))
}

pub fn to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `δ` of the grid as a rational.
pub fn delta_q(grid: &OpinionGrid) -> Rational {
    Rational::new(1, i128::from(grid.inv_delta()))
}

/// The effective threshold `λ'` of the grid as a rational.
pub fn lambda_q(grid: &OpinionGrid) -> Rational {
    Rational::new(
        i128::from(grid.lambda_index()),
        i128::from(grid.inv_delta()),
    )
}

/// A grid opinion as a rational.
pub fn opinion_q(x: GridOpinion, grid: &OpinionGrid) -> Rational {
    Rational::new(i128::from(x.0), i128::from(grid.inv_delta()))
}

fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn check_h(h: &Rational) -> Result<()> {
    if h.is_negative() {
        return Err(Error::Domain(format!(
            "homophily ratio must be non-negative, got {h}"
        )));
    }
    Ok(())
}

/// `τ₁(h) = (2 + 2λ + δ − δh) / (2 − 2λ − δ)`.
///
/// Only defined for `λ' + δ < 1`, the range in which the threshold results
/// hold; outside it this returns [`Error::Domain`].
pub fn tau1(h: &Rational, grid: &OpinionGrid) -> Result<Rational> {
    check_h(h)?;
    let (d, l) = (delta_q(grid), lambda_q(grid));
    let den = int(2) - int(2) * l - d;
    if l + d >= int(1) {
        return Err(Error::Domain(format!(
            "tau1 needs lambda + delta < 1, got lambda' = {l}, delta = {d}"
        )));
    }
    Ok((int(2) + int(2) * l + d - d * h) / den)
}

/// `τ₂(h) = (2/δ − 1) − h`.
pub fn tau2(h: &Rational, grid: &OpinionGrid) -> Rational {
    int(2) / delta_q(grid) - int(1) - h
}

/// `τ₃(h) = (2 − δ − (2λ + 3δ)h) / (2 + δ)`.
pub fn tau3(h: &Rational, grid: &OpinionGrid) -> Rational {
    let (d, l) = (delta_q(grid), lambda_q(grid));
    (int(2) - d - (int(2) * l + int(3) * d) * h) / (int(2) + d)
}

/// `τ₄(h) = h − (2/δ + 1)`.
pub fn tau4(h: &Rational, grid: &OpinionGrid) -> Rational {
    h - (int(2) / delta_q(grid) + int(1))
}

/// `τ₅(h) = (2 + δ − (2λ + δ)h) / (2 − δ)`.
pub fn tau5(h: &Rational, grid: &OpinionGrid) -> Rational {
    let (d, l) = (delta_q(grid), lambda_q(grid));
    (int(2) + d - (int(2) * l + d) * h) / (int(2) - d)
}

/// The five thresholds and `τ* = max(τ₁, τ₂)` at one `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub h: Rational,
    pub tau1: Rational,
    pub tau2: Rational,
    pub tau3: Rational,
    pub tau4: Rational,
    pub tau5: Rational,
    pub tau_star: Rational,
}

pub fn thresholds(h: &Rational, grid: &OpinionGrid) -> Result<Thresholds> {
    let t1 = tau1(h, grid)?;
    let t2 = tau2(h, grid);
    Ok(Thresholds {
        h: *h,
        tau_star: t1.max(t2),
        tau1: t1,
        tau2: t2,
        tau3: tau3(h, grid),
        tau4: tau4(h, grid),
        tau5: tau5(h, grid),
    })
}

/// Truth of the four threshold relations at one `h`, each as an implication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relations {
    /// `τ₁ > τ₄` only if `h < 2/δ + 1/(1 − λ)`.
    pub tau1_above_tau4: bool,
    /// `h > 2/δ` implies `τ₂ < τ₄`.
    pub tau2_below_tau4: bool,
    /// `τ₃ < τ₅`.
    pub tau3_below_tau5: bool,
    /// `τ₄ > 0` implies `τ₅ < 0`.
    pub tau5_negative: bool,
}

impl Relations {
    pub fn all(&self) -> bool {
        self.tau1_above_tau4 && self.tau2_below_tau4 && self.tau3_below_tau5 && self.tau5_negative
    }
}

pub fn check_relations(h: &Rational, grid: &OpinionGrid) -> Result<Relations> {
    let t = thresholds(h, grid)?;
    let (d, l) = (delta_q(grid), lambda_q(grid));
    let two_over_d = int(2) / d;
    Ok(Relations {
        tau1_above_tau4: t.tau1 <= t.tau4 || *h < two_over_d + int(1) / (int(1) - l),
        tau2_below_tau4: *h <= two_over_d || t.tau2 < t.tau4,
        tau3_below_tau5: t.tau3 < t.tau5,
        tau5_negative: !t.tau4.is_positive() || t.tau5.is_negative(),
    })
}

/// Whether the "non-extreme" and "low" bands of the both-extreme case table
/// are never simultaneously non-empty:
/// `¬(τ₄ > 0 ∧ max(τ₂, τ₃) > max(0, τ₄))`.
pub fn interval_emptiness(h: &Rational, grid: &OpinionGrid) -> Result<bool> {
    check_h(h)?;
    let t4 = tau4(h, grid);
    let upper = tau2(h, grid).max(tau3(h, grid));
    Ok(!(t4.is_positive() && upper > t4.max(Rational::zero())))
}

/// Necessary upper bound on `b̃` for consensus on a non-extreme positive
/// opinion `x` to be stable.
pub fn delta_to_zero_bound(x: GridOpinion, h: &Rational, grid: &OpinionGrid) -> Result<Rational> {
    check_h(h)?;
    let m = grid.inv_delta();
    if x.0 <= 0 || x.0 >= m {
        return Err(Error::Domain(format!(
            "x = {}/{m} must lie strictly between 0 and 1",
            x.0
        )));
    }
    let d = delta_q(grid);
    let half = d / int(2);
    let xq = opinion_q(x, grid);
    let num = half * (int(1) + h);
    if x.0 <= grid.lambda_index() {
        Ok(num / (xq - half))
    } else {
        Ok(num / (int(1) - xq - half))
    }
}

/// Upper bound on the number of strictly improving asynchronous moves:
/// `10^k (4 b n + 4 w_max n²) / δ²`. Fails when `b` or `w_max` is not a
/// multiple of `10^-k`.
pub fn async_step_bound(n: usize, b: f64, w_max: f64, grid: &OpinionGrid, k: u32) -> Result<u128> {
    let scale = 10f64.powi(k as i32);
    let scaled = |x: f64, what: &str| -> Result<u128> {
        let t = x * scale;
        let r = t.round();
        if x.is_nan() || x < 0.0 || (t - r).abs() > 1e-9 * r.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "{what} = {x} is not a non-negative multiple of 1e-{k}"
            )));
        }
        Ok(r as u128)
    };
    Ok(async_step_bound_scaled(
        n as u128,
        scaled(b, "b")?,
        scaled(w_max, "w_max")?,
        grid.inv_delta() as u128,
    ))
}

/// [`async_step_bound`] with `b` and `w_max` already multiplied by `10^k`.
pub fn async_step_bound_scaled(n: u128, b: u128, w_max: u128, inv_delta: u128) -> u128 {
    inv_delta.saturating_mul(inv_delta).saturating_mul(
        (4 * b)
            .saturating_mul(n)
            .saturating_add((4 * w_max).saturating_mul(n.saturating_mul(n))),
    )
}

/// `h ≥ 2/δ + 1/(1 − λ)`, above which no consensus is stable from
/// divergent starts with an extreme block.
pub fn high_homophily_threshold(grid: &OpinionGrid) -> Rational {
    int(2) / delta_q(grid) + int(1) / (int(1) - lambda_q(grid))
}

/// `max(2/δ − 1, (2 − δ)/(2λ + 3δ))`: at or above this `h` the
/// non-extreme band of the divergent case tables is empty.
pub fn non_extreme_h_limit(grid: &OpinionGrid) -> Rational {
    let (d, l) = (delta_q(grid), lambda_q(grid));
    let a = int(2) / d - int(1);
    let b = (int(2) - d) / (int(2) * l + int(3) * d);
    a.max(b)
}
