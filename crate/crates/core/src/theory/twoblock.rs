//! The symmetric two-block model reduced to its two block opinions.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::{delta_q, opinion_q, Rational};
use crate::dynamics::OutcomeKind;
use crate::error::{Error, Result};
use crate::grid::{round_ratio, GridOpinion, OpinionGrid};

/// Cumulative within-block influence `a_in`, cross-block influence `a_out`
/// and media weight `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoBlockParams {
    a_in: Rational,
    a_out: Rational,
    b: Rational,
}

impl TwoBlockParams {
    pub fn new(a_in: Rational, a_out: Rational, b: Rational) -> Result<Self> {
        if !a_in.is_positive() || !a_out.is_positive() {
            return Err(Error::InvalidParams(format!(
                "a_in and a_out must be positive, got {a_in} and {a_out}"
            )));
        }
        if b.is_negative() {
            return Err(Error::InvalidParams(format!(
                "b must be non-negative, got {b}"
            )));
        }
        Ok(TwoBlockParams { a_in, a_out, b })
    }

    /// Parameters with `a_out = 1`, `a_in = h` and `b = b̃`.
    pub fn from_ratios(h: Rational, b_tilde: Rational) -> Result<Self> {
        Self::new(h, Rational::from_integer(1), b_tilde)
    }

    pub fn a_in(&self) -> Rational {
        self.a_in
    }

    pub fn a_out(&self) -> Rational {
        self.a_out
    }

    pub fn b(&self) -> Rational {
        self.b
    }

    /// Homophily ratio `h = a_in / a_out`.
    pub fn h(&self) -> Rational {
        self.a_in / self.a_out
    }

    /// Relative media influence `b̃ = b / a_out`.
    pub fn b_tilde(&self) -> Rational {
        self.b / self.a_out
    }
}

/// `μ = (b s + a_out x_other + a_in x_self) / (b + a_out + a_in)`, the
/// unconstrained best response of a block.
pub fn block_target(
    s: i32,
    x_self: GridOpinion,
    x_other: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
) -> Rational {
    let num = p.b * Rational::from_integer(i128::from(s))
        + p.a_out * opinion_q(x_other, grid)
        + p.a_in * opinion_q(x_self, grid);
    num / (p.b + p.a_out + p.a_in)
}

fn block_response(
    x_self: GridOpinion,
    x_other: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
) -> GridOpinion {
    let s = grid.recommend(x_self).sign();
    let mu_m = block_target(s, x_self, x_other, p, grid)
        * Rational::from_integer(i128::from(grid.inv_delta()));
    round_ratio(*mu_m.numer(), *mu_m.denom(), x_self, grid.inv_delta())
}

/// Result of [`twoblock_sync_run`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBlockRun {
    /// `(x_L^t, x_R^t)` for `t = 0..=steps`.
    pub states: Vec<(GridOpinion, GridOpinion)>,
    pub kind: OutcomeKind,
    pub steps: usize,
    pub cycle_period: Option<usize>,
}

impl TwoBlockRun {
    pub fn final_state(&self) -> (GridOpinion, GridOpinion) {
        *self.states.last().expect("states are never empty")
    }

    /// Whether any visited state is a consensus `x_L = x_R`.
    pub fn reaches_consensus(&self) -> bool {
        self.states.iter().any(|(l, r)| l == r)
    }
}

/// Synchronous dynamics of the two block opinions, with the same rounding
/// and tie-break as the full engine.
pub fn twoblock_sync_run(
    x_l: GridOpinion,
    x_r: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
    max_steps: usize,
) -> TwoBlockRun {
    let mut states = vec![(x_l, x_r)];
    let mut seen = HashMap::from([((x_l, x_r), 0usize)]);
    let mut kind = OutcomeKind::StepLimit;
    let mut period = None;
    let mut steps = 0;
    for t in 0..max_steps {
        let (l, r) = states[t];
        let next = (block_response(l, r, p, grid), block_response(r, l, p, grid));
        if next == (l, r) {
            kind = OutcomeKind::Converged;
            steps = t;
            break;
        }
        states.push(next);
        steps = t + 1;
        if let Some(&j) = seen.get(&next) {
            kind = OutcomeKind::Cycle;
            period = Some(t + 1 - j);
            break;
        }
        seen.insert(next, t + 1);
    }
    TwoBlockRun {
        states,
        kind,
        steps,
        cycle_period: period,
    }
}

/// Exact Nash test for a block-constant profile.
pub fn twoblock_stable(
    x_l: GridOpinion,
    x_r: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
) -> bool {
    block_response(x_l, x_r, p, grid) == x_l && block_response(x_r, x_l, p, grid) == x_r
}

/// Slack of each of the four necessary stability inequalities, written as
/// `rhs − lhs` for `≤` rows and `lhs − rhs` for `≥` rows, so a
/// non-negative entry means the inequality holds:
///
/// ```text
/// b̃ (s(x_L) − x_L − δ/2) ≤ (x_L − x_R) + δ/2 (h + 1)
/// b̃ (s(x_L) − x_L + δ/2) ≥ (x_L − x_R) − δ/2 (h + 1)
/// b̃ (s(x_R) − x_R − δ/2) ≤ (x_R − x_L) + δ/2 (h + 1)
/// b̃ (s(x_R) − x_R + δ/2) ≥ (x_R − x_L) − δ/2 (h + 1)
/// ```
pub fn stability_slacks(
    x_l: GridOpinion,
    x_r: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
) -> [Rational; 4] {
    let half = delta_q(grid) / Rational::from_integer(2);
    let spread = half * (p.h() + Rational::from_integer(1));
    let bt = p.b_tilde();
    let side = |x: GridOpinion, y: GridOpinion| {
        let s = Rational::from_integer(i128::from(grid.recommend(x).sign()));
        let (xq, yq) = (opinion_q(x, grid), opinion_q(y, grid));
        let upper = (xq - yq) + spread - bt * (s - xq - half);
        let lower = bt * (s - xq + half) - ((xq - yq) - spread);
        (upper, lower)
    };
    let (a, b) = side(x_l, x_r);
    let (c, d) = side(x_r, x_l);
    [a, b, c, d]
}

/// Whether every slack of [`stability_slacks`] is non-negative.
pub fn slacks_hold(slacks: &[Rational; 4]) -> bool {
    slacks.iter().all(|s| *s >= Rational::zero())
}
