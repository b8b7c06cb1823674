//! Consensus regimes of the symmetric two-block model from its initial
//! opinions, `h` and `b̃`.

use std::fmt;
use std::ops::Bound;

use num_traits::{Signed, Zero};

use super::{
    high_homophily_threshold, non_extreme_h_limit, tau1, tau2, tau3, tau4, Rational, TwoBlockParams,
};
use crate::error::Result;
use crate::grid::{GridOpinion, OpinionGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    NoConsensusStable,
    OnlyZeroConsensusStable,
    NonExtremeConsensusPossible,
    OnlyExtremeConsensusPossible,
    Unconstrained,
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Shape of the initial profile `(x_L, x_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialPattern {
    /// Opposite signs and both `|x| > λ'`.
    BothExtremeDivergent,
    /// Opposite signs and exactly one `|x| > λ'`.
    OneExtremeDivergent,
    /// Opposite signs and both `|x| ≤ λ'`.
    BothModerateDivergent,
    /// `x_L · x_R ≥ 0`.
    Convergent,
}

impl InitialPattern {
    pub fn of(x_l: GridOpinion, x_r: GridOpinion, grid: &OpinionGrid) -> Self {
        if i64::from(x_l.0) * i64::from(x_r.0) >= 0 {
            return InitialPattern::Convergent;
        }
        match (grid.is_extreme(x_l), grid.is_extreme(x_r)) {
            (true, true) => InitialPattern::BothExtremeDivergent,
            (false, false) => InitialPattern::BothModerateDivergent,
            _ => InitialPattern::OneExtremeDivergent,
        }
    }
}

/// Which row of the applicable case table fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseRow {
    /// `b̃` above the table's upper threshold (`τ₁`, `τ*`, or `max(τ₂, τ₃)`).
    AboveUpper,
    /// `max(0, τ₂, τ₃, τ₄) < b̃ ≤ τ₁` (or `τ*`).
    ZeroBand,
    /// `max(0, τ₄) < b̃ ≤ max(τ₂, τ₃)`.
    NonExtremeBand,
    /// `0 < b̃ ≤ max(0, τ₄)`.
    LowBand,
    /// `h ≥ 2/δ + 1/(1 − λ)` with an extreme block: no consensus for any `b̃`.
    HighHomophily,
    /// Convergent start with `b̃ > h + 1`.
    AboveHPlusOne,
    /// Convergent start with `b̃ ≤ h + 1`.
    AtMostHPlusOne,
    /// `b̃ = 0`, where no divergent table row applies.
    NoMedia,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AppliedCase {
    pub pattern: InitialPattern,
    pub row: CaseRow,
}

impl fmt::Display for AppliedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pattern = match self.pattern {
            InitialPattern::BothExtremeDivergent => "both blocks extreme, divergent",
            InitialPattern::OneExtremeDivergent => "one block extreme, divergent",
            InitialPattern::BothModerateDivergent => "both blocks moderate, divergent",
            InitialPattern::Convergent => "convergent",
        };
        let upper = match self.pattern {
            InitialPattern::BothExtremeDivergent => "tau1",
            InitialPattern::OneExtremeDivergent => "tau*",
            _ => "max(tau2, tau3)",
        };
        match self.row {
            CaseRow::AboveUpper => write!(f, "{pattern}; b~ > {upper}"),
            CaseRow::ZeroBand => write!(f, "{pattern}; max(0, tau2, tau3, tau4) < b~ <= {upper}"),
            CaseRow::NonExtremeBand => {
                write!(f, "{pattern}; max(0, tau4) < b~ <= max(tau2, tau3)")
            }
            CaseRow::LowBand => write!(f, "{pattern}; 0 < b~ <= max(0, tau4)"),
            CaseRow::HighHomophily => write!(f, "{pattern}; h >= 2/delta + 1/(1 - lambda)"),
            CaseRow::AboveHPlusOne => write!(f, "{pattern}; b~ > h + 1"),
            CaseRow::AtMostHPlusOne => write!(f, "{pattern}; b~ <= h + 1"),
            CaseRow::NoMedia => write!(f, "{pattern}; b~ = 0"),
        }
    }
}

/// An interval of `b̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BTildeInterval {
    pub lower: Bound<Rational>,
    pub upper: Bound<Rational>,
}

impl BTildeInterval {
    fn new(lower: Bound<Rational>, upper: Bound<Rational>) -> Self {
        BTildeInterval { lower, upper }
    }

    fn everything() -> Self {
        Self::new(Bound::Unbounded, Bound::Unbounded)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo = match &self.lower {
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
            Bound::Unbounded => true,
        };
        let hi = match &self.upper {
            Bound::Included(a) => x <= a,
            Bound::Excluded(a) => x < a,
            Bound::Unbounded => true,
        };
        lo && hi
    }
}

impl fmt::Display for BTildeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            Bound::Included(a) => write!(f, "[{a}, ")?,
            Bound::Excluded(a) => write!(f, "({a}, ")?,
            Bound::Unbounded => write!(f, "(-inf, ")?,
        }
        match &self.upper {
            Bound::Included(a) => write!(f, "{a}]"),
            Bound::Excluded(a) => write!(f, "{a})"),
            Bound::Unbounded => write!(f, "+inf)"),
        }
    }
}

/// The regime a two-block instance falls in, with the rule that decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusRegime {
    pub kind: RegimeKind,
    pub applied_case: AppliedCase,
    /// The `b̃` interval of the row that fired.
    pub bounds: BTildeInterval,
    /// Non-extreme consensus from a divergent start needs `h` below this.
    pub non_extreme_h_limit: Rational,
}

/// Classifies `(x_L, x_R, h, b̃)` by the case table for its initial pattern.
///
/// Where two rows overlap, [`RegimeKind::NoConsensusStable`] wins. Errors
/// only when a needed `τ₁` is undefined (`λ' + δ ≥ 1`).
pub fn classify(
    x_l: GridOpinion,
    x_r: GridOpinion,
    p: &TwoBlockParams,
    grid: &OpinionGrid,
) -> Result<ConsensusRegime> {
    let pattern = InitialPattern::of(x_l, x_r, grid);
    let h = p.h();
    let bt = p.b_tilde();
    let limit = non_extreme_h_limit(grid);
    let regime = |kind, row, bounds| ConsensusRegime {
        kind,
        applied_case: AppliedCase { pattern, row },
        bounds,
        non_extreme_h_limit: limit,
    };
    let zero = Rational::zero();

    if pattern == InitialPattern::Convergent {
        let cut = h + Rational::from_integer(1);
        return Ok(if bt > cut {
            regime(
                RegimeKind::OnlyExtremeConsensusPossible,
                CaseRow::AboveHPlusOne,
                BTildeInterval::new(Bound::Excluded(cut), Bound::Unbounded),
            )
        } else {
            regime(
                RegimeKind::Unconstrained,
                CaseRow::AtMostHPlusOne,
                BTildeInterval::new(Bound::Included(zero), Bound::Included(cut)),
            )
        });
    }

    let has_extreme = pattern != InitialPattern::BothModerateDivergent;
    if has_extreme && h >= high_homophily_threshold(grid) {
        return Ok(regime(
            RegimeKind::NoConsensusStable,
            CaseRow::HighHomophily,
            BTildeInterval::everything(),
        ));
    }
    if !bt.is_positive() {
        return Ok(regime(
            RegimeKind::Unconstrained,
            CaseRow::NoMedia,
            BTildeInterval::new(Bound::Included(zero), Bound::Included(zero)),
        ));
    }

    let t2 = tau2(&h, grid);
    let t3 = tau3(&h, grid);
    let t4 = tau4(&h, grid);
    let low_top = zero.max(t4);
    let mid_top = t2.max(t3);
    let upper = match pattern {
        InitialPattern::BothExtremeDivergent => Some(tau1(&h, grid)?),
        InitialPattern::OneExtremeDivergent => Some(tau1(&h, grid)?.max(t2)),
        _ => None,
    };

    // Rows yielding "no consensus" are checked first so they win overlaps.
    if let Some(u) = upper {
        if bt > u {
            return Ok(regime(
                RegimeKind::NoConsensusStable,
                CaseRow::AboveUpper,
                BTildeInterval::new(Bound::Excluded(u), Bound::Unbounded),
            ));
        }
    }
    if bt <= low_top {
        return Ok(regime(
            RegimeKind::NoConsensusStable,
            CaseRow::LowBand,
            BTildeInterval::new(Bound::Excluded(zero), Bound::Included(low_top)),
        ));
    }
    if bt <= mid_top {
        return Ok(regime(
            RegimeKind::NonExtremeConsensusPossible,
            CaseRow::NonExtremeBand,
            BTildeInterval::new(Bound::Excluded(low_top), Bound::Included(mid_top)),
        ));
    }
    let zero_floor = low_top.max(mid_top);
    Ok(match upper {
        Some(u) => regime(
            RegimeKind::OnlyZeroConsensusStable,
            CaseRow::ZeroBand,
            BTildeInterval::new(Bound::Excluded(zero_floor), Bound::Included(u)),
        ),
        None => regime(
            RegimeKind::OnlyZeroConsensusStable,
            CaseRow::AboveUpper,
            BTildeInterval::new(Bound::Excluded(mid_top), Bound::Unbounded),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn grid() -> OpinionGrid {
        OpinionGrid::new(0.25, 0.5).unwrap()
    }

    fn kind(xl: i32, xr: i32, h: Rational, bt: Rational) -> RegimeKind {
        let p = TwoBlockParams::from_ratios(h, bt).unwrap();
        classify(GridOpinion(xl), GridOpinion(xr), &p, &grid())
            .unwrap()
            .kind
    }

    #[test]
    fn strong_media_blocks_consensus_from_extremes() {
        // tau1(1) = 4 at delta = 1/4.
        assert_eq!(
            kind(-4, 4, q(1, 1), q(10, 1)),
            RegimeKind::NoConsensusStable
        );
        // h = 1: tau2 = 6 exceeds tau1, so b~ = 4 is in the non-extreme band.
        assert_eq!(
            kind(-4, 4, q(1, 1), q(4, 1)),
            RegimeKind::NonExtremeConsensusPossible
        );
        // h = 6: tau1 = 7/3, tau2 = 1.
        assert_eq!(
            kind(-4, 4, q(6, 1), q(2, 1)),
            RegimeKind::OnlyZeroConsensusStable
        );
        assert_eq!(
            kind(-4, 4, q(6, 1), q(7, 3)),
            RegimeKind::OnlyZeroConsensusStable
        );
        assert_eq!(
            kind(-4, 4, q(6, 1), q(1, 1)),
            RegimeKind::NonExtremeConsensusPossible
        );
    }

    #[test]
    fn high_homophily_blocks_consensus_for_all_media() {
        // 2/delta + 1/(1 - lambda) = 10.
        for bt in [q(0, 1), q(1, 10), q(5, 1), q(100, 1)] {
            assert_eq!(kind(-4, 3, q(10, 1), bt), RegimeKind::NoConsensusStable);
        }
    }

    #[test]
    fn convergent_cases() {
        assert_eq!(kind(1, 2, q(1, 1), q(2, 1)), RegimeKind::Unconstrained);
        assert_eq!(
            kind(1, 2, q(1, 1), q(21, 10)),
            RegimeKind::OnlyExtremeConsensusPossible
        );
        assert_eq!(kind(0, -3, q(1, 1), q(1, 1)), RegimeKind::Unconstrained);
    }

    #[test]
    fn moderate_rows() {
        // h = 1: tau2 = 6, tau3 < 0, tau4 < 0.
        assert_eq!(
            kind(-1, 2, q(1, 1), q(6, 1)),
            RegimeKind::NonExtremeConsensusPossible
        );
        assert_eq!(
            kind(-1, 2, q(1, 1), q(61, 10)),
            RegimeKind::OnlyZeroConsensusStable
        );
        // h = 12: tau4 = 3, low band.
        assert_eq!(
            kind(-1, 2, q(12, 1), q(3, 1)),
            RegimeKind::NoConsensusStable
        );
    }

    #[test]
    fn bounds_contain_input() {
        let g = grid();
        for (h, bt) in [(q(1, 1), q(10, 1)), (q(1, 1), q(3, 1)), (q(12, 1), q(1, 2))] {
            let p = TwoBlockParams::from_ratios(h, bt).unwrap();
            let r = classify(GridOpinion(-4), GridOpinion(2), &p, &g).unwrap();
            assert!(r.bounds.contains(&bt), "{r:?}");
        }
    }

    #[test]
    fn pattern_detection() {
        let g = grid();
        let pat = |a, b| InitialPattern::of(GridOpinion(a), GridOpinion(b), &g);
        assert_eq!(pat(-3, 4), InitialPattern::BothExtremeDivergent);
        assert_eq!(pat(-2, 4), InitialPattern::OneExtremeDivergent);
        assert_eq!(pat(-2, 1), InitialPattern::BothModerateDivergent);
        assert_eq!(pat(0, 4), InitialPattern::Convergent);
        assert_eq!(pat(2, 4), InitialPattern::Convergent);
    }
}
