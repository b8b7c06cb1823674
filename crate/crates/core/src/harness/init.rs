use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphgen::{Partition, Side};
use crate::grid::{GridOpinion, OpinionGrid};
use crate::model::OpinionProfile;

/// How initial opinions are drawn. Side `L` always gets the negative
/// interval and side `R` the positive one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitScheme {
    /// `ξ ~ U[0, λ+δ]`, `L` draws in `[l_L, −ξ]` with `l_L ~ U[−1, −ξ]`,
    /// `R` draws in `[ξ, h_R]` with `h_R ~ U[ξ, 1]`.
    GeneralDivergent,
    /// `L` in `[−1, −λ−δ]`, `R` in `[λ+δ, 1]`.
    ExtremeDivergent,
    /// Both sides in `[−1, 1]`.
    NonDivergent,
    /// `L` in `[−m−δ, −m+δ]`, `R` in `[m−δ, m+δ]`, both clipped to `[−1, 1]`.
    FixedMean { mean: f64 },
    /// Given values, one per agent, rounded to the grid.
    Explicit { values: Vec<f64> },
}

impl InitScheme {
    /// Short label used in CSV output.
    pub fn label(&self) -> String {
        match self {
            InitScheme::GeneralDivergent => "general_divergent".into(),
            InitScheme::ExtremeDivergent => "extreme_divergent".into(),
            InitScheme::NonDivergent => "non_divergent".into(),
            InitScheme::FixedMean { mean } => format!("fixed_mean({mean})"),
            InitScheme::Explicit { .. } => "explicit".into(),
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Draws one opinion per agent according to `scheme`; every real draw is
/// rounded to the nearest grid point, midpoints going towards zero.
pub fn sample_initial_opinions<R: Rng + ?Sized>(
    scheme: &InitScheme,
    partition: &Partition,
    grid: &OpinionGrid,
    rng: &mut R,
) -> Result<OpinionProfile> {
    let (d, l) = (grid.delta(), grid.lambda());
    let intervals = match scheme {
        InitScheme::Explicit { values } => {
            if values.len() != partition.len() {
                return Err(Error::InvalidProfile(format!(
                    "{} explicit opinions for {} agents",
                    values.len(),
                    partition.len()
                )));
            }
            return Ok(OpinionProfile::new(
                values.iter().map(|&v| grid.round(v)).collect(),
            ));
        }
        InitScheme::GeneralDivergent => {
            let xi = uniform(rng, 0.0, (l + d).min(1.0));
            let low_l = uniform(rng, -1.0, -xi);
            let high_r = uniform(rng, xi, 1.0);
            [(low_l, -xi), (xi, high_r)]
        }
        InitScheme::ExtremeDivergent => {
            if l + d > 1.0 + 1e-12 {
                return Err(Error::Domain(format!(
                    "extreme divergent intervals are empty for lambda + delta = {} > 1",
                    l + d
                )));
            }
            let edge = (l + d).min(1.0);
            [(-1.0, -edge), (edge, 1.0)]
        }
        InitScheme::NonDivergent => [(-1.0, 1.0), (-1.0, 1.0)],
        InitScheme::FixedMean { mean: m } => {
            if !(0.0..=1.0).contains(m) {
                return Err(Error::Domain(format!(
                    "fixed mean must lie in [0, 1], got {m}"
                )));
            }
            [
                ((-m - d).max(-1.0), (-m + d).min(1.0)),
                ((m - d).max(-1.0), (m + d).min(1.0)),
            ]
        }
    };
    let opinions = partition
        .sides()
        .iter()
        .map(|&side| {
            let (lo, hi) = intervals[side as usize];
            grid.round(uniform(rng, lo, hi))
        })
        .collect();
    Ok(OpinionProfile::new(opinions))
}

/// Side means projected to the grid and the resulting relaxed-consensus flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxedConsensus {
    /// Whether both sides project to the same grid point.
    pub consensus: bool,
    pub projected_left: GridOpinion,
    pub projected_right: GridOpinion,
    pub mean_left: f64,
    pub mean_right: f64,
    pub variance_left: f64,
    pub variance_right: f64,
    /// Population variance over all agents.
    pub variance: f64,
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Projects each side's mean opinion to the nearest grid point (midpoints
/// towards zero) and compares the projections.
pub fn relaxed_consensus(
    profile: &OpinionProfile,
    partition: &Partition,
    grid: &OpinionGrid,
) -> Result<RelaxedConsensus> {
    if profile.len() != partition.len() {
        return Err(Error::InvalidProfile(format!(
            "profile has {} agents, partition {}",
            profile.len(),
            partition.len()
        )));
    }
    if partition.count(Side::L) == 0 || partition.count(Side::R) == 0 {
        return Err(Error::InvalidProfile(
            "relaxed consensus needs two non-empty sides".into(),
        ));
    }
    let side_values = |side: Side| -> Vec<f64> {
        partition
            .members(side)
            .map(|i| profile.get(i).value(grid))
            .collect()
    };
    let (mean_left, variance_left) = mean_var(&side_values(Side::L));
    let (mean_right, variance_right) = mean_var(&side_values(Side::R));
    let (_, variance) = mean_var(&profile.values(grid));
    let projected_left = grid.round(mean_left);
    let projected_right = grid.round(mean_right);
    Ok(RelaxedConsensus {
        consensus: projected_left == projected_right,
        projected_left,
        projected_right,
        mean_left,
        mean_right,
        variance_left,
        variance_right,
        variance,
    })
}
