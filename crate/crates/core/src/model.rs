//! Parameters, opinion profiles, individual costs and the potential.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::grid::{GridOpinion, OpinionGrid};

/// Media influence `b` and the optional decimal precision of the weights.
///
/// With `weight_precision = Some(k)`, `b` and every edge weight must be a
/// multiple of `10^-k`; costs and the potential are then tracked as exact
/// scaled integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub b: f64,
    pub weight_precision: Option<u32>,
}

impl ModelParams {
    pub fn new(b: f64) -> Self {
        ModelParams {
            b,
            weight_precision: None,
        }
    }

    pub fn exact(b: f64, k: u32) -> Self {
        ModelParams {
            b,
            weight_precision: Some(k),
        }
    }
}

/// One opinion per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpinionProfile(Vec<GridOpinion>);

impl OpinionProfile {
    pub fn new(opinions: Vec<GridOpinion>) -> Self {
        OpinionProfile(opinions)
    }

    /// Builds a profile from opinion values, each of which must be a grid point.
    pub fn from_values(grid: &OpinionGrid, values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| grid.opinion(v))
            .collect::<Result<Vec<_>>>()
            .map(OpinionProfile)
    }

    pub fn uniform(n: usize, x: GridOpinion) -> Self {
        OpinionProfile(vec![x; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> GridOpinion {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, x: GridOpinion) {
        self.0[i] = x;
    }

    pub fn as_slice(&self) -> &[GridOpinion] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = GridOpinion> + '_ {
        self.0.iter().copied()
    }

    pub fn values(&self, grid: &OpinionGrid) -> Vec<f64> {
        self.0.iter().map(|x| x.value(grid)).collect()
    }

    pub fn into_inner(self) -> Vec<GridOpinion> {
        self.0
    }
}

impl fmt::Display for OpinionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", x.0)?;
        }
        write!(f, "]")
    }
}

/// A cost or potential value.
///
/// `scaled` is present in exact mode and equals `value · 10^k · M²`,
/// computed without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub value: f64,
    pub scaled: Option<i128>,
}

/// Relative tolerance used to detect ties between floating-point costs.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn float_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TIE_TOLERANCE * 1f64.max(a.abs()).max(b.abs())
}

#[derive(Debug, Clone)]
pub(crate) struct ExactWeights {
    /// `10^k`.
    pub scale: i128,
    pub b: i128,
    pub adj: Vec<Vec<(usize, i128)>>,
    pub max_w: i128,
}

fn to_scaled(x: f64, scale: i128, what: &str) -> Result<i128> {
    let t = x * scale as f64;
    let r = t.round();
    if !r.is_finite() || r.abs() >= 1e36 || (t - r).abs() > 1e-9 * r.abs().max(1.0) {
        return Err(Error::InvalidParams(format!(
            "{what} = {x} is not a multiple of 1/{scale}"
        )));
    }
    Ok(r as i128)
}

/// A validated instance: graph, grid and parameters.
#[derive(Debug, Clone)]
pub struct Game {
    graph: SocialGraph,
    grid: OpinionGrid,
    params: ModelParams,
    pub(crate) exact: Option<ExactWeights>,
}

impl Game {
    pub fn new(graph: SocialGraph, grid: OpinionGrid, params: ModelParams) -> Result<Self> {
        if !params.b.is_finite() || params.b < 0.0 {
            return Err(Error::InvalidParams(format!(
                "media influence b must be finite and non-negative, got {}",
                params.b
            )));
        }
        if params.b == 0.0 {
            log::warn!("media influence b = 0: the recommendation has no effect");
        }
        let exact = match params.weight_precision {
            None => None,
            Some(k) => {
                if k > 30 {
                    return Err(Error::InvalidParams(format!(
                        "weight precision {k} is too large (at most 30)"
                    )));
                }
                let scale = 10i128.pow(k);
                let b = to_scaled(params.b, scale, "b")?;
                let mut adj = vec![Vec::new(); graph.node_count()];
                let mut max_w = 0;
                for e in graph.edges() {
                    let w = to_scaled(e.w, scale, "edge weight")?;
                    if w <= 0 {
                        return Err(Error::InvalidParams(format!(
                            "edge ({}, {}) has weight {} which rounds to zero at precision {k}",
                            e.u, e.v, e.w
                        )));
                    }
                    max_w = max_w.max(w);
                    adj[e.u].push((e.v, w));
                    adj[e.v].push((e.u, w));
                }
                for row in &mut adj {
                    row.sort_by_key(|&(j, _)| j);
                }
                Some(ExactWeights {
                    scale,
                    b,
                    adj,
                    max_w,
                })
            }
        };
        Ok(Game {
            graph,
            grid,
            params,
            exact,
        })
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn grid(&self) -> &OpinionGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.graph.node_count()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Checks that `profile` has one grid opinion per agent.
    pub fn validate(&self, profile: &OpinionProfile) -> Result<()> {
        if profile.len() != self.n() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} opinions but the graph has {} agents",
                profile.len(),
                self.n()
            )));
        }
        if let Some((i, x)) = profile
            .iter()
            .enumerate()
            .find(|&(_, x)| !self.grid.contains(x))
        {
            return Err(Error::InvalidProfile(format!(
                "agent {i} has index {} outside [-{m}, {m}]",
                x.0,
                m = self.grid.inv_delta()
            )));
        }
        Ok(())
    }

    /// Converts a scaled exact value back to real units.
    pub fn unscale(&self, scaled: i128) -> f64 {
        let e = self.exact.as_ref().expect("exact mode");
        let m = i128::from(self.grid.inv_delta());
        scaled as f64 / (e.scale * m * m) as f64
    }

    /// Smallest possible decrease of the potential in one improving move,
    /// in real units: `δ² · 10^-k`. `None` outside exact mode.
    pub fn potential_quantum(&self) -> Option<f64> {
        self.exact.as_ref().map(|_| self.unscale(1))
    }

    /// `c_i(y)` where the recommendation is taken at the agent's current opinion.
    pub fn agent_cost(&self, profile: &OpinionProfile, i: usize, y: GridOpinion) -> Cost {
        let s = self.grid.recommend(profile.get(i)).sign();
        let m = self.grid.inv_delta();
        let yv = y.value(&self.grid);
        let sv = f64::from(s);
        let mut value = self.params.b * (yv - sv) * (yv - sv);
        for &(j, w) in self.graph.neighbors(i) {
            let d = yv - profile.get(j).value(&self.grid);
            value += w * d * d;
        }
        let scaled = self.exact.as_ref().map(|e| {
            let dy = i128::from(y.0 - s * m);
            let mut c = e.b * dy * dy;
            for &(j, w) in &e.adj[i] {
                let d = i128::from(y.0 - profile.get(j).0);
                c += w * d * d;
            }
            c
        });
        Cost { value, scaled }
    }

    /// `Φ(x) = Σ_i b (x_i - s(x_i))² + Σ_{(i,j)} w_ij (x_i - x_j)²`.
    pub fn potential(&self, profile: &OpinionProfile) -> Cost {
        let m = self.grid.inv_delta();
        let mut value = 0.0;
        for x in profile.iter() {
            let d = x.value(&self.grid) - f64::from(self.grid.recommend(x).sign());
            value += self.params.b * d * d;
        }
        for e in self.graph.edges() {
            let d = profile.get(e.u).value(&self.grid) - profile.get(e.v).value(&self.grid);
            value += e.w * d * d;
        }
        let scaled = self.exact.as_ref().map(|ex| {
            let mut c = 0i128;
            for x in profile.iter() {
                let d = i128::from(x.0 - self.grid.recommend(x).sign() * m);
                c += ex.b * d * d;
            }
            for (i, row) in ex.adj.iter().enumerate() {
                for &(j, w) in row.iter().filter(|&&(j, _)| j > i) {
                    let d = i128::from(profile.get(i).0 - profile.get(j).0);
                    c += w * d * d;
                }
            }
            c
        });
        Cost { value, scaled }
    }

    /// Terms of `Φ` that involve agent `i` when it holds `y`, in scaled
    /// units for exact mode and real units otherwise.
    pub(crate) fn local_potential(
        &self,
        profile: &OpinionProfile,
        i: usize,
        y: GridOpinion,
    ) -> LocalTerm {
        let s = self.grid.recommend(y).sign();
        match &self.exact {
            Some(e) => {
                let m = self.grid.inv_delta();
                let dy = i128::from(y.0 - s * m);
                let mut c = e.b * dy * dy;
                for &(j, w) in &e.adj[i] {
                    let d = i128::from(y.0 - profile.get(j).0);
                    c += w * d * d;
                }
                LocalTerm::Scaled(c)
            }
            None => {
                let yv = y.value(&self.grid);
                let d = yv - f64::from(s);
                let mut c = self.params.b * d * d;
                for &(j, w) in self.graph.neighbors(i) {
                    let d = yv - profile.get(j).value(&self.grid);
                    c += w * d * d;
                }
                LocalTerm::Real(c)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum LocalTerm {
    Scaled(i128),
    Real(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(w: f64, b: f64, k: Option<u32>) -> Game {
        let g = SocialGraph::from_edges(2, [(0, 1, w)]).unwrap();
        let grid = OpinionGrid::new(0.5, 0.5).unwrap();
        Game::new(
            g,
            grid,
            ModelParams {
                b,
                weight_precision: k,
            },
        )
        .unwrap()
    }

    #[test]
    fn cost_matches_hand_computation() {
        let game = pair(10.0, 1.0, Some(0));
        let grid = *game.grid();
        let x = OpinionProfile::from_values(&grid, &[-1.0, 1.0]).unwrap();
        // Agent 0 at -1 has s = -1; at y = 0: 1·1 + 10·1 = 11.
        let c = game.agent_cost(&x, 0, GridOpinion(0));
        assert_eq!(c.value, 11.0);
        assert_eq!(c.scaled, Some(44));
        // Φ = 0 + 0 + 10·4.
        let p = game.potential(&x);
        assert_eq!(p.value, 40.0);
        assert_eq!(p.scaled, Some(160));
        assert_eq!(game.unscale(160), 40.0);
    }

    #[test]
    fn rejects_weights_off_precision() {
        let g = SocialGraph::from_edges(2, [(0, 1, 0.15)]).unwrap();
        let grid = OpinionGrid::new(0.5, 0.5).unwrap();
        assert!(Game::new(g.clone(), grid, ModelParams::exact(1.0, 1)).is_err());
        assert!(Game::new(g, grid, ModelParams::exact(1.0, 2)).is_ok());
    }

    #[test]
    fn rejects_negative_b_and_accepts_zero() {
        let grid = OpinionGrid::new(0.5, 0.5).unwrap();
        assert!(Game::new(SocialGraph::empty(2), grid, ModelParams::new(-1.0)).is_err());
        assert!(Game::new(SocialGraph::empty(2), grid, ModelParams::new(0.0)).is_ok());
    }

    #[test]
    fn validate_checks_length_and_range() {
        let game = pair(1.0, 1.0, None);
        assert!(game
            .validate(&OpinionProfile::uniform(3, GridOpinion(0)))
            .is_err());
        assert!(game
            .validate(&OpinionProfile::new(vec![GridOpinion(0), GridOpinion(3)]))
            .is_err());
        assert!(game
            .validate(&OpinionProfile::uniform(2, GridOpinion(2)))
            .is_ok());
    }
}
