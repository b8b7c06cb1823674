//! Chains of 6-gadgets on which a scripted sequence of strictly improving
//! moves has length exponential in the number of gadgets.
//!
//! Gadget `i` has players `A_i..F_i` with edges `(A,B) = ε_i`,
//! `(B,C) = 2ε_i`, `(C,D) = 3ε_i` and `(D,E) = (B,F) = (D,F) = 4ε_i`.
//! Player `A_{i-1}` (or the external switch `A_0` for the first gadget) is
//! tied to `B_i` and `D_i` with weight `4ε_i`. The media weight is `ε' < ε_n`
//! and the grid is `{-1, -1/2, 0, 1/2, 1}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::grid::{GridOpinion, OpinionGrid};
use crate::model::{Game, LocalTerm, ModelParams, OpinionProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Role {
    pub const ALL: [Role; 6] = [Role::A, Role::B, Role::C, Role::D, Role::E, Role::F];

    fn offset(self) -> usize {
        self as usize
    }
}

/// Roles moving in a switch-off cycle, in order.
pub const SWITCH_OFF: [Role; 10] = [
    Role::A,
    Role::B,
    Role::A,
    Role::C,
    Role::B,
    Role::A,
    Role::D,
    Role::C,
    Role::B,
    Role::A,
];

/// Roles moving in a switch-on cycle, in order.
pub const SWITCH_ON: [Role; 2] = [Role::B, Role::D];

/// Gadget states (opinions of `A..F` as multiples of 1/2) visited by the
/// switch-off cycle, followed by the intermediate state of the switch-on
/// cycle, which returns to the first entry.
const OFF_STATES: [[i32; 6]; 11] = [
    [0, 1, 0, 1, 0, 1],
    [1, 1, 0, 1, 0, 1],
    [1, 0, 0, 1, 0, 1],
    [0, 0, 0, 1, 0, 1],
    [0, 0, 1, 1, 0, 1],
    [0, 1, 1, 1, 0, 1],
    [1, 1, 1, 1, 0, 1],
    [1, 1, 1, 0, 0, 1],
    [1, 1, 0, 0, 0, 1],
    [1, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 1],
];
const ON_MIDDLE: [i32; 6] = [0, 1, 0, 0, 0, 1];

/// Chain of `n` 6-gadgets with its switch player.
#[derive(Debug, Clone)]
pub struct GadgetChain {
    n: usize,
    graph: SocialGraph,
    epsilons: Vec<f64>,
    eps_prime: f64,
}

impl GadgetChain {
    fn build(epsilons: Vec<f64>, eps_prime: f64) -> Result<Self> {
        let n = epsilons.len();
        if n == 0 {
            return Err(Error::InvalidParams(
                "a chain needs at least one gadget".into(),
            ));
        }
        let eps_n = epsilons[n - 1];
        if !(eps_prime > 0.0 && eps_prime < eps_n) {
            return Err(Error::InvalidParams(format!(
                "media weight must satisfy 0 < eps' < eps_n = {eps_n}, got {eps_prime}"
            )));
        }
        let mut edges = Vec::with_capacity(8 * n);
        for (k, &e) in epsilons.iter().enumerate() {
            let i = k + 1;
            let node = |r: Role| Self::index(i, r);
            edges.push((node(Role::A), node(Role::B), e));
            edges.push((node(Role::B), node(Role::C), 2.0 * e));
            edges.push((node(Role::C), node(Role::D), 3.0 * e));
            edges.push((node(Role::D), node(Role::E), 4.0 * e));
            edges.push((node(Role::B), node(Role::F), 4.0 * e));
            edges.push((node(Role::D), node(Role::F), 4.0 * e));
            let switch = if i == 1 {
                0
            } else {
                Self::index(i - 1, Role::A)
            };
            edges.push((switch, node(Role::B), 4.0 * e));
            edges.push((switch, node(Role::D), 4.0 * e));
        }
        let graph = SocialGraph::from_edges(6 * n + 1, edges)?;
        Ok(GadgetChain {
            n,
            graph,
            epsilons,
            eps_prime,
        })
    }

    /// Agent id of role `r` in gadget `i ≥ 1`. The switch `A_0` is agent 0.
    pub fn index(i: usize, r: Role) -> usize {
        1 + 6 * (i - 1) + r.offset()
    }

    pub fn n_gadgets(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    /// `δ = 1/2`, `λ = 1/2`.
    pub fn grid(&self) -> OpinionGrid {
        OpinionGrid::with_inv_delta(2, 0.5).expect("valid grid")
    }

    /// Smallest `k ≤ 15` such that every weight is a multiple of `10^-k`.
    pub fn weight_precision(&self) -> Option<u32> {
        let weights: Vec<f64> = self
            .graph
            .edges()
            .iter()
            .map(|e| e.w)
            .chain([self.eps_prime])
            .collect();
        (0..=15u32).find(|&k| {
            let s = 10f64.powi(k as i32);
            weights
                .iter()
                .all(|&w| ((w * s) - (w * s).round()).abs() <= 1e-9 * (w * s).abs().max(1.0))
        })
    }

    /// The game on this chain, in exact mode when the weights allow it.
    pub fn game(&self) -> Result<Game> {
        Game::new(
            self.graph.clone(),
            self.grid(),
            ModelParams {
                b: self.eps_prime,
                weight_precision: self.weight_precision(),
            },
        )
    }

    /// `B_1 = D_1 = 1/2`, every `F_i = 1/2`, everyone else at 0.
    pub fn initial_profile(&self) -> OpinionProfile {
        let mut x = OpinionProfile::uniform(6 * self.n + 1, GridOpinion(0));
        x.set(Self::index(1, Role::B), GridOpinion(1));
        x.set(Self::index(1, Role::D), GridOpinion(1));
        for i in 1..=self.n {
            x.set(Self::index(i, Role::F), GridOpinion(1));
        }
        x
    }

    /// Opinions of gadget `i`'s six players, in grid indices.
    pub fn gadget_state(&self, x: &OpinionProfile, i: usize) -> [i32; 6] {
        Role::ALL.map(|r| x.get(Self::index(i, r)).0)
    }

    fn locate(&self, agent: usize) -> Option<(usize, Role)> {
        if agent == 0 || agent > 6 * self.n {
            return None;
        }
        let k = agent - 1;
        Some((k / 6 + 1, Role::ALL[k % 6]))
    }
}

/// A single gadget with weight scale `eps` and media weight `eps_prime`.
pub fn six_gadget(eps: f64, eps_prime: f64) -> Result<GadgetChain> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "eps must be positive, got {eps}"
        )));
    }
    GadgetChain::build(vec![eps], eps_prime)
}

/// `n` gadgets with `ε_i = ratio^(n−i)` and `ε' = fraction · ε_n`.
pub fn gadget_chain(n: usize, eps_ratio: f64, eps_prime_fraction: f64) -> Result<GadgetChain> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "a chain needs at least one gadget".into(),
        ));
    }
    if !(eps_ratio > 9.0 && eps_ratio.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "eps ratio must exceed 9, got {eps_ratio}"
        )));
    }
    if !(eps_prime_fraction > 0.0 && eps_prime_fraction < 1.0) {
        return Err(Error::InvalidParams(format!(
            "eps' fraction must lie in (0, 1), got {eps_prime_fraction}"
        )));
    }
    let mut eps = vec![1.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        eps[i] = eps[i + 1] * eps_ratio;
    }
    GadgetChain::build(eps, eps_prime_fraction)
}

/// The scripted move sequence: a switch-off cycle of gadget 1 in which
/// every flip of `A_i` is followed by a full cycle of gadget `i + 1`
/// (switch-on after `0 → 1/2`, switch-off after `1/2 → 0`).
pub fn exponential_schedule(chain: &GadgetChain) -> Vec<usize> {
    fn off(chain: &GadgetChain, i: usize, out: &mut Vec<usize>) {
        let mut a_up = false;
        for role in SWITCH_OFF {
            out.push(GadgetChain::index(i, role));
            if role == Role::A {
                a_up = !a_up;
                if i < chain.n {
                    if a_up {
                        on(i + 1, out);
                    } else {
                        off(chain, i + 1, out);
                    }
                }
            }
        }
    }
    fn on(i: usize, out: &mut Vec<usize>) {
        out.extend(SWITCH_ON.map(|r| GadgetChain::index(i, r)));
    }
    let mut out = Vec::new();
    off(chain, 1, &mut out);
    out
}

/// `T(n) = 12 · 2^n − 14`, the length of [`exponential_schedule`].
pub fn schedule_length(n: u32) -> u64 {
    12 * (1u64 << n) - 14
}

/// Outcome of [`verify_schedule`].
#[derive(Debug, Clone)]
pub struct GadgetReport {
    pub moves: usize,
    pub final_profile: OpinionProfile,
    /// `Φ` before the first move and after each move, when requested.
    pub potential_trace: Option<Vec<f64>>,
}

/// Replays `schedule` from the canonical initial profile and checks that
/// every move is the mover's best response, differs from its current
/// opinion, strictly lowers the potential, and takes its gadget to the
/// next listed cycle state.
pub fn verify_schedule(
    chain: &GadgetChain,
    schedule: &[usize],
    record_potential: bool,
) -> Result<GadgetReport> {
    let game = chain.game()?;
    let mut transitions: HashMap<([i32; 6], Role), [i32; 6]> = HashMap::new();
    for (k, &role) in SWITCH_OFF.iter().enumerate() {
        transitions.insert((OFF_STATES[k], role), OFF_STATES[k + 1]);
    }
    transitions.insert((OFF_STATES[10], Role::B), ON_MIDDLE);
    transitions.insert((ON_MIDDLE, Role::D), OFF_STATES[0]);

    let mut x = chain.initial_profile();
    let mut phi = game.potential(&x).value;
    let mut trace = record_potential.then(|| vec![phi]);
    for (step, &agent) in schedule.iter().enumerate() {
        let fail = |message: String| Error::Verification { step, message };
        let (gadget, role) = chain
            .locate(agent)
            .ok_or_else(|| fail(format!("agent {agent} is not a gadget player")))?;
        let before = chain.gadget_state(&x, gadget);
        let y = game.best_response(&x, agent);
        if y == x.get(agent) {
            return Err(fail(format!(
                "{role:?}_{gadget} has no improving move in state {before:?}"
            )));
        }
        let delta = match (
            game.local_potential(&x, agent, x.get(agent)),
            game.local_potential(&x, agent, y),
        ) {
            (LocalTerm::Scaled(a), LocalTerm::Scaled(b)) => {
                if b >= a {
                    return Err(fail(format!("potential did not drop ({a} -> {b} scaled)")));
                }
                game.unscale(b - a)
            }
            (LocalTerm::Real(a), LocalTerm::Real(b)) => {
                if b >= a {
                    return Err(fail(format!("potential did not drop ({a} -> {b})")));
                }
                b - a
            }
            _ => unreachable!("potential mode matches the game"),
        };
        x.set(agent, y);
        let after = chain.gadget_state(&x, gadget);
        match transitions.get(&(before, role)) {
            Some(expected) if *expected == after => {}
            Some(expected) => {
                return Err(fail(format!(
                    "{role:?}_{gadget} moved {before:?} -> {after:?}, expected {expected:?}"
                )))
            }
            None => {
                return Err(fail(format!(
                    "{role:?}_{gadget} moved from unlisted state {before:?}"
                )))
            }
        }
        phi += delta;
        if let Some(t) = trace.as_mut() {
            t.push(phi);
        }
    }
    Ok(GadgetReport {
        moves: schedule.len(),
        final_profile: x,
        potential_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gadget_shape() {
        let g = six_gadget(1.0, 0.5).unwrap();
        assert_eq!(g.graph().node_count(), 7);
        assert_eq!(g.graph().edge_count(), 8);
        assert_eq!(
            g.graph().max_weight().unwrap() / g.graph().min_weight().unwrap(),
            4.0
        );
        assert!(six_gadget(1.0, 1.0).is_err());
        assert!(six_gadget(0.0, 0.5).is_err());
    }

    #[test]
    fn chain_epsilons() {
        let c = gadget_chain(3, 10.0, 0.5).unwrap();
        assert_eq!(c.epsilons(), &[100.0, 10.0, 1.0]);
        assert_eq!(c.graph().node_count(), 19);
        assert_eq!(c.weight_precision(), Some(1));
        assert!(gadget_chain(3, 9.0, 0.5).is_err());
        assert!(gadget_chain(0, 10.0, 0.5).is_err());
    }

    #[test]
    fn one_gadget_script_is_the_switch_off_cycle() {
        let c = gadget_chain(1, 10.0, 0.5).unwrap();
        let s = exponential_schedule(&c);
        let roles: Vec<Role> = s.iter().map(|&a| c.locate(a).unwrap().1).collect();
        assert_eq!(roles, SWITCH_OFF.to_vec());
    }

    #[test]
    fn schedule_lengths() {
        for n in 1..=6 {
            let c = gadget_chain(n, 10.0, 0.5).unwrap();
            assert_eq!(
                exponential_schedule(&c).len() as u64,
                schedule_length(n as u32)
            );
        }
        assert_eq!(schedule_length(2), 34);
    }

    #[test]
    fn switch_on_first_move() {
        // Gadget off, switch at 1/2: B's target 4/11.5 rounds up to 1/2.
        let c = six_gadget(1.0, 0.5).unwrap();
        let game = c.game().unwrap();
        let mut x = OpinionProfile::uniform(7, GridOpinion(0));
        x.set(GadgetChain::index(1, Role::F), GridOpinion(1));
        x.set(0, GridOpinion(1));
        assert_eq!(
            game.best_response(&x, GadgetChain::index(1, Role::B)),
            GridOpinion(1)
        );
    }

    #[test]
    fn verified_replay_ends_switched_off() {
        let c = gadget_chain(3, 10.0, 0.5).unwrap();
        let report = verify_schedule(&c, &exponential_schedule(&c), true).unwrap();
        assert_eq!(report.moves, 82);
        for i in 1..=3 {
            assert_eq!(c.gadget_state(&report.final_profile, i), OFF_STATES[10]);
        }
        let trace = report.potential_trace.unwrap();
        assert!(trace.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_bad_scripts() {
        let c = gadget_chain(2, 10.0, 0.5).unwrap();
        // C_1 moving first leaves the listed cycle.
        let bad = [GadgetChain::index(1, Role::C)];
        assert!(matches!(
            verify_schedule(&c, &bad, false),
            Err(Error::Verification { step: 0, .. })
        ));
        assert!(verify_schedule(&c, &[0], false).is_err());
    }
}
