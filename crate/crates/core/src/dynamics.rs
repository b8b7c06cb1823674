//! Best responses and the synchronous, asynchronous and scheduled dynamics.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{break_tie, round_ratio, GridOpinion, OpinionGrid};
use crate::model::{float_tie, Game, LocalTerm, OpinionProfile};
use crate::theory;

/// Step cap for asynchronous runs when no exact bound is available.
pub const DEFAULT_ASYNC_CAP: u64 = 10_000_000;

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    /// Reached a profile in which nobody wants to move.
    Converged,
    /// Synchronous dynamics revisited an earlier profile.
    Cycle,
    /// Hit the step cap (or exhausted a schedule) before either of the above.
    StepLimit,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::Converged => "converged",
            OutcomeKind::Cycle => "cycle",
            OutcomeKind::StepLimit => "step_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub kind: OutcomeKind,
    pub final_profile: OpinionProfile,
    /// Rounds (synchronous) or single-agent moves (asynchronous, scheduled).
    pub steps: u64,
    pub cycle_period: Option<usize>,
}

/// Who moved to produce a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    Initial,
    All,
    Agent(usize),
}

impl fmt::Display for Mover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mover::Initial => f.write_str("init"),
            Mover::All => f.write_str("all"),
            Mover::Agent(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub mover: Mover,
    pub profile: OpinionProfile,
    pub potential: f64,
}

/// Recorded sequence of profiles with their potential.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Writes one line per snapshot: `step,mover,phi,x_0,...,x_{n-1}`.
    pub fn write_trace<W: Write>(&self, grid: &OpinionGrid, mut out: W) -> std::io::Result<()> {
        for s in &self.snapshots {
            write!(out, "{},{},{}", s.step, s.mover, s.potential)?;
            for x in s.profile.iter() {
                write!(out, ",{}", x.value(grid))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Result of [`Game::sync_run`].
#[derive(Debug, Clone)]
pub struct SyncRun {
    pub outcome: UpdateOutcome,
    pub trajectory: Option<Trajectory>,
    history: Vec<OpinionProfile>,
}

impl SyncRun {
    /// Profiles `x^0, ..., x^steps`.
    pub fn history(&self) -> &[OpinionProfile] {
        &self.history
    }

    /// `x^t` for any `t`, following the detected fixed point or cycle past
    /// the end of the run. `None` after a step limit.
    pub fn profile_at(&self, t: usize) -> Option<&OpinionProfile> {
        if let Some(p) = self.history.get(t) {
            return Some(p);
        }
        match self.outcome.kind {
            OutcomeKind::Converged => self.history.last(),
            OutcomeKind::Cycle => {
                let last = self.history.len() - 1;
                let period = self.outcome.cycle_period.expect("cycle has a period");
                let start = last - period;
                Some(&self.history[start + (t - start) % period])
            }
            OutcomeKind::StepLimit => None,
        }
    }
}

/// Options for [`Game::async_run`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AsyncOptions {
    /// Maximum number of moves. Defaults to the exact step bound in exact
    /// mode and to [`DEFAULT_ASYNC_CAP`] otherwise.
    pub step_cap: Option<u64>,
    pub record: bool,
}

/// Result of [`Game::async_run`].
#[derive(Debug, Clone)]
pub struct AsyncRun {
    pub outcome: UpdateOutcome,
    pub trajectory: Option<Trajectory>,
    pub step_cap: u64,
}

/// Result of [`Game::scheduled_run`].
#[derive(Debug, Clone)]
pub struct ScheduledRun {
    pub outcome: UpdateOutcome,
    pub trajectory: Option<Trajectory>,
    /// Positions in the schedule whose agent had no improving move.
    pub skipped: Vec<usize>,
}

/// Improving set with O(1) insertion, removal and uniform sampling.
struct ActiveSet {
    members: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl ActiveSet {
    fn new(n: usize) -> Self {
        ActiveSet {
            members: Vec::new(),
            pos: vec![None; n],
        }
    }

    fn set(&mut self, i: usize, on: bool) {
        match (self.pos[i], on) {
            (None, true) => {
                self.pos[i] = Some(self.members.len());
                self.members.push(i);
            }
            (Some(p), false) => {
                self.members.swap_remove(p);
                if let Some(&moved) = self.members.get(p) {
                    self.pos[moved] = Some(p);
                }
                self.pos[i] = None;
            }
            _ => {}
        }
    }
}

impl Game {
    /// The agent's best response to `profile`, with ties resolved by keeping
    /// the current opinion, then by smaller `|y|`, then by smaller `y`.
    pub fn best_response(&self, profile: &OpinionProfile, i: usize) -> GridOpinion {
        let grid = self.grid();
        let m = grid.inv_delta();
        let current = profile.get(i);
        let s = grid.recommend(current).sign();
        if let Some(e) = &self.exact {
            // The cost is W (y - μ)² + const, so the best grid point is the
            // one nearest to μ = num / (W M) in index units.
            let mut num = e.b * i128::from(s * m);
            let mut den = e.b;
            for &(j, w) in &e.adj[i] {
                num += w * i128::from(profile.get(j).0);
                den += w;
            }
            if den == 0 {
                return current;
            }
            return round_ratio(num, den, current, m);
        }

        let b = self.params().b;
        let mf = f64::from(m);
        let sm = f64::from(s) * mf;
        let (mut num, mut den, mut sq) = (b * sm, b, b * sm * sm);
        for &(j, w) in self.graph().neighbors(i) {
            let xj = f64::from(profile.get(j).0);
            num += w * xj;
            den += w;
            sq += w * xj * xj;
        }
        if den == 0.0 {
            return current;
        }
        let cost = |y: i32| {
            let y = f64::from(y);
            (den * y * y - 2.0 * num * y + sq) / (mf * mf)
        };
        let centre = (num / den).floor() as i32;
        let lo = (centre - 1).max(-m);
        let hi = (centre + 2).min(m);
        let best = (lo..=hi).map(cost).fold(f64::INFINITY, f64::min);
        let tied: Vec<GridOpinion> = (lo..=hi)
            .filter(|&y| float_tie(cost(y), best))
            .map(GridOpinion)
            .collect();
        break_tie(&tied, current)
    }

    /// Whether agent `i` has a strictly cheaper opinion available.
    pub fn is_improving(&self, profile: &OpinionProfile, i: usize) -> bool {
        self.best_response(profile, i) != profile.get(i)
    }

    /// Agents that have a strictly improving move, in increasing order.
    pub fn improving_set(&self, profile: &OpinionProfile) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.is_improving(profile, i))
            .collect()
    }

    /// Whether `profile` is a pure Nash equilibrium.
    pub fn is_stable(&self, profile: &OpinionProfile) -> bool {
        (0..self.n()).all(|i| !self.is_improving(profile, i))
    }

    /// Every agent best-responds to the same profile.
    pub fn sync_step(&self, profile: &OpinionProfile) -> OpinionProfile {
        OpinionProfile::new(
            (0..self.n())
                .map(|i| self.best_response(profile, i))
                .collect(),
        )
    }

    /// Iterates [`Game::sync_step`] until a fixed point, a repeated profile
    /// or `max_steps` rounds.
    pub fn sync_run(
        &self,
        initial: &OpinionProfile,
        max_steps: usize,
        record: bool,
    ) -> Result<SyncRun> {
        self.validate(initial)?;
        let mut history = vec![initial.clone()];
        let mut seen: HashMap<OpinionProfile, usize> = HashMap::new();
        seen.insert(initial.clone(), 0);
        let mut kind = OutcomeKind::StepLimit;
        let mut period = None;
        let mut steps = 0;
        for t in 0..max_steps {
            let next = self.sync_step(&history[t]);
            if next == history[t] {
                kind = OutcomeKind::Converged;
                steps = t;
                break;
            }
            history.push(next.clone());
            steps = t + 1;
            if let Some(&j) = seen.get(&next) {
                kind = OutcomeKind::Cycle;
                period = Some(t + 1 - j);
                break;
            }
            seen.insert(next, t + 1);
        }
        let trajectory = record.then(|| Trajectory {
            snapshots: history
                .iter()
                .enumerate()
                .map(|(t, p)| Snapshot {
                    step: t as u64,
                    mover: if t == 0 { Mover::Initial } else { Mover::All },
                    profile: p.clone(),
                    potential: self.potential(p).value,
                })
                .collect(),
        });
        Ok(SyncRun {
            outcome: UpdateOutcome {
                kind,
                final_profile: history.last().expect("history is never empty").clone(),
                steps: steps as u64,
                cycle_period: period,
            },
            trajectory,
            history,
        })
    }

    /// Moves one uniformly chosen improving agent to its best response.
    /// Returns the mover and its new opinion, or `None` at equilibrium.
    pub fn async_step<R: Rng + ?Sized>(
        &self,
        profile: &mut OpinionProfile,
        rng: &mut R,
    ) -> Option<(usize, GridOpinion)> {
        let active = self.improving_set(profile);
        if active.is_empty() {
            return None;
        }
        let i = active[rng.gen_range(0..active.len())];
        let y = self.best_response(profile, i);
        profile.set(i, y);
        Some((i, y))
    }

    /// The default asynchronous step cap for this game.
    pub fn default_async_cap(&self) -> u64 {
        match &self.exact {
            Some(e) => {
                let bound = theory::async_step_bound_scaled(
                    self.n() as u128,
                    e.b as u128,
                    e.max_w as u128,
                    self.grid().inv_delta() as u128,
                );
                u64::try_from(bound).unwrap_or(u64::MAX)
            }
            None => DEFAULT_ASYNC_CAP,
        }
    }

    /// Asynchronous best-response dynamics: while some agent can improve,
    /// one improving agent chosen uniformly at random moves.
    pub fn async_run<R: Rng + ?Sized>(
        &self,
        initial: &OpinionProfile,
        rng: &mut R,
        options: AsyncOptions,
    ) -> Result<AsyncRun> {
        self.validate(initial)?;
        let cap = options.step_cap.unwrap_or_else(|| self.default_async_cap());
        let mut x = initial.clone();
        let mut active = ActiveSet::new(self.n());
        for i in 0..self.n() {
            active.set(i, self.is_improving(&x, i));
        }
        let mut phi = Phi::start(self, &x);
        let mut snapshots = Vec::new();
        if options.record {
            snapshots.push(Snapshot {
                step: 0,
                mover: Mover::Initial,
                profile: x.clone(),
                potential: phi.value(self),
            });
        }
        let mut steps = 0u64;
        while !active.members.is_empty() && steps < cap {
            let i = active.members[rng.gen_range(0..active.members.len())];
            let y = self.best_response(&x, i);
            phi.apply(self, &x, i, y);
            x.set(i, y);
            steps += 1;
            active.set(i, self.is_improving(&x, i));
            for &(j, _) in self.graph().neighbors(i) {
                active.set(j, self.is_improving(&x, j));
            }
            if options.record {
                snapshots.push(Snapshot {
                    step: steps,
                    mover: Mover::Agent(i),
                    profile: x.clone(),
                    potential: phi.value(self),
                });
            }
        }
        let kind = if active.members.is_empty() {
            OutcomeKind::Converged
        } else {
            OutcomeKind::StepLimit
        };
        Ok(AsyncRun {
            outcome: UpdateOutcome {
                kind,
                final_profile: x,
                steps,
                cycle_period: None,
            },
            trajectory: options.record.then_some(Trajectory { snapshots }),
            step_cap: cap,
        })
    }

    /// Plays the agents of `schedule` in order. Entries whose agent has no
    /// improving move are skipped and reported.
    pub fn scheduled_run(
        &self,
        initial: &OpinionProfile,
        schedule: &[usize],
        record: bool,
    ) -> Result<ScheduledRun> {
        self.validate(initial)?;
        if let Some((index, &agent)) = schedule.iter().enumerate().find(|&(_, &a)| a >= self.n()) {
            return Err(Error::BadSchedule {
                index,
                agent,
                n: self.n(),
            });
        }
        let mut x = initial.clone();
        let mut phi = Phi::start(self, &x);
        let mut snapshots = Vec::new();
        if record {
            snapshots.push(Snapshot {
                step: 0,
                mover: Mover::Initial,
                profile: x.clone(),
                potential: phi.value(self),
            });
        }
        let mut skipped = Vec::new();
        let mut steps = 0u64;
        for (k, &i) in schedule.iter().enumerate() {
            let y = self.best_response(&x, i);
            if y == x.get(i) {
                skipped.push(k);
                continue;
            }
            phi.apply(self, &x, i, y);
            x.set(i, y);
            steps += 1;
            if record {
                snapshots.push(Snapshot {
                    step: steps,
                    mover: Mover::Agent(i),
                    profile: x.clone(),
                    potential: phi.value(self),
                });
            }
        }
        let kind = if self.is_stable(&x) {
            OutcomeKind::Converged
        } else {
            OutcomeKind::StepLimit
        };
        Ok(ScheduledRun {
            outcome: UpdateOutcome {
                kind,
                final_profile: x,
                steps,
                cycle_period: None,
            },
            trajectory: record.then_some(Trajectory { snapshots }),
            skipped,
        })
    }
}

/// Running value of the potential, updated per move.
enum Phi {
    Scaled(i128),
    Real(f64),
}

impl Phi {
    fn start(game: &Game, x: &OpinionProfile) -> Self {
        let c = game.potential(x);
        match c.scaled {
            Some(s) => Phi::Scaled(s),
            None => Phi::Real(c.value),
        }
    }

    fn apply(&mut self, game: &Game, x: &OpinionProfile, i: usize, y: GridOpinion) {
        let before = game.local_potential(x, i, x.get(i));
        let after = game.local_potential(x, i, y);
        match (self, before, after) {
            (Phi::Scaled(p), LocalTerm::Scaled(a), LocalTerm::Scaled(b)) => *p += b - a,
            (Phi::Real(p), LocalTerm::Real(a), LocalTerm::Real(b)) => *p += b - a,
            _ => unreachable!("potential mode matches the game"),
        }
    }

    fn value(&self, game: &Game) -> f64 {
        match *self {
            Phi::Scaled(s) => game.unscale(s),
            Phi::Real(v) => v,
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::SocialGraph;
    use crate::model::ModelParams;

    fn pair_game(k: Option<u32>) -> Game {
        let g = SocialGraph::from_edges(2, [(0, 1, 10.0)]).unwrap();
        let grid = OpinionGrid::new(0.5, 0.5).unwrap();
        Game::new(
            g,
            grid,
            ModelParams {
                b: 1.0,
                weight_precision: k,
            },
        )
        .unwrap()
    }

    #[test]
    fn two_player_sync_cycle() {
        for k in [None, Some(0)] {
            let game = pair_game(k);
            let x0 = OpinionProfile::from_values(game.grid(), &[-1.0, 1.0]).unwrap();
            let run = game.sync_run(&x0, 100, true).unwrap();
            assert_eq!(run.outcome.kind, OutcomeKind::Cycle);
            assert_eq!(run.outcome.cycle_period, Some(2));
            let x1 = run.profile_at(1).unwrap();
            assert_eq!(x1.values(game.grid()), vec![1.0, -1.0]);
            assert_eq!(run.profile_at(37).unwrap(), x1);
            assert_eq!(run.profile_at(36).unwrap(), &x0);
        }
    }

    #[test]
    fn two_player_async_converges() {
        let game = pair_game(Some(0));
        let x0 = OpinionProfile::from_values(game.grid(), &[-1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = game
            .async_run(&x0, &mut rng, AsyncOptions::default())
            .unwrap();
        assert_eq!(run.outcome.kind, OutcomeKind::Converged);
        assert!(game.is_stable(&run.outcome.final_profile));
    }

    #[test]
    fn isolated_agent_without_media_keeps_opinion() {
        let grid = OpinionGrid::new(0.25, 0.5).unwrap();
        let game = Game::new(SocialGraph::empty(1), grid, ModelParams::new(0.0)).unwrap();
        let x = OpinionProfile::uniform(1, GridOpinion(3));
        assert_eq!(game.best_response(&x, 0), GridOpinion(3));
        assert!(game.is_stable(&x));
    }

    #[test]
    fn isolated_agent_follows_media() {
        let grid = OpinionGrid::new(0.25, 0.5).unwrap();
        let game = Game::new(SocialGraph::empty(1), grid, ModelParams::new(2.0)).unwrap();
        let x = OpinionProfile::uniform(1, GridOpinion(3));
        assert_eq!(game.best_response(&x, 0), GridOpinion(4));
        let x = OpinionProfile::uniform(1, GridOpinion(-2));
        assert_eq!(game.best_response(&x, 0), GridOpinion(0));
    }

    #[test]
    fn schedule_skips_and_rejects() {
        let game = pair_game(Some(0));
        let x0 = OpinionProfile::from_values(game.grid(), &[-1.0, 1.0]).unwrap();
        assert!(matches!(
            game.scheduled_run(&x0, &[0, 5], false),
            Err(Error::BadSchedule {
                index: 1,
                agent: 5,
                ..
            })
        ));
        let run = game.scheduled_run(&x0, &[0, 0, 1], true).unwrap();
        // Agent 0 jumps to 1, after which nobody can improve.
        assert_eq!(run.skipped, vec![1, 2]);
        assert_eq!(run.trajectory.unwrap().len(), 2);
        assert_eq!(run.outcome.kind, OutcomeKind::Converged);
    }

    #[test]
    fn trace_lines() {
        let game = pair_game(Some(0));
        let x0 = OpinionProfile::from_values(game.grid(), &[-1.0, 1.0]).unwrap();
        let run = game.scheduled_run(&x0, &[0], true).unwrap();
        let mut buf = Vec::new();
        run.trajectory
            .unwrap()
            .write_trace(game.grid(), &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "0,init,40,-1,1");
        // Agent 0 moves to μ = (−1 + 10)/11 ≈ 0.82 → 1, landing at Φ = 0.
        assert_eq!(lines[1], "1,0,0,1,1");
    }
}
