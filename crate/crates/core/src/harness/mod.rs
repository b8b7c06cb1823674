//! Monte-Carlo experiments: initial-opinion schemes, relaxed consensus,
//! seeded trials, consensus-probability estimates and CSV sweeps.

mod init;
mod spec;
mod sweep;

pub use init::{relaxed_consensus, sample_initial_opinions, InitScheme, RelaxedConsensus};
pub use spec::{
    Draw, ExperimentSpec, GridSpec, MediaRule, NetworkSpec, PartitionMethod, SweepAxis, SweepSpec,
    UpdateMode, WeightSpec, DEFAULT_SYNC_STEPS,
};
pub use sweep::{run_point, sweep, write_csv, SweepRow, CSV_HEADER};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{AsyncOptions, OutcomeKind};
use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::graphgen::{self, HyperbolicParams, Partition};
use crate::grid::OpinionGrid;
use crate::model::{Game, ModelParams};
use crate::theory;

/// Seed of trial `trial_index`: SplitMix64 applied to
/// `base_seed + (trial_index + 1) · 0x9E3779B97F4A7C15` (wrapping).
/// It depends only on the two inputs, so records never depend on the order
/// in which trials execute.
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    let mut z = base_seed.wrapping_add(
        trial_index
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    /// `a_in* / a_out*` of the realized network, if it has cross weight.
    pub h: Option<f64>,
    /// Realized within and cross edge weights.
    pub w_in: f64,
    pub w_out: f64,
    pub b: f64,
    /// `b / a_out*`, or the configured target when `a_out* = 0`.
    pub b_tilde: f64,
    pub outcome: OutcomeKind,
    pub steps: u64,
    /// Relaxed consensus of the final profile.
    pub consensus: bool,
    /// The common projection, present exactly when `consensus` holds.
    pub consensus_value: Option<f64>,
    pub mean_left: f64,
    pub mean_right: f64,
    pub variance_left: f64,
    pub variance_right: f64,
    pub variance: f64,
}

/// Estimated consensus probability with the two-sigma half width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsensusEstimate {
    pub m: usize,
    pub n_p: usize,
    pub p_c: f64,
    pub ci_half_width: f64,
}

/// `p_c = m / n_p` and `2 √(p_c (1 − p_c) / n_p)`.
pub fn consensus_estimate(m: usize, n_p: usize) -> Result<ConsensusEstimate> {
    if n_p == 0 || m > n_p {
        return Err(Error::InvalidParams(format!(
            "need 0 <= m <= n_p and n_p >= 1, got m = {m}, n_p = {n_p}"
        )));
    }
    let p_c = m as f64 / n_p as f64;
    let ci_half_width = 2.0 * (p_c * (1.0 - p_c) / n_p as f64).sqrt();
    Ok(ConsensusEstimate {
        m,
        n_p,
        p_c,
        ci_half_width,
    })
}

/// [`consensus_estimate`] over the consensus flags of `records`.
pub fn estimate_consensus_probability(records: &[RunRecord]) -> Result<ConsensusEstimate> {
    let m = records.iter().filter(|r| r.consensus).count();
    consensus_estimate(m, records.len())
}

/// A validated experiment with any file-backed graph loaded once.
#[derive(Debug, Clone)]
pub struct Experiment {
    spec: ExperimentSpec,
    grid: OpinionGrid,
    fixed_graph: Option<SocialGraph>,
}

impl Experiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let grid = OpinionGrid::new(spec.grid.delta, spec.grid.lambda)?;
        let fixed_graph = match &spec.network {
            NetworkSpec::EdgeList { path } => Some(graphgen::load_edge_list(path)?.graph),
            NetworkSpec::Explicit { n, edges } => {
                Some(SocialGraph::from_edges(*n, edges.iter().copied())?)
            }
            _ => None,
        };
        if let (Some(g), InitScheme::Explicit { values }) = (&fixed_graph, &spec.init) {
            if values.len() != g.node_count() {
                return Err(Error::Config(format!(
                    "experiment `{}`: {} explicit opinions for {} agents",
                    spec.id,
                    values.len(),
                    g.node_count()
                )));
            }
        }
        Ok(Experiment {
            spec,
            grid,
            fixed_graph,
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn grid(&self) -> &OpinionGrid {
        &self.grid
    }

    /// Builds the network, partition, weights, media weight and initial
    /// profile of trial `trial_index`, without running the dynamics.
    pub fn prepare_trial(&self, trial_index: u64) -> Result<PreparedTrial> {
        let spec = &self.spec;
        let seed = trial_seed(spec.seed, trial_index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (topology, blocks) = self.generate(&mut rng)?;
        let n = topology.node_count();
        if n < 2 {
            return Err(Error::InvalidGraph(format!(
                "experiment `{}` needs at least two agents",
                spec.id
            )));
        }
        let partition = match spec.partition_method() {
            PartitionMethod::Blocks => blocks.expect("validated: model has blocks"),
            PartitionMethod::KernighanLin => graphgen::kernighan_lin(&topology),
            PartitionMethod::Random => graphgen::random_partition(n, &mut rng),
        };
        let (graph, w_in, w_out) = match &spec.network {
            NetworkSpec::SymmetricTwoBlock {
                n_per_block,
                a_in,
                a_out,
            } => (
                topology,
                a_in / (*n_per_block - 1) as f64,
                a_out / *n_per_block as f64,
            ),
            _ => match spec.weights {
                Some(w) => {
                    let (w_in, w_out) = (w.w_in.sample(&mut rng), w.w_out.sample(&mut rng));
                    (
                        graphgen::assign_weights(&topology, &partition, w_in, w_out)?,
                        w_in,
                        w_out,
                    )
                }
                None => {
                    let (w_in, w_out) = mean_side_weights(&topology, &partition);
                    (topology, w_in, w_out)
                }
            },
        };
        let mut report = graphgen::homophily(&graph, &partition)?;
        // The symmetric model's cumulative influences are known exactly.
        if let NetworkSpec::SymmetricTwoBlock { a_in, a_out, .. } = spec.network {
            report.a_in_star = a_in;
            report.a_out_star = a_out;
            report.h = Some(a_in / a_out);
        }
        let a_out = report.a_out_star;
        let (b, b_tilde) = match spec.media {
            MediaRule::Absolute { b } => (b, if a_out > 0.0 { b / a_out } else { f64::NAN }),
            MediaRule::Relative { b_tilde } => (b_tilde * a_out, b_tilde),
            MediaRule::Tau1Multiple { multiple } => {
                let h = report.h.ok_or_else(|| {
                    Error::Domain("tau1 multiple needs cross-side weight (h undefined)".into())
                })?;
                let t1 = theory::to_f64(&theory::tau1(&theory::rational(h)?, &self.grid)?);
                let b_tilde = multiple * t1;
                (b_tilde * a_out, b_tilde)
            }
        };
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!(
                "media weight b = {b} is negative or undefined (b~ = {b_tilde})"
            )));
        }
        let params = ModelParams {
            b,
            weight_precision: spec.weight_precision,
        };
        let game = Game::new(graph, self.grid, params)?;
        let initial = sample_initial_opinions(&spec.init, &partition, &self.grid, &mut rng)?;
        Ok(PreparedTrial {
            trial: trial_index,
            seed,
            game,
            partition,
            initial,
            h: report.h,
            w_in,
            w_out,
            b_tilde,
            rng,
        })
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<(SocialGraph, Option<Partition>)> {
        if let Some(g) = &self.fixed_graph {
            return Ok((g.clone(), None));
        }
        Ok(match &self.spec.network {
            NetworkSpec::SymmetricTwoBlock {
                n_per_block,
                a_in,
                a_out,
            } => {
                let (g, p) = graphgen::symmetric_two_block(*n_per_block, *a_in, *a_out)?;
                (g, Some(p))
            }
            NetworkSpec::StochasticTwoBlock {
                n_per_block,
                p_in,
                p_out,
                target_h,
            } => {
                let p_out = p_out.sample(rng);
                let p_in = match (p_in, target_h) {
                    (Some(p), _) => p.sample(rng),
                    (None, Some(h)) => {
                        let n = *n_per_block as f64;
                        if *n_per_block < 2 {
                            return Err(Error::InvalidParams(
                                "target_h needs at least 2 agents per block".into(),
                            ));
                        }
                        h * n * p_out / (n - 1.0)
                    }
                    (None, None) => unreachable!("validated"),
                };
                let (g, p) = graphgen::stochastic_two_block(*n_per_block, p_in, p_out, rng)?;
                (g, Some(p))
            }
            NetworkSpec::ErdosRenyi { n, p } => {
                let p = p.sample(rng);
                (graphgen::erdos_renyi(*n, p, rng)?, None)
            }
            NetworkSpec::WattsStrogatz { n, r, k } => {
                let r = r.sample(rng).round().max(0.0) as usize;
                let k = k.sample(rng).round().max(0.0) as usize;
                (graphgen::watts_strogatz_like(*n, r, k, rng)?, None)
            }
            NetworkSpec::Hyperbolic {
                n,
                gamma,
                temperature,
                mean_degree,
            } => {
                let params = HyperbolicParams {
                    gamma: *gamma,
                    temperature: *temperature,
                    mean_degree: mean_degree.sample(rng),
                };
                (graphgen::hyperbolic_rgg(*n, params, rng)?, None)
            }
            NetworkSpec::EdgeList { .. } | NetworkSpec::Explicit { .. } => {
                unreachable!("file and inline graphs are loaded up front")
            }
        })
    }

    /// Runs trial `trial_index` end to end.
    pub fn run_trial(&self, trial_index: u64) -> Result<RunRecord> {
        self.prepare_trial(trial_index)?.run(&self.spec.update)
    }

    /// Runs trials `0..n_p` in parallel; the result is in trial order.
    pub fn run_all(&self) -> Result<Vec<RunRecord>> {
        (0..self.spec.trials as u64)
            .into_par_iter()
            .map(|t| self.run_trial(t))
            .collect()
    }
}

/// Mean weight of within-side and of cross-side edges (`NaN` when absent).
fn mean_side_weights(graph: &SocialGraph, partition: &Partition) -> (f64, f64) {
    let (mut sum, mut count) = ([0.0; 2], [0usize; 2]);
    for e in graph.edges() {
        let k = usize::from(!partition.same_side(e.u, e.v));
        sum[k] += e.w;
        count[k] += 1;
    }
    (sum[0] / count[0] as f64, sum[1] / count[1] as f64)
}

/// Everything drawn for one trial, ready to run.
#[derive(Debug, Clone)]
pub struct PreparedTrial {
    pub trial: u64,
    pub seed: u64,
    pub game: Game,
    pub partition: Partition,
    pub initial: crate::model::OpinionProfile,
    pub h: Option<f64>,
    pub w_in: f64,
    pub w_out: f64,
    pub b_tilde: f64,
    /// Continues the trial's random stream (used by asynchronous runs).
    pub rng: ChaCha8Rng,
}

impl PreparedTrial {
    pub fn run(mut self, update: &UpdateMode) -> Result<RunRecord> {
        let outcome = match *update {
            UpdateMode::Sync { max_steps } => {
                self.game.sync_run(&self.initial, max_steps, false)?.outcome
            }
            UpdateMode::Async { step_cap } => {
                let run = self.game.async_run(
                    &self.initial,
                    &mut self.rng,
                    AsyncOptions {
                        step_cap,
                        record: false,
                    },
                )?;
                if run.outcome.kind == OutcomeKind::StepLimit {
                    log::warn!(
                        "asynchronous trial {} hit the step cap {} without converging",
                        self.trial,
                        run.step_cap
                    );
                }
                run.outcome
            }
        };
        let grid = *self.game.grid();
        let rc = relaxed_consensus(&outcome.final_profile, &self.partition, &grid)?;
        Ok(RunRecord {
            trial: self.trial,
            seed: self.seed,
            n: self.game.n(),
            h: self.h,
            w_in: self.w_in,
            w_out: self.w_out,
            b: self.game.params().b,
            b_tilde: self.b_tilde,
            outcome: outcome.kind,
            steps: outcome.steps,
            consensus: rc.consensus,
            consensus_value: rc.consensus.then(|| rc.projected_left.value(&grid)),
            mean_left: rc.mean_left,
            mean_right: rc.mean_right,
            variance_left: rc.variance_left,
            variance_right: rc.variance_right,
            variance: rc.variance,
        })
    }
}

/// Convenience wrapper: validates `spec` and runs one trial.
pub fn run_trial(spec: &ExperimentSpec, trial_index: u64) -> Result<RunRecord> {
    Experiment::new(spec.clone())?.run_trial(trial_index)
}
