//! Config files, bundled presets and the logic behind each subcommand of
//! the `opinion` binary. The binary itself only parses arguments.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{AsyncOptions, Trajectory, UpdateOutcome};
use crate::error::{Error, Result};
use crate::gadget::{exponential_schedule, gadget_chain, verify_schedule};
use crate::graph::SocialGraph;
use crate::graphgen::{self, HomophilyReport, LoadedGraph, Partition, Side};
use crate::grid::OpinionGrid;
use crate::harness::{
    relaxed_consensus, run_point, sweep, Experiment, ExperimentSpec, NetworkSpec, RelaxedConsensus,
    SweepRow, UpdateMode,
};
use crate::theory::{self, Rational};

/// A config file: one or more `[[experiment]]` tables.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Vec<ExperimentSpec>,
}

impl Config {
    pub fn parse(text: &str, source: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::Config(format!("{source}: {e}")))?;
        if cfg.experiment.is_empty() {
            return Err(Error::Config(format!("{source}: no [[experiment]] tables")));
        }
        for spec in &cfg.experiment {
            spec.validate()?;
        }
        Ok(cfg)
    }

    /// Reads a config file. Relative edge-list paths are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Config::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        for spec in &mut cfg.experiment {
            if let NetworkSpec::EdgeList { path: p } = &mut spec.network {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// A bundled preset by name; see [`PRESETS`].
    pub fn preset(name: &str) -> Result<Config> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Error::Config(format!(
                    "unknown preset `{name}`; known: {}",
                    names.join(", ")
                ))
            })?;
        Config::parse(text, &format!("preset {name}"))
    }

    /// Replaces every experiment's base seed.
    pub fn override_seed(&mut self, seed: u64) {
        for spec in &mut self.experiment {
            spec.seed = seed;
        }
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name, ".toml")))),*]
    };
}

/// Bundled configs. Names ending in `-desk` are reduced versions that run
/// in seconds to minutes; the others use the full published parameters.
pub const PRESETS: &[(&str, &str)] = presets![
    "prop1",
    "async-example",
    "fig1",
    "fig1-desk",
    "fig2",
    "fig2-desk",
    "fig3",
    "fig3-desk",
    "fig4",
    "fig4-desk",
    "fig5",
    "fig5-desk",
    "fig6",
    "fig6-desk",
    "fig-loss",
    "fig-loss-desk",
];

/// Result of `simulate`: one recorded trial.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub experiment_id: String,
    pub grid: OpinionGrid,
    pub update: &'static str,
    pub outcome: UpdateOutcome,
    pub trajectory: Trajectory,
    pub final_potential: f64,
    pub consensus: RelaxedConsensus,
    pub h: Option<f64>,
    pub b: f64,
}

impl fmt::Display for SimulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.outcome;
        writeln!(
            f,
            "experiment: {} ({} dynamics)",
            self.experiment_id, self.update
        )?;
        writeln!(
            f,
            "agents: {}, b = {}, h = {}",
            o.final_profile.len(),
            self.b,
            fmt_opt(self.h)
        )?;
        match o.cycle_period {
            Some(p) => writeln!(f, "outcome: {} (period {p})", o.kind)?,
            None => writeln!(f, "outcome: {}", o.kind)?,
        }
        writeln!(f, "steps: {}", o.steps)?;
        writeln!(f, "final potential: {}", self.final_potential)?;
        let c = &self.consensus;
        writeln!(f, "mean L: {}, mean R: {}", c.mean_left, c.mean_right)?;
        write!(
            f,
            "relaxed consensus: {}",
            if c.consensus {
                format!("yes, at {}", c.projected_left.value(&self.grid))
            } else {
                "no".to_string()
            }
        )
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| v.to_string())
}

/// Runs trial 0 of `spec` with the trajectory recorded.
pub fn simulate(spec: &ExperimentSpec) -> Result<SimulationReport> {
    let exp = Experiment::new(spec.clone())?;
    let mut trial = exp.prepare_trial(0)?;
    let game = &trial.game;
    let (outcome, trajectory) = match spec.update {
        UpdateMode::Sync { max_steps } => {
            let run = game.sync_run(&trial.initial, max_steps, true)?;
            (run.outcome, run.trajectory)
        }
        UpdateMode::Async { step_cap } => {
            let run = game.async_run(
                &trial.initial,
                &mut trial.rng,
                AsyncOptions {
                    step_cap,
                    record: true,
                },
            )?;
            (run.outcome, run.trajectory)
        }
    };
    let grid = *game.grid();
    let consensus = relaxed_consensus(&outcome.final_profile, &trial.partition, &grid)?;
    Ok(SimulationReport {
        experiment_id: spec.id.clone(),
        grid,
        update: spec.update.label(),
        final_potential: game.potential(&outcome.final_profile).value,
        trajectory: trajectory.expect("recording was requested"),
        outcome,
        consensus,
        h: trial.h,
        b: game.params().b,
    })
}

/// Sweeps every experiment of `config` (an experiment without a sweep
/// contributes a single row) and returns the rows in config order.
pub fn sweep_config(config: &Config) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for spec in &config.experiment {
        match &spec.sweep {
            Some(axis) => rows.extend(sweep(spec, axis)?),
            None => rows.push(run_point(spec)?),
        }
        log::info!("experiment `{}` done", spec.id);
    }
    Ok(rows)
}

/// Arguments of the `theory` subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryQuery {
    pub h: f64,
    pub delta: f64,
    pub lambda: f64,
    /// `(x_L, x_R, b̃)`, when a regime should be classified.
    pub instance: Option<(f64, f64, f64)>,
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        format!("{q} ({:.6})", theory::to_f64(q))
    }
}

/// The threshold table at `h`, the four relations, and optionally the
/// regime of a two-block instance.
pub fn theory_report(q: &TheoryQuery) -> Result<String> {
    let grid = OpinionGrid::new(q.delta, q.lambda)?;
    let h = theory::rational(q.h)?;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "grid: {grid}");
    let _ = writeln!(w, "h = {}", fmt_q(&h));
    match theory::thresholds(&h, &grid) {
        Ok(t) => {
            for (name, v) in [
                ("tau1", &t.tau1),
                ("tau2", &t.tau2),
                ("tau3", &t.tau3),
                ("tau4", &t.tau4),
                ("tau5", &t.tau5),
                ("tau*", &t.tau_star),
            ] {
                let _ = writeln!(w, "{name} = {}", fmt_q(v));
            }
            let r = theory::check_relations(&h, &grid)?;
            let _ = writeln!(
                w,
                "relations: tau1 > tau4 => h < 2/delta + 1/(1 - lambda): {}; \
                 h > 2/delta => tau2 < tau4: {}; tau3 < tau5: {}; tau4 > 0 => tau5 < 0: {}",
                r.tau1_above_tau4, r.tau2_below_tau4, r.tau3_below_tau5, r.tau5_negative
            );
            let _ = writeln!(
                w,
                "interval (max(tau2, tau3, tau4), tau1] empty when h >= 2/delta + 1/(1 - lambda): {}",
                theory::interval_emptiness(&h, &grid)?
            );
        }
        Err(e) => {
            let _ = writeln!(w, "tau1 = undefined ({e})");
            for (name, v) in [
                ("tau2", theory::tau2(&h, &grid)),
                ("tau3", theory::tau3(&h, &grid)),
                ("tau4", theory::tau4(&h, &grid)),
                ("tau5", theory::tau5(&h, &grid)),
            ] {
                let _ = writeln!(w, "{name} = {}", fmt_q(&v));
            }
        }
    }
    let _ = writeln!(
        w,
        "high-homophily threshold 2/delta + 1/(1 - lambda) = {}",
        fmt_q(&theory::high_homophily_threshold(&grid))
    );
    if let Some((x_l, x_r, b_tilde)) = q.instance {
        let x_l = grid.opinion(x_l)?;
        let x_r = grid.opinion(x_r)?;
        let params = theory::TwoBlockParams::from_ratios(h, theory::rational(b_tilde)?)?;
        let regime = theory::classify(x_l, x_r, &params, &grid)?;
        let _ = writeln!(w, "regime: {} ({})", regime.kind, regime.applied_case);
        let _ = writeln!(w, "b~ interval of this case: {}", regime.bounds);
    }
    Ok(out)
}

/// Result of `gadget`.
#[derive(Debug, Clone)]
pub struct GadgetSummary {
    pub n: usize,
    pub moves: usize,
    pub expected_moves: u64,
    /// `Err` holds the verification failure.
    pub verified: std::result::Result<(), String>,
}

impl GadgetSummary {
    pub fn passed(&self) -> bool {
        self.verified.is_ok() && self.moves as u64 == self.expected_moves
    }
}

impl fmt::Display for GadgetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gadgets: {}", self.n)?;
        writeln!(
            f,
            "scripted moves: {} (expected {})",
            self.moves, self.expected_moves
        )?;
        writeln!(f, "lower bound 2^(n-1): {}", 1u64 << (self.n - 1))?;
        match &self.verified {
            Ok(()) if self.passed() => write!(f, "verification: pass"),
            Ok(()) => write!(f, "verification: fail (move count)"),
            Err(e) => write!(f, "verification: fail ({e})"),
        }
    }
}

/// Builds the `n`-gadget chain, its schedule, and replays it.
pub fn gadget_check(n: usize, eps_ratio: f64, eps_prime_fraction: f64) -> Result<GadgetSummary> {
    if !(1..=20).contains(&n) {
        return Err(Error::InvalidParams(format!(
            "gadget count must lie in 1..=20, got {n}"
        )));
    }
    let chain = gadget_chain(n, eps_ratio, eps_prime_fraction)?;
    let schedule = exponential_schedule(&chain);
    let verified = match verify_schedule(&chain, &schedule, false) {
        Ok(_) => Ok(()),
        Err(e @ Error::Verification { .. }) => Err(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(GadgetSummary {
        n,
        moves: schedule.len(),
        expected_moves: crate::gadget::schedule_length(n as u32),
        verified,
    })
}

/// Result of `partition`.
#[derive(Debug, Clone)]
pub struct PartitionOutput {
    pub loaded: LoadedGraph,
    pub partition: Partition,
    pub cut_weight: f64,
    pub homophily: HomophilyReport,
}

impl PartitionOutput {
    /// One `id side` line per node, with original ids.
    pub fn write_sides<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, id) in self.loaded.ids.iter().enumerate() {
            let side = match self.partition.side(i) {
                Side::L => "L",
                Side::R => "R",
            };
            writeln!(out, "{id} {side}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PartitionOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.loaded.graph;
        let r = &self.homophily;
        writeln!(f, "nodes: {}, edges: {}", g.node_count(), g.edge_count())?;
        writeln!(
            f,
            "sides: |L| = {}, |R| = {}",
            self.partition.count(Side::L),
            self.partition.count(Side::R)
        )?;
        writeln!(f, "cut weight: {}", self.cut_weight)?;
        writeln!(f, "a_in* = {}, a_out* = {}", r.a_in_star, r.a_out_star)?;
        write!(f, "h = {}", fmt_opt(r.h))
    }
}

/// Kernighan–Lin bipartition of an edge-list file with its homophily.
pub fn partition_file(path: &Path) -> Result<PartitionOutput> {
    let loaded = graphgen::load_edge_list(path)?;
    if loaded.graph.node_count() < 2 {
        return Err(Error::InvalidGraph(format!(
            "{}: need at least two nodes to partition",
            path.display()
        )));
    }
    let partition = graphgen::kernighan_lin(&loaded.graph);
    let cut_weight = graphgen::cut_weight(&loaded.graph, &partition);
    let homophily = graphgen::homophily(&loaded.graph, &partition)?;
    Ok(PartitionOutput {
        loaded,
        partition,
        cut_weight,
        homophily,
    })
}

/// The weighted network of trial 0 of `spec`, with its partition.
pub fn generate(spec: &ExperimentSpec) -> Result<(SocialGraph, Partition, Option<f64>)> {
    let trial = Experiment::new(spec.clone())?.prepare_trial(0)?;
    Ok((trial.game.graph().clone(), trial.partition, trial.h))
}

/// Opens `path` for writing, or returns stdout when `path` is `None`.
pub fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).map_err(|e| Error::io(p, e))?,
            ))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}
