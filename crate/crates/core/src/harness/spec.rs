use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::InitScheme;
use crate::error::{Error, Result};

/// A parameter that is either fixed or drawn uniformly per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Draw {
    Fixed(f64),
    Uniform([f64; 2]),
}

impl Draw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Draw::Fixed(x) => x,
            Draw::Uniform([lo, hi]) => rng.gen_range(lo..=hi),
        }
    }

    fn check(&self, what: &str) -> Result<()> {
        match *self {
            Draw::Fixed(x) if !x.is_finite() => {
                Err(Error::Config(format!("{what} must be finite, got {x}")))
            }
            Draw::Uniform([lo, hi]) if !(lo.is_finite() && hi.is_finite() && lo <= hi) => Err(
                Error::Config(format!("{what} range [{lo}, {hi}] is not a valid interval")),
            ),
            _ => Ok(()),
        }
    }
}

impl From<f64> for Draw {
    fn from(x: f64) -> Self {
        Draw::Fixed(x)
    }
}

/// Network family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSpec {
    /// Complete blocks with exact per-agent influences `a_in`, `a_out`.
    SymmetricTwoBlock {
        n_per_block: usize,
        a_in: f64,
        a_out: f64,
    },
    /// Random blocks. With `target_h` set, `p_in` is derived as
    /// `h · N · p_out / (N − 1)` and must be omitted.
    StochasticTwoBlock {
        n_per_block: usize,
        #[serde(default)]
        p_in: Option<Draw>,
        p_out: Draw,
        #[serde(default)]
        target_h: Option<f64>,
    },
    ErdosRenyi {
        n: usize,
        p: Draw,
    },
    WattsStrogatz {
        n: usize,
        r: Draw,
        k: Draw,
    },
    Hyperbolic {
        n: usize,
        gamma: f64,
        temperature: f64,
        mean_degree: Draw,
    },
    /// Whitespace separated edge list read once per experiment.
    EdgeList {
        path: PathBuf,
    },
    /// Inline graph, mainly for small hand-made instances.
    Explicit {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
}

impl NetworkSpec {
    pub fn label(&self) -> &'static str {
        match self {
            NetworkSpec::SymmetricTwoBlock { .. } => "symmetric_two_block",
            NetworkSpec::StochasticTwoBlock { .. } => "stochastic_two_block",
            NetworkSpec::ErdosRenyi { .. } => "erdos_renyi",
            NetworkSpec::WattsStrogatz { .. } => "watts_strogatz",
            NetworkSpec::Hyperbolic { .. } => "hyperbolic",
            NetworkSpec::EdgeList { .. } => "edge_list",
            NetworkSpec::Explicit { .. } => "explicit",
        }
    }

    /// Whether the model comes with its own `L`/`R` split.
    pub fn has_blocks(&self) -> bool {
        matches!(
            self,
            NetworkSpec::SymmetricTwoBlock { .. } | NetworkSpec::StochasticTwoBlock { .. }
        )
    }

    pub fn default_partition(&self) -> PartitionMethod {
        match self {
            NetworkSpec::SymmetricTwoBlock { .. } | NetworkSpec::StochasticTwoBlock { .. } => {
                PartitionMethod::Blocks
            }
            NetworkSpec::EdgeList { .. } => PartitionMethod::Random,
            _ => PartitionMethod::KernighanLin,
        }
    }
}

/// How agents are split into `L` and `R` for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    /// The generator's own blocks (two-block models only).
    Blocks,
    KernighanLin,
    /// Each agent joins `L` with probability `p_L ~ U[0.4, 0.6]`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub delta: f64,
    #[serde(default = "half")]
    pub lambda: f64,
}

fn half() -> f64 {
    0.5
}

fn one() -> Draw {
    Draw::Fixed(1.0)
}

/// Edge weights by side: within-side edges get `w_in`, cross edges `w_out`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default = "one")]
    pub w_in: Draw,
    #[serde(default = "one")]
    pub w_out: Draw,
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec {
            w_in: one(),
            w_out: one(),
        }
    }
}

/// How the media weight `b` is chosen for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediaRule {
    Absolute {
        b: f64,
    },
    /// `b = b̃ · a_out*` of the realized network.
    Relative {
        b_tilde: f64,
    },
    /// `b̃ = multiple · τ₁(h)` for the realized `h`.
    Tau1Multiple {
        multiple: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum UpdateMode {
    Sync {
        #[serde(default = "default_sync_steps")]
        max_steps: usize,
    },
    Async {
        #[serde(default)]
        step_cap: Option<u64>,
    },
}

/// Synchronous round cap used when none is configured.
pub const DEFAULT_SYNC_STEPS: usize = 1000;

fn default_sync_steps() -> usize {
    DEFAULT_SYNC_STEPS
}

impl UpdateMode {
    pub fn label(&self) -> &'static str {
        match self {
            UpdateMode::Sync { .. } => "sync",
            UpdateMode::Async { .. } => "async",
        }
    }
}

impl Default for UpdateMode {
    fn default() -> Self {
        UpdateMode::Sync {
            max_steps: DEFAULT_SYNC_STEPS,
        }
    }
}

/// The parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    BTilde,
    B,
    Tau1Multiple,
    WIn,
    WOut,
    AIn,
    AOut,
    Delta,
    /// Fixed-mean initial opinions with `|mean| = value`.
    InitMean,
    /// Fixed-mean initial opinions with `|mean| = value · δ`.
    InitMeanDeltas,
    PIn,
    POut,
    TargetH,
}

/// Axis and its points. `values` and `range = [start, stop, step]` may be
/// combined; range points come first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub range: Option<[f64; 3]>,
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        if let Some([start, stop, step]) = self.range {
            if !(step > 0.0 && start.is_finite() && stop.is_finite()) {
                return Err(Error::Config(format!(
                    "sweep range needs finite ends and a positive step, got [{start}, {stop}, {step}]"
                )));
            }
            // Index-based so that float drift never adds or drops a point.
            let count = ((stop - start) / step + 1e-9).floor();
            if count >= 0.0 {
                for i in 0..=count as u64 {
                    out.push(start + i as f64 * step);
                }
            }
        }
        out.extend_from_slice(&self.values);
        Ok(out)
    }
}

/// One Monte-Carlo experiment: everything needed to run its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    pub network: NetworkSpec,
    pub grid: GridSpec,
    /// Not allowed for the symmetric two-block model, which fixes its own
    /// weights. When absent, the graph keeps its own weights (1 for the
    /// generated families, as given for edge lists and inline graphs).
    #[serde(default)]
    pub weights: Option<WeightSpec>,
    pub media: MediaRule,
    pub init: InitScheme,
    #[serde(default)]
    pub update: UpdateMode,
    /// `n_p`.
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the model's blocks, Kernighan–Lin for synthetic graphs
    /// and a random split for edge lists.
    #[serde(default)]
    pub partition: Option<PartitionMethod>,
    /// Enables exact arithmetic with weights that are multiples of `10^-k`.
    #[serde(default)]
    pub weight_precision: Option<u32>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentSpec {
    pub fn partition_method(&self) -> PartitionMethod {
        self.partition
            .unwrap_or_else(|| self.network.default_partition())
    }

    /// Checks domains that do not depend on random draws.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config(format!(
                "experiment `{}` needs trials >= 1",
                self.id
            )));
        }
        if self.partition_method() == PartitionMethod::Blocks && !self.network.has_blocks() {
            return Err(Error::Config(format!(
                "experiment `{}`: the {} model has no intrinsic blocks",
                self.id,
                self.network.label()
            )));
        }
        match &self.network {
            NetworkSpec::SymmetricTwoBlock { .. } if self.weights.is_some() => {
                return Err(Error::Config(format!(
                    "experiment `{}`: the symmetric two-block model takes a_in and a_out, not weights",
                    self.id
                )));
            }
            NetworkSpec::StochasticTwoBlock {
                p_in,
                p_out,
                target_h,
                ..
            } => {
                p_out.check("p_out")?;
                match (p_in, target_h) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(format!(
                            "experiment `{}`: give either p_in or target_h, not both",
                            self.id
                        )))
                    }
                    (None, None) => {
                        return Err(Error::Config(format!(
                            "experiment `{}`: stochastic two-block needs p_in or target_h",
                            self.id
                        )))
                    }
                    (Some(p), None) => p.check("p_in")?,
                    (None, Some(_)) => {}
                }
            }
            NetworkSpec::ErdosRenyi { p, .. } => p.check("p")?,
            NetworkSpec::WattsStrogatz { r, k, .. } => {
                r.check("r")?;
                k.check("k")?;
            }
            NetworkSpec::Hyperbolic { mean_degree, .. } => mean_degree.check("mean_degree")?,
            _ => {}
        }
        if let Some(w) = &self.weights {
            w.w_in.check("w_in")?;
            w.w_out.check("w_out")?;
        }
        Ok(())
    }

    /// A copy with the sweep parameter set to `value`.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<ExperimentSpec> {
        let mut s = self.clone();
        s.sweep = None;
        let bad = |what: &str| {
            Err(Error::Config(format!(
                "experiment `{}`: axis {axis:?} does not apply to {what}",
                self.id
            )))
        };
        match axis {
            SweepAxis::BTilde => s.media = MediaRule::Relative { b_tilde: value },
            SweepAxis::B => s.media = MediaRule::Absolute { b: value },
            SweepAxis::Tau1Multiple => s.media = MediaRule::Tau1Multiple { multiple: value },
            SweepAxis::WIn | SweepAxis::WOut => {
                if matches!(s.network, NetworkSpec::SymmetricTwoBlock { .. }) {
                    return bad("the symmetric two-block model");
                }
                let w = s.weights.get_or_insert_with(WeightSpec::default);
                if axis == SweepAxis::WIn {
                    w.w_in = Draw::Fixed(value);
                } else {
                    w.w_out = Draw::Fixed(value);
                }
            }
            SweepAxis::AIn | SweepAxis::AOut => match &mut s.network {
                NetworkSpec::SymmetricTwoBlock { a_in, a_out, .. } => {
                    if axis == SweepAxis::AIn {
                        *a_in = value;
                    } else {
                        *a_out = value;
                    }
                }
                other => return bad(other.label()),
            },
            SweepAxis::Delta => s.grid.delta = value,
            SweepAxis::InitMean => s.init = InitScheme::FixedMean { mean: value },
            SweepAxis::InitMeanDeltas => {
                s.init = InitScheme::FixedMean {
                    mean: value * s.grid.delta,
                }
            }
            SweepAxis::PIn | SweepAxis::POut | SweepAxis::TargetH => match &mut s.network {
                NetworkSpec::StochasticTwoBlock {
                    p_in,
                    p_out,
                    target_h,
                    ..
                } => match axis {
                    SweepAxis::PIn => {
                        *p_in = Some(Draw::Fixed(value));
                        *target_h = None;
                    }
                    SweepAxis::POut => *p_out = Draw::Fixed(value),
                    _ => {
                        *target_h = Some(value);
                        *p_in = None;
                    }
                },
                other => return bad(other.label()),
            },
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> std::result::Result<ExperimentSpec, toml::de::Error> {
        toml::from_str(text)
    }

    const BASE: &str = r#"
        id = "t"
        trials = 10
        grid = { delta = 0.25 }
        network = { model = "stochastic_two_block", n_per_block = 10, p_out = 0.2, target_h = 2.0 }
        media = { rule = "relative", b_tilde = 1.0 }
        init = { scheme = "extreme_divergent" }
    "#;

    #[test]
    fn parses_with_defaults() {
        let s = parse(BASE).unwrap();
        assert_eq!(s.grid.lambda, 0.5);
        assert_eq!(s.update, UpdateMode::Sync { max_steps: 1000 });
        assert_eq!(s.partition_method(), PartitionMethod::Blocks);
        s.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(&format!("{BASE}\nbogus = 1\n")).is_err());
        let bad_network = BASE.replace("target_h = 2.0", "target_h = 2.0, colour = 1");
        assert!(parse(&bad_network).is_err());
        let bad_grid = BASE.replace("delta = 0.25", "delta = 0.25, step = 1");
        assert!(parse(&bad_grid).is_err());
    }

    #[test]
    fn draws_parse_as_number_or_pair() {
        let s = parse(&BASE.replace("p_out = 0.2", "p_out = [0.1, 0.3]")).unwrap();
        match s.network {
            NetworkSpec::StochasticTwoBlock { p_out, .. } => {
                assert_eq!(p_out, Draw::Uniform([0.1, 0.3]))
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn validation_catches_inconsistent_specs() {
        let both = parse(&BASE.replace("target_h = 2.0", "target_h = 2.0, p_in = 0.5")).unwrap();
        assert!(both.validate().is_err());
        let mut s = parse(BASE).unwrap();
        s.trials = 0;
        assert!(s.validate().is_err());
        let mut s = parse(BASE).unwrap();
        s.network = NetworkSpec::ErdosRenyi {
            n: 10,
            p: Draw::Fixed(0.5),
        };
        s.partition = Some(PartitionMethod::Blocks);
        assert!(s.validate().is_err());
    }

    #[test]
    fn sweep_points() {
        let sweep = SweepSpec {
            axis: SweepAxis::BTilde,
            values: vec![20.0],
            range: Some([0.5, 10.5, 1.0]),
        };
        let pts = sweep.points().unwrap();
        assert_eq!(pts.len(), 12);
        assert_eq!(pts[10], 10.5);
        assert_eq!(pts[11], 20.0);
        let empty = SweepSpec {
            axis: SweepAxis::B,
            values: vec![],
            range: None,
        };
        assert!(empty.points().unwrap().is_empty());
    }

    #[test]
    fn axes_rewrite_the_spec() {
        let s = parse(BASE).unwrap();
        let t = s.with_axis(SweepAxis::InitMeanDeltas, 2.0).unwrap();
        assert_eq!(t.init, InitScheme::FixedMean { mean: 0.5 });
        let t = s.with_axis(SweepAxis::PIn, 0.4).unwrap();
        assert!(matches!(
            t.network,
            NetworkSpec::StochasticTwoBlock {
                p_in: Some(Draw::Fixed(_)),
                target_h: None,
                ..
            }
        ));
        assert!(s.with_axis(SweepAxis::AIn, 1.0).is_err());
        assert_eq!(
            s.with_axis(SweepAxis::Tau1Multiple, 1.5).unwrap().media,
            MediaRule::Tau1Multiple { multiple: 1.5 }
        );
    }
}
