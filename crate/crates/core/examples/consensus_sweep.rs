//! Consensus probability as the relative media weight grows, on a small
//! symmetric two-block network, written as CSV to stdout.

use discrete_opinion::harness::{
    sweep, write_csv, ExperimentSpec, GridSpec, InitScheme, MediaRule, NetworkSpec, SweepAxis,
    SweepSpec, UpdateMode,
};

fn main() -> discrete_opinion::Result<()> {
    let spec = ExperimentSpec {
        id: "example".into(),
        network: NetworkSpec::SymmetricTwoBlock {
            n_per_block: 10,
            a_in: 2.0,
            a_out: 1.0,
        },
        grid: GridSpec {
            delta: 0.25,
            lambda: 0.5,
        },
        weights: None,
        media: MediaRule::Relative { b_tilde: 1.0 },
        init: InitScheme::GeneralDivergent,
        update: UpdateMode::default(),
        trials: 200,
        seed: 1,
        partition: None,
        weight_precision: None,
        sweep: None,
    };
    spec.validate()?;
    let axis = SweepSpec {
        axis: SweepAxis::BTilde,
        values: vec![0.5, 1.5, 2.5, 3.5, 4.5, 6.0],
        range: None,
    };
    let rows = sweep(&spec, &axis)?;
    write_csv(&rows, std::io::stdout().lock())
}
