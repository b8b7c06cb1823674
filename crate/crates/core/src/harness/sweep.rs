use std::io::Write;

use serde::Serialize;

use super::{estimate_consensus_probability, Experiment, ExperimentSpec, SweepSpec};
use crate::error::Result;

/// Column order of sweep CSV files.
pub const CSV_HEADER: [&str; 18] = [
    "experiment_id",
    "network_model",
    "n",
    "delta",
    "lambda",
    "w_in",
    "w_out",
    "b",
    "b_tilde",
    "h",
    "init_scheme",
    "update_mode",
    "n_p",
    "m_consensus",
    "p_c",
    "ci_half_width",
    "mean_steps",
    "mean_final_variance",
];

/// One aggregated sweep point. Realized quantities (`w_in`, `w_out`, `b`,
/// `b_tilde`, `h`) are means over the trials; `h` is empty when no trial
/// had cross-side weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub experiment_id: String,
    pub network_model: String,
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    pub w_in: f64,
    pub w_out: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub h: Option<f64>,
    pub init_scheme: String,
    pub update_mode: String,
    pub n_p: usize,
    pub m_consensus: usize,
    pub p_c: f64,
    pub ci_half_width: f64,
    pub mean_steps: f64,
    pub mean_final_variance: f64,
}

/// Arithmetic mean; a constant sequence returns its value exactly.
fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    match values.first() {
        Some(&first) if values.iter().all(|&v| v == first) => first,
        _ => values.iter().sum::<f64>() / values.len() as f64,
    }
}

/// Runs all trials of `spec` and aggregates them into one row.
pub fn run_point(spec: &ExperimentSpec) -> Result<SweepRow> {
    let exp = Experiment::new(spec.clone())?;
    let records = exp.run_all()?;
    let est = estimate_consensus_probability(&records)?;
    let hs: Vec<f64> = records.iter().filter_map(|r| r.h).collect();
    Ok(SweepRow {
        experiment_id: spec.id.clone(),
        network_model: spec.network.label().to_string(),
        n: records[0].n,
        delta: spec.grid.delta,
        lambda: spec.grid.lambda,
        w_in: mean(records.iter().map(|r| r.w_in)),
        w_out: mean(records.iter().map(|r| r.w_out)),
        b: mean(records.iter().map(|r| r.b)),
        b_tilde: mean(records.iter().map(|r| r.b_tilde)),
        h: (!hs.is_empty()).then(|| mean(hs.iter().copied())),
        init_scheme: spec.init.label(),
        update_mode: spec.update.label().to_string(),
        n_p: est.n_p,
        m_consensus: est.m,
        p_c: est.p_c,
        ci_half_width: est.ci_half_width,
        mean_steps: mean(records.iter().map(|r| r.steps as f64)),
        mean_final_variance: mean(records.iter().map(|r| r.variance)),
    })
}

/// One row per axis point, in axis order. Trials within a point run in
/// parallel; the rows do not depend on scheduling.
pub fn sweep(spec: &ExperimentSpec, axis: &SweepSpec) -> Result<Vec<SweepRow>> {
    axis.points()?
        .into_iter()
        .map(|v| {
            let point = spec.with_axis(axis.axis, v)?;
            log::info!("{}: {:?} = {v}", spec.id, axis.axis);
            run_point(&point)
        })
        .collect()
}

/// Writes the header and `rows`. An empty slice gives a header-only file.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
        .map_err(|e| crate::error::Error::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{GridSpec, InitScheme, MediaRule, NetworkSpec, SweepAxis, UpdateMode};
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            id: "s".into(),
            network: NetworkSpec::SymmetricTwoBlock {
                n_per_block: 4,
                a_in: 1.0,
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
            trials: 8,
            seed: 1,
            partition: None,
            weight_precision: None,
            sweep: None,
        }
    }

    #[test]
    fn single_point_matches_direct_aggregation() {
        let s = spec();
        let axis = SweepSpec {
            axis: SweepAxis::BTilde,
            values: vec![1.0],
            range: None,
        };
        let rows = sweep(&s, &axis).unwrap();
        let recs = Experiment::new(s).unwrap().run_all().unwrap();
        let est = estimate_consensus_probability(&recs).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].m_consensus, est.m);
        assert_eq!(rows[0].p_c, est.p_c);
    }

    #[test]
    fn empty_axis_gives_header_only() {
        let axis = SweepSpec {
            axis: SweepAxis::BTilde,
            values: vec![],
            range: None,
        };
        let rows = sweep(&spec(), &axis).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn rows_follow_axis_order_and_are_reproducible() {
        let axis = SweepSpec {
            axis: SweepAxis::BTilde,
            values: vec![8.0, 0.5, 3.0],
            range: None,
        };
        let a = sweep(&spec(), &axis).unwrap();
        let b = sweep(&spec(), &axis).unwrap();
        assert_eq!(a, b);
        let order: Vec<f64> = a.iter().map(|r| r.b_tilde).collect();
        assert_eq!(order, vec![8.0, 0.5, 3.0]);
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("s,symmetric_two_block,8,0.25,0.5,"));
    }
}
