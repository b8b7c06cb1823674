//! Exact media thresholds for a range of homophily values, and the regime of
//! one two-block instance.

use discrete_opinion::theory::{classify, thresholds, to_f64, Rational, TwoBlockParams};
use discrete_opinion::{GridOpinion, OpinionGrid};

fn main() -> discrete_opinion::Result<()> {
    let grid = OpinionGrid::new(0.25, 0.5)?;
    println!(
        "{:>4} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "h", "tau1", "tau2", "tau3", "tau4", "tau5"
    );
    for h in [1, 2, 4, 8, 16] {
        let t = thresholds(&Rational::from_integer(h), &grid)?;
        println!(
            "{h:>4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            to_f64(&t.tau1),
            to_f64(&t.tau2),
            to_f64(&t.tau3),
            to_f64(&t.tau4),
            to_f64(&t.tau5)
        );
    }

    let params = TwoBlockParams::from_ratios(Rational::from_integer(2), Rational::new(9, 2))?;
    let regime = classify(GridOpinion(-4), GridOpinion(4), &params, &grid)?;
    println!(
        "\nx = (-1, 1), h = 2, b~ = 9/2: {:?} via {:?}",
        regime.kind, regime.applied_case.row
    );
    Ok(())
}
