use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Parameters of the hyperbolic random graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicParams {
    /// Power-law exponent, `γ > 2`.
    pub gamma: f64,
    /// Temperature, `0 < T < 1`.
    pub temperature: f64,
    /// Target mean degree.
    pub mean_degree: f64,
}

/// Hyperbolic random graph with `n` nodes and unit weights.
///
/// Radii follow the density `α sinh(αr) / (cosh(αR) − 1)` with
/// `α = (γ − 1)/2`, angles are uniform, and a pair at distance `d` is joined
/// with probability `1 / (1 + exp((d − R) / (2T)))`. The disk radius `R` is
/// chosen by bisection so that the expected mean degree of the sampled
/// coordinates equals the target.
pub fn hyperbolic_rgg<R: Rng + ?Sized>(
    n: usize,
    params: HyperbolicParams,
    rng: &mut R,
) -> Result<SocialGraph> {
    let HyperbolicParams {
        gamma,
        temperature: t,
        mean_degree: k,
    } = params;
    if !(gamma > 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "gamma must exceed 2, got {gamma}"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParams(format!(
            "temperature must lie in (0, 1), got {t}"
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "mean degree must be positive, got {k}"
        )));
    }
    if n < 2 {
        return Ok(SocialGraph::empty(n));
    }
    let alpha = (gamma - 1.0) / 2.0;
    let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let theta: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();

    let radii = |big_r: f64| -> Vec<f64> {
        let c = (alpha * big_r).cosh() - 1.0;
        u.iter().map(|&u| (1.0 + c * u).acosh() / alpha).collect()
    };
    let prob = |d: f64, big_r: f64| 1.0 / (1.0 + ((d - big_r) / (2.0 * t)).exp());
    let dist = |ri: f64, rj: f64, ti: f64, tj: f64| {
        let dt = PI - (PI - (ti - tj).abs()).abs();
        let c = ri.cosh() * rj.cosh() - ri.sinh() * rj.sinh() * dt.cos();
        c.max(1.0).acosh()
    };
    let expected_degree = |big_r: f64| {
        let r = radii(big_r);
        let mut total = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                total += prob(dist(r[i], r[j], theta[i], theta[j]), big_r);
            }
        }
        2.0 * total / n as f64
    };

    // Expected degree decreases in R; bracket the target, then bisect.
    let mut lo = 1e-3;
    let mut hi = 2.0 * (n as f64).ln().max(1.0);
    while expected_degree(hi) > k && hi < 1e3 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if expected_degree(mid) > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let big_r = 0.5 * (lo + hi);
    let r = radii(big_r);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = prob(dist(r[i], r[j], theta[i], theta[j]), big_r);
            if rng.gen::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    SocialGraph::from_edges(n, edges)
}
