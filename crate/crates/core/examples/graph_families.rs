//! Samples each synthetic network family and reports size and homophily
//! under its natural (or Kernighan-Lin) partition.

use discrete_opinion::graphgen::{
    erdos_renyi, homophily, hyperbolic_rgg, kernighan_lin, stochastic_two_block,
    symmetric_two_block, watts_strogatz_like, HyperbolicParams,
};
use discrete_opinion::SocialGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(name: &str, g: &SocialGraph, h: Option<f64>) {
    let h = h.map_or("undefined".to_string(), |h| format!("{h:.3}"));
    println!(
        "{name:<22} n = {:>4}  edges = {:>5}  h = {h}",
        g.node_count(),
        g.edge_count()
    );
}

fn main() -> discrete_opinion::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let (g, p) = symmetric_two_block(20, 3.0, 1.0)?;
    report("symmetric two-block", &g, homophily(&g, &p)?.h);

    let (g, p) = stochastic_two_block(50, 0.4, 0.1, &mut rng)?;
    report("stochastic two-block", &g, homophily(&g, &p)?.h);

    for (name, g) in [
        ("Erdos-Renyi", erdos_renyi(100, 0.1, &mut rng)?),
        (
            "ring with weak ties",
            watts_strogatz_like(100, 3, 2, &mut rng)?,
        ),
        (
            "hyperbolic",
            hyperbolic_rgg(
                300,
                HyperbolicParams {
                    gamma: 2.5,
                    temperature: 0.5,
                    mean_degree: 10.0,
                },
                &mut rng,
            )?,
        ),
    ] {
        let p = kernighan_lin(&g);
        report(name, &g, homophily(&g, &p)?.h);
    }
    Ok(())
}
