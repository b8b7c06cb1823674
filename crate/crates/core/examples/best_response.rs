//! One agent's cost landscape and best response, then a synchronous and an
//! asynchronous run of a small network from the same start.

use discrete_opinion::{AsyncOptions, Game, ModelParams, OpinionGrid, OpinionProfile, SocialGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> discrete_opinion::Result<()> {
    let grid = OpinionGrid::new(0.25, 0.5)?;
    // A path 0 - 1 - 2 - 3 with a heavy middle edge.
    let graph = SocialGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 3.0), (2, 3, 1.0)])?;
    let game = Game::new(graph, grid, ModelParams::exact(0.5, 1))?;
    let x = OpinionProfile::from_values(&grid, &[-1.0, -0.25, 0.75, 1.0])?;

    println!("cost of agent 1 over the grid:");
    for y in grid.points() {
        let c = game.agent_cost(&x, 1, y);
        println!("  y = {:>5}: {:.4}", y.value(&grid), c.value);
    }
    println!(
        "best response of agent 1: {}",
        game.best_response(&x, 1).value(&grid)
    );

    let sync = game.sync_run(&x, 100, false)?;
    println!(
        "sync:  {} after {} steps",
        sync.outcome.kind, sync.outcome.steps
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let run = game.async_run(
        &x,
        &mut rng,
        AsyncOptions {
            step_cap: None,
            record: false,
        },
    )?;
    let finals: Vec<f64> = (0..4)
        .map(|i| run.outcome.final_profile.get(i).value(&grid))
        .collect();
    println!(
        "async: {} after {} moves, final {:?}",
        run.outcome.kind, run.outcome.steps, finals
    );
    Ok(())
}
