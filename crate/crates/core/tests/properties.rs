use discrete_opinion::graphgen::{cut_weight, kernighan_lin_from, Partition, Side};
use discrete_opinion::harness::{
    consensus_estimate, relaxed_consensus, run_point, Draw, ExperimentSpec, GridSpec, InitScheme,
    MediaRule, NetworkSpec, UpdateMode,
};
use discrete_opinion::{
    AsyncOptions, Game, GridOpinion, ModelParams, OpinionGrid, OpinionProfile, SocialGraph,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(inv_delta, n, edges, b, opinions)`.
type Instance = (i32, usize, Vec<(usize, usize, f64)>, f64, Vec<i32>);

/// Random weighted instance with weights and `b` in hundredths, so exact
/// mode with `k = 2` applies.
fn instance() -> impl Strategy<Value = Instance> {
    (prop_oneof![Just(2), Just(4), Just(8)], 2usize..10).prop_flat_map(|(inv_delta, n)| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let n_pairs = pairs.len();
        (
            Just(inv_delta),
            Just(n),
            proptest::collection::vec(proptest::option::of(1u32..400), n_pairs).prop_map(
                move |ws| {
                    pairs
                        .iter()
                        .zip(ws)
                        .filter_map(|(&(i, j), w)| w.map(|w| (i, j, f64::from(w) / 100.0)))
                        .collect::<Vec<_>>()
                },
            ),
            (0u32..800).prop_map(|b| f64::from(b) / 100.0),
            proptest::collection::vec(-inv_delta..=inv_delta, n),
        )
    })
}

fn build(
    inv_delta: i32,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    b: f64,
    ops: &[i32],
) -> (Game, OpinionProfile) {
    let grid = OpinionGrid::with_inv_delta(inv_delta, 0.5).unwrap();
    let graph = SocialGraph::from_edges(n, edges).unwrap();
    let game = Game::new(graph, grid, ModelParams::exact(b, 2)).unwrap();
    let x = OpinionProfile::new(ops.iter().map(|&m| GridOpinion(m)).collect());
    (game, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn best_response_minimises_cost((inv_delta, n, edges, b, ops) in instance()) {
        let (game, x) = build(inv_delta, n, edges, b, &ops);
        for i in 0..n {
            let br = game.best_response(&x, i);
            let best = game.agent_cost(&x, i, br).scaled.unwrap();
            for y in game.grid().points() {
                prop_assert!(best <= game.agent_cost(&x, i, y).scaled.unwrap());
            }
        }
    }

    #[test]
    fn improving_moves_lower_the_potential((inv_delta, n, edges, b, ops) in instance(), seed: u64) {
        let (game, x) = build(inv_delta, n, edges, b, &ops);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = game
            .async_run(&x, &mut rng, AsyncOptions { step_cap: None, record: true })
            .unwrap();
        let phis: Vec<i128> = run
            .trajectory
            .unwrap()
            .snapshots
            .iter()
            .map(|s| game.potential(&s.profile).scaled.unwrap())
            .collect();
        prop_assert!(phis.windows(2).all(|w| w[1] < w[0]));
        let last = run.outcome.final_profile;
        prop_assert!((0..n).all(|i| game.best_response(&last, i) == last.get(i)));
    }

    #[test]
    fn kernighan_lin_never_increases_the_cut(
        (_, n, edges, _, _) in instance(),
        mask in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let graph = SocialGraph::from_edges(n, edges).unwrap();
        let mut sides: Vec<Side> = mask[..n].iter().map(|&l| if l { Side::L } else { Side::R }).collect();
        sides[0] = Side::L;
        sides[n - 1] = Side::R;
        let start = Partition::new(sides).unwrap();
        let refined = kernighan_lin_from(&graph, start.clone());
        prop_assert!(cut_weight(&graph, &refined) <= cut_weight(&graph, &start) + 1e-9);
        prop_assert_eq!(refined.count(Side::L), start.count(Side::L));
    }

    #[test]
    fn exact_consensus_is_relaxed_consensus(
        inv_delta in prop_oneof![Just(2), Just(4), Just(8)],
        n_left in 1usize..8,
        n_right in 1usize..8,
        level in -8i32..=8,
    ) {
        let grid = OpinionGrid::with_inv_delta(inv_delta, 0.5).unwrap();
        let level = level.clamp(-inv_delta, inv_delta);
        let profile = OpinionProfile::new(vec![GridOpinion(level); n_left + n_right]);
        let partition = Partition::split_at(n_left + n_right, n_left).unwrap();
        let rc = relaxed_consensus(&profile, &partition, &grid).unwrap();
        prop_assert!(rc.consensus);
        prop_assert_eq!(rc.variance, 0.0);
    }

    #[test]
    fn estimate_is_a_probability_with_bounded_width(n_p in 1usize..5000, frac in 0.0f64..=1.0) {
        let m = ((n_p as f64) * frac).floor() as usize;
        let est = consensus_estimate(m, n_p).unwrap();
        prop_assert!((0.0..=1.0).contains(&est.p_c));
        prop_assert!(est.ci_half_width <= 1.0 / (n_p as f64).sqrt() + 1e-15);
    }
}

fn small_spec(seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        id: "perm".into(),
        network: NetworkSpec::StochasticTwoBlock {
            n_per_block: 6,
            p_in: Some(Draw::Fixed(0.6)),
            p_out: Draw::Fixed(0.3),
            target_h: None,
        },
        grid: GridSpec {
            delta: 0.25,
            lambda: 0.5,
        },
        weights: None,
        media: MediaRule::Relative { b_tilde: 2.0 },
        init: InitScheme::GeneralDivergent,
        update: UpdateMode::default(),
        trials: 16,
        seed,
        partition: None,
        weight_precision: None,
        sweep: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Aggregates depend only on the per-trial seeds, never on worker count or
    // completion order.
    #[test]
    fn aggregates_ignore_thread_scheduling(seed in 0u64..1000) {
        let spec = small_spec(seed);
        let parallel = run_point(&spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let pooled = pool.install(|| run_point(&spec)).unwrap();
        prop_assert_eq!(parallel, pooled);
    }
}
