//! Fixtures shared by the benchmarks.

use opinion_merge_core::engine::{run_competitive, Players};
use opinion_merge_core::scenarios::{gen_forecast_pair, player_rng, Regime, SamplingReality};
use opinion_merge_core::strategies::alpha_pair;
use opinion_merge_core::verify::random_pair;
use opinion_merge_core::{AlphaParam, DensityPair, Role, Transcript};

/// `count` random density pairs drawn from one seeded stream.
pub fn pairs(seed: u64, count: usize) -> Vec<DensityPair> {
    let mut rng = player_rng(seed, 0);
    (0..count).map(|_| random_pair(&mut rng)).collect()
}

/// The alpha pair on a drifting scenario with a sampling Reality.
pub fn play_pair(seed: u64, outcomes: usize, alpha: f64, horizon: usize) -> Transcript {
    let alpha = AlphaParam::new(alpha).expect("valid order");
    let (mut fi, mut fii) = gen_forecast_pair(seed, outcomes, Regime::Drift).expect("drift scenario");
    let (mut si, mut sii) = alpha_pair(alpha);
    let mut reality = SamplingReality::new(Role::I, seed);
    run_competitive(
        Players {
            forecaster_i: &mut fi,
            forecaster_ii: &mut fii,
            sceptic_i: &mut si,
            sceptic_ii: &mut sii,
            reality: &mut reality,
        },
        horizon,
    )
    .expect("valid play")
}
