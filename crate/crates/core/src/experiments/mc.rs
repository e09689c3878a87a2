//! Monte-Carlo estimate of the behavioural-cloning error from expert rollouts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::dynamics::bc_errors_under;
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::sampling::categorical;

/// Empirical discounted state frequency from `episodes` expert rollouts whose
/// lengths are `1 + Geometric(1 - gamma)`.
pub fn empirical_occupancy(game: &MarkovGame, expert: &ProductPolicy, episodes: usize, seed: u64) -> Result<Vec<f64>> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("at least one episode is required".into()));
    }
    expert.check_compatible(game)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = Geometric::new(1.0 - game.gamma()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let joint = game.joint();
    let mut counts = vec![0u64; game.n_states()];
    let mut actions = vec![0usize; game.n_players()];
    for _ in 0..episodes {
        let len = 1 + lengths.sample(&mut rng);
        let mut s = categorical(&mut rng, game.initial_dist());
        for t in 0..len {
            counts[s] += 1;
            if t + 1 == len {
                break;
            }
            for (i, a) in actions.iter_mut().enumerate() {
                *a = categorical(&mut rng, expert.dist(i, s));
            }
            s = categorical(&mut rng, game.next_dist(s, joint.encode(&actions)));
        }
    }
    let total: u64 = counts.iter().sum();
    Ok(counts.into_iter().map(|c| c as f64 / total as f64).collect())
}

/// `max_i sum_s mu_hat(s) ||learner_i(.|s) - expert_i(.|s)||_1`
pub fn mc_bc_error(
    game: &MarkovGame,
    expert: &ProductPolicy,
    learner: &ProductPolicy,
    episodes: usize,
    seed: u64,
) -> Result<f64> {
    learner.check_compatible(game)?;
    let mu = empirical_occupancy(game, expert, episodes, seed)?;
    Ok(bc_errors_under(&mu, expert, learner).into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics;
    use crate::game::{random_game, random_policy};

    #[test]
    fn identical_policies_give_zero() {
        let g = random_game(0, 2, 3, &[2, 2], 0.9).unwrap();
        let e = random_policy(&g, 0);
        assert_eq!(mc_bc_error(&g, &e, &e, 100, 0).unwrap(), 0.0);
    }

    #[test]
    fn occupancy_estimate_converges() {
        let g = random_game(2, 2, 4, &[2, 3], 0.7).unwrap();
        let e = random_policy(&g, 1);
        let exact = dynamics::occupancy(&g, &e).unwrap().mu;
        let est = empirical_occupancy(&g, &e, 20_000, 3).unwrap();
        for (a, b) in exact.iter().zip(&est) {
            assert!((a - b).abs() < 0.02, "{a} vs {b}");
        }
    }
}
