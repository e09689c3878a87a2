//! Named rules that turn an exact best-response computation into the concrete
//! response policy whose distance to the expert is measured.

use std::sync::Arc;

use super::best_response::{induced_mdp, soft_best_response, BestResponseResult};
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::registry::{Named, Registry};

pub struct ResponseContext<'a> {
    pub game: &'a MarkovGame,
    /// Profile whose other components the responder faces.
    pub policy: &'a ProductPolicy,
    pub player: usize,
    /// Reference policy the response is compared against (the expert).
    pub anchor: &'a ProductPolicy,
    pub exact: &'a BestResponseResult,
    pub tau: Option<f64>,
}

pub trait ResponseRule: Named + Send + Sync {
    /// `[s][a_i]` response table for `ctx.player`.
    fn response(&self, ctx: &ResponseContext<'_>) -> Result<Vec<f64>>;
}

/// The lowest-index deterministic best response.
pub struct Greedy;

impl Named for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn describe(&self) -> &'static str {
        "deterministic best response, ties to the lowest action index"
    }
}

impl ResponseRule for Greedy {
    fn response(&self, ctx: &ResponseContext<'_>) -> Result<Vec<f64>> {
        Ok(ctx.exact.table(ctx.game.action_counts()[ctx.player]))
    }
}

/// The element of the best-response set farthest from the anchor: in every
/// state, the optimal action the anchor plays least.
pub struct MaxSet;

impl Named for MaxSet {
    fn name(&self) -> &'static str {
        "max-set"
    }
    fn describe(&self) -> &'static str {
        "optimal action least played by the expert, per state"
    }
}

impl ResponseRule for MaxSet {
    fn response(&self, ctx: &ResponseContext<'_>) -> Result<Vec<f64>> {
        let m = ctx.game.action_counts()[ctx.player];
        let choice: Vec<usize> = ctx
            .exact
            .optimal_actions
            .iter()
            .enumerate()
            .map(|(s, set)| {
                let anchor = ctx.anchor.dist(ctx.player, s);
                let mut best = set[0];
                for &a in &set[1..] {
                    if anchor[a] < anchor[best] {
                        best = a;
                    }
                }
                best
            })
            .collect();
        Ok(crate::game::one_hot_table(&choice, m).expect("optimal actions in range"))
    }
}

/// Entropy-regularised best response at the run's temperature, in the game
/// where every player's reward is charged `tau` times the entropy of the
/// others' action distributions. For two-player zero-sum games this is the
/// responder's side of the regularised objective, so the regularised
/// equilibrium is its own soft response.
pub struct Soft;

impl Named for Soft {
    fn name(&self) -> &'static str {
        "soft"
    }
    fn describe(&self) -> &'static str {
        "softmax best response at temperature tau"
    }
}

impl ResponseRule for Soft {
    fn response(&self, ctx: &ResponseContext<'_>) -> Result<Vec<f64>> {
        let tau = ctx
            .tau
            .ok_or_else(|| Error::InvalidArgument("the soft response rule needs a temperature".into()))?;
        let mut mdp = induced_mdp(ctx.game, ctx.policy, ctx.player)?;
        let m = mdp.n_actions;
        for s in 0..mdp.n_states {
            let charge: f64 = (0..ctx.policy.n_players())
                .filter(|&j| j != ctx.player)
                .map(|j| entropy(ctx.policy.dist(j, s)))
                .sum();
            for r in &mut mdp.rewards[s * m..(s + 1) * m] {
                *r -= tau * charge;
            }
        }
        soft_best_response(&mdp, tau)
    }
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

pub fn response_rules() -> Registry<dyn ResponseRule> {
    let mut reg: Registry<dyn ResponseRule> = Registry::new("response rule");
    reg.register(Arc::new(Greedy))
        .register(Arc::new(MaxSet))
        .register(Arc::new(Soft));
    reg
}

/// `sum_s mu(s) || response(.|s) - anchor_i(.|s) ||_1`
pub fn response_distance(mu: &[f64], response: &[f64], anchor: &ProductPolicy, player: usize) -> f64 {
    let m = anchor.action_counts()[player];
    mu.iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(s, w)| {
            let l1: f64 = response[s * m..(s + 1) * m]
                .iter()
                .zip(anchor.dist(player, s))
                .map(|(a, b)| (a - b).abs())
                .sum();
            w * l1
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::best_response;

    #[test]
    fn registry_lists_all_rules() {
        let reg = response_rules();
        assert_eq!(reg.names(), vec!["greedy", "max-set", "soft"]);
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn max_set_avoids_anchor_actions_among_ties() {
        let g = crate::game::random_game(2, 2, 2, &[3, 2], 0.5).unwrap();
        let g = MarkovGame::new(
            2,
            vec![3, 2],
            g.transitions().to_vec(),
            vec![0.0; 2 * 2 * 6],
            g.initial_dist().to_vec(),
            0.5,
        )
        .unwrap();
        let anchor = ProductPolicy::constant(&g, &[0, 0]).unwrap();
        let exact = best_response(&g, &anchor, 0).unwrap();
        let ctx = ResponseContext {
            game: &g,
            policy: &anchor,
            player: 0,
            anchor: &anchor,
            exact: &exact,
            tau: None,
        };
        let greedy = Greedy.response(&ctx).unwrap();
        let far = MaxSet.response(&ctx).unwrap();
        let mu = vec![0.5, 0.5];
        assert_eq!(response_distance(&mu, &greedy, &anchor, 0), 0.0);
        assert_eq!(response_distance(&mu, &far, &anchor, 0), 2.0);
        assert!(Soft.response(&ctx).is_err());
    }
}
