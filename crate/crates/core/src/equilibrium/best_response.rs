//! Best responses computed by value iteration in the MDP a player faces when
//! everyone else is held fixed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::linalg;
use crate::tol;

/// Single-agent MDP induced for one player by marginalising out the others.
#[derive(Debug, Clone)]
pub struct InducedMdp {
    pub n_states: usize,
    pub n_actions: usize,
    pub gamma: f64,
    /// `[s][a][s']`
    pub transitions: Vec<f64>,
    /// `[s][a]`
    pub rewards: Vec<f64>,
}

pub fn induced_mdp(game: &MarkovGame, policy: &ProductPolicy, player: usize) -> Result<InducedMdp> {
    policy.check_compatible(game)?;
    if player >= game.n_players() {
        return Err(Error::InvalidArgument(format!("no player {player}")));
    }
    let (ns, na) = (game.n_states(), game.n_joint());
    let m = game.action_counts()[player];
    let joint = game.joint();
    let mut transitions = vec![0.0; ns * m * ns];
    let mut rewards = vec![0.0; ns * m];
    for s in 0..ns {
        for a in 0..na {
            let w = policy.others_prob(player, s, a);
            if w == 0.0 {
                continue;
            }
            let own = joint.component(a, player);
            rewards[s * m + own] += w * game.reward(player, s, a);
            let row = &mut transitions[(s * m + own) * ns..(s * m + own + 1) * ns];
            for (t, p) in row.iter_mut().zip(game.next_dist(s, a)) {
                *t += w * p;
            }
        }
    }
    Ok(InducedMdp {
        n_states: ns,
        n_actions: m,
        gamma: game.gamma(),
        transitions,
        rewards,
    })
}

impl InducedMdp {
    /// `Q(s, a) = r(s, a) + gamma sum_s' P(s'|s,a) v(s')`
    pub fn q_values(&self, v: &[f64]) -> Vec<f64> {
        let ns = self.n_states;
        (0..ns * self.n_actions)
            .map(|sa| {
                let next: f64 = self.transitions[sa * ns..(sa + 1) * ns]
                    .iter()
                    .zip(v)
                    .map(|(p, v)| p * v)
                    .sum();
                self.rewards[sa] + self.gamma * next
            })
            .collect()
    }

    /// Exact value of a deterministic policy.
    pub fn evaluate(&self, choice: &[usize]) -> Result<Vec<f64>> {
        let ns = self.n_states;
        let mut m = DMatrix::identity(ns, ns);
        let mut r = vec![0.0; ns];
        for s in 0..ns {
            let sa = s * self.n_actions + choice[s];
            r[s] = self.rewards[sa];
            for (sp, p) in self.transitions[sa * ns..(sa + 1) * ns].iter().enumerate() {
                m[(s, sp)] -= self.gamma * p;
            }
        }
        linalg::solve(&m, &r, "best-response evaluation")
    }

    /// Lowest-index action whose Q-value is within [`tol::TIE`] of the maximum.
    pub fn greedy(&self, q: &[f64]) -> Vec<usize> {
        q.chunks(self.n_actions)
            .map(|row| {
                let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                row.iter().position(|&x| x >= best - tol::TIE).unwrap_or(0)
            })
            .collect()
    }

    pub fn optimal_sets(&self, q: &[f64]) -> Vec<Vec<usize>> {
        q.chunks(self.n_actions)
            .map(|row| {
                let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (0..row.len()).filter(|&a| row[a] >= best - tol::TIE).collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseResult {
    pub player: usize,
    /// Chosen action per state.
    pub policy: Vec<usize>,
    /// `V_i^{BR, pi_-i}(nu0)`
    pub value: f64,
    pub state_values: Vec<f64>,
    /// `[s][a_i]` Q-values of the returned policy.
    pub q: Vec<f64>,
    /// Every action within [`tol::TIE`] of optimal, per state.
    pub optimal_actions: Vec<Vec<usize>>,
    pub iterations: usize,
    pub residual: f64,
}

impl BestResponseResult {
    /// `[s][a_i]` one-hot table of the chosen actions.
    pub fn table(&self, n_actions: usize) -> Vec<f64> {
        crate::game::one_hot_table(&self.policy, n_actions).expect("actions in range")
    }
}

/// Best response of `player` against the other components of `policy`.
///
/// Value iteration runs until the Bellman residual drops below
/// [`tol::BELLMAN`]; the greedy policy is then polished by exact policy
/// iteration so the reported value is that policy's exact value. Ties go to
/// the lowest action index.
pub fn best_response(
    game: &MarkovGame,
    policy: &ProductPolicy,
    player: usize,
) -> Result<BestResponseResult> {
    let mdp = induced_mdp(game, policy, player)?;
    solve_mdp(&mdp, game.initial_dist(), player)
}

pub(crate) fn solve_mdp(mdp: &InducedMdp, nu0: &[f64], player: usize) -> Result<BestResponseResult> {
    let cap = tol::value_iteration_cap(mdp.gamma, tol::BELLMAN);
    let mut v = vec![0.0; mdp.n_states];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cap {
        let q = mdp.q_values(&v);
        let next: Vec<f64> = q
            .chunks(mdp.n_actions)
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        iterations += 1;
        if residual < tol::BELLMAN {
            break;
        }
    }
    if !(residual < tol::BELLMAN) {
        return Err(Error::NotConverged {
            what: "best-response value iteration",
            iterations,
            residual,
        });
    }

    let mut choice = mdp.greedy(&mdp.q_values(&v));
    let mut exact = mdp.evaluate(&choice)?;
    let mut q = mdp.q_values(&exact);
    for _ in 0..100 {
        let improved = mdp.greedy(&q);
        if improved == choice {
            break;
        }
        choice = improved;
        exact = mdp.evaluate(&choice)?;
        q = mdp.q_values(&exact);
    }
    let bellman = q
        .chunks(mdp.n_actions)
        .zip(&exact)
        .map(|(row, v)| (row.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v).abs())
        .fold(0.0, f64::max);
    Ok(BestResponseResult {
        player,
        value: exact.iter().zip(nu0).map(|(v, p)| v * p).sum(),
        optimal_actions: mdp.optimal_sets(&q),
        policy: choice,
        state_values: exact,
        q,
        iterations,
        residual: bellman,
    })
}

/// Entropy-regularised (soft) best response at temperature `tau`:
/// `pi(a|s) ~ exp(Q_soft(s, a) / tau)`.
pub fn soft_best_response(mdp: &InducedMdp, tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature {tau} must be positive")));
    }
    let cap = tol::value_iteration_cap(mdp.gamma, tol::BELLMAN);
    let mut v = vec![0.0; mdp.n_states];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let soft_max = |row: &[f64]| {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + tau * row.iter().map(|x| ((x - m) / tau).exp()).sum::<f64>().ln()
    };
    while iterations < cap && !(residual < tol::BELLMAN) {
        let q = mdp.q_values(&v);
        let next: Vec<f64> = q.chunks(mdp.n_actions).map(soft_max).collect();
        residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        iterations += 1;
    }
    if !(residual < tol::BELLMAN) {
        return Err(Error::NotConverged {
            what: "soft value iteration",
            iterations,
            residual,
        });
    }
    let q = mdp.q_values(&v);
    Ok(q.chunks(mdp.n_actions)
        .flat_map(|row| super::softmax(row, tau))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics;
    use crate::game::{random_game, random_policy};

    /// Every deterministic policy of `player`, evaluated exactly.
    fn enumerate_deterministic(
        game: &MarkovGame,
        policy: &ProductPolicy,
        player: usize,
    ) -> Vec<(Vec<usize>, f64)> {
        let m = game.action_counts()[player];
        let ns = game.n_states();
        let total = m.pow(ns as u32);
        (0..total)
            .map(|mut code| {
                let choice: Vec<usize> = (0..ns)
                    .map(|_| {
                        let a = code % m;
                        code /= m;
                        a
                    })
                    .collect();
                let table = crate::game::one_hot_table(&choice, m).unwrap();
                let dev = policy.with_player(player, table).unwrap();
                let v = dynamics::initial_values(game, &dev).unwrap()[player];
                (choice, v)
            })
            .collect()
    }

    #[test]
    fn matches_enumeration_on_small_games() {
        for seed in 0..10 {
            let g = random_game(seed, 2, 3, &[2, 3], 0.9).unwrap();
            let pi = random_policy(&g, seed);
            for player in 0..2 {
                let br = best_response(&g, &pi, player).unwrap();
                let best = enumerate_deterministic(&g, &pi, player)
                    .into_iter()
                    .map(|(_, v)| v)
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((br.value - best).abs() < 1e-9, "seed {seed}");
                assert!(br.residual < 1e-9);
            }
        }
    }

    #[test]
    fn zero_reward_game_picks_lowest_index() {
        let g = random_game(1, 2, 3, &[3, 2], 0.8).unwrap();
        let g = MarkovGame::new(
            3,
            vec![3, 2],
            g.transitions().to_vec(),
            vec![0.0; 2 * 3 * 6],
            g.initial_dist().to_vec(),
            0.8,
        )
        .unwrap();
        let br = best_response(&g, &ProductPolicy::uniform(&g), 0).unwrap();
        assert_eq!(br.value, 0.0);
        assert_eq!(br.policy, vec![0, 0, 0]);
        assert!(br.optimal_actions.iter().all(|s| s == &vec![0, 1, 2]));
    }

    #[test]
    fn soft_response_is_a_distribution() {
        let g = random_game(4, 2, 3, &[2, 2], 0.9).unwrap();
        let mdp = induced_mdp(&g, &random_policy(&g, 2), 1).unwrap();
        let t = soft_best_response(&mdp, 0.1).unwrap();
        for row in t.chunks(2) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(soft_best_response(&mdp, 0.0).is_err());
    }
}
