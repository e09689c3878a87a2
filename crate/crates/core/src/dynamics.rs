//! Occupancy measures, value functions and imitation-error metrics.
//!
//! Everything here is computed with dense linear solves, so the discounted
//! infinite sums are exact up to floating point.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::linalg;
use crate::tol;

/// State occupancy `mu` and state-action occupancy `rho` of a fixed policy.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyPair {
    pub mu: Vec<f64>,
    /// `[s][a]` over joint actions.
    pub rho: Vec<f64>,
    pub n_joint: usize,
}

impl OccupancyPair {
    /// States with positive occupancy.
    pub fn support(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&s| self.mu[s] > 0.0).collect()
    }

    /// States never visited.
    pub fn unvisited(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&s| self.mu[s] == 0.0).collect()
    }

    pub fn rho_row(&self, s: usize) -> &[f64] {
        &self.rho[s * self.n_joint..(s + 1) * self.n_joint]
    }
}

/// Per-player state values `v[i][s]` and state-action values `q[i][s * |A| + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueBundle {
    pub v: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub n_joint: usize,
}

impl ValueBundle {
    /// `V_i(dist)`
    pub fn at(&self, i: usize, dist: &[f64]) -> f64 {
        self.v[i].iter().zip(dist).map(|(v, p)| v * p).sum()
    }

    #[inline]
    pub fn q(&self, i: usize, s: usize, a: usize) -> f64 {
        self.q[i][s * self.n_joint + a]
    }
}

/// `P_pi[s][s'] = sum_a pi(a|s) P(s'|s,a)` from a `[s][a]` joint table.
pub fn state_transition_matrix(game: &MarkovGame, joint: &[f64]) -> DMatrix<f64> {
    let (ns, na) = (game.n_states(), game.n_joint());
    let mut m = DMatrix::zeros(ns, ns);
    for s in 0..ns {
        for a in 0..na {
            let w = joint[s * na + a];
            if w == 0.0 {
                continue;
            }
            for (sp, p) in game.next_dist(s, a).iter().enumerate() {
                m[(s, sp)] += w * p;
            }
        }
    }
    m
}

/// States reachable from the support of the initial distribution.
fn reachable(game: &MarkovGame, joint: &[f64]) -> Vec<bool> {
    let (ns, na) = (game.n_states(), game.n_joint());
    let mut seen = vec![false; ns];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (s, &p) in game.initial_dist().iter().enumerate() {
        if p > 0.0 {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    // With gamma = 0 only the initial states carry mass.
    if game.gamma() == 0.0 {
        return seen;
    }
    while let Some(s) = queue.pop_front() {
        for a in 0..na {
            if joint[s * na + a] == 0.0 {
                continue;
            }
            for (sp, &p) in game.next_dist(s, a).iter().enumerate() {
                if p > 0.0 && !seen[sp] {
                    seen[sp] = true;
                    queue.push_back(sp);
                }
            }
        }
    }
    seen
}

/// Discounted state and state-action occupancies.
///
/// Solves `(I - gamma P_pi^T) mu = (1 - gamma) nu0`. States that cannot be
/// reached from the initial support are set to exactly zero.
pub fn occupancy(game: &MarkovGame, policy: &ProductPolicy) -> Result<OccupancyPair> {
    policy.check_compatible(game)?;
    let joint = policy.joint_table();
    occupancy_from_joint(game, &joint)
}

pub(crate) fn occupancy_from_joint(game: &MarkovGame, joint: &[f64]) -> Result<OccupancyPair> {
    let (ns, na, gamma) = (game.n_states(), game.n_joint(), game.gamma());
    let p = state_transition_matrix(game, joint);
    let m = DMatrix::identity(ns, ns) - p.transpose() * gamma;
    let b: Vec<f64> = game.initial_dist().iter().map(|x| (1.0 - gamma) * x).collect();
    let mut mu = linalg::solve(&m, &b, "occupancy")?;
    let live = reachable(game, joint);
    for (s, x) in mu.iter_mut().enumerate() {
        if !live[s] || (*x < 0.0 && *x > -tol::STOCHASTIC) {
            *x = 0.0;
        }
    }
    let rho = (0..ns)
        .flat_map(|s| {
            let m = mu[s];
            joint[s * na..(s + 1) * na].iter().map(move |p| m * p)
        })
        .collect();
    Ok(OccupancyPair {
        mu,
        rho,
        n_joint: na,
    })
}

/// Per-player values from the Bellman evaluation system, cross-checked against
/// the occupancy identity `V_i(nu0) = <rho, r_i> / (1 - gamma)`.
pub fn values(game: &MarkovGame, policy: &ProductPolicy) -> Result<ValueBundle> {
    policy.check_compatible(game)?;
    let joint = policy.joint_table();
    let bundle = values_from_joint(game, &joint)?;
    let occ = occupancy_from_joint(game, &joint)?;
    let gamma = game.gamma();
    for i in 0..game.n_players() {
        let bellman = bundle.at(i, game.initial_dist());
        let occupancy: f64 = occ
            .rho
            .iter()
            .zip(game.rewards_of(i))
            .map(|(p, r)| p * r)
            .sum::<f64>()
            / (1.0 - gamma);
        if (bellman - occupancy).abs() > tol::OCCUPANCY_IDENTITY {
            return Err(Error::IdentityCheck {
                player: i,
                bellman,
                occupancy,
            });
        }
    }
    Ok(bundle)
}

pub(crate) fn values_from_joint(game: &MarkovGame, joint: &[f64]) -> Result<ValueBundle> {
    let (ns, na, gamma) = (game.n_states(), game.n_joint(), game.gamma());
    let p = state_transition_matrix(game, joint);
    let m = DMatrix::identity(ns, ns) - p * gamma;
    let rhs: Vec<Vec<f64>> = (0..game.n_players())
        .map(|i| {
            (0..ns)
                .map(|s| {
                    (0..na)
                        .map(|a| joint[s * na + a] * game.reward(i, s, a))
                        .sum()
                })
                .collect()
        })
        .collect();
    let v = linalg::solve_many(&m, &rhs, "policy evaluation")?;
    let q = v
        .iter()
        .enumerate()
        .map(|(i, vi)| {
            (0..ns)
                .flat_map(|s| {
                    (0..na).map(move |a| {
                        let next: f64 = game
                            .next_dist(s, a)
                            .iter()
                            .zip(vi)
                            .map(|(p, v)| p * v)
                            .sum();
                        game.reward(i, s, a) + gamma * next
                    })
                })
                .collect()
        })
        .collect();
    Ok(ValueBundle { v, q, n_joint: na })
}

/// `V_i^pi(nu0)` for every player.
pub fn initial_values(game: &MarkovGame, policy: &ProductPolicy) -> Result<Vec<f64>> {
    policy.check_compatible(game)?;
    let b = values_from_joint(game, &policy.joint_table())?;
    Ok((0..game.n_players())
        .map(|i| b.at(i, game.initial_dist()))
        .collect())
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Per-player `E_{s ~ mu}[ ||learner_i(.|s) - expert_i(.|s)||_1 ]`.
pub fn bc_errors_under(mu: &[f64], expert: &ProductPolicy, learner: &ProductPolicy) -> Vec<f64> {
    (0..expert.n_players())
        .map(|i| {
            mu.iter()
                .enumerate()
                .filter(|(_, m)| **m > 0.0)
                .map(|(s, m)| m * l1(learner.dist(i, s), expert.dist(i, s)))
                .sum()
        })
        .collect()
}

/// Behavioural-cloning error under the exact expert occupancy.
pub fn bc_error(game: &MarkovGame, expert: &ProductPolicy, learner: &ProductPolicy) -> Result<f64> {
    learner.check_compatible(game)?;
    let mu = occupancy(game, expert)?.mu;
    Ok(bc_errors_under(&mu, expert, learner)
        .into_iter()
        .fold(0.0, f64::max))
}

/// `(||mu_learner - mu_expert||_1, ||rho_learner - rho_expert||_1)`.
pub fn measure_errors(
    game: &MarkovGame,
    expert: &ProductPolicy,
    learner: &ProductPolicy,
) -> Result<(f64, f64)> {
    let e = occupancy(game, expert)?;
    let l = occupancy(game, learner)?;
    Ok((l1(&l.mu, &e.mu), l1(&l.rho, &e.rho)))
}

/// Joint conditionals recovered from a state-action occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub support: Vec<usize>,
    /// `None` off the support, where the policy is not identified.
    pub conditionals: Vec<Option<Vec<f64>>>,
}

impl Reconstruction {
    pub fn undefined(&self) -> Vec<usize> {
        (0..self.conditionals.len())
            .filter(|&s| self.conditionals[s].is_none())
            .collect()
    }
}

/// Inverts `rho(s, a) = mu(s) pi(a|s)` on the visited states.
pub fn reconstruct_from_rho(rho: &[f64], n_states: usize) -> Result<Reconstruction> {
    if n_states == 0 || !rho.len().is_multiple_of(n_states) {
        return Err(Error::Shape(format!(
            "rho of length {} is not a table over {n_states} states",
            rho.len()
        )));
    }
    if rho.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidArgument("rho has negative entries".into()));
    }
    let na = rho.len() / n_states;
    let mut support = Vec::new();
    let conditionals = (0..n_states)
        .map(|s| {
            let row = &rho[s * na..(s + 1) * na];
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                support.push(s);
                Some(row.iter().map(|p| p / mass).collect())
            } else {
                None
            }
        })
        .collect();
    Ok(Reconstruction {
        support,
        conditionals,
    })
}

/// `|LHS - RHS|` of the performance difference identity for player `i`:
/// `V_i^{dev}(nu0) - V_i^{pi}(nu0) = E_{rho_dev}[Q_i^pi - V_i^pi] / (1 - gamma)`.
pub fn pdl_residual(
    game: &MarkovGame,
    pi: &ProductPolicy,
    pi_dev: &ProductPolicy,
    i: usize,
) -> Result<f64> {
    if i >= game.n_players() {
        return Err(Error::InvalidArgument(format!("no player {i}")));
    }
    pi_dev.check_compatible(game)?;
    let base = values(game, pi)?;
    let dev = values(game, pi_dev)?;
    let occ = occupancy(game, pi_dev)?;
    let lhs = dev.at(i, game.initial_dist()) - base.at(i, game.initial_dist());
    let na = game.n_joint();
    let mut adv = 0.0;
    for s in 0..game.n_states() {
        for a in 0..na {
            adv += occ.rho[s * na + a] * (base.q(i, s, a) - base.v[i][s]);
        }
    }
    Ok((lhs - adv / (1.0 - game.gamma())).abs())
}

/// `(||x p_i - x q_i||_1, sum_i ||p_i - q_i||_1)` for product distributions.
pub fn l1_product_gap(p_list: &[Vec<f64>], q_list: &[Vec<f64>]) -> Result<(f64, f64)> {
    if p_list.len() != q_list.len() || p_list.is_empty() {
        return Err(Error::Shape("need matching non-empty factor lists".into()));
    }
    for (p, q) in p_list.iter().zip(q_list) {
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::Shape("factor sizes differ".into()));
        }
    }
    let product = |fs: &[Vec<f64>]| {
        fs.iter().fold(vec![1.0], |acc, f| {
            acc.iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect::<Vec<f64>>()
        })
    };
    let joint = l1(&product(p_list), &product(q_list));
    let marginal = p_list.iter().zip(q_list).map(|(p, q)| l1(p, q)).sum();
    Ok((joint, marginal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{random_game, random_policy};

    /// Truncated rollout of the state distribution: independent of the solve.
    fn rollout_occupancy(game: &MarkovGame, policy: &ProductPolicy) -> Vec<f64> {
        let ns = game.n_states();
        let mut dist = game.initial_dist().to_vec();
        let mut mu = vec![0.0; ns];
        let mut w = 1.0 - game.gamma();
        while w > 1e-17 {
            for s in 0..ns {
                mu[s] += w * dist[s];
            }
            let mut next = vec![0.0; ns];
            for s in 0..ns {
                let j = policy.joint_distribution(s);
                for (a, pa) in j.iter().enumerate() {
                    for (sp, p) in game.next_dist(s, a).iter().enumerate() {
                        next[sp] += dist[s] * pa * p;
                    }
                }
            }
            dist = next;
            w *= game.gamma();
        }
        mu
    }

    fn cycle_game() -> MarkovGame {
        MarkovGame::new(
            2,
            vec![1],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn two_state_cycle_occupancy() {
        let g = cycle_game();
        let pi = ProductPolicy::uniform(&g);
        let occ = occupancy(&g, &pi).unwrap();
        assert!((occ.mu[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((occ.mu[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn single_state_occupancy_is_one() {
        let g = random_game(3, 2, 1, &[2, 3], 0.9).unwrap();
        let occ = occupancy(&g, &random_policy(&g, 1)).unwrap();
        assert_eq!(occ.mu.len(), 1);
        assert!((occ.mu[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn occupancy_matches_rollout_and_invariants() {
        for seed in 0..20 {
            let g = random_game(seed, 2, 4, &[2, 3], 0.8).unwrap();
            let pi = random_policy(&g, seed + 100);
            let occ = occupancy(&g, &pi).unwrap();
            let oracle = rollout_occupancy(&g, &pi);
            for s in 0..4 {
                assert!((occ.mu[s] - oracle[s]).abs() < 1e-12);
                assert!(occ.mu[s] >= (1.0 - 0.8) * g.initial_dist()[s] - 1e-12);
            }
            assert!((occ.rho.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let g = random_game(5, 2, 3, &[2, 2], 0.9).unwrap();
        let g = MarkovGame::new(
            3,
            vec![2, 2],
            g.transitions().to_vec(),
            vec![0.0; 2 * 3 * 4],
            g.initial_dist().to_vec(),
            0.9,
        )
        .unwrap();
        let v = values(&g, &random_policy(&g, 0)).unwrap();
        assert!(v.v.iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn bellman_consistency() {
        let g = random_game(9, 2, 5, &[3, 2], 0.9).unwrap();
        let pi = random_policy(&g, 4);
        let b = values(&g, &pi).unwrap();
        for i in 0..2 {
            for s in 0..5 {
                let j = pi.joint_distribution(s);
                let v: f64 = j.iter().enumerate().map(|(a, p)| p * b.q(i, s, a)).sum();
                assert!((v - b.v[i][s]).abs() < 1e-10);
                assert!(b.v[i][s].abs() <= 1.0 / (1.0 - 0.9) + 1e-12);
            }
        }
    }

    #[test]
    fn bc_error_examples() {
        let g = random_game(2, 2, 3, &[2, 2], 0.9).unwrap();
        let e = ProductPolicy::constant(&g, &[0, 0]).unwrap();
        assert_eq!(bc_error(&g, &e, &e).unwrap(), 0.0);
        let l = ProductPolicy::constant(&g, &[1, 0]).unwrap();
        assert!((bc_error(&g, &e, &l).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(measure_errors(&g, &e, &e).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn reconstruction_of_point_mass() {
        let mut rho = vec![0.0; 6];
        rho[4] = 1.0;
        let r = reconstruct_from_rho(&rho, 3).unwrap();
        assert_eq!(r.support, vec![2]);
        assert_eq!(r.conditionals[2], Some(vec![1.0, 0.0]));
        assert_eq!(r.undefined(), vec![0, 1]);
        assert!(reconstruct_from_rho(&[0.5, 0.5, 0.1], 2).is_err());
    }

    #[test]
    fn pdl_zero_for_identical_policies() {
        let g = random_game(0, 2, 4, &[2, 2], 0.9).unwrap();
        let pi = random_policy(&g, 0);
        assert!(pdl_residual(&g, &pi, &pi, 0).unwrap() < 1e-10);
    }

    #[test]
    fn l1_product_examples() {
        let p = vec![vec![0.2, 0.8], vec![0.5, 0.25, 0.25]];
        assert_eq!(l1_product_gap(&p, &p).unwrap(), (0.0, 0.0));
        let (j, m) = l1_product_gap(&[vec![0.2, 0.8]], &[vec![0.6, 0.4]]).unwrap();
        assert!((j - m).abs() < 1e-15);
        assert!(l1_product_gap(&p, &p[..1]).is_err());
    }
}
