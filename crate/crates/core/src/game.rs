//! Tabular discounted Markov games and product policies.
//!
//! Joint actions are flattened row-major with player 1 as the slowest-varying
//! index: for action counts `[m1, m2, m3]` the joint action `(a1, a2, a3)` has
//! index `(a1 * m2 + a2) * m3 + a3`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tol;

/// One invariant breach found by [`MarkovGame::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub table: &'static str,
    pub index: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}: {}", self.table, self.index, self.message)
    }
}

/// Index arithmetic for the flattened joint-action space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointActions {
    counts: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl JointActions {
    pub fn new(counts: &[usize]) -> Self {
        let mut strides = vec![1; counts.len()];
        for i in (0..counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        Self {
            counts: counts.to_vec(),
            strides,
            size: counts.iter().product(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n_players(&self) -> usize {
        self.counts.len()
    }

    /// Player `i`'s component of joint action `a`.
    #[inline]
    pub fn component(&self, a: usize, i: usize) -> usize {
        (a / self.strides[i]) % self.counts[i]
    }

    pub fn decode(&self, a: usize) -> Vec<usize> {
        (0..self.counts.len()).map(|i| self.component(a, i)).collect()
    }

    pub fn encode(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }
}

/// A tabular n-player discounted Markov game.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovGame {
    joint: JointActions,
    n_states: usize,
    /// `[s][a][s']`
    transitions: Vec<f64>,
    /// `[i][s][a]`
    rewards: Vec<f64>,
    initial_dist: Vec<f64>,
    gamma: f64,
}

impl MarkovGame {
    /// Builds a game and rejects it unless [`validate`](Self::validate) is clean.
    pub fn new(
        n_states: usize,
        action_counts: Vec<usize>,
        transitions: Vec<f64>,
        rewards: Vec<f64>,
        initial_dist: Vec<f64>,
        gamma: f64,
    ) -> Result<Self> {
        let game = Self::from_tables(
            n_states,
            action_counts,
            transitions,
            rewards,
            initial_dist,
            gamma,
        )?;
        let violations = game.validate();
        if violations.is_empty() {
            Ok(game)
        } else {
            Err(Error::InvalidGame(violations))
        }
    }

    /// Checks table shapes only. The result may violate the stochasticity and
    /// range invariants; use [`validate`](Self::validate) to list them.
    pub fn from_tables(
        n_states: usize,
        action_counts: Vec<usize>,
        transitions: Vec<f64>,
        rewards: Vec<f64>,
        initial_dist: Vec<f64>,
        gamma: f64,
    ) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(Error::Shape("at least one player is required".into()));
        }
        if n_states == 0 {
            return Err(Error::Shape("at least one state is required".into()));
        }
        if let Some(i) = action_counts.iter().position(|&m| m == 0) {
            return Err(Error::Shape(format!("player {i} has no actions")));
        }
        let joint = JointActions::new(&action_counts);
        let na = joint.size();
        let n = action_counts.len();
        if transitions.len() != n_states * na * n_states {
            return Err(Error::Shape(format!(
                "transitions has {} entries, expected {n_states}x{na}x{n_states}",
                transitions.len()
            )));
        }
        if rewards.len() != n * n_states * na {
            return Err(Error::Shape(format!(
                "rewards has {} entries, expected {n}x{n_states}x{na}",
                rewards.len()
            )));
        }
        if initial_dist.len() != n_states {
            return Err(Error::Shape(format!(
                "initial_dist has {} entries, expected {n_states}",
                initial_dist.len()
            )));
        }
        Ok(Self {
            joint,
            n_states,
            transitions,
            rewards,
            initial_dist,
            gamma,
        })
    }

    /// Lists every invariant breach. An empty list means the game is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let na = self.n_joint();
        if !(0.0..1.0).contains(&self.gamma) || !self.gamma.is_finite() {
            out.push(Violation {
                table: "gamma",
                index: vec![],
                message: format!("discount {} outside [0, 1)", self.gamma),
            });
        }
        for s in 0..self.n_states {
            for a in 0..na {
                let row = self.next_dist(s, a);
                if let Some(sp) = row.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
                    out.push(Violation {
                        table: "transitions",
                        index: vec![s, a, sp],
                        message: format!("entry {} is negative or not finite", row[sp]),
                    });
                    continue;
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > tol::STOCHASTIC {
                    out.push(Violation {
                        table: "transitions",
                        index: vec![s, a],
                        message: format!("row sums to {sum}"),
                    });
                }
            }
        }
        for i in 0..self.n_players() {
            for s in 0..self.n_states {
                for a in 0..na {
                    let r = self.reward(i, s, a);
                    if !(-1.0..=1.0).contains(&r) {
                        out.push(Violation {
                            table: "rewards",
                            index: vec![i, s, a],
                            message: format!("reward {r} outside [-1, 1]"),
                        });
                    }
                }
            }
        }
        if let Some(s) = self
            .initial_dist
            .iter()
            .position(|p| !(p.is_finite() && *p >= 0.0))
        {
            out.push(Violation {
                table: "initial_dist",
                index: vec![s],
                message: format!("entry {} is negative or not finite", self.initial_dist[s]),
            });
        } else {
            let sum: f64 = self.initial_dist.iter().sum();
            if (sum - 1.0).abs() > tol::STOCHASTIC {
                out.push(Violation {
                    table: "initial_dist",
                    index: vec![],
                    message: format!("sums to {sum}"),
                });
            }
        }
        out
    }

    pub fn n_players(&self) -> usize {
        self.joint.n_players()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_joint(&self) -> usize {
        self.joint.size()
    }

    pub fn action_counts(&self) -> &[usize] {
        self.joint.counts()
    }

    pub fn joint(&self) -> &JointActions {
        &self.joint
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }

    /// `P(. | s, a)`
    #[inline]
    pub fn next_dist(&self, s: usize, a: usize) -> &[f64] {
        let off = (s * self.n_joint() + a) * self.n_states;
        &self.transitions[off..off + self.n_states]
    }

    #[inline]
    pub fn reward(&self, i: usize, s: usize, a: usize) -> f64 {
        self.rewards[(i * self.n_states + s) * self.n_joint() + a]
    }

    /// Player `i`'s rewards as a `[s][a]` slice.
    pub fn rewards_of(&self, i: usize) -> &[f64] {
        let len = self.n_states * self.n_joint();
        &self.rewards[i * len..(i + 1) * len]
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    /// Same game with a different discount factor.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mut g = self.clone();
        g.gamma = gamma;
        let v = g.validate();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGame(v))
        }
    }

    /// Largest `|r_1 + r_2|` over all entries; `None` unless two players.
    pub fn zero_sum_violation(&self) -> Option<f64> {
        if self.n_players() != 2 {
            return None;
        }
        let (r1, r2) = (self.rewards_of(0), self.rewards_of(1));
        Some(
            r1.iter()
                .zip(r2)
                .map(|(a, b)| (a + b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// A product of per-player state-conditioned action distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPolicy {
    joint: JointActions,
    n_states: usize,
    /// `tables[i][s * m_i + a_i]`
    tables: Vec<Vec<f64>>,
}

impl ProductPolicy {
    pub fn new(action_counts: &[usize], n_states: usize, tables: Vec<Vec<f64>>) -> Result<Self> {
        if tables.len() != action_counts.len() {
            return Err(Error::InvalidPolicy(format!(
                "{} player tables for {} players",
                tables.len(),
                action_counts.len()
            )));
        }
        for (i, (t, &m)) in tables.iter().zip(action_counts).enumerate() {
            if t.len() != n_states * m {
                return Err(Error::InvalidPolicy(format!(
                    "player {i} table has {} entries, expected {n_states}x{m}",
                    t.len()
                )));
            }
            for s in 0..n_states {
                let row = &t[s * m..(s + 1) * m];
                if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(Error::InvalidPolicy(format!(
                        "player {i} state {s}: negative or non-finite probability"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > tol::STOCHASTIC {
                    return Err(Error::InvalidPolicy(format!(
                        "player {i} state {s}: probabilities sum to {sum}"
                    )));
                }
            }
        }
        Ok(Self {
            joint: JointActions::new(action_counts),
            n_states,
            tables,
        })
    }

    pub fn uniform(game: &MarkovGame) -> Self {
        let tables = game
            .action_counts()
            .iter()
            .map(|&m| vec![1.0 / m as f64; game.n_states() * m])
            .collect();
        Self {
            joint: game.joint().clone(),
            n_states: game.n_states(),
            tables,
        }
    }

    /// Deterministic policy: `choices[i][s]` is player `i`'s action in state `s`.
    pub fn deterministic(game: &MarkovGame, choices: &[Vec<usize>]) -> Result<Self> {
        let counts = game.action_counts();
        if choices.len() != counts.len() {
            return Err(Error::InvalidPolicy("one choice vector per player".into()));
        }
        let mut tables = Vec::with_capacity(counts.len());
        for (i, (c, &m)) in choices.iter().zip(counts).enumerate() {
            if c.len() != game.n_states() {
                return Err(Error::InvalidPolicy(format!(
                    "player {i}: {} choices for {} states",
                    c.len(),
                    game.n_states()
                )));
            }
            tables.push(one_hot_table(c, m).map_err(|a| {
                Error::InvalidPolicy(format!("player {i}: action {a} out of range"))
            })?);
        }
        Ok(Self {
            joint: game.joint().clone(),
            n_states: game.n_states(),
            tables,
        })
    }

    /// Every player plays the same action in every state.
    pub fn constant(game: &MarkovGame, actions: &[usize]) -> Result<Self> {
        let choices: Vec<Vec<usize>> = actions
            .iter()
            .map(|&a| vec![a; game.n_states()])
            .collect();
        Self::deterministic(game, &choices)
    }

    pub fn n_players(&self) -> usize {
        self.tables.len()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn action_counts(&self) -> &[usize] {
        self.joint.counts()
    }

    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    /// `pi_i(. | s)`
    #[inline]
    pub fn dist(&self, i: usize, s: usize) -> &[f64] {
        let m = self.joint.counts()[i];
        &self.tables[i][s * m..(s + 1) * m]
    }

    /// Product distribution over joint actions at state `s`.
    pub fn joint_distribution(&self, s: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for i in 0..self.n_players() {
            let d = self.dist(i, s);
            out = out
                .iter()
                .flat_map(|&p| d.iter().map(move |&q| p * q))
                .collect();
        }
        out
    }

    /// Joint distributions for every state, `[s][a]`.
    pub fn joint_table(&self) -> Vec<f64> {
        (0..self.n_states)
            .flat_map(|s| self.joint_distribution(s))
            .collect()
    }

    /// Probability of the joint actions of everyone except `i` at state `s`,
    /// evaluated on joint action `a` (player `i`'s component is ignored).
    #[inline]
    pub fn others_prob(&self, i: usize, s: usize, a: usize) -> f64 {
        let mut p = 1.0;
        for j in 0..self.n_players() {
            if j != i {
                p *= self.dist(j, s)[self.joint.component(a, j)];
            }
        }
        p
    }

    /// Copy with player `i`'s component replaced.
    pub fn with_player(&self, i: usize, table: Vec<f64>) -> Result<Self> {
        let mut tables = self.tables.clone();
        tables[i] = table;
        Self::new(self.joint.counts(), self.n_states, tables)
    }

    pub fn check_compatible(&self, game: &MarkovGame) -> Result<()> {
        if self.action_counts() != game.action_counts() || self.n_states != game.n_states() {
            return Err(Error::Shape(format!(
                "policy has {} states and action counts {:?}; game has {} states and {:?}",
                self.n_states,
                self.action_counts(),
                game.n_states(),
                game.action_counts()
            )));
        }
        Ok(())
    }
}

/// `[s][a]` one-hot table; the error carries the offending action.
pub(crate) fn one_hot_table(choices: &[usize], m: usize) -> std::result::Result<Vec<f64>, usize> {
    let mut t = vec![0.0; choices.len() * m];
    for (s, &a) in choices.iter().enumerate() {
        if a >= m {
            return Err(a);
        }
        t[s * m + a] = 1.0;
    }
    Ok(t)
}

/// Random game: transitions drawn uniformly then row-normalised, rewards
/// uniform in `[-1, 1]`, uniform initial distribution. Pure in its arguments.
pub fn random_game(
    seed: u64,
    n_players: usize,
    n_states: usize,
    action_counts: &[usize],
    gamma: f64,
) -> Result<MarkovGame> {
    if n_players == 0 || n_states == 0 || action_counts.len() != n_players {
        return Err(Error::InvalidArgument(format!(
            "need n_players >= 1, n_states >= 1 and one action count per player \
             (got {n_players}, {n_states}, {action_counts:?})"
        )));
    }
    if action_counts.contains(&0) {
        return Err(Error::InvalidArgument("action counts must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} outside [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let na: usize = action_counts.iter().product();
    let mut transitions = Vec::with_capacity(n_states * na * n_states);
    for _ in 0..n_states * na {
        let row: Vec<f64> = (0..n_states).map(|_| rng.random::<f64>() + 1e-3).collect();
        let sum: f64 = row.iter().sum();
        transitions.extend(row.iter().map(|p| p / sum));
    }
    let rewards = (0..n_players * n_states * na)
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    let initial = vec![1.0 / n_states as f64; n_states];
    MarkovGame::new(
        n_states,
        action_counts.to_vec(),
        transitions,
        rewards,
        initial,
        gamma,
    )
}

/// Random product policy with Dirichlet(1) rows.
pub fn random_policy(game: &MarkovGame, seed: u64) -> ProductPolicy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables = game
        .action_counts()
        .iter()
        .map(|&m| {
            (0..game.n_states())
                .flat_map(|_| crate::sampling::simplex_point(&mut rng, m))
                .collect()
        })
        .collect();
    ProductPolicy {
        joint: game.joint().clone(),
        n_states: game.n_states(),
        tables,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_game() -> MarkovGame {
        MarkovGame::new(1, vec![1], vec![1.0], vec![0.0], vec![1.0], 0.5).unwrap()
    }

    #[test]
    fn degenerate_game_is_valid() {
        assert!(trivial_game().validate().is_empty());
    }

    #[test]
    fn short_transition_row_is_reported() {
        let g = MarkovGame::from_tables(
            2,
            vec![1],
            vec![0.5, 0.4, 0.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            0.9,
        )
        .unwrap();
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].table, "transitions");
        assert_eq!(v[0].index, vec![0, 0]);
        assert!(MarkovGame::new(
            2,
            vec![1],
            vec![0.5, 0.4, 0.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            0.9
        )
        .is_err());
    }

    #[test]
    fn out_of_range_reward_and_gamma() {
        let g =
            MarkovGame::from_tables(1, vec![1], vec![1.0], vec![1.5], vec![1.0], 1.0).unwrap();
        let tables: Vec<_> = g.validate().iter().map(|v| v.table).collect();
        assert_eq!(tables, vec!["gamma", "rewards"]);
    }

    #[test]
    fn joint_index_player_one_slowest() {
        let j = JointActions::new(&[2, 3, 4]);
        assert_eq!(j.size(), 24);
        assert_eq!(j.encode(&[1, 2, 3]), (3 + 2) * 4 + 3);
        for a in 0..24 {
            assert_eq!(j.encode(&j.decode(a)), a);
        }
        assert_eq!(j.decode(5), vec![0, 1, 1]);
    }

    #[test]
    fn joint_distribution_examples() {
        let g = random_game(0, 2, 1, &[2, 2], 0.5).unwrap();
        let det = ProductPolicy::constant(&g, &[1, 0]).unwrap();
        assert_eq!(det.joint_distribution(0), vec![0.0, 0.0, 1.0, 0.0]);

        let uni = ProductPolicy::uniform(&g);
        assert_eq!(uni.joint_distribution(0), vec![0.25; 4]);

        let p = ProductPolicy::new(&[2, 2], 1, vec![vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let got = p.joint_distribution(0);
        for (g, e) in got.iter().zip([0.15, 0.15, 0.35, 0.35]) {
            assert!((g - e).abs() < 1e-15);
        }
    }

    #[test]
    fn random_game_is_deterministic_and_valid() {
        let a = random_game(0, 2, 3, &[2, 2], 0.9).unwrap();
        let b = random_game(0, 2, 3, &[2, 2], 0.9).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        assert_ne!(a, random_game(1, 2, 3, &[2, 2], 0.9).unwrap());
        assert!(random_game(0, 2, 3, &[2], 0.9).is_err());
        assert!(random_game(0, 1, 3, &[2], 1.0).is_err());
    }

    #[test]
    fn policy_rejects_bad_rows() {
        assert!(ProductPolicy::new(&[2], 1, vec![vec![0.5, 0.6]]).is_err());
        assert!(ProductPolicy::new(&[2], 1, vec![vec![1.5, -0.5]]).is_err());
        assert!(ProductPolicy::new(&[2], 2, vec![vec![1.0, 0.0]]).is_err());
    }
}
