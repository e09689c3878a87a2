//! Executable counterexample games, each bundled with an expert, a learner
//! and the closed-form quantities the construction is meant to exhibit.

mod chain_trap;
mod dse;
mod figure1;
mod pennies;
mod tag;
mod unvisited;

use std::fmt;
use std::sync::Arc;

pub use chain_trap::{chain_length, chain_trap_game, ChainTrap};
pub use dse::{dse_game, Dse};
pub use figure1::{figure1_game, Figure1};
pub use pennies::{matching_pennies_game, MatchingPennies};
pub use tag::{role_swap, tag_fixture, tag_game, tag_game_with_gamma, tag_state, Tag, TAG_GAMMA};
pub use unvisited::{unvisited_state_game, Unvisited};

use crate::dynamics;
use crate::equilibrium::{self, response_distance, ResponseContext};
use crate::error::{Error, Result};
use crate::game::{JointActions, MarkovGame, ProductPolicy};
use crate::registry::{Named, Registry};

/// Construction parameters; builders fall back to their own defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixtureParams {
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub chain_pairs: Option<usize>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subject {
    Expert,
    Learner,
    Deviation(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// `||mu_learner - mu_expert||_1`
    EpsMu,
    /// `||rho_learner - rho_expert||_1`
    EpsRho,
    BcError,
    NashGap(Subject),
    /// `max_i V_i^expert(nu0) - V_i^learner(nu0)`
    ValueGap,
    Value { subject: Subject, player: usize },
    ExpertOccupancy { state: usize },
    /// Expert-weighted distance between the expert and the named response
    /// rule's best response to the learner.
    BrDistance { player: usize, rule: &'static str },
    ZeroSumViolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    Eq { tol: f64 },
    Ge,
    Le,
}

impl Relation {
    pub fn holds(&self, computed: f64, expected: f64) -> bool {
        match *self {
            Relation::Eq { tol } => (computed - expected).abs() <= tol,
            Relation::Ge => computed >= expected,
            Relation::Le => computed <= expected,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Eq { tol } => write!(f, "= (+-{tol:e})"),
            Relation::Ge => f.write_str(">="),
            Relation::Le => f.write_str("<="),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub label: String,
    pub quantity: Quantity,
    pub relation: Relation,
    pub value: f64,
}

impl Expectation {
    pub fn new(label: impl Into<String>, quantity: Quantity, relation: Relation, value: f64) -> Self {
        Self {
            label: label.into(),
            quantity,
            relation,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub label: String,
    pub relation: Relation,
    pub expected: f64,
    pub computed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub game: MarkovGame,
    pub expert: ProductPolicy,
    pub learner: ProductPolicy,
    pub deviations: Vec<(String, ProductPolicy)>,
    pub expected: Vec<Expectation>,
}

impl Fixture {
    fn subject(&self, s: Subject) -> Result<&ProductPolicy> {
        match s {
            Subject::Expert => Ok(&self.expert),
            Subject::Learner => Ok(&self.learner),
            Subject::Deviation(k) => self
                .deviations
                .get(k)
                .map(|(_, p)| p)
                .ok_or_else(|| Error::InvalidArgument(format!("fixture has no deviation {k}"))),
        }
    }

    pub fn compute(&self, q: &Quantity) -> Result<f64> {
        let g = &self.game;
        Ok(match *q {
            Quantity::EpsMu => dynamics::measure_errors(g, &self.expert, &self.learner)?.0,
            Quantity::EpsRho => dynamics::measure_errors(g, &self.expert, &self.learner)?.1,
            Quantity::BcError => dynamics::bc_error(g, &self.expert, &self.learner)?,
            Quantity::NashGap(s) => equilibrium::nash_gap(g, self.subject(s)?)?,
            Quantity::ValueGap => equilibrium::value_gap(g, &self.expert, &self.learner)?,
            Quantity::Value { subject, player } => dynamics::initial_values(g, self.subject(subject)?)?[player],
            Quantity::ExpertOccupancy { state } => dynamics::occupancy(g, &self.expert)?.mu[state],
            Quantity::BrDistance { player, rule } => {
                let rule = equilibrium::response_rules().get(rule)?;
                let exact = equilibrium::best_response(g, &self.learner, player)?;
                let ctx = ResponseContext {
                    game: g,
                    policy: &self.learner,
                    player,
                    anchor: &self.expert,
                    exact: &exact,
                    tau: None,
                };
                let table = rule.response(&ctx)?;
                let mu = dynamics::occupancy(g, &self.expert)?.mu;
                response_distance(&mu, &table, &self.expert, player)
            }
            Quantity::ZeroSumViolation => g
                .zero_sum_violation()
                .ok_or_else(|| Error::InvalidArgument("zero-sum check needs two players".into()))?,
        })
    }

    /// Evaluates every expectation against freshly computed values.
    pub fn check(&self) -> Result<Vec<CheckRow>> {
        self.expected
            .iter()
            .map(|e| {
                let computed = self.compute(&e.quantity)?;
                Ok(CheckRow {
                    label: e.label.clone(),
                    relation: e.relation,
                    expected: e.value,
                    computed,
                    pass: e.relation.holds(computed, e.value),
                })
            })
            .collect()
    }
}

pub trait FixtureBuilder: Named + Send + Sync {
    fn build(&self, params: &FixtureParams) -> Result<Fixture>;
}

pub fn fixtures() -> Registry<dyn FixtureBuilder> {
    let mut reg: Registry<dyn FixtureBuilder> = Registry::new("fixture");
    reg.register(Arc::new(Figure1))
        .register(Arc::new(Unvisited))
        .register(Arc::new(ChainTrap))
        .register(Arc::new(Dse))
        .register(Arc::new(Tag))
        .register(Arc::new(MatchingPennies));
    reg
}

pub(crate) fn check_gamma(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(Error::InvalidArgument(format!("discount {gamma} outside (0, 1)")))
    }
}

/// Mutable transition and reward tables for assembling a fixture game.
pub(crate) struct Tables {
    n_states: usize,
    counts: Vec<usize>,
    joint: JointActions,
    transitions: Vec<f64>,
    rewards: Vec<f64>,
}

impl Tables {
    pub(crate) fn new(n_states: usize, counts: &[usize]) -> Self {
        let joint = JointActions::new(counts);
        let na = joint.size();
        Self {
            n_states,
            counts: counts.to_vec(),
            transitions: vec![0.0; n_states * na * n_states],
            rewards: vec![0.0; counts.len() * n_states * na],
            joint,
        }
    }

    pub(crate) fn joint(&self) -> &JointActions {
        &self.joint
    }

    /// Deterministic move from `s` under joint action `a`.
    pub(crate) fn go(&mut self, s: usize, a: usize, next: usize) {
        let (na, ns) = (self.joint.size(), self.n_states);
        let row = &mut self.transitions[(s * na + a) * ns..(s * na + a + 1) * ns];
        row.fill(0.0);
        row[next] = 1.0;
    }

    pub(crate) fn reward(&mut self, i: usize, s: usize, a: usize, r: f64) {
        let na = self.joint.size();
        self.rewards[(i * self.n_states + s) * na + a] = r;
    }

    pub(crate) fn finish(self, initial_dist: Vec<f64>, gamma: f64) -> Result<MarkovGame> {
        MarkovGame::new(
            self.n_states,
            self.counts,
            self.transitions,
            self.rewards,
            initial_dist,
            gamma,
        )
    }
}
