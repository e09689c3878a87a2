//! Repeated matching pennies as a one-state zero-sum Markov game.

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::error::Result;
use crate::game::ProductPolicy;
use crate::registry::Named;

pub fn matching_pennies_game(gamma: f64) -> Result<Fixture> {
    let gamma = check_gamma(gamma)?;
    let mut t = Tables::new(1, &[2, 2]);
    for a in 0..4 {
        let own = t.joint().decode(a);
        let r = if own[0] == own[1] { 1.0 } else { -1.0 };
        t.go(0, a, 0);
        t.reward(0, 0, a, r);
        t.reward(1, 0, a, -r);
    }
    let game = t.finish(vec![1.0], gamma)?;
    let expert = ProductPolicy::uniform(&game);
    let learner = ProductPolicy::constant(&game, &[0, 0])?;
    let expected = vec![
        Expectation::new("zero_sum_violation", Quantity::ZeroSumViolation, Relation::Eq { tol: 1e-12 }, 0.0),
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, 1e-8),
        Expectation::new(
            "nash_gap(learner)",
            Quantity::NashGap(Subject::Learner),
            Relation::Eq { tol: 1e-8 },
            2.0 / (1.0 - gamma),
        ),
    ];
    Ok(Fixture {
        name: "matching-pennies".into(),
        game,
        expert,
        learner,
        deviations: vec![],
        expected,
    })
}

pub struct MatchingPennies;

impl Named for MatchingPennies {
    fn name(&self) -> &'static str {
        "matching-pennies"
    }
    fn describe(&self) -> &'static str {
        "one-state repeated matching pennies (--gamma)"
    }
}

impl FixtureBuilder for MatchingPennies {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        matching_pennies_game(p.gamma.unwrap_or(0.9))
    }
}
