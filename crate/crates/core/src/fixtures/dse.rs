//! Two-state game in which playing action 0 forever is weakly dominant for
//! both players.

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::error::Result;
use crate::game::ProductPolicy;
use crate::registry::Named;

/// Each player earns 1 for its own action 0 and 0 otherwise. From `s0`,
/// matching actions stay and mismatches move to `s1`; from `s1`, only
/// `(0, 0)` returns to `s0`.
pub fn dse_game(gamma: f64) -> Result<Fixture> {
    let gamma = check_gamma(gamma)?;
    let mut t = Tables::new(2, &[2, 2]);
    for s in 0..2 {
        for a in 0..4 {
            let own = t.joint().decode(a);
            let next = match (s, own[0] == own[1], a) {
                (0, true, _) => 0,
                (0, false, _) => 1,
                (_, _, 0) => 0,
                _ => 1,
            };
            t.go(s, a, next);
            for (i, &ai) in own.iter().enumerate() {
                t.reward(i, s, a, if ai == 0 { 1.0 } else { 0.0 });
            }
        }
    }
    let game = t.finish(vec![0.5, 0.5], gamma)?;
    let expert = ProductPolicy::constant(&game, &[0, 0])?;
    let learner = ProductPolicy::constant(&game, &[1, 1])?;
    let h = 1.0 / (1.0 - gamma);
    let expected = vec![
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, 1e-8),
        Expectation::new(
            "V1(expert)",
            Quantity::Value { subject: Subject::Expert, player: 0 },
            Relation::Eq { tol: 1e-8 },
            h,
        ),
        Expectation::new(
            "br_distance_p1(greedy)",
            Quantity::BrDistance { player: 0, rule: "greedy" },
            Relation::Eq { tol: 1e-12 },
            0.0,
        ),
        Expectation::new(
            "br_distance_p2(greedy)",
            Quantity::BrDistance { player: 1, rule: "greedy" },
            Relation::Eq { tol: 1e-12 },
            0.0,
        ),
    ];
    Ok(Fixture {
        name: "dse".into(),
        game,
        expert,
        learner,
        deviations: vec![],
        expected,
    })
}

pub struct Dse;

impl Named for Dse {
    fn name(&self) -> &'static str {
        "dse"
    }
    fn describe(&self) -> &'static str {
        "two-state game with a weakly dominant constant profile (--gamma)"
    }
}

impl FixtureBuilder for Dse {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        dse_game(p.gamma.unwrap_or(0.9))
    }
}
