//! Three-state cooperative cycle where matching the state occupancy says
//! nothing about the Nash gap.

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::error::Result;
use crate::game::{MarkovGame, ProductPolicy};
use crate::registry::Named;

/// Joint `(a1, a1)` advances `s0 -> s1 -> s2 -> s0` paying `1/3, 2/3, 1` to
/// both players; any other joint action self-loops with reward `-1`.
pub fn figure1_game(gamma: f64) -> Result<Fixture> {
    let gamma = check_gamma(gamma)?;
    let mut t = Tables::new(3, &[2, 2]);
    let advance = [1.0 / 3.0, 2.0 / 3.0, 1.0];
    for s in 0..3 {
        for a in 0..4 {
            let (next, r) = if a == 0 { ((s + 1) % 3, advance[s]) } else { (s, -1.0) };
            t.go(s, a, next);
            t.reward(0, s, a, r);
            t.reward(1, s, a, r);
        }
    }
    let game: MarkovGame = t.finish(vec![1.0 / 3.0; 3], gamma)?;
    let expert = ProductPolicy::constant(&game, &[0, 0])?;
    let learner = ProductPolicy::constant(&game, &[0, 1])?;
    let h = 1.0 / (1.0 - gamma);
    let expected = vec![
        Expectation::new("eps_mu", Quantity::EpsMu, Relation::Eq { tol: 1e-10 }, 0.0),
        Expectation::new("eps_rho", Quantity::EpsRho, Relation::Eq { tol: 1e-10 }, 2.0),
        Expectation::new(
            "V2(expert)",
            Quantity::Value { subject: Subject::Expert, player: 1 },
            Relation::Eq { tol: 1e-8 },
            (2.0 / 3.0) * h,
        ),
        Expectation::new(
            "V2(learner)",
            Quantity::Value { subject: Subject::Learner, player: 1 },
            Relation::Eq { tol: 1e-8 },
            -h,
        ),
        Expectation::new("value_gap", Quantity::ValueGap, Relation::Eq { tol: 1e-8 }, (5.0 / 3.0) * h),
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, 1e-8),
        Expectation::new(
            "nash_gap(learner)",
            Quantity::NashGap(Subject::Learner),
            Relation::Ge,
            (5.0 / 3.0) * h - 1e-6,
        ),
    ];
    Ok(Fixture {
        name: "figure1".into(),
        deviations: vec![("player 2 plays a2".into(), learner.clone())],
        game,
        expert,
        learner,
        expected,
    })
}

pub struct Figure1;

impl Named for Figure1 {
    fn name(&self) -> &'static str {
        "figure1"
    }
    fn describe(&self) -> &'static str {
        "cooperative 3-cycle: equal state occupancy, large Nash gap (--gamma)"
    }
}

impl FixtureBuilder for Figure1 {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        figure1_game(p.gamma.unwrap_or(0.9))
    }
}
