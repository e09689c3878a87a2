//! Branching game where the expert never visits the states on which the
//! learner's behaviour matters, so matching the state-action occupancy is
//! compatible with a Nash gap linear in the horizon.

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::error::{Error, Result};
use crate::game::ProductPolicy;
use crate::registry::Named;

/// States `s0..=s_{2K}`. From `s0` and `s1`, joint `(a2, a1)` leads into the
/// odd branch (`s1`, then `s3`); anything else leads into the even branch
/// (`s2`, then `s4`). Branches then advance two indices per step and end in
/// the absorbing pair `s_{2K-1}`, `s_{2K}`. Odd states pay 1 to both players,
/// except `s1`, which pays only on the `(a2, a1)` transition.
pub fn unvisited_state_game(gamma: f64, chain_pairs: usize) -> Result<Fixture> {
    let gamma = check_gamma(gamma)?;
    if chain_pairs < 2 {
        return Err(Error::InvalidArgument(format!("chain_pairs {chain_pairs} must be at least 2")));
    }
    let ns = 2 * chain_pairs + 1;
    let last = ns - 1;
    let mut t = Tables::new(ns, &[3, 3]);
    let enter = t.joint().encode(&[1, 0]);
    for s in 0..ns {
        for a in 0..9 {
            let next = match s {
                0 => if a == enter { 1 } else { 2 },
                1 => if a == enter { 3 } else { 4 },
                s if s + 2 <= last => s + 2,
                s => s,
            };
            t.go(s, a, next);
            let r = match s {
                1 => if a == enter { 1.0 } else { 0.0 },
                s if s % 2 == 1 => 1.0,
                _ => 0.0,
            };
            t.reward(0, s, a, r);
            t.reward(1, s, a, r);
        }
    }
    let mut initial = vec![0.0; ns];
    initial[0] = 1.0;
    let game = t.finish(initial, gamma)?;

    let mut p1 = vec![0; ns];
    let mut p2 = vec![0; ns];
    p1[1] = 2;
    p2[1] = 2;
    let expert = ProductPolicy::deterministic(&game, &[p1, p2.clone()])?;
    let learner = ProductPolicy::constant(&game, &[0, 0])?;
    let mut dev = vec![0; ns];
    dev[0] = 1;
    dev[1] = 1;
    let deviation = ProductPolicy::deterministic(&game, &[dev, vec![0; ns]])?;

    let expected = vec![
        Expectation::new("eps_rho", Quantity::EpsRho, Relation::Eq { tol: 0.0 }, 0.0),
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, 1e-8),
        Expectation::new(
            "nash_gap(learner)",
            Quantity::NashGap(Subject::Learner),
            Relation::Ge,
            1.0 / (1.0 - gamma) - 1.0 - 1e-6,
        ),
        Expectation::new(
            "V1(deviation)",
            Quantity::Value { subject: Subject::Deviation(0), player: 0 },
            Relation::Eq { tol: 1e-8 },
            gamma / (1.0 - gamma),
        ),
    ];
    Ok(Fixture {
        name: "unvisited".into(),
        game,
        expert,
        learner,
        deviations: vec![("player 1 plays a2 at s0 and s1".into(), deviation)],
        expected,
    })
}

pub struct Unvisited;

impl Named for Unvisited {
    fn name(&self) -> &'static str {
        "unvisited"
    }
    fn describe(&self) -> &'static str {
        "branching game: equal state-action occupancy, gap linear in horizon (--gamma, --chain-pairs)"
    }
}

impl FixtureBuilder for Unvisited {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        unvisited_state_game(p.gamma.unwrap_or(0.9), p.chain_pairs.unwrap_or(5))
    }
}
