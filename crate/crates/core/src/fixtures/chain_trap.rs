//! A long corridor hides the state where the learner errs, so the BC error is
//! small while the best response to the learner abandons the expert's path.

use log::info;

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::error::{Error, Result};
use crate::game::ProductPolicy;
use crate::registry::Named;

/// Corridor length `ceil(log((eps/2)(1-gamma)) / log gamma)`, at least 1.
pub fn chain_length(epsilon: f64, gamma: f64) -> usize {
    let k = (((epsilon / 2.0) * (1.0 - gamma)).ln() / gamma.ln()).ceil();
    if k < 1.0 {
        info!("corridor length {k} clamped to 1 for eps={epsilon}, gamma={gamma}");
        1
    } else {
        k as usize
    }
}

/// States: `s0`, corridor `1..=k`, absorbing `s_exp = k + 1`. At `s0` the row
/// player's first action enters the corridor and the second jumps to `s_exp`.
/// Rewards are paid at `s_exp` only and depend only on the column action:
/// `c1` pays `(1, 0)`, `c2` pays `(-1, 1)`.
pub fn chain_trap_game(epsilon: f64, gamma: f64) -> Result<Fixture> {
    let gamma = check_gamma(gamma)?;
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 2)")));
    }
    let k = chain_length(epsilon, gamma);
    let exp = k + 1;
    let ns = k + 2;
    let mut t = Tables::new(ns, &[2, 2]);
    for s in 0..ns {
        for a in 0..4 {
            let own = t.joint().decode(a);
            let next = match s {
                0 if own[0] == 0 => 1,
                0 => exp,
                s if s < exp => s + 1,
                _ => exp,
            };
            t.go(s, a, next);
            if s == exp {
                let (r1, r2) = if own[1] == 0 { (1.0, 0.0) } else { (-1.0, 1.0) };
                t.reward(0, s, a, r1);
                t.reward(1, s, a, r2);
            }
        }
    }
    let mut initial = vec![0.0; ns];
    initial[0] = 1.0;
    let game = t.finish(initial, gamma)?;
    let expert = ProductPolicy::constant(&game, &[0, 1])?;
    let mut col = vec![1; ns];
    col[exp] = 0;
    let learner = ProductPolicy::deterministic(&game, &[vec![0; ns], col])?;

    let expected = vec![
        Expectation::new(
            "mu_expert(s_exp)",
            Quantity::ExpertOccupancy { state: exp },
            Relation::Le,
            epsilon / 2.0,
        ),
        Expectation::new("bc_error", Quantity::BcError, Relation::Le, epsilon),
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, 1e-8),
        Expectation::new(
            "br_distance_p1(max-set)",
            Quantity::BrDistance { player: 0, rule: "max-set" },
            Relation::Eq { tol: 1e-9 },
            2.0,
        ),
    ];
    Ok(Fixture {
        name: "chain-trap".into(),
        game,
        expert,
        learner,
        deviations: vec![],
        expected,
    })
}

pub struct ChainTrap;

impl Named for ChainTrap {
    fn name(&self) -> &'static str {
        "chain-trap"
    }
    fn describe(&self) -> &'static str {
        "corridor game: BC error at most eps, best-response distance 2 (--epsilon, --gamma)"
    }
}

impl FixtureBuilder for ChainTrap {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        chain_trap_game(p.epsilon.unwrap_or(0.1), p.gamma.unwrap_or(0.9))
    }
}
