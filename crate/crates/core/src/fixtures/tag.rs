//! Two-player zero-sum tag on a 2x3 grid.
//!
//! Cells are numbered `row * 3 + col`; moves are up, down, left, right. A move
//! off the grid leaves the player in place and costs it 0.5 (paid to the
//! opponent). The tagger pays 1 per step. Ending a step on the same cell swaps
//! the roles for the next step; passing through each other does not. Stage
//! rewards are halved to stay within `[-1, 1]`.

use log::info;

use super::{check_gamma, Expectation, Fixture, FixtureBuilder, FixtureParams, Quantity, Relation, Subject, Tables};
use crate::equilibrium::regularized_nash_vi;
use crate::error::Result;
use crate::game::{MarkovGame, ProductPolicy};
use crate::registry::Named;

pub const TAG_GAMMA: f64 = 0.8;
const ROWS: usize = 2;
const COLS: usize = 3;
const CELLS: usize = ROWS * COLS;

/// `(p1, p2, tagger)` with tagger in `{1, 2}`.
pub fn tag_state(p1: usize, p2: usize, tagger: usize) -> usize {
    (p1 * CELLS + p2) * 2 + (tagger - 1)
}

fn decode(s: usize) -> (usize, usize, usize) {
    (s / 2 / CELLS, s / 2 % CELLS, s % 2 + 1)
}

/// New cell and whether the move tried to leave the grid.
fn step(cell: usize, action: usize) -> (usize, bool) {
    let (r, c) = (cell / COLS, cell % COLS);
    let target = match action {
        0 if r > 0 => Some(cell - COLS),
        1 if r + 1 < ROWS => Some(cell + COLS),
        2 if c > 0 => Some(cell - 1),
        3 if c + 1 < COLS => Some(cell + 1),
        _ => None,
    };
    target.map_or((cell, true), |t| (t, false))
}

pub fn tag_game() -> MarkovGame {
    tag_game_with_gamma(TAG_GAMMA).expect("static construction")
}

pub fn tag_game_with_gamma(gamma: f64) -> Result<MarkovGame> {
    let gamma = check_gamma(gamma)?;
    let ns = CELLS * CELLS * 2;
    let mut t = Tables::new(ns, &[4, 4]);
    for s in 0..ns {
        let (p1, p2, tagger) = decode(s);
        for a in 0..16 {
            let own = t.joint().decode(a);
            let (n1, off1) = step(p1, own[0]);
            let (n2, off2) = step(p2, own[1]);
            let next_tagger = if n1 == n2 { 3 - tagger } else { tagger };
            t.go(s, a, tag_state(n1, n2, next_tagger));
            let role = if tagger == 1 { -1.0 } else { 1.0 };
            let penalty = 0.5 * (off2 as u8 as f64 - off1 as u8 as f64);
            let r1 = 0.5 * (role + penalty);
            t.reward(0, s, a, r1);
            t.reward(1, s, a, -r1);
        }
    }
    let mut initial = vec![0.0; ns];
    initial[tag_state(0, 2, 1)] = 0.5;
    initial[tag_state(0, 5, 1)] = 0.5;
    t.finish(initial, gamma)
}

/// State and joint-action permutation exchanging the two players' roles.
pub fn role_swap(s: usize, a: usize) -> (usize, usize) {
    let (p1, p2, tagger) = decode(s);
    (tag_state(p2, p1, 3 - tagger), (a % 4) * 4 + a / 4)
}

/// Tag with the entropy-regularised equilibrium at `tau` as the expert and
/// the uniform policy as the learner.
pub fn tag_fixture(tau: f64, gamma: f64) -> Result<Fixture> {
    let game = tag_game_with_gamma(gamma)?;
    let sol = regularized_nash_vi(&game, tau)?;
    info!(
        "tag expert: {} sweeps, stage residual {:e}",
        sol.sweeps, sol.stage_residual
    );
    let learner = ProductPolicy::uniform(&game);
    let bias = tau * 2.0 * 4f64.ln() / (1.0 - gamma);
    let expected = vec![
        Expectation::new("zero_sum_violation", Quantity::ZeroSumViolation, Relation::Eq { tol: 1e-12 }, 0.0),
        Expectation::new("nash_gap(expert)", Quantity::NashGap(Subject::Expert), Relation::Le, bias),
    ];
    Ok(Fixture {
        name: "tag".into(),
        game,
        expert: sol.policy,
        learner,
        deviations: vec![],
        expected,
    })
}

pub struct Tag;

impl Named for Tag {
    fn name(&self) -> &'static str {
        "tag"
    }
    fn describe(&self) -> &'static str {
        "2x3 zero-sum tag with a regularised-equilibrium expert (--tau, --gamma)"
    }
}

impl FixtureBuilder for Tag {
    fn build(&self, p: &FixtureParams) -> Result<Fixture> {
        tag_fixture(p.tau.unwrap_or(0.1), p.gamma.unwrap_or(TAG_GAMMA))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = tag_game();
        assert_eq!(g.n_states(), 72);
        assert!(g.validate().is_empty());
        assert_eq!(step(0, 0), (0, true));
        assert_eq!(step(0, 3), (1, false));
        assert_eq!(step(5, 1), (5, true));
        assert_eq!(step(4, 0), (1, false));
    }

    #[test]
    fn role_swap_negates_rewards() {
        let g = tag_game();
        for s in 0..72 {
            for a in 0..16 {
                let (ss, sa) = role_swap(s, a);
                assert!((g.reward(0, ss, sa) + g.reward(0, s, a)).abs() < 1e-15);
                for s2 in 0..72 {
                    let (ss2, _) = role_swap(s2, 0);
                    assert_eq!(g.next_dist(ss, sa)[ss2], g.next_dist(s, a)[s2]);
                }
            }
        }
    }

    #[test]
    fn colocation_swaps_roles_but_crossing_does_not() {
        let g = tag_game();
        let right = 3;
        let left = 2;
        // p1 at 0 moves right onto 1 where p2 stays by bumping the top wall.
        let a = g.joint().encode(&[right, 0]);
        assert_eq!(g.next_dist(tag_state(0, 1, 1), a)[tag_state(1, 1, 2)], 1.0);
        // Adjacent players swapping cells keep their roles.
        let a = g.joint().encode(&[right, left]);
        assert_eq!(g.next_dist(tag_state(0, 1, 1), a)[tag_state(1, 0, 1)], 1.0);
    }
}
