//! Entropy-regularised Nash value iteration for two-player zero-sum games.

use rayon::prelude::*;

use super::{log_softmax, softmax};
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::tol;

#[derive(Debug, Clone)]
pub struct StageSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `x' Q y + tau H(x) - tau H(y)`
    pub value: f64,
    pub iterations: usize,
    /// Sup-norm distance of `(x, y)` from the softmax best responses to each other.
    pub residual: f64,
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

fn row_times(q: &[f64], m2: usize, y: &[f64]) -> Vec<f64> {
    q.chunks(m2)
        .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
        .collect()
}

fn col_times(q: &[f64], m2: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m2];
    for (row, xi) in q.chunks(m2).zip(x) {
        for (o, a) in out.iter_mut().zip(row) {
            *o += xi * a;
        }
    }
    out
}

fn fixed_point_residual(q: &[f64], m2: usize, tau: f64, x: &[f64], y: &[f64]) -> f64 {
    let bx = softmax(&row_times(q, m2, y), tau);
    let neg: Vec<f64> = col_times(q, m2, x).iter().map(|v| -v).collect();
    let by = softmax(&neg, tau);
    x.iter()
        .zip(&bx)
        .chain(y.iter().zip(&by))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Quantal-response equilibrium of the matrix game `q` (`m1 x m2`, row player
/// maximises) with entropy weight `tau`.
///
/// Damped softmax iteration in the log domain with an extragradient step; the
/// step is shrunk below [`tol::STAGE_DAMPING`] when payoffs are large relative
/// to `tau`.
pub fn solve_stage(
    q: &[f64],
    m1: usize,
    m2: usize,
    tau: f64,
    warm: Option<(&[f64], &[f64])>,
) -> Result<StageSolution> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature {tau} must be positive")));
    }
    let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
    let mid = 0.5 * (hi + lo);
    let centred: Vec<f64> = q.iter().map(|v| v - mid).collect();
    let radius = 0.5 * (hi - lo);
    let alpha = tol::STAGE_DAMPING.min(tau / (tau + 2.0 * radius));

    let (mut lx, mut ly) = match warm {
        Some((x, y)) => (
            x.iter().map(|v| v.max(1e-300).ln()).collect::<Vec<_>>(),
            y.iter().map(|v| v.max(1e-300).ln()).collect::<Vec<_>>(),
        ),
        None => (vec![0.0; m1], vec![0.0; m2]),
    };
    lx = log_softmax(&lx, 1.0);
    ly = log_softmax(&ly, 1.0);

    let step = |l: &[f64], payoff: &[f64], sign: f64| -> Vec<f64> {
        let raw: Vec<f64> = l
            .iter()
            .zip(payoff)
            .map(|(l, p)| (1.0 - alpha) * l + alpha * sign * p / tau)
            .collect();
        log_softmax(&raw, 1.0)
    };

    let mut iterations = 0;
    loop {
        let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
        let y: Vec<f64> = ly.iter().map(|v| v.exp()).collect();
        let residual = fixed_point_residual(&centred, m2, tau, &x, &y);
        if residual < tol::STAGE_INNER || iterations >= tol::STAGE_INNER_CAP {
            if residual >= tol::STAGE_INNER {
                return Err(Error::NotConverged {
                    what: "regularised stage game",
                    iterations,
                    residual,
                });
            }
            let value = row_times(q, m2, &y).iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
                + tau * entropy(&x)
                - tau * entropy(&y);
            return Ok(StageSolution {
                x,
                y,
                value,
                iterations,
                residual,
            });
        }
        let lx_mid = step(&lx, &row_times(&centred, m2, &y), 1.0);
        let ly_mid = step(&ly, &col_times(&centred, m2, &x), -1.0);
        let x_mid: Vec<f64> = lx_mid.iter().map(|v| v.exp()).collect();
        let y_mid: Vec<f64> = ly_mid.iter().map(|v| v.exp()).collect();
        lx = step(&lx, &row_times(&centred, m2, &y_mid), 1.0);
        ly = step(&ly, &col_times(&centred, m2, &x_mid), -1.0);
        iterations += 1;
    }
}

#[derive(Debug, Clone)]
pub struct RegularizedSolution {
    pub policy: ProductPolicy,
    /// Regularised value of player 1 per state.
    pub values: Vec<f64>,
    pub tau: f64,
    pub sweeps: usize,
    pub outer_residual: f64,
    /// Largest stage fixed-point residual of the returned profile.
    pub stage_residual: f64,
}

fn stage_payoffs(game: &MarkovGame, s: usize, v: &[f64]) -> Vec<f64> {
    let gamma = game.gamma();
    (0..game.n_joint())
        .map(|a| {
            let next: f64 = game.next_dist(s, a).iter().zip(v).map(|(p, v)| p * v).sum();
            game.reward(0, s, a) + gamma * next
        })
        .collect()
}

/// Regularised Nash equilibrium of a two-player zero-sum game by value
/// iteration over entropy-regularised stage games.
pub fn regularized_nash_vi(game: &MarkovGame, tau: f64) -> Result<RegularizedSolution> {
    if game.n_players() != 2 {
        return Err(Error::InvalidArgument(format!(
            "regularised Nash VI needs two players, got {}",
            game.n_players()
        )));
    }
    if let Some(v) = game.zero_sum_violation() {
        if v > tol::ZERO_SUM {
            return Err(Error::NotZeroSum { max_violation: v });
        }
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature {tau} must be positive")));
    }
    let (m1, m2) = (game.action_counts()[0], game.action_counts()[1]);
    let ns = game.n_states();
    let mut v = vec![0.0; ns];
    let mut profiles: Vec<(Vec<f64>, Vec<f64>)> =
        vec![(vec![1.0 / m1 as f64; m1], vec![1.0 / m2 as f64; m2]); ns];
    let mut sweeps = 0;
    let mut change = f64::INFINITY;

    let solve_all = |v: &[f64], profiles: &[(Vec<f64>, Vec<f64>)]| -> Result<Vec<StageSolution>> {
        (0..ns)
            .into_par_iter()
            .map(|s| {
                let q = stage_payoffs(game, s, v);
                let (x, y) = &profiles[s];
                solve_stage(&q, m1, m2, tau, Some((x, y)))
            })
            .collect()
    };

    while sweeps < tol::NASH_VI_OUTER_CAP {
        let stages = solve_all(&v, &profiles)?;
        let next: Vec<f64> = stages.iter().map(|st| st.value).collect();
        change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        profiles = stages.into_iter().map(|st| (st.x, st.y)).collect();
        sweeps += 1;
        if change < tol::NASH_VI_OUTER {
            break;
        }
    }
    if !(change < tol::NASH_VI_OUTER) {
        return Err(Error::NotConverged {
            what: "regularised Nash value iteration",
            iterations: sweeps,
            residual: change,
        });
    }
    let finals = solve_all(&v, &profiles)?;
    let stage_residual = finals.iter().map(|st| st.residual).fold(0.0, f64::max);
    let mut t1 = Vec::with_capacity(ns * m1);
    let mut t2 = Vec::with_capacity(ns * m2);
    for st in &finals {
        t1.extend_from_slice(&st.x);
        t2.extend_from_slice(&st.y);
    }
    Ok(RegularizedSolution {
        policy: ProductPolicy::new(game.action_counts(), ns, vec![t1, t2])?,
        values: v,
        tau,
        sweeps,
        outer_residual: change,
        stage_residual,
    })
}
