//! Grid evaluation of the tightest Nash-gap lower bound achievable at a given
//! occupancy error, for one-state 2x2 games.

use std::sync::Arc;

use rayon::prelude::*;

use super::support::enumerate_nash;
use crate::bimatrix::BimatrixGame;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, PartialEq)]
pub struct MRhoResult {
    /// Smallest Nash gap in the band, or `+inf` when the band is empty.
    pub value: f64,
    /// Profile attaining `value`.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub equilibria: usize,
    pub grid_points: usize,
}

fn grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if *g.last().unwrap() < 1.0 - 1e-12 {
        g.push(1.0);
    }
    g
}

/// `min { gap(x, y) : | ||x y' - x_E y_E'||_1 - eps_rho | <= grid_step }` over
/// every exact equilibrium `(x_E, y_E)` and grid profile `(x, y)`.
pub fn m_rho_bruteforce(game: &BimatrixGame, eps_rho: f64, grid_step: f64) -> Result<MRhoResult> {
    if game.rows() != 2 || game.cols() != 2 {
        return Err(Error::SizeGuard(format!(
            "the brute-force oracle handles 2x2 games only, got {}x{}",
            game.rows(),
            game.cols()
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} outside (0, 0.1]")));
    }
    if !(eps_rho >= 0.0) {
        return Err(Error::InvalidArgument(format!("occupancy error {eps_rho} must be non-negative")));
    }
    let equilibria = enumerate_nash(game, 0.0)?;
    let points = grid(grid_step);
    let targets: Vec<[f64; 4]> = equilibria
        .iter()
        .map(|e| [e.x[0] * e.y[0], e.x[0] * e.y[1], e.x[1] * e.y[0], e.x[1] * e.y[1]])
        .collect();

    let best = points
        .par_iter()
        .enumerate()
        .map(|(ip, &p)| {
            let x = [1.0 - p, p];
            let mut local: Option<(f64, usize, usize)> = None;
            for (iq, &q) in points.iter().enumerate() {
                let y = [1.0 - q, q];
                let joint = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
                let in_band = targets.iter().any(|t| {
                    let d: f64 = joint.iter().zip(t).map(|(a, b)| (a - b).abs()).sum();
                    (d - eps_rho).abs() <= grid_step
                });
                if in_band {
                    let g = game.nash_gap(&x, &y);
                    if local.is_none_or(|(v, _, _)| g < v) {
                        local = Some((g, ip, iq));
                    }
                }
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, o) | (o, None) => o,
                (Some(a), Some(b)) => Some(if (b.0, b.1, b.2) < (a.0, a.1, a.2) { b } else { a }),
            },
        );
    Ok(match best {
        None => MRhoResult {
            value: f64::INFINITY,
            witness: None,
            equilibria: equilibria.len(),
            grid_points: points.len(),
        },
        Some((v, ip, iq)) => MRhoResult {
            value: v,
            witness: Some((
                vec![1.0 - points[ip], points[ip]],
                vec![1.0 - points[iq], points[iq]],
            )),
            equilibria: equilibria.len(),
            grid_points: points.len(),
        },
    })
}

/// Any evaluator of the occupancy-error lower bound.
pub trait MRhoOracle: Named + Send + Sync {
    fn lower_bound(&self, game: &BimatrixGame, eps_rho: f64) -> Result<f64>;
    /// Additive resolution of the returned bound.
    fn resolution(&self) -> f64;
}

pub struct BruteForceMRho {
    pub grid_step: f64,
}

impl Named for BruteForceMRho {
    fn name(&self) -> &'static str {
        "bruteforce"
    }
    fn describe(&self) -> &'static str {
        "grid search over 2x2 product profiles"
    }
}

impl MRhoOracle for BruteForceMRho {
    fn lower_bound(&self, game: &BimatrixGame, eps_rho: f64) -> Result<f64> {
        Ok(m_rho_bruteforce(game, eps_rho, self.grid_step)?.value)
    }
    fn resolution(&self) -> f64 {
        self.grid_step
    }
}

pub fn m_rho_oracles(grid_step: f64) -> Registry<dyn MRhoOracle> {
    let mut reg: Registry<dyn MRhoOracle> = Registry::new("m-rho oracle");
    reg.register(Arc::new(BruteForceMRho { grid_step }));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimatrix::{matching_pennies, prisoners_dilemma};

    #[test]
    fn zero_error_gives_zero() {
        for g in [matching_pennies(0.5), prisoners_dilemma()] {
            assert_eq!(m_rho_bruteforce(&g, 0.0, 0.01).unwrap().value, 0.0);
        }
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = grid(0.003);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(grid(0.1).len(), 11);
    }

    #[test]
    fn rejects_bad_inputs() {
        let big = BimatrixGame::new(vec![vec![0.0; 3]; 3], vec![vec![0.0; 3]; 3]).unwrap();
        assert!(m_rho_bruteforce(&big, 0.1, 0.01).is_err());
        assert!(m_rho_bruteforce(&prisoners_dilemma(), 0.1, 0.5).is_err());
    }
}
