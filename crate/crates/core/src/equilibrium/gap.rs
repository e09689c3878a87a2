use super::best_response::{best_response, BestResponseResult};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::tol;

#[derive(Debug, Clone)]
pub struct GapReport {
    /// `max_i gains[i]`, clamped at zero.
    pub gap: f64,
    /// Per-player best-response improvement, clamped at zero.
    pub gains: Vec<f64>,
    /// `V_i^pi(nu0)`
    pub values: Vec<f64>,
    pub responses: Vec<BestResponseResult>,
}

pub fn gap_report(game: &MarkovGame, policy: &ProductPolicy) -> Result<GapReport> {
    let values = dynamics::initial_values(game, policy)?;
    let mut gains = Vec::with_capacity(game.n_players());
    let mut responses = Vec::with_capacity(game.n_players());
    for (i, v) in values.iter().enumerate() {
        let br = best_response(game, policy, i)?;
        let gain = br.value - v;
        if gain < -tol::NASH_GAP_FLOOR {
            return Err(Error::NegativeGap { player: i, gap: gain });
        }
        gains.push(gain.max(0.0));
        responses.push(br);
    }
    Ok(GapReport {
        gap: gains.iter().copied().fold(0.0, f64::max),
        gains,
        values,
        responses,
    })
}

/// `max_i (max_{pi'_i} V_i^{pi'_i, pi_-i}(nu0) - V_i^pi(nu0))`
pub fn nash_gap(game: &MarkovGame, policy: &ProductPolicy) -> Result<f64> {
    Ok(gap_report(game, policy)?.gap)
}

/// `max_i (V_i^{expert}(nu0) - V_i^pi(nu0))`
pub fn value_gap(game: &MarkovGame, expert: &ProductPolicy, policy: &ProductPolicy) -> Result<f64> {
    let ve = dynamics::initial_values(game, expert)?;
    let vp = dynamics::initial_values(game, policy)?;
    Ok(ve
        .iter()
        .zip(&vp)
        .map(|(e, p)| e - p)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone)]
pub struct NashVerdict {
    pub is_nash: bool,
    pub gap: f64,
    pub gains: Vec<f64>,
}

pub fn verify_nash(game: &MarkovGame, policy: &ProductPolicy, tolerance: f64) -> Result<NashVerdict> {
    let report = gap_report(game, policy)?;
    Ok(NashVerdict {
        is_nash: report.gap <= tolerance,
        gap: report.gap,
        gains: report.gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{random_game, random_policy};

    #[test]
    fn value_gap_of_expert_is_zero() {
        let g = random_game(3, 2, 3, &[2, 2], 0.9).unwrap();
        let pi = random_policy(&g, 1);
        assert!(value_gap(&g, &pi, &pi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gap_dominates_single_deviations() {
        let g = random_game(5, 2, 3, &[2, 3], 0.8).unwrap();
        let pi = random_policy(&g, 5);
        let gap = nash_gap(&g, &pi).unwrap();
        let base = dynamics::initial_values(&g, &pi).unwrap();
        for seed in 0..20 {
            let other = random_policy(&g, 100 + seed);
            for i in 0..2 {
                let dev = pi.with_player(i, other.table(i).to_vec()).unwrap();
                let v = dynamics::initial_values(&g, &dev).unwrap()[i];
                assert!(v - base[i] <= gap + 1e-8);
            }
        }
    }
}
