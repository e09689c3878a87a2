//! Equilibrium support recovery from a lower-bound oracle: an action is kept
//! when pinning its payoffs to a large negative constant raises the bound.

use log::{debug, warn};

use super::m_rho::MRhoOracle;
use crate::bimatrix::BimatrixGame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCall {
    /// 1 or 2.
    pub player: usize,
    pub action: usize,
    /// Description of the queried matrix pair.
    pub matrix: String,
    pub delta: f64,
    pub bound: f64,
    pub included: bool,
    /// Bound within the decision margin of the threshold on either side.
    pub near_threshold: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecoveryStatus {
    Recovered,
    /// The named player (1 or 2) ended with no action kept.
    EmptySupport { player: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportRecoveryResult {
    pub support1: Vec<usize>,
    pub support2: Vec<usize>,
    /// Oracle value on the unmodified game.
    pub baseline: f64,
    pub k: f64,
    pub delta: f64,
    /// Slack after rescaling into the unit box.
    pub eps_used: f64,
    /// Factor the payoffs were divided by.
    pub scale: f64,
    pub margin: f64,
    pub calls: Vec<OracleCall>,
    pub status: RecoveryStatus,
}

impl SupportRecoveryResult {
    pub fn is_recovered(&self) -> bool {
        self.status == RecoveryStatus::Recovered
    }
}

pub fn support_recovery(game: &BimatrixGame, eps: f64, oracle: &dyn MRhoOracle) -> Result<SupportRecoveryResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("precision {eps} must be positive")));
    }
    let mut g = game.clone();
    let mut eps = eps;
    let mut scale = 1.0;
    while g.max_abs() >= 1.0 {
        g = g.scaled(0.5);
        eps /= 2.0;
        scale *= 2.0;
    }
    if scale > 1.0 {
        debug!("payoffs divided by {scale}; precision now {eps}");
    }
    let k = -(1.0 + g.max_abs()) / 2.0;
    let delta = eps / k.abs();
    let margin = 2.0 * oracle.resolution();
    let baseline = oracle.lower_bound(&g, delta)?;
    let threshold = baseline + margin;
    debug!("K = {k}, delta = {delta}, baseline = {baseline}");

    let mut calls = Vec::new();
    let mut decide = |player: usize, action: usize, query: &BimatrixGame, label: String| -> Result<bool> {
        let bound = oracle.lower_bound(query, delta)?;
        let included = bound > threshold;
        let near_threshold = bound.is_finite() && (bound - threshold).abs() <= margin;
        if near_threshold {
            warn!("player {player} action {action}: bound {bound} within {margin} of threshold {threshold}");
        }
        calls.push(OracleCall {
            player,
            action,
            matrix: label,
            delta,
            bound,
            included,
            near_threshold,
        });
        Ok(included)
    };

    let mut work = g.clone();
    let mut support1 = Vec::new();
    for i in 0..g.rows() {
        let candidate = work.with_row_player_action(i, k);
        let query = candidate.with_a2_of(&g);
        if decide(1, i, &query, format!("A1 with row {i} pinned, original A2"))? {
            support1.push(i);
        } else {
            work = candidate;
        }
    }
    let mut work = g.clone();
    let mut support2 = Vec::new();
    for j in 0..g.cols() {
        let candidate = work.with_col_player_action(j, k);
        let query = candidate.with_a1_of(&g);
        if decide(2, j, &query, format!("original A1, A2 with column {j} pinned"))? {
            support2.push(j);
        } else {
            work = candidate;
        }
    }
    let status = if support1.is_empty() {
        RecoveryStatus::EmptySupport { player: 1 }
    } else if support2.is_empty() {
        RecoveryStatus::EmptySupport { player: 2 }
    } else {
        RecoveryStatus::Recovered
    };
    Ok(SupportRecoveryResult {
        support1,
        support2,
        baseline,
        k,
        delta,
        eps_used: eps,
        scale,
        margin,
        calls,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Named;

    /// Oracle reporting a fixed high bound only for games in which a marked
    /// payoff entry is still untouched.
    struct Marker;

    impl Named for Marker {
        fn name(&self) -> &'static str {
            "marker"
        }
    }

    impl MRhoOracle for Marker {
        fn lower_bound(&self, game: &BimatrixGame, _eps: f64) -> Result<f64> {
            let pinned_row = game.a1(1, 0) < -0.5;
            let pinned_col = game.a2(0, 0) < -0.5;
            Ok(if pinned_row || pinned_col { 1.0 } else { 0.0 })
        }
        fn resolution(&self) -> f64 {
            0.0
        }
    }

    #[test]
    fn follows_the_oracle() {
        let g = BimatrixGame::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]], vec![vec![0.1, 0.2], vec![0.3, 0.4]])
            .unwrap();
        let r = support_recovery(&g, 0.1, &Marker).unwrap();
        assert_eq!(r.support1, vec![1]);
        assert_eq!(r.support2, vec![0]);
        assert_eq!(r.calls.len(), 4);
        assert!(r.is_recovered());
        assert!((r.k + 0.7).abs() < 1e-12);
    }

    #[test]
    fn rescales_large_payoffs() {
        let g = BimatrixGame::new(vec![vec![3.0, 0.0], vec![0.0, 0.0]], vec![vec![0.0, 0.0], vec![0.0, 0.0]])
            .unwrap();
        let r = support_recovery(&g, 0.4, &Marker).unwrap();
        assert_eq!(r.scale, 4.0);
        assert!((r.eps_used - 0.1).abs() < 1e-15);
    }
}
