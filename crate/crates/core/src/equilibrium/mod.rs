//! Best responses, gaps, regularised zero-sum solving, bimatrix LPs and the
//! occupancy-error lower-bound machinery.

mod best_response;
mod delta;
mod gap;
mod m_rho;
mod recovery;
mod regularized;
mod response;
pub mod simplex;
mod support;

pub use best_response::{best_response, induced_mdp, soft_best_response, BestResponseResult, InducedMdp};
pub use delta::{tight_delta, DeltaCurve};
pub use gap::{gap_report, nash_gap, value_gap, verify_nash, GapReport, NashVerdict};
pub use m_rho::{m_rho_bruteforce, m_rho_oracles, BruteForceMRho, MRhoOracle, MRhoResult};
pub use recovery::{support_recovery, OracleCall, RecoveryStatus, SupportRecoveryResult};
pub use regularized::{regularized_nash_vi, solve_stage, RegularizedSolution, StageSolution};
pub use response::{response_distance, response_rules, Greedy, MaxSet, ResponseContext, ResponseRule, Soft};
pub use support::{bimatrix_support_solve, enumerate_nash, SupportOutcome, SupportSolution, ENUMERATION_LIMIT};

/// `log softmax(v / tau)`
pub(crate) fn log_softmax(v: &[f64], tau: f64) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m / tau + v.iter().map(|x| ((x - m) / tau).exp()).sum::<f64>().ln();
    v.iter().map(|x| x / tau - lse).collect()
}

pub(crate) fn softmax(v: &[f64], tau: f64) -> Vec<f64> {
    log_softmax(v, tau).into_iter().map(f64::exp).collect()
}
