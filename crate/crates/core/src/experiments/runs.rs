//! Perturbation runs: per-record imitation errors, best-response distances
//! and Nash gaps, the tight delta curve, and temperature sweeps.

use std::sync::Arc;

use log::warn;
use rayon::prelude::*;

use super::mc::mc_bc_error;
use super::perturb::Perturbation;
use crate::dynamics::{bc_errors_under, occupancy};
use crate::equilibrium::{gap_report, regularized_nash_vi, response_distance, tight_delta, DeltaCurve, ResponseContext, ResponseRule};
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};
use crate::sampling::mix_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRecord {
    pub noise: f64,
    pub seed: u64,
    pub eps_bc_exact: f64,
    /// NaN when Monte-Carlo estimation is disabled.
    pub eps_bc_mc: f64,
    pub br_dist: Vec<f64>,
    pub nash_gap: f64,
    /// `(2 n eps_bc + delta_hat(eps_bc)) / (1 - gamma)^2`
    pub bound_value: f64,
    /// Largest Nash gap among records with BC error at most this one's.
    pub cummax_gap: f64,
    pub failure: Option<String>,
}

impl PerturbationRecord {
    fn failed(noise: f64, seed: u64, n_players: usize, why: String) -> Self {
        Self {
            noise,
            seed,
            eps_bc_exact: f64::NAN,
            eps_bc_mc: f64::NAN,
            br_dist: vec![f64::NAN; n_players],
            nash_gap: f64::NAN,
            bound_value: f64::NAN,
            cummax_gap: f64::NAN,
            failure: Some(why),
        }
    }

    pub fn max_br_dist(&self) -> f64 {
        self.br_dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn satisfies_bound(&self) -> bool {
        self.failure.is_none() && self.nash_gap <= self.bound_value + 1e-12
    }
}

/// Everything a perturbation run needs besides the noise grid.
#[derive(Clone)]
pub struct RunSetup<'a> {
    pub game: &'a MarkovGame,
    pub expert: &'a ProductPolicy,
    pub perturbation: Arc<dyn Perturbation>,
    pub rule: Arc<dyn ResponseRule>,
    /// Temperature handed to temperature-aware response rules.
    pub tau: Option<f64>,
    /// Monte-Carlo episodes per record; 0 disables the estimate.
    pub episodes: usize,
}

#[derive(Debug, Clone)]
pub struct BoundValidation {
    /// Sorted by `(noise, seed)`.
    pub records: Vec<PerturbationRecord>,
    pub curve: DeltaCurve,
    pub gamma: f64,
    pub n_players: usize,
}

impl BoundValidation {
    pub fn completed(&self) -> impl Iterator<Item = &PerturbationRecord> {
        self.records.iter().filter(|r| r.failure.is_none())
    }
}

fn evaluate(setup: &RunSetup<'_>, mu: &[f64], noise: f64, seed: u64) -> Result<PerturbationRecord> {
    let learner = setup.perturbation.perturb(setup.expert, noise, seed)?;
    let eps_bc_exact = bc_errors_under(mu, setup.expert, &learner).into_iter().fold(0.0, f64::max);
    let eps_bc_mc = if setup.episodes > 0 {
        let mc_seed = mix_seed(mix_seed(seed, noise.to_bits()), 0x6d63);
        mc_bc_error(setup.game, setup.expert, &learner, setup.episodes, mc_seed)?
    } else {
        f64::NAN
    };
    let report = gap_report(setup.game, &learner)?;
    let br_dist = report
        .responses
        .iter()
        .enumerate()
        .map(|(i, exact)| {
            let ctx = ResponseContext {
                game: setup.game,
                policy: &learner,
                player: i,
                anchor: setup.expert,
                exact,
                tau: setup.tau,
            };
            Ok(response_distance(mu, &setup.rule.response(&ctx)?, setup.expert, i))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PerturbationRecord {
        noise,
        seed,
        eps_bc_exact,
        eps_bc_mc,
        br_dist,
        nash_gap: report.gap,
        bound_value: f64::NAN,
        cummax_gap: f64::NAN,
        failure: None,
    })
}

/// Perturbs the expert at every `(noise, seed)` cell and checks the
/// exploitability bound against the run's own tight delta curve.
pub fn bound_validation_run(setup: &RunSetup<'_>, noise_levels: &[f64], seeds: &[u64]) -> Result<BoundValidation> {
    let mu = occupancy(setup.game, setup.expert)?.mu;
    let n = setup.game.n_players();
    let mut cells: Vec<(f64, u64)> = noise_levels
        .iter()
        .flat_map(|&eta| seeds.iter().map(move |&seed| (eta, seed)))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut records: Vec<PerturbationRecord> = cells
        .par_iter()
        .map(|&(eta, seed)| {
            evaluate(setup, &mu, eta, seed).unwrap_or_else(|e| {
                warn!("record noise={eta} seed={seed} failed: {e}");
                PerturbationRecord::failed(eta, seed, n, e.to_string())
            })
        })
        .collect();

    let samples: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.failure.is_none())
        .map(|r| (r.eps_bc_exact, r.max_br_dist()))
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let curve = tight_delta(&samples)?;
    let horizon = (1.0 - setup.game.gamma()).powi(2);
    let mut by_eps: Vec<usize> = (0..records.len()).filter(|&k| records[k].failure.is_none()).collect();
    by_eps.sort_by(|&a, &b| records[a].eps_bc_exact.total_cmp(&records[b].eps_bc_exact));
    let mut running = f64::NEG_INFINITY;
    for &k in &by_eps {
        running = running.max(records[k].nash_gap);
        records[k].cummax_gap = running;
    }
    // Ties in eps share the largest gap among them.
    for w in (0..by_eps.len()).rev().skip(1) {
        let (a, b) = (by_eps[w], by_eps[w + 1]);
        if records[a].eps_bc_exact == records[b].eps_bc_exact {
            records[a].cummax_gap = records[b].cummax_gap;
        }
    }
    for r in records.iter_mut().filter(|r| r.failure.is_none()) {
        r.bound_value = (2.0 * n as f64 * r.eps_bc_exact + curve.eval(r.eps_bc_exact)) / horizon;
    }
    Ok(BoundValidation {
        records,
        curve,
        gamma: setup.game.gamma(),
        n_players: n,
    })
}

#[derive(Debug, Clone)]
pub struct TemperatureCurve {
    pub tau: f64,
    /// `None` when the solve or the run failed for this temperature.
    pub run: Option<BoundValidation>,
    pub values: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TemperatureSweep {
    pub grid: Vec<f64>,
    pub curves: Vec<TemperatureCurve>,
}

/// Shared evaluation grid: `points` evenly spaced values on `[0, max eps]`.
pub fn shared_grid(max_eps: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|k| max_eps * k as f64 / (points - 1) as f64).collect()
}

/// For each temperature, solves the regularised equilibrium, perturbs it and
/// builds its delta curve; curves are then evaluated on one shared grid.
pub fn temperature_sweep(
    game: &MarkovGame,
    taus: &[f64],
    noise_levels: &[f64],
    seeds: &[u64],
    perturbation: Arc<dyn Perturbation>,
    rule: Arc<dyn ResponseRule>,
    grid_points: usize,
) -> Result<TemperatureSweep> {
    let mut curves = Vec::with_capacity(taus.len());
    for &tau in taus {
        let run = regularized_nash_vi(game, tau).and_then(|sol| {
            let setup = RunSetup {
                game,
                expert: &sol.policy,
                perturbation: perturbation.clone(),
                rule: rule.clone(),
                tau: Some(tau),
                episodes: 0,
            };
            bound_validation_run(&setup, noise_levels, seeds)
        });
        match run {
            Ok(run) => curves.push(TemperatureCurve {
                tau,
                run: Some(run),
                values: vec![],
                error: None,
            }),
            Err(e) => {
                warn!("temperature {tau} failed: {e}");
                curves.push(TemperatureCurve {
                    tau,
                    run: None,
                    values: vec![],
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let max_eps = curves
        .iter()
        .filter_map(|c| c.run.as_ref())
        .flat_map(|r| r.completed().map(|rec| rec.eps_bc_exact))
        .fold(0.0, f64::max);
    let grid = shared_grid(max_eps, grid_points);
    for c in curves.iter_mut() {
        if let Some(run) = &c.run {
            c.values = run.curve.on_grid(&grid);
        }
    }
    Ok(TemperatureSweep { grid, curves })
}

/// Evenly spaced noise levels on `[min, max]`.
pub fn noise_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => (0..count)
            .map(|k| min + (max - min) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}
