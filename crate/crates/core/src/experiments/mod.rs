//! Perturbation experiments around an equilibrium expert.

mod config;
mod mc;
mod output;
mod perturb;
mod runs;

pub use config::{ExperimentConfig, ExperimentKind, NoiseGrid, OutputPaths};
pub use mc::{empirical_occupancy, mc_bc_error};
pub use output::{
    curve_rows, curves_csv, envelope_csv, fmt_num, records_csv, sweep_rows, write_records, CURVE_HEADER,
    ENVELOPE_HEADER, RECORD_HEADER,
};
pub use perturb::{perturb_policy, perturbations, DirichletMix, Perturbation, UniformMix};
pub use runs::{
    bound_validation_run, noise_grid, shared_grid, temperature_sweep, BoundValidation, PerturbationRecord, RunSetup,
    TemperatureCurve, TemperatureSweep,
};

use std::path::Path;

use log::info;

use crate::equilibrium::{regularized_nash_vi, response_rules};
use crate::error::{Error, Result};
use crate::fixtures::{fixtures, FixtureParams};
use crate::game::{MarkovGame, ProductPolicy};
use crate::io::{load_game, load_policy, write_text};

/// Response rule used when a config names none.
pub fn default_rule(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::BoundValidation => "greedy",
        ExperimentKind::TemperatureSweep => "soft",
    }
}

/// Game and expert described by a config.
pub fn resolve_setup(cfg: &ExperimentConfig) -> Result<(MarkovGame, Option<ProductPolicy>)> {
    let registry = fixtures();
    if let Ok(builder) = registry.get(&cfg.game) {
        let fixture = builder.build(&FixtureParams {
            gamma: cfg.gamma,
            epsilon: cfg.epsilon,
            chain_pairs: cfg.chain_pairs,
            tau: cfg.tau,
        })?;
        let expert = match cfg.expert.as_deref() {
            None | Some("fixture") => Some(fixture.expert),
            Some("regularized") => None,
            Some(path) => Some(load_policy(Path::new(path))?),
        };
        return Ok((fixture.game, expert));
    }
    if !config::looks_like_path(&cfg.game) {
        registry.get(&cfg.game)?;
    }
    let mut game = load_game(Path::new(&cfg.game))?;
    if let Some(g) = cfg.gamma {
        game = game.with_gamma(g)?;
    }
    let expert = match cfg.expert.as_deref() {
        None | Some("regularized") => None,
        Some("fixture") => {
            return Err(Error::InvalidArgument(
                "expert = \"fixture\" needs a fixture name as game".into(),
            ))
        }
        Some(path) => Some(load_policy(Path::new(path))?),
    };
    Ok((game, expert))
}

#[derive(Debug, Clone)]
pub enum ExperimentOutcome {
    Bound(BoundValidation),
    Sweep(TemperatureSweep),
}

impl ExperimentOutcome {
    /// Human-readable summary lines.
    pub fn summary(&self) -> Vec<String> {
        match self {
            ExperimentOutcome::Bound(run) => {
                let done: Vec<_> = run.completed().collect();
                let violations = done.iter().filter(|r| !r.satisfies_bound()).count();
                let max_gap = done.iter().map(|r| r.nash_gap).fold(0.0, f64::max);
                vec![
                    format!("records: {} ({} failed)", run.records.len(), run.records.len() - done.len()),
                    format!("max nash gap: {}", fmt_num(max_gap)),
                    format!("delta breakpoints: {}", run.curve.breakpoints().len()),
                    format!("bound violations: {violations}"),
                ]
            }
            ExperimentOutcome::Sweep(sweep) => sweep
                .curves
                .iter()
                .map(|c| match (&c.error, c.values.last()) {
                    (Some(e), _) => format!("tau {}: failed ({e})", fmt_num(c.tau)),
                    (None, last) => format!(
                        "tau {}: delta at max eps {}",
                        fmt_num(c.tau),
                        fmt_num(last.copied().unwrap_or(f64::NAN))
                    ),
                })
                .collect(),
        }
    }
}

/// Runs a configured experiment and writes the configured outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let kind = cfg
        .kind
        .ok_or_else(|| Error::InvalidArgument("experiment kind not given".into()))?;
    let perturbation = perturbations().get(&cfg.perturbation)?;
    let rule = response_rules().get(cfg.br_rule.as_deref().unwrap_or(default_rule(kind)))?;
    let noise = noise_grid(cfg.noise.min, cfg.noise.max, cfg.noise.count);
    let (game, expert) = resolve_setup(cfg)?;
    match kind {
        ExperimentKind::BoundValidation => {
            let expert = match expert {
                Some(e) => e,
                None => {
                    let tau = cfg
                        .tau
                        .ok_or_else(|| Error::InvalidArgument("a regularised expert needs tau".into()))?;
                    regularized_nash_vi(&game, tau)?.policy
                }
            };
            let setup = RunSetup {
                game: &game,
                expert: &expert,
                perturbation,
                rule,
                tau: cfg.tau,
                episodes: cfg.episodes,
            };
            let run = bound_validation_run(&setup, &noise, &cfg.seeds)?;
            info!("bound validation: {} records", run.records.len());
            if let Some(p) = &cfg.output.records {
                write_records(&run.records, p)?;
            }
            if let Some(p) = &cfg.output.curves {
                write_text(p, &curves_csv(&curve_rows(&run, cfg.tau))?)?;
            }
            if let Some(p) = &cfg.output.envelope {
                write_text(p, &envelope_csv(&run)?)?;
            }
            Ok(ExperimentOutcome::Bound(run))
        }
        ExperimentKind::TemperatureSweep => {
            let taus = if cfg.taus.is_empty() {
                cfg.tau.into_iter().collect()
            } else {
                cfg.taus.clone()
            };
            if taus.is_empty() {
                return Err(Error::InvalidArgument("a temperature sweep needs taus".into()));
            }
            let sweep = temperature_sweep(&game, &taus, &noise, &cfg.seeds, perturbation, rule, cfg.grid_points)?;
            if let Some(e) = sweep.curves.iter().map(|c| c.error.as_ref()).collect::<Option<Vec<_>>>() {
                return Err(Error::InvalidArgument(format!("every temperature failed, first: {}", e[0])));
            }
            if let Some(p) = &cfg.output.curves {
                write_text(p, &curves_csv(&sweep_rows(&sweep))?)?;
            }
            Ok(ExperimentOutcome::Sweep(sweep))
        }
    }
}
