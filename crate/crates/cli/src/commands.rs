use std::fmt::Write as _;
use std::path::Path;

use log::info;
use nashgap_core::bimatrix::support_of;
use nashgap_core::equilibrium::{
    best_response, gap_report, m_rho_bruteforce, m_rho_oracles, regularized_nash_vi, response_rules,
    support_recovery, RecoveryStatus,
};
use nashgap_core::experiments::{fmt_num, perturbations, run_experiment, ExperimentConfig, ExperimentKind};
use nashgap_core::fixtures::{fixtures, FixtureParams};
use nashgap_core::io::{load_bimatrix, load_game, load_policy, policy_to_json, save_game, save_policy};
use nashgap_core::registry::{Named, Registry};
use nashgap_core::{Error, Result};

use crate::{
    BestResponseArgs, Command, ExperimentArgs, ExperimentName, FixtureArgs, GamePolicyArgs, MRhoArgs, SolveZsArgs,
    SupportRecoverArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_CHECK: u8 = 3;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Shape(_)
        | Error::InvalidGame(_)
        | Error::InvalidPolicy(_)
        | Error::InvalidArgument(_)
        | Error::NotZeroSum { .. }
        | Error::SizeGuard(_)
        | Error::UnknownName { .. }
        | Error::Parse { .. }
        | Error::Io { .. }
        | Error::Csv { .. } => EXIT_INPUT,
        Error::LinearSolve { .. }
        | Error::IdentityCheck { .. }
        | Error::NotConverged { .. }
        | Error::NegativeGap { .. }
        | Error::EmptySamples
        | Error::EmptySupport { .. } => EXIT_SOLVER,
    }
}

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Fixture(a) => fixture(a),
        Command::NashGap(a) => nash_gap(a),
        Command::BestResponse(a) => best_response_cmd(a),
        Command::SolveZs(a) => solve_zs(a),
        Command::SupportRecover(a) => support_recover(a),
        Command::MRho(a) => m_rho(a),
        Command::Experiment(a) => experiment(a),
        Command::List => list(),
    }
}

fn fixture(a: FixtureArgs) -> Result<u8> {
    let params = FixtureParams {
        gamma: a.gamma,
        epsilon: a.epsilon,
        chain_pairs: a.chain_pairs,
        tau: a.tau,
    };
    let fx = fixtures().get(&a.name)?.build(&params)?;
    if let Some(p) = &a.export {
        save_game(&fx.game, p)?;
        info!("wrote game to {}", p.display());
    }
    if let Some(p) = &a.export_expert {
        save_policy(&fx.expert, p)?;
    }
    if let Some(p) = &a.export_learner {
        save_policy(&fx.learner, p)?;
    }
    let rows = fx.check()?;
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(8);
    let mut out = format!(
        "fixture {} (gamma {})\n{:<width$}  {:<14}  {:>14}  {:>14}  result\n",
        fx.name,
        fmt_num(fx.game.gamma()),
        "quantity",
        "relation",
        "expected",
        "computed"
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:<14}  {:>14}  {:>14}  {}",
            r.label,
            r.relation.to_string(),
            fmt_num(r.expected),
            fmt_num(r.computed),
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    print!("{out}");
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", rows.len());
        return Ok(EXIT_CHECK);
    }
    Ok(EXIT_OK)
}

fn load_pair(a: &GamePolicyArgs) -> Result<(nashgap_core::game::MarkovGame, nashgap_core::game::ProductPolicy)> {
    Ok((load_game(&a.game)?, load_policy(&a.policy)?))
}

fn nash_gap(a: GamePolicyArgs) -> Result<u8> {
    let (game, policy) = load_pair(&a)?;
    let report = gap_report(&game, &policy)?;
    println!("player,value,best_response_value,gain");
    for (i, (v, g)) in report.values.iter().zip(&report.gains).enumerate() {
        println!("{},{},{},{}", i + 1, fmt_num(*v), fmt_num(report.responses[i].value), fmt_num(*g));
    }
    println!("nash_gap,{}", fmt_num(report.gap));
    Ok(EXIT_OK)
}

fn best_response_cmd(a: BestResponseArgs) -> Result<u8> {
    let (game, policy) = load_pair(&a.inputs)?;
    let n = game.n_players();
    if a.player == 0 || a.player > n {
        return Err(Error::InvalidArgument(format!("player {} outside 1..={n}", a.player)));
    }
    let br = best_response(&game, &policy, a.player - 1)?;
    let doc = serde_json::json!({
        "player": a.player,
        "value": br.value,
        "state_values": br.state_values,
        "actions": br.policy,
        "optimal_actions": br.optimal_actions,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("plain data serialises"));
    Ok(EXIT_OK)
}

fn solve_zs(a: SolveZsArgs) -> Result<u8> {
    let game = load_game(&a.game)?;
    let sol = regularized_nash_vi(&game, a.tau)?;
    info!(
        "solved in {} sweeps (outer residual {:e}, stage residual {:e})",
        sol.sweeps, sol.outer_residual, sol.stage_residual
    );
    match &a.out {
        Some(p) => {
            save_policy(&sol.policy, p)?;
            eprintln!("wrote policy to {}", p.display());
        }
        None => println!("{}", policy_to_json(&sol.policy)),
    }
    Ok(EXIT_OK)
}

fn set(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn support_recover(a: SupportRecoverArgs) -> Result<u8> {
    let game = load_bimatrix(&a.bimatrix)?;
    let oracle = m_rho_oracles(a.grid_step).get("bruteforce")?;
    let res = support_recovery(&game, a.eps, oracle.as_ref())?;
    for c in &res.calls {
        info!(
            "player {} action {}: bound {} ({}){}",
            c.player,
            c.action,
            fmt_num(c.bound),
            if c.included { "kept" } else { "dropped" },
            if c.near_threshold { ", near threshold" } else { "" }
        );
    }
    println!("baseline {}", fmt_num(res.baseline));
    println!("threshold_delta {}", fmt_num(res.delta));
    println!("support1 {}", set(&res.support1));
    println!("support2 {}", set(&res.support2));
    match res.status {
        RecoveryStatus::Recovered => Ok(EXIT_OK),
        RecoveryStatus::EmptySupport { player } => Err(Error::EmptySupport { player }),
    }
}

fn m_rho(a: MRhoArgs) -> Result<u8> {
    let game = load_bimatrix(&a.bimatrix)?;
    let res = m_rho_bruteforce(&game, a.eps, a.grid_step)?;
    println!("m_rho {}", fmt_num(res.value));
    println!("equilibria {}", res.equilibria);
    println!("grid_points {}", res.grid_points);
    if let Some((x, y)) = &res.witness {
        let fmt = |v: &[f64]| v.iter().map(|p| fmt_num(*p)).collect::<Vec<_>>().join(",");
        println!("witness_x {}", fmt(x));
        println!("witness_y {}", fmt(y));
        println!("witness_support {} {}", set(&support_of(x)), set(&support_of(y)));
    }
    Ok(EXIT_OK)
}

fn experiment(a: ExperimentArgs) -> Result<u8> {
    let kind = match a.kind {
        ExperimentName::BoundValidation => ExperimentKind::BoundValidation,
        ExperimentName::TemperatureSweep => ExperimentKind::TemperatureSweep,
    };
    let mut cfg = ExperimentConfig::load(Path::new(&a.config))?;
    match cfg.kind {
        Some(k) if k != kind => {
            return Err(Error::InvalidArgument(format!(
                "config {} describes a {k:?} experiment, not {kind:?}",
                a.config.display()
            )))
        }
        _ => cfg.kind = Some(kind),
    }
    let outcome = run_experiment(&cfg)?;
    for line in outcome.summary() {
        println!("{line}");
    }
    Ok(EXIT_OK)
}

fn print_registry<T: ?Sized + Named>(title: &str, reg: &Registry<T>) {
    println!("{title}:");
    for entry in reg.iter() {
        println!("  {:<18} {}", entry.name(), entry.describe());
    }
}

fn list() -> Result<u8> {
    print_registry("fixtures", &fixtures());
    print_registry("response rules", &response_rules());
    print_registry("perturbations", &perturbations());
    print_registry("m-rho oracles", &m_rho_oracles(0.005));
    Ok(EXIT_OK)
}
