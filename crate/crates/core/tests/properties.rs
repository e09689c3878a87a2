//! Property-based invariants over random games and policies.

#![allow(clippy::needless_range_loop)]

use nashgap_core::dynamics::{initial_values, l1_product_gap, occupancy, values};
use nashgap_core::equilibrium::{best_response, gap_report, tight_delta};
use nashgap_core::experiments::perturb_policy;
use nashgap_core::game::{random_game, random_policy, MarkovGame, ProductPolicy};
use nashgap_core::io::{game_from_json, game_to_json, policy_from_json, policy_to_json};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
struct Instance {
    seed: u64,
    n_states: usize,
    counts: Vec<usize>,
    gamma: f64,
}

impl Instance {
    fn game(&self) -> MarkovGame {
        random_game(self.seed, self.counts.len(), self.n_states, &self.counts, self.gamma).unwrap()
    }
}

fn instance(max_players: usize) -> impl Strategy<Value = Instance> {
    (
        any::<u64>(),
        1usize..=5,
        prop::collection::vec(1usize..=3, 1..=max_players),
        prop::sample::select(vec![0.0, 0.5, 0.9, 0.99]),
    )
        .prop_map(|(seed, n_states, counts, gamma)| Instance {
            seed,
            n_states,
            counts,
            gamma,
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_games_are_valid_and_pure(inst in instance(3)) {
        let g = inst.game();
        prop_assert!(g.validate().is_empty());
        prop_assert_eq!(g, inst.game());
    }

    #[test]
    fn joint_distribution_sums_to_one(inst in instance(3), pseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        for s in 0..g.n_states() {
            let joint = pi.joint_distribution(s);
            prop_assert_eq!(joint.len(), g.n_joint());
            prop_assert!((joint.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn occupancy_invariants(inst in instance(2), pseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        let occ = occupancy(&g, &pi).unwrap();
        prop_assert!((occ.mu.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!((occ.rho.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        for s in 0..g.n_states() {
            prop_assert!(occ.mu[s] >= (1.0 - g.gamma()) * g.initial_dist()[s] - 1e-12);
            for (a, p) in pi.joint_distribution(s).iter().enumerate() {
                prop_assert!((occ.rho_row(s)[a] - occ.mu[s] * p).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn values_match_occupancy_inner_product(inst in instance(2), pseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        let occ = occupancy(&g, &pi).unwrap();
        let v0 = initial_values(&g, &pi).unwrap();
        let horizon = 1.0 / (1.0 - g.gamma());
        for (i, v) in v0.iter().enumerate() {
            let inner: f64 = occ.rho.iter().zip(g.rewards_of(i)).map(|(p, r)| p * r).sum();
            prop_assert!(close(*v, inner * horizon, 1e-8), "{} vs {}", v, inner * horizon);
        }
        let bundle = values(&g, &pi).unwrap();
        for i in 0..g.n_players() {
            for s in 0..g.n_states() {
                prop_assert!(bundle.v[i][s].abs() <= horizon + 1e-9);
                let mean_q: f64 = pi
                    .joint_distribution(s)
                    .iter()
                    .enumerate()
                    .map(|(a, p)| p * bundle.q(i, s, a))
                    .sum();
                prop_assert!(close(mean_q, bundle.v[i][s], 1e-9));
            }
        }
    }

    #[test]
    fn best_response_beats_deterministic_deviations(inst in instance(2), pseed in any::<u64>(), dseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        let mut rng = ChaCha8Rng::seed_from_u64(dseed);
        for i in 0..g.n_players() {
            let br = best_response(&g, &pi, i).unwrap();
            for _ in 0..50 {
                let choice: Vec<usize> = (0..g.n_states()).map(|_| rng.random_range(0..g.action_counts()[i])).collect();
                let mut choices: Vec<Vec<usize>> = vec![vec![0; g.n_states()]; g.n_players()];
                choices[i] = choice;
                let det = ProductPolicy::deterministic(&g, &choices).unwrap();
                let dev = pi.with_player(i, det.table(i).to_vec()).unwrap();
                let v = initial_values(&g, &dev).unwrap()[i];
                prop_assert!(br.value >= v - 1e-8, "player {}: {} < {}", i, br.value, v);
            }
        }
    }

    #[test]
    fn nash_gap_dominates_single_deviations(inst in instance(2), pseed in any::<u64>(), qseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        let other = random_policy(&g, qseed);
        let report = gap_report(&g, &pi).unwrap();
        let base = initial_values(&g, &pi).unwrap();
        for i in 0..g.n_players() {
            let dev = pi.with_player(i, other.table(i).to_vec()).unwrap();
            let gain = initial_values(&g, &dev).unwrap()[i] - base[i];
            prop_assert!(report.gap >= gain - 1e-8);
            prop_assert!(report.gains[i] >= -1e-8);
        }
    }

    #[test]
    fn delta_curve_is_monotone_envelope(samples in prop::collection::vec((0.0f64..3.0, 0.0f64..=2.0), 1..40)) {
        let curve = tight_delta(&samples).unwrap();
        let b = curve.breakpoints();
        prop_assert!(b.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        prop_assert!(b.iter().all(|(_, d)| (0.0..=2.0).contains(d)));
        for (e, d) in &samples {
            prop_assert!(curve.eval(*e) >= *d);
        }
    }

    #[test]
    fn single_factor_l1_is_exact(p in prop::collection::vec(0.0f64..1.0, 1..6), q in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let n = p.len().min(q.len());
        let (joint, marginal) = l1_product_gap(&[p[..n].to_vec()], &[q[..n].to_vec()]).unwrap();
        prop_assert_eq!(joint, marginal);
    }

    #[test]
    fn perturbed_policies_validate(inst in instance(3), pseed in any::<u64>(), noise in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = inst.game();
        let expert = random_policy(&g, pseed);
        let learner = perturb_policy(&expert, noise, seed).unwrap();
        prop_assert!(learner.check_compatible(&g).is_ok());
        prop_assert!(ProductPolicy::new(g.action_counts(), g.n_states(), learner.tables().to_vec()).is_ok());
    }

    #[test]
    fn documents_round_trip(inst in instance(3), pseed in any::<u64>()) {
        let g = inst.game();
        let pi = random_policy(&g, pseed);
        prop_assert_eq!(game_from_json(&game_to_json(&g), "mem").unwrap(), g);
        prop_assert_eq!(policy_from_json(&policy_to_json(&pi), "mem").unwrap(), pi);
    }
}
