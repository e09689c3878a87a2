use nashgap_core::bimatrix::{matching_pennies, prisoners_dilemma, BimatrixGame};
use nashgap_core::equilibrium::{bimatrix_support_solve, enumerate_nash, m_rho_bruteforce};
use proptest::prelude::*;

fn game_2x2(v: &[f64]) -> BimatrixGame {
    BimatrixGame::new(vec![v[0..2].to_vec(), v[2..4].to_vec()], vec![v[4..6].to_vec(), v[6..8].to_vec()]).unwrap()
}

/// Smallest gap on a fine grid of profiles: an independent equilibrium check.
fn grid_min_gap(game: &BimatrixGame, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let (p, q) = (i as f64 / n as f64, j as f64 / n as f64);
            best = best.min(game.nash_gap(&[1.0 - p, p], &[1.0 - q, q]));
        }
    }
    best
}

#[test]
fn m_rho_examples() {
    let mp = matching_pennies(0.5);
    assert_eq!(m_rho_bruteforce(&mp, 0.0, 0.005).unwrap().value, 0.0);
    let a = m_rho_bruteforce(&mp, 0.1, 0.005).unwrap();
    let b = m_rho_bruteforce(&mp, 0.1, 0.005).unwrap();
    assert!(a.value.is_finite());
    assert_eq!(a, b);

    let pd = prisoners_dilemma();
    let r = m_rho_bruteforce(&pd, 0.05, 0.005).unwrap();
    let spread = pd.max_abs() * 2.0;
    assert!(r.value > 0.0 && r.value <= spread, "{}", r.value);
    assert_eq!(r.equilibria, 1);
}

#[test]
fn m_rho_rejects_larger_games() {
    let g = BimatrixGame::new(vec![vec![0.0; 3]; 3], vec![vec![0.0; 3]; 3]).unwrap();
    assert!(matches!(m_rho_bruteforce(&g, 0.1, 0.01), Err(nashgap_core::Error::SizeGuard(_))));
}

#[test]
fn dominant_game_has_its_pure_profile_only() {
    let eq = enumerate_nash(&prisoners_dilemma(), 0.0).unwrap();
    assert_eq!(eq.len(), 1);
    assert_eq!((eq[0].support1.as_slice(), eq[0].support2.as_slice()), (&[1][..], &[1][..]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn enumerated_profiles_are_equilibria(v in prop::collection::vec(-0.9f64..0.9, 8)) {
        let g = game_2x2(&v);
        let eq = enumerate_nash(&g, 0.0).unwrap();
        // Every 2x2 game has an equilibrium, and the grid oracle agrees one exists.
        prop_assert!(!eq.is_empty() || grid_min_gap(&g, 0.01) > 1e-3);
        for e in &eq {
            prop_assert!(g.nash_gap(&e.x, &e.y) <= 1e-8, "gap {}", g.nash_gap(&e.x, &e.y));
            let out = bimatrix_support_solve(&g, &e.support1, &e.support2, 1e-9).unwrap();
            prop_assert!(out.solution().is_some());
        }
    }

    #[test]
    fn slack_solutions_are_eps_equilibria(v in prop::collection::vec(-0.9f64..0.9, 8), eps in 0.0f64..0.2) {
        let g = game_2x2(&v);
        if let Some(sol) = bimatrix_support_solve(&g, &[0, 1], &[0, 1], eps).unwrap().solution() {
            let (x, y) = (&sol.profile.x, &sol.profile.y);
            let r1 = g.row_payoffs(y);
            let r2 = g.col_payoffs(x);
            prop_assert!((r1[0] - r1[1]).abs() <= eps + 1e-9);
            prop_assert!((r2[0] - r2[1]).abs() <= eps + 1e-9);
            prop_assert!(sol.best_response_valid);
        }
    }
}
