//! Support-restricted indifference LPs for bimatrix games and support
//! enumeration on top of them.

use rayon::prelude::*;

use super::simplex::{LinearProgram, LpOutcome};
use crate::bimatrix::{BimatrixGame, MixedProfile};
use crate::error::{Error, Result};
use crate::tol;

pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSolution {
    pub profile: MixedProfile,
    /// Off-support actions never beat on-support ones by more than `eps`.
    pub best_response_valid: bool,
    /// Every support action carries weight above the support threshold.
    pub full_support: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportOutcome {
    Feasible(SupportSolution),
    Infeasible,
}

impl SupportOutcome {
    pub fn solution(&self) -> Option<&SupportSolution> {
        match self {
            SupportOutcome::Feasible(s) => Some(s),
            SupportOutcome::Infeasible => None,
        }
    }
}

fn check_support(nu: &[usize], n: usize, who: &str) -> Result<()> {
    if nu.is_empty() {
        return Err(Error::InvalidArgument(format!("empty support for the {who} player")));
    }
    if let Some(&bad) = nu.iter().find(|&&a| a >= n) {
        return Err(Error::InvalidArgument(format!("{who} support index {bad} out of range")));
    }
    Ok(())
}

/// Finds `x` on `nu1`, `y` on `nu2` making every support action of each player
/// `eps`-indifferent against the opponent's strategy.
///
/// Among feasible points the one maximising the smallest support weight is
/// returned, so a strictly interior solution is found whenever one exists.
pub fn bimatrix_support_solve(
    game: &BimatrixGame,
    nu1: &[usize],
    nu2: &[usize],
    eps: f64,
) -> Result<SupportOutcome> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("slack {eps} must be non-negative")));
    }
    check_support(nu1, game.rows(), "row")?;
    check_support(nu2, game.cols(), "column")?;
    let (k1, k2) = (nu1.len(), nu2.len());
    // Variables: x over nu1, y over nu2, then t.
    let n = k1 + k2 + 1;
    let mut lp = LinearProgram::new(n);
    let mut row = vec![0.0; n];
    row[..k1].fill(1.0);
    lp.equalities.push((row, 1.0));
    let mut row = vec![0.0; n];
    row[k1..k1 + k2].fill(1.0);
    lp.equalities.push((row, 1.0));

    for (a, &j) in nu2.iter().enumerate() {
        for &k in &nu2[a + 1..] {
            let mut diff = vec![0.0; n];
            for (p, &r) in nu1.iter().enumerate() {
                diff[p] = game.a2(r, j) - game.a2(r, k);
            }
            lp.inequalities.push((diff.clone(), eps));
            lp.inequalities.push((diff.iter().map(|v| -v).collect(), eps));
        }
    }
    for (a, &j) in nu1.iter().enumerate() {
        for &k in &nu1[a + 1..] {
            let mut diff = vec![0.0; n];
            for (p, &c) in nu2.iter().enumerate() {
                diff[k1 + p] = game.a1(j, c) - game.a1(k, c);
            }
            lp.inequalities.push((diff.clone(), eps));
            lp.inequalities.push((diff.iter().map(|v| -v).collect(), eps));
        }
    }
    for p in 0..k1 + k2 {
        let mut row = vec![0.0; n];
        row[n - 1] = 1.0;
        row[p] = -1.0;
        lp.inequalities.push((row, 0.0));
    }
    let mut obj = vec![0.0; n];
    obj[n - 1] = 1.0;
    lp.objective = Some(obj);

    let z = match lp.solve()? {
        LpOutcome::Infeasible => return Ok(SupportOutcome::Infeasible),
        LpOutcome::Unbounded => unreachable!("the interior margin is bounded by 1"),
        LpOutcome::Optimal { z, .. } => z,
    };
    let mut x = vec![0.0; game.rows()];
    let mut y = vec![0.0; game.cols()];
    for (p, &r) in nu1.iter().enumerate() {
        x[r] = z[p];
    }
    for (p, &c) in nu2.iter().enumerate() {
        y[c] = z[k1 + p];
    }
    renormalise(&mut x);
    renormalise(&mut y);
    let full_support = z[n - 1] > tol::SUPPORT;
    let best_response_valid = best_response_valid(game, &x, &y, nu1, nu2, eps);
    Ok(SupportOutcome::Feasible(SupportSolution {
        profile: MixedProfile::new(x, y)?,
        best_response_valid,
        full_support,
    }))
}

fn renormalise(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    for e in v.iter_mut() {
        *e /= s;
    }
}

fn best_response_valid(game: &BimatrixGame, x: &[f64], y: &[f64], nu1: &[usize], nu2: &[usize], eps: f64) -> bool {
    let ok = |payoff: Vec<f64>, nu: &[usize]| {
        let best = payoff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let worst_on = nu.iter().map(|&a| payoff[a]).fold(f64::INFINITY, f64::min);
        best <= worst_on + eps + tol::LP
    };
    ok(game.row_payoffs(y), nu1) && ok(game.col_payoffs(x), nu2)
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Every distinct `eps`-Nash profile reachable through some support pair.
pub fn enumerate_nash(game: &BimatrixGame, eps: f64) -> Result<Vec<MixedProfile>> {
    if game.rows() > ENUMERATION_LIMIT || game.cols() > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard(format!(
            "support enumeration limited to {ENUMERATION_LIMIT} actions per player, got {}x{}",
            game.rows(),
            game.cols()
        )));
    }
    let s1 = subsets(game.rows());
    let s2 = subsets(game.cols());
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> =
        s1.iter().flat_map(|a| s2.iter().map(move |b| (a, b))).collect();
    let found: Vec<Option<MixedProfile>> = pairs
        .par_iter()
        .map(|(nu1, nu2)| {
            Ok(match bimatrix_support_solve(game, nu1, nu2, eps)? {
                SupportOutcome::Feasible(sol) if sol.best_response_valid => Some(sol.profile),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<MixedProfile> = Vec::new();
    for p in found.into_iter().flatten() {
        if out.iter().all(|q| q.linf_distance(&p) > tol::DEDUP) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimatrix::{matching_pennies, prisoners_dilemma};

    #[test]
    fn matching_pennies_full_support_is_uniform() {
        let g = matching_pennies(0.5);
        let sol = bimatrix_support_solve(&g, &[0, 1], &[0, 1], 0.0).unwrap();
        let sol = sol.solution().unwrap();
        assert!((sol.profile.x[0] - 0.5).abs() < 1e-12);
        assert!((sol.profile.y[0] - 0.5).abs() < 1e-12);
        assert!(sol.best_response_valid && sol.full_support);
    }

    #[test]
    fn matching_pennies_pure_pair_fails_filter() {
        let g = matching_pennies(0.5);
        match bimatrix_support_solve(&g, &[0], &[0], 0.0).unwrap() {
            SupportOutcome::Infeasible => {}
            SupportOutcome::Feasible(sol) => assert!(!sol.best_response_valid),
        }
    }

    #[test]
    fn dominant_strategy_profile() {
        let g = prisoners_dilemma();
        let sol = bimatrix_support_solve(&g, &[1], &[1], 0.0).unwrap();
        let sol = sol.solution().unwrap();
        assert_eq!(sol.profile.x, vec![0.0, 1.0]);
        assert!(sol.best_response_valid);
        let all = enumerate_nash(&g, 0.0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].y, vec![0.0, 1.0]);
    }

    #[test]
    fn zero_game_accepts_every_support_pair() {
        let g = BimatrixGame::new(vec![vec![0.0; 2]; 2], vec![vec![0.0; 2]; 2]).unwrap();
        for nu1 in subsets(2) {
            for nu2 in subsets(2) {
                let sol = bimatrix_support_solve(&g, &nu1, &nu2, 0.0).unwrap();
                let sol = sol.solution().unwrap();
                assert!(sol.best_response_valid && sol.full_support);
            }
        }
        assert_eq!(enumerate_nash(&g, 0.0).unwrap().len(), 9);
    }

    #[test]
    fn size_guard() {
        let g = BimatrixGame::new(vec![vec![0.0; 9]; 9], vec![vec![0.0; 9]; 9]).unwrap();
        assert!(matches!(enumerate_nash(&g, 0.0), Err(Error::SizeGuard(_))));
    }
}
