//! One-state two-player games given by payoff matrices.
//!
//! Both matrices are indexed `[row][column]`: `a1[r][c]` is the row player's
//! payoff and `a2[r][c]` the column player's payoff for the profile `(r, c)`.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

impl BimatrixGame {
    pub fn new(a1: Vec<Vec<f64>>, a2: Vec<Vec<f64>>) -> Result<Self> {
        let rows = a1.len();
        if rows == 0 || a2.len() != rows {
            return Err(Error::Shape("payoff matrices need the same number of rows (>= 1)".into()));
        }
        let cols = a1[0].len();
        if cols == 0 || a1.iter().chain(&a2).any(|r| r.len() != cols) {
            return Err(Error::Shape("payoff matrices must be rectangular with identical shape".into()));
        }
        let a1: Vec<f64> = a1.into_iter().flatten().collect();
        let a2: Vec<f64> = a2.into_iter().flatten().collect();
        if a1.iter().chain(&a2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("payoffs must be finite".into()));
        }
        Ok(Self { rows, cols, a1, a2 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn a1(&self, r: usize, c: usize) -> f64 {
        self.a1[r * self.cols + c]
    }

    #[inline]
    pub fn a2(&self, r: usize, c: usize) -> f64 {
        self.a2[r * self.cols + c]
    }

    pub fn a1_rows(&self) -> Vec<Vec<f64>> {
        self.a1.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn a2_rows(&self) -> Vec<Vec<f64>> {
        self.a2.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.a1
            .iter()
            .chain(&self.a2)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            a1: self.a1.iter().map(|v| v * factor).collect(),
            a2: self.a2.iter().map(|v| v * factor).collect(),
        }
    }

    /// Row player's payoff for each row against `y`.
    pub fn row_payoffs(&self, y: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.a1(r, c) * y[c]).sum())
            .collect()
    }

    /// Column player's payoff for each column against `x`.
    pub fn col_payoffs(&self, x: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.a2(r, c) * x[r]).sum())
            .collect()
    }

    /// Per-player regrets `(max_r (A1 y)_r - x'A1y, max_c (x'A2)_c - x'A2y)`.
    pub fn regrets(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let u1 = self.row_payoffs(y);
        let u2 = self.col_payoffs(x);
        let v1: f64 = u1.iter().zip(x).map(|(u, p)| u * p).sum();
        let v2: f64 = u2.iter().zip(y).map(|(u, p)| u * p).sum();
        (
            u1.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v1,
            u2.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v2,
        )
    }

    /// One-state Nash gap: the larger of the two regrets.
    pub fn nash_gap(&self, x: &[f64], y: &[f64]) -> f64 {
        let (g1, g2) = self.regrets(x, y);
        g1.max(g2)
    }

    /// Copy with row `r` of the row player's matrix set to `value`.
    pub fn with_row_player_action(&self, r: usize, value: f64) -> Self {
        let mut g = self.clone();
        for c in 0..self.cols {
            g.a1[r * self.cols + c] = value;
        }
        g
    }

    /// Copy with column `c` of the column player's matrix set to `value`.
    pub fn with_col_player_action(&self, c: usize, value: f64) -> Self {
        let mut g = self.clone();
        for r in 0..self.rows {
            g.a2[r * self.cols + c] = value;
        }
        g
    }

    /// Replace the row player's matrix with `other`'s.
    pub fn with_a1_of(&self, other: &Self) -> Self {
        let mut g = self.clone();
        g.a1 = other.a1.clone();
        g
    }

    /// Replace the column player's matrix with `other`'s.
    pub fn with_a2_of(&self, other: &Self) -> Self {
        let mut g = self.clone();
        g.a2 = other.a2.clone();
        g
    }
}

/// A mixed profile `(x, y)` with its supports.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub support1: Vec<usize>,
    pub support2: Vec<usize>,
}

impl MixedProfile {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        for (name, v) in [("x", &x), ("y", &y)] {
            let sum: f64 = v.iter().sum();
            if v.iter().any(|p| *p < -tol::PROFILE) || (sum - 1.0).abs() > tol::PROFILE {
                return Err(Error::InvalidArgument(format!(
                    "{name} is not a probability vector (sum {sum})"
                )));
            }
        }
        let support1 = support_of(&x);
        let support2 = support_of(&y);
        Ok(Self {
            x,
            y,
            support1,
            support2,
        })
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn support_of(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, p)| **p > tol::SUPPORT)
        .map(|(i, _)| i)
        .collect()
}

/// Matching pennies with `+-scale` payoffs; the row player wants to match.
pub fn matching_pennies(scale: f64) -> BimatrixGame {
    let a1 = vec![vec![scale, -scale], vec![-scale, scale]];
    let a2 = vec![vec![-scale, scale], vec![scale, -scale]];
    BimatrixGame::new(a1, a2).expect("static shape")
}

/// Prisoner's dilemma scaled into `(-1, 1)`; action 1 (defect) is strictly dominant.
pub fn prisoners_dilemma() -> BimatrixGame {
    let a1 = vec![vec![0.6, -0.6], vec![0.9, -0.3]];
    let a2 = vec![vec![0.6, 0.9], vec![-0.6, -0.3]];
    BimatrixGame::new(a1, a2).expect("static shape")
}
