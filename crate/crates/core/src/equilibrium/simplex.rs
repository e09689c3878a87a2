//! Dense two-phase simplex for small linear programs over `z >= 0`.
//! Bland's rule throughout, so degenerate problems cannot cycle.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub n_vars: usize,
    /// `a . z = b`
    pub equalities: Vec<(Vec<f64>, f64)>,
    /// `a . z <= b`
    pub inequalities: Vec<(Vec<f64>, f64)>,
    /// Maximised when present; otherwise any feasible point is returned.
    pub objective: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { z: Vec<f64>, objective: f64 },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
}

const PIVOT_CAP: usize = 50_000;

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Minimises the cost row over columns accepted by `allowed`.
    /// Returns false when unbounded.
    fn optimise(&mut self, allowed: impl Fn(usize) -> bool) -> Result<bool> {
        let rhs = self.width();
        for _ in 0..PIVOT_CAP {
            let Some(c) = (0..rhs).find(|&j| allowed(j) && self.cost[j] < -tol::LP) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c] > tol::LP {
                    let ratio = row[rhs] / row[c];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - tol::LP
                                || (ratio <= lratio + tol::LP && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::NotConverged {
            what: "simplex",
            iterations: PIVOT_CAP,
            residual: f64::NAN,
        })
    }
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            ..Self::default()
        }
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.n_vars;
        for (a, _) in self.equalities.iter().chain(&self.inequalities) {
            if a.len() != n {
                return Err(Error::Shape(format!("constraint has {} coefficients, expected {n}", a.len())));
            }
        }
        let n_slack = self.inequalities.len();
        let m = self.equalities.len() + n_slack;
        let art0 = n + n_slack;
        let width = art0 + m;

        let mut rows = Vec::with_capacity(m);
        let constraints = self
            .equalities
            .iter()
            .map(|c| (c, None))
            .chain(self.inequalities.iter().enumerate().map(|(k, c)| (c, Some(k))));
        for (r, ((a, b), slack)) in constraints.enumerate() {
            let mut row = vec![0.0; width + 1];
            row[..n].copy_from_slice(a);
            if let Some(k) = slack {
                row[n + k] = 1.0;
            }
            row[width] = *b;
            if *b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[art0 + r] = 1.0;
            rows.push(row);
        }
        let mut cost = vec![0.0; width + 1];
        for row in &rows {
            for (c, v) in cost.iter_mut().zip(row) {
                *c -= v;
            }
        }
        for c in cost[art0..width].iter_mut() {
            *c = 0.0;
        }
        let mut t = Tableau {
            rows,
            cost,
            basis: (art0..width).collect(),
        };
        t.optimise(|_| true)?;
        if -t.cost[width] > tol::LP {
            return Ok(LpOutcome::Infeasible);
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art0 {
                match (0..art0).find(|&j| t.rows[r][j].abs() > tol::LP) {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        let mut costs = vec![0.0; width + 1];
        if let Some(obj) = &self.objective {
            for (c, o) in costs.iter_mut().zip(obj) {
                *c = -o;
            }
        }
        let mut reduced = costs.clone();
        for (row, &b) in t.rows.iter().zip(&t.basis) {
            let cb = costs[b];
            if cb != 0.0 {
                for (v, rv) in reduced.iter_mut().zip(row) {
                    *v -= cb * rv;
                }
            }
        }
        t.cost = reduced;
        if !t.optimise(|j| j < art0)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut z = vec![0.0; n];
        for (row, &b) in t.rows.iter().zip(&t.basis) {
            if b < n {
                z[b] = row[width].max(0.0);
            }
        }
        let objective = self
            .objective
            .as_ref()
            .map(|o| o.iter().zip(&z).map(|(a, b)| a * b).sum())
            .unwrap_or(0.0);
        Ok(LpOutcome::Optimal { z, objective })
    }
}
