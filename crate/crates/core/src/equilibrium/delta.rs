use crate::error::{Error, Result};

/// Monotone step function `eps -> delta` built as a cumulative maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCurve {
    breakpoints: Vec<(f64, f64)>,
}

impl DeltaCurve {
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Value of the last breakpoint at or below `eps`; zero below the first.
    pub fn eval(&self, eps: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|(e, _)| *e <= eps);
        if idx == 0 {
            0.0
        } else {
            self.breakpoints[idx - 1].1
        }
    }

    pub fn on_grid(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&e| self.eval(e)).collect()
    }
}

/// Sorts `(eps_bc, distance)` samples by error and takes the running maximum.
pub fn tight_delta(samples: &[(f64, f64)]) -> Result<DeltaCurve> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(bad) = samples.iter().find(|(e, d)| !(*e >= 0.0) || !(0.0..=2.0 + 1e-9).contains(d)) {
        return Err(Error::InvalidArgument(format!("sample {bad:?} outside eps >= 0, delta in [0, 2]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut running = 0.0f64;
    let breakpoints = sorted
        .into_iter()
        .map(|(e, d)| {
            running = running.max(d.min(2.0));
            (e, running)
        })
        .collect();
    Ok(DeltaCurve { breakpoints })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_max() {
        let c = tight_delta(&[(0.2, 0.3), (0.1, 0.5)]).unwrap();
        assert_eq!(c.breakpoints(), &[(0.1, 0.5), (0.2, 0.5)]);
        assert_eq!(c.eval(0.05), 0.0);
        assert_eq!(c.eval(0.1), 0.5);
        assert_eq!(c.eval(10.0), 0.5);
    }

    #[test]
    fn unperturbed_expert_is_flat_zero() {
        let c = tight_delta(&[(0.0, 0.0)]).unwrap();
        assert_eq!(c.on_grid(&[0.0, 0.5, 1.0]), vec![0.0; 3]);
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert!(matches!(tight_delta(&[]), Err(Error::EmptySamples)));
        assert!(tight_delta(&[(0.1, 2.5)]).is_err());
    }
}
