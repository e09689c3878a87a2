//! Seeded perturbations of an expert policy, selectable by name.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::ProductPolicy;
use crate::registry::{Named, Registry};
use crate::sampling::{mix_seed, simplex_point};

pub trait Perturbation: Named + Send + Sync {
    /// Deterministic in `(noise, seed)`; `noise = 0` returns the expert.
    fn perturb(&self, expert: &ProductPolicy, noise: f64, seed: u64) -> Result<ProductPolicy>;
}

fn mix(expert: &ProductPolicy, noise: f64, mut target: impl FnMut(usize) -> Vec<f64>) -> Result<ProductPolicy> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidArgument(format!("noise level {noise} outside [0, 1]")));
    }
    let ns = expert.n_states();
    let tables = expert
        .action_counts()
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let mut t = Vec::with_capacity(ns * m);
            for s in 0..ns {
                let d = target(m);
                t.extend(expert.dist(i, s).iter().zip(&d).map(|(p, q)| (1.0 - noise) * p + noise * q));
            }
            t
        })
        .collect();
    ProductPolicy::new(expert.action_counts(), ns, tables)
}

/// `(1 - eta) expert + eta d` with `d ~ Dirichlet(1)` drawn per player and state.
pub struct DirichletMix;

impl Named for DirichletMix {
    fn name(&self) -> &'static str {
        "dirichlet-mix"
    }
    fn describe(&self) -> &'static str {
        "mix each action distribution with a uniform-random simplex point"
    }
}

impl Perturbation for DirichletMix {
    fn perturb(&self, expert: &ProductPolicy, noise: f64, seed: u64) -> Result<ProductPolicy> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, noise.to_bits()));
        mix(expert, noise, |m| simplex_point(&mut rng, m))
    }
}

/// `(1 - eta) expert + eta uniform`; ignores the seed.
pub struct UniformMix;

impl Named for UniformMix {
    fn name(&self) -> &'static str {
        "uniform-mix"
    }
    fn describe(&self) -> &'static str {
        "mix each action distribution with the uniform distribution"
    }
}

impl Perturbation for UniformMix {
    fn perturb(&self, expert: &ProductPolicy, noise: f64, _seed: u64) -> Result<ProductPolicy> {
        mix(expert, noise, |m| vec![1.0 / m as f64; m])
    }
}

pub fn perturbations() -> Registry<dyn Perturbation> {
    let mut reg: Registry<dyn Perturbation> = Registry::new("perturbation");
    reg.register(Arc::new(DirichletMix)).register(Arc::new(UniformMix));
    reg
}

/// The default Dirichlet mixing perturbation.
pub fn perturb_policy(expert: &ProductPolicy, noise: f64, seed: u64) -> Result<ProductPolicy> {
    DirichletMix.perturb(expert, noise, seed)
}
