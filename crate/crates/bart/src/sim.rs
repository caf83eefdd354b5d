//! Synthetic probit-regression data generator used by the comparison study:
//! x ~ U(-3, 3) and y ~ Bernoulli(Phi(f(x))) with a piecewise-linear,
//! monotone signal.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::data::Dataset;
use crate::error::Result;
use crate::float::{cst, Real};
use crate::math::norm_cdf;

/// Piecewise-linear monotone signal: 0.2x below zero, x above.
#[inline]
pub fn signal<F: Real>(x: F) -> F {
    if x < F::zero() {
        cst::<F>(0.2) * x
    } else {
        x
    }
}

/// True success probability Phi(signal(x)).
#[inline]
pub fn true_probability<F: Real>(x: F) -> F {
    norm_cdf(signal(x))
}

/// Simulated draw: covariate values and binary outcomes.
#[derive(Clone, Debug)]
pub struct SimData<F> {
    pub x: Vec<F>,
    pub y: Vec<F>,
}

/// Generate n observations, deterministic in the seed.
pub fn generate<F: Real>(n: usize, seed: u64) -> SimData<F> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let lo = cst::<F>(-3.0);
    let span = cst::<F>(6.0);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = lo + span * F::unit_open(&mut rng);
        let p = true_probability(xi);
        let yi = if F::unit_open(&mut rng) < p { F::one() } else { F::zero() };
        x.push(xi);
        y.push(yi);
    }
    SimData { x, y }
}

impl<F: Real> SimData<F> {
    pub fn to_dataset(&self) -> Result<Dataset<F>> {
        Dataset::new(vec!["x".into()], "y", self.x.clone(), self.y.clone())
    }
}
