#![allow(dead_code)]

use anticross::hamiltonian::{CoefficientBundle, DerivativeBundle, Domain, FnModel, TwoLevelModel};
use anticross::zoo::{
    DeltaConvention, PerturbationModel, PerturbationParams, RabiModel, RabiParams, ThreeLevelModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Δ = 1, γ = λ`.
pub fn linear_gamma(domain: Domain) -> FnModel {
    FnModel::new("gamma=lambda", domain, |l| CoefficientBundle::new(0.0, 1.0, l))
        .with_derivatives(|_| DerivativeBundle::new(0.0, 0.0, 1.0))
}

pub fn random_bundle(rng: &mut ChaCha8Rng) -> CoefficientBundle {
    loop {
        let c = CoefficientBundle::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        if c.half_gap() > 1e-3 {
            return c;
        }
    }
}

pub fn random_derivatives(rng: &mut ChaCha8Rng) -> DerivativeBundle {
    DerivativeBundle::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// The zoo models with bounded domains free of level crossings.
pub fn zoo() -> Vec<Box<dyn TwoLevelModel>> {
    let pert = |phi| {
        Box::new(
            PerturbationModel::new(
                PerturbationParams::new(0.0, 1.0, 1.0, phi).unwrap(),
                Domain::new(-3.0, 3.0).unwrap(),
            )
            .unwrap(),
        ) as Box<dyn TwoLevelModel>
    };
    let rabi = |conv| {
        Box::new(
            RabiModel::new(
                RabiParams::new(1.0, 1.0, conv).unwrap(),
                Domain::new(0.05, 4.0).unwrap(),
            )
            .unwrap(),
        ) as Box<dyn TwoLevelModel>
    };
    let three = ThreeLevelModel::new(Box::new(linear_gamma(Domain::new(-2.0, 2.0).unwrap())), 0.1, 10.0).unwrap();
    vec![
        pert(std::f64::consts::FRAC_PI_4),
        pert(0.3),
        rabi(DeltaConvention::Paper),
        rabi(DeltaConvention::Matrix),
        Box::new(three),
        Box::new(linear_gamma(Domain::new(-2.0, 2.0).unwrap())),
    ]
}

/// `n` points strictly inside `[lo, hi]`.
pub fn interior(domain: Domain, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| domain.lo + (domain.hi - domain.lo) * k as f64 / (n + 1) as f64)
        .collect()
}
