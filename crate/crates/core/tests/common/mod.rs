#![allow(dead_code)]

use rand::Rng;
use rectdim::{ExponentProfile, ProductSpaceSpec};

/// Per-direction cover exponent at radius `r^A`, as a fraction of `A·log(1/r)`:
/// `δ·(min(A, a) + (A − a − t)⁺)/A` for points, plus the `κ` share of the loose cover.
pub fn oracle_candidate(delta: &[f64], kappa: f64, a: &[f64], t: &[f64], big_a: f64) -> f64 {
    delta
        .iter()
        .zip(a.iter().zip(t))
        .map(|(&d, (&ai, &ti))| {
            if ai >= big_a {
                d
            } else {
                let point = (ai.min(big_a) + (big_a - ai - ti).max(0.0)) / big_a;
                d * (kappa + (1.0 - kappa) * point)
            }
        })
        .sum()
}

/// Minimum over every `aᵢ` and `aᵢ + tᵢ`.
pub fn oracle_s(delta: &[f64], kappa: f64, a: &[f64], t: &[f64]) -> f64 {
    a.iter()
        .zip(t)
        .flat_map(|(&ai, &ti)| [ai, ai + ti])
        .map(|x| oracle_candidate(delta, kappa, a, t, x))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub delta: Vec<f64>,
    pub kappa: f64,
    pub a: Vec<f64>,
    pub t: Vec<f64>,
}

impl Instance {
    pub fn random(rng: &mut impl Rng) -> Self {
        let d = rng.gen_range(1..=6);
        let pos = |rng: &mut dyn rand::RngCore, hi: f64| loop {
            let x = rng.gen::<f64>() * hi;
            if x > 0.0 {
                return x;
            }
        };
        Self {
            delta: (0..d).map(|_| pos(rng, 3.0)).collect(),
            kappa: rng.gen::<f64>() * 0.9,
            a: (0..d).map(|_| pos(rng, 5.0)).collect(),
            t: (0..d).map(|_| rng.gen::<f64>() * 5.0).collect(),
        }
    }

    pub fn space(&self) -> ProductSpaceSpec {
        ProductSpaceSpec::new(self.delta.clone(), self.kappa).unwrap()
    }

    pub fn profile(&self) -> ExponentProfile {
        ExponentProfile::new(self.a.clone(), self.t.clone()).unwrap()
    }
}
