//! Empirical Hölder exponent of the tree measure on sampled balls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::masstree::{MassTree, Node};
use crate::numeric::ols_slope;
use crate::{Error, Result};

const BINS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderBin {
    pub log_r: f64,
    pub samples: usize,
    /// Largest `log μ(B(x,r)) − s·log r` in the bin.
    pub max_log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    pub s: f64,
    pub epsilon: f64,
    pub samples: usize,
    /// Largest `μ(B(x,r))/r^s` seen.
    pub constant: f64,
    /// Slope of the per-bin maxima against `log r`.
    pub slope: f64,
    pub bins: Vec<HolderBin>,
    pub pass: bool,
}

/// Sup-norm ball mass: nodes inside the ball count whole, leaves meeting it count whole.
pub fn ball_mass(tree: &MassTree, x: &[f64], r: f64) -> f64 {
    let mut total = 0.0;
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let node: &Node = &tree.nodes[id];
        let gaps = node
            .center
            .iter()
            .zip(&node.radii)
            .zip(x)
            .map(|((c, h), xi)| ((c - xi).abs(), *h));
        let (mut meets, mut inside) = (true, true);
        for (dist, h) in gaps {
            meets &= dist < r + h;
            inside &= dist + h <= r;
        }
        if !meets {
            continue;
        }
        if inside || node.is_leaf() {
            total += node.mu;
        } else {
            stack.extend(&node.children);
        }
    }
    total
}

/// Samples centres from the leaves (by mass) and radii log-uniformly in
/// `[deepest ball radius, 1]`; passes when the binned maxima of
/// `log(μ(B(x,r))/r^s)` show no growth trend steeper than `epsilon` as `r → 0`.
pub fn holder_test(
    tree: &MassTree,
    s: f64,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<HolderReport> {
    let leaves: Vec<&Node> = tree.leaves().filter(|n| n.mu > 0.0).collect();
    if tree.depth() == 0 || leaves.is_empty() {
        return Err(Error::EmptyTree);
    }
    if samples == 0 {
        return Err(Error::EmptySample);
    }
    let cumulative: Vec<f64> = leaves
        .iter()
        .scan(0.0, |acc, n| {
            *acc += n.mu;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().unwrap_or(&0.0);
    let log_min = tree.min_radius().ln();

    let draws: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u = rng.gen::<f64>() * total;
            let leaf = leaves[cumulative
                .partition_point(|&c| c <= u)
                .min(leaves.len() - 1)];
            let log_r = log_min * rng.gen::<f64>();
            let mu = ball_mass(tree, &leaf.center, log_r.exp());
            (log_r, mu.ln() - s * log_r)
        })
        .collect();

    let width = -log_min / BINS as f64;
    let mut bins: Vec<HolderBin> = (0..BINS)
        .map(|b| HolderBin {
            log_r: log_min + width * (b as f64 + 0.5),
            samples: 0,
            max_log_ratio: f64::NEG_INFINITY,
        })
        .collect();
    for &(log_r, ratio) in &draws {
        let b = (((log_r - log_min) / width) as usize).min(BINS - 1);
        bins[b].samples += 1;
        bins[b].max_log_ratio = bins[b].max_log_ratio.max(ratio);
    }
    bins.retain(|b| b.samples > 0);
    let xs: Vec<f64> = bins.iter().map(|b| b.log_r).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.max_log_ratio).collect();
    let slope = ols_slope(&xs, &ys).ok_or(Error::EmptySample)?;
    let constant = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(HolderReport {
        s,
        epsilon,
        samples,
        constant,
        slope,
        bins,
        pass: slope >= -epsilon,
    })
}
