//! Exponent orbits of general approximating functions and their accumulation points.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::{Error, ExponentProfile, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub n: f64,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub center: Vec<f64>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub orbit: Vec<Vec<f64>>,
    /// Clusters of the second half of the orbit, ordered by their first grid cell.
    pub clusters: Vec<Cluster>,
    pub eps: f64,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Orbit `(log ψᵢ(n) / log ρ(n))ᵢ` plus an ε-grid clustering of its tail.
///
/// Points are snapped to the grid `ε·ℤ^d`; occupied cells that touch
/// (Chebyshev distance 1) are merged, and each cluster reports its mean.
pub fn exponent_orbit(
    samples: &[OrbitSample],
    rho_log: impl Fn(f64) -> f64,
    eps: f64,
) -> Result<OrbitReport> {
    let first = samples.first().ok_or(Error::EmptySample)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let d = first.psi.len();
    let mut orbit = Vec::with_capacity(samples.len());
    for s in samples {
        if s.psi.len() != d || s.psi.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::InvalidInstance(format!(
                "psi values must lie in (0,1) at n = {}",
                s.n
            )));
        }
        let lr = rho_log(s.n);
        if !(lr.is_finite() && lr < 0.0) {
            return Err(Error::InvalidInstance(format!(
                "log rho must be negative at n = {}",
                s.n
            )));
        }
        orbit.push(s.psi.iter().map(|p| p.ln() / lr).collect::<Vec<f64>>());
    }

    let tail = &orbit[orbit.len() / 2..];
    let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, v) in tail.iter().enumerate() {
        let key = v.iter().map(|x| (x / eps).round() as i64).collect();
        cells.entry(key).or_default().push(i);
    }
    let keys: Vec<&Vec<i64>> = cells.keys().collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let near = keys[i].iter().zip(keys[j]).all(|(a, b)| (a - b).abs() <= 1);
            if near {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (c, key) in keys.iter().enumerate() {
        let root = find(&mut parent, c);
        groups
            .entry(root)
            .or_default()
            .extend(cells[*key].iter().copied());
    }
    let clusters = groups
        .values()
        .map(|members| {
            let mut center = vec![0.0; d];
            for &m in members {
                for (c, x) in center.iter_mut().zip(&tail[m]) {
                    *c += x;
                }
            }
            center.iter_mut().for_each(|c| *c /= members.len() as f64);
            Cluster {
                center,
                size: members.len(),
            }
        })
        .collect();
    Ok(OrbitReport {
        orbit,
        clusters,
        eps,
    })
}

/// Shrink vectors `t = center − a` for the clustered exponents (negative parts clamp to 0).
pub fn candidate_profiles(report: &OrbitReport, a: &[f64]) -> Result<Vec<ExponentProfile>> {
    if report.clusters.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    report
        .clusters
        .iter()
        .map(|c| {
            if c.center.len() != a.len() {
                return Err(Error::InvalidProfile(
                    "cluster and big-side exponents differ in length".into(),
                ));
            }
            let t = c
                .center
                .iter()
                .zip(a)
                .map(|(e, a)| (e - a).max(0.0))
                .collect();
            ExponentProfile::new(a.to_vec(), t)
        })
        .collect()
}

/// `liminf −log ψ(n)/n`, estimated as the minimum over the second half of the samples.
pub fn liminf_rate(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    samples[samples.len() / 2..]
        .iter()
        .map(|&(n, psi)| {
            if psi > 0.0 && n > 0.0 {
                Ok(-psi.ln() / n)
            } else {
                Err(Error::InvalidInstance(format!(
                    "need psi > 0 and n > 0, got ({n}, {psi})"
                )))
            }
        })
        .try_fold(f64::INFINITY, |acc, r| r.map(|v| acc.min(v)))
}
