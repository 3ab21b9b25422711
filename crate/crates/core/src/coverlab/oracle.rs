//! Exact shrinking-target levels and box counting on them.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::applications::{shrinking_profile, shrinking_space};
use crate::cantor::Scale;
use crate::numeric::ols_slope;
use crate::{build_alphabet, compute_s, Anchor, CantorAxisSpec, Error, Result};

/// Most anchor images enumerated per direction.
const WORD_LIMIT: usize = 1_000_000;
/// Relative overlap below which a cylinder is treated as only touching a ball.
const TOUCH: f64 = 1e-9;

/// Disjoint closed intervals `[lo, hi]·b^{-level}` on one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionUnion {
    pub base: u32,
    pub level: u32,
    pub intervals: Vec<(u128, u128)>,
}

impl DirectionUnion {
    fn unit(&self) -> f64 {
        f64::from(self.base).powi(self.level as i32)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(lo, hi)| (hi - lo) as f64)
            .sum::<f64>()
            / self.unit()
    }

    pub fn as_f64(&self) -> Vec<(f64, f64)> {
        let u = self.unit();
        self.intervals
            .iter()
            .map(|&(lo, hi)| (lo as f64 / u, hi as f64 / u))
            .collect()
    }
}

/// Product of per-direction interval unions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductIntervalUnion {
    pub directions: Vec<DirectionUnion>,
}

/// Cylinder depth per direction at which the level is resolved: fine enough to
/// see the smallest radius `e^{-n·max(aᵢ+tᵢ)}` on every axis.
pub fn default_resolution(axes: &[CantorAxisSpec], t: &[f64], n: u32) -> Vec<u32> {
    let top = axes
        .iter()
        .zip(t)
        .map(|(ax, ti)| ax.log_base() + ti)
        .fold(0.0, f64::max);
    axes.iter()
        .map(|ax| {
            ((f64::from(n) * top / ax.log_base()) - 1e-9)
                .ceil()
                .max(f64::from(n)) as u32
        })
        .collect()
}

pub fn build_shrinking_level(
    axes: &[CantorAxisSpec],
    anchors: &[Anchor],
    t: &[f64],
    n: u32,
) -> Result<ProductIntervalUnion> {
    build_shrinking_level_at(axes, anchors, t, n, &default_resolution(axes, t, n))
}

/// Level-`n` union of shrunk intervals `B(xᵢ(v), bᵢ^{-n}e^{-n tᵢ})`, each
/// direction resolved into the level-`resolution[i]` Cantor cylinders meeting it.
pub fn build_shrinking_level_at(
    axes: &[CantorAxisSpec],
    anchors: &[Anchor],
    t: &[f64],
    n: u32,
    resolution: &[u32],
) -> Result<ProductIntervalUnion> {
    shrinking_profile(axes, t)?;
    if anchors.len() != axes.len() || resolution.len() != axes.len() {
        return Err(Error::InvalidAxis(
            "need one anchor and one resolution per axis".into(),
        ));
    }
    if n == 0 {
        return Err(Error::OutOfRange("level must be at least 1".into()));
    }
    let directions = axes
        .iter()
        .zip(anchors)
        .zip(t)
        .zip(resolution)
        .map(|(((ax, anchor), &ti), &res)| direction_union(ax, anchor, ti, n, res.max(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductIntervalUnion { directions })
}

fn direction_union(
    ax: &CantorAxisSpec,
    anchor: &Anchor,
    t: f64,
    n: u32,
    res: u32,
) -> Result<DirectionUnion> {
    let words = f64::from(ax.count()).powi(n as i32);
    if words > WORD_LIMIT as f64 {
        return Err(Error::SizeLimit(format!(
            "{words} words at level {n} exceed {WORD_LIMIT}"
        )));
    }
    let sc = Scale::new(ax.base(), res.max(n + anchor.prefix().len() as u32))?;
    let h = (-f64::from(n) * (ax.log_base() + t)).exp();
    let den = sc.den() as f64;
    let slack = h * (1.0 - TOUCH);
    let b = i128::from(ax.base());

    let mut cells: Vec<i128> = Vec::new();
    for x in sc.points_in(ax, anchor, n, 0, sc.den(), WORD_LIMIT)? {
        let mut stack = vec![(0i128, 0u32)];
        while let Some((w, j)) = stack.pop() {
            for &d in ax.digits() {
                let child = w * b + i128::from(d);
                let size = sc.cell(j + 1);
                let lo = (child * size - x) as f64 / den;
                let hi = ((child + 1) * size - x) as f64 / den;
                if lo < slack && hi > -slack {
                    if j + 1 == res {
                        cells.push(child);
                    } else {
                        stack.push((child, j + 1));
                    }
                }
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    let mut intervals: Vec<(u128, u128)> = Vec::new();
    for c in cells {
        let c = c as u128;
        match intervals.last_mut() {
            Some(last) if last.1 == c => last.1 = c + 1,
            _ => intervals.push((c, c + 1)),
        }
    }
    Ok(DirectionUnion {
        base: ax.base(),
        level: res,
        intervals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCount {
    pub log_count: f64,
    pub per_direction: Vec<u128>,
    /// Exact product when it fits.
    pub count: Option<u128>,
}

/// Number of grid cells `[jε, (j+1)ε)` meeting the union, per direction and in product.
pub fn grid_count(union: &ProductIntervalUnion, eps: f64) -> Result<GridCount> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    let last_cell = ((1.0 / eps) - 1e-9).ceil() as u128 - 1;
    let per_direction: Vec<u128> = union
        .directions
        .iter()
        .map(|dir| {
            let scale = dir.unit() * eps;
            let mut count = 0u128;
            let mut next_free = 0u128;
            for &(lo, hi) in &dir.intervals {
                let first = ((lo as f64 / scale) + 1e-9).floor().max(0.0) as u128;
                let last = (((hi as f64 / scale) - 1e-9).ceil() as u128)
                    .saturating_sub(1)
                    .min(last_cell);
                let first = first.max(next_free);
                if last >= first {
                    count += last - first + 1;
                    next_free = last + 1;
                }
            }
            count
        })
        .collect();
    let log_count = per_direction.iter().map(|&c| (c as f64).ln()).sum();
    let count = per_direction
        .iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(c));
    Ok(GridCount {
        log_count,
        per_direction,
        count,
    })
}

/// One row of the per-level table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub n: u32,
    pub radius_exponent: f64,
    pub eps: f64,
    pub log_count: f64,
    pub count: Option<u128>,
    /// `log N(ε) + s·log ε` at the level's estimate `s`.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelEstimate {
    pub n: u32,
    /// `min_ε log N(ε)/log(1/ε)` on this level alone.
    pub single: f64,
    pub single_argmin: f64,
    /// `min_A` of the slope of `log N(e^{-mA})` against `mA` over the levels up to `n`.
    pub regression: Option<f64>,
    pub regression_argmin: Option<f64>,
}

impl LevelEstimate {
    pub fn value(&self) -> f64 {
        self.regression.unwrap_or(self.single)
    }

    pub fn argmin(&self) -> f64 {
        self.regression_argmin.unwrap_or(self.single_argmin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub levels: Vec<LevelEstimate>,
    pub rows: Vec<LevelRow>,
    pub alphabet: Vec<f64>,
    pub grid: Vec<f64>,
    pub grid_step: f64,
    pub value: f64,
    pub model: f64,
}

/// Critical exponent of exact grid counts over a range of levels.
///
/// The radius grid is `e^{-nA}` with `A` spanning `[min𝒜, max𝒜]` in `steps` steps.
pub fn empirical_critical_exponent(
    axes: &[CantorAxisSpec],
    anchors: &[Anchor],
    t: &[f64],
    levels: RangeInclusive<u32>,
    steps: usize,
) -> Result<EmpiricalReport> {
    let profile = shrinking_profile(axes, t)?;
    let model = compute_s(&shrinking_space(axes)?, &profile)?.value;
    let alphabet = build_alphabet(&profile).entries;
    let (a_min, a_max) = (alphabet[0], alphabet[alphabet.len() - 1]);
    if steps == 0 || levels.is_empty() || *levels.start() == 0 {
        return Err(Error::OutOfRange(
            "need a non-empty level range starting at 1 or above and steps > 0".into(),
        ));
    }
    let grid_step = (a_max - a_min) / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|k| a_min + grid_step * k as f64).collect();

    let ns: Vec<u32> = levels.collect();
    let counts = ns
        .par_iter()
        .map(|&n| {
            let union = build_shrinking_level(axes, anchors, t, n)?;
            grid.iter()
                .map(|&a| grid_count(&union, (-f64::from(n) * a).exp()))
                .collect::<Result<Vec<GridCount>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut estimates = Vec::with_capacity(ns.len());
    let mut rows = Vec::new();
    for (li, &n) in ns.iter().enumerate() {
        let nf = f64::from(n);
        let (single_k, single) = argmin(
            grid.iter()
                .enumerate()
                .map(|(k, a)| counts[li][k].log_count / (nf * a)),
        );
        let regression = (li > 0).then(|| {
            argmin(grid.iter().enumerate().map(|(k, &a)| {
                let xs: Vec<f64> = ns[..=li].iter().map(|&m| f64::from(m) * a).collect();
                let ys: Vec<f64> = (0..=li).map(|l| counts[l][k].log_count).collect();
                ols_slope(&xs, &ys).unwrap_or(f64::INFINITY)
            }))
        });
        let est = LevelEstimate {
            n,
            single,
            single_argmin: grid[single_k],
            regression: regression.map(|r| r.1),
            regression_argmin: regression.map(|r| grid[r.0]),
        };
        for (k, &a) in grid.iter().enumerate() {
            let gc = &counts[li][k];
            rows.push(LevelRow {
                n,
                radius_exponent: a,
                eps: (-nf * a).exp(),
                log_count: gc.log_count,
                count: gc.count,
                cost: gc.log_count - est.value() * nf * a,
            });
        }
        estimates.push(est);
    }
    let value = estimates
        .last()
        .map(LevelEstimate::value)
        .unwrap_or(f64::NAN);
    Ok(EmpiricalReport {
        levels: estimates,
        rows,
        alphabet,
        grid,
        grid_step,
        value,
        model,
    })
}

fn argmin(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values.enumerate().fold(
        (0, f64::INFINITY),
        |(kb, vb), (k, v)| if v < vb { (k, v) } else { (kb, vb) },
    )
}
