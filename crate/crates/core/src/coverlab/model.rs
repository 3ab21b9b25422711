use serde::Serialize;

use crate::numeric::ols_slope;
use crate::{
    build_alphabet, partition_for, Error, ExponentProfile, ProductSpaceSpec, Result, TiePolicy,
};

/// One level of a rectangle system at scale `r`, with `T_k` big balls per direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSpec {
    pub space: ProductSpaceSpec,
    pub profile: ExponentProfile,
    pub r: f64,
    /// `log T_k`; the default is `aₖδₖ·log(1/r)`.
    pub log_counts: Vec<f64>,
}

impl LevelSpec {
    pub fn new(space: ProductSpaceSpec, profile: ExponentProfile, r: f64) -> Result<Self> {
        let big_l = -r.ln();
        let log_counts = profile
            .a()
            .iter()
            .zip(space.deltas())
            .map(|(a, d)| a * d * big_l)
            .collect();
        Self::with_log_counts(space, profile, r, log_counts)
    }

    pub fn with_log_counts(
        space: ProductSpaceSpec,
        profile: ExponentProfile,
        r: f64,
        log_counts: Vec<f64>,
    ) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::OutOfRange(format!(
                "scale must lie in (0,1), got {r}"
            )));
        }
        if space.d() != profile.d() || log_counts.len() != space.d() {
            return Err(Error::InvalidProfile("level dimensions disagree".into()));
        }
        if log_counts.iter().any(|c| c.is_nan() || *c < 0.0) {
            return Err(Error::OutOfRange(
                "big-ball counts must be at least 1".into(),
            ));
        }
        Ok(Self {
            space,
            profile,
            r,
            log_counts,
        })
    }
}

/// Log of the modelled number of `r^A`-balls covering the level's shrunk rectangles.
///
/// Per direction: `r^{-Aδ}` when the ball exceeds the big side, `T·(r^{a+t}/r^A)^δ`
/// when it is below the shrunk side, and `T` in between. For κ > 0 the last two
/// factors are mixed with `r^{-Aδ}` in proportion κ, which keeps `log count / (A log(1/r))`
/// equal to the candidate value of the dimension formula.
pub fn cover_count(level: &LevelSpec, a_cand: f64) -> Result<f64> {
    if !(a_cand.is_finite() && a_cand > 0.0) {
        return Err(Error::OutOfRange(format!(
            "radius exponent must be positive, got {a_cand}"
        )));
    }
    let part = partition_for(a_cand, &level.profile, TiePolicy::Default)?;
    let big_l = -level.r.ln();
    let kappa = level.space.kappa();
    let delta = level.space.deltas();
    let (a, t) = (level.profile.a(), level.profile.t());
    let loose = |k: usize| a_cand * delta[k] * big_l;
    let mut total: f64 = part.k1.iter().map(|&k| loose(k)).sum();
    for &k in &part.k2 {
        let excess = (a[k] + t[k] - a_cand) * delta[k] * big_l;
        total += (1.0 - kappa) * (level.log_counts[k] - excess) + kappa * loose(k);
    }
    for &k in &part.k3 {
        total += (1.0 - kappa) * level.log_counts[k] + kappa * loose(k);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport {
    pub s: f64,
    pub iterations: u32,
    /// Cost-minimizing radius exponent on the last level at `s`.
    pub argmin: f64,
}

/// Slope of `min_A cost` against `log(1/r)` along the levels.
fn cost_trend(levels: &[LevelSpec], s: f64) -> Result<(f64, f64)> {
    let mut xs = Vec::with_capacity(levels.len());
    let mut ys = Vec::with_capacity(levels.len());
    let mut argmin = f64::NAN;
    for level in levels {
        let mut best = f64::INFINITY;
        for &a in &build_alphabet(&level.profile).entries {
            let c = cover_count(level, a)? + s * a * level.r.ln();
            if c < best {
                best = c;
                argmin = a;
            }
        }
        xs.push(-level.r.ln());
        ys.push(best);
    }
    let slope = ols_slope(&xs, &ys)
        .ok_or_else(|| Error::NonConvergentBracket("need at least two distinct scales".into()))?;
    Ok((slope, argmin))
}

/// Smallest `s` for which the optimal level cost tends to `−∞`, by bisection.
pub fn critical_exponent(
    levels: &[LevelSpec],
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<CriticalReport> {
    if levels.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let diverges = |s: f64| cost_trend(levels, s).map(|(slope, _)| slope < 0.0);
    if diverges(lo)? || !diverges(hi)? {
        return Err(Error::NonConvergentBracket(format!(
            "[{lo}, {hi}] does not bracket the transition"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if diverges(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let s = 0.5 * (lo + hi);
    let (_, argmin) = cost_trend(levels, s)?;
    Ok(CriticalReport {
        s,
        iterations,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute_s;

    fn levels(space: &ProductSpaceSpec, p: &ExponentProfile) -> Vec<LevelSpec> {
        (1..=8)
            .map(|n| LevelSpec::new(space.clone(), p.clone(), (-(n as f64)).exp()).unwrap())
            .collect()
    }

    #[test]
    fn hand_example() {
        let space = ProductSpaceSpec::new(vec![1.0, 1.0], 0.0).unwrap();
        let p = ExponentProfile::new(vec![2.0, 1.0], vec![2.0, 0.5]).unwrap();
        let level = LevelSpec::new(space, p, (-1f64).exp()).unwrap();
        assert!((cover_count(&level, 1.5).unwrap() - 2.5).abs() < 1e-12);
        // below every side: the loose cover
        assert!((cover_count(&level, 0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn critical_matches_formula() {
        let space = ProductSpaceSpec::new(vec![1.0, 2f64.ln() / 3f64.ln()], 0.0).unwrap();
        let p = ExponentProfile::new(vec![2f64.ln(), 3f64.ln()], vec![2f64.ln(), 0.0]).unwrap();
        let r = critical_exponent(&levels(&space, &p), 0.0, 3.0, 1e-6).unwrap();
        assert!((r.s - compute_s(&space, &p).unwrap().value).abs() < 1e-5);

        let space = ProductSpaceSpec::new(vec![1.0], 0.0).unwrap();
        let p = ExponentProfile::new(vec![1.0], vec![1.0]).unwrap();
        let r = critical_exponent(&levels(&space, &p), 0.0, 2.0, 1e-6).unwrap();
        assert!((r.s - 0.5).abs() < 1e-5);
        assert!(critical_exponent(&levels(&space, &p), 0.8, 2.0, 1e-6).is_err());
    }
}
