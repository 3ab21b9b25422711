//! Coverage of a ball by the big-rectangle neighbourhoods of one level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::Scale;
use crate::{Anchor, CantorAxisSpec, Error, Result};

/// Most resonant points enumerated per direction in one coverage query.
const POINT_LIMIT: usize = 2_000_000;
/// Extra exact digits kept below the level when snapping balls for the shrinking system.
const GUARD_DIGITS: u32 = 24;

/// The scale function `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rho {
    /// `u ↦ u^{-1}`
    Inverse,
    /// `u ↦ e^{-u}`
    Exp,
}

impl Rho {
    pub fn log(self, u: f64) -> f64 {
        match self {
            Rho::Inverse => -u.ln(),
            Rho::Exp => -u,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SystemKind {
    Simultaneous {
        m: usize,
        a: Vec<f64>,
    },
    LinearForms {
        m: usize,
        n: usize,
        a: Vec<f64>,
    },
    Shrinking {
        axes: Vec<CantorAxisSpec>,
        anchors: Vec<Anchor>,
    },
}

/// A resonant system together with its level sequence `(ℓₖ, uₖ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UbiquitySystemSpec {
    pub kind: SystemKind,
    pub rho: Rho,
    /// Base `M` of `ℓₖ = M^{k−1}, uₖ = M^k`; unused for shrinking systems.
    pub big_m: u64,
    /// Neighbourhood radii are `c·ρ(uₖ)^{aᵢ}`.
    pub c: f64,
}

fn check_exponents(a: &[f64], total: f64) -> Result<()> {
    if a.is_empty() || a.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return Err(Error::InvalidProfile("exponents must be at least 1".into()));
    }
    let sum: f64 = a.iter().sum();
    if (sum - total).abs() > 1e-9 {
        return Err(Error::InvalidProfile(format!(
            "exponents sum to {sum}, expected {total}"
        )));
    }
    Ok(())
}

impl UbiquitySystemSpec {
    /// Rational points `p/q` in `[0,1]^m`; requires `M ≥ 2^{3m+2}`.
    pub fn simultaneous(a: Vec<f64>, big_m: u64) -> Result<Self> {
        let m = a.len();
        check_exponents(&a, m as f64 + 1.0)?;
        let min = 1u64.checked_shl(3 * m as u32 + 2).unwrap_or(u64::MAX);
        if big_m < min {
            return Err(Error::InvalidM(format!(
                "M = {big_m} is below 2^(3m+2) = {min}"
            )));
        }
        Ok(Self {
            kind: SystemKind::Simultaneous { m, a },
            rho: Rho::Inverse,
            big_m,
            c: big_m as f64,
        })
    }

    /// Hyperplanes `q·x = p` in `[0,1]^n`, one per row; requires `M ≥ 2^{2m+1}·n^m`.
    pub fn linear_forms(n: usize, a: Vec<f64>, big_m: u64) -> Result<Self> {
        let m = a.len();
        if n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        check_exponents(&a, (m + n) as f64)?;
        let min = 2f64.powi(2 * m as i32 + 1) * (n as f64).powi(m as i32);
        if (big_m as f64) < min {
            return Err(Error::InvalidM(format!(
                "M = {big_m} is below 2^(2m+1)·n^m = {min}"
            )));
        }
        Ok(Self {
            kind: SystemKind::LinearForms { m, n, a },
            rho: Rho::Inverse,
            big_m,
            c: big_m as f64,
        })
    }

    /// Inverse images of an anchor under `×bᵢ` on a Cantor product; `ℓₙ = uₙ = n`.
    pub fn shrinking(axes: Vec<CantorAxisSpec>, anchors: Vec<Anchor>) -> Result<Self> {
        if axes.is_empty() || anchors.len() != axes.len() {
            return Err(Error::InvalidAxis("need one anchor per axis".into()));
        }
        Ok(Self {
            kind: SystemKind::Shrinking { axes, anchors },
            rho: Rho::Exp,
            big_m: 1,
            c: 1.0,
        })
    }

    pub fn with_constant(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "neighbourhood constant must be positive, got {c}"
            )));
        }
        self.c = c;
        Ok(self)
    }

    /// Ambient dimension of the space the balls live in.
    pub fn dim(&self) -> usize {
        match &self.kind {
            SystemKind::Simultaneous { m, .. } => *m,
            SystemKind::LinearForms { m, n, .. } => m * n,
            SystemKind::Shrinking { axes, .. } => axes.len(),
        }
    }

    /// `(ℓₖ, uₖ)`.
    pub fn level(&self, k: u32) -> Result<(u64, u64)> {
        if k == 0 {
            return Err(Error::OutOfRange("levels start at 1".into()));
        }
        match self.kind {
            SystemKind::Shrinking { .. } => Ok((u64::from(k), u64::from(k))),
            _ => {
                let u = self
                    .big_m
                    .checked_pow(k)
                    .filter(|&u| u <= 1 << 40)
                    .ok_or_else(|| Error::SizeLimit(format!("M^{k} is too large to enumerate")))?;
                Ok((u / self.big_m, u))
            }
        }
    }

    /// Neighbourhood radius per direction at level `k`.
    pub fn radii(&self, k: u32) -> Result<Vec<f64>> {
        let (_, u) = self.level(k)?;
        let lr = self.rho.log(u as f64);
        Ok(match &self.kind {
            SystemKind::Simultaneous { a, .. } | SystemKind::LinearForms { a, .. } => {
                a.iter().map(|ai| self.c * (ai * lr).exp()).collect()
            }
            SystemKind::Shrinking { axes, .. } => axes
                .iter()
                .map(|ax| self.c * (ax.log_base() * lr).exp())
                .collect(),
        })
    }
}

/// Smallest level `k` at which the simultaneous (`m = 1`) covering argument
/// applies to balls of radius `r` with base `M`.
pub fn min_covering_level(big_m: u64, r: f64) -> Option<u32> {
    let m = big_m as f64;
    if 4.0 / m > 0.25 {
        return None;
    }
    (1..=12).find(|&k| 18.0 * f64::from(k) * m.ln() / m.powi(k as i32) <= r / 4.0)
}

/// Sup-norm ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.iter().any(|c| !c.is_finite()) || !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::OutOfRange(
                "ball needs a finite centre and a non-negative radius".into(),
            ));
        }
        Ok(Self { center, radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum CoverageMethod {
    Exact1d,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub level: u32,
    pub fraction: f64,
    pub stderr: f64,
    pub method: &'static str,
    /// Set when the ball has no mass, in which case the fraction is 0.
    pub degenerate: bool,
}

/// `m(B ∩ ⋃ Δ(R_α, c·ρ(uₖ)^a)) / m(B)` over `ℓₖ ≤ β_α ≤ uₖ`.
pub fn ubiquity_coverage(
    spec: &UbiquitySystemSpec,
    ball: &Ball,
    k: u32,
    method: CoverageMethod,
) -> Result<CoverageReport> {
    if ball.center.len() != spec.dim() {
        return Err(Error::InvalidInstance(format!(
            "ball has dimension {}, system has {}",
            ball.center.len(),
            spec.dim()
        )));
    }
    spec.level(k)?;
    let degenerate = |method| CoverageReport {
        level: k,
        fraction: 0.0,
        stderr: 0.0,
        method,
        degenerate: true,
    };
    match (method, &spec.kind) {
        (CoverageMethod::Exact1d, SystemKind::Shrinking { axes, anchors }) => {
            if ball.radius == 0.0 {
                return Ok(degenerate("exact_1d"));
            }
            shrinking_exact(axes, anchors, ball, k)
        }
        (CoverageMethod::Exact1d, SystemKind::Simultaneous { m: 1, .. }) => {
            if ball.radius == 0.0 {
                return Ok(degenerate("exact_1d"));
            }
            let (lo, hi) = spec.level(k)?;
            let fraction = farey_coverage(ball, lo, hi, spec.radii(k)?[0])?;
            Ok(CoverageReport {
                level: k,
                fraction,
                stderr: 0.0,
                method: "exact_1d",
                degenerate: false,
            })
        }
        (CoverageMethod::Exact1d, _) => Err(Error::InvalidInstance(
            "exact coverage needs a one-dimensional or shrinking system".into(),
        )),
        (CoverageMethod::MonteCarlo { .. }, SystemKind::Shrinking { .. }) => Err(
            Error::InvalidInstance("shrinking systems are measured exactly".into()),
        ),
        (CoverageMethod::MonteCarlo { samples, seed }, _) => {
            if samples == 0 {
                return Err(Error::EmptySample);
            }
            if ball.radius == 0.0 {
                return Ok(degenerate("monte_carlo"));
            }
            monte_carlo(spec, ball, k, samples, seed)
        }
    }
}

/// Fraction of `B` covered by `p/q ± radius` over `lo ≤ q ≤ hi` (fractions not
/// necessarily reduced), by sweeping the Farey sequence of order `hi` across the ball.
fn farey_coverage(ball: &Ball, lo: u64, hi: u64, radius: f64) -> Result<f64> {
    let (b_lo, b_hi) = (ball.center[0] - ball.radius, ball.center[0] + ball.radius);
    let q_max = i64::try_from(hi).map_err(|_| Error::SizeLimit("order too large".into()))?;
    let start = (b_lo - radius).clamp(0.0, 1.0);
    let (mut a, mut b, mut c, mut d) = farey_bracket(start, q_max);
    let mut covered = 0.0;
    let mut reach = b_lo;
    loop {
        let x = a as f64 / b as f64;
        if x - radius >= b_hi {
            break;
        }
        // p/q counts when some non-reduced form jp/jq has its denominator in range
        if (hi / b as u64) * b as u64 >= lo {
            let from = (x - radius).max(reach);
            let to = (x + radius).min(b_hi);
            if to > from {
                covered += to - from;
                reach = to;
            }
        }
        if a == 1 && b == 1 {
            break;
        }
        let f = (q_max + b) / d;
        (a, b, c, d) = (c, d, f * c - a, f * d - b);
    }
    Ok(covered / (2.0 * ball.radius))
}

/// Adjacent Farey fractions `a/b ≤ x < c/d` of order `q`, or `(1,1)` with its successor at `x = 1`.
fn farey_bracket(x: f64, q: i64) -> (i64, i64, i64, i64) {
    let mut left = (0i64, 1i64);
    let mut right = (1i64, 1i64);
    for den in 1..=q {
        let p = ((x * den as f64).floor() as i64).clamp(0, den);
        // p/den ≤ x < (p+1)/den, up to rounding of x·den
        if p * left.1 > left.0 * den {
            left = (p, den);
        }
        if p < den && (p + 1) * right.1 < right.0 * den {
            right = (p + 1, den);
        }
    }
    if left == (1, 1) {
        return (1, 1, 1, 1);
    }
    debug_assert_eq!(left.1 * right.0 - left.0 * right.1, 1);
    (left.0, left.1, right.0, right.1)
}

fn monte_carlo(
    spec: &UbiquitySystemSpec,
    ball: &Ball,
    k: u32,
    samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    let (lo, hi) = spec.level(k)?;
    let radii = spec.radii(k)?;
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x: Vec<f64> = ball
                .center
                .iter()
                .map(|c| c + ball.radius * (2.0 * rng.gen::<f64>() - 1.0))
                .collect();
            usize::from(match &spec.kind {
                SystemKind::Simultaneous { .. } => simultaneous_hit(&x, lo, hi, &radii),
                SystemKind::LinearForms { n, .. } => linear_hit(&x, *n, lo, hi, &radii),
                SystemKind::Shrinking { .. } => unreachable!("rejected before sampling"),
            })
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(CoverageReport {
        level: k,
        fraction: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        method: "monte_carlo",
        degenerate: false,
    })
}

fn simultaneous_hit(x: &[f64], lo: u64, hi: u64, radii: &[f64]) -> bool {
    (lo.max(1)..=hi).any(|q| {
        let qf = q as f64;
        x.iter()
            .zip(radii)
            .all(|(&xi, &r)| ((xi * qf).round() / qf - xi).abs() < r)
    })
}

/// Some `q ∈ ℤⁿ` with `ℓ ≤ |q|∞ ≤ u` puts every row within its radius of a hyperplane `q·y = p`.
fn linear_hit(x: &[f64], n: usize, lo: u64, hi: u64, radii: &[f64]) -> bool {
    let h = hi as i64;
    let mut q = vec![-h; n];
    loop {
        let sup = q.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if sup >= lo.max(1) && sup <= hi {
            let l1 = q.iter().map(|v| v.unsigned_abs() as f64).sum::<f64>();
            let hit = x.chunks(n).zip(radii).all(|(row, &r)| {
                let dot: f64 = row.iter().zip(&q).map(|(xi, &qi)| xi * qi as f64).sum();
                (dot - dot.round()).abs() / l1 < r
            });
            if hit {
                return true;
            }
        }
        let mut j = 0;
        loop {
            if j == n {
                return false;
            }
            q[j] += 1;
            if q[j] <= h {
                break;
            }
            q[j] = -h;
            j += 1;
        }
    }
}

/// Exact coverage for the shrinking system: ratio of natural Cantor measures,
/// with the ball snapped to the exact grid `(b−1)^{-1} b^{-P}`.
fn shrinking_exact(
    axes: &[CantorAxisSpec],
    anchors: &[Anchor],
    ball: &Ball,
    n: u32,
) -> Result<CoverageReport> {
    let mut num_all = 1f64;
    let mut den_all = 1f64;
    let mut exact_one = true;
    for ((ax, anchor), (&c, r)) in axes
        .iter()
        .zip(anchors)
        .zip(ball.center.iter().zip(std::iter::repeat(ball.radius)))
    {
        let sc = exact_scale(ax, n + anchor.prefix().len() as u32)?;
        let den = sc.den() as f64;
        let lo = ((c - r).max(0.0) * den).floor() as i128;
        let hi = ((c + r).min(1.0) * den).ceil() as i128;
        let h = sc.cell(n);
        let (_, ball_mass) = measure_between(&sc, ax, lo, hi)?;
        if ball_mass == 0 {
            return Ok(CoverageReport {
                level: n,
                fraction: 0.0,
                stderr: 0.0,
                method: "exact_1d",
                degenerate: true,
            });
        }
        let mut covered = 0i128;
        let mut reach = lo;
        for x in sc.points_in(ax, anchor, n, lo - h, hi + h, POINT_LIMIT)? {
            let from = (x - h).max(reach);
            let to = (x + h).min(hi);
            if to > from {
                covered += measure_between(&sc, ax, from, to)?.1;
                reach = to;
            }
        }
        exact_one &= covered == ball_mass;
        num_all *= covered as f64;
        den_all *= ball_mass as f64;
    }
    let fraction = if exact_one { 1.0 } else { num_all / den_all };
    Ok(CoverageReport {
        level: n,
        fraction,
        stderr: 0.0,
        method: "exact_1d",
        degenerate: false,
    })
}

/// Finest scale below level `p` that still supports exact measures, up to the guard digits.
fn exact_scale(ax: &CantorAxisSpec, p: u32) -> Result<Scale> {
    let mut last = Error::SizeLimit(format!("level {p} exceeds exact range"));
    for g in (0..=GUARD_DIGITS).rev() {
        match Scale::new(ax.base(), p + g).and_then(|sc| sc.cdf_exact(ax, 1).map(|_| sc)) {
            Ok(sc) => return Ok(sc),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `(denominator, numerator)` of the Cantor measure of `[lo, hi]`.
fn measure_between(sc: &Scale, ax: &CantorAxisSpec, lo: i128, hi: i128) -> Result<(i128, i128)> {
    let (a, den) = sc.cdf_exact(ax, lo)?;
    let (b, _) = sc.cdf_exact(ax, hi)?;
    Ok((den, b - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_on_m() {
        assert!(UbiquitySystemSpec::simultaneous(vec![2.0], 31).is_err());
        assert!(UbiquitySystemSpec::simultaneous(vec![2.0], 32).is_ok());
        assert!(UbiquitySystemSpec::simultaneous(vec![1.5], 32).is_err());
        assert!(UbiquitySystemSpec::linear_forms(2, vec![3.0], 15).is_err());
        assert!(UbiquitySystemSpec::linear_forms(2, vec![3.0], 16).is_ok());
    }

    #[test]
    fn farey_bracket_is_adjacent() {
        for &x in &[0.0, 0.1, 0.5, 0.333, 0.99] {
            let (a, b, c, d) = farey_bracket(x, 50);
            assert_eq!(b * c - a * d, 1);
            assert!(a as f64 / b as f64 <= x && x < c as f64 / d as f64);
        }
    }

    #[test]
    fn farey_sweep_matches_brute_force() {
        let ball = Ball::new(vec![0.37], 0.11).unwrap();
        let (lo, hi, r) = (4u64, 40u64, 0.004);
        let swept = farey_coverage(&ball, lo, hi, r).unwrap();
        let steps = 200_000;
        let brute = (0..steps)
            .map(|i| 0.26 + 0.22 * (i as f64 + 0.5) / steps as f64)
            .filter(|&x| simultaneous_hit(&[x], lo, hi, &[r]))
            .count() as f64
            / steps as f64;
        assert!((swept - brute).abs() < 1e-4, "{swept} vs {brute}");
    }

    #[test]
    fn shrinking_is_exactly_full() {
        let axes = vec![
            CantorAxisSpec::full(2).unwrap(),
            CantorAxisSpec::new(3, [0, 2]).unwrap(),
        ];
        let spec = UbiquitySystemSpec::shrinking(axes, vec![Anchor::tail_only(); 2]).unwrap();
        for n in 1..6 {
            let ball = Ball::new(vec![0.3, 0.7], 0.2).unwrap();
            let rep = ubiquity_coverage(&spec, &ball, n, CoverageMethod::Exact1d).unwrap();
            assert_eq!(rep.fraction, 1.0);
        }
        let gap = Ball::new(vec![0.5, 0.5], 0.1).unwrap();
        assert!(
            ubiquity_coverage(&spec, &gap, 2, CoverageMethod::Exact1d)
                .unwrap()
                .degenerate
        );
    }

    #[test]
    fn zero_radius_is_degenerate() {
        let spec = UbiquitySystemSpec::simultaneous(vec![2.0], 32).unwrap();
        let rep = ubiquity_coverage(
            &spec,
            &Ball::new(vec![0.5], 0.0).unwrap(),
            1,
            CoverageMethod::Exact1d,
        )
        .unwrap();
        assert!(rep.degenerate && rep.fraction == 0.0);
    }

    #[test]
    fn min_level() {
        assert_eq!(min_covering_level(32, 0.5), Some(2));
        assert_eq!(min_covering_level(32, 0.05), Some(3));
        assert_eq!(min_covering_level(8, 0.5), None);
    }
}
