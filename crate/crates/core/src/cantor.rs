//! Missing-digit Cantor sets `{Σ dⱼ b^{-j} : dⱼ ∈ Λ}` with exact rational points.
//!
//! Points handled here are inverse images of an anchor `x_o` whose expansion is
//! a finite digit prefix followed by the smallest digit of `Λ` repeated forever.
//! Such points are rationals with denominator `(b−1)·b^P`, so they are stored
//! as `i128` numerators over a per-axis [`Scale`].

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CantorAxisSpec {
    base: u32,
    digits: Vec<u32>,
}

impl CantorAxisSpec {
    pub fn new(base: u32, digits: impl IntoIterator<Item = u32>) -> Result<Self> {
        if !(2..=1 << 16).contains(&base) {
            return Err(Error::InvalidAxis(format!(
                "base must be at least 2, got {base}"
            )));
        }
        let mut digits: Vec<u32> = digits.into_iter().collect();
        digits.sort_unstable();
        digits.dedup();
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidAxis(format!(
                "digit {d} is not below base {base}"
            )));
        }
        if digits.len() < 2 {
            return Err(Error::InvalidAxis("need at least two digits".into()));
        }
        Ok(Self { base, digits })
    }

    /// The whole unit interval in base `b`.
    pub fn full(base: u32) -> Result<Self> {
        Self::new(base, 0..base)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn count(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn log_base(&self) -> f64 {
        f64::from(self.base).ln()
    }

    /// `log #Λ / log b`.
    pub fn delta(&self) -> f64 {
        if self.is_full() {
            1.0
        } else {
            f64::from(self.count()).ln() / self.log_base()
        }
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.base
    }

    pub fn min_digit(&self) -> u32 {
        self.digits[0]
    }

    pub fn has_digit(&self, d: u32) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    /// `#{λ ∈ Λ : λ < d}`.
    fn below(&self, d: u32) -> u32 {
        self.digits.partition_point(|&x| x < d) as u32
    }

    /// Distribution function of the natural measure, in floating point.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let b = f64::from(self.base);
        let n = f64::from(self.count());
        let (mut rest, mut w, mut acc) = (x, 1.0 / n, 0.0);
        for _ in 0..200 {
            rest *= b;
            let d = (rest.floor() as u32).min(self.base - 1);
            rest -= f64::from(d);
            acc += f64::from(self.below(d)) * w;
            if !self.has_digit(d) || w < 1e-18 {
                break;
            }
            w /= n;
        }
        acc.min(1.0)
    }

    /// Natural measure of the interval `[lo, hi]`.
    pub fn measure(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }
}

/// Digits of the anchor `x_o`: an explicit prefix, then `min Λ` forever.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Anchor {
    prefix: Vec<u32>,
}

impl Anchor {
    /// The anchor `min Λ/(b−1)`, which is `0` whenever `0 ∈ Λ`.
    pub fn tail_only() -> Self {
        Self::default()
    }

    pub fn new(prefix: Vec<u32>, axis: &CantorAxisSpec) -> Result<Self> {
        if let Some(d) = prefix.iter().find(|&&d| !axis.has_digit(d)) {
            return Err(Error::InvalidAxis(format!(
                "anchor digit {d} is not in the digit set"
            )));
        }
        Ok(Self { prefix })
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn value(&self, axis: &CantorAxisSpec) -> f64 {
        let b = f64::from(axis.base());
        let head = self
            .prefix
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + f64::from(d)) / b);
        head + f64::from(axis.min_digit()) / (b - 1.0) / b.powi(self.prefix.len() as i32)
    }
}

/// Exact coordinates `N / ((b−1)·b^P)` on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    base: i128,
    p: u32,
    pow: Vec<i128>,
    den: i128,
}

impl Scale {
    pub fn new(base: u32, p: u32) -> Result<Self> {
        let b = i128::from(base);
        let mut pow = vec![1i128];
        for _ in 0..=p {
            let next = pow
                .last()
                .and_then(|x| x.checked_mul(b))
                .filter(|x| *x < (1i128 << 118) / b)
                .ok_or_else(|| Error::SizeLimit(format!("{base}^{p} exceeds exact range")))?;
            pow.push(next);
        }
        let den = (b - 1) * pow[p as usize];
        Ok(Self {
            base: b,
            p,
            pow,
            den,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    /// Numerator of `b^{-j}`.
    pub fn cell(&self, j: u32) -> i128 {
        (self.base - 1) * self.pow[(self.p - j) as usize]
    }

    pub fn to_f64(&self, num: i128) -> f64 {
        num as f64 / self.den as f64
    }

    /// Numerator of `x(v)`, the level-`n` inverse image of the anchor for the word with value `v`.
    pub fn point(&self, axis: &CantorAxisSpec, anchor: &Anchor, v: i128, n: u32) -> i128 {
        let l = anchor.prefix.len() as u32;
        debug_assert!(self.p >= n + l);
        let b = self.base;
        let pref = anchor
            .prefix
            .iter()
            .fold(0i128, |acc, &d| acc * b + i128::from(d));
        let tail = (b - 1) * pref + i128::from(axis.min_digit());
        (b - 1) * v * self.pow[(self.p - n) as usize] + tail * self.pow[(self.p - n - l) as usize]
    }

    /// Exact distribution function at `num/den`, as `(numerator, denominator)`.
    pub fn cdf_exact(&self, axis: &CantorAxisSpec, num: i128) -> Result<(i128, i128)> {
        let k = i128::from(axis.count());
        let overflow = || Error::SizeLimit("cantor distribution exceeds exact range".into());
        let mut kp = vec![1i128];
        for _ in 0..=self.p + 1 {
            kp.push(
                kp.last()
                    .and_then(|x| x.checked_mul(k))
                    .ok_or_else(overflow)?,
            );
        }
        let top = self.p as usize + 1;
        let den = (k - 1).checked_mul(kp[top]).ok_or_else(overflow)?;
        if num <= 0 {
            return Ok((0, den));
        }
        if num >= self.den {
            return Ok((den, den));
        }
        let b = self.base;
        let q = num / (b - 1);
        let rem = (num % (b - 1)) as u32;
        let mut acc = 0i128;
        for j in 1..=self.p {
            let d = ((q / self.pow[(self.p - j) as usize]) % b) as u32;
            acc += i128::from(axis.below(d)) * (k - 1) * kp[top - j as usize];
            if !axis.has_digit(d) {
                return Ok((acc, den));
            }
        }
        let c = i128::from(axis.below(rem));
        acc += if axis.has_digit(rem) {
            c * k
        } else {
            c * (k - 1)
        };
        Ok((acc, den))
    }

    /// Sorted numerators of all level-`n` anchor images lying in `[lo, hi]`.
    pub fn points_in(
        &self,
        axis: &CantorAxisSpec,
        anchor: &Anchor,
        n: u32,
        lo: i128,
        hi: i128,
        limit: usize,
    ) -> Result<Vec<i128>> {
        let mut out = Vec::new();
        let mut stack = vec![(0i128, 0u32)];
        while let Some((v, j)) = stack.pop() {
            if j == n {
                let x = self.point(axis, anchor, v, n);
                if (lo..=hi).contains(&x) {
                    if out.len() == limit {
                        return Err(Error::SizeLimit(format!(
                            "more than {limit} points at level {n}"
                        )));
                    }
                    out.push(x);
                }
                continue;
            }
            // push in reverse so larger digits are visited last
            for &d in axis.digits().iter().rev() {
                let w = v * self.base + i128::from(d);
                let c_lo = w * self.cell(j + 1);
                if c_lo <= hi && c_lo + self.cell(j + 1) >= lo {
                    stack.push((w, j + 1));
                }
            }
        }
        Ok(out)
    }
}
