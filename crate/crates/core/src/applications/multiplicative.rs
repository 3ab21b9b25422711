//! Multiplicative approximation `‖aⁿx − x_o‖·‖bⁿy − y_o‖ < e^{-nt}` on a product of Cantor sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::{bisect_root, golden_max};
use crate::{
    compute_s, CantorAxisSpec, DimensionReport, Error, ExponentProfile, ProductSpaceSpec, Result,
};

const GRID: usize = 1000;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    I,
    II,
    III,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub dimension: DimensionReport,
    pub closed_form: f64,
    pub case: PairCase,
    /// True when the axes were exchanged so that the first base is the larger one.
    pub swapped: bool,
}

fn pair_generic(a: &Factor, b: &Factor, t1: f64, t2: f64) -> Result<DimensionReport> {
    let space = ProductSpaceSpec::new(vec![a.delta, b.delta], 0.0)?;
    let profile = ExponentProfile::new(vec![a.log_base, b.log_base], vec![t1, t2])?;
    compute_s(&space, &profile)
}

/// One factor of the product: `log b` and the dimension `δ` of its Cantor set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub log_base: f64,
    pub delta: f64,
}

impl Factor {
    pub fn new(log_base: f64, delta: f64) -> Result<Self> {
        if !(log_base > 0.0 && log_base.is_finite() && delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "need log b > 0 and δ in (0,1], got ({log_base}, {delta})"
            )));
        }
        Ok(Self { log_base, delta })
    }
}

impl From<&CantorAxisSpec> for Factor {
    fn from(ax: &CantorAxisSpec) -> Self {
        Self {
            log_base: ax.log_base(),
            delta: ax.delta(),
        }
    }
}

/// The three explicit cases, assuming `la ≥ lb`.
fn pair_closed(la: f64, lb: f64, d1: f64, d2: f64, t1: f64, t2: f64) -> (f64, PairCase) {
    let full = d1 + d2;
    let both = full - (d1 * t1 + d2 * t2) / (t1 + la);
    let mixed = d1 * la + d2 * lb;
    if t2 + lb <= la {
        ((full - t2 * d2 / (t2 + lb)).min(both), PairCase::I)
    } else if t2 + lb <= t1 + la {
        ((mixed / (t2 + lb)).min(both), PairCase::II)
    } else {
        (
            (mixed / (t1 + la)).min(full - (d1 * t1 + d2 * t2) / (t2 + lb)),
            PairCase::III,
        )
    }
}

/// Explicit pair dimension from log-bases and exponents, in either base order.
pub fn mult_pair_closed_form(
    la: f64,
    lb: f64,
    d1: f64,
    d2: f64,
    t1: f64,
    t2: f64,
) -> Result<(f64, PairCase)> {
    let ok = |x: f64| x.is_finite() && x >= 0.0;
    if !(la > 0.0
        && lb > 0.0
        && d1 > 0.0
        && d2 > 0.0
        && ok(t1)
        && ok(t2)
        && la.is_finite()
        && lb.is_finite())
    {
        return Err(Error::InvalidInstance(
            "need positive log-bases and δ, non-negative exponents".into(),
        ));
    }
    Ok(if la < lb {
        pair_closed(lb, la, d2, d1, t2, t1)
    } else {
        pair_closed(la, lb, d1, d2, t1, t2)
    })
}

pub fn mult_pair_dim(
    a: &CantorAxisSpec,
    b: &CantorAxisSpec,
    t1: f64,
    t2: f64,
) -> Result<PairReport> {
    if !(t1.is_finite() && t2.is_finite() && t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::InvalidInstance(format!(
            "exponents must be non-negative, got ({t1}, {t2})"
        )));
    }
    let dimension = pair_generic(&a.into(), &b.into(), t1, t2)?;
    let swapped = a.log_base() < b.log_base();
    let (closed_form, case) =
        mult_pair_closed_form(a.log_base(), b.log_base(), a.delta(), b.delta(), t1, t2)?;
    if (closed_form - dimension.value).abs() > 1e-10 {
        return Err(Error::CrossCheck(format!(
            "pair closed form {closed_form} vs generic {}",
            dimension.value
        )));
    }
    Ok(PairReport {
        dimension,
        closed_form,
        case,
        swapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FormulaHolds,
    FormulaFails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicativeInstance {
    a: Factor,
    b: Factor,
    t: f64,
    swapped: bool,
}

impl MultiplicativeInstance {
    /// Orders the axes so that the first has the larger exponent δ.
    pub fn new(axis_a: CantorAxisSpec, axis_b: CantorAxisSpec, t: f64) -> Result<Self> {
        Self::from_factors((&axis_a).into(), (&axis_b).into(), t)
    }

    pub fn from_factors(a: Factor, b: Factor, t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "t must be non-negative, got {t}"
            )));
        }
        let swapped = b.delta > a.delta;
        let (a, b) = if swapped { (b, a) } else { (a, b) };
        Ok(Self { a, b, t, swapped })
    }

    /// The factor with the larger `δ`.
    pub fn first(&self) -> Factor {
        self.a
    }

    pub fn second(&self) -> Factor {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// `f(t₂)`: the pair dimension with the budget split as `(t − t₂, t₂)`.
    pub fn split_value(&self, t2: f64) -> Result<f64> {
        Ok(pair_generic(&self.a, &self.b, (self.t - t2).max(0.0), t2)?.value)
    }

    fn regime(&self) -> (Regime, &'static str) {
        let (la, lb) = (self.a.log_base, self.b.log_base);
        let (d1, d2) = (self.a.delta, self.b.delta);
        if self.t == 0.0 {
            (Regime::FormulaHolds, "t_zero")
        } else if self.a.log_base <= self.b.log_base {
            (Regime::FormulaHolds, "a_le_b")
        } else if la <= self.t + lb {
            (Regime::FormulaHolds, "shift_covers_gap")
        } else if d2 * (self.t + la) >= d1 * la {
            (Regime::FormulaHolds, "delta_condition")
        } else {
            (Regime::FormulaFails, "exceptional")
        }
    }
}

/// Roots on `[0, t]` of the two candidate crossing equations for the optimal split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossings {
    /// `(δ₁log a+δ₂log b)/(t₁+log a) = δ₁+δ₂−(δ₁t₁+δ₂t₂)/(t₂+log b)`.
    pub mixed_branch: Option<f64>,
    /// The two branches of the first pair case set equal.
    pub case_one: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicativeReport {
    pub regime: Regime,
    pub regime_reason: &'static str,
    pub dim: f64,
    pub that_t2: Option<f64>,
    /// `max{δ₁+δ₂log b/(t+log b), δ₂+δ₁log a/(t+log a)}`; also the slicing lower bound.
    pub formula: f64,
    pub slicing_lower: f64,
    pub covering_upper: f64,
    pub numeric_sup: f64,
    pub numeric_argmax: f64,
    pub bracket_verified: bool,
    pub crossings: Crossings,
    pub swapped: bool,
}

fn first_crossing(g: impl Fn(f64) -> f64 + Sync, t: f64) -> Option<f64> {
    if t <= 0.0 {
        return None;
    }
    let xs: Vec<f64> = (0..=GRID).map(|j| t * j as f64 / GRID as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    if let Some(j) = gs.iter().position(|&v| v == 0.0) {
        return Some(xs[j]);
    }
    (0..GRID)
        .find(|&j| gs[j].signum() != gs[j + 1].signum())
        .and_then(|j| bisect_root(&g, xs[j], xs[j + 1], 1e-13))
}

pub fn mult_dim(inst: &MultiplicativeInstance) -> Result<MultiplicativeReport> {
    let t = inst.t;
    let (la, lb) = (inst.a.log_base, inst.b.log_base);
    let (d1, d2) = (inst.a.delta, inst.b.delta);
    let formula = (d1 + d2 * lb / (t + lb)).max(d2 + d1 * la / (t + la));
    let covering_upper = if la > lb {
        d1 + d2 * la / (t + la)
    } else {
        formula
    };
    let (regime, regime_reason) = inst.regime();

    let step = t / GRID as f64;
    let values = (0..=GRID)
        .into_par_iter()
        .map(|j| inst.split_value(step * j as f64))
        .collect::<Result<Vec<f64>>>()?;
    let (j_best, _) =
        values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(jb, vb), (j, &v)| {
                if v > vb {
                    (j, v)
                } else {
                    (jb, vb)
                }
            });
    let (mut argmax, mut sup) = (step * j_best as f64, values[j_best]);
    if t > 0.0 {
        let lo = step * j_best.saturating_sub(1) as f64;
        let hi = (step * (j_best + 1) as f64).min(t);
        let (x, fx) = golden_max(
            |x| inst.split_value(x).unwrap_or(f64::NEG_INFINITY),
            lo,
            hi,
            GOLDEN_TOL,
        );
        if fx > sup {
            (argmax, sup) = (x, fx);
        }
    }
    let bracket_verified = t > 0.0 && argmax - step >= 0.0 && argmax + step <= t && {
        let f0 = inst.split_value(argmax)?;
        inst.split_value(argmax - step)? < f0 && inst.split_value(argmax + step)? < f0
    };

    let mixed_branch = |t2: f64| {
        let t1 = t - t2;
        (d1 * la + d2 * lb) / (t1 + la) - (d1 + d2 - (d1 * t1 + d2 * t2) / (t2 + lb))
    };
    let case_one = |t2: f64| {
        let t1 = t - t2;
        (d1 * t1 + d2 * t2) / (t1 + la) - t2 * d2 / (t2 + lb)
    };
    let crossings = Crossings {
        mixed_branch: first_crossing(mixed_branch, t),
        case_one: first_crossing(case_one, t),
    };

    let (dim, that_t2) = match regime {
        Regime::FormulaHolds => (formula, None),
        Regime::FormulaFails => {
            let interior = argmax > 0.0 && argmax < t;
            if !(formula < sup && sup < covering_upper && interior && bracket_verified) {
                return Err(Error::OptimizerFailure(format!(
                    "sandwich {formula} < {sup} < {covering_upper} failed (argmax {argmax}, bracket {bracket_verified})"
                )));
            }
            (sup, Some(argmax))
        }
    };
    Ok(MultiplicativeReport {
        regime,
        regime_reason,
        dim,
        that_t2,
        formula,
        slicing_lower: formula,
        covering_upper,
        numeric_sup: sup,
        numeric_argmax: argmax,
        bracket_verified,
        crossings,
        swapped: inst.swapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_case_one_instance() {
        // bases e² and e are not integers, so build the equivalent profile directly
        let space = ProductSpaceSpec::new(vec![1.0, 1.0], 0.0).unwrap();
        let p = ExponentProfile::new(vec![2.0, 1.0], vec![2.0, 0.5]).unwrap();
        let generic = compute_s(&space, &p).unwrap().value;
        let (closed, case) = pair_closed(2.0, 1.0, 1.0, 1.0, 2.0, 0.5);
        assert_eq!(case, PairCase::I);
        assert!((generic - 1.375).abs() < 1e-15 && (closed - 1.375).abs() < 1e-15);
    }

    #[test]
    fn pair_equal_bases() {
        let two = CantorAxisSpec::full(2).unwrap();
        let r = mult_pair_dim(&two, &two, 2f64.ln(), 0.0).unwrap();
        assert!((r.dimension.value - 1.5).abs() < 1e-14);
        let r = mult_pair_dim(&two, &two, 0.0, 0.0).unwrap();
        assert_eq!(r.dimension.value, 2.0);
        assert!(mult_pair_dim(&two, &two, -1.0, 0.0).is_err());
    }

    #[test]
    fn regimes() {
        let two = CantorAxisSpec::full(2).unwrap();
        let r =
            mult_dim(&MultiplicativeInstance::new(two.clone(), two.clone(), 2f64.ln()).unwrap())
                .unwrap();
        assert_eq!(r.regime, Regime::FormulaHolds);
        assert!((r.dim - 1.5).abs() < 1e-14);
        let r = mult_dim(&MultiplicativeInstance::new(two.clone(), two, 0.0).unwrap()).unwrap();
        assert_eq!(r.dim, 2.0);
    }

    #[test]
    fn exceptional_regime() {
        let a = CantorAxisSpec::full(16).unwrap();
        let b = CantorAxisSpec::new(4, [0, 3]).unwrap();
        let r = mult_dim(&MultiplicativeInstance::new(a, b, 1.0).unwrap()).unwrap();
        assert_eq!(r.regime, Regime::FormulaFails);
        let t2 = r.that_t2.unwrap();
        assert!((t2 - 0.8777).abs() < 2e-3, "{t2}");
        assert!((r.dim - 1.30616).abs() < 1e-4, "{}", r.dim);
        assert!(r.formula + 1e-3 < r.dim && r.dim + 1e-3 < r.covering_upper);
    }

    #[test]
    fn zero_shrink_with_unequal_bases() {
        // log a > log b and the δ condition fails, but with t = 0 there is nothing to split
        let inst = MultiplicativeInstance::from_factors(
            Factor::new(2.0, 0.7).unwrap(),
            Factor::new(1.0, 0.4).unwrap(),
            0.0,
        )
        .unwrap();
        let r = mult_dim(&inst).unwrap();
        assert_eq!(r.regime, Regime::FormulaHolds);
        assert!((r.dim - 1.1).abs() < 1e-14);
    }
}
