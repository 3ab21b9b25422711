use serde::Serialize;

use super::{first_min, sort_desc, ApplicationReport, CROSS_CHECK_TOL};
use crate::{compute_s, Error, ExponentProfile, ProductSpaceSpec, Result};

/// Simultaneous approximation `‖q xᵢ‖ < q^{-τᵢ}`, exponents kept in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimultaneousInstance {
    tau: Vec<f64>,
    permutation: Vec<usize>,
}

impl SimultaneousInstance {
    pub fn new(tau: &[f64]) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::InvalidInstance("tau must be non-empty".into()));
        }
        if let Some(x) = tau.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "tau must be non-negative, got {x}"
            )));
        }
        let (tau, permutation) = sort_desc(tau);
        Ok(Self { tau, permutation })
    }

    pub fn m(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    fn total(&self) -> f64 {
        self.tau.iter().sum()
    }
}

/// Big and shrunk exponents realizing the instance as a rectangle system.
pub fn simultaneous_exponent_choice(inst: &SimultaneousInstance) -> Result<ExponentProfile> {
    let m = inst.m();
    let mf = m as f64;
    let tau = inst.tau();
    if inst.total() <= 1.0 {
        return Err(Error::InvalidInstance("exponents sum to at most 1".into()));
    }
    if tau[m - 1] >= 1.0 / mf {
        let a = vec![1.0 + 1.0 / mf; m];
        let t = tau.iter().map(|x| x - 1.0 / mf).collect();
        return ExponentProfile::new(a, t);
    }
    // tail[k] = τ_{k+1} + … + τ_m with 0-based k
    let tail: Vec<f64> = (0..m).map(|k| tau[k + 1..].iter().sum()).collect();
    let big_k = (1..=m)
        .rev()
        .find(|&k| tau[k - 1] > (1.0 - tail[k - 1]) / k as f64)
        .ok_or_else(|| Error::NoValidK(format!("no threshold index for tau {tau:?}")))?;
    let head = (1.0 - tail[big_k - 1]) / big_k as f64 + 1.0;
    let a: Vec<f64> = (0..m)
        .map(|i| if i < big_k { head } else { tau[i] + 1.0 })
        .collect();
    let t = (0..m).map(|i| (1.0 + tau[i] - a[i]).max(0.0)).collect();
    ExponentProfile::new(a, t)
}

pub fn simultaneous_dim(inst: &SimultaneousInstance) -> Result<ApplicationReport> {
    let m = inst.m();
    let mf = m as f64;
    let tau = inst.tau();
    if inst.total() <= 1.0 {
        return Ok(ApplicationReport {
            value: mf,
            full_measure: true,
            argmin_index: None,
            closed_form: mf,
            dimcore: None,
            permutation: inst.permutation.clone(),
        });
    }
    let terms = (0..m).map(|i| {
        let later: f64 = tau[i + 1..].iter().sum();
        (mf + 1.0 + (mf - (i + 1) as f64) * tau[i] - later) / (1.0 + tau[i])
    });
    let (idx, closed) = first_min(terms).expect("non-empty");
    let space = ProductSpaceSpec::uniform(m, 1.0, 0.0)?;
    let report = compute_s(&space, &simultaneous_exponent_choice(inst)?)?;
    if (report.value - closed).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "simultaneous closed form {closed} vs generic {}",
            report.value
        )));
    }
    Ok(ApplicationReport {
        value: closed,
        full_measure: false,
        argmin_index: Some(idx + 1),
        closed_form: closed,
        dimcore: Some(report),
        permutation: inst.permutation.clone(),
    })
}
