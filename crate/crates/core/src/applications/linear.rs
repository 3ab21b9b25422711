use serde::Serialize;

use super::{first_min, sort_desc, ApplicationReport, CROSS_CHECK_TOL};
use crate::{compute_s, Error, ExponentProfile, ProductSpaceSpec, Result};

/// `m` linear forms in `n` variables with exponents `λᵢ ≥ 1`, kept in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFormsInstance {
    m: usize,
    n: usize,
    lambda: Vec<f64>,
    permutation: Vec<usize>,
}

impl LinearFormsInstance {
    pub fn new(n: usize, lambda: &[f64]) -> Result<Self> {
        if n == 0 || lambda.is_empty() {
            return Err(Error::InvalidInstance("m and n must be positive".into()));
        }
        if let Some(x) = lambda.iter().find(|x| !(x.is_finite() && **x >= 1.0)) {
            return Err(Error::InvalidInstance(format!(
                "lambda must be at least 1, got {x}"
            )));
        }
        let (lambda, permutation) = sort_desc(lambda);
        Ok(Self {
            m: lambda.len(),
            n,
            lambda,
            permutation,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// The product space: `m` factors of dimension `n` with `κ = 1 − 1/n`.
    pub fn space(&self) -> Result<ProductSpaceSpec> {
        ProductSpaceSpec::uniform(self.m, self.n as f64, 1.0 - 1.0 / self.n as f64)
    }

    fn ambient(&self) -> f64 {
        (self.m + self.n) as f64
    }
}

pub fn linear_forms_exponent_choice(inst: &LinearFormsInstance) -> Result<ExponentProfile> {
    let (m, mf) = (inst.m, inst.m as f64);
    let lam = inst.lambda();
    let total = inst.ambient();
    if lam.iter().sum::<f64>() <= total {
        return Err(Error::InvalidInstance(
            "exponents sum to at most m+n".into(),
        ));
    }
    let a: Vec<f64> = if lam[m - 1] >= 1.0 + inst.n as f64 / mf {
        vec![1.0 + inst.n as f64 / mf; m]
    } else {
        let tail: Vec<f64> = (0..m).map(|k| lam[k + 1..].iter().sum()).collect();
        let big_k = (1..=m)
            .rev()
            .find(|&k| lam[k - 1] > (total - tail[k - 1]) / k as f64)
            .ok_or_else(|| Error::NoValidK(format!("no threshold index for lambda {lam:?}")))?;
        let head = (total - tail[big_k - 1]) / big_k as f64;
        (0..m)
            .map(|i| if i < big_k { head } else { lam[i] })
            .collect()
    };
    let t = lam.iter().zip(&a).map(|(l, a)| (l - a).max(0.0)).collect();
    ExponentProfile::new(a, t)
}

pub fn linear_forms_dim(inst: &LinearFormsInstance) -> Result<ApplicationReport> {
    let (mf, nf) = (inst.m as f64, inst.n as f64);
    let lam = inst.lambda();
    if lam.iter().sum::<f64>() <= inst.ambient() {
        return Ok(ApplicationReport {
            value: mf * nf,
            full_measure: true,
            argmin_index: None,
            closed_form: mf * nf,
            dimcore: None,
            permutation: inst.permutation.clone(),
        });
    }
    let terms = (0..inst.m).map(|i| {
        let spread: f64 = lam[i..].iter().map(|lk| lam[i] - lk).sum();
        mf * (nf - 1.0) + (inst.ambient() + spread) / lam[i]
    });
    let (idx, closed) = first_min(terms).expect("non-empty");
    let report = compute_s(&inst.space()?, &linear_forms_exponent_choice(inst)?)?;
    if (report.value - closed).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "linear forms closed form {closed} vs generic {}",
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let r = linear_forms_dim(&LinearFormsInstance::new(2, &[4.0]).unwrap()).unwrap();
        assert!((r.value - 1.75).abs() < 1e-15);
        let r = linear_forms_dim(&LinearFormsInstance::new(1, &[3.0, 2.0]).unwrap()).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-15);
        let r = linear_forms_dim(&LinearFormsInstance::new(2, &[3.0]).unwrap()).unwrap();
        assert_eq!((r.value, r.full_measure), (2.0, true));
    }

    #[test]
    fn second_case_sums_to_ambient() {
        let inst = LinearFormsInstance::new(2, &[5.0, 1.2, 1.1]).unwrap();
        let p = linear_forms_exponent_choice(&inst).unwrap();
        assert!((p.a().iter().sum::<f64>() - 5.0).abs() < 1e-12);
        assert!(linear_forms_dim(&inst).is_ok());
    }

    #[test]
    fn validation() {
        assert!(LinearFormsInstance::new(0, &[2.0]).is_err());
        assert!(LinearFormsInstance::new(1, &[0.5]).is_err());
    }
}
