//! Closed-form solvers, each cross-checked against [`crate::dimcore`].

mod linear;
mod multiplicative;
mod orbit;
mod shrinking;
mod simultaneous;

pub use crate::cantor::CantorAxisSpec;
pub use linear::{linear_forms_dim, linear_forms_exponent_choice, LinearFormsInstance};
pub use multiplicative::{
    mult_dim, mult_pair_closed_form, mult_pair_dim, Crossings, Factor, MultiplicativeInstance,
    MultiplicativeReport, PairCase, PairReport, Regime,
};
pub use orbit::{
    candidate_profiles, exponent_orbit, liminf_rate, Cluster, OrbitReport, OrbitSample,
};
pub use shrinking::{shrinking_profile, shrinking_space, shrinking_target_dim, ShrinkingReport};
pub use simultaneous::{simultaneous_dim, simultaneous_exponent_choice, SimultaneousInstance};

use serde::Serialize;

use crate::DimensionReport;

/// Result shared by the Diophantine solvers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApplicationReport {
    pub value: f64,
    pub full_measure: bool,
    /// 1-based index (in sorted order) attaining the closed-form minimum.
    pub argmin_index: Option<usize>,
    pub closed_form: f64,
    /// The generic evaluation; absent in the full-measure regime.
    pub dimcore: Option<DimensionReport>,
    /// `permutation[j]` is the input position of the j-th sorted exponent.
    pub permutation: Vec<usize>,
}

/// Sort descending and keep the permutation.
fn sort_desc(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    (perm.iter().map(|&i| values[i]).collect(), perm)
}

/// Index and value of the first minimum.
fn first_min(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    values
        .into_iter()
        .enumerate()
        .fold(None, |best, (i, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
}

const CROSS_CHECK_TOL: f64 = 1e-10;
