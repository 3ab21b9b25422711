use serde::Serialize;

use crate::{
    compute_s, CantorAxisSpec, DimensionReport, Error, ExponentProfile, ProductSpaceSpec, Result,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkingReport {
    pub dimension: DimensionReport,
    /// The limsup set also carries full Hausdorff measure at this exponent; kept as an annotation.
    pub full_hausdorff_measure: bool,
}

fn check(axes: &[CantorAxisSpec], t: &[f64]) -> Result<()> {
    if axes.is_empty() || axes.len() != t.len() {
        return Err(Error::InvalidAxis(format!(
            "need one shrink exponent per axis ({} axes, {} exponents)",
            axes.len(),
            t.len()
        )));
    }
    Ok(())
}

/// Product of the natural Cantor measures; points are resonant so `κ = 0`.
pub fn shrinking_space(axes: &[CantorAxisSpec]) -> Result<ProductSpaceSpec> {
    ProductSpaceSpec::new(axes.iter().map(CantorAxisSpec::delta).collect(), 0.0)
}

/// `aᵢ = log bᵢ` with the given shrink exponents.
pub fn shrinking_profile(axes: &[CantorAxisSpec], t: &[f64]) -> Result<ExponentProfile> {
    check(axes, t)?;
    ExponentProfile::new(
        axes.iter().map(CantorAxisSpec::log_base).collect(),
        t.to_vec(),
    )
    .map_err(|e| Error::InvalidAxis(e.to_string()))
}

pub fn shrinking_target_dim(axes: &[CantorAxisSpec], t: &[f64]) -> Result<ShrinkingReport> {
    let profile = shrinking_profile(axes, t)?;
    let dimension = compute_s(&shrinking_space(axes)?, &profile)?;
    Ok(ShrinkingReport {
        dimension,
        full_hausdorff_measure: true,
    })
}
