use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectangleSpec {
    sides: Vec<f64>,
}

impl RectangleSpec {
    pub fn new(mut sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() || sides.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
            return Err(Error::OutOfRange("sides must lie in (0, 1]".into()));
        }
        sides.sort_by(|x, y| y.total_cmp(x));
        Ok(Self { sides })
    }

    /// Side lengths, longest first.
    pub fn sides(&self) -> &[f64] {
        &self.sides
    }
}

/// `min_i l₁⋯l_{i−1}·lᵢ^{s−i+1}`, evaluated in log space.
pub fn singular_cover_cost(rect: &RectangleSpec, s: f64) -> f64 {
    let mut prefix = 0.0;
    let mut best = f64::INFINITY;
    for (i, l) in rect.sides.iter().map(|l| l.ln()).enumerate() {
        best = best.min(prefix + l * (s - i as f64));
        prefix += l;
    }
    best.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = RectangleSpec::new(vec![0.125, 0.5]).unwrap();
        let expect = (0.5f64.powf(1.5)).min(0.5 * 0.125f64.sqrt());
        assert!((singular_cover_cost(&r, 1.5) - expect).abs() < 1e-15);
        assert!((singular_cover_cost(&r, 1.5) - 0.176_776_695).abs() < 1e-8);
        assert!((singular_cover_cost(&r, 2.0) - 0.0625).abs() < 1e-15);
        assert_eq!(singular_cover_cost(&r, 0.0), 1.0);
        assert!(RectangleSpec::new(vec![1.5]).is_err());
    }
}
