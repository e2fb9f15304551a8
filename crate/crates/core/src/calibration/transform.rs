use crate::error::Result;
use crate::types::{BatesParams, ParamBounds};

/// Search coordinates further than this from zero are clamped, so points on
/// a bound map to a finite coordinate.
const MAX_COORD: f64 = 40.0;

/// Bijection between the open bound box and unconstrained search space.
///
/// Every coordinate uses a scaled logistic `x = lo + (hi - lo)/(1 + e^{-y})`.
/// A finite upper bound rules out a plain log map, and the logistic keeps the
/// search surface smooth up to both edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamTransform {
    lower: [f64; 8],
    upper: [f64; 8],
}

impl ParamTransform {
    pub fn new(bounds: &ParamBounds) -> Result<Self> {
        bounds.validate()?;
        Ok(Self {
            lower: bounds.lower.to_array(),
            upper: bounds.upper.to_array(),
        })
    }

    pub fn to_search(&self, p: &BatesParams) -> [f64; 8] {
        let x = p.to_array();
        std::array::from_fn(|i| {
            let s = ((x[i] - self.lower[i]) / (self.upper[i] - self.lower[i])).clamp(0.0, 1.0);
            (s.ln() - (-s).ln_1p()).clamp(-MAX_COORD, MAX_COORD)
        })
    }

    pub fn from_search(&self, y: &[f64; 8]) -> Result<BatesParams> {
        let x: [f64; 8] = std::array::from_fn(|i| {
            let s = 1.0 / (1.0 + (-y[i]).exp());
            (self.lower[i] + (self.upper[i] - self.lower[i]) * s)
                .clamp(self.lower[i], self.upper[i])
        });
        BatesParams::from_array(x)
    }
}
