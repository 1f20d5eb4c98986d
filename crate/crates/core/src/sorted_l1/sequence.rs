use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Result, SlopeError};

/// A regularization sequence `λ1 ≥ λ2 ≥ … ≥ λp ≥ 0`, not identically zero.
///
/// Every constructor validates these conditions, so code holding a
/// `LambdaSequence` can rely on them without re-checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LambdaSequence {
    values: Vec<f64>,
}

impl LambdaSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SlopeError::InvalidArgument(
                "lambda sequence must have at least one entry".into(),
            ));
        }
        check_finite("lambda", &values)?;
        if let Some(i) = values.iter().position(|&v| v < 0.0) {
            return Err(SlopeError::InvalidArgument(format!(
                "lambda[{i}] = {} is negative",
                values[i]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(SlopeError::InvalidArgument(format!(
                "lambda is not nonincreasing at index {i}: {} < {}",
                values[i],
                values[i + 1]
            )));
        }
        if values[0] == 0.0 {
            return Err(SlopeError::InvalidArgument(
                "lambda sequence is identically zero".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Constant sequence; the sorted-ℓ1 norm then reduces to `value·‖b‖₁`.
    pub fn constant(p: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; p])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Multiplies every weight by `factor > 0`, e.g. the noise level σ.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(SlopeError::InvalidArgument(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for LambdaSequence {
    type Error = SlopeError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<LambdaSequence> for Vec<f64> {
    fn from(seq: LambdaSequence) -> Self {
        seq.values
    }
}

impl std::ops::Index<usize> for LambdaSequence {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_sequences() {
        assert!(LambdaSequence::new(vec![]).is_err());
        assert!(LambdaSequence::new(vec![0.0, 0.0]).is_err());
        assert!(LambdaSequence::new(vec![1.0, 2.0]).is_err());
        assert!(LambdaSequence::new(vec![1.0, -0.5]).is_err());
        assert!(LambdaSequence::new(vec![f64::NAN]).is_err());
        assert!(LambdaSequence::new(vec![3.0, 3.0, 0.0]).is_ok());
    }

    #[test]
    fn scaling() {
        let l = LambdaSequence::new(vec![2.0, 1.0]).unwrap();
        assert_eq!(l.scaled(0.5).unwrap().as_slice(), &[1.0, 0.5]);
        assert!(l.scaled(0.0).is_err());
    }

    #[test]
    fn serde_validates() {
        let ok: LambdaSequence = serde_json::from_str("[3, 2, 1]").unwrap();
        assert_eq!(ok.len(), 3);
        assert!(serde_json::from_str::<LambdaSequence>("[1, 2]").is_err());
    }
}
