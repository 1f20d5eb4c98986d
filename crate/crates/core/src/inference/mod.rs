//! Selection procedures built on the sorted-ℓ1 machinery: SLOPE with an
//! estimated noise level, least-squares refits, and the BH family of
//! multiple-testing rules for orthogonal designs.

mod multiple;
mod scaled;

pub use multiple::{
    bh_step_up, fdr_threshold_estimate, slope_orthogonal_select, step_down, RejectionSet,
};
pub use scaled::{
    ols_refit, scaled_slope, scaled_slope_with, ScaledSlopeConfig, ScaledSlopeResult, SupportCycle,
};

/// Serde adapter writing 0-based index lists as 1-based.
pub mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(idx: &[usize], s: S) -> Result<S::Ok, S::Error> {
        idx.iter().map(|i| i + 1).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        raw.into_iter()
            .map(|i| {
                i.checked_sub(1)
                    .ok_or_else(|| serde::de::Error::custom("indices are 1-based; found 0"))
            })
            .collect()
    }
}
