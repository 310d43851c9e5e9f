use serde::{Deserialize, Serialize};

use crate::{normalize, CoreError, Modality, ModalityDims, RangeClass, Result};

/// One modality's embedding for one media item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub subject_id: String,
    pub media_id: String,
    pub modality: Modality,
    pub vector: Vec<f64>,
    pub quality: f64,
    pub range_class: RangeClass,
}

impl Template {
    /// Checks the vector length against `dims` and the quality range.
    pub fn validate(&self, dims: &ModalityDims) -> Result<()> {
        let expected = dims.get(self.modality);
        if self.vector.len() != expected {
            return Err(CoreError::Dimension {
                expected,
                found: self.vector.len(),
            });
        }
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(CoreError::InvalidQuality(self.quality));
        }
        if self.vector.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::Format("vector contains non-finite values".into()));
        }
        Ok(())
    }

    /// Validates and rescales the vector to unit length.
    pub fn into_normalized(mut self, dims: &ModalityDims) -> Result<Self> {
        self.validate(dims)?;
        self.vector = normalize(&self.vector)?;
        Ok(self)
    }
}

/// Quality-weighted mean of same-subject, same-modality templates,
/// renormalized to unit length.
///
/// Falls back to uniform weights when every quality is zero.
pub fn aggregate_gallery(templates: &[Template]) -> Result<Vec<f64>> {
    let first = templates.first().ok_or(CoreError::EmptyAggregation)?;
    let dim = first.vector.len();
    for t in templates {
        if t.subject_id != first.subject_id || t.modality != first.modality {
            return Err(CoreError::MixedAggregation(format!(
                "({}, {}) vs ({}, {})",
                first.subject_id, first.modality, t.subject_id, t.modality
            )));
        }
        if t.vector.len() != dim {
            return Err(CoreError::Dimension {
                expected: dim,
                found: t.vector.len(),
            });
        }
    }
    let total_quality: f64 = templates.iter().map(|t| t.quality).sum();
    let uniform = total_quality <= 0.0;
    let mut acc = vec![0.0; dim];
    for t in templates {
        let w = if uniform { 1.0 } else { t.quality };
        for (a, x) in acc.iter_mut().zip(&t.vector) {
            *a += w * x;
        }
    }
    normalize(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tpl(v: Vec<f64>, q: f64) -> Template {
        Template {
            subject_id: "s".into(),
            media_id: "m".into(),
            modality: Modality::Face,
            vector: v,
            quality: q,
            range_class: RangeClass::Close,
        }
    }

    #[test]
    fn identical_vectors_aggregate_to_themselves() {
        let v = vec![0.6, 0.8];
        let agg = aggregate_gallery(&[tpl(v.clone(), 0.2), tpl(v.clone(), 0.9)]).unwrap();
        assert!((agg[0] - 0.6).abs() < 1e-15 && (agg[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn opposite_vectors_cancel() {
        let err = aggregate_gallery(&[tpl(vec![1.0, 0.0], 0.5), tpl(vec![-1.0, 0.0], 0.5)]);
        assert!(matches!(err, Err(CoreError::Normalization(_))));
    }

    #[test]
    fn symmetric_mean() {
        let agg = aggregate_gallery(&[tpl(vec![1.0, 0.0], 1.0), tpl(vec![0.0, 1.0], 1.0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((agg[0] - h).abs() < 1e-15 && (agg[1] - h).abs() < 1e-15);
    }

    #[test]
    fn quality_weights_pull_toward_better_template() {
        let agg = aggregate_gallery(&[tpl(vec![1.0, 0.0], 0.9), tpl(vec![0.0, 1.0], 0.1)]).unwrap();
        assert!(agg[0] > agg[1]);
    }

    #[test]
    fn empty_and_mixed_inputs() {
        assert!(matches!(aggregate_gallery(&[]), Err(CoreError::EmptyAggregation)));
        let mut other = tpl(vec![0.0, 1.0], 1.0);
        other.subject_id = "t".into();
        assert!(matches!(
            aggregate_gallery(&[tpl(vec![1.0, 0.0], 1.0), other]),
            Err(CoreError::MixedAggregation(_))
        ));
    }

    #[test]
    fn validate_rejects_wrong_length_and_quality() {
        let dims = ModalityDims::uniform(2);
        assert!(tpl(vec![1.0, 0.0], 0.5).validate(&dims).is_ok());
        assert!(matches!(
            tpl(vec![1.0], 0.5).validate(&dims),
            Err(CoreError::Dimension { expected: 2, found: 1 })
        ));
        assert!(matches!(
            tpl(vec![1.0, 0.0], 1.5).validate(&dims),
            Err(CoreError::InvalidQuality(_))
        ));
    }
}
