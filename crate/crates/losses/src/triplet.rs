use lrid_core::RangeClass;

use crate::{LossError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RangedVector {
    pub vector: Vec<f64>,
    pub range_class: RangeClass,
}

/// Close-range anchor with long-range positive and negative samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    pub anchor: RangedVector,
    pub positive: RangedVector,
    pub negative: RangedVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletLoss {
    pub value: f64,
    /// `[anchor, positive, negative]` gradients per triplet.
    pub grads: Vec<[Vec<f64>; 3]>,
}

/// Mean over triplets of `max(0, margin − cos(a, p) + cos(a, n))`.
///
/// Anchors must be close-range and positives/negatives long-range; any other
/// assignment is rejected rather than filtered.
pub fn range_triplet_loss(triplets: &[Triplet], margin: f64) -> Result<TripletLoss> {
    if triplets.is_empty() {
        return Err(LossError::Empty("triplet list"));
    }
    if !(margin > 0.0) {
        return Err(LossError::Hyperparameter(format!("margin must be > 0, got {margin}")));
    }
    for (i, t) in triplets.iter().enumerate() {
        if t.anchor.range_class != RangeClass::Close {
            return Err(LossError::RangeClassViolation(format!(
                "triplet {i}: anchor must be close-range"
            )));
        }
        if t.positive.range_class != RangeClass::Long || t.negative.range_class != RangeClass::Long {
            return Err(LossError::RangeClassViolation(format!(
                "triplet {i}: positive and negative must be long-range"
            )));
        }
        let d = t.anchor.vector.len();
        if t.positive.vector.len() != d || t.negative.vector.len() != d {
            return Err(LossError::Shape(format!("triplet {i}: mismatched dimensions")));
        }
    }
    let n = triplets.len() as f64;
    let mut value = 0.0;
    let mut grads = Vec::with_capacity(triplets.len());
    for t in triplets {
        let (a, p, ng) = (&t.anchor.vector, &t.positive.vector, &t.negative.vector);
        let (s_ap, da_p, dp) = cosine_with_grad(a, p)?;
        let (s_an, da_n, dn) = cosine_with_grad(a, ng)?;
        let hinge = margin - s_ap + s_an;
        let d = a.len();
        if hinge > 0.0 {
            value += hinge / n;
            let ga = (0..d).map(|k| (da_n[k] - da_p[k]) / n).collect();
            let gp = dp.iter().map(|x| -x / n).collect();
            let gn = dn.iter().map(|x| x / n).collect();
            grads.push([ga, gp, gn]);
        } else {
            grads.push([vec![0.0; d], vec![0.0; d], vec![0.0; d]]);
        }
    }
    Ok(TripletLoss { value, grads })
}

fn cosine_with_grad(a: &[f64], b: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let na = lrid_core::l2_norm(a);
    let nb = lrid_core::l2_norm(b);
    if !(na > 0.0 && nb > 0.0) {
        return Err(lrid_core::CoreError::Normalization("zero-norm embedding".into()).into());
    }
    let cos = lrid_core::dot(a, b) / (na * nb);
    let da = a
        .iter()
        .zip(b)
        .map(|(x, y)| y / (na * nb) - cos * x / (na * na))
        .collect();
    let db = a
        .iter()
        .zip(b)
        .map(|(x, y)| x / (na * nb) - cos * y / (nb * nb))
        .collect();
    Ok((cos, da, db))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[f64], r: RangeClass) -> RangedVector {
        RangedVector {
            vector: v.to_vec(),
            range_class: r,
        }
    }

    #[test]
    fn satisfied_margin_is_zero() {
        let t = Triplet {
            anchor: rv(&[1.0, 0.0], RangeClass::Close),
            positive: rv(&[1.0, 0.1], RangeClass::Long),
            negative: rv(&[-1.0, 0.0], RangeClass::Long),
        };
        assert_eq!(range_triplet_loss(&[t], 0.3).unwrap().value, 0.0);
    }

    #[test]
    fn equal_similarities_give_margin() {
        let t = Triplet {
            anchor: rv(&[1.0, 0.0], RangeClass::Close),
            positive: rv(&[0.0, 1.0], RangeClass::Long),
            negative: rv(&[0.0, -1.0], RangeClass::Long),
        };
        assert!((range_triplet_loss(&[t], 0.3).unwrap().value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn long_range_anchor_is_rejected() {
        let t = Triplet {
            anchor: rv(&[1.0, 0.0], RangeClass::Long),
            positive: rv(&[0.0, 1.0], RangeClass::Long),
            negative: rv(&[0.0, -1.0], RangeClass::Long),
        };
        assert!(matches!(
            range_triplet_loss(&[t], 0.3),
            Err(LossError::RangeClassViolation(_))
        ));
        let t = Triplet {
            anchor: rv(&[1.0, 0.0], RangeClass::Close),
            positive: rv(&[0.0, 1.0], RangeClass::Close),
            negative: rv(&[0.0, -1.0], RangeClass::Long),
        };
        assert!(matches!(
            range_triplet_loss(&[t], 0.3),
            Err(LossError::RangeClassViolation(_))
        ));
    }
}
