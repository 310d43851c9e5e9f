use crate::{inner_iou, iou, linear_assignment, BBox};

/// Pairs each body with at most one face, maximizing total inner IoU. Pairs
/// below `min_inner_iou` are dropped. Returns one entry per body, in order.
pub fn associate_body_face(bodies: &[BBox], faces: &[BBox], min_inner_iou: f64) -> Vec<Option<usize>> {
    let mut out = vec![None; bodies.len()];
    if bodies.is_empty() || faces.is_empty() {
        return out;
    }
    let cost: Vec<Vec<f64>> = bodies
        .iter()
        .map(|b| {
            faces
                .iter()
                .map(|f| {
                    let s = inner_iou(f, b);
                    if s >= min_inner_iou && s > 0.0 {
                        -s
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    for (b, f) in linear_assignment(&cost) {
        out[b] = Some(f);
    }
    out
}

/// Indices of primary boxes confirmed by some verifier box with confidence
/// at least `conf_min` (inclusive) and IoU at least `min_iou`.
pub fn cross_verify(primary: &[BBox], verifier: &[(BBox, f64)], conf_min: f64, min_iou: f64) -> Vec<usize> {
    (0..primary.len())
        .filter(|&i| {
            verifier
                .iter()
                .any(|(v, c)| *c >= conf_min && iou(&primary[i], v) >= min_iou && iou(&primary[i], v) > 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_body_one_face() {
        let b = [BBox::new(0.0, 0.0, 20.0, 50.0)];
        let f = [BBox::new(5.0, 2.0, 8.0, 8.0)];
        assert_eq!(associate_body_face(&b, &f, 0.5), vec![Some(0)]);
    }

    #[test]
    fn two_bodies_share_one_face() {
        let b = [BBox::new(0.0, 0.0, 20.0, 50.0), BBox::new(10.0, 0.0, 20.0, 50.0)];
        let f = [BBox::new(12.0, 2.0, 6.0, 6.0)];
        let out = associate_body_face(&b, &f, 0.5);
        assert_eq!(out.iter().filter(|x| x.is_some()).count(), 1);
    }

    #[test]
    fn verification_boundary_is_inclusive() {
        let p = [BBox::new(0.0, 0.0, 10.0, 10.0)];
        assert_eq!(cross_verify(&p, &[(BBox::new(1.0, 0.0, 10.0, 10.0), 0.7)], 0.7, 0.5), vec![0]);
        assert!(cross_verify(&p, &[], 0.7, 0.5).is_empty());
        assert!(cross_verify(&p, &[(BBox::new(50.0, 0.0, 10.0, 10.0), 0.9)], 0.7, 0.5).is_empty());
        assert!(cross_verify(&p, &[(BBox::new(0.0, 0.0, 10.0, 10.0), 0.69)], 0.7, 0.5).is_empty());
    }
}
