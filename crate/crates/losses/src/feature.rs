use crate::{LossError, Result};

/// Horizontal 3×3 Sobel kernel, row-major.
pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
/// Transpose of [`SOBEL_X`].
pub const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// Channel-major `C × H × W` feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(LossError::Shape(format!(
                "{} values for a {channels}x{height}x{width} map",
                data.len()
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    /// Softmax across channels at every spatial location.
    pub fn softmax_channels(logits: &FeatureMap) -> FeatureMap {
        let plane = logits.height * logits.width;
        let mut data = vec![0.0; logits.data.len()];
        for p in 0..plane {
            let max = (0..logits.channels)
                .map(|c| logits.data[c * plane + p])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for c in 0..logits.channels {
                let e = (logits.data[c * plane + p] - max).exp();
                data[c * plane + p] = e;
                z += e;
            }
            for c in 0..logits.channels {
                data[c * plane + p] /= z;
            }
        }
        FeatureMap { data, ..*logits }
    }

    pub fn at(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
}

/// Euclidean distance between two maps; gradient with respect to `f`
/// (zero when the maps coincide).
pub fn l_rec(f: &FeatureMap, f_hat: &FeatureMap) -> Result<(f64, Vec<f64>)> {
    if f.shape() != f_hat.shape() {
        return Err(LossError::Shape(format!(
            "{:?} vs {:?}",
            f.shape(),
            f_hat.shape()
        )));
    }
    let diff: Vec<f64> = f.data.iter().zip(&f_hat.data).map(|(a, b)| a - b).collect();
    let value = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
    let grad = if value > 0.0 {
        diff.iter().map(|d| d / value).collect()
    } else {
        vec![0.0; diff.len()]
    };
    Ok((value, grad))
}

/// Smoothness penalty: mean absolute horizontal Sobel response plus mean
/// absolute vertical response, per channel with zero padding.
pub fn l_smo(f: &FeatureMap) -> Result<(f64, Vec<f64>)> {
    if f.height < 3 || f.width < 3 {
        return Err(LossError::Shape(format!(
            "smoothness needs at least 3x3 maps, got {}x{}",
            f.height, f.width
        )));
    }
    let n = f.data.len() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; f.data.len()];
    let (h, w) = (f.height as isize, f.width as isize);
    for kernel in [&SOBEL_X, &SOBEL_Y] {
        for c in 0..f.channels {
            let base = c * f.height * f.width;
            for y in 0..h {
                for x in 0..w {
                    let mut r = 0.0;
                    for ky in 0..3 {
                        for kx in 0..3 {
                            let (yy, xx) = (y + ky as isize - 1, x + kx as isize - 1);
                            if yy >= 0 && yy < h && xx >= 0 && xx < w {
                                r += kernel[ky][kx] * f.data[base + (yy * w + xx) as usize];
                            }
                        }
                    }
                    value += r.abs() / n;
                    // subgradient 0 at r == 0
                    let sign = if r > 0.0 {
                        1.0
                    } else if r < 0.0 {
                        -1.0
                    } else {
                        continue;
                    };
                    for ky in 0..3 {
                        for kx in 0..3 {
                            let (yy, xx) = (y + ky as isize - 1, x + kx as isize - 1);
                            if yy >= 0 && yy < h && xx >= 0 && xx < w {
                                grad[base + (yy * w + xx) as usize] += sign * kernel[ky][kx] / n;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((value, grad))
}

/// Channel diversity: `log C + Σ p_c log p_c` where `p_c` is channel `c`'s
/// share of the total activation. Zero-mass channels get a zero gradient.
pub fn l_div(f: &FeatureMap) -> Result<(f64, Vec<f64>)> {
    if f.data.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(LossError::Shape("activations must be finite and non-negative".into()));
    }
    let plane = f.height * f.width;
    let masses: Vec<f64> = (0..f.channels)
        .map(|c| f.data[c * plane..(c + 1) * plane].iter().sum())
        .collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(LossError::DegenerateActivation);
    }
    let plogp = |m: f64| {
        if m > 0.0 {
            let p = m / total;
            p * p.ln()
        } else {
            0.0
        }
    };
    let neg_entropy: f64 = masses.iter().map(|&m| plogp(m)).sum();
    let value = (f.channels as f64).ln() + neg_entropy;
    let mut grad = vec![0.0; f.data.len()];
    for (c, &m) in masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let d = ((m / total).ln() - neg_entropy) / total;
        grad[c * plane..(c + 1) * plane].fill(d);
    }
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(c: usize, h: usize, w: usize, f: impl Fn(usize, usize, usize) -> f64) -> FeatureMap {
        let mut data = Vec::new();
        for ci in 0..c {
            for y in 0..h {
                for x in 0..w {
                    data.push(f(ci, y, x));
                }
            }
        }
        FeatureMap::new(c, h, w, data).unwrap()
    }

    #[test]
    fn l_rec_examples() {
        let a = map(2, 3, 3, |c, y, x| (c + y * x) as f64);
        assert_eq!(l_rec(&a, &a).unwrap().0, 0.0);
        let mut b = a.clone();
        b.data[4] += 3.0;
        assert_eq!(l_rec(&a, &b).unwrap().0, 3.0);
        assert!(l_rec(&a, &map(1, 3, 3, |_, _, _| 0.0)).is_err());
    }

    #[test]
    fn constant_map_is_smooth_in_interior() {
        // zero padding makes the border respond; a constant map with zero
        // border is annihilated everywhere
        let f = map(2, 5, 5, |_, _, _| 0.0);
        assert_eq!(l_smo(&f).unwrap().0, 0.0);
        let f = map(1, 6, 6, |_, _, _| 2.5);
        let interior: f64 = {
            let mut acc = 0.0;
            for y in 1..5 {
                for x in 1..5 {
                    let mut r = 0.0;
                    for ky in 0..3 {
                        for kx in 0..3 {
                            r += SOBEL_X[ky][kx] * f.at(0, y + ky - 1, x + kx - 1);
                        }
                    }
                    acc += r.abs();
                }
            }
            acc
        };
        assert_eq!(interior, 0.0);
    }

    #[test]
    fn step_edge_rotation_swaps_directions() {
        let vertical_edge = map(1, 6, 6, |_, _, x| if x >= 3 { 1.0 } else { 0.0 });
        let horizontal_edge = map(1, 6, 6, |_, y, _| if y >= 3 { 1.0 } else { 0.0 });
        let (a, _) = l_smo(&vertical_edge).unwrap();
        let (b, _) = l_smo(&horizontal_edge).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn too_small_map_rejected() {
        assert!(l_smo(&map(1, 2, 5, |_, _, _| 1.0)).is_err());
    }

    #[test]
    fn l_div_examples() {
        let uniform = map(4, 2, 2, |_, _, _| 0.25);
        assert!(l_div(&uniform).unwrap().0.abs() < 1e-15);
        let single = map(3, 2, 2, |c, _, _| if c == 1 { 1.0 } else { 0.0 });
        assert!((l_div(&single).unwrap().0 - 3f64.ln()).abs() < 1e-15);
        let skew = map(2, 1, 1, |c, _, _| if c == 0 { 0.75 } else { 0.25 });
        assert!((l_div(&skew).unwrap().0 - 0.1308120359).abs() < 1e-9);
        let zeros = map(2, 2, 2, |_, _, _| 0.0);
        assert!(matches!(l_div(&zeros), Err(LossError::DegenerateActivation)));
    }

    #[test]
    fn softmax_sums_to_one() {
        let logits = map(5, 3, 4, |c, y, x| (c as f64 * 0.7 - y as f64 + x as f64 * 0.3).sin() * 4.0);
        let p = FeatureMap::softmax_channels(&logits);
        for y in 0..3 {
            for x in 0..4 {
                let s: f64 = (0..5).map(|c| p.at(c, y, x)).sum();
                assert!((s - 1.0).abs() < 1e-9);
            }
        }
    }
}
