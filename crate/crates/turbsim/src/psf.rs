use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Result, TurbError, ZernikeSpec};

/// Minimum fraction of PSF energy a crop must retain before it is accepted.
pub const ENERGY_CAPTURE: f64 = 0.999;

/// Square, odd-sized, non-negative, unit-sum convolution kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsfKernel {
    pub size: usize,
    pub data: Vec<f64>,
}

impl PsfKernel {
    /// Kernel with all mass at its center.
    pub fn delta(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        data[(size / 2) * size + size / 2] = 1.0;
        Self { size, data }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Intensity-weighted centroid `(row, col)`.
    pub fn centroid(&self) -> (f64, f64) {
        centroid(&self.data, self.size)
    }
}

/// Full (uncropped) PSF: `|fftshift(DFT(mask · e^{iφ}))|²` on the pupil grid,
/// row-major, not normalized.
pub fn full_psf(phase: &[f64], spec: &ZernikeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let p = spec.grid;
    if phase.len() != p * p {
        return Err(TurbError::Config(format!("phase has {} samples, grid needs {}", phase.len(), p * p)));
    }
    if phase.iter().any(|x| !x.is_finite()) {
        return Err(TurbError::Config("phase contains non-finite values".into()));
    }
    let mut field = vec![Complex64::new(0.0, 0.0); p * p];
    let mut any = false;
    for r in 0..p {
        for c in 0..p {
            if spec.in_aperture(r, c) {
                field[r * p + c] = Complex64::from_polar(1.0, phase[r * p + c]);
                any = true;
            }
        }
    }
    if !any {
        return Err(TurbError::ZeroAperture);
    }
    fft2(&mut field, p);
    let h = p / 2;
    let mut out = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            out[((r + h) % p) * p + (c + h) % p] = field[r * p + c].norm_sqr();
        }
    }
    Ok(out)
}

fn fft2(field: &mut [Complex64], p: usize) {
    let fft = FftPlanner::new().plan_fft_forward(p);
    for row in field.chunks_exact_mut(p) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); p];
    for c in 0..p {
        for r in 0..p {
            col[r] = field[r * p + c];
        }
        fft.process(&mut col);
        for r in 0..p {
            field[r * p + c] = col[r];
        }
    }
}

/// Intensity-weighted centroid `(row, col)` of a square array.
pub fn centroid(data: &[f64], size: usize) -> (f64, f64) {
    let mut total = 0.0;
    let mut sr = 0.0;
    let mut sc = 0.0;
    for r in 0..size {
        for c in 0..size {
            let v = data[r * size + c];
            total += v;
            sr += v * r as f64;
            sc += v * c as f64;
        }
    }
    (sr / total, sc / total)
}

/// Result of cropping a full PSF.
#[derive(Debug, Clone)]
pub struct CroppedPsf {
    pub kernel: PsfKernel,
    /// Fraction of the full PSF energy inside the crop.
    pub energy: f64,
}

/// Crops `kernel_size × kernel_size` (periodically) around the pixel nearest
/// the centroid, enlarging by 2 up to `max_size` while less than
/// [`ENERGY_CAPTURE`] of the energy is retained, then normalizes. The
/// returned `energy` tells the caller whether the cap was hit.
pub fn crop_psf(full: &[f64], grid: usize, kernel_size: usize, max_size: usize) -> Result<CroppedPsf> {
    if kernel_size % 2 == 0 || kernel_size > grid || max_size < kernel_size {
        return Err(TurbError::Config(format!(
            "kernel size {kernel_size} (max {max_size}) invalid for a {grid}-pixel grid"
        )));
    }
    let total: f64 = full.iter().sum();
    if !(total > 0.0) {
        return Err(TurbError::ZeroAperture);
    }
    let (cr, cc) = centroid(full, grid);
    let (cr, cc) = (cr.round() as i64, cc.round() as i64);
    let max_size = max_size.min(if grid % 2 == 0 { grid - 1 } else { grid });
    let mut k = kernel_size;
    loop {
        let half = (k / 2) as i64;
        let g = grid as i64;
        let mut data = Vec::with_capacity(k * k);
        for dr in -half..=half {
            for dc in -half..=half {
                let r = (cr + dr).rem_euclid(g) as usize;
                let c = (cc + dc).rem_euclid(g) as usize;
                data.push(full[r * grid + c]);
            }
        }
        let kept: f64 = data.iter().sum();
        let energy = kept / total;
        if energy >= ENERGY_CAPTURE || k + 2 > max_size {
            for v in &mut data {
                *v /= kept;
            }
            return Ok(CroppedPsf {
                kernel: PsfKernel { size: k, data },
                energy,
            });
        }
        k += 2;
    }
}

/// PSF of a phase screen cropped to at least `kernel_size` and normalized.
pub fn psf_from_phase(phase: &[f64], spec: &ZernikeSpec, kernel_size: usize, max_size: usize) -> Result<CroppedPsf> {
    let full = full_psf(phase, spec)?;
    crop_psf(&full, spec.grid, kernel_size, max_size)
}

/// Second-moment radius `√(Σ p·‖r − centroid‖²)` of a kernel.
pub fn blur_metric(psf: &PsfKernel) -> f64 {
    let (cr, cc) = psf.centroid();
    let total = psf.sum();
    let mut m2 = 0.0;
    for r in 0..psf.size {
        for c in 0..psf.size {
            let dr = r as f64 - cr;
            let dc = c as f64 - cc;
            m2 += psf.at(r, c) * (dr * dr + dc * dc);
        }
    }
    (m2 / total).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_and_uniform_blur() {
        assert_eq!(blur_metric(&PsfKernel::delta(5)), 0.0);
        let u = PsfKernel {
            size: 3,
            data: vec![1.0 / 9.0; 9],
        };
        assert!((blur_metric(&u) - (12.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crop_rejects_even_size() {
        assert!(crop_psf(&[1.0; 64 * 64], 64, 32, 33).is_err());
    }
}
