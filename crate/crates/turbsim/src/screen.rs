use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{noll_to_nm, Result, TurbError, ZernikeBasis};

/// Largest supported turbulence strength.
pub const MAX_DR0: f64 = 10.0;

/// Per-run degradation parameters. `cn2` is carried as metadata only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurbulenceParams {
    pub d_over_r0: f64,
    pub noise_sigma: f64,
    pub tile_size: usize,
    pub seed: u64,
    pub frame: u32,
    pub kernel_size: usize,
    pub max_kernel_size: usize,
    pub cn2: Option<f64>,
}

impl Default for TurbulenceParams {
    fn default() -> Self {
        Self {
            d_over_r0: 2.0,
            noise_sigma: 0.0,
            tile_size: 64,
            seed: 0,
            frame: 0,
            kernel_size: 33,
            max_kernel_size: 63,
            cn2: None,
        }
    }
}

impl TurbulenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_over_r0 >= 0.0 && self.d_over_r0 <= MAX_DR0) {
            return Err(TurbError::Config(format!(
                "D/r0 must lie in [0, {MAX_DR0}], got {}",
                self.d_over_r0
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(TurbError::Config(format!("noise sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if self.kernel_size % 2 == 0 || self.kernel_size == 0 {
            return Err(TurbError::Config(format!("kernel size must be odd, got {}", self.kernel_size)));
        }
        if self.max_kernel_size < self.kernel_size || self.max_kernel_size % 2 == 0 {
            return Err(TurbError::Config("max kernel size must be odd and >= kernel size".into()));
        }
        if self.tile_size < self.kernel_size {
            return Err(TurbError::Config(format!(
                "tile size {} is smaller than kernel size {}",
                self.tile_size, self.kernel_size
            )));
        }
        if let Some(c) = self.cn2 {
            if !(c > 0.0 && c.is_finite()) {
                return Err(TurbError::Config(format!("Cn2 must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

/// Relative coefficient weights: `w[j - 1]` for Noll index j, zero for
/// piston, `∝ (n_j + 1)^(-11/12)` otherwise, with `Σ w² = 1`.
pub fn mode_weights(j_max: usize) -> Result<Vec<f64>> {
    let mut w = vec![0.0; j_max];
    for j in 2..=j_max {
        let (n, _) = noll_to_nm(j)?;
        w[j - 1] = (f64::from(n) + 1.0).powf(-11.0 / 12.0);
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut w {
            *x /= norm;
        }
    }
    Ok(w)
}

/// Stream id reserved for additive noise within a frame.
const NOISE_STREAM: u64 = u32::MAX as u64;

/// Independent generator for one `(frame, tile)` pair. Tiles use streams
/// `0..u32::MAX`; the noise field of a frame uses the last one.
pub fn substream(seed: u64, frame: u32, tile: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(frame) << 32) | u64::from(tile));
    rng
}

pub fn noise_substream(seed: u64, frame: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(frame) << 32) | NOISE_STREAM);
    rng
}

/// Coefficients `a_1..a_J` (piston fixed at zero), each Gaussian with std
/// `(D/r0)^(5/6) · w_j`, drawn in Noll order.
pub fn sample_coefficients<R: Rng>(weights: &[f64], d_over_r0: f64, rng: &mut R) -> Vec<f64> {
    let amp = d_over_r0.powf(5.0 / 6.0);
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if i == 0 {
                return 0.0;
            }
            let z: f64 = rng.sample(StandardNormal);
            amp * w * z
        })
        .collect()
}

/// Random phase screen over the pupil grid.
pub fn sample_phase_screen<R: Rng>(basis: &ZernikeBasis, d_over_r0: f64, rng: &mut R) -> Result<Vec<f64>> {
    let w = mode_weights(basis.spec.j_max)?;
    Ok(basis.phase(&sample_coefficients(&w, d_over_r0, rng)))
}
