use serde::{Deserialize, Serialize};

use crate::{Result, TurbError};

/// Radial order `n` and signed azimuthal frequency `m` of a Noll index.
/// Positive `m` is the cosine term (even j), negative the sine term (odd j).
pub fn noll_to_nm(j: usize) -> Result<(u32, i32)> {
    if j == 0 {
        return Err(TurbError::InvalidIndex(j));
    }
    let mut n = 0usize;
    while (n + 1) * (n + 2) / 2 < j {
        n += 1;
    }
    // position of j within its radial order, 1-based
    let p = j - n * (n + 1) / 2;
    let k = n % 2;
    let m = ((p + k) / 2) * 2 - k;
    let m = if m != 0 && j % 2 == 1 { -(m as i32) } else { m as i32 };
    Ok((n as u32, m))
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Radial polynomial R_n^|m|(ρ).
pub fn radial(n: u32, m: u32, rho: f64) -> f64 {
    let mut acc = 0.0;
    for s in 0..=(n - m) / 2 {
        let c = factorial(n - s) / (factorial(s) * factorial((n + m) / 2 - s) * factorial((n - m) / 2 - s));
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * c * rho.powi((n - 2 * s) as i32);
    }
    acc
}

/// Noll-normalized Zernike polynomial at polar coordinates on the unit disk;
/// zero for ρ > 1.
pub fn zernike_value(j: usize, rho: f64, theta: f64) -> Result<f64> {
    let (n, m) = noll_to_nm(j)?;
    if rho > 1.0 {
        return Ok(0.0);
    }
    let r = radial(n, m.unsigned_abs(), rho);
    let nf = f64::from(n) + 1.0;
    Ok(match m {
        0 => nf.sqrt() * r,
        m if m > 0 => (2.0 * nf).sqrt() * r * (f64::from(m) * theta).cos(),
        m => (2.0 * nf).sqrt() * r * (f64::from(-m) * theta).sin(),
    })
}

/// Pupil sampling: a `grid × grid` array whose unit disk has radius
/// `aperture_radius` pixels, centered between the four middle pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZernikeSpec {
    pub j_max: usize,
    pub grid: usize,
    pub aperture_radius: f64,
}

impl Default for ZernikeSpec {
    fn default() -> Self {
        Self {
            j_max: 36,
            grid: 128,
            aperture_radius: 32.0,
        }
    }
}

impl ZernikeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.j_max < 1 {
            return Err(TurbError::InvalidIndex(0));
        }
        if self.grid < 64 || self.grid % 2 != 0 {
            return Err(TurbError::Config(format!("pupil grid must be even and >= 64, got {}", self.grid)));
        }
        if !(self.aperture_radius > 0.0 && self.aperture_radius <= self.grid as f64 / 2.0) {
            return Err(TurbError::Config("aperture radius must lie in (0, grid/2]".into()));
        }
        Ok(())
    }

    /// Normalized pupil coordinates (x, y) of a pixel.
    pub fn coords(&self, row: usize, col: usize) -> (f64, f64) {
        let h = self.grid as f64 / 2.0;
        (
            (col as f64 + 0.5 - h) / self.aperture_radius,
            (row as f64 + 0.5 - h) / self.aperture_radius,
        )
    }

    pub fn in_aperture(&self, row: usize, col: usize) -> bool {
        let (x, y) = self.coords(row, col);
        x * x + y * y <= 1.0
    }
}

/// Mode `j` sampled on the pupil grid, row-major, zero outside the disk.
pub fn zernike_mode(j: usize, spec: &ZernikeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let p = spec.grid;
    let mut out = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            let (x, y) = spec.coords(r, c);
            let rho = (x * x + y * y).sqrt();
            if rho <= 1.0 {
                out[r * p + c] = zernike_value(j, rho, y.atan2(x))?;
            }
        }
    }
    Ok(out)
}

/// Modes 1..=j_max sampled once for repeated phase synthesis.
#[derive(Debug, Clone)]
pub struct ZernikeBasis {
    pub spec: ZernikeSpec,
    /// `modes[j - 1]` is mode j.
    pub modes: Vec<Vec<f64>>,
    pub mask: Vec<bool>,
}

impl ZernikeBasis {
    pub fn new(spec: &ZernikeSpec) -> Result<Self> {
        spec.validate()?;
        let modes = (1..=spec.j_max).map(|j| zernike_mode(j, spec)).collect::<Result<Vec<_>>>()?;
        let p = spec.grid;
        let mask: Vec<bool> = (0..p * p).map(|i| spec.in_aperture(i / p, i % p)).collect();
        if !mask.iter().any(|m| *m) {
            return Err(TurbError::ZeroAperture);
        }
        Ok(Self {
            spec: spec.clone(),
            modes,
            mask,
        })
    }

    /// Phase field `Σ_j coeffs[j - 1] · Z_j`.
    pub fn phase(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mask.len()];
        for (a, z) in coeffs.iter().zip(&self.modes) {
            if *a == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(z) {
                *o += a * v;
            }
        }
        out
    }

    /// Discrete inner products `mean over the disk of Z_i·Z_j` for modes
    /// 1..=k.
    pub fn gram(&self, k: usize) -> Vec<Vec<f64>> {
        let idx: Vec<usize> = (0..self.mask.len()).filter(|i| self.mask[*i]).collect();
        let n = idx.len() as f64;
        (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| idx.iter().map(|&i| self.modes[a][i] * self.modes[b][i]).sum::<f64>() / n)
                    .collect()
            })
            .collect()
    }
}
