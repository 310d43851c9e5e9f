use rand::Rng;
use rand_distr::StandardNormal;

use crate::{
    mode_weights, noise_substream, CroppedPsf, ENERGY_CAPTURE, psf_from_phase, sample_coefficients, substream, Image, PsfKernel, Result,
    TurbError, TurbulenceParams, ZernikeBasis,
};

/// Tile grid `(rows, cols)` covering an image; edge tiles may be partial.
pub fn tile_grid(height: usize, width: usize, tile: usize) -> (usize, usize) {
    (height.div_ceil(tile), width.div_ceil(tile))
}

/// Kernel of one tile. Zero turbulence yields a 1×1 delta; otherwise a
/// screen is drawn from the tile's own substream.
pub fn tile_kernel(basis: &ZernikeBasis, params: &TurbulenceParams, tile: u32) -> Result<CroppedPsf> {
    if params.d_over_r0 == 0.0 {
        return Ok(CroppedPsf {
            kernel: PsfKernel::delta(1),
            energy: 1.0,
        });
    }
    let w = mode_weights(basis.spec.j_max)?;
    let mut rng = substream(params.seed, params.frame, tile);
    let coeffs = sample_coefficients(&w, params.d_over_r0, &mut rng);
    let phase = basis.phase(&coeffs);
    // largest odd size that still fits in a tile
    let cap = params.tile_size - (1 - params.tile_size % 2);
    let max = params.max_kernel_size.min(cap).max(params.kernel_size);
    psf_from_phase(&phase, &basis.spec, params.kernel_size, max)
}

/// Convolves the pixels of `[r0, r1) × [c0, c1)` with `k`, reading the
/// full image with edge replication, and writes them into `out`.
fn convolve_region(img: &Image, k: &PsfKernel, rows: (usize, usize), cols: (usize, usize), out: &mut [f64]) {
    let half = (k.size / 2) as i64;
    for r in rows.0..rows.1 {
        for c in cols.0..cols.1 {
            let mut acc = 0.0;
            for u in 0..k.size {
                let rr = r as i64 - (u as i64 - half);
                for v in 0..k.size {
                    let kv = k.at(u, v);
                    if kv != 0.0 {
                        acc += kv * img.clamped(rr, c as i64 - (v as i64 - half));
                    }
                }
            }
            out[r * img.width + c] = acc;
        }
    }
}

/// Per-tile turbulence blur followed by additive white Gaussian noise.
pub fn degrade_image(img: &Image, basis: &ZernikeBasis, params: &TurbulenceParams) -> Result<Image> {
    params.validate()?;
    if img.height == 0 || img.width == 0 {
        return Err(TurbError::Format("image is empty".into()));
    }
    let (tr, tc) = tile_grid(img.height, img.width, params.tile_size);
    if tr * tc >= u32::MAX as usize {
        return Err(TurbError::Config("too many tiles".into()));
    }
    let mut out = vec![0.0; img.data.len()];
    let ts = params.tile_size;
    let mut worst = (1.0f64, 0usize);
    for ty in 0..tr {
        for tx in 0..tc {
            let psf = tile_kernel(basis, params, (ty * tc + tx) as u32)?;
            if psf.energy < worst.0 {
                worst = (psf.energy, psf.kernel.size);
            }
            let k = &psf.kernel;
            let rows = (ty * ts, ((ty + 1) * ts).min(img.height));
            let cols = (tx * ts, ((tx + 1) * ts).min(img.width));
            convolve_region(img, k, rows, cols, &mut out);
        }
    }
    if worst.0 < ENERGY_CAPTURE {
        log::warn!(
            "PSF crop of {0}x{0} keeps only {1:.2}% of the energy in the worst tile (target {2:.1}%)",
            worst.1,
            worst.0 * 100.0,
            ENERGY_CAPTURE * 100.0
        );
    }
    if params.noise_sigma > 0.0 {
        let mut rng = noise_substream(params.seed, params.frame);
        for v in &mut out {
            let z: f64 = rng.sample(StandardNormal);
            *v += params.noise_sigma * z;
        }
    }
    Image::new(img.height, img.width, out)
}
