//! Zernike phase-screen turbulence simulation: random pupil aberrations,
//! their point-spread functions, and tiled blur-plus-noise degradation of
//! grayscale images.

mod degrade;
mod error;
mod image;
mod psf;
mod screen;
mod zernike;

pub use degrade::{degrade_image, tile_grid, tile_kernel};
pub use error::{Result, TurbError};
pub use image::{
    decode_fsimg64, decode_pgm, encode_fsimg64, encode_pgm, read_image, write_image, Image, FSIMG_HEADER_LEN,
    FSIMG_MAGIC,
};
pub use psf::{blur_metric, centroid, crop_psf, full_psf, psf_from_phase, CroppedPsf, PsfKernel, ENERGY_CAPTURE};
pub use screen::{
    mode_weights, noise_substream, sample_coefficients, sample_phase_screen, substream, TurbulenceParams, MAX_DR0,
};
pub use zernike::{noll_to_nm, radial, zernike_mode, zernike_value, ZernikeBasis, ZernikeSpec};
