//! `turbsim`: degrade an image with simulated turbulence.

use clap::{Arg, ArgMatches, Command};
use lrid_turbsim::{degrade_image, read_image, write_image, TurbulenceParams, ZernikeBasis, ZernikeSpec};
use serde_json::json;

use super::{path_arg, print_json};
use crate::config::{key, with_keys, Key, Resolved};
use crate::{CliError, Result};

pub const KEYS: &[Key] = &[
    key("dr0", "2", "turbulence strength D/r0 in [0, 10]; 0 disables blur"),
    key("noise", "0", "additive Gaussian noise std (image units)"),
    key("tile", "64", "tile size in pixels; each tile gets its own phase screen"),
    key("seed", "0", "random seed"),
    key("frame", "0", "frame index (selects independent random substreams)"),
    key("kernel", "33", "initial PSF kernel size (odd)"),
    key("max_kernel", "63", "largest PSF kernel size when enlarging for energy capture (odd)"),
    key("j_max", "36", "highest Noll index in the phase screen"),
    key("grid", "128", "pupil grid size (even, >= 64)"),
    key("aperture_radius", "32", "pupil radius in grid pixels"),
    key("cn2", "", "refractive-index structure constant, recorded as metadata only"),
];

pub fn command() -> Command {
    with_keys(
        Command::new("turbsim")
            .about("Blur an image with per-tile Zernike phase-screen PSFs and add white noise (PGM or FSIMG64)")
            .arg(Arg::new("input").required(true).value_name("IN").help("Input image (binary PGM or FSIMG64)"))
            .arg(Arg::new("output").required(true).value_name("OUT").help("Output image; a .pgm extension writes PGM, anything else FSIMG64")),
        KEYS,
    )
}

pub fn run(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, KEYS)?;
    cfg.log("turbsim");
    let params = TurbulenceParams {
        d_over_r0: cfg.get("dr0")?,
        noise_sigma: cfg.get("noise")?,
        tile_size: cfg.get("tile")?,
        seed: cfg.get("seed")?,
        frame: cfg.get("frame")?,
        kernel_size: cfg.get("kernel")?,
        max_kernel_size: cfg.get("max_kernel")?,
        cn2: cfg.get_opt("cn2")?,
    };
    params.validate()?;
    let spec = ZernikeSpec {
        j_max: cfg.get("j_max")?,
        grid: cfg.get("grid")?,
        aperture_radius: cfg.get("aperture_radius")?,
    };
    let basis = ZernikeBasis::new(&spec)?;
    let input = path_arg(m, "input");
    let img = read_image(&input).map_err(|e| match e {
        lrid_turbsim::TurbError::Io(io) => CliError::Input(format!("cannot read {}: {io}", input.display())),
        other => other.into(),
    })?;
    let out = degrade_image(&img, &basis, &params)?;
    write_image(&path_arg(m, "output"), &out)?;
    print_json(&json!({ "height": out.height, "width": out.width, "cn2": params.cn2 }));
    Ok(())
}
