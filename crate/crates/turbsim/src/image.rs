use std::io::{Read, Write};
use std::path::Path;

use crate::{Result, TurbError};

/// Grayscale image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(TurbError::Format(format!(
                "{} samples for a {height}x{width} image",
                data.len()
            )));
        }
        Ok(Self { height, width, data })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Sample with edge replication outside the image.
    pub fn clamped(&self, row: i64, col: i64) -> f64 {
        let r = row.clamp(0, self.height as i64 - 1) as usize;
        let c = col.clamp(0, self.width as i64 - 1) as usize;
        self.data[r * self.width + c]
    }
}

pub const FSIMG_MAGIC: &[u8; 7] = b"FSIMG64";
pub const FSIMG_HEADER_LEN: usize = 16;

/// Raw float64 image: 7-byte magic `FSIMG64`, one zero byte, height and
/// width as little-endian u32, then row-major little-endian f64 samples.
pub fn encode_fsimg64(img: &Image) -> Result<Vec<u8>> {
    let h = u32::try_from(img.height).map_err(|_| TurbError::Format("height exceeds u32".into()))?;
    let w = u32::try_from(img.width).map_err(|_| TurbError::Format("width exceeds u32".into()))?;
    let mut out = Vec::with_capacity(FSIMG_HEADER_LEN + 8 * img.data.len());
    out.extend_from_slice(FSIMG_MAGIC);
    out.push(0);
    out.extend_from_slice(&h.to_le_bytes());
    out.extend_from_slice(&w.to_le_bytes());
    for v in &img.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_fsimg64(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < FSIMG_HEADER_LEN || &bytes[..7] != FSIMG_MAGIC {
        return Err(TurbError::Format("missing FSIMG64 header".into()));
    }
    let h = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[FSIMG_HEADER_LEN..];
    if body.len() != h * w * 8 {
        return Err(TurbError::Format(format!(
            "expected {} data bytes for {h}x{w}, found {}",
            h * w * 8,
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Image::new(h, w, data)
}

/// Binary 8-bit PGM; samples are rounded and clamped to 0..=255.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.data.iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(TurbError::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(TurbError::Format(format!("unsupported PGM magic {}", fields[0])));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| TurbError::Format(format!("bad PGM header field {s}")))
    };
    let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(TurbError::Format(format!("only 8-bit PGM is supported (maxval {maxval})")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let body = bytes.get(pos..).unwrap_or(&[]);
    if body.len() != w * h {
        return Err(TurbError::Format(format!(
            "expected {} raster bytes for {w}x{h}, found {}",
            w * h,
            body.len()
        )));
    }
    Image::new(h, w, body.iter().map(|b| f64::from(*b)).collect())
}

/// Reads a PGM or FSIMG64 file, chosen by its leading bytes.
pub fn read_image(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(FSIMG_MAGIC) {
        decode_fsimg64(&bytes)
    } else {
        decode_pgm(&bytes)
    }
}

/// Writes PGM when the extension is `.pgm`, FSIMG64 otherwise.
pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let bytes = if is_pgm { encode_pgm(img) } else { encode_fsimg64(img)? };
    std::fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_with_comment() {
        let mut b = b"P5\n# c\n2 1\n255\n".to_vec();
        b.extend([7u8, 200]);
        let img = decode_pgm(&b).unwrap();
        assert_eq!((img.height, img.width), (1, 2));
        assert_eq!(img.data, vec![7.0, 200.0]);
        assert_eq!(encode_pgm(&img), b"P5\n2 1\n255\n\x07\xc8".to_vec());
    }

    #[test]
    fn fsimg_rejects_short_body() {
        let img = Image::filled(2, 2, 1.5);
        let mut b = encode_fsimg64(&img).unwrap();
        b.pop();
        assert!(decode_fsimg64(&b).is_err());
    }
}
