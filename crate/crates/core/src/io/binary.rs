use std::io::{Read, Write};

use crate::{CoreError, Modality, ModalityDims, RangeClass, Result, Template};

/// Magic bytes at the start of a packed template store.
pub const STORE_MAGIC: &[u8; 8] = b"FSTPLT01";

/// Size in bytes of the packed feature payload of one template: 32-bit floats,
/// plus one trailing quality float for face templates.
pub fn payload_len(modality: Modality, dim: usize) -> usize {
    let floats = match modality {
        Modality::Face => dim + 1,
        Modality::Gait | Modality::Body => dim,
    };
    floats * 4
}

/// Packed little-endian f32 feature payload of a template.
pub fn template_payload(t: &Template) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload_len(t.modality, t.vector.len()));
    for x in &t.vector {
        out.extend_from_slice(&(*x as f32).to_le_bytes());
    }
    if t.modality == Modality::Face {
        out.extend_from_slice(&(t.quality as f32).to_le_bytes());
    }
    out
}

/// One store record: a small metadata header followed by the packed payload.
///
/// Header layout (little endian): modality u8, range class u8, quality f64,
/// subject id (u16 length + UTF-8), media id (u16 length + UTF-8), dim u32.
pub fn serialize_template(t: &Template) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.push(t.modality.to_code());
    out.push(match t.range_class {
        RangeClass::Close => 0,
        RangeClass::Long => 1,
    });
    out.extend_from_slice(&t.quality.to_le_bytes());
    put_str(&mut out, &t.subject_id)?;
    put_str(&mut out, &t.media_id)?;
    let dim = u32::try_from(t.vector.len())
        .map_err(|_| CoreError::Format("vector too long".into()))?;
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&template_payload(t));
    Ok(out)
}

/// Decodes one record from the front of `bytes`, returning the template and
/// the number of bytes consumed.
pub fn deserialize_template(bytes: &[u8]) -> Result<(Template, usize)> {
    let mut cur = Cursor { bytes, pos: 0 };
    let modality = Modality::from_code(cur.u8()?)
        .ok_or_else(|| CoreError::Format("bad modality code".into()))?;
    let range_class = match cur.u8()? {
        0 => RangeClass::Close,
        1 => RangeClass::Long,
        c => return Err(CoreError::Format(format!("bad range class code {c}"))),
    };
    let quality = f64::from_le_bytes(cur.array()?);
    let subject_id = cur.string()?;
    let media_id = cur.string()?;
    let dim = u32::from_le_bytes(cur.array()?) as usize;
    let mut vector = Vec::with_capacity(dim);
    for _ in 0..dim {
        vector.push(f32::from_le_bytes(cur.array()?) as f64);
    }
    if modality == Modality::Face {
        // stored quality float duplicates the header value
        cur.array::<4>()?;
    }
    Ok((
        Template {
            subject_id,
            media_id,
            modality,
            vector,
            quality,
            range_class,
        },
        cur.pos,
    ))
}

pub fn write_store<W: Write>(mut w: W, templates: &[Template]) -> Result<()> {
    w.write_all(STORE_MAGIC)?;
    let count = u32::try_from(templates.len())
        .map_err(|_| CoreError::Format("too many templates".into()))?;
    w.write_all(&count.to_le_bytes())?;
    for t in templates {
        w.write_all(&serialize_template(t)?)?;
    }
    Ok(())
}

/// Reads a packed store and validates every template against `dims`.
pub fn read_store<R: Read>(mut r: R, dims: &ModalityDims) -> Result<Vec<Template>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 12 || &bytes[..8] != STORE_MAGIC {
        return Err(CoreError::Format("missing FSTPLT01 header".into()));
    }
    let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let mut pos = 12;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (t, used) = deserialize_template(&bytes[pos..])
            .map_err(|e| CoreError::Format(format!("record {i}: {e}")))?;
        t.validate(dims)?;
        out.push(t);
        pos += used;
    }
    if pos != bytes.len() {
        return Err(CoreError::Format(format!(
            "{} trailing bytes after {count} records",
            bytes.len() - pos
        )));
    }
    Ok(out)
}

fn put_str(out: &mut Vec<u8>, s: &str) -> Result<()> {
    let len = u16::try_from(s.len())
        .map_err(|_| CoreError::Format(format!("identifier too long: {} bytes", s.len())))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(CoreError::Format(format!(
                "truncated stream: needed {n} bytes at offset {}",
                self.pos
            )));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn string(&mut self) -> Result<String> {
        let len = u16::from_le_bytes(self.array()?) as usize;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|e| CoreError::Format(format!("identifier is not UTF-8: {e}")))
    }
}
