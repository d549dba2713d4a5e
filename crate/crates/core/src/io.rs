//! Image and array files: binary PGM (8/16-bit), raw little-endian `f64`
//! sidecars, and grayscale PNG.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format { offset: offset as u64, message: message.into() }
}

/// Write through a temporary sibling, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Map `[lo, hi]` linearly onto `0..=maxval`.
fn quantize(v: f64, lo: f64, hi: f64, maxval: u32) -> u32 {
    if hi <= lo {
        return 0;
    }
    (((v - lo) / (hi - lo)).clamp(0.0, 1.0) * maxval as f64).round() as u32
}

/// Binary PGM of an `n×n` grid scaled from its min/max; `bits` is 8 or 16.
/// `echo` pairs become `# key=value` header comments.
pub fn write_pgm(path: &Path, g: &[f64], n: usize, bits: u32, echo: &[(String, String)]) -> Result<()> {
    crate::error::check_len(n * n, g.len())?;
    let maxval = match bits {
        8 => 255,
        16 => 65535,
        _ => return Err(Error::Config(format!("PGM depth must be 8 or 16 bits, got {bits}"))),
    };
    let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut buf = b"P5\n".to_vec();
    for (k, v) in echo {
        writeln!(buf, "# {k}={v}")?;
    }
    write!(buf, "{n} {n}\n{maxval}\n")?;
    for &v in g {
        let q = quantize(v, lo, hi, maxval);
        if bits == 8 {
            buf.push(q as u8);
        } else {
            buf.extend_from_slice(&(q as u16).to_be_bytes());
        }
    }
    write_atomic(path, &buf)
}

/// Pixels of a binary PGM scaled to `[0, 1]`, with the image side.
pub fn read_pgm(path: &Path) -> Result<(usize, Vec<f64>)> {
    let data = fs::read(path)?;
    parse_pgm(&data)
}

pub fn parse_pgm(data: &[u8]) -> Result<(usize, Vec<f64>)> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(format_err(0, "not a binary PGM (missing P5 magic)"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (k, field) in fields.iter_mut().enumerate() {
        // whitespace and comments
        loop {
            match data.get(pos) {
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(|c| c.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            let what = ["width", "height", "maxval"][k];
            return Err(format_err(start, format!("expected PGM {what}")));
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(start, "PGM header number out of range"))?;
    }
    if !data.get(pos).is_some_and(|c| c.is_ascii_whitespace()) {
        return Err(format_err(pos, "missing whitespace after PGM maxval"));
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if w != h {
        return Err(format_err(3, format!("image must be square, got {w}×{h}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(format_err(pos - 1, format!("PGM maxval {maxval} outside 1..=65535")));
    }
    let bytes = if maxval < 256 { 1 } else { 2 };
    let need = w * h * bytes;
    if data.len() - pos < need {
        return Err(format_err(data.len(), format!("PGM pixel data truncated: need {need} bytes after offset {pos}")));
    }
    let px = &data[pos..pos + need];
    let scale = 1.0 / maxval as f64;
    let values = if bytes == 1 {
        px.iter().map(|&b| b as f64 * scale).collect()
    } else {
        px.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale).collect()
    };
    Ok((w, values))
}

/// Raw little-endian `f64` values, no header.
pub fn write_raw_f64(path: &Path, values: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &buf)
}

pub fn read_raw_f64(path: &Path) -> Result<Vec<f64>> {
    let data = fs::read(path)?;
    if data.len() % 8 != 0 {
        return Err(format_err(data.len() - data.len() % 8, "raw float file length is not a multiple of 8"));
    }
    Ok(data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Square grid from a raw sidecar; the side is inferred from the length.
pub fn read_raw_grid(path: &Path) -> Result<(usize, Vec<f64>)> {
    let v = read_raw_f64(path)?;
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(format_err(0, format!("{} values do not form a square grid", v.len())));
    }
    Ok((n, v))
}

/// Sidecar path next to an image: `x.pgm` → `x.f64`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("f64")
}

/// 16-bit PGM plus exact `f64` sidecar.
pub fn write_grid(path: &Path, g: &[f64], n: usize, echo: &[(String, String)]) -> Result<()> {
    write_pgm(path, g, n, 16, echo)?;
    write_raw_f64(&sidecar_path(path), g)
}

/// Read a PGM or a raw sidecar, chosen by extension.
pub fn read_grid(path: &Path) -> Result<(usize, Vec<f64>)> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => read_pgm(path),
        _ => read_raw_grid(path),
    }
}

/// 8-bit grayscale PNG of a `rows × cols` array scaled from `lo..=hi`.
pub fn write_png_gray(path: &Path, v: &[f64], rows: usize, cols: usize, lo: f64, hi: f64) -> Result<()> {
    crate::error::check_len(rows * cols, v.len())?;
    let px: Vec<u8> = v.iter().map(|&x| quantize(x, lo, hi, 255) as u8).collect();
    write_png(path, &px, cols as u32, rows as u32, png::ColorType::Grayscale)
}

pub(crate) fn write_png(path: &Path, px: &[u8], width: u32, height: u32, color: png::ColorType) -> Result<()> {
    let mut bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(BufWriter::new(&mut bytes), width, height);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let png_err = |e: png::EncodingError| Error::Io(std::io::Error::other(e.to_string()));
        let mut w = enc.write_header().map_err(png_err)?;
        w.write_image_data(px).map_err(png_err)?;
        w.finish().map_err(png_err)?;
    }
    write_atomic(path, &bytes)
}

/// CSV with `# key=value` echo lines before the header.
pub fn write_csv(path: &Path, echo: &[(String, String)], header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = Vec::new();
    for (k, v) in echo {
        writeln!(buf, "# {k}={v}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)
}
